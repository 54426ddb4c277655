use crate::schedules::HoleSchedule;

/// `ln |Σ_k|` for `k = 0..=k_max` from a floating state vector rescaled by a
/// power of two each step.
///
/// The rescaling is exact, so rounding enters only through the additions in
/// each step; every state is a sum of at most `b` nonnegative terms, which
/// bounds the relative error growth by `(b-1)·ε` per step.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSeries {
    b: usize,
    states: usize,
    values: Vec<f64>,
    extinction: Option<usize>,
}

impl LogSeries {
    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `ln |Σ_k|`, `-inf` from the extinction point on.
    pub fn ln(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extinction(&self) -> Option<usize> {
        self.extinction
    }

    /// Bound on `|ln |Σ_k| - ln(k)|` from rounding.
    pub fn drift_at(&self, k: usize) -> f64 {
        let eps = f64::EPSILON;
        let steps = (k * self.b + self.states + 4) as f64;
        1.01 * steps * eps + 4.0 * eps * (self.values[k].abs() + 1.0)
    }

    /// Drift at the last computed length.
    pub fn drift_bound(&self) -> f64 {
        self.drift_at(self.k_max())
    }
}

pub fn log_series(s: &HoleSchedule, k_max: usize) -> LogSeries {
    let p = *s.params();
    let (b, m, states) = (p.b(), p.m(), p.states());
    let stride = (states / b).max(1);
    let mut values = Vec::with_capacity(k_max + 1);
    for k in 0..(m - 1).min(k_max + 1) {
        values.push(k as f64 * (b as f64).ln());
    }
    let mut cur = vec![1.0f64; states];
    let mut next = vec![0.0f64; states];
    let mut exponent: i64 = 0;
    let mut holes = Vec::new();
    let mut extinction = None;
    let mut k = m - 1;
    loop {
        let sum: f64 = cur.iter().sum();
        if sum == 0.0 {
            extinction.get_or_insert(k);
            values.push(f64::NEG_INFINITY);
        } else {
            values.push(sum.ln() + exponent as f64 * std::f64::consts::LN_2);
        }
        if k == k_max {
            break;
        }
        if extinction.is_some() {
            k += 1;
            continue;
        }
        s.hole_codes(k + 1 - m, &mut holes);
        if m == 1 {
            next[0] = cur[0] * (b - holes.len()) as f64;
        } else {
            for w in 0..stride {
                let total: f64 = (0..b).map(|a| cur[a * stride + w]).sum();
                next[w * b..w * b + b].fill(total);
            }
            // Targets hit by a hole are re-summed over their allowed
            // predecessors instead of subtracting.
            for (i, &h) in holes.iter().enumerate() {
                let target = h % states;
                if holes[..i].iter().any(|&g| g % states == target) {
                    continue;
                }
                let w = target / b;
                next[target] = (0..b)
                    .filter(|&a| {
                        let src = a * stride + w;
                        !holes.iter().any(|&g| g % states == target && g / b == src)
                    })
                    .map(|a| cur[a * stride + w])
                    .sum();
            }
        }
        let max = next.iter().cloned().fold(0.0f64, f64::max);
        if max > 0.0 {
            let e = max.log2().floor() as i32;
            let scale = (2.0f64).powi(-e);
            for x in next.iter_mut() {
                *x *= scale;
            }
            exponent += e as i64;
        }
        std::mem::swap(&mut cur, &mut next);
        k += 1;
    }
    LogSeries {
        b,
        states,
        values,
        extinction,
    }
}
