//! Dimension estimates from count growth `r_k = log|Σ_k| / (k log b)` and
//! the closed-form predictions for the structural schedules.

use serde::Serialize;

use crate::counting::{count_series, Mode, Series};
use crate::error::{Error, Result};
use crate::model::Params;
use crate::schedules::{
    classify_range, ratio_to_f64, GapMode, HoleSchedule, PatternClass, PqRule, Rule,
};
use crate::spectra::{dominant_root, lambda_pq, RootKind};

/// Exact counting is used up to this horizon, log-domain counting beyond.
pub const EXACT_HORIZON: usize = 10_000;
/// Exact counting is also skipped once `states · k_max` exceeds this.
pub const EXACT_WORK: usize = 1_000_000;

/// Exact for short, small runs; log-domain otherwise.
pub fn auto_mode(p: &Params, k_max: usize) -> Mode {
    if k_max <= EXACT_HORIZON && p.states().saturating_mul(k_max) <= EXACT_WORK {
        Mode::Exact
    } else {
        Mode::Log
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimReport {
    pub k_max: usize,
    pub window: f64,
    pub exact: bool,
    /// First `k` of the trailing window.
    pub window_start: usize,
    /// `r_k` for `k = 1..=k_max` (`ratios[k-1]`); `-inf` after extinction.
    pub ratios: Vec<f64>,
    /// Rounding bound on each `r_k`.
    pub drift: Vec<f64>,
    pub liminf_est: Option<f64>,
    pub limsup_est: Option<f64>,
    /// Largest drift in the window plus the change of the estimates when the
    /// window is halved.
    pub uncertainty: Option<f64>,
    pub extinction: Option<usize>,
}

impl DimReport {
    pub fn r(&self, k: usize) -> f64 {
        self.ratios[k - 1]
    }
}

fn window_start(k_max: usize, w: f64) -> usize {
    (((1.0 - w) * k_max as f64).ceil() as usize).max(1)
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// Trailing-window estimates of the lower and upper box dimensions.
pub fn estimate_dims(s: &HoleSchedule, k_max: usize, window: f64) -> Result<DimReport> {
    estimate_dims_with(s, k_max, window, auto_mode(s.params(), k_max))
}

pub fn estimate_dims_with(
    s: &HoleSchedule,
    k_max: usize,
    window: f64,
    mode: Mode,
) -> Result<DimReport> {
    let p = s.params();
    if k_max < 2 * p.m() {
        return Err(Error::InvalidParams(format!(
            "k_max = {k_max} must be at least 2m = {}",
            2 * p.m()
        )));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "window {window} must lie in (0, 1]"
        )));
    }
    let series = count_series(s, k_max, mode);
    Ok(report_from_series(p, &series, window))
}

pub(crate) fn report_from_series(p: &Params, series: &Series, window: f64) -> DimReport {
    let k_max = series.k_max();
    let log_b = (p.b() as f64).ln();
    let ratios: Vec<f64> = (1..=k_max)
        .map(|k| series.ln(k) / (k as f64 * log_b))
        .collect();
    let drift: Vec<f64> = (1..=k_max)
        .map(|k| series.drift(k) / (k as f64 * log_b))
        .collect();
    let extinction = series.extinction();
    let start = window_start(k_max, window);
    let half = window_start(k_max, window / 2.0);
    let (mut liminf_est, mut limsup_est, mut uncertainty) = (None, None, None);
    if extinction.is_none() {
        let (lo, hi) = min_max(&ratios[start - 1..]);
        let (lo2, hi2) = min_max(&ratios[half - 1..]);
        let worst_drift = drift[start - 1..].iter().cloned().fold(0.0, f64::max);
        liminf_est = Some(lo);
        limsup_est = Some(hi);
        uncertainty = Some(worst_drift + (lo - lo2).abs().max((hi - hi2).abs()));
    }
    DimReport {
        k_max,
        window,
        exact: matches!(series, Series::Exact(_)),
        window_start: start,
        ratios,
        drift,
        liminf_est,
        limsup_est,
        uncertainty,
        extinction,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Basis {
    ProgressivelyOverlapping,
    TotallyDistinct,
    Lpq { p: u64, q: u64 },
    Family { s: f64, t: f64 },
    EventuallyPo,
    EventuallyTd,
    Mixed,
    SingleDigitHole,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictedDims {
    pub hausdorff: f64,
    pub packing: f64,
    /// `log λ / log b`.
    pub assouad_endpoint: f64,
    /// `log η / log b`.
    pub lower_endpoint: f64,
    pub basis: Basis,
    /// False outside `b >= 3, m >= 2`.
    pub verified: bool,
}

/// Classes at positions `from..from+len` must all equal `class`.
fn eventually(s: &HoleSchedule, from: usize, len: usize, class: PatternClass) -> Result<bool> {
    let classes = classify_range(s, from + len)?;
    Ok(classes[from.saturating_sub(1)..]
        .iter()
        .all(|&c| c == class))
}

/// Tail class of a schedule whose holes repeat with a known period after a prefix.
fn periodic_tail(s: &HoleSchedule) -> Result<Option<PatternClass>> {
    let m = s.params().m();
    let (from, period) = match s.rule() {
        Rule::Periodic(words) => (1, words.len()),
        Rule::Explicit { sets, period } => (sets.len() - period + m, *period),
        _ => return Ok(None),
    };
    for class in [
        PatternClass::ProgressivelyOverlapping,
        PatternClass::TotallyDistinct,
    ] {
        if eventually(s, from.max(1), period + m, class)? {
            return Ok(Some(class));
        }
    }
    Ok(None)
}

/// Dimension predictions for the recognized structural schedules.
pub fn predict_dims(s: &HoleSchedule) -> Result<PredictedDims> {
    let p = *s.params();
    let log_b = (p.b() as f64).ln();
    if p.m() == 1 {
        if !s.is_single() {
            return Err(Error::NoPrediction("several single-digit holes".into()));
        }
        let d = ((p.b() - 1) as f64).ln() / log_b;
        return Ok(PredictedDims {
            hausdorff: d,
            packing: d,
            assouad_endpoint: d,
            lower_endpoint: d,
            basis: Basis::SingleDigitHole,
            verified: p.b() >= 3,
        });
    }
    let lam = dominant_root(&RootKind::Lambda, &p)?.value.ln() / log_b;
    let eta = dominant_root(&RootKind::Eta, &p)?.value.ln() / log_b;
    let both = |d: f64, basis| (d, d, basis);
    let (hausdorff, packing, basis) = match s.rule() {
        Rule::ProgressiveOverlap(_) => both(lam, Basis::ProgressivelyOverlapping),
        Rule::TotallyDistinct(_) => both(eta, Basis::TotallyDistinct),
        Rule::Mixed(_) => {
            let g = dominant_root(&RootKind::Gamma, &p)?.value.ln() / log_b;
            both(g, Basis::Mixed)
        }
        Rule::Family { pq, gap, .. } => match (pq.rule(), gap) {
            (PqRule::Fixed { p: pp, q }, GapMode::None) => both(
                lambda_pq(*pp, *q, &p)?.normalized,
                Basis::Lpq { p: *pp, q: *q },
            ),
            (PqRule::Fixed { .. }, GapMode::MGap) => {
                return Err(Error::NoPrediction(
                    "fixed runs with unconstrained gaps".into(),
                ))
            }
            _ => {
                let (s_lim, t_lim) = pq.limits().expect("generated runs carry limits");
                let (s_lim, t_lim) = (ratio_to_f64(s_lim), ratio_to_f64(t_lim));
                let h = t_lim * eta + (1.0 - t_lim) * lam;
                let pk = s_lim * eta + (1.0 - s_lim) * lam;
                (h, pk, Basis::Family { s: s_lim, t: t_lim })
            }
        },
        Rule::Periodic(_) | Rule::Explicit { .. } if s.is_single() => match periodic_tail(s)? {
            Some(PatternClass::ProgressivelyOverlapping) => both(lam, Basis::EventuallyPo),
            Some(PatternClass::TotallyDistinct) => both(eta, Basis::EventuallyTd),
            _ => {
                return Err(Error::NoPrediction(
                    "periodic pattern is neither eventually PO nor TD".into(),
                ))
            }
        },
        _ => {
            return Err(Error::NoPrediction(format!(
                "no structural formula for {s}"
            )))
        }
    };
    Ok(PredictedDims {
        hausdorff,
        packing,
        assouad_endpoint: lam,
        lower_endpoint: eta,
        basis,
        verified: p.verified(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSource {
    Given,
    Lambda,
    Eta,
    GeometricMean,
    SingleDigit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub beta: f64,
    pub source: RateSource,
    pub k_max: usize,
    /// `ln(|Σ_k| / β^k)` for `k = 1..=k_max`.
    pub log_ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub argmin: usize,
    pub argmax: usize,
    /// `max / min`.
    pub spread: f64,
    /// Least-squares slope of the log ratios over the second half, per step.
    pub trend_slope: f64,
    /// The fitted trend moves the ratio by more than a factor `e` over the
    /// second half, i.e. `β` is not the growth rate.
    pub unbounded_trend: bool,
}

impl RegularityReport {
    pub fn ratio(&self, k: usize) -> f64 {
        self.log_ratios[k - 1].exp()
    }
}

fn slope(xs: &[(f64, f64)]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = xs
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = xs.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Bands of `|Σ_k| / β^k`; `beta = None` picks `λ` for all-PO, `η` for all-TD
/// and `√(λη)` otherwise (a reporting default only).
pub fn regularity_ratios(
    s: &HoleSchedule,
    beta: Option<f64>,
    k_max: usize,
) -> Result<RegularityReport> {
    let p = *s.params();
    if k_max < 1 {
        return Err(Error::InvalidParams("k_max must be positive".into()));
    }
    let (beta, source) = match beta {
        Some(b) if b > 1.0 => (b, RateSource::Given),
        Some(b) => return Err(Error::InvalidParams(format!("rate {b} must exceed 1"))),
        None if p.m() == 1 => ((p.b() - 1) as f64, RateSource::SingleDigit),
        None => {
            let lam = dominant_root(&RootKind::Lambda, &p)?.value;
            let eta = dominant_root(&RootKind::Eta, &p)?.value;
            let classes = if s.is_single() {
                classify_range(s, k_max).ok()
            } else {
                None
            };
            let all = |c: PatternClass| classes.as_ref().is_some_and(|v| v.iter().all(|&x| x == c));
            if all(PatternClass::ProgressivelyOverlapping) {
                (lam, RateSource::Lambda)
            } else if all(PatternClass::TotallyDistinct) {
                (eta, RateSource::Eta)
            } else {
                ((lam * eta).sqrt(), RateSource::GeometricMean)
            }
        }
    };
    let series = count_series(s, k_max, auto_mode(&p, k_max));
    if let Some(k) = series.extinction() {
        return Err(Error::Extinction(k));
    }
    let lb = beta.ln();
    let log_ratios: Vec<f64> = (1..=k_max).map(|k| series.ln(k) - k as f64 * lb).collect();
    let (mut argmin, mut argmax) = (1, 1);
    for k in 1..=k_max {
        if log_ratios[k - 1] < log_ratios[argmin - 1] {
            argmin = k;
        }
        if log_ratios[k - 1] > log_ratios[argmax - 1] {
            argmax = k;
        }
    }
    let (min, max) = (log_ratios[argmin - 1].exp(), log_ratios[argmax - 1].exp());
    let half = k_max / 2 + 1;
    let pts: Vec<(f64, f64)> = (half..=k_max)
        .map(|k| (k as f64, log_ratios[k - 1]))
        .collect();
    let trend_slope = slope(&pts);
    let unbounded_trend = trend_slope.abs() * (k_max - half + 1) as f64 > 1.0;
    Ok(RegularityReport {
        beta,
        source,
        k_max,
        spread: (log_ratios[argmax - 1] - log_ratios[argmin - 1]).exp(),
        log_ratios,
        min,
        max,
        argmin,
        argmax,
        trend_slope,
        unbounded_trend,
    })
}

/// `1 - 2/(m-2) · (log m / log b + 1)`, a lower bound for the dimension of
/// survivor sets with two moving holes, valid for `m >= 10`.
///
/// Takes `b` and `m` directly: the bound is meaningful for `m` far beyond the
/// sizes where a `Params` state space can be indexed.
pub fn moran_bound(b: usize, m: usize) -> Result<f64> {
    if b < 2 {
        return Err(Error::InvalidParams(format!(
            "base b = {b} must be at least 2"
        )));
    }
    let b = b as f64;
    if m < 10 {
        return Err(Error::InvalidParams(format!(
            "the two-hole bound needs m >= 10, got m = {m}"
        )));
    }
    Ok(1.0 - 2.0 / (m as f64 - 2.0) * ((m as f64).ln() / b.ln() + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: usize,
    /// `ℓ_n + p_{n+1}`, the end of a PO run.
    pub k_sup: u64,
    pub r_sup: f64,
    /// `ℓ_{n+1}`, the end of a cycle.
    pub k_inf: u64,
    pub r_inf: f64,
}

/// `r_k` at the run boundaries of a family schedule, for all cycles ending by `k_limit`.
pub fn family_checkpoints(s: &HoleSchedule, k_limit: usize) -> Result<Vec<Checkpoint>> {
    let Rule::Family { pq, gap, .. } = s.rule() else {
        return Err(Error::InvalidSchedule(
            "checkpoints need a family schedule".into(),
        ));
    };
    let p = s.params();
    let g = if *gap == GapMode::MGap {
        p.m() as u64
    } else {
        0
    };
    let mut points = Vec::new();
    let mut n = 0;
    while pq.ell(n + 1, g) <= k_limit as u64 {
        let (p_next, _) = pq.term(n + 1);
        points.push((n, pq.ell(n, g) + p_next, pq.ell(n + 1, g)));
        n += 1;
    }
    let Some(&(_, _, last)) = points.last() else {
        return Ok(Vec::new());
    };
    let series = count_series(s, last as usize, auto_mode(p, last as usize));
    let log_b = (p.b() as f64).ln();
    let r = |k: u64| series.ln(k as usize) / (k as f64 * log_b);
    Ok(points
        .into_iter()
        .map(|(n, k_sup, k_inf)| Checkpoint {
            n,
            k_sup,
            r_sup: r(k_sup),
            k_inf,
            r_inf: r(k_inf),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_word;
    use crate::schedules::{build_pq_schedule, Rational, SeedStream};

    fn params(b: usize, m: usize) -> Params {
        Params::new(b, m).unwrap()
    }

    #[test]
    fn predictions() {
        let p = params(3, 2);
        let po = HoleSchedule::progressive(p, SeedStream::zeros()).unwrap();
        let d = predict_dims(&po).unwrap();
        assert!((d.hausdorff - 0.91484).abs() < 1e-5 && d.hausdorff == d.packing);
        let pq = build_pq_schedule(Rational::new(1, 4), Rational::new(1, 2), 1).unwrap();
        let fam = HoleSchedule::family(p, pq, GapMode::MGap, SeedStream::Rng(1)).unwrap();
        let d = predict_dims(&fam).unwrap();
        assert!((d.hausdorff - 0.89544).abs() < 1e-5, "{}", d.hausdorff);
        assert!((d.packing - 0.90514).abs() < 1e-5, "{}", d.packing);
        let p1 = params(3, 1);
        let s = HoleSchedule::periodic(p1, vec![parse_word("2", &p1).unwrap()]).unwrap();
        assert!((predict_dims(&s).unwrap().hausdorff - 0.63093).abs() < 1e-5);
        let lpq = HoleSchedule::lpq(p, 1, 1, SeedStream::Rng(3)).unwrap();
        assert!((predict_dims(&lpq).unwrap().hausdorff - 0.90315).abs() < 1e-5);
    }

    #[test]
    fn periodic_predictions() {
        let p = params(3, 2);
        let w = |t: &str| parse_word(t, &p).unwrap();
        let s = HoleSchedule::periodic(p, vec![w("01"), w("10")]).unwrap();
        assert_eq!(predict_dims(&s).unwrap().basis, Basis::EventuallyPo);
        let s = HoleSchedule::periodic(p, vec![w("01"), w("11")]).unwrap();
        assert!(matches!(predict_dims(&s), Err(Error::NoPrediction(_))));
        let s = HoleSchedule::explicit(p, vec![vec![w("00")], vec![w("10")]], 1).unwrap();
        assert_eq!(predict_dims(&s).unwrap().basis, Basis::EventuallyTd);
    }

    #[test]
    fn moran() {
        assert!((moran_bound(3, 10).unwrap() - 0.22602).abs() < 1e-5);
        assert!((moran_bound(3, 100).unwrap() - 0.89404).abs() < 1e-5);
        assert!(moran_bound(3, 9).is_err());
    }

    #[test]
    fn regularity_examples() {
        let p = params(3, 2);
        let po = HoleSchedule::progressive(p, SeedStream::zeros()).unwrap();
        let r = regularity_ratios(&po, None, 4).unwrap();
        assert_eq!(r.source, RateSource::Lambda);
        for (k, want) in [(2, 1.0718), (3, 1.0789), (4, 1.0770)] {
            assert!((r.ratio(k) - want).abs() < 1e-4, "k={k}: {}", r.ratio(k));
        }
        let r = regularity_ratios(&po, None, 200).unwrap();
        assert!(!r.unbounded_trend && r.spread < 1.1);
        let eta = (3.0 + 5f64.sqrt()) / 2.0;
        let r = regularity_ratios(&po, Some(eta), 200).unwrap();
        assert!(r.unbounded_trend);
        let td = HoleSchedule::totally_distinct(p, SeedStream::Rng(8)).unwrap();
        let r = regularity_ratios(&td, None, 200).unwrap();
        assert_eq!(r.source, RateSource::Eta);
        assert!(!r.unbounded_trend && r.spread.is_finite());
    }

    #[test]
    fn window_estimates() {
        let p = params(3, 2);
        let po = HoleSchedule::progressive(p, SeedStream::zeros()).unwrap();
        let rep = estimate_dims(&po, 2000, 0.5).unwrap();
        assert_eq!(rep.window_start, 1000);
        assert!(rep.exact);
        let lo = rep.liminf_est.unwrap();
        assert!(lo <= rep.limsup_est.unwrap());
        assert!((lo - 0.91484).abs() < 2e-3);
        assert!(estimate_dims(&po, 3, 0.5).is_err());
        assert!(estimate_dims(&po, 100, 0.0).is_err());
    }

    #[test]
    fn extinct_report() {
        let p = params(2, 1);
        let w = |t: &str| parse_word(t, &p).unwrap();
        let s = HoleSchedule::explicit(p, vec![vec![w("0"), w("1")]], 1).unwrap();
        let rep = estimate_dims(&s, 10, 0.5).unwrap();
        assert_eq!(rep.extinction, Some(1));
        assert!(rep.liminf_est.is_none() && rep.uncertainty.is_none());
        assert!(matches!(
            regularity_ratios(&s, Some(2.0), 10),
            Err(Error::Extinction(1))
        ));
    }

    #[test]
    fn checkpoints_small() {
        let p = params(3, 2);
        let pq = build_pq_schedule(Rational::new(1, 4), Rational::new(1, 2), 1).unwrap();
        let s = HoleSchedule::family(p, pq, GapMode::MGap, SeedStream::Rng(1)).unwrap();
        let cps = family_checkpoints(&s, 3293).unwrap();
        let ks: Vec<(u64, u64)> = cps.iter().map(|c| (c.k_sup, c.k_inf)).collect();
        assert_eq!(
            ks,
            [
                (1, 5),
                (9, 16),
                (29, 45),
                (85, 128),
                (249, 373),
                (737, 1104),
                (2197, 3293)
            ]
        );
    }
}
