//! Parser for the schedule grammar.
//!
//! ```text
//! po:seed=S | td:seed=S | mixed:seed=S
//! periodic:W|W|…
//! explicit:W+W|W|…[,tail=N]
//! lpq:p=N,q=N,seed=S[,gap=none|m]
//! family:s=R,t=R,p1=N,seed=S[,gap=none|m]
//! multi:(SPEC);(SPEC)…
//! ```
//!
//! `S` is a digit word or `rng:N`; `R` is an integer, `a/b` or a decimal.

use std::fmt;

use num_rational::Ratio;
use survivor_core::{
    build_pq_schedule, parse_digits, parse_word, GapMode, HoleSchedule, PQSchedule, Params,
    Rational, SeedStream, Word,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SpecError {
    /// Malformed text; `pos` is a byte offset into the full spec.
    Syntax { pos: usize, msg: String },
    /// Well-formed but rejected by the schedule constructors.
    Semantic(survivor_core::Error),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Syntax { pos, msg } => {
                write!(f, "schedule syntax error at offset {pos}: {msg}")
            }
            SpecError::Semantic(e) => write!(f, "schedule rejected: {e}"),
        }
    }
}

impl std::error::Error for SpecError {}

type Res<T> = std::result::Result<T, SpecError>;

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Res<T> {
    Err(SpecError::Syntax {
        pos,
        msg: msg.into(),
    })
}

fn semantic(e: survivor_core::Error) -> SpecError {
    SpecError::Semantic(e)
}

/// Parses `text` into a schedule over `p`.
pub fn parse_schedule_spec(text: &str, p: &Params) -> Res<HoleSchedule> {
    parse_at(text, 0, p)
}

/// Splits `body` on `sep`, returning pieces with their absolute offsets.
fn split(body: &str, base: usize, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in body.char_indices() {
        if c == sep {
            out.push((base + start, &body[start..i]));
            start = i + c.len_utf8();
        }
    }
    out.push((base + start, &body[start..]));
    out
}

fn parse_at(text: &str, base: usize, p: &Params) -> Res<HoleSchedule> {
    let Some(colon) = text.find(':') else {
        return syntax(base, "expected '<kind>:' at the start");
    };
    let (head, body) = (&text[..colon], &text[colon + 1..]);
    let body_pos = base + colon + 1;
    match head {
        "po" | "td" | "mixed" => {
            let mut kv = KeyValues::parse(body, body_pos, &["seed"])?;
            let seed = kv.seed("seed", p)?;
            kv.finish()?;
            let made = match head {
                "po" => HoleSchedule::progressive(*p, seed),
                "td" => HoleSchedule::totally_distinct(*p, seed),
                _ => HoleSchedule::mixed(*p, seed),
            };
            made.map_err(semantic)
        }
        "periodic" => {
            let words = split(body, body_pos, '|')
                .into_iter()
                .map(|(pos, w)| word(w, pos, p))
                .collect::<Res<Vec<_>>>()?;
            HoleSchedule::periodic(*p, words).map_err(semantic)
        }
        "explicit" => parse_explicit(body, body_pos, p),
        "lpq" => {
            let mut kv = KeyValues::parse(body, body_pos, &["p", "q", "seed", "gap"])?;
            let pp = kv.int("p")?;
            let q = kv.int("q")?;
            let seed = kv.seed("seed", p)?;
            let gap = kv.gap(GapMode::None)?;
            kv.finish()?;
            let pq = PQSchedule::fixed(pp, q).map_err(semantic)?;
            HoleSchedule::family(*p, pq, gap, seed).map_err(semantic)
        }
        "family" => {
            let mut kv = KeyValues::parse(body, body_pos, &["s", "t", "p1", "seed", "gap"])?;
            let s = kv.rational("s")?;
            let t = kv.rational("t")?;
            let p1 = kv.int("p1")?;
            let seed = kv.seed("seed", p)?;
            let gap = kv.gap(GapMode::MGap)?;
            kv.finish()?;
            let pq = build_pq_schedule(s, t, p1).map_err(semantic)?;
            HoleSchedule::family(*p, pq, gap, seed).map_err(semantic)
        }
        "multi" => parse_multi(body, body_pos, p),
        _ => syntax(base, format!("unknown schedule kind '{head}'")),
    }
}

fn word(text: &str, pos: usize, p: &Params) -> Res<Word> {
    if text.is_empty() {
        return syntax(pos, "empty word");
    }
    parse_word(text, p).map_err(|e| SpecError::Syntax {
        pos,
        msg: e.to_string(),
    })
}

fn parse_explicit(body: &str, base: usize, p: &Params) -> Res<HoleSchedule> {
    let (sets_text, tail) = match body.find(",tail=") {
        Some(i) => {
            let pos = base + i + ",tail=".len();
            let n = body[i + ",tail=".len()..]
                .parse::<usize>()
                .or_else(|_| syntax(pos, "tail must be a positive integer"))?;
            (&body[..i], n)
        }
        None => (body, 1),
    };
    let sets = split(sets_text, base, '|')
        .into_iter()
        .map(|(pos, set)| {
            split(set, pos, '+')
                .into_iter()
                .map(|(wpos, w)| word(w, wpos, p))
                .collect::<Res<Vec<_>>>()
        })
        .collect::<Res<Vec<_>>>()?;
    HoleSchedule::explicit(*p, sets, tail).map_err(semantic)
}

fn parse_multi(body: &str, base: usize, p: &Params) -> Res<HoleSchedule> {
    let bytes = body.as_bytes();
    let mut parts = Vec::new();
    let mut i = 0;
    loop {
        if bytes.get(i) != Some(&b'(') {
            return syntax(base + i, "expected '('");
        }
        let mut depth = 0usize;
        let mut close = None;
        for (j, &c) in bytes.iter().enumerate().skip(i) {
            match c {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(j);
                        break;
                    }
                }
                _ => {}
            }
        }
        let Some(close) = close else {
            return syntax(base + i, "unbalanced '('");
        };
        parts.push(parse_at(&body[i + 1..close], base + i + 1, p)?);
        i = close + 1;
        match bytes.get(i) {
            None => break,
            Some(b';') => i += 1,
            Some(_) => return syntax(base + i, "expected ';' between parts"),
        }
    }
    HoleSchedule::multi(parts).map_err(semantic)
}

struct KeyValues<'a> {
    end: usize,
    entries: Vec<(&'a str, usize, &'a str)>,
}

impl<'a> KeyValues<'a> {
    fn parse(body: &'a str, base: usize, allowed: &[&str]) -> Res<Self> {
        let mut entries: Vec<(&str, usize, &str)> = Vec::new();
        for (pos, item) in split(body, base, ',') {
            let Some(eq) = item.find('=') else {
                return syntax(pos, format!("expected key=value, found '{item}'"));
            };
            let key = &item[..eq];
            if !allowed.contains(&key) {
                return syntax(pos, format!("unknown key '{key}'"));
            }
            if entries.iter().any(|(k, _, _)| *k == key) {
                return syntax(pos, format!("duplicate key '{key}'"));
            }
            entries.push((key, pos + eq + 1, &item[eq + 1..]));
        }
        Ok(KeyValues {
            end: base + body.len(),
            entries,
        })
    }

    fn take(&mut self, key: &str) -> Option<(usize, &'a str)> {
        let i = self.entries.iter().position(|(k, _, _)| *k == key)?;
        let (_, pos, v) = self.entries.remove(i);
        Some((pos, v))
    }

    fn need(&mut self, key: &str) -> Res<(usize, &'a str)> {
        match self.take(key) {
            Some(x) => Ok(x),
            None => syntax(self.end, format!("missing '{key}='")),
        }
    }

    fn int(&mut self, key: &str) -> Res<u64> {
        let (pos, v) = self.need(key)?;
        v.parse()
            .or_else(|_| syntax(pos, format!("'{key}' must be a nonnegative integer")))
    }

    fn rational(&mut self, key: &str) -> Res<Rational> {
        let (pos, v) = self.need(key)?;
        parse_rational(v).ok_or_else(|| SpecError::Syntax {
            pos,
            msg: format!("'{key}' must be an integer, a/b or a decimal"),
        })
    }

    fn seed(&mut self, key: &str, p: &Params) -> Res<SeedStream> {
        let (pos, v) = self.need(key)?;
        if let Some(n) = v.strip_prefix("rng:") {
            return n
                .parse()
                .map(SeedStream::Rng)
                .or_else(|_| syntax(pos + 4, "rng seed must be a 64-bit unsigned integer"));
        }
        let digits = parse_digits(v).map_err(|e| SpecError::Syntax {
            pos,
            msg: e.to_string(),
        })?;
        let mut out = Vec::with_capacity(digits.len());
        for d in digits {
            if d >= p.b() {
                return syntax(pos, format!("seed digit {d} is not below b = {}", p.b()));
            }
            out.push(d as u8);
        }
        Ok(SeedStream::Cycle(out))
    }

    fn gap(&mut self, default: GapMode) -> Res<GapMode> {
        match self.take("gap") {
            None => Ok(default),
            Some((_, "none")) => Ok(GapMode::None),
            Some((_, "m")) => Ok(GapMode::MGap),
            Some((pos, _)) => syntax(pos, "gap must be 'none' or 'm'"),
        }
    }

    fn finish(self) -> Res<()> {
        match self.entries.first() {
            None => Ok(()),
            Some((k, pos, _)) => syntax(*pos, format!("key '{k}' does not apply here")),
        }
    }
}

/// `7`, `3/4` or `0.25`, exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    if let Some((n, d)) = text.split_once('/') {
        let (n, d): (i64, i64) = (n.parse().ok()?, d.parse().ok()?);
        return (d != 0).then(|| Ratio::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = 10i64.pow(frac.len() as u32);
        let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let f: i64 = frac.parse().ok()?;
        return Some(Ratio::new(whole.checked_mul(scale)?.checked_add(f)?, scale));
    }
    text.parse::<i64>().ok().map(Ratio::from_integer)
}
