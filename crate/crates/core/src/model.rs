//! Base/hole-length parameters and digit words.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported base; digits are stored as `u8`.
pub const MAX_BASE: usize = 256;

/// The pair `(b, m)`: alphabet size and hole-word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Params {
    b: usize,
    m: usize,
    states: usize,
    words: usize,
}

impl Params {
    pub fn new(b: usize, m: usize) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParams(format!(
                "base b = {b} must be at least 2"
            )));
        }
        if b > MAX_BASE {
            return Err(Error::InvalidParams(format!(
                "base b = {b} exceeds {MAX_BASE}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidParams(
                "hole length m must be at least 1".into(),
            ));
        }
        let exp = u32::try_from(m)
            .map_err(|_| Error::InvalidParams(format!("hole length m = {m} is too large")))?;
        let words = b.checked_pow(exp).ok_or_else(|| {
            Error::InvalidParams(format!("b^m = {b}^{m} overflows the index size"))
        })?;
        Ok(Params {
            b,
            m,
            states: words / b,
            words,
        })
    }

    #[inline]
    pub fn b(&self) -> usize {
        self.b
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of de Bruijn states, `b^(m-1)`.
    #[inline]
    pub fn states(&self) -> usize {
        self.states
    }

    /// Number of hole words, `b^m`.
    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    /// True when `b >= 3` and `m >= 2`, the regime where every structural
    /// result is proven. Engines still run outside it.
    pub fn verified(&self) -> bool {
        self.b >= 3 && self.m >= 2
    }

    /// `m = 1` has the closed-form dimension `log(b-1)/log b`.
    pub fn closed_form(&self) -> bool {
        self.m == 1
    }

    pub(crate) fn check_digit(&self, d: usize) -> Result<u8> {
        if d < self.b {
            Ok(d as u8)
        } else {
            Err(Error::InvalidWord(format!(
                "digit {d} out of range for base {}",
                self.b
            )))
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(b={}, m={})", self.b, self.m)
    }
}

/// A finite word over `{0, .., b-1}`. Ordering is digit-wise lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    digits: Vec<u8>,
}

impl Word {
    pub fn new(digits: Vec<u8>, p: &Params) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        for &d in &digits {
            p.check_digit(d as usize)?;
        }
        Ok(Word { digits })
    }

    /// Builds a word without range checks; callers guarantee `digits < b`.
    pub(crate) fn from_digits_unchecked(digits: Vec<u8>) -> Self {
        Word { digits }
    }

    /// Unpacks `index` into a word of `len` digits, most significant first.
    pub fn from_index(mut index: usize, len: usize, b: usize) -> Self {
        let mut digits = vec![0u8; len];
        for slot in digits.iter_mut().rev() {
            *slot = (index % b) as u8;
            index /= b;
        }
        Word { digits }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Packed index in `[0, b^len)`, most significant digit first.
    pub fn index(&self, b: usize) -> usize {
        pack(&self.digits, b)
    }
}

#[inline]
pub(crate) fn pack(digits: &[u8], b: usize) -> usize {
    digits.iter().fold(0usize, |acc, &d| acc * b + d as usize)
}

impl serde::Serialize for Word {
    /// The display form, e.g. `"012"` or `"[10]2"`.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            if d < 10 {
                write!(f, "{d}")?;
            } else {
                write!(f, "[{d}]")?;
            }
        }
        Ok(())
    }
}

/// Parses a bare digit string without a base check. Digits of value ten or
/// more use the bracketed decimal form `[12]`.
pub fn parse_digits(text: &str) -> Result<Vec<usize>> {
    if text.is_empty() {
        return Err(Error::InvalidWord("empty digit string".into()));
    }
    let mut out = Vec::with_capacity(text.len());
    let mut chars = text.char_indices();
    while let Some((pos, c)) = chars.next() {
        match c {
            '0'..='9' => out.push(c as usize - '0' as usize),
            '[' => {
                let mut value = String::new();
                loop {
                    match chars.next() {
                        Some((_, ']')) => break,
                        Some((_, d @ '0'..='9')) => value.push(d),
                        Some((p, other)) => {
                            return Err(Error::InvalidWord(format!(
                                "unexpected '{other}' at {p} inside bracketed digit"
                            )))
                        }
                        None => return Err(Error::InvalidWord(format!("unclosed '[' at {pos}"))),
                    }
                }
                if value.is_empty() {
                    return Err(Error::InvalidWord(format!("empty brackets at {pos}")));
                }
                let d: usize = value
                    .parse()
                    .map_err(|_| Error::InvalidWord(format!("bad bracketed digit at {pos}")))?;
                out.push(d);
            }
            other => {
                return Err(Error::InvalidWord(format!("unexpected '{other}' at {pos}")));
            }
        }
    }
    Ok(out)
}

/// Parses a digit string such as `"102"` or `"1[12]0"` into a word over `p.b()`.
pub fn parse_word(text: &str, p: &Params) -> Result<Word> {
    let digits = parse_digits(text)?
        .into_iter()
        .map(|d| p.check_digit(d))
        .collect::<Result<Vec<_>>>()?;
    Word::new(digits, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn params_regimes() {
        let p = Params::new(3, 2).unwrap();
        assert!(p.verified());
        assert_eq!((p.b(), p.m(), p.states(), p.words()), (3, 2, 3, 9));

        let p = Params::new(2, 4).unwrap();
        assert!(!p.verified());

        assert!(Params::new(3, 1).unwrap().closed_form());
        assert!(Params::new(1, 2).is_err());
        assert!(Params::new(3, 0).is_err());
        assert!(Params::new(257, 2).is_err());
        assert!(Params::new(256, 64).is_err());
    }

    #[test]
    fn parse_examples() {
        let p = Params::new(3, 2).unwrap();
        assert_eq!(parse_word("00", &p).unwrap().digits(), &[0, 0]);
        assert_eq!(parse_word("102", &p).unwrap().digits(), &[1, 0, 2]);
        assert!(parse_word("03", &p).is_err());
        assert!(parse_word("", &p).is_err());
        assert!(parse_word("0a", &p).is_err());

        let p = Params::new(16, 2).unwrap();
        let w = parse_word("1[12]0", &p).unwrap();
        assert_eq!(w.digits(), &[1, 12, 0]);
        assert_eq!(w.to_string(), "1[12]0");
        assert!(parse_word("[16]", &p).is_err());
        assert!(parse_word("[1", &p).is_err());
    }

    #[test]
    fn packing_is_lexicographic() {
        let b = 3;
        let words: Vec<Word> = (0..27).map(|i| Word::from_index(i, 3, b)).collect();
        for pair in words.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        for (i, w) in words.iter().enumerate() {
            assert_eq!(w.index(b), i);
        }
    }

    #[test]
    fn word_counts_are_powers() {
        for b in 2..=4usize {
            for n in 1..=6u32 {
                let mut seen = std::collections::HashSet::new();
                for i in 0..b.pow(n) {
                    seen.insert(Word::from_index(i, n as usize, b));
                }
                assert_eq!(seen.len(), b.pow(n));
            }
        }
    }

    proptest! {
        #[test]
        fn format_parse_roundtrip(b in 2usize..40, digits in proptest::collection::vec(0usize..40, 1..12)) {
            let p = Params::new(b, 2).unwrap();
            let digits: Vec<u8> = digits.into_iter().map(|d| (d % b) as u8).collect();
            let w = Word::new(digits, &p).unwrap();
            let back = parse_word(&w.to_string(), &p).unwrap();
            prop_assert_eq!(back, w);
        }
    }
}
