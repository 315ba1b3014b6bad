//! Eventually periodic rotor sequences.
//!
//! A rotor sequence on a vertex of the d-ary tree is an infinite word over
//! `{0, …, d}`: symbol `0` points to the parent (a self-loop at the root) and
//! symbol `i ≥ 1` to the i-th child. Only eventually periodic words are
//! representable; they are stored as a `(preperiod, period)` pair in canonical
//! form, so two values are equal exactly when they describe the same word.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest degree accepted by the one-digit text notation.
pub const MAX_TEXT_DEGREE: u32 = 9;

/// An eventually periodic map `ℕ → {0, …, d}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RotorSequence {
    degree: u32,
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl RotorSequence {
    /// Builds and canonicalizes a sequence.
    pub fn new(degree: u32, preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if degree == 0 || degree > u8::MAX as u32 - 1 {
            return Err(Error::WrongDegree { found: degree, context: "degree must lie in 1..=254" });
        }
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if let Some(&symbol) = preperiod.iter().chain(period.iter()).find(|&&s| s as u32 > degree) {
            return Err(Error::SymbolOutOfRange { symbol: symbol as u32, degree });
        }
        let mut seq = RotorSequence { degree, preperiod, period };
        seq.canonicalize();
        Ok(seq)
    }

    /// A purely periodic sequence `⟨period⟩`.
    pub fn periodic(degree: u32, period: Vec<u8>) -> Result<Self> {
        Self::new(degree, Vec::new(), period)
    }

    /// Parses `PRE? '(' PERIOD ')'` over the digits `0..=degree`.
    ///
    /// For `degree == 1` the aliases `-` (for 0) and `+` (for 1) are accepted.
    pub fn parse(text: &str, degree: u32) -> Result<Self> {
        let malformed = |reason: &str| Error::Malformed { text: text.to_string(), reason: reason.to_string() };
        if degree == 0 || degree > MAX_TEXT_DEGREE {
            return Err(Error::WrongDegree { found: degree, context: "text notation supports degrees 1..=9" });
        }
        let trimmed = text.trim();
        let open = trimmed.find('(').ok_or_else(|| malformed("missing `(`"))?;
        if !trimmed.ends_with(')') {
            return Err(malformed("missing closing `)`"));
        }
        let pre_text = &trimmed[..open];
        let period_text = &trimmed[open + 1..trimmed.len() - 1];
        if period_text.contains(['(', ')']) || pre_text.contains(')') {
            return Err(malformed("unbalanced parentheses"));
        }
        let symbols = |part: &str| -> Result<Vec<u8>> {
            part.chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| {
                    let value = match c {
                        '+' if degree == 1 => 1,
                        '-' if degree == 1 => 0,
                        _ => c.to_digit(10).ok_or_else(|| malformed(&format!("unexpected character `{c}`")))?,
                    };
                    if value > degree {
                        return Err(Error::SymbolOutOfRange { symbol: value, degree });
                    }
                    Ok(value as u8)
                })
                .collect()
        };
        let preperiod = symbols(pre_text)?;
        let period = symbols(period_text)?;
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Self::new(degree, preperiod, period)
    }

    fn canonicalize(&mut self) {
        let len = self.period.len();
        if let Some(p) =
            (1..=len).find(|&p| len.is_multiple_of(p) && (p..len).all(|i| self.period[i] == self.period[i - p]))
        {
            self.period.truncate(p);
        }
        while let (Some(&last_pre), Some(&last_period)) = (self.preperiod.last(), self.period.last()) {
            if last_pre != last_period {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    /// The `t`-th rotor, counting from 0.
    #[inline]
    pub fn symbol(&self, t: u64) -> u8 {
        let pre = self.preperiod.len() as u64;
        if t < pre {
            self.preperiod[t as usize]
        } else {
            self.period[((t - pre) % self.period.len() as u64) as usize]
        }
    }

    /// Iterates over the infinite word.
    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        self.preperiod.iter().copied().chain(self.period.iter().copied().cycle())
    }

    /// Pointwise application of the rotation `n ↦ n + i mod (d+1)`.
    pub fn rotate(&self, i: u32) -> Result<Self> {
        if i > self.degree {
            return Err(Error::DirectionOutOfRange { index: i as u64, degree: self.degree });
        }
        let modulus = self.degree + 1;
        let map = |s: &u8| ((*s as u32 + i) % modulus) as u8;
        Self::new(self.degree, self.preperiod.iter().map(map).collect(), self.period.iter().map(map).collect())
    }

    /// Drops the first `i` rotors.
    pub fn shift(&self, i: u64) -> Self {
        let pre = self.preperiod.len() as u64;
        if i <= pre {
            let mut out = self.clone();
            out.preperiod.drain(..i as usize);
            return out;
        }
        let j = ((i - pre) % self.period.len() as u64) as usize;
        let mut period = self.period.clone();
        period.rotate_left(j);
        RotorSequence { degree: self.degree, preperiod: Vec::new(), period }
    }

    /// Occurrences of each symbol `0..=d` in one period.
    pub fn counts_per_period(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.degree as usize + 1];
        for &s in &self.period {
            counts[s as usize] += 1;
        }
        counts
    }

    /// Every direction occurs infinitely often.
    pub fn is_nondegenerate(&self) -> bool {
        self.counts_per_period().iter().all(|&c| c > 0)
    }

    /// Purely periodic with every symbol occurring `L/(d+1)` times per period.
    pub fn is_balanced(&self) -> bool {
        self.balance_parameter().is_some()
    }

    /// `N = L/(d+1)` for balanced sequences.
    pub fn balance_parameter(&self) -> Option<u64> {
        if !self.is_purely_periodic() {
            return None;
        }
        let counts = self.counts_per_period();
        let first = counts[0];
        (first > 0 && counts.iter().all(|&c| c == first)).then_some(first)
    }

    /// Number of `i`'s strictly before the `x`-th `0`, by scanning the word.
    pub fn u_value(&self, i: u32, x: u64) -> Result<u64> {
        if i == 0 || i > self.degree {
            return Err(Error::DirectionOutOfRange { index: i as u64, degree: self.degree });
        }
        if x == 0 {
            return Ok(0);
        }
        if !self.period.contains(&0) {
            return Err(Error::Degenerate(self.to_string()));
        }
        let mut zeros = 0u64;
        let mut count = 0u64;
        for s in self.symbols() {
            if s == 0 {
                zeros += 1;
                if zeros == x {
                    return Ok(count);
                }
            } else if s as u32 == i {
                count += 1;
            }
        }
        unreachable!("the period contains a zero")
    }

    /// Text form with `+`/`-` for degree one when `unary_signs` is set.
    pub fn format(&self, unary_signs: bool) -> String {
        let render = |s: u8| -> char {
            if unary_signs && self.degree == 1 {
                if s == 0 {
                    '-'
                } else {
                    '+'
                }
            } else if s < 10 {
                char::from(b'0' + s)
            } else {
                '?'
            }
        };
        let mut out: String = self.preperiod.iter().map(|&s| render(s)).collect();
        out.push('(');
        out.extend(self.period.iter().map(|&s| render(s)));
        out.push(')');
        out
    }
}

impl fmt::Display for RotorSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree <= MAX_TEXT_DEGREE {
            f.write_str(&self.format(false))
        } else {
            let join = |v: &[u8]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
            write!(f, "{}({})", join(&self.preperiod), join(&self.period))
        }
    }
}

impl Serialize for RotorSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
