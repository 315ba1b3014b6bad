//! Finitely supported distributions of rotor sequences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sequence::RotorSequence;

/// One support point with its exact probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub sequence: RotorSequence,
    pub weight: BigRational,
}

/// A probability vector over non-degenerate rotor sequences of one degree.
///
/// Duplicate sequences are merged (weights added) in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportDistribution {
    degree: u32,
    atoms: Vec<Atom>,
}

impl SupportDistribution {
    pub fn new(items: Vec<(RotorSequence, BigRational)>) -> Result<Self> {
        let Some(degree) = items.first().map(|(s, _)| s.degree()) else {
            return Err(Error::InvalidDistribution("empty support".into()));
        };
        let mut atoms: Vec<Atom> = Vec::with_capacity(items.len());
        let mut total = BigRational::zero();
        for (sequence, weight) in items {
            if sequence.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: sequence.degree() });
            }
            if !weight.is_positive() {
                return Err(Error::InvalidDistribution(format!("weight {weight} of {sequence} is not positive")));
            }
            if !sequence.is_nondegenerate() {
                return Err(Error::Degenerate(sequence.to_string()));
            }
            total += &weight;
            match atoms.iter_mut().find(|a| a.sequence == sequence) {
                Some(existing) => existing.weight += weight,
                None => atoms.push(Atom { sequence, weight }),
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        Ok(SupportDistribution { degree, atoms })
    }

    /// Equal weight on each listed sequence.
    pub fn uniform(sequences: Vec<RotorSequence>) -> Result<Self> {
        let n = sequences.len();
        if n == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(n));
        Self::new(sequences.into_iter().map(|s| (s, w.clone())).collect())
    }

    /// The uniform rotation model: `a, πa, …, π^d a` at weight `1/(d+1)`.
    pub fn uniform_rotation(s: &RotorSequence) -> Result<Self> {
        let rotations = (0..=s.degree()).map(|i| s.rotate(i)).collect::<Result<Vec<_>>>()?;
        Self::uniform(rotations)
    }

    /// The uniform shift model: all `L` shifts of a purely periodic sequence at weight `1/L`.
    pub fn uniform_shift(s: &RotorSequence) -> Result<Self> {
        if !s.is_purely_periodic() {
            return Err(Error::NotPurelyPeriodic(s.to_string()));
        }
        let shifts = (0..s.period_len() as u64).map(|i| s.shift(i)).collect();
        Self::uniform(shifts)
    }

    /// A single sequence with probability one.
    pub fn point_mass(s: RotorSequence) -> Result<Self> {
        Self::new(vec![(s, BigRational::one())])
    }

    /// Parses `ITEM (';' ITEM)*` with `ITEM := SEQ '=' RATIONAL`.
    pub fn parse(text: &str, degree: u32) -> Result<Self> {
        let items = text
            .split(';')
            .filter(|item| !item.trim().is_empty())
            .map(|item| {
                let (seq, weight) = item
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidDistribution(format!("item `{}` lacks `=WEIGHT`", item.trim())))?;
                Ok((RotorSequence::parse(seq, degree)?, parse_rational(weight)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn sequences(&self) -> impl Iterator<Item = &RotorSequence> {
        self.atoms.iter().map(|a| &a.sequence)
    }

    /// Least common multiple of the periods, if every atom is purely periodic.
    pub fn common_period(&self) -> Option<usize> {
        self.atoms
            .iter()
            .map(|a| a.sequence.is_purely_periodic().then_some(a.sequence.period_len()))
            .try_fold(1usize, |acc, p| p.map(|p| acc.lcm(&p)))
    }

    /// `N = L/(d+1)` for the common period `L`, if every atom is balanced.
    pub fn balance_parameter(&self) -> Result<u64> {
        for a in &self.atoms {
            if !a.sequence.is_purely_periodic() {
                return Err(Error::NotPurelyPeriodic(a.sequence.to_string()));
            }
            if !a.sequence.is_balanced() {
                return Err(Error::Unbalanced(a.sequence.to_string()));
            }
        }
        let period = self.common_period().expect("purely periodic atoms");
        Ok(period as u64 / (self.degree as u64 + 1))
    }

    /// Canonical text in the distribution grammar.
    pub fn format(&self, unary_signs: bool) -> String {
        self.atoms
            .iter()
            .map(|a| format!("{}={}", a.sequence.format(unary_signs), a.weight))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for SupportDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(false))
    }
}

impl Serialize for SupportDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Parses `p/q`, an integer, or a decimal such as `0.25` or `1e-9` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::InvalidArgument(format!("`{t}` is not a rational number"));
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" { return Err(bad()) } else { digits };
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Shorthand for small exact rationals.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(t: &str, d: u32) -> RotorSequence {
        RotorSequence::parse(t, d).unwrap()
    }

    #[test]
    fn parse_distribution() {
        let dist = SupportDistribution::parse("(-+)=1/2;(+-)=1/2", 1).unwrap();
        assert_eq!(dist.len(), 2);
        assert_eq!(dist.atoms()[0].sequence, seq("(01)", 1));
        assert_eq!(dist.format(true), "(-+)=1/2;(+-)=1/2");
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(matches!(SupportDistribution::parse("(-+)=1/2;(+-)=1/3", 1), Err(Error::InvalidDistribution(_))));
        assert!(matches!(SupportDistribution::parse("(-+)=0;(+-)=1", 1), Err(Error::InvalidDistribution(_))));
        assert!(matches!(SupportDistribution::parse("(01)=1", 2), Err(Error::Degenerate(_))));
        assert!(matches!(SupportDistribution::parse("(-+)", 1), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn duplicates_merge() {
        let dist = SupportDistribution::parse("(+-)=1/4;(10)=1/4;(-+)=1/2", 1).unwrap();
        assert_eq!(dist.len(), 2);
        assert_eq!(dist.atoms()[0].weight, ratio(1, 2));
    }

    #[test]
    fn model_expansions() {
        let rot = SupportDistribution::uniform_rotation(&seq("(010122)", 2)).unwrap();
        let expected = ["(010122)", "(121200)", "(202011)"];
        for (atom, text) in rot.atoms().iter().zip(expected) {
            assert_eq!(atom.sequence, seq(text, 2));
            assert_eq!(atom.weight, ratio(1, 3));
        }
        let shift = SupportDistribution::uniform_shift(&seq("(010122)", 2)).unwrap();
        assert_eq!(shift.len(), 6);
        assert_eq!(shift.balance_parameter().unwrap(), 2);
        assert!(SupportDistribution::uniform_shift(&seq("1(012)", 2)).is_err());
    }

    #[test]
    fn common_period_and_balance() {
        let dist = SupportDistribution::parse("(+-)=1/2;(++--)=1/2", 1).unwrap();
        assert_eq!(dist.common_period(), Some(4));
        assert_eq!(dist.balance_parameter().unwrap(), 2);
        let unbalanced = SupportDistribution::parse("(++-)=1", 1).unwrap();
        assert!(matches!(unbalanced.balance_parameter(), Err(Error::Unbalanced(_))));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("2/6").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
