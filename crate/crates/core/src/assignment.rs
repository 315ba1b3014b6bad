//! Rotor configurations: which sequence sits at which vertex.
//!
//! Sampled configurations are keyed by vertex, so the sequence at a vertex
//! never depends on the order in which vertices are explored.
//!
//! * half-line vertex `n`: key = first 8 bytes (LE) of
//!   `SHA-256("rotor-line" ‖ seed_le ‖ n_le)`
//! * tree root: key = first 8 bytes of `SHA-256("rotor-tree" ‖ seed_le)`
//! * tree child `i` of a vertex with key `p`: first 8 bytes of
//!   `SHA-256(p_le ‖ i_le)` with `i` as a `u32`
//!
//! The atom is drawn by seeding `ChaCha8Rng` with the key and taking a
//! uniform integer below the common denominator of the weights.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::dist::SupportDistribution;
use crate::error::{Error, Result};
use crate::sequence::RotorSequence;

/// Assignment of a rotor sequence to every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assignment {
    /// The same sequence everywhere.
    Homogeneous(RotorSequence),
    /// `list[n mod len]` at vertex `n` of ℕ, or at depth `n` of a tree.
    Cyclic(Vec<RotorSequence>),
    /// I.i.d. draws from `dist`, derived from `seed`.
    Sampled(Sampler),
}

impl Assignment {
    pub fn cyclic(list: Vec<RotorSequence>) -> Result<Self> {
        let Some(first) = list.first() else {
            return Err(Error::InvalidArgument("empty sequence list".into()));
        };
        let degree = first.degree();
        if let Some(bad) = list.iter().find(|s| s.degree() != degree) {
            return Err(Error::DegreeMismatch { expected: degree, found: bad.degree() });
        }
        if let Some(bad) = list.iter().find(|s| !s.is_nondegenerate()) {
            return Err(Error::Degenerate(bad.to_string()));
        }
        Ok(Assignment::Cyclic(list))
    }

    pub fn homogeneous(seq: RotorSequence) -> Result<Self> {
        if !seq.is_nondegenerate() {
            return Err(Error::Degenerate(seq.to_string()));
        }
        Ok(Assignment::Homogeneous(seq))
    }

    pub fn sampled(dist: SupportDistribution, seed: u64) -> Self {
        Assignment::Sampled(Sampler::new(dist, seed))
    }

    pub fn degree(&self) -> u32 {
        match self {
            Assignment::Homogeneous(s) => s.degree(),
            Assignment::Cyclic(list) => list[0].degree(),
            Assignment::Sampled(sampler) => sampler.dist.degree(),
        }
    }

    /// Every sequence that can occur.
    pub fn support(&self) -> Vec<&RotorSequence> {
        match self {
            Assignment::Homogeneous(s) => vec![s],
            Assignment::Cyclic(list) => list.iter().collect(),
            Assignment::Sampled(sampler) => sampler.dist.sequences().collect(),
        }
    }

    /// Period of the vertex-to-sequence map, if it is deterministic.
    pub fn vertex_period(&self) -> Option<usize> {
        match self {
            Assignment::Homogeneous(_) => Some(1),
            Assignment::Cyclic(list) => Some(list.len()),
            Assignment::Sampled(_) => None,
        }
    }

    /// Index into [`Assignment::support`] of the sequence at half-line vertex `n`.
    pub fn line_index(&self, n: u64) -> usize {
        match self {
            Assignment::Homogeneous(_) => 0,
            Assignment::Cyclic(list) => (n % list.len() as u64) as usize,
            Assignment::Sampled(sampler) => sampler.draw(line_key(sampler.seed, n)),
        }
    }

    /// Sequence at half-line vertex `n`.
    pub fn at_line(&self, n: u64) -> &RotorSequence {
        match self {
            Assignment::Homogeneous(s) => s,
            Assignment::Cyclic(list) => &list[(n % list.len() as u64) as usize],
            Assignment::Sampled(sampler) => sampler.sequence(line_key(sampler.seed, n)),
        }
    }

    /// Key of the tree root.
    pub fn root_key(&self) -> u64 {
        match self {
            Assignment::Sampled(sampler) => tree_root_key(sampler.seed),
            _ => tree_root_key(0),
        }
    }

    /// Index into [`Assignment::support`] of the sequence at a tree vertex.
    pub fn tree_index(&self, depth: usize, key: u64) -> usize {
        match self {
            Assignment::Homogeneous(_) => 0,
            Assignment::Cyclic(list) => depth % list.len(),
            Assignment::Sampled(sampler) => sampler.draw(key),
        }
    }

    /// Sequence at a tree vertex with the given depth and key.
    pub fn at_tree(&self, depth: usize, key: u64) -> &RotorSequence {
        match self {
            Assignment::Homogeneous(s) => s,
            Assignment::Cyclic(list) => &list[depth % list.len()],
            Assignment::Sampled(sampler) => sampler.sequence(key),
        }
    }
}

/// Lazy i.i.d. sampler over a support distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sampler {
    dist: SupportDistribution,
    seed: u64,
    cumulative: Cumulative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Cumulative {
    Exact { denominator: u64, bounds: Vec<u64> },
    Float(Vec<u64>),
}

impl Sampler {
    pub fn new(dist: SupportDistribution, seed: u64) -> Self {
        let lcm = dist.atoms().iter().fold(BigInt::one(), |acc, a| acc.lcm(a.weight.denom()));
        let exact = lcm.to_u64().and_then(|denominator| {
            let mut acc = 0u64;
            let bounds = dist
                .atoms()
                .iter()
                .map(|a| {
                    let numer = (a.weight.numer() * (&lcm / a.weight.denom())).to_u64()?;
                    acc = acc.checked_add(numer)?;
                    Some(acc)
                })
                .collect::<Option<Vec<_>>>()?;
            Some(Cumulative::Exact { denominator, bounds })
        });
        let cumulative = exact.unwrap_or_else(|| {
            // weights too fine for u64: fall back to 2^64-scaled cut points
            let mut acc = 0.0f64;
            let cuts = dist
                .atoms()
                .iter()
                .map(|a| {
                    acc += a.weight.to_f64().unwrap_or(0.0);
                    (acc.min(1.0) * u64::MAX as f64) as u64
                })
                .collect();
            Cumulative::Float(cuts)
        });
        Sampler { dist, seed, cumulative }
    }

    pub fn dist(&self) -> &SupportDistribution {
        &self.dist
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Atom index for a vertex key.
    pub fn draw(&self, key: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let (u, bounds) = match &self.cumulative {
            Cumulative::Exact { denominator, bounds } => (rng.random_range(0..*denominator), bounds),
            Cumulative::Float(cuts) => (rng.random::<u64>(), cuts),
        };
        bounds.iter().position(|&b| u < b).unwrap_or(bounds.len() - 1)
    }

    pub fn sequence(&self, key: u64) -> &RotorSequence {
        &self.dist.atoms()[self.draw(key)].sequence
    }
}

fn digest_key(parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p);
    }
    let out = hasher.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// Key of half-line vertex `n`.
pub fn line_key(seed: u64, n: u64) -> u64 {
    digest_key(&[b"rotor-line", &seed.to_le_bytes(), &n.to_le_bytes()])
}

/// Key of the tree root.
pub fn tree_root_key(seed: u64) -> u64 {
    digest_key(&[b"rotor-tree", &seed.to_le_bytes()])
}

/// Key of child `i` (1-based) of the vertex with key `parent`.
pub fn tree_child_key(parent: u64, i: u32) -> u64 {
    digest_key(&[&parent.to_le_bytes(), &i.to_le_bytes()])
}

/// Lazy i.i.d. configuration for `dist` under `seed`.
pub fn sample_config(dist: &SupportDistribution, seed: u64) -> Assignment {
    Assignment::sampled(dist.clone(), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_is_stable() {
        let base = RotorSequence::parse("(012)", 2).unwrap();
        let dist = SupportDistribution::uniform_rotation(&base).unwrap();
        let a = sample_config(&dist, 7);
        let root = a.at_tree(0, a.root_key()).clone();
        assert!(dist.sequences().any(|s| *s == root));
        for _ in 0..5 {
            assert_eq!(*a.at_tree(0, a.root_key()), root);
        }
        assert_eq!(a.at_line(3), a.at_line(3));
    }

    #[test]
    fn point_mass_everywhere() {
        let s = RotorSequence::parse("(+-)", 1).unwrap();
        let a = sample_config(&SupportDistribution::point_mass(s.clone()).unwrap(), 99);
        assert!((0..50).all(|n| *a.at_line(n) == s));
    }

    #[test]
    fn cyclic_indexing() {
        let list = vec![RotorSequence::parse("(-+)", 1).unwrap(), RotorSequence::parse("(+-)", 1).unwrap()];
        let a = Assignment::cyclic(list.clone()).unwrap();
        assert_eq!(*a.at_line(4), list[0]);
        assert_eq!(*a.at_line(5), list[1]);
        assert_eq!(*a.at_tree(3, 0), list[1]);
        assert_eq!(a.vertex_period(), Some(2));
    }

    #[test]
    fn keys_differ_by_child() {
        let r = tree_root_key(1);
        assert_ne!(tree_child_key(r, 1), tree_child_key(r, 2));
        assert_ne!(line_key(1, 0), line_key(2, 0));
    }
}
