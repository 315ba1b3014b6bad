//! Criteria for rotor walks on the d-ary tree.
//!
//! A vertex of type `k` (it is entered `k` times from its parent before the
//! first `k` excursions end) has a child of type `U^(i)(k)` in direction `i`.
//! Under i.i.d. configurations the types form a multi-type Galton–Watson
//! process whose first-moment matrix decides survival. For balanced atoms
//! with `N = L/(d+1)` the types starting from `N` stay in `{0, …, N}`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::SupportDistribution;
use crate::error::{Error, Result};
use crate::sequence::RotorSequence;
use crate::spectral::{spectral_radius, RationalMatrix, SpectralRadius, Verdict};
use crate::utable::UTable;

/// Default enclosure width for certified spectral radii.
pub fn default_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u64.pow(12)))
}

/// `(U^(1)(x), …, U^(d)(x))` by direct scan.
pub fn u_vector(s: &RotorSequence, x: u64) -> Result<Vec<u64>> {
    (1..=s.degree()).map(|i| s.u_value(i, x)).collect()
}

/// Types of the `d` children of a type-`k` vertex carrying `s`.
pub fn child_types(s: &RotorSequence, k: u64) -> Result<Vec<u64>> {
    u_vector(s, k)
}

/// `(α+1)·N` for `k = αN + β`, `1 ≤ β ≤ N`: no type above it is reachable from `k`.
pub fn type_bound(dist: &SupportDistribution, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("type must be positive".into()));
    }
    let n = dist.balance_parameter()?;
    Ok(((k - 1) / n + 1) * n)
}

/// First-moment matrix `m(k, ℓ)` over types `1..=K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMatrix {
    matrix: RationalMatrix,
    truncated: bool,
}

impl MomentMatrix {
    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    /// `m(k, ℓ)` with 1-based types.
    pub fn entry(&self, k: usize, l: usize) -> &BigRational {
        self.matrix.get(k - 1, l - 1)
    }

    /// Whether offspring above `K` were dropped.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.matrix.to_string_rows()
    }

    pub fn spectral_radius(&self, tol: &BigRational) -> Result<SpectralRadius> {
        spectral_radius(&self.matrix, tol)
    }
}

fn tree_tables(dist: &SupportDistribution) -> Result<Vec<UTable>> {
    if dist.degree() < 2 {
        return Err(Error::WrongDegree { found: dist.degree(), context: "tree analysis needs d ≥ 2" });
    }
    dist.sequences().map(UTable::new).collect()
}

fn build_moment_matrix(dist: &SupportDistribution, size: usize, truncate: bool) -> Result<MomentMatrix> {
    if size == 0 {
        return Err(Error::InvalidArgument("moment matrix needs at least one type".into()));
    }
    let tables = tree_tables(dist)?;
    let mut matrix = RationalMatrix::zeros(size);
    let mut truncated = false;
    for (atom, (table, a)) in tables.iter().zip(dist.atoms()).enumerate() {
        for k in 1..=size as u64 {
            for j in 1..=dist.degree() {
                let l = table.eval(j, k);
                if l == 0 {
                    continue;
                }
                if l > size as u64 {
                    if truncate {
                        truncated = true;
                        continue;
                    }
                    return Err(Error::TypeEscape { atom, from: k, direction: j, value: l, bound: size });
                }
                *matrix.get_mut(k as usize - 1, l as usize - 1) += &a.weight;
            }
        }
    }
    Ok(MomentMatrix { matrix, truncated })
}

/// `m(k, ℓ) = Σ_i p_i · #{j : U^(j)_{a_i}(k) = ℓ}`; fails if a type above `K` is reachable.
pub fn moment_matrix(dist: &SupportDistribution, size: usize) -> Result<MomentMatrix> {
    build_moment_matrix(dist, size, false)
}

/// Same as [`moment_matrix`] but drops offspring of type above `K`.
pub fn truncated_moment_matrix(dist: &SupportDistribution, size: usize) -> Result<MomentMatrix> {
    build_moment_matrix(dist, size, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TreeVerdict {
    Recurrent,
    Transient,
    /// Transient according to a truncated type space only.
    ConjecturalTransient,
}

impl fmt::Display for TreeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeVerdict::Recurrent => "Recurrent",
            TreeVerdict::Transient => "Transient",
            TreeVerdict::ConjecturalTransient => "ConjecturalTransient",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralClassification {
    pub verdict: TreeVerdict,
    pub matrix: MomentMatrix,
    pub rho: SpectralRadius,
}

/// Transient iff `ρ(M) > 1` for the `N`-type moment matrix of balanced atoms.
pub fn classify_tree_balanced(dist: &SupportDistribution) -> Result<SpectralClassification> {
    classify_tree_balanced_with(dist, &default_tolerance())
}

pub fn classify_tree_balanced_with(dist: &SupportDistribution, tol: &BigRational) -> Result<SpectralClassification> {
    tree_tables(dist)?;
    let n = dist.balance_parameter()?;
    let matrix = moment_matrix(dist, n as usize)?;
    let rho = matrix.spectral_radius(tol)?;
    let verdict = match rho.verdict {
        Verdict::GreaterThanOne => TreeVerdict::Transient,
        Verdict::AtMostOne => TreeVerdict::Recurrent,
    };
    Ok(SpectralClassification { verdict, matrix, rho })
}

/// One standard piece `π^r(0^m 1^m 2^m)`, or its image under the child swap `1 ↔ 2` when `mirrored`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Piece {
    pub rotation: u8,
    pub multiplicity: u64,
    pub mirrored: bool,
}

impl Piece {
    pub fn new(rotation: u8, multiplicity: u64) -> Self {
        Piece { rotation, multiplicity, mirrored: false }
    }

    /// Symbol of block `q ∈ {0,1,2}`.
    fn block(&self, q: u64) -> u8 {
        let b = ((q + self.rotation as u64) % 3) as u8;
        if self.mirrored && b != 0 {
            3 - b
        } else {
            b
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        (0..3u64).flat_map(move |q| std::iter::repeat_n(self.block(q), self.multiplicity as usize))
    }
}

/// `pieces[..cycle_start]` once, then `pieces[cycle_start..]` forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceDecomposition {
    pub pieces: Vec<Piece>,
    pub cycle_start: usize,
}

impl PieceDecomposition {
    pub fn prefix(&self) -> &[Piece] {
        &self.pieces[..self.cycle_start]
    }

    pub fn cycle(&self) -> &[Piece] {
        &self.pieces[self.cycle_start..]
    }

    /// The first `len` symbols of the concatenation.
    pub fn expand(&self, len: usize) -> Vec<u8> {
        let tail = self.cycle().iter().cycle().flat_map(Piece::symbols);
        self.prefix().iter().flat_map(Piece::symbols).chain(tail).take(len).collect()
    }
}

/// Decomposition of a degree-2 sequence into standard pieces, if one exists.
///
/// Piece boundaries are positions of the word, identified modulo the period
/// after the preperiod. A block of a piece is a run of one symbol, which in a
/// non-degenerate sequence is shorter than the preperiod plus two periods,
/// so the boundary graph is finite and the word decomposes iff a cycle is
/// reachable from position 0.
pub fn decompose_standard_pieces(s: &RotorSequence) -> Result<Option<PieceDecomposition>> {
    decompose(s, false)
}

/// As [`decompose_standard_pieces`], also admitting mirrored pieces.
///
/// Swapping the labels of the two children is an automorphism of `T_2`, and
/// recurrence in the uniform rotation model is decided block by block, so
/// mirrored pieces behave exactly like standard ones.
pub fn decompose_symmetric_pieces(s: &RotorSequence) -> Result<Option<PieceDecomposition>> {
    decompose(s, true)
}

fn decompose(s: &RotorSequence, allow_mirror: bool) -> Result<Option<PieceDecomposition>> {
    if s.degree() != 2 {
        return Err(Error::WrongDegree { found: s.degree(), context: "standard pieces are defined for d = 2" });
    }
    if !s.is_nondegenerate() {
        return Err(Error::Degenerate(s.to_string()));
    }
    let pre = s.preperiod().len() as u64;
    let period = s.period_len() as u64;
    let states = (pre + period) as usize;
    let normalize = |p: u64| if p < pre { p } else { pre + (p - pre) % period };
    let max_m = pre + 2 * period;
    let edges = |p: u64| -> Vec<(Piece, u64)> {
        let mut out = Vec::new();
        let orientations: &[bool] = if allow_mirror { &[false, true] } else { &[false] };
        for &mirrored in orientations {
            for r in 0..3u8 {
                for m in 1..max_m {
                    let piece = Piece { rotation: r, multiplicity: m, mirrored };
                    let ok = (0..3u64).all(|q| (0..m).all(|t| s.symbol(p + q * m + t) == piece.block(q)));
                    if ok {
                        out.push((piece, normalize(p + 3 * m)));
                    } else if (0..m).any(|t| s.symbol(p + t) != piece.block(0)) {
                        break;
                    }
                }
            }
        }
        out
    };
    // iterative DFS with colours: 0 white, 1 on stack, 2 done
    let mut colour = vec![0u8; states];
    let mut path: Vec<(u64, Piece)> = Vec::new();
    // (state, outgoing edges, next edge index)
    type Frame = (u64, Vec<(Piece, u64)>, usize);
    let mut stack: Vec<Frame> = vec![(0, edges(0), 0)];
    colour[0] = 1;
    while let Some((node, out, idx)) = stack.last_mut() {
        if *idx >= out.len() {
            colour[*node as usize] = 2;
            stack.pop();
            path.pop();
            continue;
        }
        let (piece, next) = out[*idx];
        *idx += 1;
        let from = *node;
        match colour[next as usize] {
            1 => {
                path.push((from, piece));
                let cycle_start = path.iter().position(|&(n, _)| n == next).expect("on stack");
                return Ok(Some(PieceDecomposition {
                    pieces: path.into_iter().map(|(_, p)| p).collect(),
                    cycle_start,
                }));
            }
            0 => {
                colour[next as usize] = 1;
                path.push((from, piece));
                stack.push((next, edges(next), 0));
            }
            _ => {}
        }
    }
    Ok(None)
}

/// Mean of a single-type lower bound for the type-1 offspring under uniform
/// rotations on `T_d`: `(2d − 1)/(d + 1)`.
///
/// A type-1 particle has no live child with probability `1/(d+1)` (the
/// rotation starting with 0), and otherwise dominates a particle with one
/// live child with probability `1/(d+1)` and two with probability
/// `(d−1)/(d+1)`.
pub fn rotation_offspring_bound(d: u32) -> BigRational {
    BigRational::new(BigInt::from(2 * d as i64 - 1), BigInt::from(d as i64 + 1))
}

/// Exact mean number of live children of a type-1 vertex under uniform rotations of `s`.
pub fn rotation_live_children_mean(s: &RotorSequence) -> Result<BigRational> {
    let d = s.degree();
    let rot = SupportDistribution::uniform_rotation(s)?;
    let mut total = BigRational::zero();
    for atom in rot.atoms() {
        let live = child_types(&atom.sequence, 1)?.iter().filter(|&&t| t > 0).count();
        total += &atom.weight * BigRational::from_integer(BigInt::from(live));
    }
    // rotations of a sequence may coincide, so `rot` can have fewer atoms
    debug_assert!(rot.len() <= d as usize + 1);
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationClassification {
    pub verdict: TreeVerdict,
    pub decomposition: Option<PieceDecomposition>,
    pub offspring_bound: Option<BigRational>,
}

/// Uniform rotation model on `T_d`: on `T_2` recurrent iff the sequence is a
/// concatenation of standard or mirrored pieces; on `T_d`, `d ≥ 3`, always transient.
pub fn classify_uniform_rotation(s: &RotorSequence) -> Result<RotationClassification> {
    let d = s.degree();
    if d < 2 {
        return Err(Error::WrongDegree { found: d, context: "uniform rotation on trees needs d ≥ 2" });
    }
    if !s.is_nondegenerate() {
        return Err(Error::Degenerate(s.to_string()));
    }
    if d == 2 {
        let decomposition = decompose_symmetric_pieces(s)?;
        let verdict = if decomposition.is_some() { TreeVerdict::Recurrent } else { TreeVerdict::Transient };
        return Ok(RotationClassification { verdict, decomposition, offspring_bound: None });
    }
    let bound = rotation_offspring_bound(d);
    assert!(bound > BigRational::one(), "offspring bound must exceed 1 for d ≥ 3");
    Ok(RotationClassification { verdict: TreeVerdict::Transient, decomposition: None, offspring_bound: Some(bound) })
}

/// Some shift of the period splits into blocks `(0, σ)` with `σ` a permutation of `1..=d`.
pub fn is_in_conjectured_recurrent_set(s: &RotorSequence) -> Result<bool> {
    let d = s.degree() as usize;
    if d < 2 {
        return Err(Error::WrongDegree { found: s.degree(), context: "conjectured set is defined for d ≥ 2" });
    }
    if !s.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic(s.to_string()));
    }
    let period = s.period();
    let len = period.len();
    if !len.is_multiple_of(d + 1) {
        return Ok(false);
    }
    let block_ok = |start: usize| {
        (0..len / (d + 1)).all(|b| {
            let at = |t: usize| period[(start + b * (d + 1) + t) % len] as usize;
            if at(0) != 0 {
                return false;
            }
            let mut seen = vec![false; d + 1];
            (1..=d).all(|t| {
                let sym = at(t);
                sym != 0 && !std::mem::replace(&mut seen[sym], true)
            })
        })
    };
    Ok((0..len).any(block_ok))
}

/// All words of length `len` with each of `0..=d` occurring `len/(d+1)` times.
pub fn balanced_words(len: usize, d: u32) -> Result<Vec<Vec<u8>>> {
    let k = d as usize + 1;
    if len == 0 || !len.is_multiple_of(k) {
        return Err(Error::PeriodNotDivisible { period: len, modulus: d + 1 });
    }
    let mut out = Vec::new();
    let mut remaining = vec![len / k; k];
    let mut word = Vec::with_capacity(len);
    fn rec(word: &mut Vec<u8>, remaining: &mut [usize], len: usize, out: &mut Vec<Vec<u8>>) {
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        for sym in 0..remaining.len() {
            if remaining[sym] > 0 {
                remaining[sym] -= 1;
                word.push(sym as u8);
                rec(word, remaining, len, out);
                word.pop();
                remaining[sym] += 1;
            }
        }
    }
    rec(&mut word, &mut remaining, len, &mut out);
    Ok(out)
}

/// Lexicographically least rotation of a word.
pub fn least_rotation(word: &[u8]) -> Vec<u8> {
    (0..word.len().max(1))
        .map(|r| {
            let mut w = word.to_vec();
            w.rotate_left(r);
            w
        })
        .min()
        .unwrap_or_default()
}

/// Shift-equivalence classes of balanced words of length `len`, as representatives.
pub fn balanced_shift_classes(len: usize, d: u32) -> Result<Vec<Vec<u8>>> {
    let mut reps: HashSet<Vec<u8>> = HashSet::new();
    for w in balanced_words(len, d)? {
        reps.insert(least_rotation(&w));
    }
    let mut out: Vec<_> = reps.into_iter().collect();
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepClass {
    pub representative: String,
    pub verdict: TreeVerdict,
    pub in_conjectured_set: bool,
    pub agrees: bool,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub rho_verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub period: usize,
    pub degree: u32,
    pub classes: Vec<SweepClass>,
}

impl SweepReport {
    pub fn agreement(&self) -> usize {
        self.classes.iter().filter(|c| c.agrees).count()
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &SweepClass> {
        self.classes.iter().filter(|c| !c.agrees)
    }
}

/// Classifies every balanced shift class of period `len` on `T_d` under the
/// uniform shift model and compares with the conjectured recurrent set.
pub fn sweep_shift_conjecture(len: usize, d: u32) -> Result<SweepReport> {
    if d < 2 {
        return Err(Error::WrongDegree { found: d, context: "tree sweep needs d ≥ 2" });
    }
    let reps = balanced_shift_classes(len, d)?;
    let tol = default_tolerance();
    let classes = reps
        .par_iter()
        .map(|word| {
            let s = RotorSequence::periodic(d, word.clone())?;
            let dist = SupportDistribution::uniform_shift(&s)?;
            let class = classify_tree_balanced_with(&dist, &tol)?;
            let in_set = is_in_conjectured_recurrent_set(&s)?;
            let representative: String = word.iter().map(|&b| char::from(b'0' + b)).collect();
            Ok(SweepClass {
                representative: format!("({representative})"),
                verdict: class.verdict,
                in_conjectured_set: in_set,
                agrees: in_set == (class.verdict == TreeVerdict::Recurrent),
                rho_lo: class.rho.lo_f64(),
                rho_hi: class.rho.hi_f64(),
                rho_verdict: class.rho.verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { period: len, degree: d, classes })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationSweepEntry {
    pub sequence: String,
    pub piece_verdict: TreeVerdict,
    pub spectral_verdict: TreeVerdict,
    pub agrees: bool,
    pub rho_lo: f64,
    pub rho_hi: f64,
}

/// Piece criterion against the spectral verdict for every balanced word of
/// period `len` on `T_2`, in lexicographic order.
pub fn sweep_rotation_criterion(len: usize) -> Result<Vec<RotationSweepEntry>> {
    let tol = default_tolerance();
    balanced_words(len, 2)?
        .par_iter()
        .map(|word| {
            let s = RotorSequence::periodic(2, word.clone())?;
            let pieces = classify_uniform_rotation(&s)?.verdict;
            let spectral = classify_tree_balanced_with(&SupportDistribution::uniform_rotation(&s)?, &tol)?;
            let sequence: String = word.iter().map(|&b| char::from(b'0' + b)).collect();
            Ok(RotationSweepEntry {
                sequence: format!("({sequence})"),
                piece_verdict: pieces,
                spectral_verdict: spectral.verdict,
                agrees: pieces == spectral.verdict,
                rho_lo: spectral.rho.lo_f64(),
                rho_hi: spectral.rho.hi_f64(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftClassification {
    pub verdict: TreeVerdict,
    pub in_conjectured_set: bool,
    pub spectral: Option<SpectralClassification>,
}

/// Uniform shift model on `T_d`.
///
/// On `T_2` members of the conjectured set are recurrent and the rest get the
/// spectral verdict; on `T_d`, `d ≥ 3`, members are transient and other
/// balanced sequences get the spectral verdict. Unbalanced sequences on
/// `T_d`, `d ≥ 3`, are labelled [`TreeVerdict::ConjecturalTransient`] when the
/// `types`-truncated matrix has `ρ > 1`.
pub fn classify_uniform_shift(s: &RotorSequence, types: Option<usize>) -> Result<ShiftClassification> {
    let d = s.degree();
    if d < 2 {
        return Err(Error::WrongDegree { found: d, context: "tree shift model needs d ≥ 2" });
    }
    if !s.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic(s.to_string()));
    }
    let in_set = is_in_conjectured_recurrent_set(s)?;
    let dist = SupportDistribution::uniform_shift(s)?;
    if !s.is_balanced() {
        if d == 2 {
            return Err(Error::Unbalanced(s.to_string()));
        }
        let size = types.unwrap_or(4 * s.period_len());
        let matrix = truncated_moment_matrix(&dist, size)?;
        let rho = matrix.spectral_radius(&default_tolerance())?;
        if rho.verdict != Verdict::GreaterThanOne {
            return Err(Error::Undetermined(format!(
                "truncated spectral radius of {s} at {size} types does not exceed 1"
            )));
        }
        let verdict = TreeVerdict::ConjecturalTransient;
        return Ok(ShiftClassification {
            verdict,
            in_conjectured_set: false,
            spectral: Some(SpectralClassification { verdict, matrix, rho }),
        });
    }
    if in_set && d >= 3 {
        return Ok(ShiftClassification { verdict: TreeVerdict::Transient, in_conjectured_set: true, spectral: None });
    }
    let spectral = classify_tree_balanced(&dist)?;
    let verdict = if in_set { TreeVerdict::Recurrent } else { spectral.verdict };
    Ok(ShiftClassification { verdict, in_conjectured_set: in_set, spectral: Some(spectral) })
}

/// Extinction probabilities `q_1, …, q_K` of the type process started from one particle.
///
/// Iterates `q_k = Σ_i p_i Π_j q_{U^(j)_i(k)}` from `q = 0`, which increases
/// to the least fixed point.
pub fn extinction_probabilities(dist: &SupportDistribution, size: usize) -> Result<Vec<f64>> {
    let tables = tree_tables(dist)?;
    let weights: Vec<f64> = dist.atoms().iter().map(|a| crate::spectral::to_f64(&a.weight)).collect();
    moment_matrix(dist, size)?;
    let mut q = vec![0.0f64; size + 1];
    q[0] = 1.0;
    for _ in 0..1_000_000 {
        let mut next = q.clone();
        for k in 1..=size {
            next[k] = tables
                .iter()
                .zip(&weights)
                .map(|(t, w)| w * (1..=dist.degree()).map(|j| q[t.eval(j, k as u64) as usize]).product::<f64>())
                .sum();
        }
        let delta = next.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        q = next;
        if delta < 1e-15 {
            break;
        }
    }
    Ok(q[1..].to_vec())
}
