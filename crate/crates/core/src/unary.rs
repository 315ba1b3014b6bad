//! Criteria for rotor walks on the half-line ℕ.
//!
//! Vertex `0` is the origin; its symbol `0` is the self-loop that closes an
//! excursion. The Z-process `Z_0 = k`, `Z_{n+1} = U_{a_n}(Z_n)` counts the
//! crossings of the edge `(n, n+1)` during the first `k` excursions, and those
//! excursions are all finite exactly when it reaches zero.
//!
//! Survival of a Z-orbit is certified in one of four ways:
//!
//! * `Cycle`: an exact state `(vertex phase, Z)` repeats.
//! * `Drift`: all tail sequences gain `z` of each symbol per `z` zeros, so
//!   `U(x + M) = U(x) + M` beyond a threshold; a residue class revisited at a
//!   strictly larger value repeats upward forever.
//! * `Growth`: a single sequence with more `1`s than `0`s per period has
//!   `U(x) ≥ x` above an explicit threshold.
//! * `Support`: `Z ≥ k` for some `k` with `U(k) ≥ k` under every sequence that
//!   can occur further out; monotonicity keeps `Z ≥ k` forever.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::assignment::{Assignment, Sampler};
use crate::dist::SupportDistribution;
use crate::error::{Error, Result};
use crate::sequence::RotorSequence;
use crate::utable::UTable;

/// Values beyond this are not followed further.
const VALUE_CAP: u64 = 1 << 40;
/// Exact-state memory for cycle detection.
const STATE_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    Cycle,
    Drift,
    Growth,
    Support,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZOutcome {
    /// `values[step] == 0`.
    HitZero { step: usize },
    /// No decision within `horizon` steps.
    Survived { horizon: u64 },
    /// Never reaches zero.
    CycleCertified { certificate: Certificate },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZTrajectory {
    pub k: u64,
    pub values: Vec<u64>,
    pub outcome: ZOutcome,
}

impl ZTrajectory {
    pub fn hit_zero(&self) -> Option<usize> {
        match self.outcome {
            ZOutcome::HitZero { step } => Some(step),
            _ => None,
        }
    }

    pub fn is_certified_infinite(&self) -> bool {
        matches!(self.outcome, ZOutcome::CycleCertified { .. })
    }

    /// Total steps of the first `k` excursions, when they are all finite.
    pub fn total_steps(&self) -> Option<u128> {
        self.hit_zero().map(|_| orbit_steps(&self.values))
    }
}

/// `Σ (Z_n + Z_{n+1})` for an orbit ending in zero.
fn orbit_steps(values: &[u64]) -> u128 {
    let sum: u128 = values.iter().map(|&v| v as u128).sum();
    2 * sum - values[0] as u128
}

/// Per-vertex rotor offsets: explicit values near the origin, then a tail
/// indexed by `n mod tail.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeftoverConfig {
    explicit: Vec<u64>,
    tail: Vec<u64>,
}

impl Default for LeftoverConfig {
    fn default() -> Self {
        LeftoverConfig { explicit: Vec::new(), tail: vec![0] }
    }
}

impl LeftoverConfig {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(explicit: Vec<u64>, tail: Vec<u64>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::InvalidArgument("leftover tail must be nonempty".into()));
        }
        let mut out = LeftoverConfig { explicit, tail };
        out.normalize();
        Ok(out)
    }

    /// Offsets equal to a finite list of local times, zero beyond it.
    pub fn from_local_times(local_times: &[u64]) -> Self {
        let mut out = LeftoverConfig { explicit: local_times.to_vec(), tail: vec![0] };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        // shortest tail period
        let p = self.tail.len();
        if let Some(q) = (1..p).find(|q| p.is_multiple_of(*q) && (0..p).all(|r| self.tail[r] == self.tail[r % q])) {
            self.tail.truncate(q);
        }
        while let Some(&last) = self.explicit.last() {
            let n = self.explicit.len() - 1;
            if last != self.tail[n % self.tail.len()] {
                break;
            }
            self.explicit.pop();
        }
    }

    #[inline]
    pub fn offset(&self, n: u64) -> u64 {
        match self.explicit.get(n as usize) {
            Some(&v) => v,
            None => self.tail[(n % self.tail.len() as u64) as usize],
        }
    }

    pub fn explicit(&self) -> &[u64] {
        &self.explicit
    }

    pub fn tail(&self) -> &[u64] {
        &self.tail
    }

    pub fn is_identity(&self) -> bool {
        self.explicit.is_empty() && self.tail == [0]
    }

    /// Pointwise sum of two offset maps.
    pub fn add(&self, other: &LeftoverConfig) -> LeftoverConfig {
        let e = self.explicit.len().max(other.explicit.len());
        let p = self.tail.len().lcm(&other.tail.len());
        let explicit = (0..e as u64).map(|n| self.offset(n) + other.offset(n)).collect();
        let tail = (0..p as u64)
            .map(|r| {
                let n = e as u64 + (r + p as u64 - e as u64 % p as u64) % p as u64;
                self.offset(n) + other.offset(n)
            })
            .collect();
        let mut out = LeftoverConfig { explicit, tail };
        out.normalize();
        out
    }

    /// The sequence left at vertex `n` of `base`.
    pub fn sequence_at(&self, base: &Assignment, n: u64) -> RotorSequence {
        base.at_line(n).shift(self.offset(n))
    }
}

/// Survival-detection data for a deterministic periodic tail.
#[derive(Clone, Debug)]
struct TailInfo {
    drift_free: bool,
    modulus: u64,
    threshold: u64,
    growth: Option<u64>,
    kstar: Option<u64>,
}

#[derive(Clone, Debug)]
enum LineKind {
    Periodic { explicit: Vec<UTable>, tail: Vec<UTable>, info: TailInfo },
    Sampled { sampler: Sampler, tables: Vec<UTable>, kstar: Option<u64> },
}

/// U-tables of a half-line configuration, possibly after leftover offsets.
#[derive(Clone, Debug)]
pub(crate) struct Line {
    kind: LineKind,
}

/// Smallest `k ≤ limit` with `U(k) ≥ k` under every table.
fn common_kstar<'a>(tables: impl Iterator<Item = &'a UTable> + Clone, limit: u64) -> Option<u64> {
    (1..=limit).find(|&k| tables.clone().all(|t| t.eval(1, k) >= k))
}

/// Threshold above which `U(x) ≥ x` for a single sequence with `c > z`.
fn growth_threshold(t: &UTable) -> Option<u64> {
    let z = t.zeros_per_period();
    let c = t.counts_per_period()[0];
    if c <= z {
        return None;
    }
    let z_pre = t.preperiod_zeros();
    let pre_c = t.eval(1, z_pre + 1) - t.base_table()[0][0];
    let need = (1..=z)
        .map(|beta| {
            let deficit = (z_pre + beta) as i128 - (pre_c + t.base_table()[beta as usize - 1][0]) as i128;
            if deficit <= 0 {
                0
            } else {
                (deficit as u64).div_ceil(c - z)
            }
        })
        .max()
        .unwrap_or(0);
    Some(z_pre + need * z + 1)
}

fn kstar_limit<'a>(tables: impl Iterator<Item = &'a UTable>) -> u64 {
    let (mut threshold, mut modulus) = (1u64, 1u64);
    for t in tables {
        threshold = threshold.max(t.threshold());
        modulus = modulus.lcm(&t.zeros_per_period());
    }
    threshold + 4 * modulus + 64
}

impl Line {
    pub(crate) fn new(assignment: &Assignment, leftover: &LeftoverConfig) -> Result<Line> {
        if assignment.degree() != 1 {
            return Err(Error::WrongDegree { found: assignment.degree(), context: "half-line analysis needs d = 1" });
        }
        match assignment {
            Assignment::Sampled(sampler) => {
                if !leftover.is_identity() {
                    return Err(Error::Undetermined("sampled configuration with leftover offsets".into()));
                }
                let tables = sampler.dist().sequences().map(UTable::new).collect::<Result<Vec<_>>>()?;
                let kstar = common_kstar(tables.iter(), kstar_limit(tables.iter()));
                Ok(Line { kind: LineKind::Sampled { sampler: sampler.clone(), tables, kstar } })
            }
            _ => {
                let e = leftover.explicit().len() as u64;
                let p =
                    (assignment.vertex_period().expect("deterministic") as u64).lcm(&(leftover.tail().len() as u64));
                let table_at = |n: u64| UTable::new(&leftover.sequence_at(assignment, n));
                let explicit = (0..e).map(table_at).collect::<Result<Vec<_>>>()?;
                let tail = (0..p).map(|r| table_at(e + (r + p - e % p) % p)).collect::<Result<Vec<_>>>()?;
                let drift_free = tail.iter().all(UTable::is_drift_free);
                let modulus = tail.iter().fold(1u64, |m, t| m.lcm(&t.zeros_per_period()));
                let threshold = tail.iter().map(UTable::threshold).max().unwrap_or(1);
                let growth = if tail.len() == 1 { growth_threshold(&tail[0]) } else { None };
                let kstar = common_kstar(tail.iter(), kstar_limit(tail.iter()));
                let info = TailInfo { drift_free, modulus, threshold, growth, kstar };
                Ok(Line { kind: LineKind::Periodic { explicit, tail, info } })
            }
        }
    }

    /// Length of the explicit prefix and the tail period.
    fn shape(&self) -> Option<(u64, u64)> {
        match &self.kind {
            LineKind::Periodic { explicit, tail, .. } => Some((explicit.len() as u64, tail.len() as u64)),
            LineKind::Sampled { .. } => None,
        }
    }

    #[inline]
    fn table(&self, n: u64) -> &UTable {
        match &self.kind {
            LineKind::Periodic { explicit, tail, .. } => match explicit.get(n as usize) {
                Some(t) => t,
                None => &tail[(n % tail.len() as u64) as usize],
            },
            LineKind::Sampled { sampler, tables, .. } => {
                &tables[sampler.draw(crate::assignment::line_key(sampler.seed(), n))]
            }
        }
    }

    #[inline]
    pub(crate) fn step(&self, n: u64, x: u64) -> u64 {
        self.table(n).eval(1, x)
    }

    /// Follows the orbit of `value` from vertex `start` for at most `horizon` steps.
    ///
    /// Support certificates on sampled lines are only accepted from
    /// `certify_from` steps on.
    pub(crate) fn orbit(
        &self,
        start: u64,
        value: u64,
        horizon: u64,
        certify_from: u64,
        keep: bool,
    ) -> (Vec<u64>, ZOutcome) {
        let mut values = vec![value];
        let mut x = value;
        let mut seen: HashMap<(u64, u64), ()> = HashMap::new();
        let mut residues: HashMap<(u64, u64), (u64, u64)> = HashMap::new();
        let mut last_dip = None;
        for t in 0..=horizon {
            if x == 0 {
                return (values, ZOutcome::HitZero { step: t as usize });
            }
            let v = start + t;
            if let Some(certificate) = self.certify(v, x, t, certify_from, &mut seen, &mut residues, &mut last_dip) {
                return (values, ZOutcome::CycleCertified { certificate });
            }
            if t == horizon || x > VALUE_CAP {
                return (values, ZOutcome::Survived { horizon: t });
            }
            x = self.step(v, x);
            if keep {
                values.push(x);
            } else {
                values[0] = x;
            }
        }
        unreachable!("loop returns at t == horizon")
    }

    #[allow(clippy::too_many_arguments)]
    fn certify(
        &self,
        v: u64,
        x: u64,
        t: u64,
        certify_from: u64,
        seen: &mut HashMap<(u64, u64), ()>,
        residues: &mut HashMap<(u64, u64), (u64, u64)>,
        last_dip: &mut Option<u64>,
    ) -> Option<Certificate> {
        match &self.kind {
            LineKind::Sampled { kstar, .. } => {
                (t >= certify_from && kstar.is_some_and(|k| x >= k)).then_some(Certificate::Support)
            }
            LineKind::Periodic { explicit, tail, info } => {
                if v < explicit.len() as u64 {
                    return None;
                }
                let phase = v % tail.len() as u64;
                if seen.len() < STATE_CAP && seen.insert((phase, x), ()).is_some() {
                    return Some(Certificate::Cycle);
                }
                if info.drift_free {
                    if x < info.threshold {
                        *last_dip = Some(t);
                    } else {
                        let key = (phase, x % info.modulus);
                        if let Some(&(old_x, old_t)) = residues.get(&key) {
                            if old_x < x && last_dip.is_none_or(|d| d < old_t) {
                                return Some(Certificate::Drift);
                            }
                        }
                        residues.insert(key, (x, t));
                    }
                }
                if info.growth.is_some_and(|x0| x >= x0) {
                    return Some(Certificate::Growth);
                }
                if info.kstar.is_some_and(|k| x >= k) {
                    return Some(Certificate::Support);
                }
                None
            }
        }
    }

    /// `Some(true)` if the orbit of `value` from `start` is certified to survive.
    fn survives(&self, start: u64, value: u64, horizon: u64) -> Option<bool> {
        match self.orbit(start, value, horizon, 0, false).1 {
            ZOutcome::HitZero { .. } => Some(false),
            ZOutcome::CycleCertified { .. } => Some(true),
            ZOutcome::Survived { .. } => None,
        }
    }

    /// Smallest `j ≥ 1` whose orbit from `start` survives, given that `upper` survives.
    fn least_surviving(&self, start: u64, upper: u64, horizon: u64) -> Option<u64> {
        let (mut lo, mut hi) = (0u64, upper);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survives(start, mid, horizon)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Offsets consumed by an epoch whose first `completed` excursions are
    /// finite and whose next one escapes along `orbit` (the surviving Z-orbit
    /// of `completed + 1`).
    ///
    /// With `f_n` the least surviving value at vertex `n`, the walker enters
    /// `n ≥ 1` exactly `f_n` times, so `n` is left `f_n − 1` times downward
    /// and `f_{n+1}` times upward; the origin loops `completed` times.
    pub(crate) fn escape_offsets(&self, completed: u64, orbit: &[u64], horizon: u64) -> Option<LeftoverConfig> {
        let (e, p) = self.shape()?;
        let e1 = e.max(1);
        let last = e1 + p;
        let mut z = orbit.to_vec();
        while (z.len() as u64) <= last {
            let n = z.len() as u64 - 1;
            let next = self.step(n, *z.last().expect("nonempty"));
            z.push(next);
        }
        let mut f = vec![0u64; last as usize + 1];
        for n in 1..=last {
            f[n as usize] = self.least_surviving(n, z[n as usize], horizon)?;
        }
        let local = |n: u64| if n == 0 { completed + f[1] } else { f[n as usize] - 1 + f[n as usize + 1] };
        let explicit = (0..e1).map(local).collect();
        let tail = (0..p).map(|r| local(e1 + (r + p - e1 % p) % p)).collect();
        LeftoverConfig::new(explicit, tail).ok()
    }
}

fn require_unary(assignment: &Assignment) -> Result<()> {
    if assignment.degree() != 1 {
        return Err(Error::WrongDegree { found: assignment.degree(), context: "half-line analysis needs d = 1" });
    }
    Ok(())
}

/// The Z-process of the first `k` excursions.
pub fn z_trajectory(assignment: &Assignment, k: u64, horizon: u64) -> Result<ZTrajectory> {
    require_unary(assignment)?;
    if k == 0 || horizon == 0 {
        return Err(Error::InvalidArgument("k and horizon must be positive".into()));
    }
    let line = Line::new(assignment, &LeftoverConfig::identity())?;
    let (values, outcome) = line.orbit(0, k, horizon, 0, true);
    Ok(ZTrajectory { k, values, outcome })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KStar {
    Finite(u64),
    Infinite,
}

impl KStar {
    pub fn is_finite(self) -> bool {
        matches!(self, KStar::Finite(_))
    }

    pub fn value(self) -> Option<u64> {
        match self {
            KStar::Finite(k) => Some(k),
            KStar::Infinite => None,
        }
    }
}

impl fmt::Display for KStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KStar::Finite(k) => write!(f, "{k}"),
            KStar::Infinite => f.write_str("INFINITY"),
        }
    }
}

impl Serialize for KStar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KStar::Finite(k) => serializer.serialize_u64(*k),
            KStar::Infinite => serializer.serialize_str("INFINITY"),
        }
    }
}

fn unary_tables(dist: &SupportDistribution) -> Result<Vec<UTable>> {
    if dist.degree() != 1 {
        return Err(Error::WrongDegree { found: dist.degree(), context: "k* is defined for d = 1" });
    }
    dist.sequences().map(UTable::new).collect()
}

/// `min{k : U_i(k) ≥ k for every atom}` for balanced periodic atoms.
///
/// With `N = L/2`, `U(αN + β) − (αN + β) = U(β) − β`, so `k ≤ N` suffices.
pub fn k_star(dist: &SupportDistribution) -> Result<KStar> {
    let tables = unary_tables(dist)?;
    let n = dist.balance_parameter()?;
    Ok(common_kstar(tables.iter(), n).map_or(KStar::Infinite, KStar::Finite))
}

/// Scan for `k*` over `1..=limit` without the balance restriction.
pub fn k_star_up_to(dist: &SupportDistribution, limit: u64) -> Result<KStar> {
    let tables = unary_tables(dist)?;
    Ok(common_kstar(tables.iter(), limit).map_or(KStar::Infinite, KStar::Finite))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnaryVerdict {
    Recurrent,
    Transient,
}

/// Transient exactly when `k*` is finite.
pub fn classify_unary_balanced(dist: &SupportDistribution) -> Result<UnaryVerdict> {
    Ok(if k_star(dist)?.is_finite() { UnaryVerdict::Transient } else { UnaryVerdict::Recurrent })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShiftVerdict {
    Recurrent,
    TransientRight,
}

/// Uniform shift model: transient to the right iff `1` outnumbers `0` per period.
pub fn classify_shift_model_unary(s: &RotorSequence) -> Result<ShiftVerdict> {
    if s.degree() != 1 {
        return Err(Error::WrongDegree { found: s.degree(), context: "shift classification on ℕ needs d = 1" });
    }
    if !s.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic(s.to_string()));
    }
    if !s.is_nondegenerate() {
        return Err(Error::Degenerate(s.to_string()));
    }
    let counts = s.counts_per_period();
    Ok(if counts[1] > counts[0] { ShiftVerdict::TransientRight } else { ShiftVerdict::Recurrent })
}

/// Smallest 1-based start `j` whose partial sums (`1 ↦ +1`, `0 ↦ −1`) stay `≤ 0`.
///
/// This is the first position right after a maximum of the prefix sums.
pub fn find_nonpositive_shift(s: &RotorSequence) -> Result<u64> {
    if s.degree() != 1 {
        return Err(Error::WrongDegree { found: s.degree(), context: "cycle lemma needs d = 1" });
    }
    if !s.is_balanced() {
        return Err(Error::Unbalanced(s.to_string()));
    }
    let mut sum = 0i64;
    let mut best = (0i64, 0usize);
    for (t, &sym) in s.period().iter().enumerate().take(s.period_len() - 1) {
        sum += if sym == 1 { 1 } else { -1 };
        if sum > best.0 {
            best = (sum, t + 1);
        }
    }
    Ok(best.1 as u64 + 1)
}

/// Symbol swap `0 ↔ 1`, turning right excursions into left ones.
pub fn swap_symbols(s: &RotorSequence) -> Result<RotorSequence> {
    if s.degree() != 1 {
        return Err(Error::WrongDegree { found: s.degree(), context: "symbol swap needs d = 1" });
    }
    s.rotate(1)
}

/// `k*` for right and left excursions on ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoSidedKStar {
    pub right: KStar,
    pub left: KStar,
}

pub fn two_sided_k_star(dist: &SupportDistribution) -> Result<TwoSidedKStar> {
    let right = k_star(dist)?;
    let swapped = SupportDistribution::new(
        dist.atoms().iter().map(|a| Ok((swap_symbols(&a.sequence)?, a.weight.clone()))).collect::<Result<Vec<_>>>()?,
    )?;
    let left = k_star(&swapped)?;
    Ok(TwoSidedKStar { right, left })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExcursionOutcome {
    Finite {
        steps: u64,
    },
    Infinite {
        certificate: Certificate,
    },
    Undecided {
        budget: u64,
    },
    /// Undecided on a tree after the walker reached depth `level`.
    Escaped {
        level: u64,
        steps: u64,
    },
}

impl ExcursionOutcome {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExcursionOutcome::Infinite { .. })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExcursionOutcome::Finite { .. })
    }
}

/// Excursion outcomes together with the leftover after the last decided one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineExcursions {
    pub outcomes: Vec<ExcursionOutcome>,
    pub leftover: Option<LeftoverConfig>,
}

/// Successive excursions on ℕ, each run in the leftover of the previous ones.
///
/// Finite excursions are read off the Z-process of the current epoch (the
/// stretch since the last infinite excursion). A finite excursion longer
/// than `budget` steps is reported undecided. Certificates on sampled
/// configurations are accepted only once the orbit has passed
/// `escape_level`, and no leftover is available after an infinite excursion
/// there, so later excursions are undecided.
pub fn line_excursions(assignment: &Assignment, num: usize, budget: u64, escape_level: u64) -> Result<LineExcursions> {
    require_unary(assignment)?;
    let mut outcomes = Vec::with_capacity(num);
    let mut env = LeftoverConfig::identity();
    let mut completed = 0u64;
    let mut prev_steps = 0u128;
    let mut last_orbit: Vec<u64> = Vec::new();
    let mut determined = true;
    let horizon = budget.max(escape_level + 1);
    let mut line = Line::new(assignment, &env)?;
    for _ in 0..num {
        if !determined {
            outcomes.push(ExcursionOutcome::Undecided { budget });
            continue;
        }
        let (values, outcome) = line.orbit(0, completed + 1, horizon, escape_level, true);
        match outcome {
            ZOutcome::HitZero { .. } => {
                let total = orbit_steps(&values);
                let steps = total - prev_steps;
                if steps > budget as u128 {
                    outcomes.push(ExcursionOutcome::Undecided { budget });
                    determined = false;
                    continue;
                }
                outcomes.push(ExcursionOutcome::Finite { steps: steps as u64 });
                completed += 1;
                prev_steps = total;
                last_orbit = values;
            }
            ZOutcome::CycleCertified { certificate } => {
                outcomes.push(ExcursionOutcome::Infinite { certificate });
                match line.escape_offsets(completed, &values, horizon) {
                    Some(consumed) => {
                        env = env.add(&consumed);
                        line = Line::new(assignment, &env)?;
                        completed = 0;
                        prev_steps = 0;
                        last_orbit.clear();
                    }
                    None => determined = false,
                }
            }
            ZOutcome::Survived { .. } => {
                outcomes.push(ExcursionOutcome::Undecided { budget });
                determined = false;
            }
        }
    }
    let leftover =
        determined.then(|| env.add(&LeftoverConfig::from_local_times(&epoch_local_times(completed, &last_orbit))));
    Ok(LineExcursions { outcomes, leftover })
}

/// Local times of `completed` finite excursions with Z-orbit `orbit`.
fn epoch_local_times(completed: u64, orbit: &[u64]) -> Vec<u64> {
    if completed == 0 || orbit.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(orbit.len());
    out.push(completed + orbit.get(1).copied().unwrap_or(0));
    for n in 1..orbit.len() {
        out.push(orbit[n] + orbit.get(n + 1).copied().unwrap_or(0));
    }
    out
}

/// Common period of a balanced assignment on ℕ.
pub fn balanced_period(assignment: &Assignment) -> Result<u64> {
    require_unary(assignment)?;
    let mut period = 1u64;
    for s in assignment.support() {
        if !s.is_purely_periodic() {
            return Err(Error::NotPurelyPeriodic(s.to_string()));
        }
        if !s.is_balanced() {
            return Err(Error::Unbalanced(s.to_string()));
        }
        period = period.lcm(&(s.period_len() as u64));
    }
    Ok(period)
}

/// Outcomes of successive excursions for a balanced periodic assignment.
///
/// The number of certified infinite excursions is at most `L/2`.
pub fn count_infinite_excursions(
    assignment: &Assignment,
    max_excursions: usize,
    budget: u64,
    escape_level: u64,
) -> Result<Vec<ExcursionOutcome>> {
    balanced_period(assignment)?;
    Ok(line_excursions(assignment, max_excursions, budget, escape_level)?.outcomes)
}
