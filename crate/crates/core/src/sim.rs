//! Explicit rotor-walk simulation, tree Z-process expansion and Monte Carlo.
//!
//! The walker at `v` reads rotor number `local_time(v)` (counting from 0) of
//! the sequence at `v`, increments the local time and moves. Reading `0` at
//! the origin traverses the self-loop and closes the current excursion.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::assignment::{tree_child_key, Assignment};
use crate::dist::SupportDistribution;
use crate::error::{Error, Result};
use crate::unary::{ExcursionOutcome, LeftoverConfig, Line, ZOutcome};
use crate::utable::UTable;

pub use crate::assignment::sample_config;

/// Default step budget per excursion.
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;
/// Default node budget per Z-expansion.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000;

/// State of a walk on ℕ.
///
/// Local times are counted from the start of the current epoch, the stretch
/// after the last infinite excursion; `base_offsets` holds everything the
/// earlier epochs consumed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkRecord {
    pub position: u64,
    pub local_times: Vec<u64>,
    pub base_offsets: LeftoverConfig,
    pub excursion_log: Vec<ExcursionOutcome>,
    pub step_count: u64,
    pub origin_loop_count: u64,
    /// False once an excursion stayed undecided; local times are then unknown.
    pub determined: bool,
}

impl WalkRecord {
    fn new() -> Self {
        WalkRecord {
            position: 0,
            local_times: vec![0],
            base_offsets: LeftoverConfig::identity(),
            excursion_log: Vec::new(),
            step_count: 0,
            origin_loop_count: 0,
            determined: true,
        }
    }

    /// Rotors consumed at `n` since the walk began.
    pub fn local_time(&self, n: u64) -> u64 {
        self.base_offsets.offset(n) + self.local_times.get(n as usize).copied().unwrap_or(0)
    }
}

/// Offsets left by the walks summarised in `record`.
pub fn leftover_config(base: &Assignment, record: &WalkRecord) -> Result<LeftoverConfig> {
    if base.degree() != 1 {
        return Err(Error::WrongDegree { found: base.degree(), context: "leftover environments live on ℕ" });
    }
    if !record.determined || record.position != 0 {
        return Err(Error::Undetermined("walk record contains an undecided excursion".into()));
    }
    Ok(record.base_offsets.add(&LeftoverConfig::from_local_times(&record.local_times)))
}

/// Rotor walk on ℕ.
pub struct LineWalk<'a> {
    assignment: &'a Assignment,
    record: WalkRecord,
    atoms: Vec<u32>,
    completed_in_epoch: u64,
}

impl<'a> LineWalk<'a> {
    pub fn new(assignment: &'a Assignment) -> Result<Self> {
        if assignment.degree() != 1 {
            return Err(Error::WrongDegree { found: assignment.degree(), context: "line walk needs d = 1" });
        }
        Ok(LineWalk { assignment, record: WalkRecord::new(), atoms: Vec::new(), completed_in_epoch: 0 })
    }

    /// Walk in a leftover environment of a deterministic assignment.
    pub fn with_offsets(assignment: &'a Assignment, offsets: LeftoverConfig) -> Result<Self> {
        if matches!(assignment, Assignment::Sampled(_)) && !offsets.is_identity() {
            return Err(Error::Undetermined("sampled configuration with leftover offsets".into()));
        }
        let mut walk = Self::new(assignment)?;
        walk.record.base_offsets = offsets;
        Ok(walk)
    }

    pub fn record(&self) -> &WalkRecord {
        &self.record
    }

    pub fn into_record(self) -> WalkRecord {
        self.record
    }

    fn symbol_at(&mut self, n: u64) -> u8 {
        let support = self.assignment.support();
        let idx = match self.assignment {
            Assignment::Sampled(_) => {
                while self.atoms.len() as u64 <= n {
                    let next = self.atoms.len() as u64;
                    self.atoms.push(self.assignment.line_index(next) as u32);
                }
                self.atoms[n as usize] as usize
            }
            _ => self.assignment.line_index(n),
        };
        let t = self.record.base_offsets.offset(n) + self.record.local_times[n as usize];
        support[idx].symbol(t)
    }

    /// One step; returns true if it traversed the origin's self-loop.
    pub fn step(&mut self) -> bool {
        let n = self.record.position;
        let sym = self.symbol_at(n);
        self.record.local_times[n as usize] += 1;
        self.record.step_count += 1;
        match (sym, n) {
            (0, 0) => {
                self.record.origin_loop_count += 1;
                true
            }
            (0, _) => {
                self.record.position = n - 1;
                false
            }
            _ => {
                self.record.position = n + 1;
                if self.record.local_times.len() as u64 <= n + 1 {
                    self.record.local_times.push(0);
                }
                false
            }
        }
    }

    /// Runs one excursion from the origin.
    pub fn run_excursion(&mut self, budget: u64, escape_level: u64) -> Result<ExcursionOutcome> {
        if !self.record.determined {
            let out = ExcursionOutcome::Undecided { budget };
            self.record.excursion_log.push(out);
            return Ok(out);
        }
        let mut steps = 0u64;
        let mut checked = false;
        let outcome = loop {
            if steps >= budget {
                self.record.determined = false;
                break ExcursionOutcome::Undecided { budget };
            }
            if self.step() {
                self.completed_in_epoch += 1;
                break ExcursionOutcome::Finite { steps: steps + 1 };
            }
            steps += 1;
            if !checked && self.record.position >= escape_level {
                checked = true;
                if let Some(out) = self.certify_escape(budget, escape_level)? {
                    break out;
                }
            }
        };
        self.record.excursion_log.push(outcome);
        Ok(outcome)
    }

    /// Survival check of the current excursion through the Z-process of the epoch.
    fn certify_escape(&mut self, budget: u64, escape_level: u64) -> Result<Option<ExcursionOutcome>> {
        let line = Line::new(self.assignment, &self.record.base_offsets)?;
        let horizon = budget.max(escape_level + 1);
        let (values, outcome) = line.orbit(0, self.completed_in_epoch + 1, horizon, escape_level, true);
        let ZOutcome::CycleCertified { certificate } = outcome else {
            return Ok(None);
        };
        match line.escape_offsets(self.completed_in_epoch, &values, horizon) {
            Some(consumed) => {
                self.record.base_offsets = self.record.base_offsets.add(&consumed);
                self.record.local_times = vec![0];
                self.record.position = 0;
                self.completed_in_epoch = 0;
            }
            None => self.record.determined = false,
        }
        Ok(Some(ExcursionOutcome::Infinite { certificate }))
    }
}

/// Arena vertex of a simulated tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub parent: Option<u32>,
    pub depth: u32,
    pub key: u64,
    pub atom: u32,
    pub children: Vec<Option<u32>>,
    pub local_time: u64,
    pub entries: u64,
    pub up_departures: u64,
}

/// State of a walk on `T_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeWalkRecord {
    pub position: u32,
    pub nodes: Vec<TreeNode>,
    pub excursion_log: Vec<ExcursionOutcome>,
    pub step_count: u64,
    pub origin_loop_count: u64,
    pub determined: bool,
}

impl TreeWalkRecord {
    /// Vertex reached by following child directions from the root.
    pub fn node(&self, path: &[u32]) -> Option<&TreeNode> {
        let mut id = 0u32;
        for &i in path {
            id = self.nodes[id as usize].children.get(i as usize - 1).copied().flatten()?;
        }
        Some(&self.nodes[id as usize])
    }

    /// `entries − departures` is 1 at the walker and 0 elsewhere, off the root.
    pub fn conservation_holds(&self) -> bool {
        self.nodes.iter().enumerate().skip(1).all(|(id, n)| {
            let diff = n.entries as i128 - n.local_time as i128;
            diff == (id as u32 == self.position) as i128
        })
    }
}

/// Rotor walk on `T_d`.
pub struct TreeWalk<'a> {
    assignment: &'a Assignment,
    record: TreeWalkRecord,
}

impl<'a> TreeWalk<'a> {
    pub fn new(assignment: &'a Assignment) -> Result<Self> {
        let d = assignment.degree();
        if d < 2 {
            return Err(Error::WrongDegree { found: d, context: "tree walk needs d ≥ 2" });
        }
        let key = assignment.root_key();
        let root = TreeNode {
            parent: None,
            depth: 0,
            key,
            atom: assignment.tree_index(0, key) as u32,
            children: vec![None; d as usize],
            local_time: 0,
            entries: 0,
            up_departures: 0,
        };
        let record = TreeWalkRecord {
            position: 0,
            nodes: vec![root],
            excursion_log: Vec::new(),
            step_count: 0,
            origin_loop_count: 0,
            determined: true,
        };
        Ok(TreeWalk { assignment, record })
    }

    pub fn record(&self) -> &TreeWalkRecord {
        &self.record
    }

    pub fn into_record(self) -> TreeWalkRecord {
        self.record
    }

    fn child(&mut self, id: u32, dir: u8) -> u32 {
        if let Some(c) = self.record.nodes[id as usize].children[dir as usize - 1] {
            return c;
        }
        let parent = &self.record.nodes[id as usize];
        let depth = parent.depth + 1;
        let key = match self.assignment {
            Assignment::Sampled(_) => tree_child_key(parent.key, dir as u32),
            _ => 0,
        };
        let node = TreeNode {
            parent: Some(id),
            depth,
            key,
            atom: self.assignment.tree_index(depth as usize, key) as u32,
            children: vec![None; self.assignment.degree() as usize],
            local_time: 0,
            entries: 0,
            up_departures: 0,
        };
        let c = self.record.nodes.len() as u32;
        self.record.nodes.push(node);
        self.record.nodes[id as usize].children[dir as usize - 1] = Some(c);
        c
    }

    /// One step; returns true if it traversed the root's self-loop.
    pub fn step(&mut self) -> bool {
        let id = self.record.position;
        let node = &self.record.nodes[id as usize];
        let sym = self.assignment.support()[node.atom as usize].symbol(node.local_time);
        self.record.nodes[id as usize].local_time += 1;
        self.record.step_count += 1;
        if sym == 0 {
            match self.record.nodes[id as usize].parent {
                None => {
                    self.record.origin_loop_count += 1;
                    return true;
                }
                Some(p) => {
                    self.record.nodes[id as usize].up_departures += 1;
                    self.record.nodes[p as usize].entries += 1;
                    self.record.position = p;
                }
            }
        } else {
            let c = self.child(id, sym);
            self.record.nodes[c as usize].entries += 1;
            self.record.position = c;
        }
        false
    }

    /// Runs one excursion; passing depth `escape_level` stops it as escaped.
    pub fn run_excursion(&mut self, budget: u64, escape_level: u64) -> ExcursionOutcome {
        let outcome = if !self.record.determined {
            ExcursionOutcome::Undecided { budget }
        } else {
            let mut steps = 0u64;
            loop {
                if steps >= budget {
                    self.record.determined = false;
                    break ExcursionOutcome::Undecided { budget };
                }
                if self.step() {
                    break ExcursionOutcome::Finite { steps: steps + 1 };
                }
                steps += 1;
                if self.record.nodes[self.record.position as usize].depth as u64 >= escape_level {
                    self.record.determined = false;
                    break ExcursionOutcome::Escaped { level: escape_level, steps };
                }
            }
        };
        self.record.excursion_log.push(outcome);
        outcome
    }
}

/// Final state of [`run_excursions`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "topology", rename_all = "lowercase")]
pub enum FinalRecord {
    Line(WalkRecord),
    Tree(TreeWalkRecord),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcursionRun {
    pub outcomes: Vec<ExcursionOutcome>,
    pub record: FinalRecord,
}

/// Simulates `num` successive excursions (on ℕ for `d = 1`, on `T_d` otherwise).
///
/// On ℕ a walker reaching `escape_level` triggers a Z-process survival check;
/// a certified escape is reported infinite and the walk continues in the
/// leftover. On trees escape is evidence only and is never certified.
pub fn run_excursions(assignment: &Assignment, num: usize, budget: u64, escape_level: u64) -> Result<ExcursionRun> {
    if num == 0 || budget == 0 || escape_level == 0 {
        return Err(Error::InvalidArgument("num, budget and escape level must be positive".into()));
    }
    if assignment.degree() == 1 {
        let mut walk = LineWalk::new(assignment)?;
        let outcomes = (0..num).map(|_| walk.run_excursion(budget, escape_level)).collect::<Result<Vec<_>>>()?;
        Ok(ExcursionRun { outcomes, record: FinalRecord::Line(walk.into_record()) })
    } else {
        let mut walk = TreeWalk::new(assignment)?;
        let outcomes = (0..num).map(|_| walk.run_excursion(budget, escape_level)).collect();
        Ok(ExcursionRun { outcomes, record: FinalRecord::Tree(walk.into_record()) })
    }
}

/// Type counts `ξ_n(i)` of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub live: u64,
    pub types: BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZTreeOutcome {
    /// Every live vertex was expanded: the first `k` excursions are finite.
    Died { live_nodes: u64 },
    /// The budget ran out with live vertices left.
    Alive { frontier: u64, levels: Vec<LevelStats> },
}

fn tree_tables(assignment: &Assignment) -> Result<Vec<UTable>> {
    if assignment.degree() < 2 {
        return Err(Error::WrongDegree { found: assignment.degree(), context: "tree Z-process needs d ≥ 2" });
    }
    assignment.support().into_iter().map(UTable::new).collect()
}

fn child_key(assignment: &Assignment, key: u64, dir: u32) -> u64 {
    match assignment {
        Assignment::Sampled(_) => tree_child_key(key, dir),
        _ => 0,
    }
}

/// Breadth-first expansion of the live part of the tree Z-process from `Z_root = k`.
pub fn z_tree_expand(assignment: &Assignment, k: u64, node_budget: u64) -> Result<ZTreeOutcome> {
    let tables = tree_tables(assignment)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let d = assignment.degree();
    let mut frontier = vec![(assignment.root_key(), k)];
    let mut levels = Vec::new();
    let mut expanded = 0u64;
    for depth in 0usize.. {
        if frontier.is_empty() {
            return Ok(ZTreeOutcome::Died { live_nodes: expanded });
        }
        let mut types = BTreeMap::new();
        for &(_, t) in &frontier {
            *types.entry(t).or_insert(0) += 1;
        }
        levels.push(LevelStats { level: depth, live: frontier.len() as u64, types });
        if expanded + frontier.len() as u64 > node_budget {
            return Ok(ZTreeOutcome::Alive { frontier: frontier.len() as u64, levels });
        }
        let mut next = Vec::new();
        for &(key, t) in &frontier {
            expanded += 1;
            let table = &tables[assignment.tree_index(depth, key)];
            for j in 1..=d {
                let c = table.eval(j, t);
                if c > 0 {
                    next.push((child_key(assignment, key, j), c));
                }
            }
        }
        frontier = next;
    }
    unreachable!()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EscapeSearch {
    /// The live Z-subtree is finite.
    Died {
        live_nodes: u64,
    },
    /// A live vertex at depth `level` exists.
    Escaped {
        level: u64,
        nodes: u64,
    },
    Undecided {
        nodes: u64,
    },
}

/// Depth-first search for a live Z-vertex at depth `escape_level`.
pub fn z_tree_escape(assignment: &Assignment, k: u64, node_budget: u64, escape_level: u64) -> Result<EscapeSearch> {
    let tables = tree_tables(assignment)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let d = assignment.degree();
    let mut stack = vec![(0u64, assignment.root_key(), k)];
    let mut nodes = 0u64;
    while let Some((depth, key, t)) = stack.pop() {
        if depth >= escape_level {
            return Ok(EscapeSearch::Escaped { level: depth, nodes });
        }
        if nodes >= node_budget {
            return Ok(EscapeSearch::Undecided { nodes });
        }
        nodes += 1;
        let table = &tables[assignment.tree_index(depth as usize, key)];
        for j in (1..=d).rev() {
            let c = table.eval(j, t);
            if c > 0 {
                stack.push((depth + 1, child_key(assignment, key, j), c));
            }
        }
    }
    Ok(EscapeSearch::Died { live_nodes: nodes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    /// The first `k` excursions are certified finite.
    Recurrent,
    /// An infinite excursion among the first `k` is certified.
    Transient,
    /// Undecided, with the walk or a live Z-vertex past the escape level.
    Escaped,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonteCarloParams {
    pub dist: String,
    pub degree: u32,
    pub k: u64,
    pub trials: usize,
    pub budget: u64,
    pub escape_level: u64,
    pub seed: u64,
}

/// Aggregated trial outcomes; `escaped` counts the undecided trials that
/// passed the escape level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonteCarloSummary {
    pub params: MonteCarloParams,
    pub trials: usize,
    pub decided_recurrent: usize,
    pub decided_transient: usize,
    pub undecided: usize,
    pub escaped: usize,
    pub trial_seeds: Vec<u64>,
    pub outcomes: Vec<TrialOutcome>,
}

/// Seed of trial `i` under master seed `seed`: first 8 bytes (LE) of
/// `SHA-256("rotor-trial" ‖ seed_le ‖ i_le)`.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"rotor-trial");
    h.update(seed.to_le_bytes());
    h.update(i.to_le_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().expect("digest has 32 bytes"))
}

/// Decides one sampled configuration.
pub fn run_trial(
    dist: &SupportDistribution,
    k: u64,
    budget: u64,
    escape_level: u64,
    seed: u64,
) -> Result<TrialOutcome> {
    let assignment = Assignment::sampled(dist.clone(), seed);
    if dist.degree() == 1 {
        let line = Line::new(&assignment, &LeftoverConfig::identity())?;
        let (_, outcome) = line.orbit(0, k, budget, escape_level, false);
        return Ok(match outcome {
            ZOutcome::HitZero { .. } => TrialOutcome::Recurrent,
            ZOutcome::CycleCertified { .. } => TrialOutcome::Transient,
            ZOutcome::Survived { .. } => TrialOutcome::Undecided,
        });
    }
    Ok(match z_tree_escape(&assignment, k, budget, escape_level)? {
        EscapeSearch::Died { .. } => TrialOutcome::Recurrent,
        EscapeSearch::Escaped { .. } => TrialOutcome::Escaped,
        EscapeSearch::Undecided { .. } => TrialOutcome::Undecided,
    })
}

/// Independent trials over sampled configurations, reproducible from `seed`.
pub fn monte_carlo(
    dist: &SupportDistribution,
    k: u64,
    trials: usize,
    budget: u64,
    escape_level: u64,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if trials == 0 || k == 0 {
        return Err(Error::InvalidArgument("trials and k must be positive".into()));
    }
    let trial_seeds: Vec<u64> = (0..trials as u64).map(|i| trial_seed(seed, i)).collect();
    let outcomes =
        trial_seeds.par_iter().map(|&s| run_trial(dist, k, budget, escape_level, s)).collect::<Result<Vec<_>>>()?;
    let count = |o: TrialOutcome| outcomes.iter().filter(|&&x| x == o).count();
    let escaped = count(TrialOutcome::Escaped);
    Ok(MonteCarloSummary {
        params: MonteCarloParams {
            dist: dist.format(false),
            degree: dist.degree(),
            k,
            trials,
            budget,
            escape_level,
            seed,
        },
        trials,
        decided_recurrent: count(TrialOutcome::Recurrent),
        decided_transient: count(TrialOutcome::Transient),
        undecided: count(TrialOutcome::Undecided) + escaped,
        escaped,
        trial_seeds,
        outcomes,
    })
}
