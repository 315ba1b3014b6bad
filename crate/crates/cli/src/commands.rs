use num_rational::BigRational;
use num_traits::Zero;
use rotorwalk::sim::{self, FinalRecord};
use rotorwalk::tree::{self, TreeVerdict};
use rotorwalk::unary::{self, KStar};
use rotorwalk::{
    parse_rational, Assignment, Error, MomentMatrix, RationalMatrix, RotorSequence, SpectralRadius, SupportDistribution,
};
use serde_json::{json, Value};

use crate::args::{
    ClassifyArgs, DecomposeArgs, ExcursionArgs, Input, KstarArgs, MatrixArgs, Model, MonteCarloArgs, Side,
    SimulateArgs, Spectral, SpectralArgs, SweepArgs,
};
use crate::render::{Report, Table};
use crate::spec::RunSpec;
use crate::CliError;

type Out = Result<Report, CliError>;

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn ratio_text(r: &BigRational) -> String {
    r.to_string()
}

/// Parsed sequences and distribution, with their canonical echo.
pub struct Resolved {
    pub sequences: Vec<RotorSequence>,
    pub dist: Option<SupportDistribution>,
}

pub fn resolve(input: &Input, spec: &mut RunSpec) -> Result<Resolved, CliError> {
    let d = input.degree;
    if d == 0 {
        return Err(CliError::Usage("--d must be at least 1".into()));
    }
    let sequences =
        input.seq.iter().map(|t| RotorSequence::parse(t, d).map_err(usage)).collect::<Result<Vec<_>, _>>()?;
    let dist = match &input.dist {
        Some(text) => {
            if !sequences.is_empty() {
                return Err(CliError::Usage("give either --seq or --dist, not both".into()));
            }
            if matches!(input.model, Some(Model::Rotation | Model::Shift)) {
                return Err(CliError::Usage("--dist needs --model custom or no model".into()));
            }
            Some(SupportDistribution::parse(text, d).map_err(usage)?)
        }
        None => None,
    };
    spec.model = input.model.map(|m| m.as_str().to_string());
    spec.sequences = sequences.iter().map(|s| s.format(d == 1)).collect();
    spec.distribution = dist.as_ref().map(|x| x.format(d == 1));
    Ok(Resolved { sequences, dist })
}

impl Resolved {
    fn single(&self, what: &str) -> Result<&RotorSequence, CliError> {
        match self.sequences.as_slice() {
            [s] => Ok(s),
            _ => Err(CliError::Usage(format!("{what} needs exactly one --seq"))),
        }
    }

    /// The distribution described by the input, expanding `--model`.
    fn distribution(&self, model: Option<Model>) -> Result<SupportDistribution, CliError> {
        if let Some(d) = &self.dist {
            return Ok(d.clone());
        }
        if self.sequences.is_empty() {
            return Err(CliError::Usage("need --seq or --dist".into()));
        }
        Ok(match model {
            Some(Model::Rotation) => SupportDistribution::uniform_rotation(self.single("--model rotation")?)?,
            Some(Model::Shift) => SupportDistribution::uniform_shift(self.single("--model shift")?)?,
            _ => SupportDistribution::uniform(self.sequences.clone())?,
        })
    }

    /// Deterministic for plain `--seq`, sampled otherwise.
    fn assignment(&self, model: Option<Model>, seed: u64) -> Result<(Assignment, bool), CliError> {
        if self.dist.is_none() && model.is_none() {
            return Ok(match self.sequences.as_slice() {
                [] => return Err(CliError::Usage("need --seq or --dist".into())),
                [s] => (Assignment::homogeneous(s.clone())?, false),
                list => (Assignment::cyclic(list.to_vec())?, false),
            });
        }
        Ok((Assignment::sampled(self.distribution(model)?, seed), true))
    }
}

fn tolerance(s: &Spectral, spec: &mut RunSpec) -> Result<BigRational, CliError> {
    let tol = match &s.tol {
        Some(t) => parse_rational(t).map_err(usage)?,
        None => tree::default_tolerance(),
    };
    if tol <= BigRational::zero() {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    spec.tol = Some(ratio_text(&tol));
    Ok(tol)
}

pub fn rho_json(r: &SpectralRadius) -> Value {
    json!({
        "lo": r.lo_f64(),
        "hi": r.hi_f64(),
        "verdict": r.verdict.as_str(),
        "lo_exact": ratio_text(&r.lo),
        "hi_exact": ratio_text(&r.hi),
        "exact": r.exact.as_ref().map(ratio_text),
        "closed_form": r.closed_form,
        "iterative": {"lower": r.iterative.lower, "upper": r.iterative.upper},
    })
}

fn matrix_json(m: &MomentMatrix, rho: &SpectralRadius) -> Value {
    json!({
        "size": m.size(),
        "entries": m.to_string_rows(),
        "truncated": m.is_truncated(),
        "rho": rho_json(rho),
    })
}

fn matrix_table(rows: &[Vec<String>]) -> Table {
    let size = rows.len();
    Table {
        header: std::iter::once("row".to_string()).chain((1..=size).map(|l| format!("m_{l}"))).collect(),
        rows: rows
            .iter()
            .enumerate()
            .map(|(k, r)| std::iter::once((k + 1).to_string()).chain(r.iter().cloned()).collect())
            .collect(),
    }
}

fn u_values(dist: &SupportDistribution, swap: bool) -> Result<Value, CliError> {
    let n = dist.balance_parameter()?;
    let mut atoms = Vec::new();
    for a in dist.atoms() {
        let s = if swap { unary::swap_symbols(&a.sequence)? } else { a.sequence.clone() };
        let u = (1..=n).map(|x| s.u_value(1, x)).collect::<rotorwalk::Result<Vec<_>>>()?;
        atoms.push(json!({"sequence": s.format(true), "weight": ratio_text(&a.weight), "u": u}));
    }
    Ok(Value::Array(atoms))
}

fn line_verdict(k: KStar) -> &'static str {
    if k.is_finite() {
        "Transient"
    } else {
        "Recurrent"
    }
}

pub fn classify(a: &ClassifyArgs, spec: &mut RunSpec) -> Out {
    let r = resolve(&a.input, spec)?;
    let tol = tolerance(&a.spectral, spec)?;
    spec.types = a.spectral.types;
    let model = a.input.model;
    let d = a.input.degree;
    if d == 1 {
        let result = match (model, &r.dist) {
            (Some(Model::Shift), None) => {
                let s = r.single("--model shift")?;
                let v = unary::classify_shift_model_unary(s)?;
                let c = s.counts_per_period();
                json!({"topology": "line", "criterion": "shift-counts", "verdict": v, "ones": c[1], "zeros": c[0]})
            }
            (Some(Model::Rotation), None) => {
                let s = r.single("--model rotation")?;
                if !s.is_nondegenerate() {
                    return Err(Error::Degenerate(s.to_string()).into());
                }
                json!({"topology": "line", "criterion": "uniform-rotation", "verdict": "Recurrent"})
            }
            _ => {
                let dist = r.distribution(model)?;
                let k = unary::k_star(&dist)?;
                json!({"topology": "line", "criterion": "k-star", "k_star": k, "verdict": line_verdict(k)})
            }
        };
        return Ok(Report::new(result));
    }
    let result = match (model, &r.dist) {
        (Some(Model::Rotation), None) => {
            let s = r.single("--model rotation")?;
            let c = tree::classify_uniform_rotation(s)?;
            let mut out = json!({
                "topology": "tree",
                "criterion": if d == 2 { "standard-pieces" } else { "offspring-bound" },
                "verdict": c.verdict,
                "decomposition": c.decomposition,
                "offspring_bound": c.offspring_bound.as_ref().map(ratio_text),
                "live_children_mean": ratio_text(&tree::rotation_live_children_mean(s)?),
            });
            if s.is_balanced() {
                let sc = tree::classify_tree_balanced_with(&SupportDistribution::uniform_rotation(s)?, &tol)?;
                out["spectral"] = json!({"verdict": sc.verdict, "matrix": matrix_json(&sc.matrix, &sc.rho)});
            }
            out
        }
        (Some(Model::Shift), None) => {
            let s = r.single("--model shift")?;
            let c = tree::classify_uniform_shift(s, a.spectral.types)?;
            json!({
                "topology": "tree",
                "criterion": "shift-model",
                "verdict": c.verdict,
                "in_conjectured_set": c.in_conjectured_set,
                "spectral": c.spectral.as_ref().map(|sc| matrix_json(&sc.matrix, &sc.rho)),
            })
        }
        _ => {
            let dist = r.distribution(model)?;
            let sc = tree::classify_tree_balanced_with(&dist, &tol)?;
            json!({
                "topology": "tree",
                "criterion": "moment-matrix",
                "verdict": sc.verdict,
                "matrix": matrix_json(&sc.matrix, &sc.rho),
            })
        }
    };
    Ok(Report::new(result))
}

pub fn kstar(a: &KstarArgs, spec: &mut RunSpec) -> Out {
    let r = resolve(&a.input, spec)?;
    spec.side = Some(a.side.as_str().to_string());
    if a.input.degree != 1 {
        return Err(Error::WrongDegree { found: a.input.degree, context: "k* is defined on ℕ (d = 1)" }.into());
    }
    let dist = r.distribution(a.input.model)?;
    let two = unary::two_sided_k_star(&dist)?;
    let side = |name: &str, k: KStar, swap: bool| -> Result<Value, CliError> {
        Ok(json!({"side": name, "k_star": k, "verdict": line_verdict(k), "atoms": u_values(&dist, swap)?}))
    };
    let result = match a.side {
        Side::Right => side("right", two.right, false)?,
        Side::Left => side("left", two.left, true)?,
        Side::Both => {
            let transient = two.right.is_finite() || two.left.is_finite();
            json!({
                "side": "both",
                "right": side("right", two.right, false)?,
                "left": side("left", two.left, true)?,
                "verdict": if transient { "Transient" } else { "Recurrent" },
            })
        }
    };
    Ok(Report::new(result))
}

fn build_matrix(dist: &SupportDistribution, types: Option<usize>) -> Result<MomentMatrix, CliError> {
    Ok(match (dist.balance_parameter(), types) {
        (Ok(n), None) => tree::moment_matrix(dist, n as usize)?,
        (Ok(_), Some(k)) => tree::moment_matrix(dist, k)?,
        (Err(_), Some(k)) => tree::truncated_moment_matrix(dist, k)?,
        (Err(e), None) => return Err(CliError::Domain(format!("{e}; pass --types to truncate"))),
    })
}

pub fn moment_matrix(a: &MatrixArgs, spec: &mut RunSpec) -> Out {
    let r = resolve(&a.input, spec)?;
    let tol = tolerance(&a.spectral, spec)?;
    spec.types = a.spectral.types;
    if a.input.degree < 2 {
        return Err(Error::WrongDegree { found: a.input.degree, context: "moment matrices need d ≥ 2" }.into());
    }
    let dist = r.distribution(a.input.model)?;
    let m = build_matrix(&dist, a.spectral.types)?;
    let rho = m.spectral_radius(&tol)?;
    let rows = m.to_string_rows();
    Ok(Report::new(matrix_json(&m, &rho)).with_table(matrix_table(&rows)))
}

fn parse_matrix(text: &str) -> Result<RationalMatrix, CliError> {
    let rows = text
        .split(';')
        .map(|row| row.split(',').map(|e| parse_rational(e.trim()).map_err(usage)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    RationalMatrix::new(rows).map_err(usage)
}

pub fn spectral_radius(a: &SpectralArgs, spec: &mut RunSpec) -> Out {
    let tol = tolerance(&a.spectral, spec)?;
    let matrix = match &a.matrix {
        Some(text) => {
            if !a.input.seq.is_empty() || a.input.dist.is_some() {
                return Err(CliError::Usage("give either --matrix or a model, not both".into()));
            }
            let m = parse_matrix(text)?;
            spec.matrix = Some(m.to_string_rows().iter().map(|r| r.join(",")).collect::<Vec<_>>().join(";"));
            m
        }
        None => {
            let r = resolve(&a.input, spec)?;
            spec.types = a.spectral.types;
            build_matrix(&r.distribution(a.input.model)?, a.spectral.types)?.matrix().clone()
        }
    };
    let rho = rotorwalk::spectral_radius(&matrix, &tol)?;
    let rows = matrix.to_string_rows();
    Ok(Report::new(json!({"size": matrix.size(), "entries": rows, "rho": rho_json(&rho)})))
}

pub fn decompose(a: &DecomposeArgs, spec: &mut RunSpec) -> Out {
    let r = resolve(&a.input, spec)?;
    let s = r.single("decompose")?;
    let standard = tree::decompose_standard_pieces(s)?;
    let symmetric = tree::decompose_symmetric_pieces(s)?;
    let table = Table {
        header: vec!["kind", "index", "rotation", "multiplicity", "mirrored", "in_cycle"]
            .into_iter()
            .map(String::from)
            .collect(),
        rows: [("standard", &standard), ("symmetric", &symmetric)]
            .iter()
            .flat_map(|(kind, d)| {
                d.iter().flat_map(move |d| {
                    d.pieces.iter().enumerate().map(move |(i, p)| {
                        vec![
                            kind.to_string(),
                            i.to_string(),
                            p.rotation.to_string(),
                            p.multiplicity.to_string(),
                            p.mirrored.to_string(),
                            (i >= d.cycle_start).to_string(),
                        ]
                    })
                })
            })
            .collect(),
    };
    Ok(Report::new(json!({
        "sequence": s.to_string(),
        "standard": standard,
        "symmetric": symmetric,
    }))
    .with_table(table))
}

pub fn sweep(a: &SweepArgs, spec: &mut RunSpec) -> Out {
    spec.model = Some(a.model.as_str().to_string());
    spec.period = Some(a.period);
    let records: Vec<Value>;
    let table;
    let summary;
    match a.model {
        Model::Shift => {
            let report = tree::sweep_shift_conjecture(a.period, a.degree)?;
            let agreement = report.agreement();
            let counterexamples: Vec<&str> = report.counterexamples().map(|c| c.representative.as_str()).collect();
            summary = json!({
                "classes": report.classes.len(),
                "agreement": agreement,
                "agreement_percent": 100.0 * agreement as f64 / report.classes.len().max(1) as f64,
                "counterexamples": counterexamples,
            });
            records = report.classes.iter().map(|c| json!({"kind": "class", "class": c})).collect();
            table = Table {
                header: [
                    "representative",
                    "verdict",
                    "in_conjectured_set",
                    "agrees",
                    "rho_lo",
                    "rho_hi",
                    "rho_verdict",
                ]
                .map(String::from)
                .to_vec(),
                rows: report
                    .classes
                    .iter()
                    .map(|c| {
                        vec![
                            c.representative.clone(),
                            c.verdict.to_string(),
                            c.in_conjectured_set.to_string(),
                            c.agrees.to_string(),
                            c.rho_lo.to_string(),
                            c.rho_hi.to_string(),
                            c.rho_verdict.as_str().to_string(),
                        ]
                    })
                    .collect(),
            };
        }
        Model::Rotation => {
            if a.degree != 2 {
                return Err(Error::WrongDegree { found: a.degree, context: "rotation sweep is defined on T_2" }.into());
            }
            let entries = tree::sweep_rotation_criterion(a.period)?;
            let agreement = entries.iter().filter(|e| e.agrees).count();
            let recurrent = entries.iter().filter(|e| e.piece_verdict == TreeVerdict::Recurrent).count();
            summary = json!({
                "sequences": entries.len(),
                "recurrent": recurrent,
                "agreement": agreement,
                "agreement_percent": 100.0 * agreement as f64 / entries.len().max(1) as f64,
                "counterexamples": entries.iter().filter(|e| !e.agrees).map(|e| e.sequence.clone()).collect::<Vec<_>>(),
            });
            records = entries.iter().map(|e| json!({"kind": "sequence", "sequence": e})).collect();
            table = Table {
                header: ["sequence", "piece_verdict", "spectral_verdict", "agrees", "rho_lo", "rho_hi"]
                    .map(String::from)
                    .to_vec(),
                rows: entries
                    .iter()
                    .map(|e| {
                        vec![
                            e.sequence.clone(),
                            e.piece_verdict.to_string(),
                            e.spectral_verdict.to_string(),
                            e.agrees.to_string(),
                            e.rho_lo.to_string(),
                            e.rho_hi.to_string(),
                        ]
                    })
                    .collect(),
            };
        }
        Model::Custom => return Err(CliError::Usage("sweep supports --model shift or rotation".into())),
    }
    Ok(Report::new(summary).with_table(table).with_records(records))
}

fn echo_walk(spec: &mut RunSpec, k: u64, seed: Option<u64>, budget: u64, escape: Option<u64>) {
    spec.k = Some(k);
    spec.seed = seed;
    spec.budget = Some(budget);
    spec.escape = escape;
}

pub fn simulate(a: &SimulateArgs, spec: &mut RunSpec) -> Out {
    let r = resolve(&a.input, spec)?;
    let (assignment, sampled) = r.assignment(a.input.model, a.walk.seed)?;
    let w = &a.walk;
    if a.input.degree == 1 {
        let budget = w.budget.unwrap_or(sim::DEFAULT_STEP_BUDGET);
        echo_walk(spec, w.k, sampled.then_some(w.seed), budget, None);
        let z = unary::z_trajectory(&assignment, w.k, budget)?;
        const SHOWN: usize = 1000;
        let table = Table {
            header: vec!["n".into(), "z".into()],
            rows: z.values.iter().enumerate().map(|(n, v)| vec![n.to_string(), v.to_string()]).collect(),
        };
        return Ok(Report::new(json!({
            "topology": "line",
            "k": z.k,
            "outcome": z.outcome,
            "length": z.values.len(),
            "values": &z.values[..z.values.len().min(SHOWN)],
            "values_truncated": z.values.len() > SHOWN,
            "total_steps": z.total_steps().map(|s| s.to_string()),
        }))
        .with_table(table));
    }
    let budget = w.budget.unwrap_or(sim::DEFAULT_NODE_BUDGET);
    echo_walk(spec, w.k, sampled.then_some(w.seed), budget, None);
    let outcome = sim::z_tree_expand(&assignment, w.k, budget)?;
    Ok(Report::new(json!({"topology": "tree", "k": w.k, "outcome": outcome})))
}

pub fn excursions(a: &ExcursionArgs, spec: &mut RunSpec) -> Out {
    let r = resolve(&a.input, spec)?;
    let (assignment, sampled) = r.assignment(a.input.model, a.walk.seed)?;
    let w = &a.walk;
    let budget = w.budget.unwrap_or(sim::DEFAULT_STEP_BUDGET);
    echo_walk(spec, w.k, sampled.then_some(w.seed), budget, Some(w.escape));
    if w.k == 0 {
        return Err(CliError::Usage("--k must be positive".into()));
    }
    let run = sim::run_excursions(&assignment, w.k as usize, budget, w.escape)?;
    let table = Table {
        header: vec!["excursion".into(), "kind".into(), "detail".into()],
        rows: run
            .outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let v = to_json(o);
                let kind = v["kind"].as_str().unwrap_or_default().to_string();
                let mut detail = v.clone();
                detail.as_object_mut().map(|m| m.remove("kind"));
                vec![(i + 1).to_string(), kind, detail.to_string()]
            })
            .collect(),
    };
    let record = match &run.record {
        FinalRecord::Line(rec) => {
            let leftover = sim::leftover_config(&assignment, rec).ok();
            json!({
                "topology": "line",
                "step_count": rec.step_count,
                "origin_loop_count": rec.origin_loop_count,
                "determined": rec.determined,
                "leftover": leftover.map(|l| json!({"explicit": l.explicit(), "tail": l.tail()})),
            })
        }
        FinalRecord::Tree(rec) => json!({
            "topology": "tree",
            "step_count": rec.step_count,
            "origin_loop_count": rec.origin_loop_count,
            "determined": rec.determined,
            "visited_vertices": rec.nodes.len(),
            "max_depth": rec.nodes.iter().map(|n| n.depth).max().unwrap_or(0),
        }),
    };
    Ok(Report::new(json!({"outcomes": run.outcomes, "record": record})).with_table(table))
}

pub fn monte_carlo(a: &MonteCarloArgs, spec: &mut RunSpec) -> Out {
    let r = resolve(&a.input, spec)?;
    let dist = r.distribution(a.input.model)?;
    let w = &a.walk;
    let budget =
        w.budget.unwrap_or(if dist.degree() == 1 { sim::DEFAULT_STEP_BUDGET } else { sim::DEFAULT_NODE_BUDGET });
    echo_walk(spec, w.k, Some(w.seed), budget, Some(w.escape));
    spec.trials = Some(a.trials);
    if a.trials == 0 || w.k == 0 {
        return Err(CliError::Usage("--trials and --k must be positive".into()));
    }
    let summary = sim::monte_carlo(&dist, w.k, a.trials, budget, w.escape, w.seed)?;
    let table = Table {
        header: vec!["trial".into(), "seed".into(), "outcome".into()],
        rows: summary
            .trial_seeds
            .iter()
            .zip(&summary.outcomes)
            .enumerate()
            .map(|(i, (s, o))| vec![i.to_string(), s.to_string(), to_json(o).as_str().unwrap_or_default().to_string()])
            .collect(),
    };
    Ok(Report::new(to_json(&summary)).with_table(table))
}
