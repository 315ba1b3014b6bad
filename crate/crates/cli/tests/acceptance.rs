//! One line per acceptance criterion, `PASS` or `FAIL`, with pinned tolerances.
//!
//! Criteria listed in `EXPECTED_FAIL` do not hold as stated; the target still
//! prints their `FAIL` line and errors out if one of them starts passing.

mod common;

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotorwalk::sim::{monte_carlo, run_excursions, TreeWalk};
use rotorwalk::tree::{
    classify_tree_balanced, classify_uniform_rotation, default_tolerance, moment_matrix, rotation_offspring_bound,
    sweep_rotation_criterion, sweep_shift_conjecture,
};
use rotorwalk::unary::{classify_unary_balanced, count_infinite_excursions, k_star, two_sided_k_star, UnaryVerdict};
use rotorwalk::{ratio, Assignment, ExcursionOutcome, KStar, RotorSequence, SupportDistribution, TreeVerdict, UTable};

type Criterion = (u32, &'static str, fn() -> Outcome);

const EXPECTED_FAIL: &[u32] = &[9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn seq(t: &str, d: u32) -> RotorSequence {
    RotorSequence::parse(t, d).unwrap()
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

fn balanced_word(rng: &mut ChaCha8Rng, d: u32, n: usize) -> RotorSequence {
    let mut w: Vec<u8> = (0..=d as u8).flat_map(|s| std::iter::repeat_n(s, n)).collect();
    w.shuffle(rng);
    RotorSequence::periodic(d, w).unwrap()
}

fn moment_matrix_reproduction() -> Outcome {
    let start = Instant::now();
    let out = common::json(&["moment-matrix", "--d", "2", "--model", "rotation", "--seq", "(010122)", "--types", "2"]);
    let elapsed = start.elapsed();
    let r = &out["result"];
    let entries: Vec<Vec<String>> = serde_json::from_value(r["entries"].clone()).unwrap();
    let exact = entries == [["1/3", "2/3"], ["1/3", "1"]];
    let rho = &r["rho"];
    let (lo, hi) = (rho["lo"].as_f64().unwrap(), rho["hi"].as_f64().unwrap());
    let target = (2.0 + 3f64.sqrt()) / 3.0;
    let close = (lo - 1.2440169).abs() <= 1e-6 && (hi - 1.2440169).abs() <= 1e-6 && lo <= target && target <= hi;
    let gt1 = rho["verdict"] == "gt1";
    outcome(
        exact && close && gt1 && within(elapsed, 1),
        format!("entries {entries:?}, rho in [{lo:.10}, {hi:.10}], verdict {}, {elapsed:.2?}", rho["verdict"]),
    )
}

fn rotor_router_criticality() -> Outcome {
    let start = Instant::now();
    let rr = SupportDistribution::uniform_rotation(&seq("(012)", 2)).unwrap();
    let m = moment_matrix(&rr, 1).unwrap();
    let c = classify_tree_balanced(&rr).unwrap();
    let critical =
        m.to_string_rows() == [["1"]] && c.rho.is_exactly(&BigRational::one()) && c.verdict == TreeVerdict::Recurrent;
    let (mut points, mut boundary, mut wrong) = (0, 0, Vec::new());
    for a in 1..=8i64 {
        for b in 1..=8i64 {
            let c3 = 10 - a - b;
            if !(1..=8).contains(&c3) {
                continue;
            }
            let dist = SupportDistribution::new(vec![
                (seq("(012)", 2), ratio(a, 10)),
                (seq("(120)", 2), ratio(b, 10)),
                (seq("(201)", 2), ratio(c3, 10)),
            ])
            .unwrap();
            let verdict = classify_tree_balanced(&dist).unwrap().verdict;
            let m = ratio(2 * b + c3, 10);
            let expected = if m > BigRational::one() { TreeVerdict::Transient } else { TreeVerdict::Recurrent };
            points += 1;
            boundary += (m == BigRational::one()) as usize;
            if verdict != expected {
                wrong.push((a, b, c3));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        critical && wrong.is_empty() && within(elapsed, 5),
        format!("[1] with rho = 1 exactly: {critical}; grid {points} points ({boundary} on 2p2+p3 = 1), mismatches {wrong:?}, {elapsed:.2?}"),
    )
}

fn parametric_eigenvalue() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..50 {
        let w: Vec<i64> = (0..3).map(|_| rng.random_range(1..=1000)).collect();
        let total: i64 = w.iter().sum();
        let p: Vec<BigRational> = w.iter().map(|&x| ratio(x, total)).collect();
        let dist = SupportDistribution::new(vec![
            (seq("(010122)", 2), p[0].clone()),
            (seq("(121200)", 2), p[1].clone()),
            (seq("(202011)", 2), p[2].clone()),
        ])
        .unwrap();
        let m = moment_matrix(&dist, 2).unwrap();
        let two = ratio(2, 1);
        let entries_ok = *m.entry(1, 1) == p[2]
            && *m.entry(1, 2) == &two * &p[1]
            && *m.entry(2, 1) == p[0]
            && *m.entry(2, 2) == &two * &p[1] + &p[2];
        let rho = m.spectral_radius(&default_tolerance()).unwrap();
        let f: Vec<f64> = p.iter().map(|x| x.to_f64().unwrap()).collect();
        let formula = f[1] + f[2] + (f[1] * (2.0 * f[0] + f[1])).sqrt();
        let gap = (rho.lo_f64() - formula).max(formula - rho.hi_f64()).max(0.0);
        worst = worst.max(gap);
        if !entries_ok || !rho.contains(formula, 1e-9) {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && within(elapsed, 5),
        format!("50 triples, {failures} outside the enclosure (slack 1e-9), worst gap {worst:.1e}, {elapsed:.2?}"),
    )
}

fn standard_pieces_vs_spectral() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for len in [3usize, 6, 9] {
        let t = Instant::now();
        let sweep = sweep_rotation_criterion(len).unwrap();
        let agree = sweep.iter().filter(|e| e.agrees).count();
        ok &= agree == sweep.len();
        if len == 9 {
            ok &= within(t.elapsed(), 120);
        }
        parts.push(format!("L={len}: {agree}/{}", sweep.len()));
    }
    let elapsed = start.elapsed();
    outcome(ok, format!("{}, {elapsed:.2?}", parts.join(", ")))
}

fn shift_conjecture_sweep() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for len in [6usize, 9, 12] {
        let t = Instant::now();
        let report = sweep_shift_conjecture(len, 2).unwrap();
        let elapsed = t.elapsed();
        ok &= report.agreement() == report.classes.len();
        if len == 6 {
            ok &= within(elapsed, 10);
        }
        parts.push(format!("L={len}: {}/{} classes, {elapsed:.2?}", report.agreement(), report.classes.len()));
    }
    outcome(ok, parts.join("; "))
}

fn infinite_excursion_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let (mut over, mut undecided, mut max_seen) = (0, 0, 0usize);
    for i in 0..200 {
        let len = [2usize, 4, 6, 8][i % 4];
        let s = balanced_word(&mut rng, 1, len / 2);
        let a = Assignment::homogeneous(s).unwrap();
        let out = count_infinite_excursions(&a, len + 2, 1_000_000, 30).unwrap();
        let infinite = out.iter().filter(|o| o.is_infinite()).count();
        max_seen = max_seen.max(infinite);
        over += (infinite > len / 2) as usize;
        undecided += out.iter().filter(|o| !o.is_infinite() && !o.is_finite()).count();
    }
    let a = Assignment::homogeneous(seq("(+-)", 1)).unwrap();
    let out = count_infinite_excursions(&a, 5, 1_000_000, 30).unwrap();
    let sharp = out[0].is_infinite() && out[1..].iter().all(ExcursionOutcome::is_finite);
    let elapsed = start.elapsed();
    outcome(
        over == 0 && undecided == 0 && sharp && within(elapsed, 60),
        format!("200 assignments: {over} over L/2, {undecided} undecided excursions; (+-) gives [Inf, Fin x4]: {sharp}, {elapsed:.2?}"),
    )
}

fn kstar_vs_simulator() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let (mut decided, mut contradictions, mut transient) = (0, 0, 0);
    for _ in 0..300 {
        let n = rng.random_range(1..=4usize);
        let atoms = rng.random_range(1..=3usize);
        let weights: Vec<i64> = (0..atoms).map(|_| rng.random_range(1..=5)).collect();
        let total: i64 = weights.iter().sum();
        let items = weights.iter().map(|&w| (balanced_word(&mut rng, 1, n), ratio(w, total))).collect();
        let dist = SupportDistribution::new(items).unwrap();
        let verdict = classify_unary_balanced(&dist).unwrap();
        let ks = k_star(&dist).unwrap();
        let m = ks.value().map_or(5, |k| k.min(5)) as usize;
        let a = Assignment::sampled(dist, rng.random());
        let out = run_excursions(&a, m, 1_000_000, 2_000).unwrap().outcomes;
        let any_infinite = out.iter().any(ExcursionOutcome::is_infinite);
        let all_finite = out.iter().all(ExcursionOutcome::is_finite);
        if !any_infinite && !all_finite {
            continue;
        }
        decided += 1;
        transient += (verdict == UnaryVerdict::Transient) as usize;
        let consistent = match verdict {
            UnaryVerdict::Transient => any_infinite,
            UnaryVerdict::Recurrent => all_finite,
        };
        contradictions += !consistent as usize;
    }
    let elapsed = start.elapsed();
    outcome(
        contradictions == 0 && within(elapsed, 120),
        format!("300 distributions, {decided} decided ({transient} transient), {contradictions} contradictions, {elapsed:.2?}"),
    )
}

fn two_sided_remark() -> Outcome {
    let start = Instant::now();
    let s = seq("(+--+)", 1);
    let ks = two_sided_k_star(&SupportDistribution::point_mass(s.clone()).unwrap()).unwrap();
    let left = s.rotate(1).unwrap();
    let (u1, u2) = (left.u_value(1, 1).unwrap(), left.u_value(1, 2).unwrap());
    let elapsed = start.elapsed();
    outcome(
        ks.right == KStar::Finite(1) && ks.left == KStar::Finite(2) && u1 == 0 && u2 == 2 && within(elapsed, 1),
        format!("right k* = {}, left U(1) = {u1}, U(2) = {u2}, k* = {}, {elapsed:.2?}", ks.right, ks.left),
    )
}

fn random_nondegenerate(rng: &mut ChaCha8Rng, d: u32, max_len: usize) -> RotorSequence {
    let len = rng.random_range(d as usize + 1..=max_len);
    let mut w: Vec<u8> = (0..=d as u8).collect();
    w.extend((w.len()..len).map(|_| rng.random_range(0..=d as u8)));
    w.shuffle(rng);
    RotorSequence::periodic(d, w).unwrap()
}

fn higher_degree_transience() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let (mut transient, mut literal, mut above_one, mut escaping) = (0, 0, 0, 0);
    for i in 0..100u64 {
        let d = 3 + (i % 2) as u32;
        let s = random_nondegenerate(&mut rng, d, 12);
        transient += (classify_uniform_rotation(&s).unwrap().verdict == TreeVerdict::Transient) as usize;
        let bound = rotation_offspring_bound(d);
        literal += (bound == ratio(3 * d as i64 - 2, d as i64 + 1)) as usize;
        above_one += (bound > BigRational::one()) as usize;
        let dist = SupportDistribution::uniform_rotation(&s).unwrap();
        escaping += (monte_carlo(&dist, 1, 100, 100_000, 30, i).unwrap().escaped > 0) as usize;
    }
    let elapsed = start.elapsed();
    outcome(
        transient == 100 && literal == 100 && above_one == 100 && escaping == 100 && within(elapsed, 180),
        format!(
            "Transient {transient}/100, bound = (3d-2)/(d+1) {literal}/100 (implemented (2d-1)/(d+1)), bound > 1 {above_one}/100, escape observed {escaping}/100, {elapsed:.2?}"
        ),
    )
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut failed = Vec::new();
    for _ in 0..300 {
        let d = rng.random_range(1..=4u32);
        let pre: Vec<u8> = (0..rng.random_range(0..4)).map(|_| rng.random_range(0..=d as u8)).collect();
        let mut period: Vec<u8> = (0..rng.random_range(0..6)).map(|_| rng.random_range(0..=d as u8)).collect();
        period.extend(0..=d as u8);
        period.shuffle(&mut rng);
        let s = RotorSequence::new(d, pre, period).unwrap();
        if seq(&s.format(false), d) != s {
            failed.push("round-trip");
        }
        let table = UTable::new(&s).unwrap();
        for i in 1..=d {
            let mut prev = 0;
            for x in 0..40 {
                let u = s.u_value(i, x).unwrap();
                if table.eval(i, x) != u {
                    failed.push("closed form vs scan");
                }
                if u < prev {
                    failed.push("monotone U");
                }
                prev = u;
            }
        }
    }
    for i in 0..60u64 {
        let line = Assignment::homogeneous(balanced_word(&mut rng, 1, 1 + (i % 4) as usize)).unwrap();
        let dist = SupportDistribution::uniform_rotation(&balanced_word(&mut rng, 2, 1 + (i % 3) as usize)).unwrap();
        let tree = Assignment::sampled(dist.clone(), i);
        let mut walk = TreeWalk::new(&tree).unwrap();
        for _ in 0..2_000 {
            walk.step();
            if !walk.record().conservation_holds() {
                failed.push("flow conservation");
                break;
            }
        }
        if monte_carlo(&dist, 1, 8, 5_000, 20, i).unwrap() != monte_carlo(&dist, 1, 8, 5_000, 20, i).unwrap() {
            failed.push("seeded determinism");
        }
        let z = rotorwalk::unary::line_excursions(&line, 3, 1_000_000, 30).unwrap();
        if run_excursions(&line, 3, 1_000_000, 30).unwrap().outcomes != z.outcomes {
            failed.push("simulator vs Z-process");
        }
    }
    failed.dedup();
    let elapsed = start.elapsed();
    outcome(
        failed.is_empty() && within(elapsed, 600),
        format!("round-trip, closed form vs scan, monotone U, conservation, determinism, simulator vs Z: failing {failed:?}, {elapsed:.2?}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "moment matrix reproduction", moment_matrix_reproduction),
        (2, "rotor-router criticality", rotor_router_criticality),
        (3, "parametric eigenvalue formula", parametric_eigenvalue),
        (4, "standard pieces vs spectral", standard_pieces_vs_spectral),
        (5, "shift-conjecture sweep", shift_conjecture_sweep),
        (6, "infinite-excursion bound", infinite_excursion_bound),
        (7, "k* vs simulator", kstar_vs_simulator),
        (8, "two-sided remark", two_sided_remark),
        (9, "T_d transience, d >= 3", higher_degree_transience),
        (10, "property suites", property_suites),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let o = check();
        println!("acceptance {id:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass == EXPECTED_FAIL.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
