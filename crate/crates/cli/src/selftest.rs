//! The shipped fixtures and the checks `selftest` runs on them.

use collapse_core::amalgam::{build_rich, RichConfig, TaskKind};
use collapse_core::codes::{is_pseudo_morley, Catalogue};
use collapse_core::collapse::{check_membership, Membership, MuSpec};
use collapse_core::colored::ColoredStructure;
use collapse_core::pregeometry::parse::parse_ratfunc;
use collapse_core::pregeometry::{rank_with, RankMode};
use collapse_core::ranks::{check_axioms, example_sum_blacks, AxiomStatus};
use collapse_core::{GeometryKind, GeometryPoint, Payload};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cli::CliError;
use crate::config::RunConfig;
use crate::format::{param_text, parse_structure, structure_json, to_pretty, FormatError};
use crate::report::Status;

pub const THREE_PAIRS: &str = include_str!("../fixtures/three_pairs.json");
pub const CORRUPTED: &str = include_str!("../fixtures/corrupted.json");
pub const NEGATIVE_DELTA: &str = include_str!("../fixtures/negative_delta.json");
pub const JACOBIAN_GOLDEN: &str = include_str!("../fixtures/jacobian_golden.json");

#[derive(Deserialize)]
struct Golden {
    cases: Vec<GoldenCase>,
}

#[derive(Deserialize)]
struct GoldenCase {
    functions: Vec<String>,
    rank: usize,
}

/// The golden transcendence degrees: the functions as points of the
/// function field in just enough variables, and the expected rank.
pub fn jacobian_cases() -> Result<Vec<(GeometryKind, Vec<GeometryPoint>, usize)>, FormatError> {
    let golden: Golden = serde_json::from_str(JACOBIAN_GOLDEN).map_err(|e| FormatError {
        source: "jacobian_golden.json".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (i, c) in golden.cases.into_iter().enumerate() {
        let mut points = Vec::new();
        for (j, f) in c.functions.iter().enumerate() {
            let g = parse_ratfunc(f).map_err(|e| FormatError {
                source: "jacobian_golden.json".into(),
                line: 1,
                column: 1,
                message: format!("case {i}: `{f}`: {e}"),
            })?;
            points.push(GeometryPoint::new(format!("f{j}"), Payload::Function(g)));
        }
        let n = points
            .iter()
            .filter_map(|p| p.payload.as_function())
            .map(|f| f.max_var())
            .max()
            .unwrap_or(1)
            .max(1);
        out.push((GeometryKind::AlgebraicFunctionField { n }, points, c.rank));
    }
    Ok(out)
}

/// `count` seeded sets of one to four random rational functions in
/// `t1..t3`.
pub fn random_function_sets(seed: u64, count: usize) -> Vec<Vec<GeometryPoint>> {
    let geom = GeometryKind::AlgebraicFunctionField { n: 3 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=4);
            (0..k)
                .map(|j| {
                    GeometryPoint::new(
                        format!("f{j}"),
                        collapse_core::samples::random_payload(&geom, 3, &mut rng),
                    )
                })
                .collect()
        })
        .collect()
}

struct Checks(Vec<Value>);

impl Checks {
    fn record(&mut self, name: &str, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.0
            .push(json!({ "name": name, "passed": passed, "detail": detail }));
    }
}

fn fixture(name: &str, text: &str) -> Result<ColoredStructure, String> {
    parse_structure(name, text).map_err(|e| e.to_string())
}

fn rules(m: &ColoredStructure) -> Result<(Catalogue, MuSpec), String> {
    let cat = Catalogue::lines(m.p());
    let spec = MuSpec::new(&cat, m.p()).map_err(|e| e.to_string())?;
    Ok((cat, spec))
}

fn three_pairs(budget: u64) -> Result<String, String> {
    let m = fixture("three_pairs.json", THREE_PAIRS)?;
    let (cat, spec) = rules(&m)?;
    match check_membership(&m, &cat, &spec, budget).map_err(|e| e.to_string())? {
        Membership::LongSequence { mu: 2, sequence } if sequence.len() == 3 => Ok(format!(
            "sequence of length 3 over {} exceeds μ = 2",
            param_text(&sequence.parameter)
        )),
        other => Err(format!("expected a sequence of length 3, got {other:?}")),
    }
}

fn corrupted(budget: u64) -> Result<String, String> {
    let m = fixture("corrupted.json", CORRUPTED)?;
    let (cat, spec) = rules(&m)?;
    let r = check_axioms(&m, &cat, &spec, budget).map_err(|e| e.to_string())?;
    if !matches!(r.status(3), Some(AxiomStatus::Fail(_))) {
        return Err(format!("axiom 3 is {:?}", r.status(3)));
    }
    let (mu, seq) = r.long_sequence.as_ref().ok_or("no witness")?;
    let t = cat
        .get(&seq.template)
        .ok_or("witness names an unknown template")?;
    let valid = is_pseudo_morley(t.as_ref(), &seq.parameter, &seq.sequence, &m)
        .map_err(|e| e.to_string())?;
    if !valid || seq.len() as u64 <= *mu {
        return Err(format!(
            "witness {:?} is not a sequence longer than {mu}",
            seq.sequence
        ));
    }
    Ok(format!(
        "axiom 3 fails with {} tuples of {} over {}",
        seq.len(),
        seq.template,
        param_text(&seq.parameter)
    ))
}

fn negative_delta(budget: u64) -> Result<String, String> {
    let m = fixture("negative_delta.json", NEGATIVE_DELTA)?;
    let (cat, spec) = rules(&m)?;
    let r = check_axioms(&m, &cat, &spec, budget).map_err(|e| e.to_string())?;
    let w = r.delta_witness.as_ref().ok_or("no witness")?;
    let d = m.delta(w).map_err(|e| e.to_string())?;
    match r.status(2) {
        Some(AxiomStatus::Fail(_)) if d < 0 => Ok(format!("axiom 2 fails: δ({w}) = {d}")),
        other => Err(format!("axiom 2 is {other:?} with δ({w}) = {d}")),
    }
}

fn sum_blacks(budget: u64) -> Result<String, String> {
    let mut seen = Vec::new();
    for p in [2u32, 3] {
        for geom in [
            GeometryKind::LinearRational,
            GeometryKind::AlgebraicFunctionField { n: 1 },
        ] {
            let r = example_sum_blacks(p, geom, budget).map_err(|e| e.to_string())?;
            let parts: Vec<i64> = r.d_parts.iter().map(|d| d.d).collect();
            if r.d_a.d != p as i64 || parts.iter().any(|&d| d != 1) {
                return Err(format!(
                    "p = {p}, {geom}: d(a) = {}, d(a_i) = {parts:?}",
                    r.d_a.d
                ));
            }
            seen.push(format!("p={p} {}: d(a)={}", geom.name(), r.d_a.d));
        }
    }
    Ok(seen.join("; "))
}

fn golden() -> Result<String, String> {
    let cases = jacobian_cases().map_err(|e| e.to_string())?;
    for (i, (geom, pts, want)) in cases.iter().enumerate() {
        let got = rank_with(pts, geom, RankMode::Symbolic).map_err(|e| e.to_string())?;
        if got != *want {
            return Err(format!("case {i}: rank {got}, expected {want}"));
        }
    }
    Ok(format!("{} cases", cases.len()))
}

fn modes(seed: u64) -> Result<String, String> {
    let geom = GeometryKind::AlgebraicFunctionField { n: 3 };
    let sets = random_function_sets(seed, 50);
    for (i, pts) in sets.iter().enumerate() {
        let a = rank_with(pts, &geom, RankMode::Symbolic).map_err(|e| e.to_string())?;
        let b = rank_with(
            pts,
            &geom,
            RankMode::Probabilistic {
                seed: seed ^ i as u64,
                escalate: false,
            },
        )
        .map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("instance {i}: symbolic {a}, probabilistic {b}"));
        }
    }
    Ok(format!("{} instances agree", sets.len()))
}

fn small_build(budget: u64, seed: u64) -> Result<String, String> {
    let geom = GeometryKind::LinearRational;
    let cat = Catalogue::lines(2);
    let spec = MuSpec::new(&cat, 2).map_err(|e| e.to_string())?;
    let config = RichConfig {
        geometry: geom,
        p: 2,
        tasks: TaskKind::standard(&cat, &geom, 2),
        steps: 12,
        seed,
        budget,
        verify_each_step: false,
        close_out: true,
    };
    let (m, _) = build_rich(&config, &cat, &spec).map_err(|e| e.to_string())?;
    let r = check_axioms(&m, &cat, &spec, budget).map_err(|e| e.to_string())?;
    let exact = [2, 3]
        .iter()
        .all(|&n| r.status(n) == Some(&AxiomStatus::Pass));
    if !exact || !r.passed() {
        let st: Vec<String> = r
            .checks
            .iter()
            .map(|c| format!("{}:{}", c.number, c.status.name()))
            .collect();
        return Err(st.join(" "));
    }
    Ok(format!(
        "{} points, {} parameters checked",
        m.len(),
        r.parameters.len()
    ))
}

fn round_trip() -> Result<String, String> {
    for (name, text) in [
        ("three_pairs.json", THREE_PAIRS),
        ("corrupted.json", CORRUPTED),
        ("negative_delta.json", NEGATIVE_DELTA),
    ] {
        let m = fixture(name, text)?;
        let again = to_pretty(&structure_json(&m));
        let back = fixture(name, &again)?;
        if to_pretty(&structure_json(&back)) != again {
            return Err(format!("{name} does not round-trip"));
        }
    }
    Ok("3 fixtures".into())
}

/// Runs every check. The status is a violation when any check fails.
pub fn run(config: &RunConfig) -> Result<(Status, Value), CliError> {
    let budget = config.budgets.tuple;
    let seed = config.seed.unwrap_or(0);
    let mut c = Checks(Vec::new());
    c.record("fixture-round-trip", round_trip());
    c.record("three-pairs-member", three_pairs(budget));
    c.record("corrupted-fails-axiom-3", corrupted(budget));
    c.record("negative-delta-fails-axiom-2", negative_delta(budget));
    c.record("sum-of-blacks", sum_blacks(budget));
    c.record("jacobian-golden", golden());
    c.record("jacobian-modes", modes(seed));
    c.record("build-rich-axioms", small_build(budget, seed));
    let passed = c.0.iter().all(|v| v["passed"] == json!(true));
    let status = if passed {
        Status::Ok
    } else {
        Status::Violation
    };
    Ok((status, json!({ "passed": passed, "checks": c.0 })))
}
