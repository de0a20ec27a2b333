//! Argument parsing and the commands.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use collapse_core::amalgam::{amalgamate, build_rich, AmalgamOptions, BuildLog, RichConfig};
use collapse_core::codes::{
    find_pseudo_morley, parameter_counts, validate_template, Catalogue, Param,
};
use collapse_core::collapse::{
    check_extension, check_membership, checked_templates, ExtensionVerdict, Membership, MuSpec,
};
use collapse_core::colored::{ColoredStructure, SubsetHandle, Sufficiency};
use collapse_core::extensions::{classify_minimal, decompose_minimal, ExtensionReport};
use collapse_core::ranks::{
    check_axioms, conjugate_bound, d_rank, example_sum_blacks, same_type, AxiomStatus, RankReport,
    TypeVerdict, RANK_LABEL,
};
use collapse_core::{GeometryKind, PointId};
use serde_json::{json, Map, Value};

use crate::config::{read_file, sha256_hex, ConfigError, RunConfig, CONFIG_ENV};
use crate::format::{
    param_json, parse_geometry_flag, parse_schedule, parse_structure, structure_json, to_pretty,
    FormatError, GeometrySpec, Schedule, TaskSpec,
};
use crate::report::{ids_json, sequence_json, set_json, tuples_json, Report, Status};

#[derive(Parser, Debug)]
#[command(
    name = "collapse",
    version,
    about = "Predimension calculus and collapsed amalgamation on finite colored structures"
)]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Catalogue file, overriding the configuration.
    #[arg(long, global = true)]
    pub catalogue: Option<PathBuf>,
    /// Seed for randomized commands, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tuple budget of code enumerations, overriding the configuration.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct StructureArg {
    /// Structure file (JSON).
    #[arg(long)]
    pub structure: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct Generate {
    /// Characteristic exponent, overriding the configuration.
    #[arg(long)]
    pub p: Option<u32>,
    /// `linear-rational`, `linear-finite-field:q` or
    /// `algebraic-function-field:n`, overriding the configuration.
    #[arg(long, value_parser = parse_geometry_flag)]
    pub geometry: Option<GeometryKind>,
    /// Also write the resulting structure to this file.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// δ of a subset, optionally relative to another, and whether the
    /// subset is self-sufficient.
    Delta {
        #[command(flatten)]
        s: StructureArg,
        /// Comma-separated ids (default: every point).
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        over: Option<Vec<String>>,
    },
    /// The self-sufficient closure of a subset.
    Closure {
        #[command(flatten)]
        s: StructureArg,
        #[arg(long, value_delimiter = ',', default_value = "")]
        subset: Vec<String>,
    },
    /// Splits `base ≤ top` into minimal extensions and classifies each.
    Decompose {
        #[command(flatten)]
        s: StructureArg,
        #[arg(long, value_delimiter = ',', default_value = "")]
        base: Vec<String>,
        /// Default: every point.
        #[arg(long, value_delimiter = ',')]
        top: Option<Vec<String>>,
    },
    /// Classifies the minimal extension `base ≤ top`.
    Classify {
        #[command(flatten)]
        s: StructureArg,
        #[arg(long, value_delimiter = ',', default_value = "")]
        base: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        top: Option<Vec<String>>,
    },
    /// Membership in the collapsed class.
    Member {
        #[command(flatten)]
        s: StructureArg,
    },
    /// Whether the minimal extension of `base` to the whole structure stays
    /// in the class.
    ExtendCheck {
        #[command(flatten)]
        s: StructureArg,
        #[arg(long, value_delimiter = ',', default_value = "")]
        base: Vec<String>,
    },
    /// Longest pseudo-Morley sequences of a template.
    PmSearch {
        #[command(flatten)]
        s: StructureArg,
        #[arg(long)]
        template: String,
        /// Ids of the parameter points (default: every parameter realized).
        #[arg(long, value_delimiter = ',')]
        parameter: Option<Vec<String>>,
    },
    /// Amalgamates `--with` over `--base` into `--structure`.
    Amalgamate {
        #[command(flatten)]
        s: StructureArg,
        /// The structure `A` to embed.
        #[arg(long = "with")]
        other: PathBuf,
        /// Ids of the common substructure `B`.
        #[arg(long, value_delimiter = ',', default_value = "")]
        base: Vec<String>,
        /// Also write the amalgam to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Seeded finite approximation of a rich structure.
    BuildRich {
        #[command(flatten)]
        g: Generate,
        /// Build schedule (JSON); default: the standard tasks.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        /// Saturate every white parameter after the scheduled steps.
        #[arg(long)]
        close_out: bool,
        /// Check membership after every step.
        #[arg(long)]
        verify_each_step: bool,
    },
    /// d-rank of a tuple over a base, optionally compared in type with a
    /// tuple of another structure.
    Rank {
        #[command(flatten)]
        s: StructureArg,
        #[arg(long, value_delimiter = ',')]
        tuple: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "")]
        over: Vec<String>,
        /// Structure holding the tuple to compare with.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', requires = "compare")]
        compare_tuple: Option<Vec<String>>,
    },
    /// The decidable axiom checks.
    Axioms {
        #[command(flatten)]
        s: StructureArg,
    },
    /// The white sum of p black points and its ranks.
    ExampleSumBlacks {
        #[command(flatten)]
        g: Generate,
    },
    /// Samples every catalogue template against the code axioms.
    ValidateCodes {
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, value_parser = parse_geometry_flag)]
        geometry: Option<GeometryKind>,
        #[arg(long)]
        p: Option<u32>,
    },
    /// Runs the shipped fixtures and golden values.
    Selftest,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Format(FormatError),
    Core(collapse_core::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Format(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Format(f) => CliError::Format(f),
            e => CliError::Config(e),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e)
    }
}

impl From<collapse_core::Error> for CliError {
    fn from(e: collapse_core::Error) -> Self {
        CliError::Core(e)
    }
}

type Res<T> = Result<T, CliError>;

/// The resolved configuration and the inputs read so far.
pub struct Ctx {
    pub config: RunConfig,
    inputs: Vec<(String, Value)>,
}

impl Ctx {
    pub fn new(cli: &Cli) -> Res<Ctx> {
        let mut config = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(c) = &cli.catalogue {
            config.catalogue = Some(c.clone());
        }
        if cli.seed.is_some() {
            config.seed = cli.seed;
        }
        if let Some(b) = cli.budget {
            config.budgets.tuple = b;
        }
        Ok(Ctx {
            config,
            inputs: Vec::new(),
        })
    }

    fn record(&mut self, name: &str, path: &Path, text: &str) {
        self.inputs.push((
            name.into(),
            json!({ "path": path.display().to_string(), "sha256": sha256_hex(text.as_bytes()) }),
        ));
    }

    fn structure(&mut self, name: &str, path: &Path) -> Res<ColoredStructure> {
        let text = read_file(path)?;
        self.record(name, path, &text);
        Ok(parse_structure(&path.display().to_string(), &text)?)
    }

    fn rules(&mut self, p: u32, geom: &GeometryKind) -> Res<(Catalogue, MuSpec)> {
        let (cat, text) = self.config.catalogue(p, geom)?;
        if let (Some(text), Some(path)) = (text, self.config.catalogue.clone()) {
            if !self.inputs.iter().any(|(n, _)| n == "catalogue") {
                self.record("catalogue", &path, &text);
            }
        }
        let spec = self.config.mu_spec(&cat, p)?;
        Ok((cat, spec))
    }

    fn report(self, command: &str, status: Status, result: Value) -> Report {
        Report {
            command: command.into(),
            status,
            config: self.config,
            inputs: self.inputs,
            result,
        }
    }

    /// `p` and geometry for generating commands, flags first.
    fn generation(&mut self, g: &Generate) -> (u32, GeometryKind) {
        if let Some(p) = g.p {
            self.config.p = p;
        }
        if let Some(geom) = g.geometry {
            self.config.geometry = GeometrySpec::from(geom);
        }
        (self.config.p, self.config.geometry())
    }
}

fn handle(m: &ColoredStructure, ids: &[String]) -> Res<SubsetHandle> {
    Ok(m.handle(ids.iter().filter(|s| !s.is_empty()).map(String::as_str))?)
}

fn tuple(m: &ColoredStructure, ids: &[String]) -> Res<Vec<PointId>> {
    let t: Vec<PointId> = ids
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| PointId::new(s.as_str()))
        .collect();
    m.handle(t.iter().cloned())?;
    Ok(t)
}

fn write_structure(path: &Path, m: &ColoredStructure) -> Res<()> {
    std::fs::write(path, to_pretty(&structure_json(m)))
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn extension_json(r: &ExtensionReport) -> Value {
    let ineq: Vec<Value> = r
        .inequalities
        .iter()
        .map(|c| json!({ "s": set_json(&c.s), "lhs": c.lhs, "rhs": c.rhs, "holds": c.holds() }))
        .collect();
    json!({
        "case": r.case.name(),
        "delta": r.delta,
        "new_points": ids_json(&r.new_points),
        "good": r.is_good,
        "inequalities": ineq,
    })
}

pub fn membership_json(v: &Membership) -> (Status, Value) {
    match v {
        Membership::Member => (Status::Ok, json!({ "verdict": "member" })),
        Membership::NegativeDelta { witness } => (
            Status::Violation,
            json!({ "verdict": "negative-delta", "witness": set_json(witness) }),
        ),
        Membership::LongSequence { mu, sequence } => (
            Status::Violation,
            json!({ "verdict": "long-sequence", "mu": mu, "witness": sequence_json(sequence) }),
        ),
        Membership::NotRefuted { reason } => (
            Status::Undecided,
            json!({ "verdict": "not-refuted", "reason": reason }),
        ),
    }
}

pub fn verdict_json(v: &ExtensionVerdict) -> (Status, Value) {
    let status = if v.fails() {
        Status::Violation
    } else if v.in_class() {
        Status::Ok
    } else {
        Status::Undecided
    };
    let mut out = json!({ "verdict": v.label() });
    let extra = match v {
        ExtensionVerdict::FailsA {
            template,
            parameter,
            realization,
            sequence,
            enumerates_new,
        } => json!({
            "template": template,
            "parameter": param_json(parameter),
            "realization": ids_json(realization),
            "sequence": tuples_json(sequence),
            "enumerates_new": enumerates_new,
        }),
        ExtensionVerdict::FailsB {
            template,
            parameter,
            sequence,
            new_tuples,
        } => json!({
            "template": template,
            "parameter": param_json(parameter),
            "sequence": tuples_json(sequence),
            "new_tuples": new_tuples,
        }),
        ExtensionVerdict::NotRefuted { reason } => json!({ "reason": reason }),
        _ => json!({}),
    };
    merge(&mut out, extra);
    (status, out)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn rank_json(r: &RankReport) -> Value {
    json!({
        "tuple": ids_json(&r.tuple),
        "over": set_json(&r.base),
        "closure_of_base": set_json(&r.closure_of_base),
        "closure_of_union": set_json(&r.closure_of_union),
        "d": r.d,
    })
}

pub fn axioms_json(r: &collapse_core::ranks::AxiomReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            let detail = match &c.status {
                AxiomStatus::Fail(d) | AxiomStatus::Incomplete(d) => Value::String(d.clone()),
                _ => Value::Null,
            };
            json!({ "number": c.number, "name": c.name, "status": c.status.name(), "detail": detail })
        })
        .collect();
    let params: Vec<Value> = r
        .parameters
        .iter()
        .map(|c| json!({ "template": c.template, "parameter": param_json(&c.parameter), "clause": c.clause.name() }))
        .collect();
    json!({
        "passed": r.passed(),
        "checks": checks,
        "delta_witness": r.delta_witness.as_ref().map(set_json),
        "long_sequence": r.long_sequence.as_ref().map(|(mu, s)| json!({ "mu": mu, "sequence": sequence_json(s) })),
        "parameters": params,
    })
}

pub fn build_log_json(log: &BuildLog) -> Value {
    let records: Vec<Value> = log
        .records
        .iter()
        .map(|r| {
            let subcases: Vec<&str> = r.subcases.iter().map(|s| s.label()).collect();
            json!({
                "step": r.step,
                "task": r.task,
                "subcases": subcases,
                "added": r.added,
                "delta_before": r.delta_before,
                "delta_after": r.delta_after,
                "membership": r.membership,
                "note": r.note,
            })
        })
        .collect();
    json!({
        "coverage": {
            "tasks": log.coverage.tasks,
            "subcases": log.coverage.subcases,
            "saturated_hits": log.coverage.saturated_hits,
        },
        "records": records,
    })
}

/// Points per color examined by [`singleton_ranks`].
pub const SINGLETON_SAMPLE: usize = 24;

/// `d` of the points whose singleton is self-sufficient and of rank 1,
/// grouped by color: `{"white": {"examined": e, "count": k, "d": [..]}, …}`
/// with the distinct values. At most [`SINGLETON_SAMPLE`] points per color
/// are examined, evenly spread in insertion order.
pub fn singleton_ranks(m: &ColoredStructure) -> Res<Value> {
    let base = m.self_sufficient_closure(&SubsetHandle::new())?;
    let d_base = m.delta(&base)?;
    let mut out = Map::new();
    for (name, set) in [("white", m.whites()), ("black", m.blacks())] {
        let ids: Vec<&PointId> = m
            .points()
            .map(|(pt, _)| &pt.id)
            .filter(|id| set.contains(id))
            .collect();
        let step = ids.len().div_ceil(SINGLETON_SAMPLE).max(1);
        let mut examined = 0;
        let mut count = 0;
        let mut values = std::collections::BTreeSet::new();
        for id in ids.into_iter().step_by(step) {
            examined += 1;
            let one = SubsetHandle::from_ids([id.clone()]);
            if m.rank(&one)? != 1 {
                continue;
            }
            let cl = m.self_sufficient_closure(&one.union(&base))?;
            if cl != one.union(&base) {
                continue;
            }
            count += 1;
            values.insert(m.delta(&cl)? - d_base);
        }
        out.insert(
            name.into(),
            json!({ "examined": examined, "count": count, "d": values }),
        );
    }
    Ok(Value::Object(out))
}

fn sufficiency_json(s: &Sufficiency) -> Value {
    match s {
        Sufficiency::Holds => json!({ "verdict": "holds" }),
        Sufficiency::Fails { witness } => {
            json!({ "verdict": "fails", "witness": set_json(witness) })
        }
        Sufficiency::Unverified { searched_up_to } => {
            json!({ "verdict": "unverified", "searched_up_to": searched_up_to })
        }
    }
}

/// Runs a command, returning its report.
pub fn execute(cli: &Cli) -> Res<Report> {
    let mut ctx = Ctx::new(cli)?;
    ctx.config.validate()?;
    let budget = ctx.config.budgets.tuple;
    match &cli.command {
        Command::Delta { s, subset, over } => {
            let m = ctx.structure("structure", &s.structure)?;
            let a = match subset {
                Some(ids) => handle(&m, ids)?,
                None => m.all(),
            };
            let mut result = json!({
                "subset": set_json(&a),
                "rank": m.rank(&a)?,
                "blacks": a.intersection(&m.blacks()).len(),
                "delta": m.delta(&a)?,
                "self_sufficient": sufficiency_json(&m.check_self_sufficient(&a, &m.all(), &ctx.config.search())?),
            });
            if let Some(ids) = over {
                let b = handle(&m, ids)?;
                merge(
                    &mut result,
                    json!({ "over": set_json(&b), "relative_delta": m.delta_rel(&a, &b)? }),
                );
            }
            Ok(ctx.report("delta", Status::Ok, result))
        }
        Command::Closure { s, subset } => {
            let m = ctx.structure("structure", &s.structure)?;
            let a = handle(&m, subset)?;
            let t = m.closure_trace(&a, &m.all(), &ctx.config.search())?;
            let steps: Vec<Value> = t.steps.iter().map(set_json).collect();
            let result = json!({
                "subset": set_json(&a),
                "closure": set_json(&t.closure),
                "delta_subset": m.delta(&a)?,
                "delta_closure": m.delta(&t.closure)?,
                "steps": steps,
            });
            Ok(ctx.report("closure", Status::Ok, result))
        }
        Command::Decompose { s, base, top } => {
            let m = ctx.structure("structure", &s.structure)?;
            let b = handle(&m, base)?;
            let a = match top {
                Some(ids) => handle(&m, ids)?,
                None => m.all(),
            };
            let chain = decompose_minimal(&b, &a, &m)?;
            let mut steps = Vec::new();
            for w in chain.windows(2) {
                let r = classify_minimal(&w[0], &w[1], &m)?;
                steps.push(extension_json(&r));
            }
            let result = json!({ "base": set_json(&b), "top": set_json(&a), "steps": steps });
            Ok(ctx.report("decompose", Status::Ok, result))
        }
        Command::Classify { s, base, top } => {
            let m = ctx.structure("structure", &s.structure)?;
            let b = handle(&m, base)?;
            let a = match top {
                Some(ids) => handle(&m, ids)?,
                None => m.all(),
            };
            let r = classify_minimal(&b, &a, &m)?;
            Ok(ctx.report("classify", Status::Ok, extension_json(&r)))
        }
        Command::Member { s } => {
            let m = ctx.structure("structure", &s.structure)?;
            let (cat, spec) = ctx.rules(m.p(), &m.geometry())?;
            let (status, result) = membership_json(&check_membership(&m, &cat, &spec, budget)?);
            Ok(ctx.report("member", status, result))
        }
        Command::ExtendCheck { s, base } => {
            let m = ctx.structure("structure", &s.structure)?;
            let b = handle(&m, base)?;
            let (cat, spec) = ctx.rules(m.p(), &m.geometry())?;
            let (status, mut result) = verdict_json(&check_extension(&m, &b, &cat, &spec, budget)?);
            merge(&mut result, json!({ "base": set_json(&b) }));
            Ok(ctx.report("extend-check", status, result))
        }
        Command::PmSearch {
            s,
            template,
            parameter,
        } => {
            let m = ctx.structure("structure", &s.structure)?;
            let (cat, spec) = ctx.rules(m.p(), &m.geometry())?;
            let t = cat
                .get(template)
                .ok_or_else(|| {
                    CliError::Core(collapse_core::Error::UnknownTemplate(template.clone()))
                })?
                .clone();
            let mu = spec.mu(t.as_ref())?;
            let params: Vec<Param> = match parameter {
                Some(ids) => {
                    let ids = tuple(&m, ids)?;
                    vec![ids
                        .iter()
                        .map(|id| m.point(id).expect("checked").payload.clone())
                        .collect()]
                }
                None => parameter_counts(t.as_ref(), &m, budget)?
                    .0
                    .into_keys()
                    .collect(),
            };
            let mut found = Vec::new();
            let mut longest = 0;
            for b in &params {
                let pm = find_pseudo_morley(t.as_ref(), b, &m, budget)?;
                longest = longest.max(pm.len());
                found.push(sequence_json(&pm));
            }
            let result =
                json!({ "template": template, "mu": mu, "longest": longest, "sequences": found });
            Ok(ctx.report("pm-search", Status::Ok, result))
        }
        Command::Amalgamate {
            s,
            other,
            base,
            emit,
        } => {
            let m = ctx.structure("structure", &s.structure)?;
            let a = ctx.structure("with", other)?;
            let b = handle(&a, base)?;
            let (cat, spec) = ctx.rules(m.p(), &m.geometry())?;
            let opts = AmalgamOptions {
                budget,
                check_inputs: true,
            };
            let r = amalgamate(&m, &a, &b, &cat, &spec, &opts)?;
            if let Some(path) = emit {
                write_structure(path, &r.extended)?;
            }
            let embedding: Map<String, Value> = r
                .embedding
                .iter()
                .map(|(k, v)| (k.as_str().to_string(), Value::String(v.as_str().into())))
                .collect();
            let trace: Vec<Value> = r
                .trace
                .iter()
                .map(|t| {
                    json!({
                        "subcase": t.subcase.label(),
                        "new_points": ids_json(&t.new_points),
                        "images": ids_json(&t.images),
                        "verdict": t.verdict,
                        "code": t.code.as_ref().map(|(n, b)| json!({ "template": n, "parameter": param_json(b) })),
                    })
                })
                .collect();
            let result = json!({
                "mode": r.mode.name(),
                "embedding": embedding,
                "trace": trace,
                "structure": structure_json(&r.extended),
            });
            Ok(ctx.report("amalgamate", Status::Ok, result))
        }
        Command::BuildRich {
            g,
            schedule,
            steps,
            close_out,
            verify_each_step,
        } => {
            let seed = ctx.config.require_seed("build-rich")?;
            let (p, geom) = ctx.generation(g);
            let schedule = match schedule {
                Some(path) => {
                    let text = read_file(path)?;
                    ctx.record("schedule", path, &text);
                    parse_schedule(&path.display().to_string(), &text)?
                }
                None => Schedule {
                    steps: None,
                    tasks: vec![TaskSpec::Standard],
                    verify_each_step: false,
                    close_out: false,
                },
            };
            let (cat, spec) = ctx.rules(p, &geom)?;
            let tasks = schedule.resolve(&cat, &geom, p).map_err(CliError::Usage)?;
            let config = RichConfig {
                geometry: geom,
                p,
                tasks,
                steps: steps.or(schedule.steps).unwrap_or(50),
                seed,
                budget,
                verify_each_step: *verify_each_step || schedule.verify_each_step,
                close_out: *close_out || schedule.close_out,
            };
            let (m, log) = build_rich(&config, &cat, &spec)?;
            if let Some(path) = &g.emit {
                write_structure(path, &m)?;
            }
            let result = json!({
                "points": m.len(),
                "singletons": singleton_ranks(&m)?,
                "log": build_log_json(&log),
                "structure": structure_json(&m),
            });
            Ok(ctx.report("build-rich", Status::Ok, result))
        }
        Command::Rank {
            s,
            tuple: ids,
            over,
            compare,
            compare_tuple,
        } => {
            let m = ctx.structure("structure", &s.structure)?;
            let t = tuple(&m, ids)?;
            let c = handle(&m, over)?;
            let mut result = json!({ "label": RANK_LABEL });
            merge(&mut result, rank_json(&d_rank(&t, &c, &m)?));
            // informational only, never checked
            let (cat, spec) = ctx.rules(m.p(), &m.geometry())?;
            let mut bounds = Map::new();
            for t in checked_templates(&cat, &m) {
                bounds.insert(t.name().into(), json!(conjugate_bound(t.as_ref(), &spec)?));
            }
            merge(&mut result, json!({ "conjugate_bounds": bounds }));
            if let Some(path) = compare {
                let n = ctx.structure("compare", path)?;
                let u = tuple(&n, compare_tuple.as_deref().unwrap_or(&[]))?;
                let verdict = match same_type(&t, &m, &u, &n, ctx.config.budgets.matching)? {
                    TypeVerdict::Same(map) => {
                        let map: Map<String, Value> = map
                            .iter()
                            .map(|(k, v)| {
                                (k.as_str().to_string(), Value::String(v.as_str().into()))
                            })
                            .collect();
                        json!({ "verdict": "same", "bijection": map })
                    }
                    TypeVerdict::Different(why) => json!({ "verdict": "different", "reason": why }),
                    TypeVerdict::Undecided(why) => json!({ "verdict": "undecided", "reason": why }),
                };
                merge(&mut result, json!({ "type": verdict }));
            }
            Ok(ctx.report("rank", Status::Ok, result))
        }
        Command::Axioms { s } => {
            let m = ctx.structure("structure", &s.structure)?;
            let (cat, spec) = ctx.rules(m.p(), &m.geometry())?;
            let r = check_axioms(&m, &cat, &spec, budget)?;
            let incomplete = r
                .checks
                .iter()
                .any(|c| matches!(c.status, AxiomStatus::Incomplete(_)));
            let status = match (r.passed(), incomplete) {
                (false, _) => Status::Violation,
                (true, true) => Status::Undecided,
                (true, false) => Status::Ok,
            };
            Ok(ctx.report("axioms", status, axioms_json(&r)))
        }
        Command::ExampleSumBlacks { g } => {
            let (p, geom) = ctx.generation(g);
            let r = example_sum_blacks(p, geom, budget)?;
            if let Some(path) = &g.emit {
                write_structure(path, &r.structure)?;
            }
            let parts: Vec<Value> = r.d_parts.iter().map(rank_json).collect();
            let blocks: Vec<Value> = r.blocks.iter().map(ids_json).collect();
            let matches = r.d_a.d == p as i64 && r.d_parts.iter().all(|d| d.d == 1);
            let result = json!({
                "p": p,
                "geometry": r.structure.geometry().to_string(),
                "label": RANK_LABEL,
                "a": r.a.as_str(),
                "blocks": blocks,
                "d_a": rank_json(&r.d_a),
                "d_parts": parts,
                "delta_blocks": r.delta_blocks,
                "expected": { "d_a": p, "d_parts": 1 },
                "matches": matches,
                "structure": structure_json(&r.structure),
            });
            let status = if matches {
                Status::Ok
            } else {
                Status::Violation
            };
            Ok(ctx.report("example-sum-blacks", status, result))
        }
        Command::ValidateCodes {
            samples,
            geometry,
            p,
        } => {
            let seed = ctx.config.require_seed("validate-codes")?;
            let (p, geom) = ctx.generation(&Generate {
                p: *p,
                geometry: *geometry,
                emit: None,
            });
            let (cat, _) = ctx.rules(p, &geom)?;
            let base = ColoredStructure::empty(geom, p)?;
            let mut reports = Vec::new();
            let mut skipped = Vec::new();
            let mut passed = true;
            for t in cat.representatives() {
                if !t.supports(&geom) {
                    skipped.push(t.name().to_string());
                    continue;
                }
                let r = validate_template(t.as_ref(), &base, *samples, seed)?;
                passed &= r.passed();
                let checks: Vec<Value> = r
                    .checks
                    .iter()
                    .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                    .collect();
                reports.push(
                    json!({ "template": r.template, "passed": r.passed(), "checks": checks }),
                );
            }
            let result = json!({ "templates": reports, "skipped": skipped });
            let status = if passed {
                Status::Ok
            } else {
                Status::Violation
            };
            Ok(ctx.report("validate-codes", status, result))
        }
        Command::Selftest => {
            let (status, result) = crate::selftest::run(&ctx.config)?;
            Ok(ctx.report("selftest", status, result))
        }
    }
}

/// Parses `args`, runs the command and writes the report. Returns the exit
/// code: 0 success, 1 violation, 2 error or undecided.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = to_pretty(&report.to_json());
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            if report.status != Status::Ok {
                eprintln!("{}: {}", report.command, report.status.name());
            }
            report.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
