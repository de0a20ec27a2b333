//! Seeded construction of finite approximations of a rich structure.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{amalgamate, AmalgamOptions, Subcase};
use crate::arith::{RatFunc, Q};
use crate::codes::{find_pseudo_morley, fresh_generics, Catalogue, CodeTemplate, Param};
use crate::collapse::{check_membership, fresh_ids, MuSpec};
use crate::colored::{Color, ColoredStructure, SubsetHandle};
use crate::error::{Error, Result};
use crate::pregeometry::{payload_rank, GeometryKind, GeometryPoint, Payload, PointId};

/// The kinds of extension a build can schedule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TaskKind {
    /// A white generic point over the closure of up to two points.
    WhiteGeneric,
    /// A black generic point over the closure of up to two points.
    BlackGeneric,
    /// `μ` generic realizations of a good template over a white point (or
    /// over nothing for templates without parameter). With `parameter`
    /// set, that parameter is used every time, adding its components as
    /// white points first when needed.
    GoodRealization {
        template: String,
        parameter: Option<Param>,
    },
    /// A white point algebraic over two points: a small linear combination
    /// in linear geometries, a sum or product in the function field.
    WhiteAlgebraic,
    /// A black point together with a black power of it (`c²`), or with a
    /// scalar multiple (`2c`) in linear geometries.
    PowerPair,
}

impl TaskKind {
    pub fn name(&self) -> String {
        match self {
            TaskKind::WhiteGeneric => "white-generic".into(),
            TaskKind::BlackGeneric => "black-generic".into(),
            TaskKind::GoodRealization {
                template,
                parameter: None,
            } => alloc::format!("good-realization:{template}"),
            TaskKind::GoodRealization {
                template,
                parameter: Some(_),
            } => alloc::format!("good-realization:{template}:fixed"),
            TaskKind::WhiteAlgebraic => "white-algebraic".into(),
            TaskKind::PowerPair => "power-pair".into(),
        }
    }

    /// One task of each kind, with every good template of `cat`
    /// representative for `geom` and `p`.
    pub fn standard(cat: &Catalogue, geom: &GeometryKind, p: u32) -> Vec<TaskKind> {
        let mut out = alloc::vec![TaskKind::WhiteGeneric, TaskKind::BlackGeneric];
        for t in cat
            .representatives()
            .filter(|t| t.supports(geom) && t.is_good_shape(p))
        {
            out.push(TaskKind::GoodRealization {
                template: t.name().into(),
                parameter: None,
            });
        }
        out.push(TaskKind::WhiteAlgebraic);
        out.push(TaskKind::PowerPair);
        out
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A scheduled task, as passed to [`build_rich`].
pub type Task = TaskKind;

#[derive(Clone, Debug)]
pub struct RichConfig {
    pub geometry: GeometryKind,
    pub p: u32,
    pub tasks: Vec<TaskKind>,
    /// Number of scheduled steps.
    pub steps: usize,
    pub seed: u64,
    /// Search budget for every enumeration.
    pub budget: u64,
    /// Run a full membership check after every step.
    pub verify_each_step: bool,
    /// After the scheduled steps, run good-realization tasks over every
    /// white point that is not yet saturated, for each good template among
    /// the tasks. These steps are logged like the others.
    pub close_out: bool,
}

/// One line of the run log.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepRecord {
    pub step: usize,
    pub task: String,
    pub subcases: Vec<Subcase>,
    pub added: usize,
    pub delta_before: i64,
    pub delta_after: i64,
    /// Membership verdict when checked.
    pub membership: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Coverage {
    pub tasks: BTreeMap<String, usize>,
    pub subcases: BTreeMap<&'static str, usize>,
    /// Good-realization tasks whose parameter was already saturated.
    pub saturated_hits: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BuildLog {
    pub records: Vec<StepRecord>,
    pub coverage: Coverage,
}

/// Runs `config.steps` tasks, round-robin over `config.tasks` with the order
/// of each round shuffled by a generator seeded from `config.seed`. Every
/// step amalgamates one task structure over a closed subset of the current
/// structure. The result is deterministic in the configuration.
pub fn build_rich(
    config: &RichConfig,
    cat: &Catalogue,
    spec: &MuSpec,
) -> Result<(ColoredStructure, BuildLog)> {
    let mut m = ColoredStructure::empty(config.geometry, config.p)?;
    let mut log = BuildLog {
        records: Vec::new(),
        coverage: Coverage::default(),
    };
    for s in Subcase::ALL {
        log.coverage.subcases.insert(s.label(), 0);
    }
    if config.steps > 0 && config.tasks.is_empty() {
        return Err(Error::Precondition("no tasks to schedule".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut round: Vec<usize> = Vec::new();
    let opts = AmalgamOptions {
        budget: config.budget,
        check_inputs: false,
    };
    for step in 0..config.steps {
        if round.is_empty() {
            round = (0..config.tasks.len()).collect();
            round.shuffle(&mut rng);
            round.reverse();
        }
        let task = config.tasks[round.pop().expect("refilled")].clone();
        m = run_step(step, &task, m, &mut log, config, cat, spec, &opts, &mut rng)?;
    }
    if config.close_out {
        let mut step = config.steps;
        for task in &config.tasks {
            let TaskKind::GoodRealization {
                template,
                parameter: None,
            } = task
            else {
                continue;
            };
            let t = cat
                .get(template)
                .ok_or_else(|| Error::UnknownTemplate(template.clone()))?
                .clone();
            let mu = spec.mu(t.as_ref())?;
            loop {
                let pending = if t.param_arity() == 0 {
                    ((find_pseudo_morley(t.as_ref(), &[], &m, config.budget)?.len() as u64) < mu)
                        .then(Vec::new)
                } else {
                    white_lengths(t.as_ref(), &m, config.budget)?
                        .into_iter()
                        .find(|(_, l)| *l < mu)
                        .map(|(b, _)| b)
                };
                let Some(b) = pending else { break };
                let task = TaskKind::GoodRealization {
                    template: template.clone(),
                    parameter: Some(b),
                };
                let before = m.len();
                m = run_step(step, &task, m, &mut log, config, cat, spec, &opts, &mut rng)?;
                step += 1;
                if m.len() == before {
                    return Err(Error::Classification(alloc::format!(
                        "close-out for {template} made no progress at step {step}"
                    )));
                }
            }
        }
    }
    Ok((m, log))
}

#[allow(clippy::too_many_arguments)]
fn run_step(
    step: usize,
    task: &TaskKind,
    mut m: ColoredStructure,
    log: &mut BuildLog,
    config: &RichConfig,
    cat: &Catalogue,
    spec: &MuSpec,
    opts: &AmalgamOptions,
    rng: &mut ChaCha8Rng,
) -> Result<ColoredStructure> {
    *log.coverage.tasks.entry(task.name()).or_insert(0) += 1;
    let before = m.delta(&m.all())?;
    let len_before = m.len();
    let mut note = None;
    let mut subcases = Vec::new();
    match prepare(task, &m, cat, spec, config.budget, rng)? {
        Prepared::Direct(next, why) => {
            subcases.push(Subcase::WhiteNew);
            note = Some(why);
            m = next;
        }
        Prepared::Amalgam { a, b, saturated } => {
            if saturated {
                log.coverage.saturated_hits += 1;
            }
            let r = amalgamate(&m, &a, &b, cat, spec, opts)?;
            subcases.extend(r.trace.iter().map(|t| t.subcase));
            m = r.extended;
        }
        Prepared::Skip(why) => note = Some(why),
    }
    for s in &subcases {
        *log.coverage.subcases.entry(s.label()).or_insert(0) += 1;
    }
    let membership = if config.verify_each_step {
        let v = check_membership(&m, cat, spec, config.budget)?;
        if v.is_violation() {
            return Err(Error::Classification(alloc::format!(
                "step {step} ({task}) left the class: {v:?}"
            )));
        }
        Some(String::from(if v.is_member() {
            "member"
        } else {
            "not-refuted"
        }))
    } else {
        None
    };
    log.records.push(StepRecord {
        step,
        task: task.name(),
        subcases,
        added: m.len() - len_before,
        delta_before: before,
        delta_after: m.delta(&m.all())?,
        membership,
        note,
    });
    Ok(m)
}

enum Prepared {
    Amalgam {
        a: ColoredStructure,
        b: SubsetHandle,
        saturated: bool,
    },
    /// White points added directly; always self-sufficient and in the class.
    Direct(ColoredStructure, String),
    Skip(String),
}

/// The closure of at most two random points of `m`.
fn random_base(m: &ColoredStructure, rng: &mut ChaCha8Rng) -> Result<SubsetHandle> {
    let all = m.all();
    let ids: Vec<&PointId> = all.ids().collect();
    let k = rng.gen_range(0..=ids.len().min(2));
    let s: SubsetHandle = ids.choose_multiple(rng, k).map(|&id| id.clone()).collect();
    m.self_sufficient_closure(&s)
}

fn with_points(
    m: &ColoredStructure,
    b: &SubsetHandle,
    pts: Vec<(Payload, Color)>,
    prefix: &str,
) -> Result<ColoredStructure> {
    let base = m.restrict(b)?;
    let ids = fresh_ids(m, prefix, pts.len());
    base.extend(
        ids.into_iter()
            .zip(pts)
            .map(|(id, (x, c))| (GeometryPoint::new(id, x), c))
            .collect(),
    )
}

/// Pseudo-Morley length over each white point of `m`, as a parameter.
fn white_lengths(
    t: &dyn CodeTemplate,
    m: &ColoredStructure,
    budget: u64,
) -> Result<Vec<(Param, u64)>> {
    let mut out = Vec::new();
    for w in m.whites().ids() {
        let b = alloc::vec![m.point(w).expect("listed id").payload.clone()];
        let len = find_pseudo_morley(t, &b, m, budget)?.len() as u64;
        out.push((b, len));
    }
    Ok(out)
}

/// A partially saturated white parameter if there is one, otherwise an
/// unused one; one time in four a random white point, so that saturated
/// parameters are revisited.
fn pick_parameter(
    t: &dyn CodeTemplate,
    m: &ColoredStructure,
    mu: u64,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Param>> {
    let lens = white_lengths(t, m, budget)?;
    if lens.is_empty() {
        return Ok(None);
    }
    if !rng.gen_bool(0.25) {
        if let Some((b, _)) = lens.iter().find(|(_, l)| *l > 0 && *l < mu) {
            return Ok(Some(b.clone()));
        }
        if let Some((b, _)) = lens.iter().find(|(_, l)| *l < mu) {
            return Ok(Some(b.clone()));
        }
    }
    Ok(lens.choose(rng).map(|(b, _)| b.clone()))
}

/// A white point of `m` algebraic over two other points but outside their
/// closure, with that closure.
fn existing_algebraic(
    m: &ColoredStructure,
    rng: &mut ChaCha8Rng,
) -> Result<Option<(SubsetHandle, Payload)>> {
    let mut whites: Vec<PointId> = m.whites().ids().cloned().collect();
    whites.shuffle(rng);
    let ids: Vec<PointId> = m.all().ids().cloned().collect();
    for w in whites.iter().take(8) {
        for (i, x) in ids.iter().enumerate() {
            for y in &ids[i + 1..] {
                if x == w || y == w {
                    continue;
                }
                let pair = SubsetHandle::from_ids([x.clone(), y.clone()]);
                let mut with = pair.clone();
                with.insert(w.clone());
                if m.rank(&with)? != m.rank(&pair)? {
                    continue;
                }
                let b = m.self_sufficient_closure(&pair)?;
                if !b.contains(w) {
                    return Ok(Some((b, m.point(w).expect("listed id").payload.clone())));
                }
            }
        }
    }
    Ok(None)
}

fn generic(m: &ColoredStructure, count: usize) -> Vec<Payload> {
    fresh_generics(&m.geometry(), m.extent(), count)
}

fn prepare(
    task: &TaskKind,
    m: &ColoredStructure,
    cat: &Catalogue,
    spec: &MuSpec,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Prepared> {
    let geom = m.geometry();
    match task {
        TaskKind::WhiteGeneric | TaskKind::BlackGeneric => {
            let color = if *task == TaskKind::WhiteGeneric {
                Color::White
            } else {
                Color::Black
            };
            let b = random_base(m, rng)?;
            let x = generic(m, 1).pop().expect("one generic");
            let a = with_points(
                m,
                &b,
                alloc::vec![(x, color)],
                if color.is_black() { "k" } else { "w" },
            )?;
            Ok(Prepared::Amalgam {
                a,
                b,
                saturated: false,
            })
        }
        TaskKind::WhiteAlgebraic => {
            let all = m.all();
            let ids: Vec<&PointId> = all.ids().collect();
            if ids.len() < 2 {
                return Ok(Prepared::Skip("fewer than two points".into()));
            }
            // half of the time reuse a white point already algebraic over a
            // pair outside its closure, so the image exists in `m`
            if rng.gen_bool(0.5) {
                if let Some((b, z)) = existing_algebraic(m, rng)? {
                    let a = with_points(m, &b, alloc::vec![(z, Color::White)], "w")?;
                    return Ok(Prepared::Amalgam {
                        a,
                        b,
                        saturated: false,
                    });
                }
            }
            let pick: Vec<PointId> = ids.choose_multiple(rng, 2).map(|&id| id.clone()).collect();
            let x = &m.point(&pick[0]).expect("listed id").payload;
            let y = &m.point(&pick[1]).expect("listed id").payload;
            let z = if geom.is_linear() {
                let c1 = Q::from_integer(rng.gen_range(1..=2i64).into());
                let c2 = Q::from_integer(rng.gen_range(1..=2i64).into());
                Payload::lin_comb(&[(c1, x), (c2, y)], &geom)
            } else {
                let (f, g) = (
                    x.as_function().expect("function"),
                    y.as_function().expect("function"),
                );
                let h: RatFunc = if rng.gen_bool(0.5) {
                    f.mul(g)
                } else {
                    f.add(g)
                };
                Some(Payload::Function(h))
            };
            let Some(z) = z.filter(|z| payload_rank(&geom, core::iter::once(z)) == 1) else {
                return Ok(Prepared::Skip("combination is a constant".into()));
            };
            let b = m.self_sufficient_closure(&pick.iter().cloned().collect())?;
            if m.find_payload(&z).is_some_and(|other| b.contains(other)) {
                return Ok(Prepared::Skip(
                    "combination already lies in the base".into(),
                ));
            }
            let a = with_points(m, &b, alloc::vec![(z, Color::White)], "w")?;
            Ok(Prepared::Amalgam {
                a,
                b,
                saturated: false,
            })
        }
        TaskKind::PowerPair => {
            let c = generic(m, 1).pop().expect("one generic");
            let d = if geom.is_linear() {
                Payload::lin_comb(&[(Q::from_integer(2.into()), &c)], &geom).expect("linear")
            } else {
                Payload::Function(c.as_function().expect("function").pow(2).expect("nonzero"))
            };
            let a = with_points(
                m,
                &SubsetHandle::new(),
                alloc::vec![(c, Color::Black), (d, Color::Black)],
                "k",
            )?;
            Ok(Prepared::Amalgam {
                a,
                b: SubsetHandle::new(),
                saturated: false,
            })
        }
        TaskKind::GoodRealization {
            template,
            parameter,
        } => {
            let t = cat
                .get(template)
                .ok_or_else(|| Error::UnknownTemplate(template.clone()))?;
            if !t.supports(&geom) || !t.is_good_shape(m.p()) {
                return Err(Error::Template {
                    name: template.clone(),
                    reason: alloc::format!("not a good template for {geom} and p = {}", m.p()),
                });
            }
            let mu = spec.mu(t.as_ref())?;
            let param: Param = match parameter {
                Some(b) => {
                    let missing: Vec<Payload> = b
                        .iter()
                        .filter(|x| m.find_payload(x).is_none())
                        .cloned()
                        .collect();
                    if !missing.is_empty() {
                        let ids = fresh_ids(m, "w", missing.len());
                        let pts = ids
                            .into_iter()
                            .zip(missing)
                            .map(|(id, x)| (GeometryPoint::new(id, x), Color::White))
                            .collect();
                        return Ok(Prepared::Direct(
                            m.extend(pts)?,
                            "parameter added as white points".into(),
                        ));
                    }
                    b.clone()
                }
                None if t.param_arity() == 0 => Vec::new(),
                None if t.param_arity() == 1 => {
                    match pick_parameter(t.as_ref(), m, mu, budget, rng)? {
                        Some(b) => b,
                        None => {
                            return Ok(Prepared::Skip("no white point to use as parameter".into()))
                        }
                    }
                }
                None => {
                    return Ok(Prepared::Skip(alloc::format!(
                        "parameters of arity {} are only used when given",
                        t.param_arity()
                    )))
                }
            };
            let mut base = SubsetHandle::new();
            for x in &param {
                match m.find_payload(x) {
                    Some(id) if m.color(id) == Some(Color::White) => {
                        base.insert(id.clone());
                    }
                    _ => {
                        return Err(Error::Precondition(alloc::format!(
                            "parameter component {x} is not a white point"
                        )))
                    }
                }
            }
            let b = m.self_sufficient_closure(&base)?;
            let have = find_pseudo_morley(t.as_ref(), &param, m, budget)?.len() as u64;
            let k = t.rank();
            let mut extent = param
                .iter()
                .map(Payload::extent)
                .fold(m.extent(), usize::max);
            let mut pts = Vec::new();
            for _ in 0..mu {
                let gen = fresh_generics(&geom, extent, k);
                extent += k;
                let xs = t
                    .build(&param, &gen, &geom.widened(extent))
                    .ok_or_else(|| Error::Template {
                        name: template.clone(),
                        reason: "build failed on generic elements".into(),
                    })?;
                pts.extend(xs.into_iter().map(|x| (x, Color::Black)));
            }
            let a = with_points(m, &b, pts, "k")?;
            Ok(Prepared::Amalgam {
                a,
                b,
                saturated: have >= mu,
            })
        }
    }
}
