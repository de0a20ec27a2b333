//! The d-rank, type comparison through closures, the decidable axiom
//! checks, and the sum-of-blacks example.
//!
//! `d(ā/C) = δ(cl(Cā)) − δ(cl(C))`. In the collapsed theory this equals the
//! Morley rank, so reports label it [`RANK_LABEL`]; the Morley rank itself
//! is never computed.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::amalgam::{amalgamate, AmalgamOptions, Embedding};
use crate::arith::{RatFunc, Q};
use crate::codes::{Catalogue, CodeTemplate, Param, PseudoMorley};
use crate::collapse::{check_sequences, checked_templates, generic_extension, Membership, MuSpec};
use crate::colored::{Color, ColoredStructure, SubsetHandle};
use crate::error::{Error, Result};
use crate::pregeometry::{GeometryKind, GeometryPoint, Payload, PointId};

pub const RANK_LABEL: &str = "d-rank (= Morley rank in the collapsed theory)";

/// Largest closure [`same_type`] will match.
pub const MATCH_LIMIT: usize = 16;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankReport {
    pub tuple: Vec<PointId>,
    pub base: SubsetHandle,
    pub closure_of_base: SubsetHandle,
    pub closure_of_union: SubsetHandle,
    pub d: i64,
}

/// `d(ā/C)`, with both closures.
pub fn d_rank(tuple: &[PointId], c: &SubsetHandle, m: &ColoredStructure) -> Result<RankReport> {
    let t = m.handle(tuple.iter().cloned())?;
    m.handle(c.ids().cloned())?;
    let cb = m.self_sufficient_closure(c)?;
    let cu = m.self_sufficient_closure(&c.union(&t))?;
    let d = m.delta(&cu)? - m.delta(&cb)?;
    Ok(RankReport {
        tuple: tuple.to_vec(),
        base: c.clone(),
        closure_of_base: cb,
        closure_of_union: cu,
        d,
    })
}

/// `n_α!·μ(α)`, a bound on the number of conjugates of a realization.
/// Informational only.
pub fn conjugate_bound(c: &dyn CodeTemplate, spec: &MuSpec) -> Result<u64> {
    let fact = (1..=c.arity() as u64).try_fold(1u64, |acc, k| acc.checked_mul(k));
    fact.and_then(|f| f.checked_mul(spec.mu(c).ok()?))
        .ok_or_else(|| Error::Capacity(alloc::format!("conjugate bound of {} overflows", c.name())))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TypeVerdict {
    /// A color- and rank-preserving bijection of the closures sending `ā`
    /// to `b̄`.
    Same(Embedding),
    Different(String),
    Undecided(String),
}

impl TypeVerdict {
    pub fn is_same(&self) -> bool {
        matches!(self, TypeVerdict::Same(_))
    }
}

/// Whether `ā` in `m` and `b̄` in `n` have the same type: there is a
/// bijection `cl(ā) → cl(b̄)` extending `ā ↦ b̄` that preserves colors and
/// the rank of every subset. Backtracking over `budget` nodes.
pub fn same_type(
    a: &[PointId],
    m: &ColoredStructure,
    b: &[PointId],
    n: &ColoredStructure,
    budget: u64,
) -> Result<TypeVerdict> {
    let ha = m.handle(a.iter().cloned())?;
    let hb = n.handle(b.iter().cloned())?;
    if a.len() != b.len() {
        return Ok(TypeVerdict::Different(
            "tuples have different lengths".into(),
        ));
    }
    if m.p() != n.p() {
        return Ok(TypeVerdict::Different("p differs".into()));
    }
    // the forced part of the map must be a well defined bijection
    let mut forced: BTreeMap<&PointId, &PointId> = BTreeMap::new();
    let mut back: BTreeMap<&PointId, &PointId> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        if *forced.entry(x).or_insert(y) != y || *back.entry(y).or_insert(x) != x {
            return Ok(TypeVerdict::Different(
                "equalities among the tuples differ".into(),
            ));
        }
    }
    let ca = m.self_sufficient_closure(&ha)?;
    let cb = n.self_sufficient_closure(&hb)?;
    if ca.len() != cb.len() {
        return Ok(TypeVerdict::Different(alloc::format!(
            "closures have {} and {} points",
            ca.len(),
            cb.len()
        )));
    }
    if ca.len() > MATCH_LIMIT {
        return Ok(TypeVerdict::Undecided(alloc::format!(
            "closures have {} points, above {MATCH_LIMIT}",
            ca.len()
        )));
    }
    // order: the forced points first, in tuple order
    let mut xs: Vec<PointId> = Vec::new();
    for x in a {
        if !xs.contains(x) {
            xs.push(x.clone());
        }
    }
    let nf = xs.len();
    xs.extend(ca.difference(&ha).ids().cloned());
    let ys_all: Vec<PointId> = cb.ids().cloned().collect();
    let xi = xs
        .iter()
        .map(|x| m.index_of(x))
        .collect::<Result<Vec<_>>>()?;
    let yi = ys_all
        .iter()
        .map(|y| n.index_of(y))
        .collect::<Result<Vec<_>>>()?;
    let rx = m.rows().rank_table(&xi);
    let ry = n.rows().rank_table(&yi);
    let cx: Vec<Color> = xs.iter().map(|x| m.color(x).expect("closure id")).collect();
    let cy: Vec<Color> = ys_all
        .iter()
        .map(|y| n.color(y).expect("closure id"))
        .collect();
    let mut s = Matcher {
        rx: &rx,
        ry: &ry,
        cx: &cx,
        cy: &cy,
        image: Vec::new(),
        used: alloc::vec![false; yi.len()],
        nodes: 0,
        budget,
    };
    for x in &xs[..nf] {
        let y = forced[x];
        let j = ys_all
            .iter()
            .position(|z| z == y)
            .expect("b̄ lies in its closure");
        if !s.push(j) {
            return Ok(TypeVerdict::Different(alloc::format!(
                "`{x}` ↦ `{y}` breaks colors or ranks"
            )));
        }
    }
    match s.search() {
        Some(true) => Ok(TypeVerdict::Same(
            xs.iter()
                .zip(&s.image)
                .map(|(x, &j)| (x.clone(), ys_all[j].clone()))
                .collect(),
        )),
        Some(false) => Ok(TypeVerdict::Different(
            "no color- and rank-preserving bijection of the closures".into(),
        )),
        None => Ok(TypeVerdict::Undecided(alloc::format!(
            "matching budget of {budget} exhausted"
        ))),
    }
}

struct Matcher<'a> {
    rx: &'a [u32],
    ry: &'a [u32],
    cx: &'a [Color],
    cy: &'a [Color],
    /// `image[i]` is the position in the target of the `i`-th source point.
    image: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl Matcher<'_> {
    /// Maps the next source point to target `j` if colors and the ranks of
    /// all subsets containing it agree.
    fn push(&mut self, j: usize) -> bool {
        let i = self.image.len();
        if self.used[j] || self.cx[i] != self.cy[j] {
            return false;
        }
        self.image.push(j);
        for sub in 0..(1usize << i) {
            let mx = sub | (1 << i);
            let my = (0..=i)
                .filter(|&k| mx >> k & 1 == 1)
                .fold(0usize, |acc, k| acc | 1 << self.image[k]);
            if self.rx[mx] != self.ry[my] {
                self.image.pop();
                return false;
            }
        }
        self.used[j] = true;
        true
    }

    fn pop(&mut self) {
        let j = self.image.pop().expect("nonempty");
        self.used[j] = false;
    }

    fn search(&mut self) -> Option<bool> {
        if self.image.len() == self.cx.len() {
            return Some(true);
        }
        for j in 0..self.cy.len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            if self.push(j) {
                match self.search() {
                    Some(false) => self.pop(),
                    r => return r,
                }
            }
        }
        Some(false)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AxiomStatus {
    Pass,
    Fail(String),
    /// Nothing to check.
    Vacuous,
    /// Some search ran out of budget before a failure was found.
    Incomplete(String),
    /// Not decidable on a finite structure in this setting.
    OutOfScope,
}

impl AxiomStatus {
    pub fn name(&self) -> &'static str {
        match self {
            AxiomStatus::Pass => "pass",
            AxiomStatus::Fail(_) => "fail",
            AxiomStatus::Vacuous => "vacuous",
            AxiomStatus::Incomplete(_) => "incomplete",
            AxiomStatus::OutOfScope => "out-of-scope",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, AxiomStatus::Fail(_))
    }
}

/// Which half of the dichotomy holds over a parameter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Clause {
    /// `M` holds a sequence of length `μ(α)`.
    A,
    /// The generic extension overflows some `β`.
    B,
    /// Neither, so the generic extension is in the class and the
    /// structure does not yet realize it.
    Neither,
    /// Neither was found and some search ran out of budget.
    Undecided,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::A => "a",
            Clause::B => "b",
            Clause::Neither => "neither",
            Clause::Undecided => "undecided",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParameterCheck {
    pub template: String,
    pub parameter: Param,
    pub clause: Clause,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomCheck {
    pub number: u8,
    pub name: &'static str,
    pub status: AxiomStatus,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    /// A set of negative δ, if `∅` is not self-sufficient.
    pub delta_witness: Option<SubsetHandle>,
    /// A sequence longer than `μ`, with that `μ`.
    pub long_sequence: Option<(u64, PseudoMorley)>,
    pub parameters: Vec<ParameterCheck>,
}

impl AxiomReport {
    pub fn status(&self, number: u8) -> Option<&AxiomStatus> {
        self.checks
            .iter()
            .find(|c| c.number == number)
            .map(|c| &c.status)
    }

    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|c| c.status.is_failure())
    }
}

/// The parameters over which the dichotomy axiom is checked: tuples of
/// white points of `m` (or the empty parameter). At most `budget` tuples.
fn point_parameters(c: &dyn CodeTemplate, m: &ColoredStructure, budget: u64) -> (Vec<Param>, bool) {
    let whites: Vec<Payload> = m
        .whites()
        .ids()
        .map(|id| m.point(id).expect("listed id").payload.clone())
        .collect();
    let mut out: Vec<Param> = alloc::vec![Vec::new()];
    for _ in 0..c.param_arity() {
        let mut next = Vec::new();
        for prefix in &out {
            for w in &whites {
                if prefix.contains(w) {
                    continue;
                }
                if next.len() as u64 >= budget {
                    return (next, false);
                }
                let mut b = prefix.clone();
                b.push(w.clone());
                next.push(b);
            }
        }
        out = next;
    }
    (out, true)
}

/// Axioms (2) and (3) exactly; axiom (5) over every parameter made of
/// white points, by building the generic extension and evaluating both
/// clauses. Axioms (1) and (4) are out of scope.
pub fn check_axioms(
    m: &ColoredStructure,
    cat: &Catalogue,
    spec: &MuSpec,
    budget: u64,
) -> Result<AxiomReport> {
    let delta_witness = m.negative_delta_witness()?;
    let ss = match &delta_witness {
        None => AxiomStatus::Pass,
        Some(w) => AxiomStatus::Fail(alloc::format!("δ({w}) = {}", m.delta(w)?)),
    };
    let mut long_sequence = None;
    let seq = match check_sequences(m, cat, spec, budget)? {
        Membership::LongSequence { mu, sequence } => {
            let msg = alloc::format!(
                "{} has a sequence of length {} > μ = {mu}",
                sequence.template,
                sequence.len()
            );
            long_sequence = Some((mu, sequence));
            AxiomStatus::Fail(msg)
        }
        Membership::NotRefuted { reason } => AxiomStatus::Incomplete(reason),
        _ => AxiomStatus::Pass,
    };
    let mut parameters = Vec::new();
    let mut first_failure = None;
    let mut incomplete = None;
    for t in checked_templates(cat, m) {
        let (params, complete) = point_parameters(t.as_ref(), m, budget);
        if !complete {
            incomplete
                .get_or_insert_with(|| alloc::format!("too many parameters for {}", t.name()));
        }
        for b in params {
            let g = match generic_extension(m, t.as_ref(), &b, cat, spec, "g", budget) {
                Ok(g) => g,
                // not a parameter of this template
                Err(Error::Template { .. }) => continue,
                Err(e) => return Err(e),
            };
            let clause = if g.clause_a.is_some() {
                Clause::A
            } else if g.clause_b.is_some() {
                Clause::B
            } else if g.incomplete {
                Clause::Undecided
            } else {
                Clause::Neither
            };
            match clause {
                Clause::Neither => {
                    first_failure.get_or_insert_with(|| {
                        let parts: Vec<String> = b.iter().map(|x| alloc::format!("{x}")).collect();
                        alloc::format!(
                            "over [{}] for {} the generic extension stays in the class",
                            parts.join(", "),
                            t.name()
                        )
                    });
                }
                Clause::Undecided => {
                    incomplete.get_or_insert_with(|| {
                        alloc::format!("search for {} ran out of budget", t.name())
                    });
                }
                _ => {}
            }
            parameters.push(ParameterCheck {
                template: t.name().into(),
                parameter: b,
                clause,
            });
        }
    }
    let dichotomy = match (first_failure, incomplete) {
        (Some(f), _) => AxiomStatus::Fail(f),
        (None, Some(r)) => AxiomStatus::Incomplete(r),
        (None, None) if parameters.is_empty() => AxiomStatus::Vacuous,
        (None, None) => AxiomStatus::Pass,
    };
    Ok(AxiomReport {
        checks: alloc::vec![
            AxiomCheck {
                number: 1,
                name: "integral domain",
                status: AxiomStatus::OutOfScope,
            },
            AxiomCheck {
                number: 2,
                name: "empty set is self-sufficient",
                status: ss,
            },
            AxiomCheck {
                number: 3,
                name: "pseudo-Morley sequences have length at most μ",
                status: seq,
            },
            AxiomCheck {
                number: 4,
                name: "algebraically closed",
                status: AxiomStatus::OutOfScope,
            },
            AxiomCheck {
                number: 5,
                name: "dichotomy over every parameter",
                status: dichotomy,
            },
        ],
        delta_witness,
        long_sequence,
        parameters,
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SumBlacksReport {
    pub p: u32,
    pub structure: ColoredStructure,
    /// The white sum.
    pub a: PointId,
    /// The blocks `A_i`, generator first.
    pub blocks: Vec<Vec<PointId>>,
    pub d_a: RankReport,
    /// `d(a_i)` for the generator of each block.
    pub d_parts: Vec<RankReport>,
    /// `δ(A_i)`.
    pub delta_blocks: Vec<i64>,
}

/// `p` independent black points `a_1 … a_p`, each with its block
/// `A_i = {a_i^r : 1 ≤ r ≤ p−1}` painted black (`{r·a_i}` in linear
/// geometries), and the white sum `a = a_1 + … + a_p`, embedded into the
/// empty structure with [`amalgamate`].
pub fn example_sum_blacks(p: u32, geom: GeometryKind, budget: u64) -> Result<SumBlacksReport> {
    let geom = geom.widened(p as usize);
    let cat = if geom.is_linear() {
        Catalogue::lines(p)
    } else {
        Catalogue::powers(p)
    };
    let spec = MuSpec::new(&cat, p)?;
    let mut pts = Vec::new();
    let mut blocks = Vec::new();
    let mut gens = Vec::new();
    for i in 0..p as usize {
        let g = Payload::unit(&geom, i);
        let mut block = Vec::new();
        for r in 1..p {
            let x = match &g {
                Payload::Function(f) => Payload::Function(f.pow(r as i64).expect("nonzero")),
                _ => Payload::lin_comb(&[(Q::from_integer((r as i64).into()), &g)], &geom)
                    .expect("linear"),
            };
            let id = PointId::new(alloc::format!("a{}_{r}", i + 1));
            pts.push((GeometryPoint::new(id.clone(), x), Color::Black));
            block.push(id);
        }
        gens.push(g);
        blocks.push(block);
    }
    let sum = match geom {
        GeometryKind::AlgebraicFunctionField { .. } => {
            let mut s = RatFunc::zero();
            for g in &gens {
                s = s.add(g.as_function().expect("function"));
            }
            Payload::Function(s)
        }
        _ => {
            let terms: Vec<(Q, &Payload)> = gens
                .iter()
                .map(|g| (Q::from_integer(1.into()), g))
                .collect();
            Payload::lin_comb(&terms, &geom).expect("linear")
        }
    };
    let a_id = PointId::new("a");
    pts.push((GeometryPoint::new(a_id.clone(), sum), Color::White));
    let a = ColoredStructure::new(geom, p, pts)?;
    let empty = ColoredStructure::empty(geom, p)?;
    let opts = AmalgamOptions {
        budget,
        check_inputs: true,
    };
    let r = amalgamate(&empty, &a, &SubsetHandle::new(), &cat, &spec, &opts)?;
    let s = r.extended;
    let img = |id: &PointId| r.embedding[id].clone();
    let none = SubsetHandle::new();
    let a_img = img(&a_id);
    let blocks: Vec<Vec<PointId>> = blocks.iter().map(|b| b.iter().map(img).collect()).collect();
    let d_a = d_rank(core::slice::from_ref(&a_img), &none, &s)?;
    let d_parts = blocks
        .iter()
        .map(|b| d_rank(&b[..1], &none, &s))
        .collect::<Result<Vec<_>>>()?;
    let delta_blocks = blocks
        .iter()
        .map(|b| s.delta(&SubsetHandle::from_ids(b.iter().cloned())))
        .collect::<Result<Vec<_>>>()?;
    Ok(SumBlacksReport {
        p,
        structure: s,
        a: a_img,
        blocks,
        d_a,
        d_parts,
        delta_blocks,
    })
}

#[cfg(test)]
mod tests;
