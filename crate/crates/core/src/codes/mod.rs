//! Code templates: schematic descriptions of good extensions, with a
//! constraint `φ(x̄, b̄)`, a rank `k`, an arity `n` and a recovery map that
//! computes the parameter `b̄` from any `m` independent realizations.
//!
//! Pseudo-Morley sequences are pairwise disjoint all-black realizations over
//! one parameter such that every `m` of them recover that parameter.

mod builtin;
mod catalogue;
mod validate;

pub use builtin::{LinearTemplate, PowerTemplate};
pub use catalogue::{compose, invert, Catalogue, PermutedTemplate};
pub use validate::{validate_template, Check, ValidationReport};

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use rand::RngCore;

use crate::colored::{ColoredStructure, SubsetHandle};
use crate::error::{Error, Result};
use crate::pregeometry::{GeometryKind, Payload, PointId};
use crate::subsets::Combinations;

/// A code parameter `b̄`.
pub type Param = Vec<Payload>;

/// Default number of candidate tuples a brute-force enumerator may examine.
pub const DEFAULT_TUPLE_BUDGET: u64 = 1_000_000;

pub trait CodeTemplate: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;
    /// `n`, the length of a realization.
    fn arity(&self) -> usize;
    /// `k`, the rank of a generic realization over the parameter.
    fn rank(&self) -> usize;
    /// `m`, the number of realizations the recovery map needs.
    fn recovery_arity(&self) -> usize;
    fn param_arity(&self) -> usize;
    fn supports(&self, geom: &GeometryKind) -> bool;

    /// The constraint itself, without the distinctness requirement that
    /// [`realizes`] adds.
    fn constraint(&self, xs: &[Payload], b: &[Payload], geom: &GeometryKind) -> bool;

    /// The parameter determined by `m` realizations.
    fn recover(&self, tuples: &[&[Payload]], geom: &GeometryKind) -> Option<Param>;

    /// A realization over `b` built from `k` generic elements.
    fn build(
        &self,
        b: &[Payload],
        generic: &[Payload],
        geom: &GeometryKind,
    ) -> Option<Vec<Payload>>;

    /// A random parameter, for validation.
    fn sample_parameter(&self, geom: &GeometryKind, rng: &mut dyn RngCore) -> Option<Param>;

    /// Generators of the group of coordinate permutations under which the
    /// template is declared equivalent to itself.
    fn equivalences(&self) -> Vec<Vec<usize>> {
        Vec::new()
    }

    /// All-black realizations in `m`, over `b` when given, otherwise over
    /// any parameter. The default examines ordered tuples of black points.
    fn realizations(
        &self,
        m: &ColoredStructure,
        b: Option<&[Payload]>,
        budget: u64,
    ) -> Result<Enumeration> {
        brute_force(self, m, b, budget)
    }

    /// Name of the catalogue template this one is a permutation of.
    fn base_name(&self) -> &str {
        self.name()
    }

    fn permutation(&self) -> Option<&[usize]> {
        None
    }

    fn is_good_shape(&self, p: u32) -> bool {
        self.arity() == p as usize * self.rank()
    }
}

/// Realizations found by an enumerator, as tuples of point ids.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Enumeration {
    pub tuples: Vec<Vec<PointId>>,
    /// False when the budget ran out before the enumeration finished.
    pub complete: bool,
}

/// `φ(x̄, b̄)` together with the requirement that all `xᵢ` are pairwise
/// distinct and distinct from the components of `b̄`.
pub fn realizes<C: CodeTemplate + ?Sized>(
    c: &C,
    xs: &[Payload],
    b: &[Payload],
    geom: &GeometryKind,
) -> bool {
    if xs.len() != c.arity() || b.len() != c.param_arity() {
        return false;
    }
    for (i, x) in xs.iter().enumerate() {
        if xs[..i].contains(x) || b.contains(x) {
            return false;
        }
    }
    c.constraint(xs, b, geom)
}

pub(crate) fn payloads_of(m: &ColoredStructure, ids: &[PointId]) -> Result<Vec<Payload>> {
    ids.iter()
        .map(|id| {
            m.point(id)
                .map(|pt| pt.payload.clone())
                .ok_or_else(|| Error::UnknownId(id.to_string()))
        })
        .collect()
}

fn brute_force<C: CodeTemplate + ?Sized>(
    c: &C,
    m: &ColoredStructure,
    b: Option<&[Payload]>,
    budget: u64,
) -> Result<Enumeration> {
    let geom = m.geometry();
    if b.is_none() && c.recovery_arity() != 1 {
        return Err(Error::Template {
            name: c.name().into(),
            reason: "enumeration without a parameter needs recovery arity 1".into(),
        });
    }
    let blacks: Vec<PointId> = m.blacks().ids().cloned().collect();
    let n = c.arity();
    let mut out = Enumeration {
        tuples: Vec::new(),
        complete: true,
    };
    let mut used = 0u64;
    for pick in Combinations::new(blacks.len(), n) {
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            used += 1;
            if used > budget {
                out.complete = false;
                return Ok(out);
            }
            let ids: Vec<PointId> = perm.iter().map(|&i| blacks[pick[i]].clone()).collect();
            let xs = payloads_of(m, &ids)?;
            let ok = match b {
                Some(b) => realizes(c, &xs, b, &geom),
                None => c
                    .recover(&[&xs], &geom)
                    .is_some_and(|b| realizes(c, &xs, &b, &geom)),
            };
            if ok {
                out.tuples.push(ids);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    Ok(out)
}

/// Advances to the next permutation in lexicographic order.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Whether `a` is a realization over `b̄` of rank `k` over `base ∪ b̄`.
pub fn is_generic_realization<C: CodeTemplate + ?Sized>(
    c: &C,
    b: &[Payload],
    a: &[PointId],
    base: &SubsetHandle,
    m: &ColoredStructure,
) -> Result<bool> {
    let xs = payloads_of(m, a)?;
    if !realizes(c, &xs, b, &m.geometry()) {
        return Err(Error::Template {
            name: c.name().into(),
            reason: alloc::format!("{a:?} is not a realization over the given parameter"),
        });
    }
    let set: SubsetHandle = a.iter().cloned().collect();
    Ok(m.relative_rank_over(&set, base, b)? == c.rank())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PseudoMorley {
    pub template: alloc::string::String,
    pub parameter: Param,
    pub sequence: Vec<Vec<PointId>>,
    /// The search budget ran out, so longer sequences may exist.
    pub lower_bound: bool,
}

impl PseudoMorley {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

/// Whether `seq` is a pseudo-Morley sequence over `b`: all-black, pairwise
/// disjoint realizations, every `m` of which recover `b`. Sequences shorter
/// than `m` only need the first two properties.
pub fn is_pseudo_morley<C: CodeTemplate + ?Sized>(
    c: &C,
    b: &[Payload],
    seq: &[Vec<PointId>],
    m: &ColoredStructure,
) -> Result<bool> {
    let geom = m.geometry();
    let mut seen = SubsetHandle::new();
    let mut tuples = Vec::with_capacity(seq.len());
    for t in seq {
        for id in t {
            if m.color(id) != Some(crate::colored::Color::Black) {
                m.point(id)
                    .ok_or_else(|| Error::UnknownId(id.to_string()))?;
                return Ok(false);
            }
            if !seen.insert(id.clone()) {
                return Ok(false);
            }
        }
        let xs = payloads_of(m, t)?;
        if !realizes(c, &xs, b, &geom) {
            return Ok(false);
        }
        tuples.push(xs);
    }
    let r = c.recovery_arity();
    if tuples.len() < r {
        return Ok(true);
    }
    for pick in Combinations::new(tuples.len(), r) {
        let chosen: Vec<&[Payload]> = pick.iter().map(|&i| tuples[i].as_slice()).collect();
        if c.recover(&chosen, &geom).as_deref() != Some(b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Realizations over `b` in `m` usable in a pseudo-Morley sequence, sorted,
/// and whether the enumeration finished within `budget`.
pub fn candidates<C: CodeTemplate + ?Sized>(
    c: &C,
    b: &[Payload],
    m: &ColoredStructure,
    budget: u64,
) -> Result<(Vec<Vec<PointId>>, bool)> {
    let geom = m.geometry();
    let found = c.realizations(m, Some(b), budget)?;
    let mut out = Vec::new();
    for t in found.tuples {
        let xs = payloads_of(m, &t)?;
        if !realizes(c, &xs, b, &geom) {
            continue;
        }
        if c.recovery_arity() == 1 && c.recover(&[&xs], &geom).as_deref() != Some(b) {
            continue;
        }
        out.push(t);
    }
    out.sort();
    out.dedup();
    Ok((out, found.complete))
}

/// A longest pseudo-Morley sequence over `b` in `m`.
///
/// The search is exact branch and bound over the enumerated realizations;
/// `budget` bounds both the enumeration and the number of search nodes.
pub fn find_pseudo_morley<C: CodeTemplate + ?Sized>(
    c: &C,
    b: &[Payload],
    m: &ColoredStructure,
    budget: u64,
) -> Result<PseudoMorley> {
    Ok(longest_containing(c, b, m, &[], budget)?.expect("the empty sequence extends"))
}

/// A longest pseudo-Morley sequence over `b` in `m` that contains every
/// tuple of `forced` (listed first). `None` when `forced` itself is not a
/// pseudo-Morley sequence over `b`.
pub fn longest_containing<C: CodeTemplate + ?Sized>(
    c: &C,
    b: &[Payload],
    m: &ColoredStructure,
    forced: &[Vec<PointId>],
    budget: u64,
) -> Result<Option<PseudoMorley>> {
    if !is_pseudo_morley(c, b, forced, m)? {
        return Ok(None);
    }
    let (mut tuples, complete) = candidates(c, b, m, budget)?;
    tuples.retain(|t| !forced.contains(t));
    let mut cands = Vec::with_capacity(forced.len() + tuples.len());
    for t in forced.iter().cloned().chain(tuples) {
        let xs = payloads_of(m, &t)?;
        cands.push((t, xs));
    }
    let geom = m.geometry();
    let mut search = Packing {
        c,
        b,
        geom: &geom,
        cands: &cands,
        best: Vec::new(),
        cur: Vec::new(),
        used: BTreeMap::new(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    for i in 0..forced.len() {
        for id in &cands[i].0 {
            search.used.insert(id, ());
        }
        search.cur.push(i);
    }
    search.run(forced.len());
    let sequence = search.best.iter().map(|&i| cands[i].0.clone()).collect();
    Ok(Some(PseudoMorley {
        template: c.name().into(),
        parameter: b.to_vec(),
        sequence,
        lower_bound: search.exhausted || !complete,
    }))
}

struct Packing<'a, C: CodeTemplate + ?Sized> {
    c: &'a C,
    b: &'a [Payload],
    geom: &'a GeometryKind,
    cands: &'a [(Vec<PointId>, Vec<Payload>)],
    best: Vec<usize>,
    cur: Vec<usize>,
    used: BTreeMap<&'a PointId, ()>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a, C: CodeTemplate + ?Sized> Packing<'a, C> {
    fn fits(&self, i: usize) -> bool {
        if self.cands[i].0.iter().any(|id| self.used.contains_key(id)) {
            return false;
        }
        let r = self.c.recovery_arity();
        if r <= 1 || self.cur.len() + 1 < r {
            return true;
        }
        let new = self.cands[i].1.as_slice();
        for pick in Combinations::new(self.cur.len(), r - 1) {
            let mut chosen: Vec<&[Payload]> = pick
                .iter()
                .map(|&j| self.cands[self.cur[j]].1.as_slice())
                .collect();
            chosen.push(new);
            if self.c.recover(&chosen, self.geom).as_deref() != Some(self.b) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, start: usize) {
        if self.cur.len() > self.best.len() || self.best.is_empty() {
            self.best = self.cur.clone();
        }
        for i in start..self.cands.len() {
            if self.cur.len() + (self.cands.len() - i) <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            if !self.fits(i) {
                continue;
            }
            let cands = self.cands;
            for id in &cands[i].0 {
                self.used.insert(id, ());
            }
            self.cur.push(i);
            self.run(i + 1);
            self.cur.pop();
            for id in &cands[i].0 {
                self.used.remove(id);
            }
            if self.exhausted {
                return;
            }
        }
    }
}

/// The parameters over which `m` holds at least one all-black realization.
/// Templates with recovery arity above one must enumerate them by
/// overriding [`CodeTemplate::realizations`] for `b = None`, returning
/// tuples whose single-tuple recovery is meaningful; otherwise an error is
/// returned.
pub fn parameters_in<C: CodeTemplate + ?Sized>(
    c: &C,
    m: &ColoredStructure,
    budget: u64,
) -> Result<(Vec<Param>, bool)> {
    let (counts, complete) = parameter_counts(c, m, budget)?;
    Ok((counts.into_keys().collect(), complete))
}

/// Like [`parameters_in`], with the number of realizations found over each
/// parameter. No pseudo-Morley sequence over a parameter is longer than its
/// count.
pub fn parameter_counts<C: CodeTemplate + ?Sized>(
    c: &C,
    m: &ColoredStructure,
    budget: u64,
) -> Result<(BTreeMap<Param, usize>, bool)> {
    let geom = m.geometry();
    let found = c.realizations(m, None, budget)?;
    let mut counts = BTreeMap::new();
    for t in &found.tuples {
        let xs = payloads_of(m, t)?;
        if let Some(b) = c.recover(&[&xs], &geom) {
            if realizes(c, &xs, &b, &geom) {
                *counts.entry(b).or_insert(0) += 1;
            }
        }
    }
    Ok((counts, found.complete))
}

/// A longest pseudo-Morley sequence over every parameter that has a
/// realization in `m`, ordered by parameter.
pub fn all_pseudo_morley<C: CodeTemplate + ?Sized>(
    c: &C,
    m: &ColoredStructure,
    budget: u64,
) -> Result<Vec<PseudoMorley>> {
    let (params, complete) = parameters_in(c, m, budget)?;
    let mut out = Vec::with_capacity(params.len());
    for b in params {
        let mut pm = find_pseudo_morley(c, &b, m, budget)?;
        pm.lower_bound |= !complete;
        out.push(pm);
    }
    Ok(out)
}

/// `count` generic elements beyond every coordinate or variable in use.
pub fn fresh_generics(geom: &GeometryKind, extent: usize, count: usize) -> Vec<Payload> {
    (extent..extent + count)
        .map(|d| Payload::unit(geom, d))
        .collect()
}
