//! The collapse bound `μ` and membership in the class of structures with
//! nonnegative `δ` and no pseudo-Morley sequence longer than `μ`.
//!
//! Code parameters are located by recovery from realizations; a parameter
//! counts as lying over `M` when `M` holds realizations recovering it.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::codes::{
    find_pseudo_morley, longest_containing, parameter_counts, parameters_in, Catalogue,
    CodeTemplate, Param, PseudoMorley,
};
use crate::colored::{Color, ColoredStructure, SubsetHandle};
use crate::error::{Error, Result};
use crate::extensions::is_minimal;
use crate::pregeometry::{GeometryPoint, PointId};
use crate::subsets::Combinations;

/// A replacement for the leading term `((p−1)(n−1)+1)·m` of `μ`.
pub type LeadingTerm = Arc<dyn Fn(&dyn CodeTemplate, u32) -> u64 + Send + Sync>;

/// `((p−1)(n−1)+1)·m`.
pub fn standard_leading(c: &dyn CodeTemplate, p: u32) -> u64 {
    let n = c.arity() as u64;
    let m = c.recovery_arity() as u64;
    ((p as u64 - 1) * (n.saturating_sub(1)) + 1) * m
}

/// `μ*` for every template of a catalogue, keyed by base template name, and
/// the leading term.
#[derive(Clone)]
pub struct MuSpec {
    p: u32,
    mu_star: BTreeMap<String, u64>,
    leading: Option<LeadingTerm>,
}

impl fmt::Debug for MuSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MuSpec")
            .field("p", &self.p)
            .field("mu_star", &self.mu_star)
            .field("custom_leading", &self.leading.is_some())
            .finish()
    }
}

impl MuSpec {
    /// `μ*(α) = m_α − 1` for every template of `cat`.
    pub fn new(cat: &Catalogue, p: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidP(p));
        }
        let mut mu_star = BTreeMap::new();
        for t in cat.iter() {
            let v = t.recovery_arity().saturating_sub(1) as u64;
            let prev = mu_star.insert(String::from(t.base_name()), v);
            if prev.is_some_and(|q| q != v) {
                return Err(Error::InvalidMu(alloc::format!(
                    "permutations of `{}` disagree on the recovery arity",
                    t.base_name()
                )));
            }
        }
        Ok(MuSpec {
            p,
            mu_star,
            leading: None,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Sets `μ*` for a base template and, with it, every permuted copy.
    pub fn with_mu_star(mut self, cat: &Catalogue, name: &str, value: u64) -> Result<Self> {
        let t = cat
            .iter()
            .find(|t| t.base_name() == name)
            .ok_or_else(|| Error::UnknownTemplate(name.into()))?;
        let floor = t.recovery_arity().saturating_sub(1) as u64;
        if value < floor {
            return Err(Error::InvalidMu(alloc::format!(
                "μ*({name}) = {value} is below m − 1 = {floor}"
            )));
        }
        self.mu_star.insert(name.into(), value);
        Ok(self)
    }

    /// Replaces the leading term. It must be at least the standard one and
    /// agree on every template and its permuted copies in `cat`.
    pub fn with_leading(mut self, cat: &Catalogue, f: LeadingTerm) -> Result<Self> {
        for t in cat.iter() {
            let v = f(t.as_ref(), self.p);
            let floor = standard_leading(t.as_ref(), self.p);
            if v < floor {
                return Err(Error::InvalidMu(alloc::format!(
                    "leading term {v} for `{}` is below {floor}",
                    t.name()
                )));
            }
            if let Some(base) = cat.get(t.base_name()) {
                let vb = f(base.as_ref(), self.p);
                if vb != v {
                    return Err(Error::InvalidMu(alloc::format!(
                        "leading term differs on `{}` ({v}) and `{}` ({vb})",
                        t.name(),
                        base.name()
                    )));
                }
            }
        }
        self.leading = Some(f);
        Ok(self)
    }

    pub fn mu_star(&self, c: &dyn CodeTemplate) -> Result<u64> {
        self.mu_star
            .get(c.base_name())
            .copied()
            .ok_or_else(|| Error::UnknownTemplate(c.name().into()))
    }

    pub fn mu(&self, c: &dyn CodeTemplate) -> Result<u64> {
        let star = self.mu_star(c)?;
        let lead = match &self.leading {
            Some(f) => f(c, self.p),
            None => standard_leading(c, self.p),
        };
        Ok(lead + star)
    }

    /// The `μ*` table, by base template name.
    pub fn table(&self) -> &BTreeMap<String, u64> {
        &self.mu_star
    }
}

pub fn mu(c: &dyn CodeTemplate, spec: &MuSpec) -> Result<u64> {
    spec.mu(c)
}

/// The good templates of `cat` that need checking: a permuted copy is
/// skipped when its base template is itself checked, since permuting
/// coordinates maps pseudo-Morley sequences to pseudo-Morley sequences of
/// the same length and `μ` is permutation invariant.
pub fn checked_templates<'a>(
    cat: &'a Catalogue,
    m: &ColoredStructure,
) -> Vec<&'a Arc<dyn CodeTemplate>> {
    let geom = m.geometry();
    let good: Vec<&Arc<dyn CodeTemplate>> = cat.good(m.p(), &geom).collect();
    good.iter()
        .filter(|t| {
            t.permutation().is_none()
                || !good
                    .iter()
                    .any(|g| g.permutation().is_none() && g.name() == t.base_name())
        })
        .copied()
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Membership {
    Member,
    NegativeDelta {
        witness: SubsetHandle,
    },
    LongSequence {
        mu: u64,
        sequence: PseudoMorley,
    },
    /// No violation found, but some search ran out of budget.
    NotRefuted {
        reason: String,
    },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }

    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            Membership::NegativeDelta { .. } | Membership::LongSequence { .. }
        )
    }
}

/// Decides membership: `δ ≥ 0` on every subset, and no good template of
/// `cat` has a pseudo-Morley sequence longer than `μ`.
pub fn check_membership(
    m: &ColoredStructure,
    cat: &Catalogue,
    spec: &MuSpec,
    budget: u64,
) -> Result<Membership> {
    check_p(m, spec)?;
    if let Some(witness) = m.negative_delta_witness()? {
        return Ok(Membership::NegativeDelta { witness });
    }
    check_sequences(m, cat, spec, budget)
}

/// The sequence half of [`check_membership`]: no good template of `cat` has
/// a pseudo-Morley sequence longer than `μ`. Never returns
/// [`Membership::NegativeDelta`].
pub fn check_sequences(
    m: &ColoredStructure,
    cat: &Catalogue,
    spec: &MuSpec,
    budget: u64,
) -> Result<Membership> {
    check_p(m, spec)?;
    let mut incomplete = None;
    for t in checked_templates(cat, m) {
        let mu = spec.mu(t.as_ref())?;
        let (counts, complete) = parameter_counts(t.as_ref(), m, budget)?;
        if !complete {
            incomplete.get_or_insert_with(|| {
                alloc::format!("enumeration of `{}` ran out of budget", t.name())
            });
        }
        for (b, n) in counts {
            if n as u64 <= mu {
                continue;
            }
            let pm = find_pseudo_morley(t.as_ref(), &b, m, budget)?;
            if pm.len() as u64 > mu {
                return Ok(Membership::LongSequence { mu, sequence: pm });
            }
            if pm.lower_bound {
                incomplete.get_or_insert_with(|| {
                    alloc::format!("pseudo-Morley search for `{}` ran out of budget", t.name())
                });
            }
        }
    }
    Ok(match incomplete {
        Some(reason) => Membership::NotRefuted { reason },
        None => Membership::Member,
    })
}

fn check_p(m: &ColoredStructure, spec: &MuSpec) -> Result<()> {
    if m.p() != spec.p() {
        return Err(Error::InvalidMu(alloc::format!(
            "specification is for p = {} but the structure has p = {}",
            spec.p(),
            m.p()
        )));
    }
    Ok(())
}

/// Why an extension fails, or why it stays in the class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtensionVerdict {
    /// The extension adds a white point.
    NewWhitePoint,
    /// Neither failure condition holds.
    InClass,
    /// A realization `realization` over `parameter` lies in `M′∖M` while `M`
    /// already holds a sequence of length `μ` over `parameter`.
    FailsA {
        template: String,
        parameter: Param,
        realization: Vec<PointId>,
        sequence: Vec<Vec<PointId>>,
        /// Whether the realization enumerates all of `M′∖M`.
        enumerates_new: bool,
    },
    /// A sequence of length `μ + 1` in `M′` with more than `μ*` tuples
    /// inside `M′∖M`.
    FailsB {
        template: String,
        parameter: Param,
        sequence: Vec<Vec<PointId>>,
        new_tuples: usize,
    },
    NotRefuted {
        reason: String,
    },
}

impl ExtensionVerdict {
    pub fn in_class(&self) -> bool {
        matches!(
            self,
            ExtensionVerdict::NewWhitePoint | ExtensionVerdict::InClass
        )
    }

    pub fn fails(&self) -> bool {
        matches!(
            self,
            ExtensionVerdict::FailsA { .. } | ExtensionVerdict::FailsB { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExtensionVerdict::NewWhitePoint => "in-class (new white point)",
            ExtensionVerdict::InClass => "in-class",
            ExtensionVerdict::FailsA { .. } => "fails-a",
            ExtensionVerdict::FailsB { .. } => "fails-b",
            ExtensionVerdict::NotRefuted { .. } => "not-refuted",
        }
    }
}

/// Decides whether the minimal extension `M ≤ M′` stays in the class, given
/// that `M` is in it. `m` is the handle of `M` inside `mp`.
pub fn check_extension(
    mp: &ColoredStructure,
    m: &SubsetHandle,
    cat: &Catalogue,
    spec: &MuSpec,
    budget: u64,
) -> Result<ExtensionVerdict> {
    extension_verdict(mp, m, cat, spec, budget, true)
}

/// [`check_extension`], optionally trusting that `M` is in the class.
pub(crate) fn extension_verdict(
    mp: &ColoredStructure,
    m: &SubsetHandle,
    cat: &Catalogue,
    spec: &MuSpec,
    budget: u64,
    verify_base: bool,
) -> Result<ExtensionVerdict> {
    check_p(mp, spec)?;
    let all = mp.all();
    if !is_minimal(m, &all, mp)? {
        return Err(Error::Precondition(alloc::format!(
            "{m} ≤ M′ is not a minimal extension"
        )));
    }
    let base = mp.restrict(m)?;
    if verify_base {
        match check_membership(&base, cat, spec, budget)? {
            Membership::Member | Membership::NotRefuted { .. } => {}
            v => {
                return Err(Error::Precondition(alloc::format!(
                    "M is not in the class: {v:?}"
                )));
            }
        }
    }
    let new = all.difference(m);
    if new.ids().any(|id| mp.color(id) == Some(Color::White)) {
        return Ok(ExtensionVerdict::NewWhitePoint);
    }
    let templates = checked_templates(cat, mp);
    let mut incomplete = None;
    let fresh = mp.restrict(&new)?;
    let mut found_b = None;
    for t in &templates {
        let (params, complete) = parameters_in(t.as_ref(), &fresh, budget)?;
        if !complete {
            incomplete.get_or_insert_with(|| {
                alloc::format!("enumeration of `{}` ran out of budget", t.name())
            });
        }
        let mu = spec.mu(t.as_ref())?;
        for b in &params {
            let pm = find_pseudo_morley(t.as_ref(), b, &base, budget)?;
            if pm.len() as u64 >= mu {
                let realization = realization_in(t.as_ref(), b, &fresh, budget)?
                    .expect("parameter was recovered from a realization here");
                let enumerates_new = realization.len() == new.len();
                return Ok(ExtensionVerdict::FailsA {
                    template: t.name().into(),
                    parameter: b.clone(),
                    realization,
                    sequence: pm.sequence[..mu as usize].to_vec(),
                    enumerates_new,
                });
            }
            if pm.lower_bound {
                incomplete.get_or_insert_with(|| {
                    alloc::format!("search for `{}` ran out of budget", t.name())
                });
            }
            if found_b.is_none() {
                match overflow(t.as_ref(), b, mp, &new, spec, budget)? {
                    Overflow::Found(v) => found_b = Some(v),
                    Overflow::Incomplete(r) => {
                        incomplete.get_or_insert(r);
                    }
                    Overflow::None => {}
                }
            }
        }
    }
    if let Some(v) = found_b {
        return Ok(v);
    }
    Ok(match incomplete {
        Some(reason) => ExtensionVerdict::NotRefuted { reason },
        None => ExtensionVerdict::InClass,
    })
}

fn realization_in(
    c: &dyn CodeTemplate,
    b: &[crate::pregeometry::Payload],
    m: &ColoredStructure,
    budget: u64,
) -> Result<Option<Vec<PointId>>> {
    let (cands, _) = crate::codes::candidates(c, b, m, budget)?;
    Ok(cands.into_iter().next())
}

enum Overflow {
    None,
    Found(ExtensionVerdict),
    Incomplete(String),
}

/// Looks for a sequence over `b` in `mp` of length `μ + 1` with at least
/// `μ* + 1` tuples inside `new`. It suffices to force exactly `μ* + 1` of
/// them and extend maximally.
fn overflow(
    c: &dyn CodeTemplate,
    b: &[crate::pregeometry::Payload],
    mp: &ColoredStructure,
    new: &SubsetHandle,
    spec: &MuSpec,
    budget: u64,
) -> Result<Overflow> {
    let mu = spec.mu(c)?;
    let need = spec.mu_star(c)? as usize + 1;
    let (cands, complete) = crate::codes::candidates(c, b, mp, budget)?;
    let inside: Vec<Vec<PointId>> = cands
        .into_iter()
        .filter(|t| t.iter().all(|id| new.contains(id)))
        .collect();
    let mut lower = !complete;
    let mut tried = 0u64;
    for pick in Combinations::new(inside.len(), need) {
        tried += 1;
        if tried > budget {
            lower = true;
            break;
        }
        let forced: Vec<Vec<PointId>> = pick.iter().map(|&i| inside[i].clone()).collect();
        let Some(pm) = longest_containing(c, b, mp, &forced, budget)? else {
            continue;
        };
        lower |= pm.lower_bound;
        if pm.len() as u64 > mu {
            let new_tuples = pm
                .sequence
                .iter()
                .filter(|t| t.iter().all(|id| new.contains(id)))
                .count();
            return Ok(Overflow::Found(ExtensionVerdict::FailsB {
                template: c.name().into(),
                parameter: b.to_vec(),
                sequence: pm.sequence,
                new_tuples,
            }));
        }
    }
    Ok(if lower {
        Overflow::Incomplete(alloc::format!(
            "overflow search for `{}` ran out of budget",
            c.name()
        ))
    } else {
        Overflow::None
    })
}

/// The extension of `M` by a black realization of `α` over `b̄`, generic
/// over `M` and `b̄`, with the two failure conditions evaluated directly:
/// a) `M` holds a sequence of length `μ(α)` over `b̄`; b) some template `β`
/// with `(μ*(β)+1)·n_β ≤ n_α` has a sequence of length `μ(β)+1` in the
/// extension with more than `μ*(β)` tuples among the new points.
#[derive(Clone, Debug)]
pub struct GenericExtension {
    pub extended: ColoredStructure,
    pub new_points: Vec<PointId>,
    pub clause_a: Option<PseudoMorley>,
    pub clause_b: Option<ExtensionVerdict>,
    /// Some search ran out of budget; absent clauses are then unverified.
    pub incomplete: bool,
}

impl GenericExtension {
    pub fn in_class(&self) -> bool {
        self.clause_a.is_none() && self.clause_b.is_none()
    }
}

/// Builds the generic extension of `m` by `α` over `b` and evaluates both
/// clauses. New point ids are `prefix` followed by a counter, skipping ids
/// already in use.
pub fn generic_extension(
    m: &ColoredStructure,
    c: &dyn CodeTemplate,
    b: &[crate::pregeometry::Payload],
    cat: &Catalogue,
    spec: &MuSpec,
    prefix: &str,
    budget: u64,
) -> Result<GenericExtension> {
    check_p(m, spec)?;
    let extended = extend_generic(m, c, b, prefix)?;
    let new_points: Vec<PointId> = extended
        .points()
        .map(|(pt, _)| &pt.id)
        .filter(|id| !m.contains_id(id))
        .cloned()
        .collect();
    let new: SubsetHandle = new_points.iter().cloned().collect();
    let mu = spec.mu(c)?;
    let pm = find_pseudo_morley(c, b, m, budget)?;
    let mut incomplete = pm.lower_bound;
    let clause_a = (pm.len() as u64 >= mu).then_some(pm);
    let mut clause_b = None;
    let n_alpha = c.arity() as u64;
    let fresh = extended.restrict(&new)?;
    for t in checked_templates(cat, &extended) {
        let star = spec.mu_star(t.as_ref())?;
        if (star + 1) * t.arity() as u64 > n_alpha {
            continue;
        }
        let (params, complete) = parameters_in(t.as_ref(), &fresh, budget)?;
        incomplete |= !complete;
        for bb in params {
            match overflow(t.as_ref(), &bb, &extended, &new, spec, budget)? {
                Overflow::Found(v) => {
                    clause_b = Some(v);
                    break;
                }
                Overflow::Incomplete(_) => incomplete = true,
                Overflow::None => {}
            }
        }
        if clause_b.is_some() {
            break;
        }
    }
    Ok(GenericExtension {
        extended,
        new_points,
        clause_a,
        clause_b,
        incomplete,
    })
}

/// `m` plus a black realization of `c` over `b` built from fresh generic
/// elements.
pub fn extend_generic(
    m: &ColoredStructure,
    c: &dyn CodeTemplate,
    b: &[crate::pregeometry::Payload],
    prefix: &str,
) -> Result<ColoredStructure> {
    let geom = m.geometry();
    if !c.supports(&geom) {
        return Err(Error::Template {
            name: c.name().into(),
            reason: alloc::format!("does not support geometry {geom}"),
        });
    }
    let extent = b.iter().map(|x| x.extent()).fold(m.extent(), usize::max);
    let gen = crate::codes::fresh_generics(&geom, extent, c.rank());
    let wide = geom.widened(extent + c.rank());
    let xs = c.build(b, &gen, &wide).ok_or_else(|| Error::Template {
        name: c.name().into(),
        reason: "build failed on generic elements".into(),
    })?;
    let ids = fresh_ids(m, prefix, xs.len());
    let pts = ids
        .into_iter()
        .zip(xs)
        .map(|(id, x)| (GeometryPoint::new(id, x), Color::Black))
        .collect();
    m.extend(pts)
}

/// `count` ids of the form `prefix` + number that are unused in `m`.
pub fn fresh_ids(m: &ColoredStructure, prefix: &str, count: usize) -> Vec<PointId> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let id = PointId::new(alloc::format!("{prefix}{k}"));
        if !m.contains_id(&id) {
            out.push(id);
        }
        k += 1;
    }
    out
}

impl fmt::Display for ExtensionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionVerdict::FailsA {
                template,
                realization,
                ..
            } => {
                write!(
                    f,
                    "fails-a ({template}, realization {})",
                    show_ids(realization)
                )
            }
            ExtensionVerdict::FailsB {
                template,
                new_tuples,
                ..
            } => write!(f, "fails-b ({template}, {new_tuples} new tuples)"),
            ExtensionVerdict::NotRefuted { reason } => write!(f, "not-refuted ({reason})"),
            v => f.write_str(v.label()),
        }
    }
}

fn show_ids(ids: &[PointId]) -> String {
    let parts: Vec<String> = ids.iter().map(ToString::to_string).collect();
    alloc::format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests;
