//! Finite catalogues of templates, closed under coordinate permutations.
//!
//! For a permutation `σ` of `0..n`, the template `α^σ` is realized by `ā`
//! exactly when `α` is realized by `ā∘σ`, where `(ā∘σ)_i = ā_{σ(i)}`. Then
//! `(α^σ)^τ = α^{τ∘σ}`, and if `G` is the group of permutations declared to
//! give templates equivalent to `α`, the classes of `α^σ` are the left
//! cosets `σG`. The catalogue keeps one template per coset, using the
//! lexicographically least permutation as representative.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::RngCore;

use super::{CodeTemplate, Enumeration, Param};
use crate::colored::ColoredStructure;
use crate::error::{Error, Result};
use crate::pregeometry::{GeometryKind, Payload};

/// `τ∘σ`.
pub fn compose(tau: &[usize], sigma: &[usize]) -> Vec<usize> {
    sigma.iter().map(|&i| tau[i]).collect()
}

pub fn invert(sigma: &[usize]) -> Vec<usize> {
    let mut out = alloc::vec![0; sigma.len()];
    for (i, &s) in sigma.iter().enumerate() {
        out[s] = i;
    }
    out
}

fn is_permutation(sigma: &[usize], n: usize) -> bool {
    let mut seen = alloc::vec![false; n];
    sigma.len() == n
        && sigma
            .iter()
            .all(|&i| i < n && !core::mem::replace(&mut seen[i], true))
}

fn apply<T: Clone>(xs: &[T], sigma: &[usize]) -> Vec<T> {
    sigma.iter().map(|&i| xs[i].clone()).collect()
}

fn group(gens: &[Vec<usize>], n: usize) -> BTreeSet<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut g = BTreeSet::from([id.clone()]);
    let mut frontier = alloc::vec![id];
    while let Some(x) = frontier.pop() {
        for s in gens {
            let y = compose(&x, s);
            if g.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    g
}

#[derive(Debug)]
pub struct PermutedTemplate {
    inner: Arc<dyn CodeTemplate>,
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    name: String,
}

impl PermutedTemplate {
    pub fn new(inner: Arc<dyn CodeTemplate>, sigma: Vec<usize>) -> Result<Self> {
        if !is_permutation(&sigma, inner.arity()) {
            return Err(Error::Template {
                name: inner.name().into(),
                reason: alloc::format!("{sigma:?} is not a permutation of its coordinates"),
            });
        }
        let shown: Vec<String> = sigma.iter().map(|i| alloc::format!("{}", i + 1)).collect();
        let name = alloc::format!("{}^[{}]", inner.name(), shown.join(","));
        Ok(PermutedTemplate {
            sigma_inv: invert(&sigma),
            inner,
            sigma,
            name,
        })
    }

    pub fn inner(&self) -> &Arc<dyn CodeTemplate> {
        &self.inner
    }
}

impl CodeTemplate for PermutedTemplate {
    fn name(&self) -> &str {
        &self.name
    }

    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn recovery_arity(&self) -> usize {
        self.inner.recovery_arity()
    }

    fn param_arity(&self) -> usize {
        self.inner.param_arity()
    }

    fn supports(&self, geom: &GeometryKind) -> bool {
        self.inner.supports(geom)
    }

    fn constraint(&self, xs: &[Payload], b: &[Payload], geom: &GeometryKind) -> bool {
        xs.len() == self.sigma.len() && self.inner.constraint(&apply(xs, &self.sigma), b, geom)
    }

    fn recover(&self, tuples: &[&[Payload]], geom: &GeometryKind) -> Option<Param> {
        if tuples.iter().any(|t| t.len() != self.sigma.len()) {
            return None;
        }
        let moved: Vec<Vec<Payload>> = tuples.iter().map(|t| apply(t, &self.sigma)).collect();
        let refs: Vec<&[Payload]> = moved.iter().map(Vec::as_slice).collect();
        self.inner.recover(&refs, geom)
    }

    fn build(
        &self,
        b: &[Payload],
        generic: &[Payload],
        geom: &GeometryKind,
    ) -> Option<Vec<Payload>> {
        let y = self.inner.build(b, generic, geom)?;
        Some(apply(&y, &self.sigma_inv))
    }

    fn sample_parameter(&self, geom: &GeometryKind, rng: &mut dyn RngCore) -> Option<Param> {
        self.inner.sample_parameter(geom, rng)
    }

    /// Conjugates of the inner template's equivalences.
    fn equivalences(&self) -> Vec<Vec<usize>> {
        self.inner
            .equivalences()
            .iter()
            .map(|g| compose(&compose(&self.sigma, g), &self.sigma_inv))
            .collect()
    }

    fn realizations(
        &self,
        m: &ColoredStructure,
        b: Option<&[Payload]>,
        budget: u64,
    ) -> Result<Enumeration> {
        let mut e = self.inner.realizations(m, b, budget)?;
        for t in &mut e.tuples {
            *t = apply(t, &self.sigma_inv);
        }
        Ok(e)
    }

    fn base_name(&self) -> &str {
        self.inner.base_name()
    }

    fn permutation(&self) -> Option<&[usize]> {
        Some(&self.sigma)
    }
}

/// Largest arity whose permutations are enumerated when closing a catalogue.
pub const MAX_CLOSURE_ARITY: usize = 7;

#[derive(Clone, Debug, Default)]
pub struct Catalogue {
    entries: Vec<Arc<dyn CodeTemplate>>,
}

impl Catalogue {
    /// Adds, for every template, one permuted copy per class of
    /// non-equivalent permutations.
    pub fn new(bases: Vec<Arc<dyn CodeTemplate>>) -> Result<Self> {
        let mut names = BTreeSet::new();
        let mut entries = Vec::new();
        for base in bases {
            let n = base.arity();
            if !names.insert(String::from(base.name())) {
                return Err(Error::Template {
                    name: base.name().into(),
                    reason: "duplicate template name".into(),
                });
            }
            if n > MAX_CLOSURE_ARITY {
                return Err(Error::TooLarge {
                    what: "template arity",
                    size: n,
                    limit: MAX_CLOSURE_ARITY,
                });
            }
            let gens = base.equivalences();
            if let Some(bad) = gens.iter().find(|g| !is_permutation(g, n)) {
                return Err(Error::Template {
                    name: base.name().into(),
                    reason: alloc::format!("declared equivalence {bad:?} is not a permutation"),
                });
            }
            let g = group(&gens, n);
            entries.push(base.clone());
            let mut sigma: Vec<usize> = (0..n).collect();
            while super::next_permutation(&mut sigma) {
                let rep = g
                    .iter()
                    .map(|h| compose(&sigma, h))
                    .min()
                    .expect("group is nonempty");
                if rep == sigma && !g.contains(&sigma) {
                    let t = PermutedTemplate::new(base.clone(), sigma.clone())?;
                    names.insert(String::from(t.name()));
                    entries.push(Arc::new(t));
                }
            }
        }
        Ok(Catalogue { entries })
    }

    /// Takes the templates as given, without permutation closure.
    pub fn unclosed(entries: Vec<Arc<dyn CodeTemplate>>) -> Self {
        Catalogue { entries }
    }

    /// `L_p` closed under permutations.
    pub fn lines(p: u32) -> Self {
        Catalogue::new(alloc::vec![Arc::new(super::LinearTemplate::line(
            p as usize
        ))])
        .expect("line catalogue is valid")
    }

    /// `P_p` closed under permutations.
    pub fn powers(p: u32) -> Self {
        Catalogue::new(alloc::vec![Arc::new(super::PowerTemplate::powers(
            p as usize
        ))])
        .expect("power catalogue is valid")
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn CodeTemplate>> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn CodeTemplate>> {
        self.entries.iter().find(|t| t.name() == name)
    }

    /// The templates that are not permuted copies of another entry.
    pub fn representatives(&self) -> impl Iterator<Item = &Arc<dyn CodeTemplate>> {
        self.entries.iter().filter(|t| t.permutation().is_none())
    }

    /// Templates usable in `geom` with `n = p·k`.
    pub fn good(
        &self,
        p: u32,
        geom: &GeometryKind,
    ) -> impl Iterator<Item = &Arc<dyn CodeTemplate>> {
        let geom = *geom;
        self.entries
            .iter()
            .filter(move |t| t.supports(&geom) && t.is_good_shape(p))
    }
}
