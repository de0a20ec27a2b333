//! Sampling-based validation of a template against the code axioms.

use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{fresh_generics, realizes, CodeTemplate, Param};
use crate::colored::{Color, ColoredStructure, SubsetHandle};
use crate::error::{Error, Result};
use crate::extensions::{classify_minimal, ExtensionCase};
use crate::pregeometry::{payload_rank, GeometryKind, GeometryPoint, Payload};
use crate::subsets::{by_size, Combinations};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Counterexample or explanation when the check failed.
    pub detail: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub template: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn record(&mut self, name: &'static str, failure: Option<String>) {
        // keep the first counterexample per check
        if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
            if c.passed && failure.is_some() {
                c.passed = false;
                c.detail = failure;
            }
            return;
        }
        self.checks.push(Check {
            name,
            passed: failure.is_none(),
            detail: failure,
        });
    }
}

fn show(xs: &[Payload]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| alloc::format!("{x}")).collect();
    alloc::format!("[{}]", parts.join(", "))
}

/// Checks a template on `samples` random parameters, with realizations
/// generic over `m` and the parameter.
///
/// Check names: `arity`, `generic-rank`, `uniform-dependencies`,
/// `separation`, `recovery`, `determinacy`, `exchange`, `good-shape`,
/// `good-extension`.
pub fn validate_template<C: CodeTemplate + ?Sized>(
    c: &C,
    m: &ColoredStructure,
    samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    if samples == 0 {
        return Err(Error::Precondition(
            "at least one sample is required".into(),
        ));
    }
    let geom0 = m.geometry();
    if !c.supports(&geom0) {
        return Err(Error::Template {
            name: c.name().into(),
            reason: alloc::format!("does not support geometry {geom0}"),
        });
    }
    let (n, k, r) = (c.arity(), c.rank(), c.recovery_arity());
    let mut rec = Recorder { checks: Vec::new() };
    let shape_ok = n >= 1 && k >= 1 && k <= n && r >= 1;
    rec.record(
        "arity",
        (!shape_ok).then(|| alloc::format!("n={n} k={k} m={r}")),
    );
    let good = c.is_good_shape(m.p());
    rec.record(
        "good-shape",
        (!good).then(|| alloc::format!("n={n} but p·k={}", m.p() as usize * k)),
    );
    if !shape_ok {
        return Ok(ValidationReport {
            template: c.name().into(),
            checks: rec.checks,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<Param> = Vec::new();
    let mut pools: Vec<Vec<Vec<Payload>>> = Vec::new();
    let mut signature: Option<Vec<usize>> = None;
    let mut extent = m.extent();
    for _ in 0..samples {
        let b = c
            .sample_parameter(&geom0, &mut rng)
            .ok_or_else(|| Error::Template {
                name: c.name().into(),
                reason: "cannot sample a parameter".into(),
            })?;
        if b.len() != c.param_arity() {
            rec.record(
                "arity",
                Some(alloc::format!("parameter {} has wrong length", show(&b))),
            );
            continue;
        }
        extent = extent.max(b.iter().map(Payload::extent).max().unwrap_or(0));
        // m + 2 independent generic realizations: m + 1 for determinacy and
        // one more to swap in.
        let mut pool = Vec::new();
        for _ in 0..r + 2 {
            let gen = fresh_generics(&geom0, extent, k);
            extent += k;
            let Some(xs) = c.build(&b, &gen, &geom0.widened(extent)) else {
                rec.record("arity", Some("build failed on generic elements".into()));
                continue;
            };
            pool.push(xs);
        }
        let geom = geom0.widened(extent);
        let base: Vec<Payload> = m
            .points()
            .map(|(pt, _)| pt.payload.clone())
            .chain(b.iter().cloned())
            .collect();
        let base_rank = payload_rank(&geom, base.iter());
        let b_rank = payload_rank(&geom, b.iter());
        for xs in &pool {
            if xs.len() != n {
                rec.record(
                    "arity",
                    Some(alloc::format!("realization {} has wrong length", show(xs))),
                );
                continue;
            }
            if !realizes(c, xs, &b, &geom) {
                rec.record(
                    "generic-rank",
                    Some(alloc::format!(
                        "built tuple {} does not realize {}",
                        show(xs),
                        show(&b)
                    )),
                );
                continue;
            }
            let rr = payload_rank(&geom, base.iter().chain(xs.iter())) - base_rank;
            rec.record(
                "generic-rank",
                (rr != k)
                    .then(|| alloc::format!("{} has rank {rr} over M and the parameter", show(xs))),
            );
        }
        if let Some(xs) = pool.first().filter(|xs| xs.len() == n && n <= 10) {
            let sig: Vec<usize> = by_size(n)
                .map(|s| payload_rank(&geom, b.iter().chain(s.iter().map(|&i| &xs[i]))) - b_rank)
                .collect();
            match &signature {
                None => signature = Some(sig),
                Some(prev) => rec.record(
                    "uniform-dependencies",
                    (prev != &sig)
                        .then(|| alloc::format!("{} has a different rank pattern", show(xs))),
                ),
            }
        }
        if pool.len() == r + 2 {
            let first: Vec<&[Payload]> = pool[..r].iter().map(Vec::as_slice).collect();
            let got = c.recover(&first, &geom);
            rec.record(
                "recovery",
                (got.as_ref() != Some(&b)).then(|| {
                    alloc::format!(
                        "recovered {:?} instead of {}",
                        got.as_deref().map(show),
                        show(&b)
                    )
                }),
            );
            for pick in Combinations::new(r + 1, r) {
                let chosen: Vec<&[Payload]> = pick.iter().map(|&i| pool[i].as_slice()).collect();
                let got = c.recover(&chosen, &geom);
                rec.record(
                    "determinacy",
                    (got.as_ref() != Some(&b)).then(|| {
                        alloc::format!("subset {pick:?} recovered {:?}", got.as_deref().map(show))
                    }),
                );
            }
            let mut swapped = first.clone();
            swapped[0] = pool[r + 1].as_slice();
            let got = c.recover(&swapped, &geom);
            rec.record(
                "exchange",
                (got.as_ref() != Some(&b)).then(|| {
                    alloc::format!("after exchange recovered {:?}", got.as_deref().map(show))
                }),
            );
        }
        if good {
            if let Some(xs) = pool.first() {
                rec.record(
                    "good-extension",
                    good_extension_failure(&b, xs, m.p(), &geom)?,
                );
            }
        }
        params.push(b);
        pools.push(pool);
    }
    rec.record("uniform-dependencies", None);
    let geom = geom0.widened(extent);
    for (i, b) in params.iter().enumerate() {
        for (j, b2) in params.iter().enumerate() {
            if b == b2 {
                continue;
            }
            if let Some(xs) = pools[i].iter().find(|xs| realizes(c, xs, b2, &geom)) {
                rec.record(
                    "separation",
                    Some(alloc::format!(
                        "{} realizes both {} and {}",
                        show(xs),
                        show(b),
                        show(&params[j])
                    )),
                );
            }
        }
    }
    rec.record("separation", None);
    if !good {
        rec.record("good-extension", Some("not of good shape".into()));
    }
    Ok(ValidationReport {
        template: c.name().into(),
        checks: rec.checks,
    })
}

/// The parameter as white points plus a generic black realization must be
/// a good extension of the parameter.
fn good_extension_failure(
    b: &[Payload],
    xs: &[Payload],
    p: u32,
    geom: &GeometryKind,
) -> Result<Option<String>> {
    let mut pts = Vec::new();
    let mut base = SubsetHandle::new();
    for (i, bi) in b.iter().enumerate() {
        if pts
            .iter()
            .any(|(q, _): &(GeometryPoint, Color)| &q.payload == bi)
        {
            continue;
        }
        let id = alloc::format!("b{i}");
        base.insert(id.as_str());
        pts.push((GeometryPoint::new(id, bi.clone()), Color::White));
    }
    for (i, x) in xs.iter().enumerate() {
        pts.push((
            GeometryPoint::new(alloc::format!("x{i}"), x.clone()),
            Color::Black,
        ));
    }
    let s = ColoredStructure::new(*geom, p, pts)?;
    if !s.is_self_sufficient(&base)? {
        return Ok(Some(
            "parameter is not self-sufficient under the realization".into(),
        ));
    }
    match classify_minimal(&base, &s.all(), &s) {
        Ok(r) if r.case == ExtensionCase::Black && r.is_good => Ok(None),
        Ok(r) => Ok(Some(alloc::format!("extension is {}", r.summary()))),
        Err(Error::Precondition(msg)) => Ok(Some(msg)),
        Err(e) => Err(e),
    }
}
