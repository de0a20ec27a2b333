//! Seeded generators of small structures, shared by property tests, the
//! acceptance suite and the command line `selftest`.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::{RatFunc, Q};
use crate::codes::Catalogue;
use crate::collapse::{check_membership, fresh_ids, Membership, MuSpec};
use crate::colored::{Color, ColoredStructure, SubsetHandle};
use crate::extensions::decompose_minimal;
use crate::pregeometry::{GeometryKind, GeometryPoint, Payload};

fn small_q(rng: &mut impl Rng) -> Q {
    Q::from_integer(rng.gen_range(-2i64..=2).into())
}

fn color(rng: &mut impl Rng) -> Color {
    if rng.gen_bool(0.5) {
        Color::Black
    } else {
        Color::White
    }
}

/// One of the three geometry kinds: rationals, `F_q` with `q ∈ {2, 3, 5}`,
/// or the function field in three variables.
pub fn random_geometry(rng: &mut impl Rng) -> GeometryKind {
    match rng.gen_range(0..3) {
        0 => GeometryKind::LinearRational,
        1 => GeometryKind::LinearFiniteField {
            q: *[2u64, 3, 5].choose(rng).expect("nonempty"),
        },
        _ => GeometryKind::AlgebraicFunctionField { n: 3 },
    }
}

/// A random payload of dimension at most `dim` (or in `t1 … t_dim`). It may
/// be zero or constant.
pub fn random_payload(geom: &GeometryKind, dim: usize, rng: &mut impl Rng) -> Payload {
    match *geom {
        GeometryKind::LinearRational => Payload::rational((0..dim).map(|_| small_q(rng)).collect()),
        GeometryKind::LinearFiniteField { q } => {
            Payload::finite((0..dim).map(|_| rng.gen_range(0..q)).collect(), q)
        }
        GeometryKind::AlgebraicFunctionField { .. } => {
            let var = |rng: &mut _| RatFunc::var(Rng::gen_range(rng, 1..=dim.max(1) as u32));
            let atom = |rng: &mut _| -> RatFunc {
                let v = var(rng);
                match Rng::gen_range(rng, 0..4) {
                    0 => v,
                    1 => v.pow(2).expect("nonzero"),
                    2 => v.mul(&var(rng)),
                    _ => v.add(&RatFunc::constant(Q::from_integer(1.into()))),
                }
            };
            let f = atom(rng);
            let f = match rng.gen_range(0..4) {
                0 => f.add(&atom(rng)),
                1 => f.div(&atom(rng)).unwrap_or(f),
                _ => f,
            };
            Payload::Function(f)
        }
    }
}

/// `n` points with distinct random payloads and random colors, ids `x0`,
/// `x1`, …
pub fn random_structure(
    geom: GeometryKind,
    p: u32,
    n: usize,
    dim: usize,
    rng: &mut impl Rng,
) -> ColoredStructure {
    let mut s = ColoredStructure::empty(geom, p).expect("valid geometry");
    let mut k = 0;
    let mut tries = 0;
    while s.len() < n && tries < 50 * (n + 1) {
        tries += 1;
        let x = random_payload(&geom, dim, rng);
        if s.find_payload(&x).is_some() {
            continue;
        }
        s = s
            .extend(alloc::vec![(
                GeometryPoint::new(alloc::format!("x{k}"), x),
                color(rng)
            )])
            .expect("fresh payload");
        k += 1;
    }
    s
}

/// The black points `x, x + b, …, x + (p−1)·b` with `x` the unit vector at
/// coordinate `d`.
fn line_realization(geom: &GeometryKind, p: usize, b: &Payload, d: usize) -> Vec<(Payload, Color)> {
    let x = Payload::unit(geom, d);
    (0..p)
        .map(|j| {
            let c = Q::from_integer((j as i64).into());
            let y = Payload::lin_comb(&[(Q::from_integer(1.into()), &x), (c, b)], geom)
                .expect("linear");
            (y, Color::Black)
        })
        .collect()
}

/// A white `b` at coordinate 0 followed by `k` line realizations over it.
fn stacked(geom: GeometryKind, p: u32, k: usize, prefix: &str) -> ColoredStructure {
    let b = Payload::unit(&geom, 0);
    let mut points = alloc::vec![(b.clone(), Color::White)];
    for i in 0..k {
        points.extend(line_realization(&geom, p as usize, &b, i + 1));
    }
    let s = ColoredStructure::empty(geom, p).expect("valid geometry");
    let ids = fresh_ids(&s, prefix, points.len());
    s.extend(
        ids.into_iter()
            .zip(points)
            .map(|(id, (x, c))| (GeometryPoint::new(id, x), c))
            .collect(),
    )
    .expect("fresh payloads")
}

/// `μ` of the line code, when a white point with `μ + 1` realizations over
/// it fits in `max_points`.
fn saturable(cat: &Catalogue, spec: &MuSpec, max_points: usize) -> Option<usize> {
    let p = spec.p() as usize;
    let line = cat.get(&alloc::format!("L{p}"))?;
    let mu = spec.mu(line.as_ref()).ok()? as usize;
    ((mu + 1) * p < max_points).then_some(mu)
}

/// Adds about `count` points to `base`, with ids `prefix0`, `prefix1`, …
/// New directions start at coordinate `offset`. Besides generic points of
/// either color, whole black realizations `x, x + b, …, x + (p−1)·b` of the
/// line code over white points `b` are added, and small combinations of
/// existing points. Only linear geometries.
pub fn grow_linear(
    base: &ColoredStructure,
    prefix: &str,
    count: usize,
    offset: usize,
    rng: &mut impl Rng,
) -> ColoredStructure {
    let geom = base.geometry();
    assert!(geom.is_linear(), "grow_linear needs a linear geometry");
    let p = base.p() as usize;
    let mut s = base.clone();
    let mut d = offset.max(base.extent());
    let mut added = 0;
    let mut tries = 0;
    while added < count && tries < 20 * (count + 1) {
        tries += 1;
        let whites: Vec<Payload> = s
            .whites()
            .ids()
            .map(|id| s.point(id).expect("listed").payload.clone())
            .collect();
        let all: Vec<Payload> = s.points().map(|(pt, _)| pt.payload.clone()).collect();
        let mut new: Vec<(Payload, Color)> = Vec::new();
        match rng.gen_range(0..6) {
            0..=2 if count - added >= p && !whites.is_empty() => {
                // mostly the first white point, so that sequences grow long
                let b = if rng.gen_bool(0.7) {
                    &whites[0]
                } else {
                    whites.choose(rng).expect("nonempty")
                };
                new = line_realization(&geom, p, b, d);
                d += 1;
            }
            3 if all.len() >= 2 => {
                let pick: Vec<&Payload> = all.choose_multiple(rng, 2).collect();
                let (c1, c2) = (
                    Q::from_integer(rng.gen_range(1i64..=2).into()),
                    small_q(rng),
                );
                let z = Payload::lin_comb(&[(c1, pick[0]), (c2, pick[1])], &geom).expect("linear");
                new.push((z, color(rng)));
            }
            _ => {
                new.push((Payload::unit(&geom, d), color(rng)));
                d += 1;
            }
        }
        if new
            .iter()
            .any(|(x, _)| x.extent() == 0 || s.find_payload(x).is_some())
        {
            continue;
        }
        for i in 0..new.len() {
            if new[..i].iter().any(|(y, _)| *y == new[i].0) {
                new.clear();
                break;
            }
        }
        if new.is_empty() {
            continue;
        }
        let ids = fresh_ids(&s, prefix, new.len());
        added += new.len();
        s = s
            .extend(
                ids.into_iter()
                    .zip(new)
                    .map(|(id, (x, c))| (GeometryPoint::new(id, x), c))
                    .collect(),
            )
            .expect("fresh payloads");
    }
    s
}

fn is_member(s: &ColoredStructure, cat: &Catalogue, spec: &MuSpec, budget: u64) -> bool {
    matches!(
        check_membership(s, cat, spec, budget),
        Ok(Membership::Member)
    )
}

/// A structure `M′` of at most `max_points` points and a self-sufficient
/// `M ⊆ M′` with `M′/M` minimal and `M` in the class. `M′` itself may or
/// may not be in the class.
pub fn random_minimal_extension(
    geom: GeometryKind,
    cat: &Catalogue,
    spec: &MuSpec,
    max_points: usize,
    budget: u64,
    rng: &mut impl Rng,
) -> (ColoredStructure, SubsetHandle) {
    let empty = ColoredStructure::empty(geom, spec.p()).expect("valid geometry");
    if let Some(mu) =
        saturable(cat, spec, max_points).filter(|_| geom.is_linear() && rng.gen_bool(0.3))
    {
        // one realization past the bound over the same white point
        let top = stacked(geom, spec.p(), mu + 1, "x");
        let p = spec.p() as usize;
        let m = top
            .points()
            .take(1 + mu * p)
            .map(|(pt, _)| pt.id.clone())
            .collect();
        return (top, m);
    }
    loop {
        let n = rng.gen_range(1..=max_points);
        let s = grow_linear(&empty, "x", n, 0, rng);
        if s.is_empty()
            || s.len() > max_points
            || s.negative_delta_witness().ok().flatten().is_some()
        {
            continue;
        }
        let Ok(chain) = decompose_minimal(&SubsetHandle::new(), &s.all(), &s) else {
            continue;
        };
        let i = if rng.gen_bool(0.5) {
            chain.len() - 2
        } else {
            rng.gen_range(0..chain.len() - 1)
        };
        let top = s.restrict(&chain[i + 1]).expect("subset");
        let m = chain[i].clone();
        if is_member(&top.restrict(&m).expect("subset"), cat, spec, budget) {
            return (top, m);
        }
    }
}

/// `(M, A, B)` with `B ≤ M`, `B ≤ A`, both `M` and `A` in the class and of
/// at most `max_points` points, and `A∖B` named apart from `M`.
pub fn random_triple(
    geom: GeometryKind,
    cat: &Catalogue,
    spec: &MuSpec,
    max_points: usize,
    budget: u64,
    rng: &mut impl Rng,
) -> (ColoredStructure, ColoredStructure, SubsetHandle) {
    let empty = ColoredStructure::empty(geom, spec.p()).expect("valid geometry");
    let saturated =
        saturable(cat, spec, max_points).filter(|_| geom.is_linear() && rng.gen_bool(0.3));
    loop {
        let m = match saturated {
            // M saturated over b, and A adds one more realization over b
            Some(mu) => {
                let m = stacked(geom, spec.p(), mu, "m");
                let room = max_points - m.len();
                let extra = rng.gen_range(0..=room);
                grow_linear(&m, "m", extra, 0, rng)
            }
            None => {
                let n = rng.gen_range(0..=max_points);
                grow_linear(&empty, "m", n, 0, rng)
            }
        };
        if m.len() > max_points || !is_member(&m, cat, spec, budget) {
            continue;
        }
        let seed: SubsetHandle = if saturated.is_some() {
            m.points().take(1).map(|(pt, _)| pt.id.clone()).collect()
        } else {
            let ids: Vec<_> = if rng.gen_bool(0.5) {
                m.whites()
            } else {
                m.all()
            }
            .ids()
            .cloned()
            .collect();
            let k = rng.gen_range(0..=ids.len().min(2));
            ids.choose_multiple(rng, k).cloned().collect()
        };
        let Ok(b) = m.self_sufficient_closure(&seed) else {
            continue;
        };
        let base = m.restrict(&b).expect("subset");
        let room = max_points - b.len();
        if room == 0 {
            continue;
        }
        let extra = rng.gen_range(1..=room);
        // new directions of A start past M, so that A is not accidentally
        // placed inside M's span
        let a = match saturated {
            Some(_) if room >= spec.p() as usize => {
                let b = base.points().next().expect("seeded").0.payload.clone();
                let pts = line_realization(&geom, spec.p() as usize, &b, m.extent() + 1);
                let ids = fresh_ids(&base, "a", pts.len());
                let a = base
                    .extend(
                        ids.into_iter()
                            .zip(pts)
                            .map(|(id, (x, c))| (GeometryPoint::new(id, x), c))
                            .collect(),
                    )
                    .expect("fresh payloads");
                let extra = rng.gen_range(0..=room - spec.p() as usize);
                grow_linear(&a, "a", extra, m.extent() + 2, rng)
            }
            _ => grow_linear(&base, "a", extra, m.extent() + 1, rng),
        };
        if a.len() > max_points || a.len() == b.len() {
            continue;
        }
        if !a.is_self_sufficient(&b).unwrap_or(false) || !is_member(&a, cat, spec, budget) {
            continue;
        }
        debug_assert!(
            a.all().difference(&b).ids().all(|id| !m.contains_id(id)),
            "{}",
            b.to_string()
        );
        return (m, a, b);
    }
}
