//! Computable pregeometries: the rank oracles that play the role of
//! transcendence degree, and the matroid closure that plays the role of
//! algebraic closure.
//!
//! Three geometries are supported:
//!
//! * linear over the rationals: rank is the dimension of the span;
//! * linear over a prime field `F_q`;
//! * rational functions in `t1..tn` over the rationals: rank is the
//!   transcendence degree, computed as the rank of the Jacobian matrix
//!   `(∂f_i/∂t_j)` over the function field (valid in characteristic zero).

pub mod parse;
pub(crate) mod rows;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{scalar::is_prime, Fp, RatFunc, Q};
use crate::error::{Error, Result};

pub(crate) use rows::RowStore;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GeometryKind {
    LinearRational,
    LinearFiniteField {
        q: u64,
    },
    /// Rational functions in `t1..tn`, characteristic zero.
    AlgebraicFunctionField {
        n: u32,
    },
}

impl GeometryKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GeometryKind::LinearRational => Ok(()),
            GeometryKind::LinearFiniteField { q } if !is_prime(q) => Err(Error::InvalidGeometry(
                alloc::format!("finite field modulus {q} is not prime"),
            )),
            GeometryKind::LinearFiniteField { q } if q > (1 << 31) => Err(Error::InvalidGeometry(
                alloc::format!("finite field modulus {q} exceeds 2^31"),
            )),
            GeometryKind::AlgebraicFunctionField { n: 0 } => Err(Error::InvalidGeometry(
                "function field needs at least one base transcendental".into(),
            )),
            _ => Ok(()),
        }
    }

    /// The function field widened to at least `extent` base
    /// transcendentals; linear geometries are returned unchanged.
    pub fn widened(&self, extent: usize) -> GeometryKind {
        match *self {
            GeometryKind::AlgebraicFunctionField { n } => GeometryKind::AlgebraicFunctionField {
                n: n.max(extent as u32).max(1),
            },
            g => g,
        }
    }

    pub fn is_linear(&self) -> bool {
        !matches!(self, GeometryKind::AlgebraicFunctionField { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeometryKind::LinearRational => "linear-rational",
            GeometryKind::LinearFiniteField { .. } => "linear-finite-field",
            GeometryKind::AlgebraicFunctionField { .. } => "algebraic-function-field",
        }
    }

    /// Checks that `payload` has the shape this geometry expects.
    pub fn check_payload(&self, payload: &Payload) -> core::result::Result<(), String> {
        match (self, payload) {
            (GeometryKind::LinearRational, Payload::Rational(_)) => Ok(()),
            (GeometryKind::LinearFiniteField { q }, Payload::Finite(v)) => {
                match v.iter().find(|&&x| x >= *q) {
                    Some(x) => Err(alloc::format!("entry {x} is not reduced modulo {q}")),
                    None => Ok(()),
                }
            }
            (GeometryKind::AlgebraicFunctionField { n }, Payload::Function(f)) => {
                let mv = f.max_var();
                if mv > *n {
                    Err(alloc::format!("uses t{mv} but only t1..t{n} are available"))
                } else {
                    Ok(())
                }
            }
            (_, p) => Err(alloc::format!("{} payload", p.kind_name())),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryKind::LinearRational => f.write_str("linear-rational"),
            GeometryKind::LinearFiniteField { q } => write!(f, "linear-finite-field({q})"),
            GeometryKind::AlgebraicFunctionField { n } => {
                write!(f, "algebraic-function-field({n})")
            }
        }
    }
}

/// The coordinates of a point. Vectors are stored without trailing zeros so
/// that equality does not depend on the ambient dimension.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Payload {
    Rational(Vec<Q>),
    Finite(Vec<u64>),
    Function(RatFunc),
}

impl Payload {
    pub fn rational(mut v: Vec<Q>) -> Payload {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        Payload::Rational(v)
    }

    pub fn rational_ints(v: &[i64]) -> Payload {
        Payload::rational(v.iter().map(|&x| Q::from_integer(x.into())).collect())
    }

    pub fn finite(mut v: Vec<u64>, q: u64) -> Payload {
        for x in &mut v {
            *x %= q;
        }
        while v.last() == Some(&0) {
            v.pop();
        }
        Payload::Finite(v)
    }

    pub fn function(f: RatFunc) -> Payload {
        Payload::Function(f)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Payload::Rational(_) => "rational vector",
            Payload::Finite(_) => "finite-field vector",
            Payload::Function(_) => "rational function",
        }
    }

    /// Ambient dimension used by a linear payload; the largest variable index
    /// for a rational function.
    pub fn extent(&self) -> usize {
        match self {
            Payload::Rational(v) => v.len(),
            Payload::Finite(v) => v.len(),
            Payload::Function(f) => f.max_var() as usize,
        }
    }

    pub fn as_function(&self) -> Option<&RatFunc> {
        match self {
            Payload::Function(f) => Some(f),
            _ => None,
        }
    }

    /// `Σ cᵢ·vᵢ` for linear payloads. `None` for rational functions, mixed
    /// kinds, or a coefficient whose denominator vanishes modulo `q`.
    pub fn lin_comb(terms: &[(Q, &Payload)], geom: &GeometryKind) -> Option<Payload> {
        match *geom {
            GeometryKind::LinearRational => {
                let mut acc: Vec<Q> = Vec::new();
                for (c, v) in terms {
                    let Payload::Rational(v) = v else { return None };
                    if acc.len() < v.len() {
                        acc.resize(v.len(), Q::zero());
                    }
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += c * x;
                    }
                }
                Some(Payload::rational(acc))
            }
            GeometryKind::LinearFiniteField { q } => {
                let mut acc: Vec<u64> = Vec::new();
                for (c, v) in terms {
                    let Payload::Finite(v) = v else { return None };
                    let c = reduce_mod(c, q)?;
                    if acc.len() < v.len() {
                        acc.resize(v.len(), 0);
                    }
                    for (a, &x) in acc.iter_mut().zip(v) {
                        *a = ((*a as u128 + c as u128 * x as u128) % q as u128) as u64;
                    }
                }
                Some(Payload::finite(acc, q))
            }
            GeometryKind::AlgebraicFunctionField { .. } => None,
        }
    }

    /// The `d`-th generic element: the unit vector `e_d` (0-based) in linear
    /// geometries, the transcendental `t_{d+1}` in the function field.
    pub fn unit(geom: &GeometryKind, d: usize) -> Payload {
        match geom {
            GeometryKind::LinearRational => {
                let mut v = alloc::vec![Q::zero(); d + 1];
                v[d] = Q::from_integer(1.into());
                Payload::Rational(v)
            }
            GeometryKind::LinearFiniteField { .. } => {
                let mut v = alloc::vec![0; d + 1];
                v[d] = 1;
                Payload::Finite(v)
            }
            GeometryKind::AlgebraicFunctionField { .. } => {
                Payload::Function(RatFunc::var(d as u32 + 1))
            }
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Rational(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(&parse::format_rational(x))?;
                }
                f.write_str(")")
            }
            Payload::Finite(v) => write!(f, "{v:?}"),
            Payload::Function(r) => write!(f, "{r}"),
        }
    }
}

/// Stable identifier of a point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PointId(String);

impl PointId {
    pub fn new(s: impl Into<String>) -> Self {
        PointId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.into())
    }
}

impl From<String> for PointId {
    fn from(s: String) -> Self {
        PointId(s)
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GeometryPoint {
    pub id: PointId,
    pub payload: Payload,
}

impl GeometryPoint {
    pub fn new(id: impl Into<PointId>, payload: Payload) -> Self {
        GeometryPoint {
            id: id.into(),
            payload,
        }
    }
}

/// How the algebraic geometry computes Jacobian rank.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum RankMode {
    /// Exact elimination over the function field.
    #[default]
    Symbolic,
    /// Evaluation at seeded random integer points in `[1, 2^31]`. Two
    /// independent evaluations must agree; after three disagreements the
    /// computation escalates to symbolic mode, or fails if `escalate` is off.
    Probabilistic { seed: u64, escalate: bool },
}

const MAX_DISAGREEMENTS: u32 = 3;

/// `c mod q`, or `None` when the denominator is divisible by `q`.
pub fn reduce_mod(c: &Q, q: u64) -> Option<u64> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let qb = BigInt::from(q);
    let num = c.numer().mod_floor(&qb).to_u64()?;
    let den = c.denom().mod_floor(&qb).to_u64()?;
    if den == 0 {
        return None;
    }
    Some(crate::arith::Scalar::mul(&Fp::new(num, q), &Fp::new(den, q).inverse()).value())
}

fn check_points(points: &[GeometryPoint], geom: &GeometryKind) -> Result<()> {
    geom.validate()?;
    let mut seen: BTreeMap<&PointId, &Payload> = BTreeMap::new();
    for pt in points {
        geom.check_payload(&pt.payload)
            .map_err(|reason| Error::PayloadMismatch {
                id: pt.id.to_string(),
                geometry: geom.to_string(),
                reason,
            })?;
        if let Some(prev) = seen.insert(&pt.id, &pt.payload) {
            if prev != &pt.payload {
                return Err(Error::DuplicateId(pt.id.to_string()));
            }
        }
    }
    Ok(())
}

/// Rank of raw payloads, which must already match `geom`.
pub(crate) fn payload_rank<'a>(
    geom: &GeometryKind,
    payloads: impl Iterator<Item = &'a Payload>,
) -> usize {
    RowStore::build(geom, payloads).rank_all()
}

/// Matroid rank of a set of points (symbolic mode).
pub fn rank(points: &[GeometryPoint], geom: &GeometryKind) -> Result<usize> {
    rank_with(points, geom, RankMode::Symbolic)
}

pub fn rank_with(points: &[GeometryPoint], geom: &GeometryKind, mode: RankMode) -> Result<usize> {
    check_points(points, geom)?;
    let payloads: Vec<&Payload> = points.iter().map(|p| &p.payload).collect();
    match (mode, geom) {
        (
            RankMode::Probabilistic { seed, escalate },
            GeometryKind::AlgebraicFunctionField { .. },
        ) => probabilistic_rank(&payloads, seed, escalate),
        _ => Ok(RowStore::build(geom, payloads.iter().copied()).rank_all()),
    }
}

/// `rank(points ∪ base) − rank(base)`.
pub fn relative_rank(
    points: &[GeometryPoint],
    base: &[GeometryPoint],
    geom: &GeometryKind,
) -> Result<usize> {
    relative_rank_with(points, base, geom, RankMode::Symbolic)
}

pub fn relative_rank_with(
    points: &[GeometryPoint],
    base: &[GeometryPoint],
    geom: &GeometryKind,
    mode: RankMode,
) -> Result<usize> {
    let mut all: Vec<GeometryPoint> = base.to_vec();
    all.extend_from_slice(points);
    let whole = rank_with(&all, geom, mode)?;
    let b = rank_with(base, geom, mode)?;
    Ok(whole - b)
}

pub fn in_matroid_closure(
    point: &GeometryPoint,
    base: &[GeometryPoint],
    geom: &GeometryKind,
) -> Result<bool> {
    Ok(relative_rank(core::slice::from_ref(point), base, geom)? == 0)
}

fn probabilistic_rank(payloads: &[&Payload], seed: u64, escalate: bool) -> Result<usize> {
    let funcs: Vec<&RatFunc> = payloads.iter().filter_map(|p| p.as_function()).collect();
    let max_var = funcs.iter().map(|f| f.max_var()).max().unwrap_or(0);
    let jac: Vec<Vec<(u32, RatFunc)>> = funcs
        .iter()
        .map(|f| {
            f.vars()
                .into_iter()
                .map(|v| (v, f.derivative(v)))
                .filter(|(_, d)| !d.is_zero())
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreements = 0;
    loop {
        let a = evaluated_rank(&jac, max_var, &mut rng);
        let b = evaluated_rank(&jac, max_var, &mut rng);
        if a == b {
            return Ok(a);
        }
        disagreements += 1;
        if disagreements >= MAX_DISAGREEMENTS {
            if escalate {
                return Ok(RowStore::build(
                    &GeometryKind::AlgebraicFunctionField { n: max_var.max(1) },
                    payloads.iter().copied(),
                )
                .rank_all());
            }
            return Err(Error::RetriesExhausted { disagreements });
        }
    }
}

/// Rank of the Jacobian evaluated at one random point; points where some
/// entry has a vanishing denominator are redrawn.
fn evaluated_rank(jac: &[Vec<(u32, RatFunc)>], max_var: u32, rng: &mut ChaCha8Rng) -> usize {
    'draw: loop {
        let point: Vec<Q> = (0..max_var)
            .map(|_| Q::from_integer(rng.gen_range(1i64..=(1i64 << 31)).into()))
            .collect();
        let value = |v: u32| point[(v - 1) as usize].clone();
        let mut rows = Vec::with_capacity(jac.len());
        for row in jac {
            let mut out = Vec::with_capacity(row.len());
            for (v, d) in row {
                match d.eval(&value) {
                    Some(x) if !x.is_zero() => out.push((*v as usize, x)),
                    Some(_) => {}
                    None => continue 'draw,
                }
            }
            rows.push(out);
        }
        return crate::arith::echelon::rank_of(rows.iter());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use parse::parse_ratfunc;

    fn alg(id: &str, s: &str) -> GeometryPoint {
        GeometryPoint::new(id, Payload::Function(parse_ratfunc(s).unwrap()))
    }

    fn lin(id: &str, v: &[i64]) -> GeometryPoint {
        GeometryPoint::new(id, Payload::rational_ints(v))
    }

    const ALG: GeometryKind = GeometryKind::AlgebraicFunctionField { n: 3 };

    #[test]
    fn empty_set_has_rank_zero() {
        assert_eq!(rank(&[], &GeometryKind::LinearRational).unwrap(), 0);
        assert_eq!(rank(&[], &ALG).unwrap(), 0);
    }

    #[test]
    fn jacobian_examples() {
        // det [[1, 1], [t2, t1]] = t1 - t2 ≠ 0
        let s = [alg("a", "t1+t2"), alg("b", "t1*t2")];
        assert_eq!(rank(&s, &ALG).unwrap(), 2);
        // rows (1) and (2 t1) are proportional
        let s = [alg("a", "t1"), alg("b", "t1^2")];
        assert_eq!(rank(&s, &ALG).unwrap(), 1);
    }

    #[test]
    fn linear_examples() {
        let s = [lin("a", &[1, 0]), lin("b", &[2, 0])];
        assert_eq!(rank(&s, &GeometryKind::LinearRational).unwrap(), 1);
        let r = relative_rank(
            &[lin("y", &[0, 1])],
            &[lin("x", &[1, 0])],
            &GeometryKind::LinearRational,
        );
        assert_eq!(r.unwrap(), 1);
        assert!(in_matroid_closure(
            &lin("z", &[3, 0]),
            &[lin("x", &[1, 0])],
            &GeometryKind::LinearRational
        )
        .unwrap());
    }

    #[test]
    fn relative_and_closure_examples() {
        assert_eq!(relative_rank(&[alg("a", "t1")], &[], &ALG).unwrap(), 1);
        let base = [alg("x", "t1"), alg("y", "t2")];
        assert_eq!(relative_rank(&[alg("s", "t1+t2")], &base, &ALG).unwrap(), 0);
        assert!(!in_matroid_closure(&alg("p", "t1*t2"), &[alg("x", "t1")], &ALG).unwrap());
        assert!(in_matroid_closure(&alg("p", "t1^2"), &[alg("x", "t1")], &ALG).unwrap());
    }

    #[test]
    fn finite_field_rank() {
        let g = GeometryKind::LinearFiniteField { q: 3 };
        let pts = [
            GeometryPoint::new("a", Payload::finite(alloc::vec![1, 1], 3)),
            GeometryPoint::new("b", Payload::finite(alloc::vec![2, 2], 3)),
            GeometryPoint::new("c", Payload::finite(alloc::vec![1, 2], 3)),
        ];
        assert_eq!(rank(&pts, &g).unwrap(), 2);
        assert_eq!(rank(&pts[..2], &g).unwrap(), 1);
    }

    #[test]
    fn mismatches_are_typed_errors() {
        let r = rank(&[lin("a", &[1])], &ALG);
        assert!(matches!(r, Err(Error::PayloadMismatch { .. })));
        let r = rank(&[alg("a", "t4")], &ALG);
        assert!(matches!(r, Err(Error::PayloadMismatch { .. })));
        let g = GeometryKind::LinearFiniteField { q: 4 };
        assert!(matches!(rank(&[], &g), Err(Error::InvalidGeometry(_))));
        let r = rank(
            &[lin("a", &[1]), lin("a", &[2])],
            &GeometryKind::LinearRational,
        );
        assert!(matches!(r, Err(Error::DuplicateId(_))));
    }

    #[test]
    fn probabilistic_mode_agrees_on_examples() {
        let mode = RankMode::Probabilistic {
            seed: 7,
            escalate: false,
        };
        let s = [alg("a", "t1+t2"), alg("b", "t1*t2"), alg("c", "t1^2+t2^2")];
        assert_eq!(rank_with(&s, &ALG, mode).unwrap(), 2);
    }
}
