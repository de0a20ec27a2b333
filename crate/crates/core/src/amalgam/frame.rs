//! Partial maps from the geometry of one structure into the ambient
//! geometry of another, used to transport points along embeddings.
//!
//! In a linear geometry the map is linear on the span of its sources; in the
//! function field it is a substitution of base transcendentals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arith::{Echelon, RatFunc, Q};
use crate::pregeometry::rows::{payload_row_finite, payload_row_rational};
use crate::pregeometry::{GeometryKind, Payload};

#[derive(Clone, Debug)]
pub(crate) enum Frame {
    Linear {
        geom: GeometryKind,
        sources: Vec<Payload>,
        images: Vec<Payload>,
    },
    Algebraic {
        vars: BTreeMap<u32, RatFunc>,
    },
}

/// `v` as a combination of the independent `basis`, if it lies in its span.
fn coords(geom: &GeometryKind, basis: &[Payload], v: &Payload) -> Option<Vec<Q>> {
    match (geom, v) {
        (GeometryKind::LinearRational, Payload::Rational(x)) => {
            let mut e = Echelon::new();
            for (i, b) in basis.iter().enumerate() {
                let Payload::Rational(y) = b else { return None };
                e.insert(i, &payload_row_rational(y));
            }
            let r = e.reduce(&payload_row_rational(x));
            if !r.residual.is_empty() {
                return None;
            }
            let mut out = alloc::vec![Q::from_integer(0.into()); basis.len()];
            for (i, c) in r.comb {
                out[i] = c;
            }
            Some(out)
        }
        (GeometryKind::LinearFiniteField { q }, Payload::Finite(x)) => {
            let mut e = Echelon::new();
            for (i, b) in basis.iter().enumerate() {
                let Payload::Finite(y) = b else { return None };
                e.insert(i, &payload_row_finite(y, *q));
            }
            let r = e.reduce(&payload_row_finite(x, *q));
            if !r.residual.is_empty() {
                return None;
            }
            let mut out = alloc::vec![Q::from_integer(0.into()); basis.len()];
            for (i, c) in r.comb {
                out[i] = Q::from_integer(c.value().into());
            }
            Some(out)
        }
        _ => None,
    }
}

fn bare_var(f: &RatFunc) -> Option<u32> {
    let vs = f.vars();
    (vs.len() == 1 && *f == RatFunc::var(vs[0])).then(|| vs[0])
}

impl Frame {
    /// The identity on the span of (or the variables occurring in) `fixed`.
    pub(crate) fn identity_on(geom: &GeometryKind, fixed: &[Payload]) -> Frame {
        if geom.is_linear() {
            let mut f = Frame::Linear {
                geom: *geom,
                sources: Vec::new(),
                images: Vec::new(),
            };
            for v in fixed {
                f.extend_to(v, v);
            }
            f
        } else {
            let mut vars = BTreeMap::new();
            for v in fixed {
                if let Some(g) = v.as_function() {
                    for x in g.vars() {
                        vars.insert(x, RatFunc::var(x));
                    }
                }
            }
            Frame::Algebraic { vars }
        }
    }

    pub(crate) fn apply(&self, v: &Payload) -> Option<Payload> {
        match self {
            Frame::Linear {
                geom,
                sources,
                images,
            } => {
                let c = coords(geom, sources, v)?;
                let terms: Vec<(Q, &Payload)> = c.into_iter().zip(images.iter()).collect();
                Payload::lin_comb(&terms, geom)
            }
            Frame::Algebraic { vars } => {
                let f = v.as_function()?;
                if f.vars().iter().any(|x| !vars.contains_key(x)) {
                    return None;
                }
                f.substitute(&|x| vars.get(&x).cloned())
                    .map(Payload::Function)
            }
        }
    }

    /// Extends the map so that it covers `v`, sending every new direction
    /// (or variable) to a fresh generic element `unit(next)`, `unit(next+1)`…
    pub(crate) fn extend_fresh(&mut self, v: &Payload, next: &mut usize) {
        match self {
            Frame::Linear {
                geom,
                sources,
                images,
            } => {
                if coords(geom, sources, v).is_none() {
                    sources.push(v.clone());
                    images.push(Payload::unit(geom, *next));
                    *next += 1;
                }
            }
            Frame::Algebraic { vars } => {
                if let Some(f) = v.as_function() {
                    for x in f.vars() {
                        if let alloc::collections::btree_map::Entry::Vacant(e) = vars.entry(x) {
                            e.insert(RatFunc::var(*next as u32 + 1));
                            *next += 1;
                        }
                    }
                }
            }
        }
    }

    /// Tries to extend the map so that `v ↦ image`. Linear frames take `v`
    /// as a new source when it is independent; the function field frame
    /// can only assign a bare variable. The caller verifies the outcome
    /// with [`Frame::apply`].
    pub(crate) fn extend_to(&mut self, v: &Payload, image: &Payload) {
        match self {
            Frame::Linear {
                geom,
                sources,
                images,
            } => {
                if coords(geom, sources, v).is_none() {
                    sources.push(v.clone());
                    images.push(image.clone());
                }
            }
            Frame::Algebraic { vars } => {
                if let (Some(f), Some(g)) = (v.as_function(), image.as_function()) {
                    if let Some(x) = bare_var(f) {
                        vars.entry(x).or_insert_with(|| g.clone());
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pregeometry::parse::parse_ratfunc;

    #[test]
    fn linear_frame_is_linear() {
        let g = GeometryKind::LinearRational;
        let b = Payload::rational_ints(&[1, 1]);
        let mut f = Frame::identity_on(&g, core::slice::from_ref(&b));
        let mut next = 5;
        let x = Payload::rational_ints(&[0, 1]);
        f.extend_fresh(&x, &mut next);
        assert_eq!(next, 6);
        let y = Payload::rational_ints(&[2, 3]);
        // y = 2b + x
        assert_eq!(
            f.apply(&y),
            Some(Payload::rational_ints(&[2, 2, 0, 0, 0, 1]))
        );
        assert_eq!(f.apply(&b), Some(b.clone()));
        assert_eq!(f.apply(&Payload::rational_ints(&[0, 0, 1])), None);
    }

    #[test]
    fn substitution_frame() {
        let g = GeometryKind::AlgebraicFunctionField { n: 3 };
        let p = |s: &str| Payload::Function(parse_ratfunc(s).unwrap());
        let mut f = Frame::identity_on(&g, &[p("t1+t2")]);
        let mut next = 7;
        f.extend_fresh(&p("t3*t1"), &mut next);
        assert_eq!(f.apply(&p("t3*t1 + t2")), Some(p("t8*t1 + t2")));
        let mut h = Frame::identity_on(&g, &[]);
        h.extend_to(&p("t2"), &p("t5^2"));
        assert_eq!(h.apply(&p("t2^2")), Some(p("t5^4")));
    }
}
