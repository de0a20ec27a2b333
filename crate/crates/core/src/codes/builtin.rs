use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::{Rng, RngCore};

use super::{payloads_of, realizes, CodeTemplate, Enumeration, Param};
use crate::arith::Q;
use crate::colored::{Color, ColoredStructure};
use crate::error::{Error, Result};
use crate::pregeometry::{GeometryKind, Payload, PointId};

/// `x_j = x_1 + c_j·b` in a linear geometry, with `c_1 = 0` and the `c_j`
/// pairwise distinct. Rank 1, one recovery tuple: `b = (x_2 − x_1)/c_2`.
#[derive(Clone, Debug)]
pub struct LinearTemplate {
    name: String,
    coeffs: Vec<Q>,
    equivalences: Vec<Vec<usize>>,
}

impl LinearTemplate {
    pub fn new(
        name: impl Into<String>,
        coeffs: Vec<Q>,
        equivalences: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let name = name.into();
        let fail = |reason: &str| Error::Template {
            name: name.clone(),
            reason: reason.into(),
        };
        if coeffs.len() < 2 {
            return Err(fail("needs at least two coefficients"));
        }
        if !coeffs[0].is_zero() {
            return Err(fail("first coefficient must be 0"));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if coeffs[..i].contains(c) {
                return Err(fail("coefficients must be pairwise distinct"));
            }
        }
        Ok(LinearTemplate {
            name,
            coeffs,
            equivalences,
        })
    }

    /// The line code `L_n`: `x_j = x_1 + (j−1)·b`, equivalent to its reversal
    /// (with parameter `−b`).
    pub fn line(n: usize) -> Self {
        let coeffs = (0..n as i64).map(|j| Q::from_integer(j.into())).collect();
        let reversal = (0..n).rev().collect();
        LinearTemplate::new(alloc::format!("L{n}"), coeffs, alloc::vec![reversal])
            .expect("line coefficients are valid")
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    fn point(&self, x1: &Payload, j: usize, b: &Payload, geom: &GeometryKind) -> Option<Payload> {
        Payload::lin_comb(&[(Q::one(), x1), (self.coeffs[j].clone(), b)], geom)
    }
}

impl CodeTemplate for LinearTemplate {
    fn name(&self) -> &str {
        &self.name
    }

    fn arity(&self) -> usize {
        self.coeffs.len()
    }

    fn rank(&self) -> usize {
        1
    }

    fn recovery_arity(&self) -> usize {
        1
    }

    fn param_arity(&self) -> usize {
        1
    }

    fn supports(&self, geom: &GeometryKind) -> bool {
        geom.is_linear()
    }

    fn constraint(&self, xs: &[Payload], b: &[Payload], geom: &GeometryKind) -> bool {
        (1..xs.len()).all(|j| self.point(&xs[0], j, &b[0], geom).as_ref() == Some(&xs[j]))
    }

    fn recover(&self, tuples: &[&[Payload]], geom: &GeometryKind) -> Option<Param> {
        let xs = tuples.first()?;
        let inv = self.coeffs[1].recip();
        let b = Payload::lin_comb(&[(inv.clone(), &xs[1]), (-inv, &xs[0])], geom)?;
        Some(alloc::vec![b])
    }

    fn build(
        &self,
        b: &[Payload],
        generic: &[Payload],
        geom: &GeometryKind,
    ) -> Option<Vec<Payload>> {
        let x1 = generic.first()?;
        (0..self.coeffs.len())
            .map(|j| self.point(x1, j, &b[0], geom))
            .collect()
    }

    fn sample_parameter(&self, geom: &GeometryKind, rng: &mut dyn RngCore) -> Option<Param> {
        loop {
            let v: Vec<i64> = (0..3).map(|_| rng.gen_range(-5..=5)).collect();
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let p = match *geom {
                GeometryKind::LinearRational => Payload::rational_ints(&v),
                GeometryKind::LinearFiniteField { q } => {
                    let r = Payload::finite(
                        v.iter().map(|&x| x.rem_euclid(q as i64) as u64).collect(),
                        q,
                    );
                    if r == Payload::Finite(Vec::new()) {
                        continue;
                    }
                    r
                }
                GeometryKind::AlgebraicFunctionField { .. } => return None,
            };
            return Some(alloc::vec![p]);
        }
    }

    fn equivalences(&self) -> Vec<Vec<usize>> {
        self.equivalences.clone()
    }

    /// Solves for the remaining coordinates from the first one (and, without
    /// a parameter, the second one).
    fn realizations(
        &self,
        m: &ColoredStructure,
        b: Option<&[Payload]>,
        budget: u64,
    ) -> Result<Enumeration> {
        let geom = m.geometry();
        let blacks: Vec<PointId> = m.blacks().ids().cloned().collect();
        let mut out = Enumeration {
            tuples: Vec::new(),
            complete: true,
        };
        let mut used = 0u64;
        let try_from = |x1: &PointId, b: &Payload, out: &mut Enumeration| -> Result<()> {
            let p1 = &m.point(x1).expect("listed id").payload;
            let mut ids = alloc::vec![x1.clone()];
            for j in 1..self.coeffs.len() {
                let Some(pj) = self.point(p1, j, b, &geom) else {
                    return Ok(());
                };
                match m.find_payload(&pj) {
                    Some(id) if m.color(id) == Some(Color::Black) => ids.push(id.clone()),
                    _ => return Ok(()),
                }
            }
            let xs = payloads_of(m, &ids)?;
            if realizes(self, &xs, core::slice::from_ref(b), &geom) {
                out.tuples.push(ids);
            }
            Ok(())
        };
        match b {
            Some(b) => {
                let b = b.first().ok_or_else(|| Error::Template {
                    name: self.name.clone(),
                    reason: "missing parameter".into(),
                })?;
                for x1 in &blacks {
                    used += 1;
                    if used > budget {
                        out.complete = false;
                        break;
                    }
                    try_from(x1, b, &mut out)?;
                }
            }
            None => {
                'outer: for x1 in &blacks {
                    for x2 in &blacks {
                        if x1 == x2 {
                            continue;
                        }
                        used += 1;
                        if used > budget {
                            out.complete = false;
                            break 'outer;
                        }
                        let p1 = m.point(x1).expect("listed id").payload.clone();
                        let p2 = m.point(x2).expect("listed id").payload.clone();
                        let Some(b) = self.recover(&[&[p1, p2]], &geom) else {
                            continue;
                        };
                        try_from(x1, &b[0], &mut out)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `x_j = x_1^{e_j}` in the function field, with `e_1 = 1` and the `e_j`
/// pairwise distinct positive integers. No parameter; rank 1.
#[derive(Clone, Debug)]
pub struct PowerTemplate {
    name: String,
    exponents: Vec<u32>,
}

impl PowerTemplate {
    pub fn new(name: impl Into<String>, exponents: Vec<u32>) -> Result<Self> {
        let name = name.into();
        let fail = |reason: &str| Error::Template {
            name: name.clone(),
            reason: reason.into(),
        };
        if exponents.len() < 2 {
            return Err(fail("needs at least two exponents"));
        }
        if exponents[0] != 1 {
            return Err(fail("first exponent must be 1"));
        }
        for (i, e) in exponents.iter().enumerate() {
            if *e == 0 || exponents[..i].contains(e) {
                return Err(fail("exponents must be distinct and positive"));
            }
        }
        Ok(PowerTemplate { name, exponents })
    }

    /// `P_n`: `x_j = x_1^j`.
    pub fn powers(n: usize) -> Self {
        PowerTemplate::new(alloc::format!("P{n}"), (1..=n as u32).collect())
            .expect("power exponents are valid")
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    fn point(&self, x1: &Payload, j: usize) -> Option<Payload> {
        let f = x1.as_function()?;
        Some(Payload::Function(f.pow(self.exponents[j] as i64)?))
    }
}

impl CodeTemplate for PowerTemplate {
    fn name(&self) -> &str {
        &self.name
    }

    fn arity(&self) -> usize {
        self.exponents.len()
    }

    fn rank(&self) -> usize {
        1
    }

    fn recovery_arity(&self) -> usize {
        1
    }

    fn param_arity(&self) -> usize {
        0
    }

    fn supports(&self, geom: &GeometryKind) -> bool {
        !geom.is_linear()
    }

    fn constraint(&self, xs: &[Payload], _b: &[Payload], _geom: &GeometryKind) -> bool {
        (1..xs.len()).all(|j| self.point(&xs[0], j).as_ref() == Some(&xs[j]))
    }

    fn recover(&self, tuples: &[&[Payload]], _geom: &GeometryKind) -> Option<Param> {
        tuples.first().map(|_| Vec::new())
    }

    fn build(
        &self,
        _b: &[Payload],
        generic: &[Payload],
        _geom: &GeometryKind,
    ) -> Option<Vec<Payload>> {
        let x1 = generic.first()?;
        (0..self.exponents.len())
            .map(|j| self.point(x1, j))
            .collect()
    }

    fn sample_parameter(&self, geom: &GeometryKind, _rng: &mut dyn RngCore) -> Option<Param> {
        (!geom.is_linear()).then(Vec::new)
    }

    fn realizations(
        &self,
        m: &ColoredStructure,
        b: Option<&[Payload]>,
        budget: u64,
    ) -> Result<Enumeration> {
        let geom = m.geometry();
        let mut out = Enumeration {
            tuples: Vec::new(),
            complete: true,
        };
        if b.is_some_and(|b| !b.is_empty()) {
            return Ok(out);
        }
        for (used, x1) in m.blacks().ids().enumerate() {
            if used as u64 >= budget {
                out.complete = false;
                break;
            }
            let p1 = m.point(x1).expect("listed id").payload.clone();
            let mut ids = alloc::vec![x1.clone()];
            let mut ok = true;
            for j in 1..self.exponents.len() {
                match self
                    .point(&p1, j)
                    .as_ref()
                    .and_then(|pj| m.find_payload(pj))
                {
                    Some(id) if m.color(id) == Some(Color::Black) => ids.push(id.clone()),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && realizes(self, &payloads_of(m, &ids)?, &[], &geom) {
                out.tuples.push(ids);
            }
        }
        Ok(out)
    }
}
