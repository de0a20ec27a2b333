//! Sparse multivariate polynomials over the rationals in variables `t1, t2, ...`.
//!
//! Terms are kept in a map keyed by [`Monomial`] under the lexicographic order
//! `t1 > t2 > ...`, so the leading term is the last entry of the map. Zero
//! coefficients are never stored, which makes structural equality coincide
//! with polynomial equality.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Q;

/// A power product `t_{v1}^{e1} * t_{v2}^{e2} * ...`, stored as `(variable, exponent)`
/// pairs sorted by variable with strictly positive exponents. Variables are 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        Monomial(alloc::vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial(merged)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: u32) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when every exponent of `other` is dominated.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let oe = other.0[j].1;
                j += 1;
                match e.cmp(&oe) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - oe)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((a.0, a.1.min(b.1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    fn without(&self, v: u32) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va == vb {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    } else if va < vb {
                        return Ordering::Greater;
                    } else {
                        return Ordering::Less;
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(v: u32) -> Self {
        Poly::term(Q::one(), Monomial::var(v))
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            Some(Q::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    /// Variables occurring with positive exponent, ascending.
    pub fn vars(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn max_var(&self) -> u32 {
        self.terms
            .keys()
            .filter_map(|m| m.0.last().map(|&(v, _)| v))
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: u32) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn has_var(&self, v: u32) -> bool {
        self.terms.keys().any(|m| m.degree_in(v) > 0)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, v: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e == 0 {
                continue;
            }
            let pairs =
                m.0.iter()
                    .map(|&(w, f)| if w == v { (w, f - 1) } else { (w, f) })
                    .collect();
            out.add_term(
                Monomial::from_pairs(pairs),
                c * Q::from_integer(BigInt::from(e)),
            );
        }
        out
    }

    /// Evaluates at a point; `value(v)` supplies the value of `t_v`.
    pub fn eval(&self, value: &impl Fn(u32) -> Q) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                t *= num_traits::pow(value(v), e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// The gcd of all monomials appearing in the polynomial.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |acc, m| acc.gcd(m))
    }

    /// Least common multiple of coefficient denominators over gcd of numerators;
    /// multiplying by the result makes all coefficients coprime integers.
    pub fn integer_normalizer(&self) -> Q {
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        if num_gcd.is_zero() {
            return Q::one();
        }
        Q::new(den_lcm, num_gcd.abs())
    }

    /// Substitutes `t_v := images(v)` for each variable for which `images` returns `Some`.
    pub fn substitute(&self, images: &impl Fn(u32) -> Option<Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            let mut kept = Vec::new();
            for &(v, e) in &m.0 {
                match images(v) {
                    Some(img) => t = t.mul(&img.pow(e)),
                    None => kept.push((v, e)),
                }
            }
            t = t.mul_term(&Monomial(kept), &Q::one());
            out = out.add(&t);
        }
        out
    }

    /// Coefficients of `self` viewed as a polynomial in `t_v` over the other variables.
    fn coeffs_in(&self, v: u32) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            out.entry(e).or_default().add_term(m.without(v), c.clone());
        }
        out
    }

    fn lc_in(&self, v: u32) -> Poly {
        self.coeffs_in(v)
            .into_iter()
            .next_back()
            .map(|(_, c)| c)
            .unwrap_or_default()
    }

    /// Content with respect to `t_v`: the monic gcd of the coefficients.
    fn content_in(&self, v: u32) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(v).values() {
            g = gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_part_in(&self, v: u32) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides")
    }

    /// Pseudo-remainder of `self` by `g` with respect to `t_v` (up to a unit of
    /// the coefficient ring, which is irrelevant for gcd purposes).
    fn prem_in(&self, g: &Poly, v: u32) -> Poly {
        let dg = g.degree_in(v);
        let lcg = g.lc_in(v);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= dg {
            let dr = r.degree_in(v);
            let lcr = r.lc_in(v);
            let shift = Monomial::var(v).pow_exp(dr - dg);
            let shifted = g.mul(&lcr).mul_term(&shift, &Q::one());
            r = r.mul(&lcg).sub(&shifted);
            let norm = r.integer_normalizer();
            r = r.scale(&norm);
        }
        r
    }
}

impl Monomial {
    fn pow_exp(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, f)| (v, f * e)).collect())
    }
}

/// Monic greatest common divisor of two polynomials; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    // Common monomial factor first; cheap and frequent for payloads like t1^2.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    if !ma.is_one() || !mb.is_one() {
        let a1 = a
            .div_exact(&Poly::term(Q::one(), ma))
            .expect("monomial divides");
        let b1 = b
            .div_exact(&Poly::term(Q::one(), mb))
            .expect("monomial divides");
        let g = gcd_no_monomial(&a1, &b1);
        return g.mul_term(&mg, &Q::one()).monic();
    }
    gcd_no_monomial(a, b)
}

fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.monic() == b.monic() {
        return a.monic();
    }
    let va = a.vars();
    let vb = b.vars();
    let x = match (va.first(), vb.first()) {
        (Some(&x), Some(&y)) => x.min(y),
        _ => return Poly::one(),
    };
    if !a.has_var(x) {
        return gcd(a, &b.content_in(x));
    }
    if !b.has_var(x) {
        return gcd(&a.content_in(x), b);
    }
    let ca = a.content_in(x);
    let cb = b.content_in(x);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut f, mut g) = if pa.degree_in(x) >= pb.degree_in(x) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r = f.prem_in(&g, x);
        if r.is_zero() {
            break;
        }
        if r.degree_in(x) == 0 {
            return c.monic();
        }
        f = g;
        g = r.primitive_part_in(x);
    }
    c.mul(&g.primitive_part_in(x)).monic()
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "t{v}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write_q(f, &abs)?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else if abs.is_integer() {
                write!(f, "{}*{m}", abs.numer())?;
            } else {
                write!(f, "({}/{})*{m}", abs.numer(), abs.denom())?;
            }
        }
        Ok(())
    }
}

fn write_q(f: &mut fmt::Formatter<'_>, q: &Q) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "({}/{})", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: u32) -> Poly {
        Poly::var(v)
    }

    fn c(k: i64) -> Poly {
        Poly::constant(Q::from_integer(k.into()))
    }

    #[test]
    fn lex_order_prefers_earlier_variables() {
        let a = Monomial::var(1);
        let b = Monomial::from_pairs(alloc::vec![(2, 5)]);
        assert!(a > b);
        let a2 = Monomial::from_pairs(alloc::vec![(1, 2)]);
        assert!(a2 > a);
        assert!(Monomial::one() < b);
    }

    #[test]
    fn exact_division_and_failure() {
        let p = t(1).mul(&t(1)).sub(&t(2).mul(&t(2)));
        let d = t(1).sub(&t(2));
        assert_eq!(p.div_exact(&d), Some(t(1).add(&t(2))));
        assert_eq!(t(1).add(&c(1)).div_exact(&t(2)), None);
    }

    #[test]
    fn gcd_of_products() {
        let f = t(1).add(&t(2));
        let g = t(1).sub(&c(3));
        let h = t(2).mul(&t(3)).add(&c(1));
        let a = f.mul(&g);
        let b = f.mul(&h).scale(&Q::from_integer(7.into()));
        assert_eq!(gcd(&a, &b), f.monic());
        assert!(gcd(&g, &h).is_one());
        assert_eq!(gcd(&t(1).pow(3), &t(1).pow(2).mul(&t(2))), t(1).pow(2));
    }

    #[test]
    fn derivative_and_eval() {
        let p = t(1).pow(2).mul(&t(2)).add(&c(3));
        assert_eq!(
            p.derivative(1),
            t(1).mul(&t(2)).scale(&Q::from_integer(2.into()))
        );
        let v = p.eval(&|v| Q::from_integer((v as i64 + 1).into()));
        assert_eq!(v, Q::from_integer(15.into()));
    }
}
