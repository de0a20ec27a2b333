//! Rational functions in `t1, t2, ...` with rational coefficients, kept in a
//! canonical reduced form: numerator and denominator coprime, denominator
//! monic under the lexicographic order, and `0 = 0/1`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use super::poly::{gcd, Poly};
use super::Q;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::from(Poly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from(Poly::one())
    }

    pub fn var(v: u32) -> Self {
        RatFunc::from(Poly::var(v))
    }

    pub fn constant(c: Q) -> Self {
        RatFunc::from(Poly::constant(c))
    }

    /// Builds `num / den` in canonical form; `None` when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = den.constant_value() {
            return RatFunc {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_var(&self) -> u32 {
        self.num.max_var().max(self.den.max_var())
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from(self.num.add(&o.num));
        }
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        Self::reduce(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from(self.num.mul(&o.num));
        }
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, k: &Q) -> RatFunc {
        if k.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Option<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(&o.recip()?))
    }

    pub fn pow(&self, e: i64) -> Option<RatFunc> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Some(RatFunc {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// Partial derivative with respect to `t_v`.
    pub fn derivative(&self, v: u32) -> RatFunc {
        let dn = self.num.derivative(v);
        if self.den.is_one() {
            return RatFunc::from(dn);
        }
        let dd = self.den.derivative(v);
        Self::reduce(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// Value at a point, or `None` if the denominator vanishes there.
    pub fn eval(&self, value: &impl Fn(u32) -> Q) -> Option<Q> {
        let d = self.den.eval(value);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(value) / d)
    }

    /// Substitutes `t_v := images(v)`; `None` if the result has a zero denominator.
    pub fn substitute(&self, images: &impl Fn(u32) -> Option<RatFunc>) -> Option<RatFunc> {
        fn sub_poly(p: &Poly, images: &impl Fn(u32) -> Option<RatFunc>) -> RatFunc {
            let mut acc = RatFunc::zero();
            for (m, c) in p.terms() {
                let mut t = RatFunc::constant(c.clone());
                for &(v, e) in m.pairs() {
                    let img = images(v).unwrap_or_else(|| RatFunc::var(v));
                    t = t.mul(&img.pow(e as i64).expect("nonnegative power"));
                }
                acc = acc.add(&t);
            }
            acc
        }
        let n = sub_poly(&self.num, images);
        if self.den.is_one() {
            return Some(n);
        }
        n.div(&sub_poly(&self.den, images))
    }

    pub fn to_string_compact(&self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap_num = self.num.num_terms() > 1;
        let wrap_den = self.den.num_terms() > 1 || !self.den.terms().all(|(_, c)| c.is_one());
        match (wrap_num, wrap_den) {
            (true, true) => write!(f, "({})/({})", self.num, self.den),
            (true, false) => write!(f, "({})/{}", self.num, self.den),
            (false, true) => write!(f, "{}/({})", self.num, self.den),
            (false, false) => write!(f, "{}/{}", self.num, self.den),
        }
    }
}
