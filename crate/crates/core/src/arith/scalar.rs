use core::fmt::Debug;

use num_traits::{One, Zero};

use super::ratfunc::RatFunc;
use super::Q;

/// Field operations needed by the elimination routines.
pub trait Scalar: Clone + PartialEq + Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `self / o`; callers guarantee `o` is nonzero.
    fn div(&self, o: &Self) -> Self;
    fn one_like(&self) -> Self;
    fn neg(&self) -> Self;
}

impl Scalar for Q {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
}

impl Scalar for RatFunc {
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RatFunc::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFunc::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        RatFunc::div(self, o).expect("division by nonzero rational function")
    }
    fn one_like(&self) -> Self {
        RatFunc::one()
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
}

/// An element of the prime field `F_q`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: u64, modulus: u64) -> Self {
        Fp {
            value: value % modulus,
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn pow(&self, mut e: u64) -> Fp {
        let m = self.modulus as u128;
        let mut base = self.value as u128;
        let mut acc: u128 = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Fp::new(acc as u64, self.modulus)
    }

    pub fn inverse(&self) -> Fp {
        self.pow(self.modulus - 2)
    }
}

impl Scalar for Fp {
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp::new(
            ((self.value as u128 + o.value as u128) % self.modulus as u128) as u64,
            self.modulus,
        )
    }
    fn sub(&self, o: &Self) -> Self {
        Fp::new(
            ((self.value as u128 + self.modulus as u128 - o.value as u128) % self.modulus as u128)
                as u64,
            self.modulus,
        )
    }
    fn mul(&self, o: &Self) -> Self {
        Fp::new(
            ((self.value as u128 * o.value as u128) % self.modulus as u128) as u64,
            self.modulus,
        )
    }
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inverse())
    }
    fn one_like(&self) -> Self {
        Fp::new(1, self.modulus)
    }
    fn neg(&self) -> Self {
        Fp::new(self.modulus - self.value, self.modulus)
    }
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_seven() {
        for v in 1..7 {
            let x = Fp::new(v, 7);
            assert_eq!(x.mul(&x.inverse()).value(), 1);
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(7) && is_prime(2_147_483_647));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(0));
    }
}
