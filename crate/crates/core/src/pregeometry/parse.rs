//! Text syntax for payloads.
//!
//! Rationals are written `p/q` (or plain integers). Rational functions use
//! variables `t1..tn`, integer literals, `+ - * / ^` and parentheses, with the
//! usual precedence; `^` takes an integer exponent and binds tighter than
//! unary minus.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{RatFunc, Q};
use crate::error::Error;

pub fn parse_rational(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let err = |column: usize, message: &str| Error::Parse {
        column,
        message: alloc::format!("{message} in `{s}`"),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num.parse().map_err(|_| err(1, "bad numerator"))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| err(num.len() + 2, "bad denominator"))?,
        None => BigInt::from(1),
    };
    if d.is_zero() {
        return Err(err(num.len() + 2, "zero denominator"));
    }
    Ok(Q::new(n, d))
}

pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_ratfunc(s: &str) -> Result<RatFunc, Error> {
    let mut p = Parser {
        src: s.as_bytes(),
        text: s,
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: alloc::format!("{message} in `{}`", self.text),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFunc, Error> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' {
                acc.add(&rhs)
            } else {
                acc.sub(&rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, Error> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                acc.mul(&rhs)
            } else {
                acc.div(&rhs)
                    .ok_or_else(|| self.error("division by zero"))?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc, Error> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc, Error> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.integer()?;
            let e: i64 = e.try_into().map_err(|_| self.error("exponent too large"))?;
            let e = if neg { -e } else { e };
            return base
                .pow(e)
                .ok_or_else(|| self.error("negative power of zero"));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| self.error("bad integer"))
    }

    fn atom(&mut self) -> Result<RatFunc, Error> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b't') => {
                self.pos += 1;
                let idx = self.integer()?;
                let idx: u32 = idx
                    .try_into()
                    .map_err(|_| self.error("variable index too large"))?;
                if idx == 0 {
                    return Err(self.error("variables are numbered from t1"));
                }
                Ok(RatFunc::var(idx))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RatFunc::constant(Q::from_integer(n)))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses a list of rationals such as `["1/2", "0", "3"]`.
pub fn parse_rational_vector<S: AsRef<str>>(items: &[S]) -> Result<Vec<Q>, Error> {
    items.iter().map(|s| parse_rational(s.as_ref())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;

    #[test]
    fn precedence_and_powers() {
        let f = parse_ratfunc("t1 + 2*t2^2").unwrap();
        let expected = Poly::var(1).add(&Poly::var(2).pow(2).scale(&Q::from_integer(2.into())));
        assert_eq!(f, RatFunc::from(expected));
        let g = parse_ratfunc("-t1^2").unwrap();
        assert_eq!(g, RatFunc::from(Poly::var(1).pow(2).neg()));
    }

    #[test]
    fn quotients_are_canonical() {
        let a = parse_ratfunc("(t1^2 - t2^2)/(t1 - t2)").unwrap();
        let b = parse_ratfunc("t2 + t1").unwrap();
        assert_eq!(a, b);
        let c = parse_ratfunc("t1^-1").unwrap();
        assert_eq!(c, parse_ratfunc("1/t1").unwrap());
    }

    #[test]
    fn errors_carry_columns() {
        match parse_ratfunc("t1 + * t2") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_ratfunc("t0").is_err());
        assert!(parse_ratfunc("1/(t1-t1)").is_err());
        assert!(parse_rational("3/0").is_err());
        assert_eq!(
            parse_rational(" -4/6 ").unwrap(),
            Q::new((-2).into(), 3.into())
        );
    }
}
