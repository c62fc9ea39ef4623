use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};

/// Scalars of every supported coefficient ring are stored as exact rationals,
/// normalised to the ring's canonical representatives.
pub type Scalar = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoeffRing {
    Integers,
    IntegersMod(u64),
    Rationals,
}

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn int(v: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

impl CoeffRing {
    pub fn integers_mod(m: u64) -> Result<Self> {
        if m < 2 {
            bail!(Domain, "modulus must be at least 2, got {m}");
        }
        Ok(CoeffRing::IntegersMod(m))
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        self.reduce(int(v))
    }

    /// Brings a value that is known to lie in the ring to canonical form.
    pub fn reduce(&self, x: Scalar) -> Scalar {
        match self {
            CoeffRing::IntegersMod(m) => {
                let m = BigInt::from(*m);
                let n = x.numer().mod_floor(&m);
                if x.denom().is_one() {
                    return BigRational::from_integer(n);
                }
                let d = mod_inverse(&x.denom().mod_floor(&m), &m)
                    .expect("denominator invertible modulo m");
                BigRational::from_integer((n * d).mod_floor(&m))
            }
            _ => x,
        }
    }

    /// Checked conversion of an arbitrary rational into the ring.
    pub fn normalize(&self, x: Scalar) -> Result<Scalar> {
        match self {
            CoeffRing::Integers => {
                if !x.is_integer() {
                    bail!(Domain, "{x} is not an integer");
                }
                Ok(x)
            }
            CoeffRing::Rationals => Ok(x),
            CoeffRing::IntegersMod(m) => {
                let mm = BigInt::from(*m);
                if mod_inverse(&x.denom().mod_floor(&mm), &mm).is_none() {
                    bail!(Domain, "denominator of {x} is not invertible modulo {m}");
                }
                Ok(self.reduce(x))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.reduce(-a.clone())
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match self {
            CoeffRing::Integers => a.abs().is_one(),
            CoeffRing::Rationals => !a.is_zero(),
            CoeffRing::IntegersMod(m) => {
                let mm = BigInt::from(*m);
                mod_inverse(&a.numer().mod_floor(&mm), &mm).is_some()
            }
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if !self.is_unit(a) {
            return None;
        }
        match self {
            CoeffRing::IntegersMod(m) => {
                let mm = BigInt::from(*m);
                mod_inverse(&a.numer().mod_floor(&mm), &mm).map(BigRational::from_integer)
            }
            _ => Some(a.recip()),
        }
    }

    /// Exact division `a / b` inside the ring, if it exists.
    pub fn divide(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if b.is_zero() {
            return if a.is_zero() { Some(Scalar::zero()) } else { None };
        }
        match self {
            CoeffRing::Integers => {
                let (q, r) = a.numer().div_rem(b.numer());
                if r.is_zero() {
                    Some(BigRational::from_integer(q))
                } else {
                    None
                }
            }
            CoeffRing::Rationals => Some(a / b),
            CoeffRing::IntegersMod(_) => self.inv(b).map(|bi| self.mul(a, &bi)),
        }
    }

    pub fn is_field(&self) -> bool {
        match self {
            CoeffRing::Integers => false,
            CoeffRing::Rationals => true,
            CoeffRing::IntegersMod(m) => is_prime(*m),
        }
    }

    /// Rings on which Smith normal form and exact solving are supported.
    pub fn is_pid(&self) -> bool {
        matches!(self, CoeffRing::Integers) || self.is_field()
    }

    pub fn require_pid(&self) -> Result<()> {
        if !self.is_pid() {
            bail!(Unsupported, "{self} is not a principal ideal domain");
        }
        Ok(())
    }

    /// Field in which specialisations of Laurent polynomials take values.
    pub fn specialization_target(&self) -> CoeffRing {
        match self {
            CoeffRing::Integers => CoeffRing::Rationals,
            other => *other,
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "ZZ" | "Z" | "Integers" | "integers" => Ok(CoeffRing::Integers),
            "QQ" | "Q" | "Rationals" | "rationals" => Ok(CoeffRing::Rationals),
            _ => {
                let rest = t
                    .strip_prefix("ZZ/")
                    .or_else(|| t.strip_prefix("Z/"))
                    .ok_or_else(|| Error::Parse(format!("unknown ring {t:?}")))?;
                let m: u64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad modulus in {t:?}")))?;
                CoeffRing::integers_mod(m)
            }
        }
    }

    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(r) => (true, r.trim()),
            None => (false, t.strip_prefix('+').unwrap_or(t).trim()),
        };
        let v = match body.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad number {t:?}")))?;
                let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad number {t:?}")))?;
                if d.is_zero() {
                    bail!(Parse, "zero denominator in {t:?}");
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(
                body.parse().map_err(|_| Error::Parse(format!("bad number {t:?}")))?,
            ),
        };
        self.normalize(if neg { -v } else { v })
    }

    pub fn to_i64(&self, a: &Scalar) -> Option<i64> {
        if a.is_integer() {
            a.numer().to_i64()
        } else {
            None
        }
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Integers => write!(f, "ZZ"),
            CoeffRing::Rationals => write!(f, "QQ"),
            CoeffRing::IntegersMod(m) => write!(f, "ZZ/{m}"),
        }
    }
}

pub fn format_scalar(a: &Scalar) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_canonical_representatives() {
        let r = CoeffRing::IntegersMod(5);
        assert_eq!(r.from_int(-1), int(4));
        assert_eq!(r.parse_scalar("1/2").unwrap(), int(3));
        assert_eq!(r.inv(&int(2)).unwrap(), int(3));
        assert!(CoeffRing::integers_mod(1).is_err());
    }

    #[test]
    fn units() {
        assert!(CoeffRing::Integers.is_unit(&int(-1)));
        assert!(!CoeffRing::Integers.is_unit(&int(2)));
        assert!(CoeffRing::Rationals.is_unit(&int(2)));
        assert!(!CoeffRing::IntegersMod(6).is_unit(&int(2)));
        assert!(CoeffRing::IntegersMod(6).is_unit(&int(5)));
    }

    #[test]
    fn pid_detection() {
        assert!(CoeffRing::Integers.is_pid());
        assert!(CoeffRing::IntegersMod(7).is_pid());
        assert!(!CoeffRing::IntegersMod(6).is_pid());
    }

    #[test]
    fn ring_names_round_trip() {
        for r in [CoeffRing::Integers, CoeffRing::Rationals, CoeffRing::IntegersMod(11)] {
            assert_eq!(CoeffRing::parse(&r.to_string()).unwrap(), r);
        }
    }
}
