//! Coefficient fields: the rationals and prime fields `F_p` with `p < 2^63`.
//!
//! Coefficients are always carried as [`BigRational`]. Over `F_p` a
//! coefficient is an integer in `[0, p)` with denominator one.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Coeff = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    /// Prime field `F_p`; rejects composite `p` and anything at or above `2^63`.
    pub fn prime(p: u64) -> Result<Field> {
        if p >= 1 << 63 || !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    /// Field of the given characteristic: 0 gives the rationals.
    pub fn with_characteristic(p: u64) -> Result<Field> {
        if p == 0 {
            Ok(Field::Rationals)
        } else {
            Field::prime(p)
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Coeff {
        Coeff::zero()
    }

    pub fn one(&self) -> Coeff {
        Coeff::one()
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> Coeff {
        let n = n.into();
        match self {
            Field::Rationals => Coeff::from_integer(n),
            Field::Prime(p) => Coeff::from_integer(n.mod_floor(&BigInt::from(*p))),
        }
    }

    /// Maps a rational number into this field.
    pub fn from_rational(&self, q: &BigRational) -> Result<Coeff> {
        match self {
            Field::Rationals => Ok(q.clone()),
            Field::Prime(p) => {
                let pb = BigInt::from(*p);
                let den = q.denom().mod_floor(&pb);
                if den.is_zero() {
                    return Err(Error::CoefficientNotInvertible(*p));
                }
                let inv = mod_inverse(&den, &pb);
                Ok(Coeff::from_integer((q.numer() * inv).mod_floor(&pb)))
            }
        }
    }

    fn reduce(&self, c: Coeff) -> Coeff {
        match self {
            Field::Rationals => c,
            Field::Prime(p) => {
                debug_assert!(c.denom().is_one());
                Coeff::from_integer(c.numer().mod_floor(&BigInt::from(*p)))
            }
        }
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        if a.is_integer() && b.is_integer() {
            return self.reduce(Coeff::from_integer(a.numer() + b.numer()));
        }
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        if a.is_integer() && b.is_integer() {
            return self.reduce(Coeff::from_integer(a.numer() - b.numer()));
        }
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        if a.is_integer() && b.is_integer() {
            return self.reduce(Coeff::from_integer(a.numer() * b.numer()));
        }
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        self.reduce(-a)
    }

    pub fn inv(&self, a: &Coeff) -> Result<Coeff> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Field::Rationals => Ok(a.recip()),
            Field::Prime(p) => {
                let pb = BigInt::from(*p);
                Ok(Coeff::from_integer(mod_inverse(a.numer(), &pb)))
            }
        }
    }

    pub fn div(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Coeff, mut e: u64) -> Coeff {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Symmetric representative used for printing: over `F_p` values above
    /// `p/2` are shown as negative integers.
    pub fn display_value(&self, c: &Coeff) -> Coeff {
        match self {
            Field::Rationals => c.clone(),
            Field::Prime(p) => {
                let pb = BigInt::from(*p);
                let n = c.numer();
                if n * 2 > pb {
                    Coeff::from_integer(n - pb)
                } else {
                    c.clone()
                }
            }
        }
    }

    /// True when the printed form of `c` would start with a minus sign.
    pub fn is_negative_display(&self, c: &Coeff) -> bool {
        self.display_value(c).is_negative()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// Inverse of `a` modulo `m`; `a` must be a unit.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}
