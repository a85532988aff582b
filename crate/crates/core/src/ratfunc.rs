//! Rational functions in canonical reduced form.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::poly::{Polynomial, Ring};

/// `numerator / denominator` with coprime parts and a canonical
/// denominator (monic over a prime field, integer-primitive with positive
/// leading coefficient over the rationals).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Reduces `num / den` to canonical form.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<RationalFunction> {
        num.ring().check_same(den.ring())?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        if g.is_one() {
            return Ok(RationalFunction::from_coprime(num, den));
        }
        let num = num.div_exact(&g).expect("gcd divides numerator");
        let den = den.div_exact(&g).expect("gcd divides denominator");
        Ok(RationalFunction::from_coprime(num, den))
    }

    /// Normalizes the unit of already coprime parts.
    pub(crate) fn from_coprime(num: Polynomial, den: Polynomial) -> RationalFunction {
        debug_assert!(!den.is_zero());
        let ring = num.ring().clone();
        if num.is_zero() {
            return RationalFunction { num, den: Polynomial::one(&ring) };
        }
        let u = den.normalizing_unit();
        if u.is_one() {
            return RationalFunction { num, den };
        }
        let inv = ring.field().inv(&u).expect("unit is nonzero");
        RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: Polynomial) -> RationalFunction {
        let den = Polynomial::one(p.ring());
        RationalFunction { num: p, den }
    }

    pub fn zero(ring: &Ring) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::zero(ring))
    }

    pub fn one(ring: &Ring) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::one(ring))
    }

    pub fn constant(ring: &Ring, c: Coeff) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::constant(ring, c))
    }

    pub fn var(ring: &Ring, index: usize) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::var(ring, index))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn into_parts(self) -> (Polynomial, Polynomial) {
        (self.num, self.den)
    }

    pub fn ring(&self) -> &Ring {
        self.num.ring()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial value when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        let d = self.den.constant_value()?;
        let inv = self.ring().field().inv(&d).ok()?;
        Some(self.num.scale(&inv))
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Coeff> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        self.ring().field().div(&n, &d).ok()
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.num.uses_var(var) || self.den.uses_var(var)
    }

    /// Equality by cross-multiplication, independent of canonical form.
    pub fn cross_equal(&self, other: &RationalFunction) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn try_add(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.ring().check_same(other.ring())?;
        Ok(self.add_impl(other, false))
    }

    pub fn try_sub(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.ring().check_same(other.ring())?;
        Ok(self.add_impl(other, true))
    }

    pub fn try_mul(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.ring().check_same(other.ring())?;
        Ok(self.mul_impl(other))
    }

    pub fn try_div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.ring().check_same(other.ring())?;
        Ok(self.mul_impl(&other.inv()?))
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RationalFunction::from_coprime(self.den.clone(), self.num.clone()))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<RationalFunction> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).map_err(|_| Error::Invalid("exponent too large".into()))?;
        Ok(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) })
    }

    // Henrici: a/b + c/d with g = gcd(b, d).
    fn add_impl(&self, other: &RationalFunction, subtract: bool) -> RationalFunction {
        let c = if subtract { -&other.num } else { other.num.clone() };
        if self.den == other.den {
            let num = &self.num + &c;
            return RationalFunction::new(num, self.den.clone()).expect("nonzero denominator");
        }
        let g = self.den.gcd(&other.den);
        if g.is_one() {
            let num = &(&self.num * &other.den) + &(&c * &self.den);
            let den = &self.den * &other.den;
            return RationalFunction::from_coprime(num, den);
        }
        let bg = self.den.div_exact(&g).unwrap();
        let dg = other.den.div_exact(&g).unwrap();
        let num = &(&self.num * &dg) + &(&c * &bg);
        let g2 = num.gcd(&g);
        let (num, g) = if g2.is_one() {
            (num, g)
        } else {
            (num.div_exact(&g2).unwrap(), g.div_exact(&g2).unwrap())
        };
        RationalFunction::from_coprime(num, &(&bg * &dg) * &g)
    }

    // (a/b)(c/d) cancelling gcd(a, d) and gcd(c, b).
    fn mul_impl(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return RationalFunction::zero(self.ring());
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let a = self.num.div_exact(&g1).unwrap();
        let d = other.den.div_exact(&g1).unwrap();
        let c = other.num.div_exact(&g2).unwrap();
        let b = self.den.div_exact(&g2).unwrap();
        RationalFunction::from_coprime(&a * &c, &b * &d)
    }

    pub fn scale(&self, c: &Coeff) -> RationalFunction {
        RationalFunction::from_coprime(self.num.scale(c), self.den.clone())
    }

    /// Exact value at a point.
    pub fn evaluate(&self, point: &[Coeff]) -> Result<Coeff> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        let n = self.num.evaluate(point)?;
        self.ring().field().div(&n, &d)
    }

    /// Moves the function into another ring with the same field, matching
    /// variables by name.
    pub fn rename_into(&self, target: &Ring) -> Result<RationalFunction> {
        Ok(RationalFunction { num: self.num.rename_into(target)?, den: self.den.rename_into(target)? })
    }

    pub fn derivative(&self, var: usize) -> RationalFunction {
        // (n/d)' = (n' d - n d') / d^2
        let num = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        RationalFunction::new(num, self.den.pow(2)).expect("nonzero denominator")
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}

macro_rules! rf_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$method(&rhs)
            }
        }
    };
}

rf_binop!(Add, add, try_add);
rf_binop!(Sub, sub, try_sub);
rf_binop!(Mul, mul, try_mul);
rf_binop!(Div, div, try_div);

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn setup() -> (Ring, RationalFunction, RationalFunction) {
        let r = Ring::new(Field::Rationals, &["x", "y"]).unwrap();
        (r.clone(), RationalFunction::var(&r, 0), RationalFunction::var(&r, 1))
    }

    #[test]
    fn product_cancels() {
        let (_, x, y) = setup();
        assert!((&(&x / &y) * &(&y / &x)).is_one());
    }

    #[test]
    fn inverse_swaps() {
        let r = Ring::new(Field::Rationals, &["z1"]).unwrap();
        let z = RationalFunction::var(&r, 0);
        let one = RationalFunction::one(&r);
        let q = &(&one - &z) / &(&one + &z);
        assert_eq!(q.inv().unwrap(), &(&one + &z) / &(&one - &z));
    }

    #[test]
    fn reduced_on_construction() {
        let (r, x, _) = setup();
        let one = Polynomial::one(&r);
        let xp = x.numerator().clone();
        let f = RationalFunction::new(&xp.pow(2) - &one, &xp - &one).unwrap();
        assert_eq!(f, RationalFunction::from_poly(&xp + &one));
        assert!(RationalFunction::new(one.clone(), Polynomial::zero(&r)).is_err());
    }

    #[test]
    fn denominator_is_canonical() {
        let (r, x, _) = setup();
        let f = &x / &RationalFunction::from_int_poly(&r, -4);
        assert!(f.denominator().is_one());
        assert_eq!(f.numerator().leading_coeff(), Coeff::new((-1).into(), 4.into()));
    }

    #[test]
    fn zero_has_no_inverse() {
        let (r, ..) = setup();
        assert_eq!(RationalFunction::zero(&r).inv(), Err(Error::DivisionByZero));
    }

    impl RationalFunction {
        fn from_int_poly(r: &Ring, n: i64) -> RationalFunction {
            RationalFunction::from_poly(Polynomial::from_int(r, n))
        }
    }
}
