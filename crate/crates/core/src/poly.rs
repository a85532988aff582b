//! Sparse multivariate polynomials in canonical form.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};
use crate::monomial::Monomial;

/// A coefficient field together with an ordered list of variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    field: Field,
    vars: Arc<[String]>,
}

impl Ring {
    pub fn new<S: AsRef<str>>(field: Field, vars: &[S]) -> Result<Ring> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() || vars[..i].contains(v) {
                return Err(Error::Invalid(format!("bad or duplicate variable name `{v}`")));
            }
        }
        Ok(Ring { field, vars: vars.into() })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Same variables over another field.
    pub fn with_field(&self, field: Field) -> Ring {
        Ring { field, vars: self.vars.clone() }
    }

    /// This ring's variables followed by `extra`.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Ring> {
        let mut all: Vec<String> = self.vars.to_vec();
        all.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Ring::new(self.field, &all)
    }

    pub(crate) fn check_same(&self, other: &Ring) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: format!("{} {}", self.field, self.vars.join(",")),
                right: format!("{} {}", other.field, other.vars.join(",")),
            })
        }
    }
}

/// Sparse polynomial: a map from monomials to nonzero coefficients.
///
/// Terms are kept in ascending lex order, so the leading term is the last
/// entry. Two polynomials are equal iff their rings and term maps agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Polynomial {
        Polynomial { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring) -> Polynomial {
        Polynomial::constant(ring, Coeff::one())
    }

    /// Constant polynomial; `c` is mapped into the ring's field.
    pub fn constant(ring: &Ring, c: Coeff) -> Polynomial {
        let c = ring.field.from_rational(&c).expect("constant not representable in field");
        Polynomial::from_reduced_terms(ring, std::iter::once((Monomial::one(ring.nvars()), c)))
    }

    pub fn from_int(ring: &Ring, n: i64) -> Polynomial {
        Polynomial::constant(ring, Coeff::from_integer(n.into()))
    }

    pub fn var(ring: &Ring, index: usize) -> Polynomial {
        Polynomial::monomial(ring, Monomial::var(ring.nvars(), index, 1), Coeff::one())
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<Polynomial> {
        Ok(Polynomial::var(ring, ring.index_of(name)?))
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: Coeff) -> Polynomial {
        assert_eq!(m.nvars(), ring.nvars());
        let c = ring.field.from_rational(&c).expect("coefficient not representable in field");
        Polynomial::from_reduced_terms(ring, std::iter::once((m, c)))
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms with
    /// rational coefficients, mapping them into the ring's field.
    pub fn from_terms<I>(ring: &Ring, terms: I) -> Result<Polynomial>
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let field = ring.field;
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            if m.nvars() != ring.nvars() {
                return Err(Error::Invalid("exponent vector length mismatch".into()));
            }
            let c = field.from_rational(&c)?;
            accumulate(field, &mut map, m, c);
        }
        Ok(Polynomial { ring: ring.clone(), terms: map })
    }

    /// Terms whose coefficients are already canonical field elements.
    pub(crate) fn from_reduced_terms<I>(ring: &Ring, terms: I) -> Polynomial
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            accumulate(ring.field, &mut map, m, c);
        }
        Polynomial { ring: ring.clone(), terms: map }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial (zero for the zero polynomial).
    pub fn constant_value(&self) -> Option<Coeff> {
        if self.is_zero() {
            return Some(Coeff::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Coeff {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(Coeff::zero)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var)).max().unwrap_or(0)
    }

    /// Lowest exponent of `var` over all terms (0 for the zero polynomial).
    pub fn low_degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var)).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn low_total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).min().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exp(var) > 0)
    }

    /// Indices of variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars()).filter(|&v| self.uses_var(v)).collect()
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.ring.check_same(&other.ring)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.ring.check_same(&other.ring)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.ring.check_same(&other.ring)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= other.terms.len() { (self, other) } else { (other, self) };
        let mut terms = big.terms.clone();
        for (m, c) in &small.terms {
            accumulate(self.ring.field, &mut terms, m.clone(), c.clone());
        }
        Polynomial { ring: self.ring.clone(), terms }
    }

    fn sub_unchecked(&self, other: &Polynomial) -> Polynomial {
        let field = self.ring.field;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(field, &mut terms, m.clone(), field.neg(c));
        }
        Polynomial { ring: self.ring.clone(), terms }
    }

    fn mul_unchecked(&self, other: &Polynomial) -> Polynomial {
        let field = self.ring.field;
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(field, &mut terms, ma.mul(mb), field.mul(ca, cb));
            }
        }
        Polynomial { ring: self.ring.clone(), terms }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplies every coefficient by a field element.
    pub fn scale(&self, c: &Coeff) -> Polynomial {
        let field = self.ring.field;
        let c = field.from_rational(c).expect("scalar not representable in field");
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), field.mul(a, &c))).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Polynomial {
        let field = self.ring.field;
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let terms = self.terms.iter().map(|(k, a)| (k.mul(m), field.mul(a, c))).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    /// `self -= c * m * other`, in place.
    pub(crate) fn sub_scaled_shifted(&mut self, other: &Polynomial, m: &Monomial, c: &Coeff) {
        let field = self.ring.field;
        let neg = field.neg(c);
        for (k, a) in &other.terms {
            accumulate(field, &mut self.terms, k.mul(m), field.mul(a, &neg));
        }
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let field = self.ring.field;
        let terms = self.terms.iter().filter(|(m, _)| m.exp(var) > 0).map(|(m, c)| {
            let e = m.exp(var);
            (m.with_exp(var, e - 1), field.mul(c, &field.from_int(e)))
        });
        Polynomial::from_reduced_terms(&self.ring, terms)
    }

    pub fn derivative_named(&self, name: &str) -> Result<Polynomial> {
        Ok(self.derivative(self.ring.index_of(name)?))
    }

    /// Coefficients with respect to `var`: entry `i` multiplies `var^i`.
    /// The coefficient polynomials stay in the same ring and do not use `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        if self.is_zero() {
            return Vec::new();
        }
        let deg = self.degree_in(var) as usize;
        let mut maps: Vec<BTreeMap<Monomial, Coeff>> = vec![BTreeMap::new(); deg + 1];
        for (m, c) in &self.terms {
            maps[m.exp(var) as usize].insert(m.with_exp(var, 0), c.clone());
        }
        maps.into_iter().map(|t| Polynomial { ring: self.ring.clone(), terms: t }).collect()
    }

    pub fn from_coefficients_in(ring: &Ring, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                debug_assert_eq!(m.exp(var), 0);
                terms.insert(m.with_exp(var, i as u32), a.clone());
            }
        }
        Polynomial { ring: ring.clone(), terms }
    }

    /// Reinterprets this polynomial in `target`, matching variables by name.
    /// Variables that do not occur may be missing from `target`.
    pub fn rename_into(&self, target: &Ring) -> Result<Polynomial> {
        if &self.ring == target {
            return Ok(self.clone());
        }
        if self.ring.field != target.field {
            return Err(Error::Invalid(format!(
                "cannot move a polynomial over {} into {}",
                self.ring.field, target.field
            )));
        }
        let mut map = Vec::with_capacity(self.ring.nvars());
        for v in self.support_vars() {
            map.push((v, target.index_of(&self.ring.vars[v])?));
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u32; target.nvars()];
            for &(from, to) in &map {
                e[to] = m.exp(from);
            }
            (Monomial::from_exponents(&e), c.clone())
        });
        Ok(Polynomial::from_reduced_terms(target, terms))
    }

    /// Coefficientwise image in another field, e.g. reduction modulo p.
    pub fn map_field(&self, target: &Ring) -> Result<Polynomial> {
        if target.nvars() != self.ring.nvars() {
            return Err(Error::Invalid("variable count mismatch".into()));
        }
        Polynomial::from_terms(target, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Exact value at a point (one field element per ring variable).
    pub fn evaluate(&self, point: &[Coeff]) -> Result<Coeff> {
        if point.len() != self.ring.nvars() {
            return Err(Error::Invalid("evaluation point has wrong length".into()));
        }
        let field = self.ring.field;
        let point: Vec<Coeff> = point.iter().map(|c| field.from_rational(c)).collect::<Result<_>>()?;
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = field.mul(&t, &field.pow(&point[v], e as u64));
                }
            }
            acc = field.add(&acc, &t);
        }
        Ok(acc)
    }

    /// The unit `u` such that `self / u` is the canonical associate:
    /// integer-primitive with positive leading coefficient over the
    /// rationals, monic over a prime field.
    pub fn normalizing_unit(&self) -> Coeff {
        if self.is_zero() {
            return Coeff::one();
        }
        match self.ring.field {
            Field::Prime(_) => self.leading_coeff(),
            Field::Rationals => {
                let mut lcm = BigInt::one();
                for c in self.terms.values() {
                    lcm = lcm.lcm(c.denom());
                }
                let mut g = BigInt::zero();
                for c in self.terms.values() {
                    g = g.gcd(&(c.numer() * (&lcm / c.denom())));
                }
                let u = Coeff::new(g, lcm);
                if self.leading_coeff().is_negative() {
                    -u
                } else {
                    u
                }
            }
        }
    }

    pub fn canonical(&self) -> Polynomial {
        let u = self.normalizing_unit();
        if u.is_one() {
            return self.clone();
        }
        let inv = self.ring.field.inv(&u).expect("normalizing unit is nonzero");
        self.scale(&inv)
    }

    pub fn is_canonical(&self) -> bool {
        self.normalizing_unit().is_one()
    }
}

fn accumulate(field: Field, map: &mut BTreeMap<Monomial, Coeff>, m: Monomial, c: Coeff) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let s = field.add(e.get(), &c);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                if let Err(e) = self.ring.check_same(&rhs.ring) {
                    panic!("{e}");
                }
                self.$inner(rhs)
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add_unchecked);
binop!(Sub, sub, sub_unchecked);
binop!(Mul, mul, mul_unchecked);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let field = self.ring.field;
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), field.neg(c))).collect();
        Polynomial { ring: self.ring.clone(), terms }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(field: Field) -> Ring {
        Ring::new(field, &["x", "y"]).unwrap()
    }

    #[test]
    fn cancellation() {
        let r = ring(Field::Rationals);
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        assert_eq!(&(&x - &y) + &y, x);
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn frobenius_in_char_two() {
        let r = ring(Field::Prime(2));
        let s = Polynomial::var(&r, 0) + Polynomial::var(&r, 1);
        let expected = Polynomial::var(&r, 0).pow(2) + Polynomial::var(&r, 1).pow(2);
        assert_eq!(&s * &s, expected);
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = Polynomial::var(&ring(Field::Rationals), 0);
        let b = Polynomial::var(&Ring::new(Field::Rationals, &["x", "z"]).unwrap(), 0);
        assert!(matches!(a.try_add(&b), Err(Error::RingMismatch { .. })));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn derivative_kills_pth_powers() {
        let r = Ring::new(Field::Prime(3), &["x"]).unwrap();
        assert!(Polynomial::var(&r, 0).pow(3).derivative(0).is_zero());
        let q = Ring::new(Field::Rationals, &["v1", "v3"]).unwrap();
        let p = Polynomial::var(&q, 0).pow(2) * Polynomial::var(&q, 1);
        assert_eq!(p.derivative(0), Polynomial::from_int(&q, 2) * Polynomial::var(&q, 0) * Polynomial::var(&q, 1));
    }

    #[test]
    fn canonical_associate() {
        let r = ring(Field::Rationals);
        let p = Polynomial::from_int(&r, -4) * Polynomial::var(&r, 0) + Polynomial::from_int(&r, 6);
        let c = p.canonical();
        assert_eq!(c, Polynomial::from_int(&r, 2) * Polynomial::var(&r, 0) - Polynomial::from_int(&r, 3));
        let half = Polynomial::constant(&r, Coeff::new(1.into(), 2.into())) * Polynomial::var(&r, 1);
        assert_eq!(half.canonical(), Polynomial::var(&r, 1));
    }

    #[test]
    fn evaluate_over_f2() {
        let r = Ring::new(Field::Prime(2), &["x"]).unwrap();
        let p = Polynomial::var(&r, 0).pow(2) + Polynomial::one(&r);
        assert!(p.evaluate(&[Coeff::one()]).unwrap().is_zero());
    }
}
