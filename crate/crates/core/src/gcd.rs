//! Exact division, contents and multivariate GCD.
//!
//! The GCD is computed recursively: contents with respect to a main
//! variable are split off, and the primitive parts are handled with the
//! subresultant polynomial remainder sequence over the coefficient ring
//! `k[other variables]`. Over the rationals every input is first scaled to
//! an integer-primitive associate so the sequence runs over the integers.

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::monomial::Monomial;
use crate::poly::Polynomial;

impl Polynomial {
    /// Returns `q` with `divisor * q == self`.
    ///
    /// Division by zero and non-exact division are reported as distinct errors.
    pub fn div_exact(&self, divisor: &Polynomial) -> Result<Polynomial> {
        self.ring().check_same(divisor.ring())?;
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        if self.is_zero() {
            return Ok(Polynomial::zero(self.ring()));
        }
        for v in 0..self.ring().nvars() {
            if divisor.degree_in(v) > self.degree_in(v) || divisor.low_degree_in(v) > self.low_degree_in(v) {
                return Err(Error::NonExactDivision);
            }
        }
        let field = self.field();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm).ok_or(Error::NonExactDivision)?;
            let qc = field.div(c, &lc)?;
            rem.sub_scaled_shifted(divisor, &qm, &qc);
            quot.push((qm, qc));
        }
        Ok(Polynomial::from_reduced_terms(self.ring(), quot))
    }

    /// True when `divisor` divides `self` exactly (`divisor` nonzero).
    pub fn is_divisible_by(&self, divisor: &Polynomial) -> bool {
        self.div_exact(divisor).is_ok()
    }

    /// Canonical GCD. `gcd(0, 0) = 0`.
    ///
    /// Panics when the operands live in different rings; see [`Polynomial::try_gcd`].
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        self.try_gcd(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_gcd(&self, other: &Polynomial) -> Result<Polynomial> {
        self.ring().check_same(other.ring())?;
        if self.is_zero() {
            return Ok(other.canonical());
        }
        if other.is_zero() {
            return Ok(self.canonical());
        }
        Ok(gcd_nonzero(&self.canonical(), &other.canonical()).canonical())
    }

    /// GCD of the coefficients with respect to `var` (canonical, never zero
    /// for a nonzero input).
    pub fn content_in(&self, var: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero(self.ring());
        }
        content_of(&self.coefficients_in(var), self.ring())
    }

    pub fn primitive_part_in(&self, var: usize) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.div_exact(&self.content_in(var)).expect("content divides")
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let n = self.ring().nvars();
        let exps: Vec<u32> = (0..n).map(|v| self.low_degree_in(v)).collect();
        Monomial::from_exponents(&exps)
    }
}

fn content_of(coeffs: &[Polynomial], ring: &crate::poly::Ring) -> Polynomial {
    let mut nonzero: Vec<&Polynomial> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| (c.total_degree(), c.num_terms()));
    let mut g: Option<Polynomial> = None;
    for c in nonzero {
        g = Some(match g {
            None => c.canonical(),
            Some(g) => gcd_nonzero(&g, &c.canonical()).canonical(),
        });
        if g.as_ref().is_some_and(Polynomial::is_constant) {
            return Polynomial::one(ring);
        }
    }
    g.unwrap_or_else(|| Polynomial::zero(ring))
}

/// GCD of two nonzero canonical polynomials, up to a unit.
fn gcd_nonzero(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let ring = a.ring().clone();
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(&ring);
    }
    if a == b {
        return a.clone();
    }

    // Split off monomial contents.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg: Vec<u32> = ma.exponents().iter().zip(mb.exponents()).map(|(x, y)| *x.min(y)).collect();
    let mono = Polynomial::monomial(&ring, Monomial::from_exponents(&mg), Coeff::from_integer(1.into()));
    let mut a = if ma.is_one() { a.clone() } else { a.div_exact(&Polynomial::monomial(&ring, ma, ring.field().one())).unwrap() };
    let mut b = if mb.is_one() { b.clone() } else { b.div_exact(&Polynomial::monomial(&ring, mb, ring.field().one())).unwrap() };

    // A variable used by only one side can only contribute through contents.
    let sa = a.support_vars();
    let sb = b.support_vars();
    for &v in &sa {
        if !sb.contains(&v) {
            a = a.content_in(v);
        }
    }
    for &v in &sb {
        if !sa.contains(&v) {
            b = b.content_in(v);
        }
    }
    if a.is_constant() || b.is_constant() {
        return mono;
    }
    if a.is_divisible_by(&b) {
        return &mono * &b;
    }
    if b.is_divisible_by(&a) {
        return &mono * &a;
    }

    let common: Vec<usize> = a.support_vars().into_iter().filter(|v| b.uses_var(*v)).collect();
    let Some(&v) = common.iter().min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v)) else {
        return mono;
    };
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd_nonzero(&ca, &cb);
    let g = subresultant_gcd(&pa, &pb, v);
    &(&mono * &c) * &g
}

/// Primitive GCD of two polynomials that are primitive with respect to `var`.
fn subresultant_gcd(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let ring = a.ring().clone();
    let (mut f, mut g) = {
        let fa = a.coefficients_in(var);
        let fb = b.coefficients_in(var);
        if fa.len() >= fb.len() { (fa, fb) } else { (fb, fa) }
    };
    let mut gg = Polynomial::one(&ring);
    let mut h = Polynomial::one(&ring);
    loop {
        let delta = (f.len() - g.len()) as u32;
        let r = uni::prem(&f, &g);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return Polynomial::one(&ring);
        }
        let divisor = &gg * &h.pow(delta);
        let r: Vec<Polynomial> = r.iter().map(|c| c.div_exact(&divisor).expect("subresultant division is exact")).collect();
        f = std::mem::replace(&mut g, r);
        gg = f.last().unwrap().clone();
        h = match delta {
            0 => h,
            1 => gg.clone(),
            d => gg.pow(d).div_exact(&h.pow(d - 1)).expect("subresultant division is exact"),
        };
    }
    let last = Polynomial::from_coefficients_in(&ring, var, &g);
    last.primitive_part_in(var).canonical()
}

/// Dense univariate helpers over a multivariate coefficient ring; a
/// polynomial is a coefficient vector with nonzero last entry (empty = 0).
pub(crate) mod uni {
    use crate::poly::Polynomial;

    pub fn trim(v: &mut Vec<Polynomial>) {
        while v.last().is_some_and(Polynomial::is_zero) {
            v.pop();
        }
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`; requires
    /// `deg a >= deg b` and `b` nonzero.
    pub fn prem(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
        assert!(!b.is_empty() && a.len() >= b.len());
        let lb = b.last().unwrap();
        let mut r = a.to_vec();
        let mut e = (a.len() - b.len() + 1) as u32;
        while r.len() >= b.len() {
            let lr = r.last().unwrap().clone();
            let shift = r.len() - b.len();
            for c in r.iter_mut() {
                *c = &*c * lb;
            }
            for (j, bj) in b.iter().enumerate() {
                r[j + shift] = &r[j + shift] - &(&lr * bj);
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            trim(&mut r);
            e -= 1;
        }
        if e > 0 {
            let m = lb.pow(e);
            for c in r.iter_mut() {
                *c = &*c * &m;
            }
        }
        r
    }
}
