//! Resultants via the subresultant PRS.
//!
//! Sign convention: the determinant of the Sylvester matrix whose first
//! rows hold the coefficients of the first argument, so that
//! `Res_x(a*x + b, c*x + d) = a*d - b*c`.

use crate::error::{Error, Result};
use crate::gcd::uni;
use crate::poly::Polynomial;

impl Polynomial {
    /// Resultant with respect to variable `var`; the result does not use `var`.
    pub fn resultant(&self, other: &Polynomial, var: usize) -> Result<Polynomial> {
        self.ring().check_same(other.ring())?;
        let ring = self.ring().clone();
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(&ring));
        }
        let da = self.degree_in(var);
        let db = other.degree_in(var);
        if da == 0 && db == 0 {
            return Err(Error::ConstantInVariable(ring.vars()[var].clone()));
        }
        if db == 0 {
            return Ok(other.pow(da));
        }
        if da == 0 {
            return Ok(self.pow(db));
        }
        let mut a = self.coefficients_in(var);
        let mut b = other.coefficients_in(var);
        let mut sign_negative = false;
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            if da % 2 == 1 && db % 2 == 1 {
                sign_negative = true;
            }
        }
        let mut g = Polynomial::one(&ring);
        let mut h = Polynomial::one(&ring);
        loop {
            let deg_a = (a.len() - 1) as u32;
            let deg_b = (b.len() - 1) as u32;
            let delta = deg_a - deg_b;
            if deg_a % 2 == 1 && deg_b % 2 == 1 {
                sign_negative = !sign_negative;
            }
            let r = uni::prem(&a, &b);
            if r.is_empty() {
                return Ok(Polynomial::zero(&ring));
            }
            let divisor = &g * &h.pow(delta);
            let r: Vec<Polynomial> = r.iter().map(|c| c.div_exact(&divisor).expect("subresultant division is exact")).collect();
            a = std::mem::replace(&mut b, r);
            g = a.last().unwrap().clone();
            h = match delta {
                0 => h,
                1 => g.clone(),
                d => g.pow(d).div_exact(&h.pow(d - 1)).expect("subresultant division is exact"),
            };
            if b.len() == 1 {
                break;
            }
        }
        let deg_a = (a.len() - 1) as u32;
        let lb = &b[0];
        // h^(1 - deg a) * lc(b)^(deg a)
        let res = if deg_a == 0 {
            &h * &Polynomial::one(&ring)
        } else {
            lb.pow(deg_a).div_exact(&h.pow(deg_a - 1)).expect("subresultant division is exact")
        };
        Ok(if sign_negative { -res } else { res })
    }

    pub fn resultant_named(&self, other: &Polynomial, var: &str) -> Result<Polynomial> {
        self.resultant(other, self.ring().index_of(var)?)
    }
}

#[cfg(test)]
mod tests {
    use crate::field::Field;
    use crate::poly::{Polynomial, Ring};

    #[test]
    fn shared_root_gives_zero() {
        let r = Ring::new(Field::Rationals, &["x"]).unwrap();
        let x = Polynomial::var(&r, 0);
        let one = Polynomial::one(&r);
        let res = (&x - &one).resultant(&(&x.pow(2) - &one), 0).unwrap();
        assert!(res.is_zero());
    }

    #[test]
    fn both_constant_is_an_error() {
        let r = Ring::new(Field::Rationals, &["x", "y"]).unwrap();
        let y = Polynomial::var(&r, 1);
        assert!(y.resultant(&y, 0).is_err());
    }
}
