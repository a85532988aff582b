//! Random evaluation screens over a large prime field.
//!
//! A disagreement at a valid point proves two expressions differ; agreement
//! is only evidence, so callers confirm with an exact check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::field::{mul_mod, pow_mod, Coeff, Field};
use crate::poly::Polynomial;
use crate::ratfunc::RationalFunction;

/// Default screening modulus, the Mersenne prime `2^61 - 1`.
pub const SCREEN_PRIME: u64 = (1 << 61) - 1;

/// Evaluation points tried per screen.
pub const SCREEN_POINTS: usize = 20;

/// Modulus used to screen expressions over `field`.
pub fn screen_modulus(field: Field) -> u64 {
    match field {
        Field::Rationals => SCREEN_PRIME,
        Field::Prime(p) => p,
    }
}

fn coeff_mod(c: &Coeff, q: u64) -> Option<u64> {
    let qb = BigInt::from(q);
    let n = c.numer().mod_floor(&qb).to_u64()?;
    let d = c.denom().mod_floor(&qb).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(mul_mod(n, pow_mod(d, q - 2, q), q))
}

/// Value of `p` modulo `q` at `point`; `None` if a coefficient is not
/// reducible modulo `q`.
pub fn eval_poly_mod(p: &Polynomial, point: &[u64], q: u64) -> Option<u64> {
    let mut acc = 0u64;
    for (m, c) in p.terms() {
        let mut t = coeff_mod(c, q)?;
        for (v, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                t = mul_mod(t, pow_mod(point[v], e as u64, q), q);
            }
        }
        acc = (acc + t) % q;
    }
    Some(acc)
}

/// Value of `f` modulo `q`; `None` when the denominator vanishes there.
pub fn eval_mod(f: &RationalFunction, point: &[u64], q: u64) -> Option<u64> {
    let d = eval_poly_mod(f.denominator(), point, q)?;
    if d == 0 {
        return None;
    }
    let n = eval_poly_mod(f.numerator(), point, q)?;
    Some(mul_mod(n, pow_mod(d, q - 2, q), q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScreenVerdict {
    /// A point where both sides are defined and differ.
    Different,
    /// All valid points agreed (or none was valid).
    Agree,
}

/// Compares `a` and `b` at `points` random points.
pub fn screen<R: Rng + ?Sized>(a: &RationalFunction, b: &RationalFunction, rng: &mut R, points: usize) -> ScreenVerdict {
    let q = screen_modulus(a.ring().field());
    let n = a.ring().nvars();
    let mut tried = 0;
    let mut attempts = 0;
    while tried < points && attempts < points * 4 {
        attempts += 1;
        let pt: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        match (eval_mod(a, &pt, q), eval_mod(b, &pt, q)) {
            (Some(x), Some(y)) => {
                tried += 1;
                if x != y {
                    return ScreenVerdict::Different;
                }
            }
            _ => continue,
        }
    }
    ScreenVerdict::Agree
}

/// Exact equality with a random screen as the fast path.
pub fn equal<R: Rng + ?Sized>(a: &RationalFunction, b: &RationalFunction, rng: &mut R) -> bool {
    if a.ring() != b.ring() {
        return false;
    }
    match screen(a, b, rng, SCREEN_POINTS) {
        ScreenVerdict::Different => false,
        ScreenVerdict::Agree => a.cross_equal(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;
    use rand::SeedableRng;

    #[test]
    fn detects_difference() {
        let r = Ring::new(Field::Rationals, &["x", "y"]).unwrap();
        let x = RationalFunction::var(&r, 0);
        let y = RationalFunction::var(&r, 1);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        assert_eq!(screen(&x, &y, &mut rng, 5), ScreenVerdict::Different);
        assert!(equal(&(&x * &y), &(&y * &x), &mut rng));
    }
}

/// Seeded equality checker used by the verification layers. The seed only
/// affects which points are screened; every verdict is confirmed exactly.
#[derive(Debug)]
pub struct Screener {
    rng: rand::rngs::StdRng,
    rejections: usize,
}

impl Screener {
    pub fn new(seed: u64) -> Screener {
        use rand::SeedableRng;
        Screener { rng: rand::rngs::StdRng::seed_from_u64(seed), rejections: 0 }
    }

    pub fn equal(&mut self, a: &RationalFunction, b: &RationalFunction) -> bool {
        if a.ring() != b.ring() {
            return false;
        }
        match screen(a, b, &mut self.rng, SCREEN_POINTS) {
            ScreenVerdict::Different => {
                self.rejections += 1;
                false
            }
            ScreenVerdict::Agree => a.cross_equal(b),
        }
    }

    /// `None` when `a == b`, otherwise the numerator of `a - b`.
    pub fn residue(&mut self, a: &RationalFunction, b: &RationalFunction) -> Option<Polynomial> {
        if self.equal(a, b) {
            None
        } else {
            Some((a - b).numerator().clone())
        }
    }

    /// Number of comparisons settled by the random screen alone.
    pub fn rejections(&self) -> usize {
        self.rejections
    }

    pub fn rng(&mut self) -> &mut rand::rngs::StdRng {
        &mut self.rng
    }
}
