//! Cremona transformations as tuples of rational functions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};
use crate::poly::Ring;
use crate::ratfunc::RationalFunction;
use crate::screen::{eval_mod, screen_modulus};
use crate::subst::Substitution;

/// Field endomorphism of `k(vars)` given by the images of the variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CremonaMap {
    ring: Ring,
    images: Vec<RationalFunction>,
}

impl CremonaMap {
    pub fn new(ring: &Ring, images: Vec<RationalFunction>) -> Result<CremonaMap> {
        if images.len() != ring.nvars() {
            return Err(Error::Invalid(format!("{} images for {} variables", images.len(), ring.nvars())));
        }
        for img in &images {
            ring.check_same(img.ring())?;
        }
        Ok(CremonaMap { ring: ring.clone(), images })
    }

    pub fn identity(ring: &Ring) -> CremonaMap {
        let images = (0..ring.nvars()).map(|i| RationalFunction::var(ring, i)).collect();
        CremonaMap { ring: ring.clone(), images }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn images(&self) -> &[RationalFunction] {
        &self.images
    }

    pub fn substitution(&self) -> Substitution {
        Substitution::new(&self.ring, &self.ring, self.images.clone()).expect("images live in the map's ring")
    }

    /// Action on expressions: substitute every variable by its image.
    pub fn pullback(&self, e: &RationalFunction) -> Result<RationalFunction> {
        self.substitution().apply(e)
    }

    /// `compose(a, b).images[i] = b.images[i]` with `a` substituted in, so
    /// `pullback(compose(a, b), e) = pullback(a, pullback(b, e))`.
    pub fn compose(&self, other: &CremonaMap) -> Result<CremonaMap> {
        self.ring.check_same(&other.ring)?;
        let s = self.substitution();
        let images = other.images.iter().map(|img| s.apply(img)).collect::<Result<Vec<_>>>()?;
        Ok(CremonaMap { ring: self.ring.clone(), images })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, img)| *img == RationalFunction::var(&self.ring, i))
    }

    /// True iff the map has order exactly two.
    pub fn verify_involution(&self) -> Result<bool> {
        if self.is_identity() {
            return Ok(false);
        }
        Ok(self.compose(self)?.is_identity())
    }

    /// Coefficientwise reduction of a map over the rationals modulo `p`.
    pub fn reduce_mod_p(&self, p: u64) -> Result<CremonaMap> {
        if self.ring.field() != Field::Rationals {
            return Err(Error::Invalid("only maps over the rationals can be reduced".into()));
        }
        let target = self.ring.with_field(Field::prime(p)?);
        let pb = BigInt::from(p);
        let mut images = Vec::with_capacity(self.images.len());
        for img in &self.images {
            for (_, c) in img.numerator().terms().chain(img.denominator().terms()) {
                if c.denom().is_multiple_of(&pb) {
                    return Err(Error::CoefficientNotInvertible(p));
                }
            }
            let num = img.numerator().map_field(&target)?;
            let den = img.denominator().map_field(&target)?;
            if den.is_zero() {
                return Err(Error::DenominatorVanishesModP(p));
            }
            images.push(RationalFunction::new(num, den)?);
        }
        Ok(CremonaMap { ring: target, images })
    }

    /// Exponent matrix of the action on `generators`, if every image is a
    /// constant times a Laurent monomial in the generators.
    ///
    /// Candidate exponents solve the linear system given by additive degree
    /// valuations, with any free coordinates bounded by the image degrees.
    /// Candidates pass a modular screen before exact confirmation.
    pub fn monomial_profile(&self, generators: &[RationalFunction]) -> Result<Option<MonomialProfile>> {
        let n = generators.len();
        if n == 0 {
            return Ok(None);
        }
        for g in generators {
            self.ring.check_same(g.ring())?;
            if g.is_constant() {
                return Ok(None);
            }
        }
        let gen_vals: Vec<Vec<i64>> = generators.iter().map(valuations).collect();
        let q = screen_modulus(self.ring.field());
        let points = sample_points(generators, q, self.ring.nvars());
        let mut columns = Vec::with_capacity(n);
        let mut constants = Vec::with_capacity(n);
        for g in generators {
            let image = self.pullback(g)?;
            let img_vals = valuations(&image);
            let bound = (image.numerator().total_degree() + image.denominator().total_degree()) as i64;
            let mut found = None;
            for cand in valuation_candidates(&gen_vals, &img_vals, bound) {
                if !screen_candidate(&cand, generators, &image, &points, q) {
                    continue;
                }
                if let Some(c) = constant_ratio(&image, generators, &cand)? {
                    found = Some((cand, c));
                    break;
                }
            }
            match found {
                Some((cand, c)) => {
                    columns.push(cand);
                    constants.push(c);
                }
                None => return Ok(None),
            }
        }
        let matrix: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| columns[j][i]).collect()).collect();
        let determinant = determinant(&matrix);
        Ok(Some(MonomialProfile { matrix, determinant, constants }))
    }
}

/// Exponent matrix of a monomial action: column `j` is the exponent vector
/// of the image of generator `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialProfile {
    pub matrix: Vec<Vec<i64>>,
    pub determinant: BigInt,
    /// Constant factor in front of each image.
    pub constants: Vec<Coeff>,
}

impl MonomialProfile {
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.matrix.iter().map(|row| row[j]).collect()
    }
}

/// Additive valuations of a rational function: degree and low degree, in
/// total and per variable, each taken as numerator minus denominator.
fn valuations(f: &RationalFunction) -> Vec<i64> {
    let (n, d) = (f.numerator(), f.denominator());
    let nv = f.ring().nvars();
    let mut out = vec![n.total_degree() as i64 - d.total_degree() as i64, n.low_total_degree() as i64 - d.low_total_degree() as i64];
    for v in 0..nv {
        out.push(n.degree_in(v) as i64 - d.degree_in(v) as i64);
        out.push(n.low_degree_in(v) as i64 - d.low_degree_in(v) as i64);
    }
    out
}

/// Integer solutions of `sum_j e_j * gen_vals[j] = target` with free
/// coordinates taken from `[-bound, bound]`.
fn valuation_candidates(gen_vals: &[Vec<i64>], target: &[i64], bound: i64) -> Vec<Vec<i64>> {
    let n = gen_vals.len();
    let rows = target.len();
    // Augmented matrix, one row per valuation.
    let mut a: Vec<Vec<Coeff>> = (0..rows)
        .map(|k| {
            let mut row: Vec<Coeff> = (0..n).map(|j| Coeff::from_integer(gen_vals[j][k].into())).collect();
            row.push(Coeff::from_integer(target[k].into()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, p);
        let lead = a[r][col].clone();
        for x in a[r].iter_mut() {
            *x = &*x / &lead;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pivot_row = a[r].clone();
                for (x, v) in a[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(v * &f);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[n].is_zero()) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    let mut assignment = vec![-bound; free.len()];
    loop {
        let mut e = vec![0i64; n];
        for (f, &c) in free.iter().zip(&assignment) {
            e[*f] = c;
        }
        let mut ok = true;
        for (i, &pc) in pivots.iter().enumerate() {
            let mut v = a[i][n].clone();
            for (f, &c) in free.iter().zip(&assignment) {
                v -= &a[i][*f] * Coeff::from_integer(c.into());
            }
            match (v.is_integer(), v.to_integer().to_i64()) {
                (true, Some(x)) => e[pc] = x,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            out.push(e);
        }
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return out;
            }
            if assignment[i] < bound {
                assignment[i] += 1;
                break;
            }
            assignment[i] = -bound;
            i += 1;
        }
    }
}

/// Pairs of generator values at random points where every generator is a unit.
fn sample_points(generators: &[RationalFunction], q: u64, nvars: usize) -> Vec<(Vec<u64>, Vec<u64>)> {
    use rand::{Rng, SeedableRng};
    // Large fields only: tiny prime fields have too few usable points.
    if q < 1_000_000 {
        return Vec::new();
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < 3 && attempts < 50 {
        attempts += 1;
        let pt: Vec<u64> = (0..nvars).map(|_| rng.gen_range(1..q)).collect();
        let vals: Option<Vec<u64>> = generators.iter().map(|g| eval_mod(g, &pt, q).filter(|&v| v != 0)).collect();
        if let Some(vals) = vals {
            out.push((pt, vals));
        }
    }
    out
}

/// Checks that `image / prod g^e` takes the same value at every sample point.
fn screen_candidate(cand: &[i64], generators: &[RationalFunction], image: &RationalFunction, points: &[(Vec<u64>, Vec<u64>)], q: u64) -> bool {
    use crate::field::{mul_mod, pow_mod};
    let _ = generators;
    let mut ratio = None;
    for (pt, vals) in points {
        let Some(iv) = eval_mod(image, pt, q) else { continue };
        let mut prod = 1u64;
        for (e, v) in cand.iter().zip(vals) {
            let base = if *e < 0 { pow_mod(*v, q - 2, q) } else { *v };
            prod = mul_mod(prod, pow_mod(base, e.unsigned_abs(), q), q);
        }
        let r = mul_mod(iv, pow_mod(prod, q - 2, q), q);
        match ratio {
            None => ratio = Some(r),
            Some(r0) if r0 != r => return false,
            _ => {}
        }
    }
    true
}

fn constant_ratio(image: &RationalFunction, generators: &[RationalFunction], cand: &[i64]) -> Result<Option<Coeff>> {
    let mut prod = RationalFunction::one(image.ring());
    for (g, &e) in generators.iter().zip(cand) {
        if e != 0 {
            prod = &prod * &g.pow(e)?;
        }
    }
    let ratio = image.try_div(&prod)?;
    Ok(ratio.constant_value())
}

/// Integer determinant by fraction-free elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_expression;

    fn ring() -> Ring {
        Ring::new(Field::Rationals, &["x1", "x2"]).unwrap()
    }

    fn map(r: &Ring, imgs: &[&str]) -> CremonaMap {
        CremonaMap::new(r, imgs.iter().map(|s| parse_expression(s, r).unwrap()).collect()).unwrap()
    }

    #[test]
    fn identity_is_not_an_involution() {
        let r = ring();
        assert!(CremonaMap::identity(&r).is_identity());
        assert!(!CremonaMap::identity(&r).verify_involution().unwrap());
    }

    #[test]
    fn transposition_is_an_involution() {
        let r = ring();
        assert!(map(&r, &["x2", "x1"]).verify_involution().unwrap());
    }

    #[test]
    fn compose_with_identity() {
        let r = ring();
        let m = map(&r, &["x1*x2", "1/x2"]);
        let id = CremonaMap::identity(&r);
        assert_eq!(id.compose(&m).unwrap(), m);
        assert_eq!(m.compose(&id).unwrap(), m);
    }

    #[test]
    fn reduction_rejects_p_in_denominator() {
        let r = ring();
        let m = map(&r, &["x1/2", "x2"]);
        assert_eq!(m.reduce_mod_p(2), Err(Error::CoefficientNotInvertible(2)));
        assert!(m.reduce_mod_p(5).is_ok());
        assert!(m.reduce_mod_p(4).is_err());
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&[vec![1, 3, 3], vec![2, 2, 3], vec![-2, -3, -4]]), BigInt::from(1));
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(determinant(&[vec![1, 2], vec![2, 4]]), BigInt::from(0));
    }

    #[test]
    fn monomial_profile_of_a_simple_monomial_map() {
        let r = ring();
        let m = map(&r, &["x1*x2^2", "1/x2"]);
        let gens = vec![RationalFunction::var(&r, 0), RationalFunction::var(&r, 1)];
        let p = m.monomial_profile(&gens).unwrap().unwrap();
        assert_eq!(p.matrix, vec![vec![1, 0], vec![2, -1]]);
        assert_eq!(p.determinant, BigInt::from(-1));
        let m = map(&r, &["x1 + x2", "x2"]);
        assert!(m.monomial_profile(&gens).unwrap().is_none());
    }
}
