//! Simultaneous substitution of rational functions for variables.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Ring};
use crate::ratfunc::RationalFunction;

/// An assignment `source variable -> rational function over target`.
///
/// All images are read off the original variables, so the substitution is
/// simultaneous. Unassigned variables make any expression that uses them
/// fail with [`Error::UndefinedSubstitution`].
#[derive(Clone, Debug)]
pub struct Substitution {
    source: Ring,
    target: Ring,
    images: Vec<Option<RationalFunction>>,
}

impl Substitution {
    /// One image per source variable, in order.
    pub fn new(source: &Ring, target: &Ring, images: Vec<RationalFunction>) -> Result<Substitution> {
        if images.len() != source.nvars() {
            return Err(Error::Invalid(format!(
                "{} images for {} variables",
                images.len(),
                source.nvars()
            )));
        }
        Substitution::from_options(source, target, images.into_iter().map(Some).collect())
    }

    fn from_options(source: &Ring, target: &Ring, images: Vec<Option<RationalFunction>>) -> Result<Substitution> {
        if source.field() != target.field() {
            return Err(Error::Invalid("substitution must preserve the coefficient field".into()));
        }
        for img in images.iter().flatten() {
            target.check_same(img.ring())?;
        }
        Ok(Substitution { source: source.clone(), target: target.clone(), images })
    }

    /// Assignment by variable name; unnamed variables stay unassigned.
    pub fn from_pairs(source: &Ring, target: &Ring, pairs: &[(&str, RationalFunction)]) -> Result<Substitution> {
        let mut images = vec![None; source.nvars()];
        for (name, img) in pairs {
            images[source.index_of(name)?] = Some(img.clone());
        }
        Substitution::from_options(source, target, images)
    }

    /// Assignment by variable name where every unnamed variable maps to the
    /// target variable of the same name.
    pub fn with_identity_defaults(
        source: &Ring,
        target: &Ring,
        pairs: &HashMap<String, RationalFunction>,
    ) -> Result<Substitution> {
        let mut images = Vec::with_capacity(source.nvars());
        for name in source.vars() {
            let img = match pairs.get(name) {
                Some(img) => img.clone(),
                None => RationalFunction::var(target, target.index_of(name)?),
            };
            images.push(Some(img));
        }
        for name in pairs.keys() {
            source.index_of(name)?;
        }
        Substitution::from_options(source, target, images)
    }

    pub fn identity(ring: &Ring) -> Substitution {
        let images = (0..ring.nvars()).map(|i| Some(RationalFunction::var(ring, i))).collect();
        Substitution { source: ring.clone(), target: ring.clone(), images }
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn image(&self, var: usize) -> Option<&RationalFunction> {
        self.images[var].as_ref()
    }

    fn image_for(&self, var: usize) -> Result<&RationalFunction> {
        self.images[var]
            .as_ref()
            .ok_or_else(|| Error::UndefinedSubstitution(format!("no image for `{}`", self.source.vars()[var])))
    }

    /// Substitutes into a polynomial.
    ///
    /// The common denominator is kept as a list of factor copies so that
    /// cancellation only needs GCDs against the (small) image denominators.
    pub fn apply_poly(&self, p: &Polynomial) -> Result<RationalFunction> {
        self.source.check_same(p.ring())?;
        let target = &self.target;
        if p.is_zero() {
            return Ok(RationalFunction::zero(target));
        }
        let used = p.support_vars();
        let mut num_pows: HashMap<usize, Vec<Polynomial>> = HashMap::new();
        let mut den_pows: HashMap<usize, Vec<Polynomial>> = HashMap::new();
        let mut den_factors: Vec<(Polynomial, u32)> = Vec::new();
        for &v in &used {
            let img = self.image_for(v)?;
            let e = p.degree_in(v);
            num_pows.insert(v, powers(img.numerator(), e));
            if !img.denominator().is_one() {
                den_pows.insert(v, powers(img.denominator(), e));
                den_factors.push((img.denominator().clone(), e));
            }
        }
        let mut num = Polynomial::zero(target);
        for (m, c) in p.terms() {
            let mut t = Polynomial::constant(target, c.clone());
            for &v in &used {
                let k = m.exp(v);
                if k > 0 {
                    t = &t * &num_pows[&v][k as usize];
                }
                if let Some(dp) = den_pows.get(&v) {
                    let rest = p.degree_in(v) - k;
                    if rest > 0 {
                        t = &t * &dp[rest as usize];
                    }
                }
            }
            num = &num + &t;
        }
        if num.is_zero() {
            return Ok(RationalFunction::zero(target));
        }
        let mut den = Polynomial::one(target);
        for (d, e) in den_factors {
            let mut coprime = false;
            for _ in 0..e {
                if coprime {
                    den = &den * &d;
                    continue;
                }
                let g = num.gcd(&d);
                if g.is_one() {
                    coprime = true;
                    den = &den * &d;
                } else {
                    num = num.div_exact(&g).expect("gcd divides");
                    den = &den * &d.div_exact(&g).expect("gcd divides");
                }
            }
        }
        Ok(RationalFunction::from_coprime(num, den))
    }

    /// Substitutes into a rational function. Fails when the image of the
    /// denominator is identically zero.
    pub fn apply(&self, e: &RationalFunction) -> Result<RationalFunction> {
        let n = self.apply_poly(e.numerator())?;
        if e.denominator().is_constant() {
            let d = e.denominator().constant_value().unwrap();
            let inv = self.target.field().inv(&d)?;
            return Ok(n.scale(&inv));
        }
        let d = self.apply_poly(e.denominator())?;
        if d.is_zero() {
            return Err(Error::UndefinedSubstitution("denominator maps to zero".into()));
        }
        n.try_div(&d)
    }

    /// Maps each source variable to its image under `self`, rewritten through `other`.
    pub fn then(&self, other: &Substitution) -> Result<Substitution> {
        self.target.check_same(&other.source)?;
        let images = self
            .images
            .iter()
            .map(|img| img.as_ref().map(|i| other.apply(i)).transpose())
            .collect::<Result<Vec<_>>>()?;
        Substitution::from_options(&self.source, &other.target, images)
    }
}

fn powers(p: &Polynomial, e: u32) -> Vec<Polynomial> {
    let mut out = Vec::with_capacity(e as usize + 1);
    out.push(Polynomial::one(p.ring()));
    for k in 1..=e as usize {
        let next = &out[k - 1] * p;
        out.push(next);
    }
    out
}
