//! Towers of variable changes between coordinate rings of function fields.

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::monomial::Monomial;
use crate::poly::{Polynomial, Ring};
use crate::ratfunc::RationalFunction;
use crate::screen::Screener;
use crate::subst::Substitution;
use crate::CremonaMap;

/// A root symbol `t` adjoined to a ring, subject to `t^2 = linear * t + constant`.
#[derive(Clone, Debug)]
pub struct RootRule {
    /// Index of `t` in the ring that carries it.
    pub symbol: usize,
    pub linear: Polynomial,
    pub constant: Polynomial,
}

impl RootRule {
    pub fn new(symbol: usize, linear: Polynomial, constant: Polynomial) -> Result<RootRule> {
        linear.ring().check_same(constant.ring())?;
        if linear.uses_var(symbol) || constant.uses_var(symbol) {
            return Err(Error::Invalid("root rule coefficients must not involve the root".into()));
        }
        Ok(RootRule { symbol, linear, constant })
    }

    /// Splits `p` as `even + odd * t` with `even`, `odd` free of `t`.
    pub fn reduce(&self, p: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        p.ring().check_same(self.linear.ring())?;
        let mut c = p.coefficients_in(self.symbol);
        let ring = p.ring();
        while c.len() > 2 {
            let top = c.pop().unwrap();
            let k = c.len();
            c[k - 1] = &c[k - 1] + &(&top * &self.linear);
            c[k - 2] = &c[k - 2] + &(&top * &self.constant);
        }
        c.resize(2, Polynomial::zero(ring));
        let odd = c.pop().unwrap();
        let even = c.pop().unwrap();
        Ok((even, odd))
    }
}

/// Backward expressions of the old variables in terms of the new ones.
#[derive(Clone, Debug)]
pub struct Backward {
    /// The new variables, plus the root symbol when there is one.
    pub ring: Ring,
    pub exprs: Vec<RationalFunction>,
    pub root: Option<(RootRule, RationalFunction)>,
}

/// New coordinates defined as rational functions of old ones.
#[derive(Clone, Debug)]
pub struct ChangeOfVariables {
    pub old: Ring,
    pub new: Ring,
    /// One expression over `old` per variable of `new`.
    pub forward: Vec<RationalFunction>,
    pub backward: Option<Backward>,
}

impl ChangeOfVariables {
    pub fn new(old: &Ring, new: &Ring, forward: Vec<RationalFunction>) -> Result<ChangeOfVariables> {
        if forward.len() != new.nvars() {
            return Err(Error::Invalid(format!("{} forward images for {} new variables", forward.len(), new.nvars())));
        }
        for f in &forward {
            old.check_same(f.ring())?;
        }
        Ok(ChangeOfVariables { old: old.clone(), new: new.clone(), forward, backward: None })
    }

    /// Attaches backward expressions; `root` gives the rule and the value of
    /// the root symbol as an expression over `old`.
    pub fn with_backward(mut self, ring: &Ring, exprs: Vec<RationalFunction>, root: Option<(RootRule, RationalFunction)>) -> Result<ChangeOfVariables> {
        if exprs.len() != self.old.nvars() {
            return Err(Error::Invalid(format!("{} backward images for {} old variables", exprs.len(), self.old.nvars())));
        }
        for e in &exprs {
            ring.check_same(e.ring())?;
        }
        if let Some((rule, value)) = &root {
            ring.check_same(rule.linear.ring())?;
            self.old.check_same(value.ring())?;
        }
        self.backward = Some(Backward { ring: ring.clone(), exprs, root });
        Ok(self)
    }

    /// Rewrites expressions in the new variables as expressions in the old ones.
    pub fn forward_substitution(&self) -> Substitution {
        Substitution::new(&self.new, &self.old, self.forward.clone()).expect("checked on construction")
    }

    /// Rewrites expressions in the old variables through the backward formulas.
    pub fn backward_substitution(&self) -> Option<Substitution> {
        let b = self.backward.as_ref()?;
        Some(Substitution::new(&self.old, &b.ring, b.exprs.clone()).expect("checked on construction"))
    }

    /// Substitution from the backward ring into the old ring: new variables
    /// go to their forward definitions and the root symbol to its value.
    fn backward_ring_to_old(&self, b: &Backward) -> Result<Substitution> {
        let mut images = Vec::with_capacity(b.ring.nvars());
        for (i, name) in b.ring.vars().iter().enumerate() {
            if let Some((rule, value)) = &b.root {
                if rule.symbol == i {
                    images.push(value.clone());
                    continue;
                }
            }
            images.push(self.forward[self.new.index_of(name)?].clone());
        }
        Substitution::new(&b.ring, &self.old, images)
    }
}

/// A labelled residue left by a failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub label: String,
    pub residue: Polynomial,
}

/// Outcome of a verification, with residues for every failed part.
#[derive(Clone, Debug, Default)]
pub struct Verification {
    pub failures: Vec<Failure>,
    /// Informational findings that do not affect the verdict.
    pub notes: Vec<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, screener: &mut Screener, label: impl Into<String>, lhs: &RationalFunction, rhs: &RationalFunction) {
        if let Some(residue) = screener.residue(lhs, rhs) {
            self.failures.push(Failure { label: label.into(), residue });
        }
    }

    fn check_zero(&mut self, label: impl Into<String>, value: &RationalFunction) {
        if !value.is_zero() {
            self.failures.push(Failure { label: label.into(), residue: value.numerator().clone() });
        }
    }
}

/// Checks that the backward formulas recover every old variable, and that
/// the root value satisfies its rule.
pub fn verify_generation(c: &ChangeOfVariables, screener: &mut Screener) -> Result<Verification> {
    let b = c.backward.as_ref().ok_or_else(|| Error::Invalid("no backward expressions".into()))?;
    let s = c.backward_ring_to_old(b)?;
    let mut out = Verification::default();
    for (i, e) in b.exprs.iter().enumerate() {
        let lhs = s.apply(e)?;
        out.check(screener, c.old.vars()[i].clone(), &lhs, &RationalFunction::var(&c.old, i));
    }
    if let Some((rule, value)) = &b.root {
        let lhs = value.pow(2)?;
        let a = s.apply_poly(&rule.linear)?;
        let k = s.apply_poly(&rule.constant)?;
        let rhs = &(&a * value) + &k;
        out.check(screener, format!("{}^2", b.ring.vars()[rule.symbol]), &lhs, &rhs);
    }
    Ok(out)
}

/// Checks that `r` vanishes after `s` is applied.
pub fn verify_vanishing(r: &Polynomial, s: &Substitution) -> Result<Verification> {
    let mut out = Verification::default();
    out.check_zero("relation", &s.apply_poly(r)?);
    Ok(out)
}

/// Checks that a relation among the new variables holds once they are
/// replaced by their definitions.
pub fn verify_relation(r: &Polynomial, c: &ChangeOfVariables) -> Result<Verification> {
    verify_vanishing(r, &c.forward_substitution())
}

/// Result of rewriting a relation into other coordinates.
#[derive(Clone, Debug)]
pub struct Transport {
    /// Numerator of the rewritten relation, reduced by the root rule.
    pub numerator: Polynomial,
    /// Part proportional to the root symbol; zero when the rewrite descends.
    pub odd_part: Polynomial,
    /// `(c, m)` with `numerator = c * m * target`, when such a pair exists.
    pub cofactor: Option<(Coeff, Monomial)>,
}

impl Transport {
    pub fn passed(&self) -> bool {
        self.odd_part.is_zero() && self.cofactor.is_some()
    }
}

/// Rewrites `relation` through `rewrite` and compares the numerator with
/// `target` up to a constant times a monomial.
///
/// With a root rule the numerator is first reduced to `even + odd * t`; the
/// odd part must vanish and the even part is compared.
pub fn transport_relation(relation: &Polynomial, rewrite: &Substitution, root: Option<&RootRule>, target: &Polynomial) -> Result<Transport> {
    let image = rewrite.apply_poly(relation)?;
    let mut numerator = image.numerator().clone();
    let mut odd_part = Polynomial::zero(numerator.ring());
    if let Some(rule) = root {
        let (even, odd) = rule.reduce(&numerator)?;
        numerator = even;
        odd_part = odd;
    }
    let cofactor = match numerator.rename_into(target.ring()) {
        Ok(n) => {
            numerator = n;
            if odd_part.is_zero() {
                equal_up_to_unit_monomial(&numerator, target)
            } else {
                None
            }
        }
        Err(_) => None,
    };
    Ok(Transport { numerator, odd_part, cofactor })
}

/// `Some((c, m))` when `a = c * m * b` for a nonzero constant `c` and a monomial `m`.
pub fn equal_up_to_unit_monomial(a: &Polynomial, b: &Polynomial) -> Option<(Coeff, Monomial)> {
    if a.ring() != b.ring() || a.is_zero() || b.is_zero() || a.num_terms() != b.num_terms() {
        return None;
    }
    let (ma, ca) = a.leading_term()?;
    let (mb, cb) = b.leading_term()?;
    let m = ma.div(mb)?;
    let c = a.field().div(ca, cb).ok()?;
    if b.mul_term(&m, &c) == *a {
        Some((c, m))
    } else {
        None
    }
}

/// Eliminates the old variables from `den_j * y_j - num_j`, returning a
/// nonzero polynomial over `new` that vanishes on the forward definitions.
///
/// Old variables are removed from last to first by resultants against the
/// polynomial of lowest positive degree. The result may carry extraneous
/// factors.
pub fn eliminate(c: &ChangeOfVariables) -> Result<Polynomial> {
    let mut names: Vec<String> = c.old.vars().to_vec();
    for v in c.new.vars() {
        if names.contains(v) {
            return Err(Error::Invalid(format!("variable `{v}` appears in both rings")));
        }
        names.push(v.clone());
    }
    let joint = Ring::new(c.old.field(), &names)?;
    let mut polys = Vec::new();
    for (j, f) in c.forward.iter().enumerate() {
        let y = Polynomial::var(&joint, c.old.nvars() + j);
        let num = f.numerator().rename_into(&joint)?;
        let den = f.denominator().rename_into(&joint)?;
        polys.push((&den * &y - num).canonical());
    }
    for v in (0..c.old.nvars()).rev() {
        let (with_v, mut without): (Vec<_>, Vec<_>) = polys.into_iter().partition(|p: &Polynomial| p.uses_var(v));
        if let Some(pivot_at) = (0..with_v.len()).min_by_key(|&i| (with_v[i].degree_in(v), with_v[i].num_terms())) {
            let pivot = &with_v[pivot_at];
            for (i, p) in with_v.iter().enumerate() {
                if i == pivot_at {
                    continue;
                }
                let r = pivot.resultant(p, v)?;
                if !r.is_zero() {
                    without.push(r.canonical());
                }
            }
        }
        if without.is_empty() {
            return Err(Error::DegenerateElimination);
        }
        polys = without;
    }
    let best = polys
        .into_iter()
        .min_by_key(|p| (p.total_degree(), p.num_terms()))
        .ok_or(Error::DegenerateElimination)?;
    best.rename_into(&c.new)
}

/// Solves `r = 0` for a variable occurring to degree one.
pub fn solve_linear_variable(r: &Polynomial, var: usize) -> Result<RationalFunction> {
    let coeffs = r.coefficients_in(var);
    if coeffs.len() != 2 {
        return Err(Error::WrongDegree {
            var: r.ring().vars()[var].clone(),
            expected: 1,
            found: coeffs.len().saturating_sub(1) as u32,
        });
    }
    RationalFunction::new(-&coeffs[0], coeffs[1].clone())
}

/// Checks `m(e) = e`.
pub fn verify_invariance(m: &CremonaMap, e: &RationalFunction, screener: &mut Screener) -> Result<Verification> {
    let mut out = Verification::default();
    let image = m.pullback(e)?;
    out.check(screener, "invariance", &image, e);
    Ok(out)
}

/// Data exhibiting a field as a quadratic extension of the fixed field of an involution.
#[derive(Clone, Debug)]
pub struct QuadraticDescentWitness {
    /// The generator `t`.
    pub element: RationalFunction,
    /// Claimed value of the map at `t`.
    pub conjugate: RationalFunction,
    /// Ring of the claimed invariants.
    pub invariant_ring: Ring,
    /// Definitions of the invariants, over the same ring as `element`.
    pub invariants: Vec<RationalFunction>,
    /// `t + conjugate`, over `invariant_ring`.
    pub trace: RationalFunction,
    /// `t * conjugate`, over `invariant_ring`.
    pub norm: RationalFunction,
}

/// Checks the conjugate, that the map swaps `t` and its conjugate, that the
/// invariants are fixed, and the trace and norm identities.
pub fn verify_quadratic_descent(w: &QuadraticDescentWitness, m: &CremonaMap, screener: &mut Screener) -> Result<Verification> {
    verify_quadratic_descent_via(w, &m.substitution(), &Substitution::identity(m.ring()), screener)
}

/// Same checks for a witness written over an intermediate ring: `lower`
/// rewrites its expressions into the map's ring and `act` is the map
/// applied after `lower`. All comparisons happen in the map's ring.
pub fn verify_quadratic_descent_via(w: &QuadraticDescentWitness, act: &Substitution, lower: &Substitution, screener: &mut Screener) -> Result<Verification> {
    act.source().check_same(lower.source())?;
    act.target().check_same(lower.target())?;
    let mut out = Verification::default();
    let t = lower.apply(&w.element)?;
    let conj = lower.apply(&w.conjugate)?;
    out.check(screener, "conjugate", &act.apply(&w.element)?, &conj);
    if screener.equal(&t, &conj) {
        out.failures.push(Failure { label: "conjugate differs from t".into(), residue: Polynomial::zero(lower.target()) });
    }
    out.check(screener, "swap", &act.apply(&w.conjugate)?, &t);
    let mut defs = Vec::with_capacity(w.invariants.len());
    for (i, inv) in w.invariants.iter().enumerate() {
        let label = format!("{} fixed", w.invariant_ring.vars().get(i).map(String::as_str).unwrap_or("?"));
        let value = lower.apply(inv)?;
        out.check(screener, label, &act.apply(inv)?, &value);
        defs.push(value);
    }
    let defs = Substitution::new(&w.invariant_ring, lower.target(), defs)?;
    out.check(screener, "trace", &(&t + &conj), &defs.apply(&w.trace)?);
    out.check(screener, "norm", &(&t * &conj), &defs.apply(&w.norm)?);
    Ok(out)
}

/// Checks that `locus` lies in the zero set of `h` and of its partial
/// derivatives in `required`. The other partials are reported as notes.
pub fn verify_singular_substitution(h: &Polynomial, locus: &Substitution, required: &[usize]) -> Result<Verification> {
    let mut out = Verification::default();
    out.check_zero("h", &locus.apply_poly(h)?);
    for v in 0..h.ring().nvars() {
        let d = locus.apply_poly(&h.derivative(v))?;
        let name = &h.ring().vars()[v];
        if required.contains(&v) {
            out.check_zero(format!("d/d{name}"), &d);
        } else {
            out.notes.push(format!("d/d{name} {}", if d.is_zero() { "vanishes" } else { "does not vanish" }));
        }
    }
    Ok(out)
}
