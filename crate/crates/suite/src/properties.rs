//! Randomized property suites and mutation sensitivity, seeded for reproducibility.

use cremona_core::screen::{screen, ScreenVerdict, SCREEN_POINTS};
use cremona_core::{Coeff, Field, Monomial, Polynomial, RationalFunction, Ring, Substitution};
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::oracle::sylvester_determinant;
use crate::report::PropertyRecord;
use crate::runner::run_step;
use crate::scenario::Instance;

pub const HOMOMORPHISM_CASES: usize = 100;
pub const GCD_CASES: usize = 100;
pub const RESULTANT_CASES: usize = 50;
pub const SCREEN_CASES: usize = 100;
pub const MUTATIONS: usize = 10;

/// Random polynomial with up to `terms` terms, exponents at most `deg` and
/// coefficients in `[-coef, coef]`.
pub fn random_poly(ring: &Ring, rng: &mut StdRng, terms: usize, deg: u32, coef: i64) -> Polynomial {
    let n = rng.gen_range(1..=terms);
    let field = ring.field();
    let pairs = (0..n).map(|_| {
        let exps: Vec<u32> = (0..ring.nvars()).map(|_| rng.gen_range(0..=deg)).collect();
        (Monomial::from_exponents(&exps), field.from_int(rng.gen_range(-coef..=coef)))
    });
    Polynomial::from_terms(ring, pairs).expect("integer coefficients fit every field")
}

fn nonzero_poly(ring: &Ring, rng: &mut StdRng, terms: usize, deg: u32, coef: i64) -> Polynomial {
    loop {
        let p = random_poly(ring, rng, terms, deg, coef);
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_rf(ring: &Ring, rng: &mut StdRng) -> RationalFunction {
    let num = random_poly(ring, rng, 3, 2, 4);
    let den = nonzero_poly(ring, rng, 2, 1, 3);
    RationalFunction::new(num, den).expect("nonzero denominator")
}

/// Affine-over-affine image, small enough that substituted random
/// expressions stay cheap to normalize.
fn random_image(ring: &Ring, rng: &mut StdRng) -> RationalFunction {
    let num = random_poly(ring, rng, 2, 1, 4);
    let den = nonzero_poly(ring, rng, 2, 1, 3);
    RationalFunction::new(num, den).expect("nonzero denominator")
}

fn record(name: &str, cases: usize, failures: Vec<String>) -> PropertyRecord {
    PropertyRecord { name: name.to_string(), cases, failures: failures.len(), details: failures.into_iter().take(5).collect() }
}

fn test_rings() -> Vec<Ring> {
    vec![
        Ring::new(Field::Rationals, &["a", "b", "c"]).unwrap(),
        Ring::new(Field::prime(101).unwrap(), &["a", "b", "c"]).unwrap(),
    ]
}

/// `S(e1 + e2) = S(e1) + S(e2)` and `S(e1 * e2) = S(e1) * S(e2)` for random
/// substitutions `S`, counting only cases where every side is defined.
pub fn homomorphism(seed: u64) -> PropertyRecord {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x01);
    let rings = test_rings();
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut attempts = 0;
    while cases < HOMOMORPHISM_CASES && attempts < HOMOMORPHISM_CASES * 10 {
        attempts += 1;
        let ring = &rings[attempts % rings.len()];
        let images = (0..ring.nvars()).map(|_| random_image(ring, &mut rng)).collect();
        let s = Substitution::new(ring, ring, images).unwrap();
        let e1 = random_rf(ring, &mut rng);
        let e2 = random_rf(ring, &mut rng);
        let (Ok(s1), Ok(s2), Ok(sum), Ok(prod)) = (s.apply(&e1), s.apply(&e2), s.apply(&(&e1 + &e2)), s.apply(&(&e1 * &e2))) else {
            continue;
        };
        cases += 1;
        if sum != &s1 + &s2 {
            failures.push(format!("sum: e1 = {e1}, e2 = {e2}"));
        }
        if prod != &s1 * &s2 {
            failures.push(format!("product: e1 = {e1}, e2 = {e2}"));
        }
    }
    record("substitution homomorphism", cases, failures)
}

/// The gcd of `g*p` and `g*q` is a multiple of `g`, divides both inputs, and
/// leaves coprime quotients.
pub fn gcd_divisibility(seed: u64) -> PropertyRecord {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x02);
    let rings = test_rings();
    let mut failures = Vec::new();
    for case in 0..GCD_CASES {
        let ring = &rings[case % rings.len()];
        let g = nonzero_poly(ring, &mut rng, 3, 2, 5);
        let a = &g * &nonzero_poly(ring, &mut rng, 3, 2, 5);
        let b = &g * &nonzero_poly(ring, &mut rng, 3, 2, 5);
        let d = a.gcd(&b);
        let ok = match (a.div_exact(&d), b.div_exact(&d)) {
            (Ok(qa), Ok(qb)) => qa.gcd(&qb).is_constant() && d.is_divisible_by(&g),
            _ => false,
        };
        if !ok {
            failures.push(format!("a = {a}, b = {b}, gcd = {d}"));
        }
    }
    record("gcd divisibility and coprime quotients", GCD_CASES, failures)
}

/// Resultants in `v` agree with the Sylvester determinant after specializing
/// the other variable at several integer points.
pub fn resultant_oracle(seed: u64) -> PropertyRecord {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x03);
    let ring = Ring::new(Field::Rationals, &["v", "s"]).unwrap();
    let mut failures = Vec::new();
    for _ in 0..RESULTANT_CASES {
        let a = with_degree(&ring, &mut rng);
        let b = with_degree(&ring, &mut rng);
        let r = a.resultant(&b, 0).expect("both have positive degree in v");
        for _ in 0..3 {
            let s = Coeff::from_integer(rng.gen_range(-6..=6).into());
            let point = [Coeff::from_integer(0.into()), s.clone()];
            let ca: Vec<BigRational> = a.coefficients_in(0).iter().map(|c| c.evaluate(&point).unwrap()).collect();
            let cb: Vec<BigRational> = b.coefficients_in(0).iter().map(|c| c.evaluate(&point).unwrap()).collect();
            let expected = sylvester_determinant(&ca, &cb);
            if r.evaluate(&point).unwrap() != expected {
                failures.push(format!("Res_v({a}, {b}) at s = {s}"));
                break;
            }
        }
    }
    record("resultant against Sylvester determinant", RESULTANT_CASES, failures)
}

/// Random polynomial of degree 1 to 3 in the first variable.
fn with_degree(ring: &Ring, rng: &mut StdRng) -> Polynomial {
    loop {
        let p = random_poly(ring, rng, 4, 3, 5);
        let d = p.degree_in(0);
        if (1..=3).contains(&d) {
            return p;
        }
    }
}

/// The random screen never separates equal expressions and separates every
/// unequal pair tried.
pub fn screen_agreement(seed: u64) -> PropertyRecord {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x04);
    let rings = [
        Ring::new(Field::Rationals, &["a", "b"]).unwrap(),
        Ring::new(Field::prime(1_000_003).unwrap(), &["a", "b"]).unwrap(),
    ];
    let mut failures = Vec::new();
    for case in 0..SCREEN_CASES {
        let ring = &rings[case % rings.len()];
        let x = random_rf(ring, &mut rng);
        let y = random_rf(ring, &mut rng);
        let t = nonzero_poly(ring, &mut rng, 2, 1, 3);
        // Same value reached by a different route.
        let lhs = &(&x + &y) * &y;
        let rhs = RationalFunction::new(
            (&(&x * &y) + &(&y * &y)).numerator() * &t,
            (&(&x * &y) + &(&y * &y)).denominator() * &t,
        )
        .unwrap();
        let exact = lhs.cross_equal(&rhs);
        let verdict = screen(&lhs, &rhs, &mut rng, SCREEN_POINTS);
        if !exact || verdict != ScreenVerdict::Agree {
            failures.push(format!("equal pair separated: {lhs} vs {rhs}"));
        }
        let bump = RationalFunction::from_poly(nonzero_poly(ring, &mut rng, 2, 2, 3));
        let other = &rhs + &bump;
        let exact = lhs.cross_equal(&other);
        let verdict = screen(&lhs, &other, &mut rng, SCREEN_POINTS);
        if exact || verdict != ScreenVerdict::Different {
            failures.push(format!("unequal pair not separated: {lhs} vs {other}"));
        }
    }
    record("random screen agrees with exact equality", 2 * SCREEN_CASES, failures)
}

/// Adds one to a random coefficient of a shipped relation and reruns the
/// steps that read it; at least one of them must change verdict.
///
/// Only relations read by a step expected to pass are mutated, since a
/// mutation cannot be caught by checks that are already expected to fail.
pub fn mutation_sensitivity(seed: u64, instances: &[&Instance]) -> PropertyRecord {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x05);
    let mut targets = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for name in inst.relations.keys() {
            if inst.steps.iter().any(|s| s.expect && s.op.relations().contains(&name.as_str())) {
                targets.push((i, name.clone()));
            }
        }
    }
    if targets.is_empty() {
        return record("mutation sensitivity", 0, Vec::new());
    }
    let mut failures = Vec::new();
    for k in 0..MUTATIONS {
        let (i, name) = targets.choose(&mut rng).expect("nonempty").clone();
        let mut inst = instances[i].clone();
        let rel = inst.relations.get_mut(&name).expect("chosen from keys");
        let terms: Vec<(Monomial, Coeff)> = rel.poly.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        let at = rng.gen_range(0..terms.len());
        let field = rel.poly.field();
        let mutated = terms.iter().enumerate().map(|(j, (m, c))| {
            let c = if j == at { field.add(c, &field.one()) } else { c.clone() };
            (m.clone(), c)
        });
        rel.poly = Polynomial::from_terms(rel.poly.ring(), mutated).expect("same field");
        let mut screener = cremona_core::screen::Screener::new(seed.wrapping_add(k as u64));
        let caught = inst
            .steps
            .iter()
            .filter(|s| s.op.relations().contains(&name.as_str()))
            .any(|s| !run_step(&inst, s, &mut screener, false).passed());
        if !caught {
            failures.push(format!("{}: relation {name}, term {} bumped by one, no step failed", inst.label(), terms[at].0.exponents().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")));
        }
    }
    record("mutation sensitivity", MUTATIONS, failures)
}

pub fn run_properties(seed: u64, instances: &[&Instance]) -> Vec<PropertyRecord> {
    std::thread::scope(|s| {
        let handles = vec![
            s.spawn(move || homomorphism(seed)),
            s.spawn(move || gcd_divisibility(seed)),
            s.spawn(move || resultant_oracle(seed)),
            s.spawn(move || screen_agreement(seed)),
            s.spawn(move || mutation_sensitivity(seed, instances)),
        ];
        handles.into_iter().map(|h| h.join().expect("property thread")).collect()
    })
}
