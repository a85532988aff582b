use std::collections::BTreeMap;

use cremona_core::screen::Screener;
use cremona_core::textio::{parse_expression, parse_polynomial};
use cremona_core::towers::{self, ChangeOfVariables, QuadraticDescentWitness};
use cremona_core::{CremonaMap, Error, Field, Monomial, Polynomial, RationalFunction, Ring, Substitution};
use num_rational::BigRational;

const SIGMA: [&str; 2] = [
    "-x1*(3*x1 - 9*x2 - x2^2)^3/(27*x1 + 2*x1^2 + 9*x1*x2 + 2*x1*x2^2 - x2^3)^2",
    "-(3*x1 + x2^2)*(3*x1 - 9*x2 - x2^2)/(27*x1 + 2*x1^2 + 9*x1*x2 + 2*x1*x2^2 - x2^3)",
];

fn ring(p: u64, vars: &[&str]) -> Ring {
    Ring::new(Field::with_characteristic(p).unwrap(), vars).unwrap()
}

fn poly(s: &str, r: &Ring) -> Polynomial {
    parse_polynomial(s, r).unwrap()
}

fn rf(s: &str, r: &Ring) -> RationalFunction {
    parse_expression(s, r).unwrap()
}

fn sigma() -> CremonaMap {
    let r = ring(0, &["x1", "x2"]);
    CremonaMap::new(&r, SIGMA.iter().map(|s| rf(s, &r)).collect()).unwrap()
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Schoolbook product on exponent maps, independent of the library's multiplication.
fn naive_mul(a: &BTreeMap<(u32, u32), i64>, b: &BTreeMap<(u32, u32), i64>) -> BTreeMap<(u32, u32), i64> {
    let mut out = BTreeMap::new();
    for ((i, j), c) in a {
        for ((k, l), d) in b {
            *out.entry((i + k, j + l)).or_insert(0) += c * d;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

#[test]
fn cancellation_and_frobenius() {
    let r = ring(0, &["x", "y"]);
    assert_eq!(&poly("x - y", &r) + &poly("y", &r), poly("x", &r));
    let r2 = ring(2, &["x", "y"]);
    assert_eq!(poly("x + y", &r2).pow(2), poly("x^2 + y^2", &r2));
}

#[test]
fn cube_matches_schoolbook_expansion() {
    let r = ring(0, &["x1", "x2"]);
    let y1 = poly("3*x1 - 9*x2 - x2^2", &r);
    let base: BTreeMap<(u32, u32), i64> = [((1, 0), 3), ((0, 1), -9), ((0, 2), -1)].into_iter().collect();
    let expected = naive_mul(&naive_mul(&base, &base), &base);
    let cube = y1.pow(3);
    assert_eq!(cube.num_terms(), 10);
    assert_eq!(expected.len(), 10);
    for ((i, j), c) in expected {
        assert_eq!(cube.coeff(&Monomial::from_exponents(&[i, j])), q(c));
    }
}

#[test]
fn gcd_examples() {
    let r = ring(0, &["x", "y"]);
    assert_eq!(poly("x^2 - y^2", &r).gcd(&poly("x - y", &r)), poly("x - y", &r));
    let p = poly("-2*x*y + 4*y", &r);
    assert_eq!(p.gcd(&Polynomial::zero(&r)), p.canonical());
    assert!(Polynomial::zero(&r).gcd(&Polynomial::zero(&r)).is_zero());
    let r2 = ring(2, &["x", "y"]);
    assert_eq!(poly("x^2 + y^2", &r2).gcd(&poly("x + y", &r2)), poly("x + y", &r2));
}

#[test]
fn exact_division() {
    let r = ring(0, &["x"]);
    assert_eq!(poly("x^2 - 1", &r).div_exact(&poly("x - 1", &r)).unwrap(), poly("x + 1", &r));
    assert_eq!(poly("x^2 + 1", &r).div_exact(&poly("x + 1", &r)), Err(Error::NonExactDivision));
    assert_eq!(poly("x^2 + 1", &r).div_exact(&Polynomial::zero(&r)), Err(Error::DivisionByZero));

    let y = ring(0, &["y1", "y2", "y3"]);
    let f = poly(
        "2*y1^6 + 729*y1^3*y2 - 27*y1^4*y2 + 4*y1^3*y2^2 - 27*y1*y2^3 + 2*y2^4 + 729*y1^3*y3 \
         - 27*y1^4*y3 - 27*y1*y2^2*y3 + 729*y2*y3^2 + 729*y3^3",
        &y,
    );
    let g = poly("y2 + y3", &y);
    assert_eq!((&f * &g).div_exact(&g).unwrap(), f);
}

#[test]
fn derivatives() {
    let r = ring(0, &["v1", "v2", "v3"]);
    assert_eq!(poly("v1^2*v3", &r).derivative_named("v1").unwrap(), poly("2*v1*v3", &r));
    assert!(matches!(poly("v1", &r).derivative_named("w"), Err(Error::UnknownVariable(_))));
    let r3 = ring(3, &["x"]);
    assert!(poly("x^3", &r3).derivative(0).is_zero());

    let h = poly(
        "16 + 108*v1 - 32*v2 - 108*v1*v2 + 16*v2^2 - 108*v3 + 729*v1^2*v3 + 108*v2*v3 \
         + 729*v1^2*v2*v3 - 1458*v1*v3^2 - 1458*v1*v2*v3^2 + 729*v3^3 + 729*v2*v3^3",
        &r,
    );
    let locus = Substitution::from_pairs(&r, &r, &[("v1", rf("v3", &r)), ("v2", rf("1", &r)), ("v3", rf("v3", &r))]).unwrap();
    assert!(locus.apply_poly(&h.derivative(1)).unwrap().is_zero());
}

#[test]
fn substitution_examples() {
    let m = sigma();
    let r = m.ring().clone();
    let y1 = rf("3*x1 - 9*x2 - x2^2", &r);
    let y2 = rf("27*x1 + 9*x1*x2 + x2^3", &r);
    let y3 = rf("-27*x1 - 2*x1^2 - 9*x1*x2 - 2*x1*x2^2 + x2^3", &r);
    let expected = &(&y1 * &y2.pow(2).unwrap()) / &y3.pow(2).unwrap();
    assert_eq!(m.pullback(&y1).unwrap(), expected);

    let c = rf("7/3", &r);
    assert_eq!(m.pullback(&c).unwrap(), c);
    let id = Substitution::identity(&r);
    assert_eq!(id.apply(&rf("x2", &r)).unwrap(), rf("x2", &r));

    let zero_den = Substitution::new(&r, &r, vec![rf("x1", &r), rf("x1", &r)]).unwrap();
    assert!(matches!(zero_den.apply(&rf("1/(x1 - x2)", &r)), Err(Error::UndefinedSubstitution(_))));
}

#[test]
fn rational_function_arithmetic() {
    let r = ring(0, &["x", "y", "z1", "z2"]);
    assert!((&rf("x/y", &r) * &rf("y/x", &r)).is_one());
    assert_eq!(rf("(1 - z1)/(1 + z1)", &r).inv().unwrap(), rf("(1 + z1)/(1 - z1)", &r));
    assert_eq!(&rf("z2", &r) + &rf("z1/z2", &r), rf("(z2^2 + z1)/z2", &r));
    assert_eq!(rf("x", &r).try_div(&RationalFunction::zero(&r)), Err(Error::DivisionByZero));
}

#[test]
fn rational_function_normal_form() {
    let r = ring(0, &["x", "y"]);
    let e = rf("(2*x + 4)/(-6*x*y + 3)", &r);
    assert_eq!(e.denominator(), &poly("2*x*y - 1", &r));
    assert_eq!(e.numerator(), &poly("-2/3*x - 4/3", &r));
    let p = ring(7, &["x", "y"]);
    let e = rf("(x + 1)/(3*x + 2)", &p);
    assert!(e.denominator().leading_coeff() == q(1));
}

#[test]
fn resultant_examples() {
    let r = ring(0, &["x"]);
    assert_eq!(poly("x - 2", &r).resultant(&poly("x^2 - 1", &r), 0).unwrap(), poly("3", &r));
    assert!(poly("x - 1", &r).resultant(&poly("x^2 - 1", &r), 0).unwrap().is_zero());
    let r4 = ring(0, &["x", "a", "b", "c", "d"]);
    let res = poly("a*x + b", &r4).resultant(&poly("c*x + d", &r4), 0).unwrap();
    assert_eq!(res, poly("a*d - b*c", &r4));
    assert!(matches!(poly("a", &r4).resultant(&poly("b", &r4), 0), Err(Error::ConstantInVariable(_))));
}

#[test]
fn evaluation() {
    let p = ring(101, &["x1", "x2", "y1", "y2", "y3"]);
    let f = poly(
        "2*y1^6 + 729*y1^3*y2 - 27*y1^4*y2 + 4*y1^3*y2^2 - 27*y1*y2^3 + 2*y2^4 + 729*y1^3*y3 \
         - 27*y1^4*y3 - 27*y1*y2^2*y3 + 729*y2*y3^2 + 729*y3^3",
        &p,
    );
    let ys = ["3*x1 - 9*x2 - x2^2", "27*x1 + 9*x1*x2 + x2^3", "-27*x1 - 2*x1^2 - 9*x1*x2 - 2*x1*x2^2 + x2^3"];
    for (a, b) in [(3, 5), (17, 88), (40, 2)] {
        let mut point = vec![q(a), q(b), q(0), q(0), q(0)];
        for (i, y) in ys.iter().enumerate() {
            point[2 + i] = poly(y, &p).evaluate(&point).unwrap();
        }
        assert_eq!(f.evaluate(&point).unwrap(), q(0));
    }
    let r2 = ring(2, &["x"]);
    assert_eq!(poly("x^2 + 1", &r2).evaluate(&[q(1)]).unwrap(), q(0));
    let r = ring(0, &["x"]);
    assert_eq!(rf("1/x", &r).evaluate(&[q(0)]), Err(Error::DenominatorVanishes));
}

#[test]
fn unit_monomial_factors() {
    let r = ring(0, &["x", "y"]);
    let (c, m) = towers::equal_up_to_unit_monomial(&poly("2*x^2*y + 4*x*y^2", &r), &poly("x*y*(x + 2*y)", &r)).unwrap();
    assert_eq!((c, m), (q(2), Monomial::one(2)));
    let (c, m) = towers::equal_up_to_unit_monomial(&poly("x^3*y", &r), &poly("x*y", &r)).unwrap();
    assert_eq!((c, m), (q(1), Monomial::from_exponents(&[2, 0])));
    assert!(towers::equal_up_to_unit_monomial(&poly("x + y", &r), &poly("x - y", &r)).is_none());
}

#[test]
fn parsing_and_printing() {
    let r = ring(0, &["x1", "x2"]);
    let y1 = rf("3*x1 - 9*x2 - x2^2", &r);
    assert_eq!(y1.to_string(), "3*x1 - x2^2 - 9*x2");
    assert_eq!(parse_expression(&y1.to_string(), &r).unwrap(), y1);
    assert_eq!(Polynomial::zero(&r).to_string(), "0");
    assert_eq!(rf("(x1^2 - 1)/(x1 - 1)", &r).to_string(), "x1 + 1");
    assert_eq!(rf(SIGMA[0], &r), sigma().images()[0]);
    assert!(matches!(parse_expression("x1/0", &r), Err(Error::Parse { pos: 2, .. })));
    assert!(matches!(parse_expression("x3", &r), Err(Error::Parse { pos: 0, ref msg }) if msg.contains("unknown variable")));
    assert!(matches!(parse_expression("2 x1", &r), Err(Error::Parse { .. })));
    assert_eq!(rf("-x1^2", &r), rf("-(x1^2)", &r));
    assert_eq!(rf("2^3^2", &r), rf("512", &r));
    assert_eq!(rf("x1^-2", &r), rf("1/x1^2", &r));
}

#[test]
fn involutions_and_composition() {
    let m = sigma();
    assert!(m.verify_involution().unwrap());
    assert!(m.compose(&m).unwrap().is_identity());
    let id = CremonaMap::identity(m.ring());
    assert!(!id.verify_involution().unwrap());
    assert_eq!(id.compose(&m).unwrap(), m);
    assert_eq!(m.compose(&id).unwrap(), m);
    let r = m.ring().clone();
    let swap = CremonaMap::new(&r, vec![rf("x2", &r), rf("x1", &r)]).unwrap();
    assert!(swap.verify_involution().unwrap());

    let m2 = m.reduce_mod_p(2).unwrap();
    assert!(m2.verify_involution().unwrap());
}

#[test]
fn composition_order() {
    let r = ring(0, &["x1", "x2"]);
    let a = CremonaMap::new(&r, vec![rf("x1 + x2", &r), rf("x2", &r)]).unwrap();
    let b = CremonaMap::new(&r, vec![rf("x1*x2", &r), rf("x2", &r)]).unwrap();
    let ab = a.compose(&b).unwrap();
    assert_eq!(ab.images()[0], rf("(x1 + x2)*x2", &r));
    let e = rf("x1 - x2^2", &r);
    assert_eq!(ab.pullback(&e).unwrap(), a.pullback(&b.pullback(&e).unwrap()).unwrap());
}

#[test]
fn reductions() {
    let m = sigma();
    let m2 = m.reduce_mod_p(2).unwrap();
    let r2 = m2.ring().clone();
    assert_eq!(m2.images()[0], rf("x1*(x1 + x2 + x2^2)^3/(x1 + x1*x2 + x2^3)^2", &r2));
    assert_eq!(m2.images()[1], rf("(x1 + x2^2)*(x1 + x2 + x2^2)/(x1 + x1*x2 + x2^3)", &r2));
    let m3 = m.reduce_mod_p(3).unwrap();
    let r3 = m3.ring().clone();
    assert_eq!(m3.images()[0], rf("x1*x2^6/(x1^2 + x1*x2^2 + x2^3)^2", &r3));
    assert_eq!(m3.images()[1], rf("-x2^4/(x1^2 + x1*x2^2 + x2^3)", &r3));

    let r = m.ring().clone();
    let half = CremonaMap::new(&r, vec![rf("x1/2", &r), rf("x2", &r)]).unwrap();
    assert_eq!(half.reduce_mod_p(2), Err(Error::CoefficientNotInvertible(2)));
}

#[test]
fn monomial_profiles() {
    let m = sigma();
    let r = m.ring().clone();
    let gens: Vec<_> = ["3*x1 - 9*x2 - x2^2", "27*x1 + 9*x1*x2 + x2^3", "-27*x1 - 2*x1^2 - 9*x1*x2 - 2*x1*x2^2 + x2^3"]
        .iter()
        .map(|s| rf(s, &r))
        .collect();
    let p = m.monomial_profile(&gens).unwrap().unwrap();
    assert_eq!(p.column(0), vec![1, 2, -2]);
    assert_eq!(p.column(1), vec![3, 2, -3]);
    assert_eq!(p.column(2), vec![3, 3, -4]);
    assert_eq!(p.determinant, 1.into());

    let m2 = m.reduce_mod_p(2).unwrap();
    let r2 = m2.ring().clone();
    let gens: Vec<_> = ["x1", "x1 + x2 + x2^2", "x1 + x1*x2 + x2^3"].iter().map(|s| rf(s, &r2)).collect();
    let p = m2.monomial_profile(&gens).unwrap().unwrap();
    assert_eq!(p.determinant, (-1).into());

    let not_monomial = vec![rf("x1", &r), rf("x2", &r)];
    assert!(m.monomial_profile(&not_monomial).unwrap().is_none());
}

#[test]
fn generation_checks() {
    let x = ring(2, &["x1", "x2"]);
    let y = ring(2, &["y1", "y2", "y3"]);
    let fwd = ["x1", "x1 + x2 + x2^2", "x1 + x1*x2 + x2^3"].iter().map(|s| rf(s, &x)).collect();
    let c = ChangeOfVariables::new(&x, &y, fwd).unwrap();
    let c = c.with_backward(&y, vec![rf("y1", &y), rf("(y2 + y3)/(1 + y2)", &y)], None).unwrap();
    let mut s = Screener::new(0);
    assert!(towers::verify_generation(&c, &mut s).unwrap().passed());
    let f = poly("y1 + y1*y2^2 + y2^3 + y3 + y2*y3 + y3^2", &y);
    assert!(towers::verify_relation(&f, &c).unwrap().passed());
    assert!(!towers::verify_relation(&Polynomial::one(&y), &c).unwrap().passed());
    let elim = towers::eliminate(&c).unwrap();
    assert!(elim.is_divisible_by(&f));

    let ident = ChangeOfVariables::new(&x, &x, vec![rf("x1", &x), rf("x2", &x)]).unwrap();
    let ident = ident.with_backward(&x, vec![rf("x1", &x), rf("x2", &x)], None).unwrap();
    assert!(towers::verify_generation(&ident, &mut s).unwrap().passed());

    let t = ring(0, &["x"]);
    let py = ring(0, &["y1", "y2"]);
    let parabola = ChangeOfVariables::new(&t, &py, vec![rf("x", &t), rf("x^2", &t)]).unwrap();
    let r = towers::eliminate(&parabola).unwrap();
    assert!(r.is_divisible_by(&poly("y1^2 - y2", &py)));
}

#[test]
fn linear_solves() {
    let w = ring(0, &["w1", "w2", "w3"]);
    let rel = poly("108*w1*w2 - 16*w2^2 - 1458*w1^2*w3 - 729*w1^2*w2*w3", &w);
    let e = towers::solve_linear_variable(&rel, 2).unwrap();
    assert_eq!(e, rf("(108*w1*w2 - 16*w2^2)/(729*w1^2*(2 + w2))", &w));
    let back = Substitution::from_pairs(&w, &w, &[("w1", rf("w1", &w)), ("w2", rf("w2", &w)), ("w3", e)]).unwrap();
    assert!(back.apply_poly(&rel).unwrap().is_zero());

    let u2 = ring(2, &["u1", "u2", "u3"]);
    let e = towers::solve_linear_variable(&poly("1 + u1 + u2 + u1*u2^2 + u2*u3", &u2), 2).unwrap();
    assert_eq!(e, rf("(1 + u1 + u2 + u1*u2^2)/u2", &u2));
    let u3 = ring(3, &["u1", "u2", "u3"]);
    let e = towers::solve_linear_variable(&poly("u1 + u1^2 - u3", &u3), 2).unwrap();
    assert_eq!(e, rf("u1 + u1^2", &u3));

    assert!(matches!(towers::solve_linear_variable(&poly("u3^2 + u1", &u3), 2), Err(Error::WrongDegree { .. })));
}

#[test]
fn invariance_checks() {
    let m = sigma();
    let r = m.ring().clone();
    let mut s = Screener::new(3);
    let ratio = rf("-4*(3*x1 - 9*x2 - x2^2)/(27*(27 + x1 + 9*x2 + x2^2))", &r);
    assert!(towers::verify_invariance(&m, &ratio, &mut s).unwrap().passed());
    assert!(!towers::verify_invariance(&m, &rf("x1", &r), &mut s).unwrap().passed());
    let m2 = m.reduce_mod_p(2).unwrap();
    let u1 = rf("x1/(x1 + x1*x2 + x2^3)", m2.ring());
    assert!(towers::verify_invariance(&m2, &u1, &mut s).unwrap().passed());
}

#[test]
fn descent_in_characteristic_three() {
    let x = ring(3, &["x1", "x2"]);
    let m = CremonaMap::new(&x, vec![rf("x1*x2^6/(x1^2 + x1*x2^2 + x2^3)^2", &x), rf("-x2^4/(x1^2 + x1*x2^2 + x2^3)", &x)]).unwrap();
    let inv = ring(3, &["y1", "c"]);
    let w = QuadraticDescentWitness {
        element: rf("1/x2", &x),
        conjugate: rf("-1/x2 - x1/x2^2 - x1^2/x2^4", &x),
        invariant_ring: inv.clone(),
        invariants: vec![rf("x1/x2^2", &x), rf("(x1^2 + x1*x2^2 + x2^3)/x2^5", &x)],
        trace: rf("-(y1 + y1^2)", &inv),
        norm: rf("-c", &inv),
    };
    let mut s = Screener::new(1);
    assert!(towers::verify_quadratic_descent(&w, &m, &mut s).unwrap().passed());

    let wrong = QuadraticDescentWitness { norm: rf("c", &inv), ..w };
    let v = towers::verify_quadratic_descent(&wrong, &m, &mut s).unwrap();
    assert_eq!(v.failures.len(), 1);
    assert_eq!(v.failures[0].label, "norm");
}

#[test]
fn singular_substitutions() {
    let v = ring(0, &["v1", "v2", "v3"]);
    let h = poly(
        "16 + 108*v1 - 32*v2 - 108*v1*v2 + 16*v2^2 - 108*v3 + 729*v1^2*v3 + 108*v2*v3 \
         + 729*v1^2*v2*v3 - 1458*v1*v3^2 - 1458*v1*v2*v3^2 + 729*v3^3 + 729*v2*v3^3",
        &v,
    );
    let on = Substitution::from_pairs(&v, &v, &[("v1", rf("v3", &v)), ("v2", rf("1", &v)), ("v3", rf("v3", &v))]).unwrap();
    assert!(towers::verify_singular_substitution(&h, &on, &[0, 1]).unwrap().passed());
    let off = Substitution::from_pairs(&v, &v, &[("v1", rf("v1", &v)), ("v2", rf("0", &v)), ("v3", rf("v3", &v))]).unwrap();
    assert!(!towers::verify_singular_substitution(&h, &off, &[0, 1]).unwrap().passed());
    assert!(towers::verify_singular_substitution(&Polynomial::zero(&v), &off, &[0, 1]).unwrap().passed());
}
