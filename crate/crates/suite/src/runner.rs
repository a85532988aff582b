//! Execution of scenario steps.

use std::time::Instant;

use cremona_core::screen::Screener;
use cremona_core::textio::truncated;
use cremona_core::towers::{self, Failure, QuadraticDescentWitness, Verification};
use cremona_core::{CremonaMap, Polynomial, RationalFunction, Substitution};

use crate::report::{Residue, ScenarioReport, StepRecord, VariantRecord, Witness, RESIDUE_TERMS};
use crate::scenario::{transport_path, Instance, Op, Step};

/// Runs every step of `inst` in order; failures never stop the run.
pub fn run_instance(inst: &Instance, seed: u64, timings: bool) -> ScenarioReport {
    let mut screener = Screener::new(seed);
    let mut steps: Vec<StepRecord> = inst.steps.iter().map(|s| run_step(inst, s, &mut screener, timings)).collect();
    steps.sort_by(|a, b| a.id.cmp(&b.id));
    ScenarioReport {
        id: inst.id.clone(),
        title: inst.title.clone(),
        characteristic: inst.field.characteristic(),
        variant: inst.variant.as_ref().map(|v| VariantRecord { name: v.name.clone(), description: v.description.clone(), derived: v.derived }),
        steps,
    }
}

pub fn run_step(inst: &Instance, step: &Step, screener: &mut Screener, timings: bool) -> StepRecord {
    let start = Instant::now();
    let (outcome, witness) = match execute(inst, &step.op, screener) {
        Ok(r) => r,
        Err(e) => (false, Witness { error: Some(e.to_string()), ..Witness::default() }),
    };
    StepRecord {
        id: step.id.clone(),
        op: step.op.name().to_string(),
        display: step.display.clone(),
        expected: step.expect,
        outcome,
        erratum: step.erratum.clone(),
        witness,
        duration_ms: timings.then(|| start.elapsed().as_millis() as u64),
    }
}

/// Numerators of `image(g_i) - prod_j g_j^matrix[j][i]` for the generators
/// whose image is not the expected monomial.
fn monomial_residues(
    m: &CremonaMap,
    gens: &[RationalFunction],
    matrix: &[Vec<i64>],
    w: &mut Witness,
) -> cremona_core::Result<()> {
    for (i, g) in gens.iter().enumerate() {
        let mut expected = RationalFunction::one(m.ring());
        for (j, h) in gens.iter().enumerate() {
            let e = matrix.get(j).and_then(|row| row.get(i)).copied().unwrap_or(0);
            expected = &expected * &h.pow(e)?;
        }
        let diff = &m.pullback(g)? - &expected;
        if !diff.is_zero() {
            w.residues.push(residue(format!("image of {g}"), diff.numerator()));
        }
    }
    Ok(())
}

pub fn residue(label: impl Into<String>, p: &Polynomial) -> Residue {
    Residue { label: label.into(), terms: p.num_terms(), text: truncated(p, RESIDUE_TERMS) }
}

fn from_verification(v: Verification) -> (bool, Witness) {
    let passed = v.passed();
    let residues = v.failures.iter().map(|Failure { label, residue: r }| residue(label.clone(), r)).collect();
    (passed, Witness { residues, notes: v.notes, ..Witness::default() })
}

type StepResult = cremona_core::Result<(bool, Witness)>;

fn execute(inst: &Instance, op: &Op, screener: &mut Screener) -> StepResult {
    match op {
        Op::Involution { map } => {
            let m = &inst.maps[map];
            let square = m.compose(m)?;
            let mut w = Witness::default();
            if m.is_identity() {
                w.notes.push("map is the identity".into());
            }
            for (i, img) in square.images().iter().enumerate() {
                let x = RationalFunction::var(m.ring(), i);
                if *img != x {
                    w.residues.push(residue(m.ring().vars()[i].clone(), (img - &x).numerator()));
                }
            }
            Ok((m.verify_involution()?, w))
        }
        Op::Pullback { map, ring, expr, image } => {
            let lhs = inst.pullback(map, ring, expr)?;
            let rhs = inst.lower(ring, image)?;
            Ok(compare(screener, "pullback", &lhs, &rhs))
        }
        Op::MonomialProfile { map, ring, generators, matrix, determinant } => {
            let m = &inst.maps[map];
            let gens = generators.iter().map(|g| inst.lower(ring, g)).collect::<cremona_core::Result<Vec<_>>>()?;
            let mut w = Witness::default();
            match m.monomial_profile(&gens)? {
                None => {
                    w.notes.push("some image is not a constant times a Laurent monomial in the generators".into());
                    monomial_residues(m, &gens, matrix, &mut w)?;
                    Ok((false, w))
                }
                Some(p) => {
                    let ok = p.matrix == *matrix && p.determinant == (*determinant).into();
                    if !ok {
                        w.notes.push(format!("expected matrix {matrix:?} with determinant {determinant}"));
                        monomial_residues(m, &gens, matrix, &mut w)?;
                    }
                    let unit = p.constants.iter().all(|c| *c == m.ring().field().one());
                    if !unit {
                        let cs: Vec<String> = p.constants.iter().map(|c| c.to_string()).collect();
                        w.notes.push(format!("constants {}", cs.join(", ")));
                    }
                    w.matrix = Some(p.matrix);
                    w.determinant = Some(p.determinant.to_string());
                    Ok((ok, w))
                }
            }
        }
        Op::Generation { ring } => {
            let c = inst.ring(ring).change.as_ref().expect("validated on load");
            Ok(from_verification(towers::verify_generation(c, screener)?))
        }
        Op::Relation { relation } => {
            let rel = &inst.relations[relation];
            let lowered = inst.lower(&rel.ring, &RationalFunction::from_poly(rel.poly.clone()))?;
            let mut w = Witness::default();
            if !lowered.is_zero() {
                w.residues.push(residue("relation", lowered.numerator()));
            }
            Ok((lowered.is_zero(), w))
        }
        Op::Transport { from, to } => transport(inst, from, to),
        Op::Eliminate { ring, divisor } => {
            let c = inst.ring(ring).change.as_ref().expect("validated on load");
            let r = towers::eliminate(c)?;
            let f = &inst.relations[divisor].poly;
            let mut w = Witness::default();
            w.notes.push(format!("eliminant: {} terms, total degree {}", r.num_terms(), r.total_degree()));
            let vanishes = towers::verify_relation(&r, c)?;
            if !vanishes.passed() {
                w.notes.push("eliminant does not vanish on the parametrization".into());
            }
            let ok = match r.div_exact(f) {
                Ok(q) => {
                    w.cofactor = Some(truncated(&q, RESIDUE_TERMS));
                    vanishes.passed()
                }
                Err(e) => {
                    w.error = Some(format!("relation does not divide the eliminant: {e}"));
                    w.residues.push(residue("eliminant", &r));
                    false
                }
            };
            Ok((ok, w))
        }
        Op::Singular { relation, locus, required } => {
            let rel = &inst.relations[relation];
            Ok(from_verification(towers::verify_singular_substitution(&rel.poly, locus, required)?))
        }
        Op::SolveLinear { relation, variable, solution } => {
            let rel = &inst.relations[relation];
            let e = towers::solve_linear_variable(&rel.poly, *variable)?;
            let ring = rel.poly.ring();
            let mut pairs = std::collections::HashMap::new();
            pairs.insert(ring.vars()[*variable].clone(), e.clone());
            let back = Substitution::with_identity_defaults(ring, ring, &pairs)?.apply_poly(&rel.poly)?;
            let mut w = Witness { solution: Some(e.to_string()), ..Witness::default() };
            let mut ok = back.is_zero();
            if !ok {
                w.residues.push(residue("resubstitution", back.numerator()));
            }
            if let Some(s) = solution {
                if !screener.equal(&e, s) {
                    ok = false;
                    w.residues.push(residue("solution", (&e - s).numerator()));
                }
            }
            Ok((ok, w))
        }
        Op::Invariance { map, ring, expr } => {
            Ok(compare(screener, "invariance", &inst.pullback(map, ring, expr)?, &inst.lower(ring, expr)?))
        }
        Op::Equals { ring, lhs, rhs_ring, rhs } => {
            let a = inst.lower(ring, lhs)?;
            let b = inst.lower(rhs_ring, rhs)?;
            Ok(compare(screener, "difference", &a, &b))
        }
        Op::Descent { map, ring, element, conjugate, invariant_ring, invariants, trace, norm } => {
            let w = QuadraticDescentWitness {
                element: element.clone(),
                conjugate: conjugate.clone(),
                invariant_ring: invariant_ring.clone(),
                invariants: invariants.clone(),
                trace: trace.clone(),
                norm: norm.clone(),
            };
            let v = towers::verify_quadratic_descent_via(&w, &inst.action(map, ring)?, &inst.lowering(ring)?, screener)?;
            Ok(from_verification(v))
        }
        Op::ReduceModP { map, source, p } => {
            let reduced = source.reduce_mod_p(*p)?;
            let m = &inst.maps[map];
            let mut w = Witness::default();
            if reduced.ring() != m.ring() {
                w.error = Some("reduced map lives in a different ring".into());
                return Ok((false, w));
            }
            for (i, (a, b)) in reduced.images().iter().zip(m.images()).enumerate() {
                if a != b {
                    w.residues.push(residue(m.ring().vars()[i].clone(), (a - b).numerator()));
                    w.notes.push(format!("reduction of {} is {}", m.ring().vars()[i], a));
                }
            }
            Ok((w.residues.is_empty(), w))
        }
        Op::DenominatorMatches { map, variable, ring, expr } => {
            let m = &inst.maps[map];
            let e = inst.lower(ring, expr)?;
            let den = m.images()[*variable].denominator();
            let mut w = Witness::default();
            let ok = match e.as_polynomial() {
                Some(p) => p.canonical() == den.canonical(),
                None => {
                    w.error = Some("expression is not a polynomial".into());
                    false
                }
            };
            if !ok {
                w.residues.push(residue("difference", &(den.canonical() - e.numerator().canonical())));
            }
            Ok((ok, w))
        }
    }
}

fn compare(screener: &mut Screener, label: &str, a: &RationalFunction, b: &RationalFunction) -> (bool, Witness) {
    match screener.residue(a, b) {
        None => (true, Witness::default()),
        Some(r) => (false, Witness { residues: vec![residue(label, &r)], ..Witness::default() }),
    }
}

fn transport(inst: &Instance, from: &str, to: &str) -> StepResult {
    let src = &inst.relations[from];
    let dst = &inst.relations[to];
    let path = transport_path(&inst.rings, &src.ring, &dst.ring).map_err(cremona_core::Error::Invalid)?;
    let mut rewrite: Option<Substitution> = None;
    let mut root = None;
    for name in &path {
        let c = inst.ring(name).change.as_ref().expect("path rings have changes");
        let b = c.backward.as_ref().expect("path rings have backward expressions");
        if let Some((rule, _)) = &b.root {
            if path.len() > 1 {
                return Err(cremona_core::Error::Invalid("root symbols are only supported on single-step transports".into()));
            }
            root = Some(rule.clone());
        }
        let s = c.backward_substitution().expect("checked above");
        rewrite = Some(match rewrite {
            None => s,
            Some(prev) => prev.then(&s)?,
        });
    }
    let rewrite = rewrite.expect("path is nonempty");
    let t = towers::transport_relation(&src.poly, &rewrite, root.as_ref(), &dst.poly)?;
    let mut w = Witness::default();
    match &t.cofactor {
        Some((c, m)) => {
            w.cofactor = Some(Polynomial::monomial(dst.poly.ring(), m.clone(), c.clone()).to_string());
        }
        None => {
            if !t.odd_part.is_zero() {
                w.residues.push(residue("odd part", &t.odd_part));
            }
            w.residues.push(residue("numerator", &t.numerator));
        }
    }
    Ok((t.passed(), w))
}
