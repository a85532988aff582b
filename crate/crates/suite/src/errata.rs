//! Decides between alternative readings of displayed formulas.

use crate::report::{ErrataReport, ErratumNote, FailedStep, ScenarioReport, VariantFinding};

/// Summarizes variant runs: for each variant, whether it is an involution,
/// agrees with the direct reduction, matches the ring definitions, and
/// passes every chain it appears in.
pub fn analyze(reports: &[ScenarioReport]) -> ErrataReport {
    let mut names: Vec<String> = Vec::new();
    for r in reports {
        if let Some(v) = &r.variant {
            if !names.contains(&v.name) {
                names.push(v.name.clone());
            }
        }
    }
    let mut variants = Vec::new();
    for name in &names {
        let runs: Vec<&ScenarioReport> = reports.iter().filter(|r| r.variant.as_ref().is_some_and(|v| &v.name == name)).collect();
        let info = runs[0].variant.as_ref().expect("filtered on variant");
        let all = |op: &str| {
            let mut steps = runs.iter().flat_map(|r| &r.steps).filter(|s| s.op == op).peekable();
            steps.peek().is_some().then(|| steps.all(|s| s.outcome))
        };
        let mut failing_steps = Vec::new();
        for r in &runs {
            for s in r.steps.iter().filter(|s| !s.passed()) {
                failing_steps.push(FailedStep {
                    scenario: r.label(),
                    step: s.id.clone(),
                    display: s.display.clone(),
                    residues: s.witness.residues.clone(),
                    error: s.witness.error.clone(),
                });
            }
        }
        variants.push(VariantFinding {
            name: name.clone(),
            description: info.description.clone(),
            derived: info.derived,
            involution: all("involution"),
            matches_reduction: all("reduce_mod_p"),
            consistent_with_definition: all("denominator_matches"),
            chains: runs.iter().map(|r| (r.label(), r.passed())).collect(),
            failing_steps,
        });
    }

    let passing: Vec<&VariantFinding> = variants.iter().filter(|v| !v.derived && v.passed()).collect();
    let (winner, verdict) = match passing.as_slice() {
        _ if variants.is_empty() => (None, "no alternative readings to decide".to_string()),
        [one] => (Some(one.name.clone()), format!("displayed variant `{}` passes every chain; every other displayed variant fails", one.name)),
        [] => (None, "no displayed variant passes every chain: the displayed formulas are unverifiable under either reading".to_string()),
        many => {
            let names: Vec<&str> = many.iter().map(|v| v.name.as_str()).collect();
            (None, format!("several displayed variants pass ({}): the checks do not discriminate", names.join(", ")))
        }
    };

    let mut notes = Vec::new();
    for r in reports {
        let relevant = match &r.variant {
            None => true,
            Some(v) => winner.as_ref() == Some(&v.name),
        };
        if !relevant {
            continue;
        }
        for s in &r.steps {
            if let Some(note) = &s.erratum {
                notes.push(ErratumNote { scenario: r.label(), step: s.id.clone(), display: s.display.clone(), note: note.clone(), confirmed: s.passed() });
            }
        }
    }
    ErrataReport { variants, winner, verdict, notes }
}
