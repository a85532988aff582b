//! Verification reports and their text and JSON renderings.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{SuiteError, SuiteResult};

/// Residues wider than this many terms are truncated when rendered.
pub const RESIDUE_TERMS: usize = 40;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residue {
    pub label: String,
    pub terms: usize,
    pub text: String,
}

/// Evidence attached to a step: what was computed, and what went wrong.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determinant: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residues: Vec<Residue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Witness {
    pub fn is_empty(&self) -> bool {
        *self == Witness::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub id: String,
    pub op: String,
    pub display: String,
    /// Verdict the scenario expects from the check.
    pub expected: bool,
    /// Verdict the check returned.
    pub outcome: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erratum: Option<String>,
    #[serde(default, skip_serializing_if = "Witness::is_empty")]
    pub witness: Witness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl StepRecord {
    pub fn passed(&self) -> bool {
        self.expected == self.outcome
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantRecord {
    pub name: String,
    pub description: String,
    pub derived: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub id: String,
    pub title: String,
    pub characteristic: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantRecord>,
    pub steps: Vec<StepRecord>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(StepRecord::passed)
    }

    pub fn label(&self) -> String {
        match &self.variant {
            Some(v) => format!("{}[{}]", self.id, v.name),
            None => self.id.clone(),
        }
    }

    pub fn step(&self, id: &str) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedStep {
    pub scenario: String,
    pub step: String,
    pub display: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residues: Vec<Residue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantFinding {
    pub name: String,
    pub description: String,
    pub derived: bool,
    /// `None` when no step of that kind ran for the variant.
    pub involution: Option<bool>,
    pub matches_reduction: Option<bool>,
    pub consistent_with_definition: Option<bool>,
    /// Scenario label and whether every step of it passed.
    pub chains: Vec<(String, bool)>,
    pub failing_steps: Vec<FailedStep>,
}

impl VariantFinding {
    pub fn passed(&self) -> bool {
        self.chains.iter().all(|(_, ok)| *ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErratumNote {
    pub scenario: String,
    pub step: String,
    pub display: String,
    pub note: String,
    /// True when the check confirmed the displayed formula is inconsistent.
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrataReport {
    pub variants: Vec<VariantFinding>,
    /// The unique displayed variant that passes every chain, if any.
    pub winner: Option<String>,
    pub verdict: String,
    pub notes: Vec<ErratumNote>,
}

impl ErrataReport {
    pub fn determined(&self) -> bool {
        self.winner.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl PropertyRecord {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub scenarios: Vec<ScenarioReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errata: Option<ErrataReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<PropertyRecord>,
}

impl VerificationReport {
    /// Aggregate verdict: every scenario passes except the displayed
    /// variants that lost the errata determination, and every property holds.
    pub fn passed(&self) -> bool {
        let winner = self.errata.as_ref().and_then(|e| e.winner.clone());
        let has_variants = self.scenarios.iter().any(|s| s.variant.is_some());
        if has_variants && winner.is_none() {
            return false;
        }
        let scenarios_ok = self.scenarios.iter().all(|s| match &s.variant {
            Some(v) if !v.derived && Some(&v.name) != winner.as_ref() => true,
            _ => s.passed(),
        });
        scenarios_ok && self.properties.iter().all(PropertyRecord::passed)
    }

    /// Every verdict in the report, keyed by a stable path.
    pub fn verdicts(&self) -> Vec<(String, bool)> {
        let mut out = Vec::new();
        for s in &self.scenarios {
            for st in &s.steps {
                out.push((format!("{}/{}", s.label(), st.id), st.outcome));
            }
        }
        if let Some(e) = &self.errata {
            for v in &e.variants {
                out.push((format!("errata/{}", v.name), v.passed()));
            }
            out.push(("errata/winner".into(), e.winner.is_some()));
        }
        for p in &self.properties {
            out.push((format!("property/{}", p.name), p.passed()));
        }
        out.sort();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> SuiteResult<VerificationReport> {
        serde_json::from_str(text).map_err(|e| SuiteError::Input(format!("report: {e}")))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {}", self.seed);
        for s in &self.scenarios {
            let _ = writeln!(out, "\nscenario {} ({}, char {}): {}", s.label(), s.title, s.characteristic, verdict(s.passed()));
            if let Some(v) = &s.variant {
                let _ = writeln!(out, "  variant {}: {}", v.name, v.description);
            }
            for st in &s.steps {
                let mark = if st.passed() { "PASS" } else { "FAIL" };
                let expect = if st.expected { "" } else { " (expected false)" };
                let _ = write!(out, "  [{mark}] {} {} :: {}{expect}", st.id, st.op, st.display);
                if let Some(ms) = st.duration_ms {
                    let _ = write!(out, " [{ms} ms]");
                }
                out.push('\n');
                if let Some(e) = &st.erratum {
                    let _ = writeln!(out, "      erratum: {e}");
                }
                write_witness(&mut out, &st.witness, "      ");
            }
        }
        if let Some(e) = &self.errata {
            let _ = writeln!(out, "\n{}", e.to_text().trim_end());
        }
        if !self.properties.is_empty() {
            let _ = writeln!(out, "\nproperties");
            for p in &self.properties {
                let _ = writeln!(out, "  [{}] {} ({} cases, {} failures)", if p.passed() { "PASS" } else { "FAIL" }, p.name, p.cases, p.failures);
                for d in &p.details {
                    let _ = writeln!(out, "      {d}");
                }
            }
        }
        let _ = writeln!(out, "\noverall: {}", verdict(self.passed()));
        out
    }

    /// Writes the report; `json` selects the structured format.
    pub fn save(&self, path: &Path, json: bool) -> SuiteResult<()> {
        let text = if json { self.to_json() } else { self.to_text() };
        std::fs::write(path, text).map_err(|e| SuiteError::io(path, e))
    }

    pub fn load(path: &Path) -> SuiteResult<VerificationReport> {
        let text = std::fs::read_to_string(path).map_err(|e| SuiteError::io(path, e))?;
        VerificationReport::from_json(&text)
    }
}

impl ErrataReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "errata: {}", self.verdict);
        for v in &self.variants {
            let kind = if v.derived { "computed" } else { "displayed" };
            let _ = writeln!(out, "  variant {} ({kind}): {}", v.name, v.description);
            let _ = writeln!(
                out,
                "    involution {}, matches reduction {}, consistent with definition {}",
                yes_no(v.involution),
                yes_no(v.matches_reduction),
                yes_no(v.consistent_with_definition)
            );
            for (chain, ok) in &v.chains {
                let _ = writeln!(out, "    chain {chain}: {}", verdict(*ok));
            }
            for f in &v.failing_steps {
                let _ = writeln!(out, "    failing {}/{} :: {}", f.scenario, f.step, f.display);
                if let Some(e) = &f.error {
                    let _ = writeln!(out, "      error: {e}");
                }
                for r in &f.residues {
                    let _ = writeln!(out, "      residue {} ({} terms): {}", r.label, r.terms, r.text);
                }
            }
        }
        for n in &self.notes {
            let state = if n.confirmed { "confirmed" } else { "not reproduced" };
            let _ = writeln!(out, "  note {}/{} ({state}): {}", n.scenario, n.step, n.note);
        }
        out
    }
}

fn write_witness(out: &mut String, w: &Witness, indent: &str) {
    if let Some(c) = &w.cofactor {
        let _ = writeln!(out, "{indent}cofactor: {c}");
    }
    if let Some(s) = &w.solution {
        let _ = writeln!(out, "{indent}solution: {s}");
    }
    if let Some(m) = &w.matrix {
        let rows: Vec<String> = m.iter().map(|r| format!("{r:?}")).collect();
        let _ = writeln!(out, "{indent}matrix: [{}]", rows.join(", "));
    }
    if let Some(d) = &w.determinant {
        let _ = writeln!(out, "{indent}determinant: {d}");
    }
    for r in &w.residues {
        let _ = writeln!(out, "{indent}residue {} ({} terms): {}", r.label, r.terms, r.text);
    }
    for n in &w.notes {
        let _ = writeln!(out, "{indent}note: {n}");
    }
    if let Some(e) = &w.error {
        let _ = writeln!(out, "{indent}error: {e}");
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn yes_no(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "not checked",
    }
}
