//! Scenario-driven verification of a Cremona involution's rationality proof
//! chain, with errata detection and randomized property suites.

pub mod errata;
pub mod error;
pub mod oracle;
pub mod properties;
pub mod report;
pub mod runner;
pub mod scenario;

use std::path::PathBuf;

pub use error::{SuiteError, SuiteResult};
pub use report::{ErrataReport, ScenarioReport, VerificationReport};
pub use scenario::{load_dir, load_scenario, Instance, Scenario};

/// Environment variable overriding the scenario directory.
pub const SCENARIO_ENV: &str = "CREMONA_SCENARIOS";

/// Scenario directory: the environment override, else `./scenarios`, else
/// the directory shipped with the sources.
pub fn scenario_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(SCENARIO_ENV) {
        return PathBuf::from(dir);
    }
    let local = PathBuf::from("scenarios");
    if local.is_dir() {
        return local;
    }
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"))
}

/// Per-instance seed, so that parallel runs stay reproducible.
fn instance_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs every instance of every scenario concurrently. Reports are sorted by
/// label, so the output does not depend on scheduling. The errata analysis
/// is attached when any scenario has variants or erratum steps.
pub fn run_scenarios(scenarios: &[Scenario], seed: u64, timings: bool) -> VerificationReport {
    let instances: Vec<&Instance> = scenarios.iter().flat_map(|s| &s.instances).collect();
    let mut reports: Vec<ScenarioReport> = std::thread::scope(|s| {
        let handles: Vec<_> = instances
            .iter()
            .map(|inst| s.spawn(move || runner::run_instance(inst, instance_seed(seed, &inst.label()), timings)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread")).collect()
    });
    reports.sort_by_key(|r| r.label());
    let needs_errata = reports.iter().any(|r| r.variant.is_some() || r.steps.iter().any(|s| s.erratum.is_some()));
    let errata = needs_errata.then(|| errata::analyze(&reports));
    VerificationReport { seed, scenarios: reports, errata, properties: Vec::new() }
}

/// Every scenario, the errata analysis and the property suites. An empty
/// scenario list gives an empty report.
pub fn run_all(scenarios: &[Scenario], seed: u64, timings: bool) -> VerificationReport {
    let mut report = run_scenarios(scenarios, seed, timings);
    if scenarios.is_empty() {
        return report;
    }
    let instances: Vec<&Instance> = scenarios.iter().flat_map(|s| &s.instances).collect();
    report.properties = properties::run_properties(seed, &instances);
    report
}

/// Runs the scenarios that carry variants or erratum steps and analyzes them.
pub fn detect_errata(scenarios: &[Scenario], seed: u64) -> ErrataReport {
    let relevant: Vec<Scenario> = scenarios
        .iter()
        .filter(|s| s.has_variants() || s.file.steps.iter().any(|st| st.erratum.is_some()))
        .cloned()
        .collect();
    errata::analyze(&run_scenarios(&relevant, seed, false).scenarios)
}
