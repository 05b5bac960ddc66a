//! Scenario runner: parses a JSON scenario, runs the check battery for its
//! kind against `integrable-core`, and emits a deterministic JSON report.

pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::CliError;
pub use report::{emit_report, read_report, CheckRecord, Report};
pub use run::run_scenario;
pub use scenario::{parse_scenario, Kind, Scenario};

/// Overrides applied on top of a parsed scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) -> Result<(), CliError> {
        if let Some(t) = self.tolerance {
            scenario.tolerances.tolerance = Some(t);
        }
        if let Some(s) = self.seed {
            scenario.seed = s;
        }
        scenario.validate()
    }
}
