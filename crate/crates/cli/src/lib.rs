//! Problem-file ingestion, command dispatch and report rendering for the
//! `cone-audit` binary.

pub mod problem;
pub mod render;
pub mod report;
pub mod run;

pub use problem::{parse_problem, ProblemFile};
pub use report::{verify_report, Command, ReportDocument};
pub use run::{run_analysis, RunError, RunOptions};

/// Problem files shipped with the binary, by name.
pub const SAMPLES: [(&str, &str); 3] = [
    ("orthant-qp", include_str!("../fixtures/orthant-qp.json")),
    ("ex31-second-order", include_str!("../fixtures/ex31-second-order.json")),
    ("ex41-theorem41", include_str!("../fixtures/ex41-theorem41.json")),
];

pub fn sample(name: &str) -> Option<&'static str> {
    SAMPLES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// `--mesh` value parser.
pub fn ssd_mesh(text: &str) -> Result<cone_audit_core::ssd::MeshSpec, String> {
    text.parse().map_err(|e: cone_audit_core::Error| e.to_string())
}
