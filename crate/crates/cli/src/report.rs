use serde::{Deserialize, Serialize};

use cone_audit_core::geometry::{ConeDescription, ConeEquality};
use cone_audit_core::objectives::AffineConstraint;
use cone_audit_core::optimality::{
    ConditionReport, CopositivityConfig, QpReport, Theorem33Report, Vector, Verdict,
};
use cone_audit_core::ssd::{
    candidate_membership, Membership, MembershipVerdict, MeshSpec, SsdInterval, Theorem41Outcome,
    Theorem41Report,
};

use crate::problem::ProblemFile;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;
pub const EXIT_ANALYSIS_ERROR: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tangent, normal, critical and second-order tangent cones.
    Cones,
    FirstOrder,
    /// Per-direction second-order comparison for C² objectives.
    SecondOrder,
    /// Quadratic-programming conditions, exact regime.
    Qp,
    /// Second-order subgradient membership for each (direction, candidate).
    Ssd,
    /// Bidirectional second-order condition for C¹ objectives.
    Theorem41,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Cones => "cones",
            Command::FirstOrder => "first-order",
            Command::SecondOrder => "second-order",
            Command::Qp => "qp",
            Command::Ssd => "ssd",
            Command::Theorem41 => "theorem41",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Float-regime tolerance; absent in the exact regime.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub mesh: MeshSpec,
    pub copositivity: CopositivityConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetView {
    Cone(ConeDescription),
    Affine(AffineConstraint),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeComparison {
    pub tangent_in_second_order: bool,
    /// `first` is the tangent cone, `second` the second-order tangent set.
    pub equality: ConeEquality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionCones {
    pub direction: Vector,
    pub in_tangent_cone: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_order_tangent: Option<SetView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ConeComparison>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_rows: Option<Vec<usize>>,
    pub tangent: SetView,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<ConeDescription>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<ConeDescription>,
    pub directions: Vec<DirectionCones>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipSection {
    pub direction: Vec<f64>,
    pub candidate: Vec<f64>,
    pub result: MembershipVerdict,
    /// Closed-form interval, for the shipped piecewise family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<SsdInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval_agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "section", content = "body")]
pub enum Section {
    Cones(ConesSection),
    FirstOrder(ConditionReport),
    SecondOrder(Box<Theorem33Report>),
    Qp(Box<QpReport>),
    Membership(MembershipSection),
    Theorem41(Box<Theorem41Report>),
}

impl Section {
    pub fn verdict(&self) -> Verdict {
        match self {
            Section::Cones(_) => Verdict::Holds,
            Section::FirstOrder(r) => r.verdict,
            Section::SecondOrder(t) => fold(t.reports()),
            Section::Qp(q) => q.verdict(),
            Section::Membership(m) => match m.result.verdict {
                Membership::Member => Verdict::Holds,
                Membership::NotMember => Verdict::Fails,
            },
            Section::Theorem41(t) => match t.outcome {
                Theorem41Outcome::Holds => Verdict::Holds,
                Theorem41Outcome::HypothesisViolated | Theorem41Outcome::Fails => Verdict::Fails,
                Theorem41Outcome::Inconclusive => Verdict::Inconclusive,
            },
        }
    }

    /// Every condition report in the section, nested ones included.
    pub fn condition_reports(&self) -> Vec<&ConditionReport> {
        match self {
            Section::Cones(_) | Section::Membership(_) => Vec::new(),
            Section::FirstOrder(r) => vec![r],
            Section::SecondOrder(t) => t.reports().to_vec(),
            Section::Qp(q) => {
                let mut out = q.reports().to_vec();
                out.extend(&q.tangent_gradient_by_direction);
                out
            }
            Section::Theorem41(t) => t.gradient_condition.iter().chain(&t.pairings).collect(),
        }
    }
}

fn fold<'a>(reports: impl IntoIterator<Item = &'a ConditionReport>) -> Verdict {
    reports
        .into_iter()
        .fold(Verdict::Holds, |acc, r| acc.and(r.verdict))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcome {
    pub verdict: Verdict,
    pub exit_code: i32,
}

impl Outcome {
    pub fn from_sections(sections: &[Section]) -> Self {
        let verdict = sections
            .iter()
            .fold(Verdict::Holds, |acc, s| acc.and(s.verdict()));
        let exit_code = match verdict {
            Verdict::Holds => EXIT_HOLDS,
            Verdict::Fails => EXIT_FAILS,
            Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        };
        Self { verdict, exit_code }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub tool: ToolInfo,
    pub command: Command,
    pub config: RunConfig,
    pub input: ProblemFile,
    pub sections: Vec<Section>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-validates every witness and certificate in a report: condition
/// witnesses against their evidence, cone-comparison witnesses against both
/// cones, memberships by re-running the oracle on the echoed input, and the
/// recorded outcome against the sections.
pub fn verify_report(doc: &ReportDocument) -> VerifySummary {
    let mut s = VerifySummary::default();
    for (i, section) in doc.sections.iter().enumerate() {
        for r in section.condition_reports() {
            s.checked += 1;
            match r.recheck() {
                Ok(true) => {}
                Ok(false) => s.failures.push(format!(
                    "section {i}: {} ({:?}) does not re-validate",
                    r.condition.label(),
                    r.verdict
                )),
                Err(e) => s.failures.push(format!("section {i}: {}: {e}", r.condition.label())),
            }
        }
        match section {
            Section::Cones(c) => verify_cones(i, c, &mut s),
            Section::Membership(m) => verify_membership(i, doc, m, &mut s),
            _ => {}
        }
    }
    s.checked += 1;
    if Outcome::from_sections(&doc.sections) != doc.outcome {
        s.failures.push("recorded outcome does not match the sections".into());
    }
    s
}

fn verify_cones(i: usize, c: &ConesSection, s: &mut VerifySummary) {
    let SetView::Cone(t) = &c.tangent else {
        return;
    };
    for d in &c.directions {
        let (Some(cmp), Some(SetView::Cone(t2))) = (&d.comparison, &d.second_order_tangent) else {
            continue;
        };
        s.checked += 1;
        let check = || -> cone_audit_core::Result<bool> {
            let first = t.rows.to_cone()?;
            let second = t2.rows.to_cone()?;
            let included = cone_audit_core::geometry::cone_included(&first, &second)?;
            let consistent = match &cmp.equality {
                ConeEquality::Equal => cone_audit_core::geometry::cone_equal(&first, &second)?.is_equal(),
                ConeEquality::Differ { witness, in_first } => {
                    first.contains(witness)? == *in_first && second.contains(witness)? != *in_first
                }
            };
            Ok(consistent && included == cmp.tangent_in_second_order)
        };
        match check() {
            Ok(true) => {}
            Ok(false) => s
                .failures
                .push(format!("section {i}: cone comparison at {} does not re-validate", d.direction)),
            Err(e) => s.failures.push(format!("section {i}: {e}")),
        }
    }
}

fn verify_membership(i: usize, doc: &ReportDocument, m: &MembershipSection, s: &mut VerifySummary) {
    s.checked += 1;
    let recomputed = doc.input.resolve().ok().and_then(|p| {
        candidate_membership(
            &p.objective.smooth(),
            &p.point.float,
            &m.direction,
            &m.candidate,
            &m.result.mesh,
        )
        .ok()
        .flatten()
    });
    match recomputed {
        Some(r) if r == m.result => {}
        Some(_) => s
            .failures
            .push(format!("section {i}: membership result differs on re-evaluation")),
        None => s
            .failures
            .push(format!("section {i}: membership could not be re-evaluated from the input")),
    }
}
