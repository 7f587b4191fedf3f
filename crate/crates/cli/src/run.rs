use thiserror::Error;

use cone_audit_core::geometry::{cone_equal, cone_included, Polyhedron};
use cone_audit_core::objectives::SmoothLevelSetConstraint;
use cone_audit_core::optimality::{
    check_qp, critical_cone, critical_cone_float, first_order_check, first_order_check_affine,
    first_order_check_float, theorem33_check, theorem33_check_quadratic, theorem33_check_smooth,
    CopositivityConfig, Vector, DEFAULT_TOLERANCE,
};
use cone_audit_core::ssd::{
    candidate_membership, ssd_interval_1d_example_family, theorem41_check, Candidates, MeshSpec,
};

use crate::problem::{Constraint, Objective, Problem, ProblemFile, Regime, SchemaErrors};
use crate::report::{
    Command, ConeComparison, ConesSection, DirectionCones, MembershipSection, Outcome,
    ReportDocument, RunConfig, Section, SetView, ToolInfo, EXIT_ANALYSIS_ERROR, EXIT_INPUT_ERROR,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid problem file:\n{0}")]
    Schema(#[from] SchemaErrors),
    #[error("{message}\nhint: {hint}")]
    Mismatch { message: String, hint: String },
    #[error(transparent)]
    Analysis(#[from] cone_audit_core::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Schema(_) | RunError::Mismatch { .. } => EXIT_INPUT_ERROR,
            RunError::Analysis(_) => EXIT_ANALYSIS_ERROR,
        }
    }
}

fn mismatch(message: impl Into<String>, hint: impl Into<String>) -> RunError {
    RunError::Mismatch {
        message: message.into(),
        hint: hint.into(),
    }
}

/// Overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub tolerance: Option<f64>,
    pub mesh: Option<MeshSpec>,
    pub depth: Option<usize>,
}

pub fn run_analysis(
    pf: &ProblemFile,
    command: Command,
    options: &RunOptions,
) -> Result<ReportDocument, RunError> {
    let p = pf.resolve()?;
    let mut copositivity = CopositivityConfig::default();
    if let Some(depth) = options.depth {
        copositivity.depth_limit = depth;
    }
    let config = RunConfig {
        tolerance: match p.regime {
            Regime::Exact => None,
            Regime::Float => Some(options.tolerance.or(p.tolerance).unwrap_or(DEFAULT_TOLERANCE)),
        },
        mesh: options.mesh.clone().unwrap_or_default(),
        copositivity,
    };
    if let Some(t) = config.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(mismatch(format!("tolerance {t} is invalid"), "pass a nonnegative number"));
        }
    }
    config.mesh.validate()?;
    let sections = match command {
        Command::Cones => vec![Section::Cones(cones(&p, &config)?)],
        Command::FirstOrder => vec![first_order(&p, &config)?],
        Command::SecondOrder => second_order(&p, &config)?,
        Command::Qp => vec![qp(&p, &config)?],
        Command::Ssd => ssd(&p, &config)?,
        Command::Theorem41 => theorem41(&p, &config)?,
    };
    let outcome = Outcome::from_sections(&sections);
    Ok(ReportDocument {
        tool: ToolInfo::current(),
        command,
        config,
        input: pf.clone(),
        sections,
        outcome,
    })
}

fn tol(config: &RunConfig) -> f64 {
    config.tolerance.unwrap_or(DEFAULT_TOLERANCE)
}

fn exact_quadratic(p: &Problem) -> Option<&cone_audit_core::objectives::QuadraticObjective> {
    match (&p.objective, p.regime) {
        (Objective::Quadratic(q), Regime::Exact) => Some(q),
        _ => None,
    }
}

fn polyhedral_cones(p: &Problem, d: &Polyhedron) -> Result<ConesSection, RunError> {
    let x = &p.point.exact;
    d.require_member(x)?;
    let t = d.tangent_cone(x)?;
    let critical = match exact_quadratic(p) {
        Some(q) => critical_cone(&q.gradient(x)?, &t)?,
        None => critical_cone_float(&p.objective.smooth().gradient(&p.point.float)?, &t)?,
    };
    let mut directions = Vec::new();
    for v in &p.directions {
        let in_t = t.contains(&v.exact)?;
        let mut entry = DirectionCones {
            direction: Vector::Exact(v.exact.clone()),
            in_tangent_cone: in_t,
            second_order_tangent: None,
            comparison: None,
            notes: Vec::new(),
        };
        if in_t {
            let t2 = d.second_order_tangent_set(x, &v.exact)?.cone;
            entry.comparison = Some(ConeComparison {
                tangent_in_second_order: cone_included(&t, &t2)?,
                equality: cone_equal(&t, &t2)?,
            });
            entry.second_order_tangent = Some(SetView::Cone(t2.describe()?));
        } else {
            entry
                .notes
                .push("direction is not tangent; the second-order tangent set is empty".into());
        }
        directions.push(entry);
    }
    Ok(ConesSection {
        active_rows: Some(d.active_set(x)?.indices),
        tangent: SetView::Cone(t.describe()?),
        normal: Some(d.normal_cone(x)?.describe()?),
        critical: Some(critical.describe()?),
        directions,
    })
}

fn smooth_cones(p: &Problem, c: &SmoothLevelSetConstraint, config: &RunConfig) -> Result<ConesSection, RunError> {
    let tol = tol(config);
    let x = &p.point.float;
    let t = c.tangent_cone(x, tol)?;
    let mut directions = Vec::new();
    for v in &p.directions {
        let mut entry = DirectionCones {
            direction: Vector::Float(v.float.clone()),
            in_tangent_cone: t.contains_direction(&v.float, tol),
            second_order_tangent: None,
            comparison: None,
            notes: Vec::new(),
        };
        match c.second_order_tangent(x, &v.float, tol) {
            Ok(t2) => entry.second_order_tangent = Some(SetView::Affine(t2.unit_normal_form())),
            Err(e) => entry.notes.push(format!("no second-order tangent set: {e}")),
        }
        directions.push(entry);
    }
    Ok(ConesSection {
        active_rows: None,
        tangent: SetView::Affine(t.unit_normal_form()),
        normal: None,
        critical: None,
        directions,
    })
}

fn cones(p: &Problem, config: &RunConfig) -> Result<ConesSection, RunError> {
    match &p.constraint {
        Constraint::Polyhedron(d) => polyhedral_cones(p, d),
        Constraint::Smooth(c) => smooth_cones(p, c, config),
    }
}

fn first_order(p: &Problem, config: &RunConfig) -> Result<Section, RunError> {
    let report = match &p.constraint {
        Constraint::Polyhedron(d) => {
            d.require_member(&p.point.exact)?;
            let t = d.tangent_cone(&p.point.exact)?;
            match exact_quadratic(p) {
                Some(q) => first_order_check(&q.gradient(&p.point.exact)?, &t)?,
                None => {
                    let g = p.objective.smooth().gradient(&p.point.float)?;
                    first_order_check_float(&g, &t, tol(config))?
                }
            }
        }
        Constraint::Smooth(c) => {
            let g = p.objective.smooth().gradient(&p.point.float)?;
            first_order_check_affine(&g, &c.tangent_cone(&p.point.float, tol(config))?, tol(config))?
        }
    };
    Ok(Section::FirstOrder(report))
}

fn require_directions(p: &Problem, command: Command) -> Result<(), RunError> {
    if p.directions.is_empty() {
        return Err(mismatch(
            format!("`{}` needs at least one direction", command.name()),
            "add query.directions to the problem file",
        ));
    }
    Ok(())
}

fn require_candidates(p: &Problem, command: Command) -> Result<(), RunError> {
    if p.candidates.is_empty() {
        return Err(mismatch(
            format!("`{}` needs at least one second-order subgradient candidate", command.name()),
            "add query.candidates to the problem file",
        ));
    }
    Ok(())
}

fn require_float(p: &Problem, command: Command) -> Result<(), RunError> {
    if p.regime != Regime::Float {
        return Err(mismatch(
            format!("`{}` evaluates gradients in binary64", command.name()),
            "set query.regime to \"float\"",
        ));
    }
    Ok(())
}

fn second_order(p: &Problem, config: &RunConfig) -> Result<Vec<Section>, RunError> {
    require_directions(p, Command::SecondOrder)?;
    let mut out = Vec::new();
    for v in &p.directions {
        let report = match &p.constraint {
            Constraint::Polyhedron(d) => match exact_quadratic(p) {
                Some(q) => theorem33_check_quadratic(q, d, &p.point.exact, &v.exact)?,
                None => theorem33_check(&p.objective.smooth(), d, &p.point.exact, &v.exact, tol(config))?,
            },
            Constraint::Smooth(c) => {
                let obj = p.objective.smooth();
                if !obj.has_hessian() {
                    return Err(mismatch(
                        "`second-order` needs a Hessian and this objective has none",
                        "use `theorem41` for C¹ objectives",
                    ));
                }
                theorem33_check_smooth(&obj, c, &p.point.float, &v.float, tol(config))?
            }
        };
        out.push(Section::SecondOrder(Box::new(report)));
    }
    Ok(out)
}

fn qp(p: &Problem, config: &RunConfig) -> Result<Section, RunError> {
    let Constraint::Polyhedron(d) = &p.constraint else {
        return Err(mismatch(
            "`qp` needs a polyhedral constraint",
            "use `second-order` for smooth constraints",
        ));
    };
    let Some(q) = exact_quadratic(p) else {
        return Err(mismatch(
            "`qp` needs a quadratic objective in the exact regime",
            "give objective.quadratic and set query.regime to \"exact\"",
        ));
    };
    Ok(Section::Qp(Box::new(check_qp(q, d, &p.point.exact, &config.copositivity)?)))
}

fn ssd(p: &Problem, config: &RunConfig) -> Result<Vec<Section>, RunError> {
    require_float(p, Command::Ssd)?;
    require_directions(p, Command::Ssd)?;
    require_candidates(p, Command::Ssd)?;
    let obj = p.objective.smooth();
    let descriptor = match &p.objective {
        Objective::Smooth { descriptor, .. } => *descriptor,
        Objective::Quadratic(_) => None,
    };
    let mut out = Vec::new();
    for v in &p.directions {
        let interval = descriptor
            .and_then(|d| ssd_interval_1d_example_family(&d, p.point.float[0], v.float[0]).ok());
        for z in &p.candidates {
            let Some(result) = candidate_membership(&obj, &p.point.float, &v.float, z, &config.mesh)? else {
                return Err(mismatch(
                    "membership needs a one-dimensional objective or a Hessian",
                    "use a one-dimensional fixture or a quadratic objective",
                ));
            };
            let interval_agrees =
                interval.map(|i| i.contains(z[0], config.mesh.tolerance) == result.is_member());
            out.push(Section::Membership(MembershipSection {
                direction: v.float.clone(),
                candidate: z.clone(),
                result,
                interval,
                interval_agrees,
            }));
        }
    }
    Ok(out)
}

fn theorem41(p: &Problem, config: &RunConfig) -> Result<Vec<Section>, RunError> {
    require_float(p, Command::Theorem41)?;
    require_directions(p, Command::Theorem41)?;
    require_candidates(p, Command::Theorem41)?;
    let Constraint::Polyhedron(d) = &p.constraint else {
        return Err(mismatch(
            "`theorem41` needs a polyhedral constraint",
            "describe the constraint set with constraint.polyhedron",
        ));
    };
    let obj = p.objective.smooth();
    let candidates = Candidates::Samples(p.candidates.clone());
    let mut out = Vec::new();
    for v in &p.directions {
        let report = theorem41_check(&obj, d, &p.point.exact, &v.exact, &candidates, &config.mesh, tol(config))?;
        out.push(Section::Theorem41(Box::new(report)));
    }
    Ok(out)
}
