use std::fmt::Write;

use cone_audit_core::geometry::{ConeDescription, ConeEquality};
use cone_audit_core::objectives::{AffineConstraint, ConstraintKind};
use cone_audit_core::optimality::{Certificate, ConditionReport, Evidence, Verdict};
use cone_audit_core::ssd::Theorem41Outcome;

use crate::report::{ConesSection, ReportDocument, Section, SetView, VerifySummary};

fn tag(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "HOLDS",
        Verdict::Fails => "FAILS",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

fn floats(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn condition(out: &mut String, r: &ConditionReport) {
    let _ = write!(out, "  [{}] {}", tag(r.verdict), r.condition.label());
    if let Some(d) = &r.direction {
        let _ = write!(out, " (v = {d})");
    }
    match (&r.margin, &r.evidence) {
        (Some(m), _) => {
            let _ = write!(out, ", margin {m}");
        }
        (None, Evidence::ConeLinear { .. } | Evidence::AffineLinear { .. }) => {
            out.push_str(", unbounded below")
        }
        (None, _) => {}
    }
    if r.boundary {
        out.push_str(" (within tolerance of zero)");
    }
    out.push('\n');
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "      witness {:?} {} with value {}", w.kind, w.vector, w.value);
    }
    match &r.certificate {
        Some(Certificate::Lagrange(c)) => {
            let _ = writeln!(
                out,
                "      multipliers: {} inequality, equality {}",
                c.inequality.len(),
                c.equality
            );
        }
        Some(Certificate::AffineMultiplier { multiplier }) => {
            let _ = writeln!(out, "      multiplier {multiplier}");
        }
        Some(Certificate::Copositivity(t)) => {
            let _ = writeln!(
                out,
                "      copositivity via {:?}: {} cells certified, {} open, depth {}",
                t.method, t.cells_certified, t.cells_open, t.depth_reached
            );
        }
        None => {}
    }
    for n in &r.notes {
        let _ = writeln!(out, "      note: {n}");
    }
}

fn cone(out: &mut String, name: &str, c: &ConeDescription) {
    let _ = writeln!(out, "  {name}:");
    for row in c.rows.equalities.row_vectors() {
        let _ = writeln!(out, "      <{row}, w> = 0");
    }
    for (i, row) in c.rows.inequalities.row_vectors().iter().enumerate() {
        let label = c.rows.labels.get(i).map(|l| format!(" [row {l}]")).unwrap_or_default();
        let _ = writeln!(out, "      <{row}, w> <= 0{label}");
    }
    if c.rows.equalities.nrows() + c.rows.inequalities.nrows() == 0 {
        out.push_str("      whole space\n");
    }
    if let Some(g) = &c.generators {
        for r in &g.rays {
            let _ = writeln!(out, "      ray {r}");
        }
        for l in &g.lineality {
            let _ = writeln!(out, "      line {l}");
        }
    }
}

fn affine(out: &mut String, name: &str, a: &AffineConstraint) {
    let op = match a.kind {
        ConstraintKind::Inequality => "<=",
        ConstraintKind::Equality => "=",
    };
    let _ = writeln!(out, "  {name}: <{}, w> {op} {}", floats(&a.normal), a.rhs);
}

fn set(out: &mut String, name: &str, s: &SetView) {
    match s {
        SetView::Cone(c) => cone(out, name, c),
        SetView::Affine(a) => affine(out, name, a),
    }
}

fn cones(out: &mut String, c: &ConesSection) {
    if let Some(rows) = &c.active_rows {
        let _ = writeln!(out, "  active rows {rows:?}");
    }
    set(out, "tangent cone T", &c.tangent);
    if let Some(n) = &c.normal {
        cone(out, "normal cone N", n);
    }
    if let Some(k) = &c.critical {
        cone(out, "critical cone K", k);
    }
    for d in &c.directions {
        let _ = writeln!(out, "  direction v = {} (tangent: {})", d.direction, d.in_tangent_cone);
        if let Some(t2) = &d.second_order_tangent {
            set(out, "second-order tangent set T2", t2);
        }
        if let Some(cmp) = &d.comparison {
            match &cmp.equality {
                ConeEquality::Equal => out.push_str("      T2 equals T\n"),
                ConeEquality::Differ { witness, in_first } => {
                    let (inside, outside) = if *in_first { ("T", "T2") } else { ("T2", "T") };
                    let strict = if cmp.tangent_in_second_order { " (T is a proper subset)" } else { "" };
                    let _ = writeln!(out, "      T2 differs from T{strict}: {witness} is in {inside} but not {outside}");
                }
            }
        }
        for n in &d.notes {
            let _ = writeln!(out, "      note: {n}");
        }
    }
}

pub fn render_human(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", doc.tool.name, doc.tool.version, doc.command.name());
    if let Some(t) = doc.config.tolerance {
        let _ = writeln!(out, "float regime, tolerance {t:e}");
    } else {
        out.push_str("exact regime\n");
    }
    for s in &doc.sections {
        match s {
            Section::Cones(c) => {
                out.push_str("cones\n");
                cones(&mut out, c);
            }
            Section::FirstOrder(r) => {
                out.push_str("first-order\n");
                condition(&mut out, r);
            }
            Section::SecondOrder(t) => {
                let _ = writeln!(out, "second-order at v = {}", t.direction.v);
                for r in t.reports() {
                    condition(&mut out, r);
                }
            }
            Section::Qp(q) => {
                out.push_str("quadratic program\n");
                for r in q.reports() {
                    condition(&mut out, r);
                }
                cone(&mut out, "critical cone K", &q.critical_cone);
            }
            Section::Membership(m) => {
                let verdict = if m.result.is_member() { "member" } else { "not a member" };
                let _ = writeln!(
                    out,
                    "membership z = {} at v = {}: {verdict} (estimate {:e} over {} samples, worst at x = {})",
                    floats(&m.candidate),
                    floats(&m.direction),
                    m.result.worst_quotient,
                    m.result.samples,
                    floats(&m.result.attaining_sample)
                );
                if let Some(i) = &m.interval {
                    let _ = writeln!(
                        out,
                        "  closed form [{}, {}], agrees: {}",
                        i.lower,
                        i.upper,
                        m.interval_agrees.unwrap_or(false)
                    );
                }
            }
            Section::Theorem41(t) => {
                let outcome = match t.outcome {
                    Theorem41Outcome::HypothesisViolated => "hypothesis violated",
                    Theorem41Outcome::Holds => "holds",
                    Theorem41Outcome::Fails => "fails",
                    Theorem41Outcome::Inconclusive => "inconclusive",
                };
                let d = &t.direction;
                let _ = writeln!(out, "bidirectional second-order check at v = {}: {outcome}", d.v);
                let _ = writeln!(
                    out,
                    "  v tangent: {}, -v tangent: {}, gradient orthogonal: {}",
                    d.in_tangent_cone, d.negation_in_tangent_cone, d.gradient_orthogonal
                );
                for r in t.gradient_condition.iter().chain(&t.pairings) {
                    condition(&mut out, r);
                }
            }
        }
    }
    let _ = writeln!(out, "outcome: {} (exit {})", tag(doc.outcome.verdict), doc.outcome.exit_code);
    out
}

pub fn render_verify(summary: &VerifySummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "checked {} items, {} failed",
        summary.checked,
        summary.failures.len()
    );
    for f in &summary.failures {
        let _ = writeln!(out, "  {f}");
    }
    out
}
