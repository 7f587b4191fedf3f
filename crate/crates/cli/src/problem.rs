//! Problem files: a strict, versioned JSON document.
//!
//! ```json
//! {
//!   "version": 1,
//!   "objective": { "quadratic": { "m": [["1", "0"], ["0", "1"]], "q": ["0", "0"], "alpha": "0" } },
//!   "constraint": { "polyhedron": { "dim": 2, "inequalities": { "rows": [["-1", "0"], ["0", "-1"]], "bounds": ["0", "0"] } } },
//!   "query": { "regime": "exact", "point": ["0", "0"], "directions": [["1", "0"]] }
//! }
//! ```
//!
//! Matrix and right-hand-side entries are rationals written as `"p/q"`
//! strings or JSON integers. Binary64 numbers appear only in float-regime
//! query blocks.

use std::fmt;

use cone_audit_core::geometry::Polyhedron;
use cone_audit_core::kernel::{from_f64, int, parse_rational, to_f64, Rational, RationalMatrix, RationalVector};
use cone_audit_core::objectives::fixtures::{self, FixtureConstraint, PiecewiseMonomialGradient, FIXTURE_NAMES};
use cone_audit_core::objectives::{QuadraticObjective, SmoothLevelSetConstraint, SmoothObjective};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const FORMAT_VERSION: u64 = 1;

/// A rational or binary64 entry as written in the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveBlock {
    Quadratic {
        m: Vec<Vec<Entry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Vec<Entry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<Entry>,
    },
    Fixture(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualityBlock {
    pub matrix: Vec<Vec<Entry>>,
    pub rhs: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityBlock {
    pub rows: Vec<Vec<Entry>>,
    pub bounds: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedronBlock {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalities: Option<EqualityBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<InequalityBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintBlock {
    Polyhedron(PolyhedronBlock),
    Fixture(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Exact,
    Float,
}

/// A vector of entries, or the name of a fixture point such as `"x1"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointEntry {
    Named(String),
    Entries(Vec<Entry>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryBlock {
    pub regime: Regime,
    pub point: PointEntry,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directions: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u64,
    pub objective: ObjectiveBlock,
    pub constraint: ConstraintBlock,
    pub query: QueryBlock,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Every problem found in a file, in document order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaErrors(pub Vec<SchemaError>);

impl fmt::Display for SchemaErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for SchemaErrors {}

/// A point or direction in both exact and binary64 form. Binary64 input is
/// converted exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorValue {
    pub exact: RationalVector,
    pub float: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum Objective {
    Quadratic(QuadraticObjective),
    Smooth {
        objective: SmoothObjective,
        descriptor: Option<PiecewiseMonomialGradient>,
    },
}

impl Objective {
    /// Binary64 view (quadratics gain a Hessian evaluator).
    pub fn smooth(&self) -> SmoothObjective {
        match self {
            Objective::Quadratic(q) => q.to_smooth("quadratic"),
            Objective::Smooth { objective, .. } => objective.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Constraint {
    Polyhedron(Polyhedron),
    Smooth(SmoothLevelSetConstraint),
}

/// A validated problem with resolved fixtures.
#[derive(Clone, Debug)]
pub struct Problem {
    pub dim: usize,
    pub regime: Regime,
    pub objective: Objective,
    pub constraint: Constraint,
    pub point: VectorValue,
    pub directions: Vec<VectorValue>,
    pub candidates: Vec<Vec<f64>>,
    pub tolerance: Option<f64>,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, SchemaErrors> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        SchemaErrors(vec![SchemaError {
            path: "$".into(),
            message: format!("not valid JSON: {e}"),
        }])
    })?;
    let mut v = Validator::default();
    v.problem(&value);
    if !v.errors.is_empty() {
        return Err(SchemaErrors(v.errors));
    }
    serde_json::from_value(value).map_err(|e| {
        SchemaErrors(vec![SchemaError {
            path: "$".into(),
            message: e.to_string(),
        }])
    })
}

impl ProblemFile {
    pub fn resolve(&self) -> Result<Problem, SchemaErrors> {
        let value = serde_json::to_value(self).expect("problem files serialize");
        let mut v = Validator::default();
        match v.problem(&value) {
            Some(p) if v.errors.is_empty() => Ok(p),
            _ => Err(SchemaErrors(v.errors)),
        }
    }
}

#[derive(Default)]
struct Validator {
    errors: Vec<SchemaError>,
}

fn join(path: &str, key: impl fmt::Display) -> String {
    format!("{path}.{key}")
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

impl Validator {
    fn err(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(SchemaError {
            path: path.into(),
            message: message.into(),
        });
    }

    fn object<'a>(
        &mut self,
        value: &'a Value,
        path: &str,
        allowed: &[&str],
        required: &[&str],
    ) -> Option<&'a Map<String, Value>> {
        let Some(map) = value.as_object() else {
            self.err(path, "expected an object");
            return None;
        };
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(join(path, key), format!("unknown field; expected one of {allowed:?}"));
            }
        }
        for key in required {
            if !map.contains_key(*key) {
                self.err(join(path, key), "missing field");
            }
        }
        Some(map)
    }

    /// Objects with exactly one key out of `variants`.
    fn variant<'a>(&mut self, value: &'a Value, path: &str, variants: &[&str]) -> Option<(&'a str, &'a Value)> {
        let map = self.object(value, path, variants, &[])?;
        if map.len() != 1 {
            self.err(path, format!("expected exactly one of {variants:?}"));
            return None;
        }
        let (k, v) = map.iter().next()?;
        variants.contains(&k.as_str()).then_some((k.as_str(), v))
    }

    fn array<'a>(&mut self, value: &'a Value, path: &str) -> Option<&'a Vec<Value>> {
        let a = value.as_array();
        if a.is_none() {
            self.err(path, "expected an array");
        }
        a
    }

    /// A rational entry; with `allow_float` a binary64 number is also
    /// accepted and converted exactly.
    fn number(&mut self, value: &Value, path: &str, allow_float: bool) -> Option<(Rational, f64)> {
        match value {
            Value::String(s) => match parse_rational(s) {
                Ok(r) => {
                    let f = to_f64(&r);
                    Some((r, f))
                }
                Err(_) => {
                    self.err(path, format!("invalid rational {s:?}"));
                    None
                }
            },
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    return Some((Rational::from_integer(i.into()), i as f64));
                }
                if n.is_u64() {
                    self.err(path, "integer out of range; write it as a string");
                    return None;
                }
                let f = n.as_f64().unwrap_or(f64::NAN);
                if !allow_float {
                    self.err(
                        path,
                        format!("binary64 number {f} where an exact rational is required; write it as a string such as \"p/q\""),
                    );
                    return None;
                }
                match from_f64(f) {
                    Ok(r) => Some((r, f)),
                    Err(_) => {
                        self.err(path, "number is not finite");
                        None
                    }
                }
            }
            _ => {
                self.err(path, "expected a rational string or a number");
                None
            }
        }
    }

    fn vector(&mut self, value: &Value, path: &str, len: Option<usize>, allow_float: bool) -> Option<VectorValue> {
        let items = self.array(value, path)?;
        if let Some(n) = len {
            if items.len() != n {
                self.err(path, format!("expected {n} entries, found {}", items.len()));
            }
        }
        let mut exact = Vec::with_capacity(items.len());
        let mut float = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            match self.number(item, &index(path, i), allow_float) {
                Some((r, f)) => {
                    exact.push(r);
                    float.push(f);
                }
                None => ok = false,
            }
        }
        ok.then(|| VectorValue {
            exact: RationalVector::new(exact),
            float,
        })
    }

    fn matrix(&mut self, value: &Value, path: &str, cols: usize) -> Option<RationalMatrix> {
        let rows = self.array(value, path)?;
        let mut out = Vec::with_capacity(rows.len());
        let mut ok = true;
        for (i, row) in rows.iter().enumerate() {
            match self.vector(row, &index(path, i), Some(cols), false) {
                Some(r) if r.exact.len() == cols => out.push(r.exact),
                _ => ok = false,
            }
        }
        if !ok {
            return None;
        }
        RationalMatrix::from_rows(cols, out).ok()
    }

    fn problem(&mut self, value: &Value) -> Option<Problem> {
        let root = self.object(value, "$", &["version", "objective", "constraint", "query"], &["version", "objective", "constraint", "query"])?;
        match root.get("version").map(|v| v.as_u64()) {
            Some(Some(FORMAT_VERSION)) | None => {}
            Some(_) => self.err("$.version", format!("unsupported version; expected {FORMAT_VERSION}")),
        }
        let regime = root.get("query").and_then(|q| q.get("regime")).and_then(|r| match r.as_str() {
            Some("exact") => Some(Regime::Exact),
            Some("float") => Some(Regime::Float),
            _ => None,
        });
        let objective = root.get("objective").and_then(|o| self.objective(o, regime));
        let constraint = root.get("constraint").and_then(|c| self.constraint(c, regime));
        let dim = match (&objective, &constraint) {
            (Some((o, _)), Some((c, _))) => {
                let od = match o {
                    Objective::Quadratic(q) => q.dim(),
                    Objective::Smooth { objective, .. } => objective.dim(),
                };
                let cd = match c {
                    Constraint::Polyhedron(p) => p.dim(),
                    Constraint::Smooth(s) => s.dim(),
                };
                if od != cd {
                    self.err("$.constraint", format!("constraint has dimension {cd} but the objective has dimension {od}"));
                }
                Some(od)
            }
            _ => None,
        };
        let names: Vec<&'static str> = [
            constraint.as_ref().and_then(|c| c.1),
            objective.as_ref().and_then(|o| o.1),
        ]
        .into_iter()
        .flatten()
        .collect();
        let query = root.get("query").and_then(|q| self.query(q, dim, &names));
        let (objective, constraint, query) = (objective?, constraint?, query?);
        Some(Problem {
            dim: dim?,
            regime: query.regime,
            objective: objective.0,
            constraint: constraint.0,
            point: query.point,
            directions: query.directions,
            candidates: query.candidates,
            tolerance: query.tolerance,
        })
    }

    fn fixture_name(&mut self, value: &Value, path: &str) -> Option<&'static str> {
        let Some(name) = value.as_str() else {
            self.err(path, "expected a fixture name");
            return None;
        };
        let found = FIXTURE_NAMES.iter().find(|n| **n == name).copied();
        if found.is_none() {
            self.err(path, format!("unknown fixture {name:?}; available: {FIXTURE_NAMES:?}"));
        }
        found
    }

    fn require_float(&mut self, path: &str, regime: Option<Regime>, what: &str) {
        if regime == Some(Regime::Exact) {
            self.err(path, format!("{what} is evaluated in binary64; set query.regime to \"float\""));
        }
    }

    fn objective(&mut self, value: &Value, regime: Option<Regime>) -> Option<(Objective, Option<&'static str>)> {
        let path = "$.objective";
        let (kind, body) = self.variant(value, path, &["quadratic", "fixture"])?;
        if kind == "fixture" {
            let name = self.fixture_name(body, &join(path, "fixture"))?;
            self.require_float(&join(path, "fixture"), regime, "a fixture objective");
            let f = fixtures::fixture(name).ok()?;
            return Some((
                Objective::Smooth {
                    objective: f.objective,
                    descriptor: f.gradient_descriptor,
                },
                Some(name),
            ));
        }
        let path = join(path, "quadratic");
        let map = self.object(body, &path, &["m", "q", "alpha"], &["m"])?;
        let m_value = map.get("m")?;
        let n = m_value.as_array().map(|a| a.len()).unwrap_or(0);
        if n == 0 {
            self.err(join(&path, "m"), "expected a nonempty square matrix");
            return None;
        }
        let m = self.matrix(m_value, &join(&path, "m"), n);
        let q = match map.get("q") {
            Some(q) => self.vector(q, &join(&path, "q"), Some(n), false).map(|v| v.exact),
            None => Some(RationalVector::zeros(n)),
        };
        let alpha = match map.get("alpha") {
            Some(a) => self.number(a, &join(&path, "alpha"), false).map(|x| x.0),
            None => Some(int(0)),
        };
        let (m, q, alpha) = (m?, q?, alpha?);
        if q.len() != n {
            return None;
        }
        match QuadraticObjective::new(m, q, alpha) {
            Ok(obj) => Some((Objective::Quadratic(obj), None)),
            Err(e) => {
                self.err(join(&path, "m"), e.to_string());
                None
            }
        }
    }

    fn constraint(&mut self, value: &Value, regime: Option<Regime>) -> Option<(Constraint, Option<&'static str>)> {
        let path = "$.constraint";
        let (kind, body) = self.variant(value, path, &["polyhedron", "fixture"])?;
        if kind == "fixture" {
            let fpath = join(path, "fixture");
            let name = self.fixture_name(body, &fpath)?;
            let f = fixtures::fixture(name).ok()?;
            return Some(match f.constraint {
                FixtureConstraint::Polyhedral(p) => (Constraint::Polyhedron(p), Some(name)),
                FixtureConstraint::Smooth(s) => {
                    self.require_float(&fpath, regime, "a smooth constraint");
                    (Constraint::Smooth(s), Some(name))
                }
            });
        }
        let path = join(path, "polyhedron");
        let map = self.object(body, &path, &["dim", "equalities", "inequalities"], &["dim"])?;
        let n = match map.get("dim")?.as_u64() {
            Some(n) if n >= 1 => n as usize,
            _ => {
                self.err(join(&path, "dim"), "expected a positive integer");
                return None;
            }
        };
        let mut ok = true;
        let mut block = |v: &mut Self, key: &str, mkey: &str, rkey: &str| -> Option<(RationalMatrix, RationalVector)> {
            let bpath = join(&path, key);
            let Some(b) = map.get(key) else {
                return Some((RationalMatrix::empty(n), RationalVector::zeros(0)));
            };
            let Some(bm) = v.object(b, &bpath, &[mkey, rkey], &[mkey, rkey]) else {
                ok = false;
                return None;
            };
            let a = bm.get(mkey).and_then(|m| v.matrix(m, &join(&bpath, mkey), n));
            let rows = a.as_ref().map(|a| a.nrows());
            let r = bm.get(rkey).and_then(|r| v.vector(r, &join(&bpath, rkey), rows, false));
            match (a, r) {
                (Some(a), Some(r)) if r.exact.len() == a.nrows() => Some((a, r.exact)),
                _ => {
                    ok = false;
                    None
                }
            }
        };
        let eq = block(self, "equalities", "matrix", "rhs");
        let ineq = block(self, "inequalities", "rows", "bounds");
        let ((a, b), (c, d)) = (eq?, ineq?);
        if !ok {
            return None;
        }
        match Polyhedron::new(a, b, c, d) {
            Ok(p) => Some((Constraint::Polyhedron(p), None)),
            Err(e) => {
                self.err(path, e.to_string());
                None
            }
        }
    }

    fn query(&mut self, value: &Value, dim: Option<usize>, fixtures: &[&'static str]) -> Option<ParsedQuery> {
        let path = "$.query";
        let map = self.object(
            value,
            path,
            &["regime", "point", "directions", "candidates", "tolerance"],
            &["regime", "point"],
        )?;
        let regime = match map.get("regime").map(|r| r.as_str()) {
            Some(Some("exact")) => Some(Regime::Exact),
            Some(Some("float")) => Some(Regime::Float),
            Some(_) => {
                self.err(join(path, "regime"), "expected \"exact\" or \"float\"");
                None
            }
            None => None,
        };
        let allow_float = regime == Some(Regime::Float);
        let point = map.get("point").and_then(|p| {
            let ppath = join(path, "point");
            if let Some(name) = p.as_str() {
                let found = fixtures
                    .iter()
                    .find_map(|f| fixtures::fixture(f).ok()?.point(name).map(|x| x.to_vec()));
                let Some(x) = found else {
                    self.err(&ppath, format!("no fixture point named {name:?} here"));
                    return None;
                };
                if !allow_float {
                    self.err(&ppath, "named fixture points are binary64; set query.regime to \"float\"");
                    return None;
                }
                let exact = RationalVector::from_f64(&x).ok()?;
                return Some(VectorValue { exact, float: x });
            }
            self.vector(p, &ppath, dim, allow_float)
        });
        let list = |v: &mut Self, key: &str, allow: bool| -> Option<Vec<VectorValue>> {
            let Some(items) = map.get(key) else {
                return Some(Vec::new());
            };
            let lpath = join(path, key);
            let items = v.array(items, &lpath)?;
            let mut out = Vec::new();
            let mut ok = true;
            for (i, item) in items.iter().enumerate() {
                match v.vector(item, &index(&lpath, i), dim, allow) {
                    Some(x) => out.push(x),
                    None => ok = false,
                }
            }
            ok.then_some(out)
        };
        let directions = list(self, "directions", allow_float);
        let candidates = list(self, "candidates", true);
        let tolerance = match map.get("tolerance") {
            None => None,
            Some(t) => match t.as_f64() {
                Some(t) if t.is_finite() && t >= 0.0 && allow_float => Some(t),
                Some(_) if !allow_float => {
                    self.err(join(path, "tolerance"), "tolerances apply only to the float regime");
                    None
                }
                _ => {
                    self.err(join(path, "tolerance"), "expected a nonnegative number");
                    None
                }
            },
        };
        Some(ParsedQuery {
            regime: regime?,
            point: point?,
            directions: directions?,
            candidates: candidates?.into_iter().map(|c| c.float).collect(),
            tolerance,
        })
    }
}

struct ParsedQuery {
    regime: Regime,
    point: VectorValue,
    directions: Vec<VectorValue>,
    candidates: Vec<Vec<f64>>,
    tolerance: Option<f64>,
}
