//! Problem model: scalar fields, domain boxes, the two problem kinds
//! (inequality-only and mixed inequality/equality), and the problem-file
//! loader.
//!
//! A problem file is a small TOML document:
//!
//! ```toml
//! [problem]
//! kind = "inequality"          # or "mixed"
//! vars = ["x1", "x2"]
//! objective = "x1"
//! ineq = ["1 - x1^2 - x2^2"]   # each g_i, feasible means g_i >= 0
//! eq = []                      # each h_j, feasible means h_j = 0 (mixed only)
//!
//! [problem.domain]             # optional open box, per variable
//! x1 = "(-1.5, 1.5)"
//! x2 = "(-1.5, 1.5)"
//!
//! [candidate]
//! point = [1.0, 0.0]
//! act_tol = 1e-9               # optional
//! ```
//!
//! Objectives and constraints are expression text, or `builtin:<name>` for
//! the pathological fixtures that the grammar cannot express.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{self, EvalError, Expression};
use crate::linalg::norm2;

pub const DEFAULT_ACTIVITY_TOL: f64 = 1e-9;

/// Native implementations for functions outside the expression grammar.
///
/// `ParabolaIndicator` is the indicator of the punctured parabola
/// `{(a, a^2) : a != 0}`: every straight ray from the origin eventually
/// leaves the curve, so all directional derivatives at 0 vanish, yet the
/// curve itself carries the value 1 arbitrarily close to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builtin {
    ParabolaIndicator,
    EuclideanNorm,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "parabola_indicator" => Some(Builtin::ParabolaIndicator),
            "euclidean_norm" => Some(Builtin::EuclideanNorm),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::ParabolaIndicator => "parabola_indicator",
            Builtin::EuclideanNorm => "euclidean_norm",
        }
    }

    /// Minimum arity the builtin supports.
    pub fn min_arity(self) -> usize {
        match self {
            Builtin::ParabolaIndicator => 2,
            Builtin::EuclideanNorm => 1,
        }
    }

    pub fn evaluate(self, point: &[f64]) -> f64 {
        match self {
            Builtin::ParabolaIndicator => {
                if point[0] != 0.0 && point[1] == point[0] * point[0] {
                    1.0
                } else {
                    0.0
                }
            }
            Builtin::EuclideanNorm => norm2(point),
        }
    }

    /// Extra perturbation directions for the Hadamard probe, aimed at the
    /// curves along which the builtin misbehaves.
    pub fn adversarial_directions(self, n: usize) -> Vec<Vec<f64>> {
        match self {
            Builtin::ParabolaIndicator => {
                // steer probe sequences onto the parabola x2 = x1^2
                let mut d = vec![0.0; n];
                d[1] = 1.0;
                vec![d]
            }
            Builtin::EuclideanNorm => Vec::new(),
        }
    }
}

/// The source of a scalar field: parsed expression text or a builtin.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSource {
    Expr(Expression),
    Builtin(Builtin),
}

/// An evaluatable real-valued function of an n-vector. Stand-in for the
/// objective and constraint functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    source: FieldSource,
    arity: usize,
}

impl ScalarField {
    pub fn from_expression(expr: Expression) -> ScalarField {
        let arity = expr.arity();
        ScalarField {
            source: FieldSource::Expr(expr),
            arity,
        }
    }

    pub fn from_builtin(builtin: Builtin, arity: usize) -> Result<ScalarField, ProblemError> {
        if arity < builtin.min_arity() {
            return Err(ProblemError::Format {
                line: 0,
                message: format!(
                    "builtin `{}` needs at least {} variables, problem has {}",
                    builtin.name(),
                    builtin.min_arity(),
                    arity
                ),
            });
        }
        Ok(ScalarField {
            source: FieldSource::Builtin(builtin),
            arity,
        })
    }

    /// Parses `source` text, accepting the `builtin:<name>` scheme.
    pub fn parse(source: &str, vars: &[String]) -> Result<ScalarField, ProblemError> {
        if let Some(name) = source.trim().strip_prefix("builtin:") {
            let builtin = Builtin::from_name(name.trim())
                .ok_or_else(|| ProblemError::UnknownBuiltin(name.trim().to_string()))?;
            return ScalarField::from_builtin(builtin, vars.len());
        }
        let expr = expr::parse(source, vars)?;
        Ok(ScalarField::from_expression(expr))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn source(&self) -> &FieldSource {
        &self.source
    }

    pub fn builtin(&self) -> Option<Builtin> {
        match self.source {
            FieldSource::Builtin(b) => Some(b),
            FieldSource::Expr(_) => None,
        }
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64, EvalError> {
        match &self.source {
            FieldSource::Expr(e) => e.evaluate(point),
            FieldSource::Builtin(b) => {
                if point.len() != self.arity {
                    return Err(EvalError::ArityMismatch {
                        expected: self.arity,
                        got: point.len(),
                    });
                }
                Ok(b.evaluate(point))
            }
        }
    }

    /// Canonical text form, reparseable by [`ScalarField::parse`].
    pub fn source_text(&self) -> String {
        match &self.source {
            FieldSource::Expr(e) => e.to_string(),
            FieldSource::Builtin(b) => format!("builtin:{}", b.name()),
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source_text())
    }
}

/// Open box standing in for the open set the problem lives on. Bounds may be
/// infinite; the candidate must be strictly inside.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    intervals: Vec<(f64, f64)>,
}

impl DomainBox {
    pub fn unbounded(n: usize) -> DomainBox {
        DomainBox {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn new(intervals: Vec<(f64, f64)>) -> Result<DomainBox, ProblemError> {
        for (i, (lo, hi)) in intervals.iter().enumerate() {
            if !(lo < hi) || lo.is_nan() || hi.is_nan() {
                return Err(ProblemError::Format {
                    line: 0,
                    message: format!("domain interval {} has lower >= upper", i + 1),
                });
            }
        }
        Ok(DomainBox { intervals })
    }

    pub fn dimension(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Strict interiority test.
    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.intervals.len()
            && point
                .iter()
                .zip(&self.intervals)
                .all(|(x, (lo, hi))| *x > *lo && *x < *hi)
    }

    /// Radius of the largest max-norm ball around `point` inside the box.
    /// Infinite for an unbounded box.
    pub fn interior_radius(&self, point: &[f64]) -> f64 {
        point
            .iter()
            .zip(&self.intervals)
            .map(|(x, (lo, hi))| (x - lo).min(hi - x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_unbounded(&self) -> bool {
        self.intervals
            .iter()
            .all(|(lo, hi)| lo.is_infinite() && hi.is_infinite())
    }
}

/// Maximize f0 subject to f_i(x) >= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityProblem {
    pub vars: Vec<String>,
    pub objective: ScalarField,
    pub inequalities: Vec<ScalarField>,
    pub domain: DomainBox,
}

/// Maximize f subject to g_i(x) >= 0 and h_j(x) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProblem {
    pub vars: Vec<String>,
    pub objective: ScalarField,
    pub inequalities: Vec<ScalarField>,
    pub equalities: Vec<ScalarField>,
    pub domain: DomainBox,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Inequality(InequalityProblem),
    Mixed(MixedProblem),
}

impl Problem {
    pub fn dimension(&self) -> usize {
        self.vars().len()
    }

    pub fn vars(&self) -> &[String] {
        match self {
            Problem::Inequality(p) => &p.vars,
            Problem::Mixed(p) => &p.vars,
        }
    }

    pub fn objective(&self) -> &ScalarField {
        match self {
            Problem::Inequality(p) => &p.objective,
            Problem::Mixed(p) => &p.objective,
        }
    }

    pub fn inequalities(&self) -> &[ScalarField] {
        match self {
            Problem::Inequality(p) => &p.inequalities,
            Problem::Mixed(p) => &p.inequalities,
        }
    }

    pub fn equalities(&self) -> &[ScalarField] {
        match self {
            Problem::Inequality(_) => &[],
            Problem::Mixed(p) => &p.equalities,
        }
    }

    pub fn domain(&self) -> &DomainBox {
        match self {
            Problem::Inequality(p) => &p.domain,
            Problem::Mixed(p) => &p.domain,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Problem::Inequality(_) => "inequality",
            Problem::Mixed(_) => "mixed",
        }
    }
}

/// Candidate point under scrutiny, with its activity tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub point: Vec<f64>,
    pub act_tol: f64,
}

impl Candidate {
    pub fn new(point: Vec<f64>) -> Candidate {
        Candidate {
            point,
            act_tol: DEFAULT_ACTIVITY_TOL,
        }
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("candidate point lies outside the domain box")]
    PointOutsideDomain,
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Parse(#[from] expr::ParseError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Per-constraint values and flags at a point.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub inequality_values: Vec<f64>,
    pub equality_values: Vec<f64>,
    pub in_domain: bool,
    pub feasible: bool,
}

/// Evaluates all constraints at `point` and flags feasibility within `tol`:
/// all g_i >= -tol, all |h_j| <= tol, and the point strictly inside the box.
pub fn feasibility_report(
    problem: &Problem,
    point: &[f64],
    tol: f64,
) -> Result<FeasibilityReport, EvalError> {
    if point.len() != problem.dimension() {
        return Err(EvalError::ArityMismatch {
            expected: problem.dimension(),
            got: point.len(),
        });
    }
    let inequality_values = problem
        .inequalities()
        .iter()
        .map(|g| g.evaluate(point))
        .collect::<Result<Vec<_>, _>>()?;
    let equality_values = problem
        .equalities()
        .iter()
        .map(|h| h.evaluate(point))
        .collect::<Result<Vec<_>, _>>()?;
    let in_domain = problem.domain().contains(point);
    let feasible = in_domain
        && inequality_values.iter().all(|v| *v >= -tol)
        && equality_values.iter().all(|v| v.abs() <= tol);
    Ok(FeasibilityReport {
        inequality_values,
        equality_values,
        in_domain,
        feasible,
    })
}

// ---------------------------------------------------------------------------
// Problem files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct ProblemFile {
    problem: ProblemSection,
    candidate: CandidateSection,
}

#[derive(Deserialize)]
struct ProblemSection {
    kind: String,
    vars: Vec<String>,
    objective: String,
    #[serde(default)]
    ineq: Vec<String>,
    #[serde(default)]
    eq: Vec<String>,
    #[serde(default)]
    domain: toml::Table,
}

#[derive(Deserialize)]
struct CandidateSection {
    point: Vec<f64>,
    act_tol: Option<f64>,
}

fn parse_interval(text: &str) -> Option<(f64, f64)> {
    let trimmed = text.trim();
    let inner = trimmed.strip_prefix('(')?.strip_suffix(')')?;
    let (lo, hi) = inner.split_once(',')?;
    let parse_bound = |s: &str| -> Option<f64> {
        let s = s.trim();
        match s {
            "-inf" => Some(f64::NEG_INFINITY),
            "inf" | "+inf" => Some(f64::INFINITY),
            _ => s.parse().ok(),
        }
    };
    Some((parse_bound(lo)?, parse_bound(hi)?))
}

fn format_bound(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{}", v)
    }
}

/// Loads and fully validates a problem file.
pub fn load_problem(path: &Path) -> Result<(Problem, Candidate), ProblemError> {
    let text = std::fs::read_to_string(path)?;
    load_problem_str(&text)
}

/// Parses problem-file text. See the module docs for the format.
pub fn load_problem_str(text: &str) -> Result<(Problem, Candidate), ProblemError> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| ProblemError::Format {
        line: e
            .span()
            .map(|s| text[..s.start.min(text.len())].lines().count())
            .unwrap_or(0),
        message: e.message().to_string(),
    })?;

    let vars = file.problem.vars;
    let n = vars.len();
    if n == 0 {
        return Err(ProblemError::Format {
            line: 0,
            message: "problem declares no variables".into(),
        });
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.clone()) {
                return Err(ProblemError::Format {
                    line: 0,
                    message: format!("duplicate variable `{}`", v),
                });
            }
        }
    }

    let objective = ScalarField::parse(&file.problem.objective, &vars)?;
    let inequalities = file
        .problem
        .ineq
        .iter()
        .map(|s| ScalarField::parse(s, &vars))
        .collect::<Result<Vec<_>, _>>()?;
    let equalities = file
        .problem
        .eq
        .iter()
        .map(|s| ScalarField::parse(s, &vars))
        .collect::<Result<Vec<_>, _>>()?;

    let mut intervals = vec![(f64::NEG_INFINITY, f64::INFINITY); n];
    for (key, value) in &file.problem.domain {
        let idx = vars
            .iter()
            .position(|v| v == key)
            .ok_or_else(|| ProblemError::Format {
                line: 0,
                message: format!("domain bound for undeclared variable `{}`", key),
            })?;
        let text = value.as_str().ok_or_else(|| ProblemError::Format {
            line: 0,
            message: format!("domain bound for `{}` must be a \"(lo, hi)\" string", key),
        })?;
        intervals[idx] = parse_interval(text).ok_or_else(|| ProblemError::Format {
            line: 0,
            message: format!("cannot parse interval `{}` for `{}`", text, key),
        })?;
    }
    let domain = DomainBox::new(intervals)?;

    let point = file.candidate.point;
    if point.len() != n {
        return Err(ProblemError::DimensionMismatch(format!(
            "candidate point has {} entries, problem has {} variables",
            point.len(),
            n
        )));
    }
    if point.iter().any(|x| !x.is_finite()) {
        return Err(ProblemError::Format {
            line: 0,
            message: "candidate point has non-finite entries".into(),
        });
    }
    if !domain.contains(&point) {
        return Err(ProblemError::PointOutsideDomain);
    }
    let act_tol = file.candidate.act_tol.unwrap_or(DEFAULT_ACTIVITY_TOL);
    if !(act_tol > 0.0) {
        return Err(ProblemError::Format {
            line: 0,
            message: "act_tol must be positive".into(),
        });
    }

    let problem = match file.problem.kind.as_str() {
        "inequality" => {
            if !equalities.is_empty() {
                return Err(ProblemError::Format {
                    line: 0,
                    message: "inequality problems cannot carry eq constraints".into(),
                });
            }
            Problem::Inequality(InequalityProblem {
                vars,
                objective,
                inequalities,
                domain,
            })
        }
        "mixed" => {
            if equalities.is_empty() {
                return Err(ProblemError::Format {
                    line: 0,
                    message: "mixed problems need at least one eq constraint".into(),
                });
            }
            Problem::Mixed(MixedProblem {
                vars,
                objective,
                inequalities,
                equalities,
                domain,
            })
        }
        other => {
            return Err(ProblemError::Format {
                line: 0,
                message: format!("unknown problem kind `{}`", other),
            });
        }
    };

    Ok((problem, Candidate { point, act_tol }))
}

/// Canonical problem-file text. Loading the output reproduces the problem
/// and candidate structurally.
pub fn to_file_string(problem: &Problem, candidate: &Candidate) -> String {
    let mut out = String::new();
    out.push_str("[problem]\n");
    out.push_str(&format!("kind = \"{}\"\n", problem.kind_name()));
    let vars = problem
        .vars()
        .iter()
        .map(|v| format!("\"{}\"", v))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("vars = [{}]\n", vars));
    out.push_str(&format!(
        "objective = \"{}\"\n",
        problem.objective().source_text()
    ));
    let ineq = problem
        .inequalities()
        .iter()
        .map(|g| format!("\"{}\"", g.source_text()))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("ineq = [{}]\n", ineq));
    if let Problem::Mixed(p) = problem {
        let eq = p
            .equalities
            .iter()
            .map(|h| format!("\"{}\"", h.source_text()))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("eq = [{}]\n", eq));
    }
    if !problem.domain().is_unbounded() {
        out.push_str("\n[problem.domain]\n");
        for (name, (lo, hi)) in problem.vars().iter().zip(problem.domain().intervals()) {
            if lo.is_infinite() && hi.is_infinite() {
                continue;
            }
            out.push_str(&format!(
                "{} = \"({}, {})\"\n",
                name,
                format_bound(*lo),
                format_bound(*hi)
            ));
        }
    }
    out.push_str("\n[candidate]\n");
    let point = candidate
        .point
        .iter()
        .map(|x| format!("{:?}", x))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("point = [{}]\n", point));
    out.push_str(&format!("act_tol = {:?}\n", candidate.act_tol));
    out
}
