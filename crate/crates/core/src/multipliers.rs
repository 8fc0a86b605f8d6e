//! The multiplier engine: active-set detection, Fritz John multipliers via
//! the supporting-hyperplane LP, constraint-qualification checks, and the
//! KKT normalization.
//!
//! The engine works on the gradient rows of the objective, the active
//! inequality constraints, and (for mixed problems) the equality
//! constraints. Writing the rows as a matrix `M`, the cone spanned by the
//! images `M u` plus the nonpositive recession block is either a
//! neighborhood of the origin (no multipliers; an improving step exists) or
//! supports a hyperplane at the origin, whose normal is exactly a multiplier
//! vector: nonnegative on the recession coordinates, free on the equality
//! coordinates, annihilating every column of `M`. Nontriviality is enforced
//! by the normalization row `sum lambda_i + sum (mu_j+ + mu_j-) = 1`, which
//! turns the homogeneous system into a bounded LP feasibility problem.
//!
//! Estimated gradient entries below `grad_zero_tol` (relative to the row
//! scale) are snapped to zero so a stationary objective is recognized as the
//! zero row rather than as estimator noise.
//!
//! Inactive constraints are excluded from the gradient system but never
//! certified for lower semicontinuity; every certificate carries a note to
//! that effect.

use thiserror::Error;

use crate::ascent::{self, AscentError, Witness};
use crate::diff::{self, DiffConfig, DiffError};
use crate::expr::EvalError;
use crate::linalg::{clean_zero, norm1, norm2, norm_inf};
use crate::lp::{self, Feasibility, LpError, VarBound, RANK_TOL};
use crate::problem::{feasibility_report, Candidate, InequalityProblem, MixedProblem, Problem};

pub const DEFAULT_STATIONARITY_TOL: f64 = 1e-7;
pub const DEFAULT_GRAD_ZERO_TOL: f64 = 1e-9;

pub const HYPOTHESIS_NOTE: &str = "inactive inequality constraints were excluded by value; their \
     lower semicontinuity at the candidate is assumed, not certified";

/// Tolerances of the multiplier analysis.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub diff: DiffConfig,
    /// Stationarity residual tolerance (also the lambda_0 threshold for the
    /// KKT normalization).
    pub stat_tol: f64,
    /// Relative threshold below which estimated gradient entries snap to 0.
    pub grad_zero_tol: f64,
}

impl Default for EngineConfig {
    fn default() -> EngineConfig {
        EngineConfig {
            diff: DiffConfig::default(),
            stat_tol: DEFAULT_STATIONARITY_TOL,
            grad_zero_tol: DEFAULT_GRAD_ZERO_TOL,
        }
    }
}

#[derive(Debug, Error)]
pub enum MultiplierError {
    #[error("candidate is infeasible: {0}")]
    InfeasibleCandidate(String),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ascent(#[from] AscentError),
    #[error("stationarity residual {rho} exceeds tolerance {tol}")]
    ResidualTooLarge { rho: f64, tol: f64 },
    #[error("leading multiplier {lambda0} is numerically zero; KKT form unavailable")]
    ZeroLeadingMultiplier { lambda0: f64 },
}

/// Indices of inequality constraints active at the candidate, with the
/// constraint values recorded for all of them.
#[derive(Debug, Clone)]
pub struct ActiveSet {
    /// 0-based indices of active inequality constraints.
    pub indices: Vec<usize>,
    pub inequality_values: Vec<f64>,
    pub equality_values: Vec<f64>,
}

impl ActiveSet {
    pub fn is_active(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }
}

/// Detects the active set `S = { i : |g_i(x)| <= act_tol }`, failing if the
/// candidate is infeasible within the same tolerance.
pub fn active_set(problem: &Problem, candidate: &Candidate) -> Result<ActiveSet, MultiplierError> {
    let tol = candidate.act_tol;
    let report = feasibility_report(problem, &candidate.point, tol)?;
    if !report.in_domain {
        return Err(MultiplierError::InfeasibleCandidate(
            "candidate left the domain box".into(),
        ));
    }
    if !report.feasible {
        let mut parts = Vec::new();
        for (i, v) in report.inequality_values.iter().enumerate() {
            if *v < -tol {
                parts.push(format!("g{}(x) = {}", i + 1, v));
            }
        }
        for (j, v) in report.equality_values.iter().enumerate() {
            if v.abs() > tol {
                parts.push(format!("h{}(x) = {}", j + 1, v));
            }
        }
        return Err(MultiplierError::InfeasibleCandidate(parts.join(", ")));
    }
    let indices = report
        .inequality_values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    Ok(ActiveSet {
        indices,
        inequality_values: report.inequality_values,
        equality_values: report.equality_values,
    })
}

/// Gradient rows of the analysis, after snapping noise-scale entries.
#[derive(Debug, Clone)]
pub struct GradientData {
    pub objective: Vec<f64>,
    /// Rows for the active inequality constraints, in active-set order.
    pub active_rows: Vec<Vec<f64>>,
    /// Rows for all equality constraints.
    pub equality_rows: Vec<Vec<f64>>,
}

fn snap_row(mut row: Vec<f64>, tol: f64) -> Vec<f64> {
    let threshold = tol * norm_inf(&row).max(1.0);
    for v in row.iter_mut() {
        if v.abs() <= threshold {
            *v = 0.0;
        }
    }
    row
}

fn estimate_gradients(
    problem: &Problem,
    candidate: &Candidate,
    active: &ActiveSet,
    cfg: &EngineConfig,
) -> Result<GradientData, MultiplierError> {
    let domain = problem.domain();
    let x = &candidate.point;
    let diff_cfg = cfg.diff.clamped_to(domain, x);
    let objective = snap_row(
        diff::gateaux_gradient(problem.objective(), domain, x, &diff_cfg)?,
        cfg.grad_zero_tol,
    );
    let mut active_rows = Vec::with_capacity(active.indices.len());
    for &i in &active.indices {
        let g = &problem.inequalities()[i];
        active_rows.push(snap_row(
            diff::gateaux_gradient(g, domain, x, &diff_cfg)?,
            cfg.grad_zero_tol,
        ));
    }
    let mut equality_rows = Vec::with_capacity(problem.equalities().len());
    for h in problem.equalities() {
        equality_rows.push(snap_row(
            diff::gateaux_gradient(h, domain, x, &diff_cfg)?,
            cfg.grad_zero_tol,
        ));
    }
    Ok(GradientData {
        objective,
        active_rows,
        equality_rows,
    })
}

/// Finds a hyperplane normal for the cone spanned by the gradient rows:
/// `v != 0` with `M^T v = 0`, `v >= 0` on the recession coordinates, and
/// `|v|_1 = 1`. Returns `None` when no hyperplane exists, i.e. the cone is a
/// neighborhood of the origin.
///
/// With free coordinates present (equality multipliers), nontriviality is
/// not expressible in a single feasibility LP: the split normalization
/// `sum(mu+ + mu-) = 1` admits `mu+ = mu-`, which reconstructs to `v = 0`.
/// The cone is therefore probed through its free coordinates: it covers a
/// neighborhood of the origin exactly when, for every free index `j` and
/// both signs, some `u` satisfies `<row_i, u> >= 1` on the recession block
/// and `<row_i, u> = +-delta_ij` on the free block. The first failing probe
/// yields the hyperplane normal as its Farkas certificate, which is nonzero
/// by construction.
pub fn supporting_hyperplane(
    rows: &[Vec<f64>],
    recession: &[bool],
) -> Result<Option<Vec<f64>>, LpError> {
    assert_eq!(rows.len(), recession.len());
    assert!(
        recession.iter().any(|r| *r),
        "the cone needs at least one recession coordinate"
    );
    if recession.iter().all(|r| *r) {
        // pure recession: v >= 0 with sum 1, the direct Gordan formulation
        return hyperplane_all_recession(rows);
    }
    let free: Vec<usize> = recession
        .iter()
        .enumerate()
        .filter(|(_, rec)| !**rec)
        .map(|(i, _)| i)
        .collect();
    for &j in &free {
        for sign in [1.0, -1.0] {
            if !interiority_probe(rows, recession, j, sign)? {
                let v = farkas_certificate(rows, recession, j, sign)?;
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

fn hyperplane_all_recession(rows: &[Vec<f64>]) -> Result<Option<Vec<f64>>, LpError> {
    let k = rows.len();
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut a_eq: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut b_eq = Vec::with_capacity(n + 1);
    for c in 0..n {
        let column: Vec<f64> = rows.iter().map(|row| row[c]).collect();
        a_eq.push(column);
        b_eq.push(0.0);
    }
    a_eq.push(vec![1.0; k]);
    b_eq.push(1.0);
    let bounds = vec![VarBound::NonNegative; k];
    match lp::feasible_point(&a_eq, &b_eq, &[], &[], &bounds)? {
        Feasibility::Infeasible => Ok(None),
        Feasibility::Feasible(v) => Ok(Some(finalize_normal(v, &vec![true; k]))),
    }
}

/// Is `(1, ..., 1; sign * e_j)` in the cone? Feasibility of
/// `<row_i, u> >= 1` on the recession block, `<row_i, u> = sign * delta_ij`
/// on the free block.
fn interiority_probe(
    rows: &[Vec<f64>],
    recession: &[bool],
    j: usize,
    sign: f64,
) -> Result<bool, LpError> {
    let n = rows[0].len();
    let mut a_ge = Vec::new();
    let mut a_eq = Vec::new();
    let mut b_eq = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if recession[i] {
            a_ge.push(row.clone());
        } else {
            a_eq.push(row.clone());
            b_eq.push(if i == j { sign } else { 0.0 });
        }
    }
    let b_ge = vec![1.0; a_ge.len()];
    let out = lp::feasible_point(&a_eq, &b_eq, &a_ge, &b_ge, &vec![VarBound::Free; n])?;
    Ok(matches!(out, Feasibility::Feasible(_)))
}

/// Farkas certificate of the failed probe: `v` with `M^T v = 0`, `v >= 0`
/// on the recession block, and `<t, v> = 1` for the probe target `t`
/// (ones on the recession block, `sign` at free index `j`).
fn farkas_certificate(
    rows: &[Vec<f64>],
    recession: &[bool],
    j: usize,
    sign: f64,
) -> Result<Vec<f64>, LpError> {
    let k = rows.len();
    let n = rows[0].len();
    let mut columns: Vec<(usize, f64)> = Vec::new();
    for (i, rec) in recession.iter().enumerate() {
        columns.push((i, 1.0));
        if !rec {
            columns.push((i, -1.0));
        }
    }
    let target = |i: usize| -> f64 {
        if recession[i] {
            1.0
        } else if i == j {
            sign
        } else {
            0.0
        }
    };
    let mut a_eq: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut b_eq = Vec::with_capacity(n + 1);
    for c in 0..n {
        a_eq.push(columns.iter().map(|(i, s)| s * rows[*i][c]).collect());
        b_eq.push(0.0);
    }
    a_eq.push(columns.iter().map(|(i, s)| s * target(*i)).collect());
    b_eq.push(1.0);
    let bounds = vec![VarBound::NonNegative; columns.len()];
    match lp::feasible_point(&a_eq, &b_eq, &[], &[], &bounds)? {
        Feasibility::Infeasible => Err(LpError::NumericalBreakdown),
        Feasibility::Feasible(solution) => {
            let mut v = vec![0.0; k];
            for ((i, s), value) in columns.iter().zip(&solution) {
                v[*i] += s * value;
            }
            Ok(finalize_normal(v, recession))
        }
    }
}

/// Clears sign dust on the recession coordinates and rescales to
/// `|v|_1 = 1`.
fn finalize_normal(mut v: Vec<f64>, recession: &[bool]) -> Vec<f64> {
    for (value, rec) in v.iter_mut().zip(recession) {
        if *rec && *value < 0.0 && *value > -lp::LP_TOL {
            *value = 0.0;
        }
        *value = clean_zero(*value);
    }
    let total = norm1(&v);
    debug_assert!(total > 0.0);
    for value in v.iter_mut() {
        *value = clean_zero(*value / total);
    }
    v
}

/// How the reported multipliers are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `|lambda|_1 + |mu|_1 = 1` (the LP-level normalization).
    SumOne,
    /// `lambda_0 = 1` (KKT form).
    LeadingOne,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::SumOne => "sum_one",
            Normalization::LeadingOne => "leading_one",
        }
    }
}

/// Fritz John multiplier certificate. `lambda[0]` is the objective
/// multiplier; `lambda[i]` for `i >= 1` belongs to inequality constraint
/// `i`, zero off the active set by construction.
#[derive(Debug, Clone)]
pub struct MultiplierCertificate {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub normalization: Normalization,
    pub stationarity_residual: f64,
    /// Products `lambda_i * g_i(x)` for every inequality constraint.
    pub complementary_slackness: Vec<f64>,
    pub note: &'static str,
}

impl MultiplierCertificate {
    pub fn lambda0(&self) -> f64 {
        self.lambda[0]
    }
}

/// Outcome of the Fritz John analysis: a certificate, or the witness data
/// the ascent engine needs to refute optimality.
#[derive(Debug)]
pub enum FritzJohnOutcome {
    Certificate(MultiplierCertificate),
    NoMultipliers(Witness),
}

/// Full analysis record handed to the pipeline.
#[derive(Debug)]
pub struct Analysis {
    pub active: ActiveSet,
    pub gradients: GradientData,
    pub outcome: FritzJohnOutcome,
}

fn stationarity_residual(
    gradients: &GradientData,
    lambda0: f64,
    lambda_active: &[f64],
    mu: &[f64],
) -> f64 {
    let n = gradients.objective.len();
    let mut combo = vec![0.0; n];
    for (c, g) in combo.iter_mut().zip(&gradients.objective) {
        *c += lambda0 * g;
    }
    for (coef, row) in lambda_active.iter().zip(&gradients.active_rows) {
        for (c, g) in combo.iter_mut().zip(row) {
            *c += coef * g;
        }
    }
    for (coef, row) in mu.iter().zip(&gradients.equality_rows) {
        for (c, g) in combo.iter_mut().zip(row) {
            *c += coef * g;
        }
    }
    norm_inf(&combo)
}

fn build_certificate(
    v: &[f64],
    active: &ActiveSet,
    gradients: &GradientData,
    m: usize,
    q: usize,
    cfg: &EngineConfig,
) -> Result<MultiplierCertificate, MultiplierError> {
    let s = active.indices.len();
    let lambda0 = v[0];
    let lambda_active = &v[1..1 + s];
    let mu: Vec<f64> = v[1 + s..1 + s + q].to_vec();
    let mut lambda = vec![0.0; m + 1];
    lambda[0] = lambda0;
    for (pos, &i) in active.indices.iter().enumerate() {
        lambda[i + 1] = lambda_active[pos];
    }
    let rho = stationarity_residual(gradients, lambda0, lambda_active, &mu);
    if rho > cfg.stat_tol {
        return Err(MultiplierError::ResidualTooLarge {
            rho,
            tol: cfg.stat_tol,
        });
    }
    let complementary_slackness = active
        .inequality_values
        .iter()
        .enumerate()
        .map(|(i, g)| clean_zero(lambda[i + 1] * g))
        .collect();
    Ok(MultiplierCertificate {
        lambda,
        mu,
        normalization: Normalization::SumOne,
        stationarity_residual: rho,
        complementary_slackness,
        note: HYPOTHESIS_NOTE,
    })
}

/// Fritz John analysis of an inequality-only problem: multipliers from the
/// supporting hyperplane, or an improving direction when none exist.
pub fn fritz_john_inequality(
    problem: &InequalityProblem,
    candidate: &Candidate,
    cfg: &EngineConfig,
) -> Result<Analysis, MultiplierError> {
    let as_problem = Problem::Inequality(problem.clone());
    let active = active_set(&as_problem, candidate)?;
    let gradients = estimate_gradients(&as_problem, candidate, &active, cfg)?;
    let mut rows = vec![gradients.objective.clone()];
    rows.extend(gradients.active_rows.iter().cloned());
    let recession = vec![true; rows.len()];
    let outcome = match supporting_hyperplane(&rows, &recession)? {
        Some(v) => FritzJohnOutcome::Certificate(build_certificate(
            &v,
            &active,
            &gradients,
            problem.inequalities.len(),
            0,
            cfg,
        )?),
        None => {
            let normalized = normalize_rows(&rows);
            let direction = ascent::improving_direction_inequality(&normalized)?;
            FritzJohnOutcome::NoMultipliers(Witness::Inequality {
                direction,
                active: active.indices.clone(),
            })
        }
    };
    Ok(Analysis {
        active,
        gradients,
        outcome,
    })
}

fn normalize_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            let norm = norm2(row);
            if norm > 0.0 {
                row.iter().map(|v| v / norm).collect()
            } else {
                row.clone()
            }
        })
        .collect()
}

/// Fritz John analysis of a mixed problem. The recession block covers the
/// objective and active-inequality coordinates only; the equality
/// multipliers are free. When no multipliers exist the witness carries the
/// direction pairs for the fixed-point restoration.
pub fn fritz_john_mixed(
    problem: &MixedProblem,
    candidate: &Candidate,
    cfg: &EngineConfig,
) -> Result<Analysis, MultiplierError> {
    let as_problem = Problem::Mixed(problem.clone());
    let active = active_set(&as_problem, candidate)?;
    let gradients = estimate_gradients(&as_problem, candidate, &active, cfg)?;
    let s = active.indices.len();
    let q = gradients.equality_rows.len();
    let mut rows = vec![gradients.objective.clone()];
    rows.extend(gradients.active_rows.iter().cloned());
    rows.extend(gradients.equality_rows.iter().cloned());
    let mut recession = vec![true; 1 + s];
    recession.extend(vec![false; q]);
    let outcome = match supporting_hyperplane(&rows, &recession)? {
        Some(v) => FritzJohnOutcome::Certificate(build_certificate(
            &v,
            &active,
            &gradients,
            problem.inequalities.len(),
            q,
            cfg,
        )?),
        None => {
            let g_rows = normalize_rows(&rows[..1 + s]);
            let eq_scales: Vec<f64> = gradients.equality_rows.iter().map(|r| norm2(r)).collect();
            let scaled_eq_jacobian = normalize_rows(&gradients.equality_rows);
            let pairs = ascent::direction_pairs(&g_rows, &scaled_eq_jacobian, 1.0)?;
            FritzJohnOutcome::NoMultipliers(Witness::Mixed {
                pairs,
                scaled_eq_jacobian,
                eq_scales,
                active: active.indices.clone(),
            })
        }
    };
    Ok(Analysis {
        active,
        gradients,
        outcome,
    })
}

/// Positive-direction constraint qualification: a direction `w` with
/// `G_S w >= 1` componentwise. An empty active set satisfies the condition
/// vacuously with `w = 0`.
pub fn cq_positive_direction(
    active_rows: &[Vec<f64>],
    n: usize,
) -> Result<Option<Vec<f64>>, LpError> {
    if active_rows.is_empty() {
        return Ok(Some(vec![0.0; n]));
    }
    let b = vec![1.0; active_rows.len()];
    match lp::smallest_l1_point(&[], &[], active_rows, &b, n)? {
        Feasibility::Feasible(w) => Ok(Some(w)),
        Feasibility::Infeasible => Ok(None),
    }
}

/// Linear-independence constraint qualification for the equality jacobian.
pub fn cq_linear_independence(equality_rows: &[Vec<f64>]) -> bool {
    lp::rank(equality_rows, RANK_TOL) == equality_rows.len()
}

/// Kernel-direction constraint qualification: `w` in the kernel of the
/// equality jacobian with `G_S w >= 1`.
pub fn cq_kernel_direction(
    active_rows: &[Vec<f64>],
    equality_rows: &[Vec<f64>],
    n: usize,
) -> Result<Option<Vec<f64>>, LpError> {
    if active_rows.is_empty() {
        return Ok(Some(vec![0.0; n]));
    }
    let b_eq = vec![0.0; equality_rows.len()];
    let b_ge = vec![1.0; active_rows.len()];
    match lp::smallest_l1_point(equality_rows, &b_eq, active_rows, &b_ge, n)? {
        Feasibility::Feasible(w) => Ok(Some(w)),
        Feasibility::Infeasible => Ok(None),
    }
}

/// Constraint-qualification report attached to certificates.
#[derive(Debug, Clone)]
pub struct CqReport {
    pub slater_direction: Option<Vec<f64>>,
    pub kernel_direction: Option<Vec<f64>>,
    pub equality_jacobian_rank: Option<usize>,
    pub condition_positive_direction: Option<bool>,
    pub condition_independent_equalities: Option<bool>,
    pub condition_kernel_direction: Option<bool>,
}

impl CqReport {
    /// Whether the checks justify the KKT normalization for this problem
    /// kind.
    pub fn kkt_backed(&self) -> bool {
        match (
            self.condition_positive_direction,
            self.condition_independent_equalities,
            self.condition_kernel_direction,
        ) {
            (Some(iii), None, None) => iii,
            (_, Some(v), Some(vi)) => v && vi,
            _ => false,
        }
    }
}

/// Runs the applicable constraint-qualification checks on the gradient
/// rows of an analysis.
pub fn cq_report(problem: &Problem, analysis: &Analysis) -> Result<CqReport, LpError> {
    let n = problem.dimension();
    let gradients = &analysis.gradients;
    match problem {
        Problem::Inequality(_) => {
            let w = cq_positive_direction(&gradients.active_rows, n)?;
            Ok(CqReport {
                condition_positive_direction: Some(w.is_some()),
                slater_direction: w,
                kernel_direction: None,
                equality_jacobian_rank: None,
                condition_independent_equalities: None,
                condition_kernel_direction: None,
            })
        }
        Problem::Mixed(_) => {
            let rank = lp::rank(&gradients.equality_rows, RANK_TOL);
            let independent = rank == gradients.equality_rows.len();
            let w = cq_kernel_direction(&gradients.active_rows, &gradients.equality_rows, n)?;
            Ok(CqReport {
                slater_direction: None,
                condition_kernel_direction: Some(w.is_some()),
                kernel_direction: w,
                equality_jacobian_rank: Some(rank),
                condition_independent_equalities: Some(independent),
                condition_positive_direction: None,
            })
        }
    }
}

/// Rescales a certificate so `lambda_0 = 1`, the KKT form. Fails when the
/// leading multiplier is numerically zero.
pub fn normalize_kkt(
    cert: &MultiplierCertificate,
    stat_tol: f64,
) -> Result<MultiplierCertificate, MultiplierError> {
    let lambda0 = cert.lambda0();
    if lambda0 <= stat_tol {
        return Err(MultiplierError::ZeroLeadingMultiplier { lambda0 });
    }
    let mut lambda: Vec<f64> = cert
        .lambda
        .iter()
        .map(|l| clean_zero(l / lambda0))
        .collect();
    lambda[0] = 1.0;
    let mu = cert.mu.iter().map(|m| clean_zero(m / lambda0)).collect();
    let complementary_slackness = cert
        .complementary_slackness
        .iter()
        .map(|c| clean_zero(c / lambda0))
        .collect();
    Ok(MultiplierCertificate {
        lambda,
        mu,
        normalization: Normalization::LeadingOne,
        stationarity_residual: cert.stationarity_residual / lambda0,
        complementary_slackness,
        note: cert.note,
    })
}

/// Independent re-verification of the certificate conclusions with freshly
/// estimated gradients under a perturbed step ladder.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub nontriviality_ok: bool,
    pub complementary_slackness_ok: bool,
    pub stationarity_ok: bool,
    pub fresh_residual: f64,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.nontriviality_ok && self.complementary_slackness_ok && self.stationarity_ok
    }
}

pub fn verify_certificate(
    problem: &Problem,
    candidate: &Candidate,
    cert: &MultiplierCertificate,
    cfg: &EngineConfig,
) -> Result<VerificationReport, MultiplierError> {
    let fresh_cfg = EngineConfig {
        diff: DiffConfig {
            base_step: cfg.diff.base_step * 0.75,
            seed: cfg.diff.seed.wrapping_add(1000),
            ..cfg.diff.clone()
        },
        ..cfg.clone()
    };
    let active = active_set(problem, candidate)?;
    let gradients = estimate_gradients(problem, candidate, &active, &fresh_cfg)?;

    let nontriviality_ok = match cert.normalization {
        Normalization::SumOne => (norm1(&cert.lambda) + norm1(&cert.mu) - 1.0).abs() <= 1e-12,
        Normalization::LeadingOne => cert.lambda0() == 1.0,
    };

    let mut complementary_slackness_ok = true;
    for (i, value) in active.inequality_values.iter().enumerate() {
        let li = cert.lambda[i + 1];
        if li != 0.0 && value.abs() > candidate.act_tol {
            complementary_slackness_ok = false;
        }
    }

    let lambda_active: Vec<f64> = active.indices.iter().map(|&i| cert.lambda[i + 1]).collect();
    // off-active lambdas must vanish identically for the residual below to
    // cover conclusion (c) in full
    for (i, l) in cert.lambda.iter().enumerate().skip(1) {
        if !active.is_active(i - 1) && *l != 0.0 {
            complementary_slackness_ok = false;
        }
    }
    let fresh_residual =
        stationarity_residual(&gradients, cert.lambda0(), &lambda_active, &cert.mu);
    let scale = match cert.normalization {
        Normalization::SumOne => 1.0,
        Normalization::LeadingOne => norm1(&cert.lambda) + norm1(&cert.mu),
    };
    let stationarity_ok = fresh_residual <= cfg.stat_tol * scale.max(1.0);

    Ok(VerificationReport {
        nontriviality_ok,
        complementary_slackness_ok,
        stationarity_ok,
        fresh_residual,
    })
}
