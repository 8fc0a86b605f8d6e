//! Constructive non-optimality: when no multipliers exist, build a strictly
//! improving feasible point.
//!
//! For inequality-only problems an improving direction `u` with
//! `<grad_i, u> >= 1` for the objective and every active constraint exists
//! whenever the supporting-hyperplane system is infeasible; a backtracking
//! line search along `u` then produces the certificate.
//!
//! With equality constraints the improving step must stay on the constraint
//! surface. The engine solves, per equality index `j`, the two direction
//! systems
//!
//! ```text
//! G u_j  >= b   and   H u_j  =  r e_j
//! G u~_j >= b   and   H u~_j = -r e_j        (b = (r, ..., r))
//! ```
//!
//! and iterates the coefficient map `phi_j(k) = 1/(2q) - w_j(k)/(2r)`,
//! `phi~_j(k) = 1/(2q) + w_j(k)/(2r)` over the simplex spanned by the 2q
//! directions, where `w_j(k)` is the first-order equality residual at step
//! `alpha`. At a fixed point the equality residuals cancel exactly, and the
//! slack records force a strict objective gain.
//!
//! Picard iteration on the map is damped (plain iteration may oscillate);
//! if damping stalls, a bisection (one pair) or coordinate relaxation
//! (several pairs) fallback hunts the fixed point directly.

use thiserror::Error;

use crate::expr::EvalError;
use crate::linalg::{axpy, dot, norm_inf};
use crate::lp::{self, Feasibility, LpError};
use crate::problem::{Candidate, DomainBox, Problem, ScalarField};

pub const DEFAULT_FP_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_DAMPING: f64 = 0.5;
pub const DEFAULT_RESTORE_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_BACKTRACKS: usize = 20;
/// Box bound for the improving-direction LP.
pub const DIRECTION_BOUND: f64 = 1e3;
/// Fraction of the interior radius the first step may consume.
const STEP_SAFETY: f64 = 0.999;

#[derive(Debug, Clone)]
pub struct RestoreConfig {
    pub fp_tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub restore_tol: f64,
    pub max_backtracks: usize,
}

impl Default for RestoreConfig {
    fn default() -> RestoreConfig {
        RestoreConfig {
            fp_tol: DEFAULT_FP_TOL,
            max_iter: DEFAULT_MAX_ITER,
            damping: DEFAULT_DAMPING,
            restore_tol: DEFAULT_RESTORE_TOL,
            max_backtracks: DEFAULT_MAX_BACKTRACKS,
        }
    }
}

#[derive(Debug, Error)]
pub enum AscentError {
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("equality residual {winf} reaches the simplex bound {bound}; shrink alpha")]
    ResidualTooLarge { winf: f64, bound: f64 },
    #[error("fixed-point iteration did not converge (final residual {last:?})")]
    NonConvergence {
        history: Vec<f64>,
        last: Option<f64>,
    },
    #[error("step alpha={step} leaves the domain box")]
    StepLeavesDomain { step: f64 },
    #[error("certification failed after {backtracks} backtracks: {detail}")]
    CertificationFailed { backtracks: usize, detail: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// One direction of a pair, with its inequality slack record
/// `z = b - G u` (componentwise <= 0 within the LP tolerance).
#[derive(Debug, Clone)]
pub struct PairEntry {
    pub direction: Vec<f64>,
    pub slack: Vec<f64>,
}

/// The 2q directions spanning the restoration simplex.
#[derive(Debug, Clone)]
pub struct DirectionPairs {
    pub r: f64,
    pub forward: Vec<PairEntry>,
    pub mirrored: Vec<PairEntry>,
}

impl DirectionPairs {
    pub fn count(&self) -> usize {
        self.forward.len()
    }

    /// Largest max-norm over the generators; bounds `sup_K ||k||`.
    pub fn max_direction_norm(&self) -> f64 {
        self.forward
            .iter()
            .chain(&self.mirrored)
            .map(|p| norm_inf(&p.direction))
            .fold(0.0, f64::max)
    }
}

/// Coefficients on the restoration simplex together with the induced point.
#[derive(Debug, Clone)]
pub struct SimplexState {
    pub forward_coeffs: Vec<f64>,
    pub mirrored_coeffs: Vec<f64>,
    pub point: Vec<f64>,
}

impl SimplexState {
    pub fn barycenter(pairs: &DirectionPairs) -> SimplexState {
        let q = pairs.count();
        let c = 1.0 / (2.0 * q as f64);
        SimplexState::from_coeffs(vec![c; q], vec![c; q], pairs)
    }

    pub fn from_coeffs(
        forward: Vec<f64>,
        mirrored: Vec<f64>,
        pairs: &DirectionPairs,
    ) -> SimplexState {
        let n = pairs.forward[0].direction.len();
        let mut point = vec![0.0; n];
        for (a, entry) in forward.iter().zip(&pairs.forward) {
            for (p, d) in point.iter_mut().zip(&entry.direction) {
                *p += a * d;
            }
        }
        for (a, entry) in mirrored.iter().zip(&pairs.mirrored) {
            for (p, d) in point.iter_mut().zip(&entry.direction) {
                *p += a * d;
            }
        }
        SimplexState {
            forward_coeffs: forward,
            mirrored_coeffs: mirrored,
            point,
        }
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.forward_coeffs.iter().sum::<f64>() + self.mirrored_coeffs.iter().sum::<f64>()
    }
}

/// A feasible point strictly better than the candidate, refuting optimality.
#[derive(Debug, Clone)]
pub struct AscentCertificate {
    pub improved_point: Vec<f64>,
    pub step: f64,
    pub objective_gain: f64,
    pub inequality_values: Vec<f64>,
    pub equality_residuals: Vec<f64>,
    pub direction: AscentDirection,
    pub fixed_point_iterations: usize,
    pub backtracks: usize,
}

#[derive(Debug, Clone)]
pub enum AscentDirection {
    Line(Vec<f64>),
    FixedPoint(Vec<f64>),
}

/// Data the multiplier engine hands over when the hyperplane LP is
/// infeasible (the cone is a neighborhood of the origin).
#[derive(Debug, Clone)]
pub enum Witness {
    Inequality {
        /// Improving direction for the objective and active constraints.
        direction: Vec<f64>,
        active: Vec<usize>,
    },
    Mixed {
        pairs: DirectionPairs,
        /// Row-normalized equality jacobian used by the residual map.
        scaled_eq_jacobian: Vec<Vec<f64>>,
        /// Euclidean norms the equality gradients were divided by.
        eq_scales: Vec<f64>,
        active: Vec<usize>,
    },
}

// ---------------------------------------------------------------------------
// Direction construction
// ---------------------------------------------------------------------------

/// Improving direction for the inequality case: `<row_i, u> >= 1` for every
/// gradient row, `|u|_inf <= DIRECTION_BOUND`. The rows come from the
/// no-multiplier branch, so infeasibility here is a broken invariant.
pub fn improving_direction_inequality(rows: &[Vec<f64>]) -> Result<Vec<f64>, AscentError> {
    let n = rows
        .first()
        .map(|r| r.len())
        .ok_or_else(|| AscentError::InternalInconsistency("no gradient rows".into()))?;
    let mut a_ge: Vec<Vec<f64>> = rows.to_vec();
    let mut b_ge = vec![1.0; rows.len()];
    for i in 0..n {
        let mut lo = vec![0.0; n];
        lo[i] = 1.0;
        a_ge.push(lo);
        b_ge.push(-DIRECTION_BOUND);
        let mut hi = vec![0.0; n];
        hi[i] = -1.0;
        a_ge.push(hi);
        b_ge.push(-DIRECTION_BOUND);
    }
    match lp::smallest_l1_point(&[], &[], &a_ge, &b_ge, n)? {
        Feasibility::Feasible(u) => Ok(u),
        Feasibility::Infeasible => Err(AscentError::InternalInconsistency(
            "improving-direction system infeasible although no multipliers exist".into(),
        )),
    }
}

/// Solves the 2q direction systems. `g_rows` stacks the objective and active
/// inequality gradients; `h_rows` is the equality jacobian. Rows are expected
/// normalized by the caller so `r = 1` is well conditioned.
pub fn direction_pairs(
    g_rows: &[Vec<f64>],
    h_rows: &[Vec<f64>],
    r: f64,
) -> Result<DirectionPairs, AscentError> {
    if h_rows.is_empty() {
        return Err(AscentError::InternalInconsistency(
            "direction pairs need at least one equality row".into(),
        ));
    }
    let n = h_rows[0].len();
    let q = h_rows.len();
    for (j, row) in h_rows.iter().enumerate() {
        if norm_inf(row) == 0.0 {
            return Err(AscentError::InternalInconsistency(format!(
                "equality jacobian row {} is zero; its image cannot reach r*e_{}",
                j + 1,
                j + 1
            )));
        }
    }
    let b = vec![r; g_rows.len()];
    let solve_one = |j: usize, sign: f64| -> Result<PairEntry, AscentError> {
        let mut rhs = vec![0.0; q];
        rhs[j] = sign * r;
        match lp::smallest_l1_point(h_rows, &rhs, g_rows, &b, n)? {
            Feasibility::Feasible(u) => {
                let slack = g_rows.iter().map(|row| r - dot(row, &u)).collect();
                Ok(PairEntry {
                    direction: u,
                    slack,
                })
            }
            Feasibility::Infeasible => Err(AscentError::InternalInconsistency(format!(
                "direction system for {}e_{} infeasible although the cone covers a neighborhood",
                if sign > 0.0 { "" } else { "-" },
                j + 1
            ))),
        }
    };
    let mut forward = Vec::with_capacity(q);
    let mut mirrored = Vec::with_capacity(q);
    for j in 0..q {
        forward.push(solve_one(j, 1.0)?);
        mirrored.push(solve_one(j, -1.0)?);
    }
    Ok(DirectionPairs {
        r,
        forward,
        mirrored,
    })
}

// ---------------------------------------------------------------------------
// Residual map and fixed point
// ---------------------------------------------------------------------------

/// First-order equality residual `w_j(k) = h_j(x + alpha k)/alpha - J_j k`,
/// componentwise, with each `h_j` divided by its scale.
pub fn residual_w(
    equalities: &[ScalarField],
    scales: &[f64],
    domain: &DomainBox,
    base_point: &[f64],
    alpha: f64,
    k: &[f64],
    jacobian: &[Vec<f64>],
) -> Result<Vec<f64>, AscentError> {
    let shifted = axpy(base_point, alpha, k);
    if !domain.contains(&shifted) {
        return Err(AscentError::StepLeavesDomain { step: alpha });
    }
    let mut w = Vec::with_capacity(equalities.len());
    for ((h, scale), row) in equalities.iter().zip(scales).zip(jacobian) {
        let value = h.evaluate(&shifted)? / scale;
        w.push(value / alpha - dot(row, k));
    }
    Ok(w)
}

/// The simplex map: coefficients `1/(2q) -+ w_j/(2r)`, renormalized so the
/// sum is exactly one. Requires `|w|_inf < r/q`.
pub fn phi_map(w: &[f64], pairs: &DirectionPairs) -> Result<SimplexState, AscentError> {
    let q = pairs.count();
    let r = pairs.r;
    let bound = r / q as f64;
    let winf = norm_inf(w);
    if winf >= bound {
        return Err(AscentError::ResidualTooLarge { winf, bound });
    }
    let half_q = 1.0 / (2.0 * q as f64);
    let mut forward = Vec::with_capacity(q);
    let mut mirrored = Vec::with_capacity(q);
    for wj in w {
        forward.push(half_q - wj / (2.0 * r));
        mirrored.push(half_q + wj / (2.0 * r));
    }
    let sum: f64 = forward.iter().sum::<f64>() + mirrored.iter().sum::<f64>();
    debug_assert!((sum - 1.0).abs() <= 1e-14);
    for c in forward.iter_mut().chain(mirrored.iter_mut()) {
        *c /= sum;
    }
    Ok(SimplexState::from_coeffs(forward, mirrored, pairs))
}

/// Everything the fixed-point iteration needs to evaluate the map.
pub struct FixedPointProblem<'a> {
    pub equalities: &'a [ScalarField],
    pub scales: &'a [f64],
    pub domain: &'a DomainBox,
    pub base_point: &'a [f64],
    pub jacobian: &'a [Vec<f64>],
    pub pairs: &'a DirectionPairs,
}

impl<'a> FixedPointProblem<'a> {
    fn phi(&self, state: &SimplexState, alpha: f64) -> Result<SimplexState, AscentError> {
        let w = residual_w(
            self.equalities,
            self.scales,
            self.domain,
            self.base_point,
            alpha,
            &state.point,
            self.jacobian,
        )?;
        phi_map(&w, self.pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    DampedPicard,
    Bisection,
    CoordinateRelaxation,
}

#[derive(Debug, Clone)]
pub struct FixedPointRun {
    pub state: SimplexState,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub method: FixedPointMethod,
}

/// Distance between simplex states in the coefficient metric. A fixed
/// point to tolerance `delta` here restores the scaled equalities to
/// `|h_j| <= 2 r alpha delta`, so this is the metric the stopping rule
/// uses; the induced points inherit the bound through the generators.
fn coefficient_distance(a: &SimplexState, b: &SimplexState) -> f64 {
    let forward = a
        .forward_coeffs
        .iter()
        .zip(&b.forward_coeffs)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    a.mirrored_coeffs
        .iter()
        .zip(&b.mirrored_coeffs)
        .fold(forward, |m, (x, y)| m.max((x - y).abs()))
}

/// Finds `k` with `Phi(k) = k` on the restoration simplex, to `fp_tol` in
/// the coefficient metric.
///
/// Damped Picard iteration from the barycenter; on stall, bisection over the
/// single coefficient pair (q = 1) or coordinate relaxation sweeps (q >= 2).
pub fn schauder_fixed_point(
    fp: &FixedPointProblem<'_>,
    alpha: f64,
    cfg: &RestoreConfig,
) -> Result<FixedPointRun, AscentError> {
    let theta = cfg.damping;
    debug_assert!(theta > 0.0 && theta <= 1.0);
    let mut state = SimplexState::barycenter(fp.pairs);
    let mut history = Vec::new();
    for iteration in 1..=cfg.max_iter {
        let next = fp.phi(&state, alpha)?;
        let residual = coefficient_distance(&next, &state);
        history.push(residual);
        if residual <= cfg.fp_tol {
            return Ok(FixedPointRun {
                state,
                iterations: iteration,
                residual_history: history,
                method: FixedPointMethod::DampedPicard,
            });
        }
        if !residual.is_finite() || residual > 1e6 {
            break;
        }
        let forward: Vec<f64> = state
            .forward_coeffs
            .iter()
            .zip(&next.forward_coeffs)
            .map(|(old, new)| (1.0 - theta) * old + theta * new)
            .collect();
        let mirrored: Vec<f64> = state
            .mirrored_coeffs
            .iter()
            .zip(&next.mirrored_coeffs)
            .map(|(old, new)| (1.0 - theta) * old + theta * new)
            .collect();
        state = SimplexState::from_coeffs(forward, mirrored, fp.pairs);
    }
    if fp.pairs.count() == 1 {
        if let Some(run) = bisection_fallback(fp, alpha, cfg, &history)? {
            return Ok(run);
        }
    } else if let Some(run) = relaxation_fallback(fp, alpha, cfg, &history)? {
        return Ok(run);
    }
    let last = history.last().copied();
    Err(AscentError::NonConvergence { history, last })
}

/// q = 1: the simplex is the segment a in [0, 1] and the fixed-point
/// equation g(a) = phi_1(k(a)) - a changes sign across it.
fn bisection_fallback(
    fp: &FixedPointProblem<'_>,
    alpha: f64,
    cfg: &RestoreConfig,
    history: &[f64],
) -> Result<Option<FixedPointRun>, AscentError> {
    let state_of = |a: f64| SimplexState::from_coeffs(vec![a], vec![1.0 - a], fp.pairs);
    let eval_g = |a: f64| -> Result<f64, AscentError> {
        let phi = fp.phi(&state_of(a), alpha)?;
        Ok(phi.forward_coeffs[0] - a)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut g_lo = match eval_g(lo) {
        Ok(v) => v,
        Err(AscentError::ResidualTooLarge { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let g_hi = match eval_g(hi) {
        Ok(v) => v,
        Err(AscentError::ResidualTooLarge { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if g_lo < 0.0 || g_hi > 0.0 {
        return Ok(None);
    }
    let mut iterations = history.len();
    let mut mid = 0.5;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let g_mid = match eval_g(mid) {
            Ok(v) => v,
            Err(AscentError::ResidualTooLarge { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        iterations += 1;
        if g_mid.abs() <= cfg.fp_tol {
            break;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let state = state_of(mid);
    let next = fp.phi(&state, alpha)?;
    let residual = coefficient_distance(&next, &state);
    if residual <= cfg.fp_tol {
        let mut full_history = history.to_vec();
        full_history.push(residual);
        Ok(Some(FixedPointRun {
            state,
            iterations,
            residual_history: full_history,
            method: FixedPointMethod::Bisection,
        }))
    } else {
        Ok(None)
    }
}

/// q >= 2: Gauss-Seidel sweeps that settle one coefficient pair at a time.
/// Each pair update keeps its own sum at 1/q, so the simplex constraint
/// holds exactly throughout.
fn relaxation_fallback(
    fp: &FixedPointProblem<'_>,
    alpha: f64,
    cfg: &RestoreConfig,
    history: &[f64],
) -> Result<Option<FixedPointRun>, AscentError> {
    let q = fp.pairs.count();
    let r = fp.pairs.r;
    let half_q = 1.0 / (2.0 * q as f64);
    let mut state = SimplexState::barycenter(fp.pairs);
    let mut full_history = history.to_vec();
    for _ in 0..cfg.max_iter {
        for j in 0..q {
            let w = residual_w(
                fp.equalities,
                fp.scales,
                fp.domain,
                fp.base_point,
                alpha,
                &state.point,
                fp.jacobian,
            )?;
            if norm_inf(&w) >= r / q as f64 {
                return Ok(None);
            }
            let mut forward = state.forward_coeffs.clone();
            let mut mirrored = state.mirrored_coeffs.clone();
            forward[j] = half_q - w[j] / (2.0 * r);
            mirrored[j] = half_q + w[j] / (2.0 * r);
            state = SimplexState::from_coeffs(forward, mirrored, fp.pairs);
        }
        let next = fp.phi(&state, alpha)?;
        let residual = coefficient_distance(&next, &state);
        full_history.push(residual);
        if residual <= cfg.fp_tol {
            let iterations = full_history.len();
            return Ok(Some(FixedPointRun {
                state,
                iterations,
                residual_history: full_history,
                method: FixedPointMethod::CoordinateRelaxation,
            }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

fn initial_step(domain: &DomainBox, base_point: &[f64], direction_norm: f64) -> f64 {
    let radius = domain.interior_radius(base_point);
    if radius.is_finite() {
        (STEP_SAFETY * radius / direction_norm.max(1e-12)).min(1.0)
    } else {
        1.0
    }
}

/// Produces the non-optimality certificate for the witness returned by the
/// multiplier engine, backtracking on the step until every certificate
/// invariant holds.
pub fn certify_nonoptimal(
    problem: &Problem,
    candidate: &Candidate,
    witness: &Witness,
    cfg: &RestoreConfig,
) -> Result<AscentCertificate, AscentError> {
    match witness {
        Witness::Inequality { direction, active } => {
            certify_line_search(problem, candidate, direction, active, cfg)
        }
        Witness::Mixed {
            pairs,
            scaled_eq_jacobian,
            eq_scales,
            active,
        } => certify_fixed_point(
            problem,
            candidate,
            pairs,
            scaled_eq_jacobian,
            eq_scales,
            active,
            cfg,
        ),
    }
}

fn certify_line_search(
    problem: &Problem,
    candidate: &Candidate,
    direction: &[f64],
    active: &[usize],
    cfg: &RestoreConfig,
) -> Result<AscentCertificate, AscentError> {
    let x = &candidate.point;
    let domain = problem.domain();
    let f0 = problem.objective().evaluate(x)?;
    let mut step = initial_step(domain, x, norm_inf(direction));
    let mut detail = String::new();
    for backtracks in 0..=cfg.max_backtracks {
        let trial = axpy(x, step, direction);
        match feasible_improvement(problem, candidate, &trial, f0, active, None) {
            Ok(Some((gain, values, _))) => {
                return Ok(AscentCertificate {
                    improved_point: trial,
                    step,
                    objective_gain: gain,
                    inequality_values: values,
                    equality_residuals: Vec::new(),
                    direction: AscentDirection::Line(direction.to_vec()),
                    fixed_point_iterations: 0,
                    backtracks,
                });
            }
            Ok(None) => detail = format!("step {} violates a certificate invariant", step),
            Err(e) => detail = format!("step {}: {}", step, e),
        }
        step *= 0.5;
    }
    Err(AscentError::CertificationFailed {
        backtracks: cfg.max_backtracks,
        detail,
    })
}

#[allow(clippy::too_many_arguments)]
fn certify_fixed_point(
    problem: &Problem,
    candidate: &Candidate,
    pairs: &DirectionPairs,
    jacobian: &[Vec<f64>],
    scales: &[f64],
    active: &[usize],
    cfg: &RestoreConfig,
) -> Result<AscentCertificate, AscentError> {
    let x = &candidate.point;
    let domain = problem.domain();
    let f0 = problem.objective().evaluate(x)?;
    let fp = FixedPointProblem {
        equalities: problem.equalities(),
        scales,
        domain,
        base_point: x,
        jacobian,
        pairs,
    };
    let mut alpha = initial_step(domain, x, pairs.max_direction_norm());
    let mut detail = String::new();
    for backtracks in 0..=cfg.max_backtracks {
        match schauder_fixed_point(&fp, alpha, cfg) {
            Ok(run) => {
                let trial = axpy(x, alpha, &run.state.point);
                match feasible_improvement(
                    problem,
                    candidate,
                    &trial,
                    f0,
                    active,
                    Some(cfg.restore_tol),
                )? {
                    Some((gain, ineq_values, eq_residuals)) => {
                        return Ok(AscentCertificate {
                            improved_point: trial,
                            step: alpha,
                            objective_gain: gain,
                            inequality_values: ineq_values,
                            equality_residuals: eq_residuals,
                            direction: AscentDirection::FixedPoint(run.state.point.clone()),
                            fixed_point_iterations: run.iterations,
                            backtracks,
                        });
                    }
                    None => {
                        detail = format!("alpha {} violates a certificate invariant", alpha);
                    }
                }
            }
            Err(AscentError::ResidualTooLarge { winf, bound }) => {
                detail = format!("alpha {}: residual {} over bound {}", alpha, winf, bound);
            }
            Err(AscentError::NonConvergence { last, .. }) => {
                detail = format!("alpha {}: no fixed point (residual {:?})", alpha, last);
            }
            Err(AscentError::StepLeavesDomain { step }) => {
                detail = format!("alpha {} leaves the domain", step);
            }
            Err(other) => return Err(other),
        }
        alpha *= 0.5;
    }
    Err(AscentError::CertificationFailed {
        backtracks: cfg.max_backtracks,
        detail,
    })
}

type ImprovementChecks = (f64, Vec<f64>, Vec<f64>);

/// Checks the certificate invariants at a trial point: strict gain, strict
/// positivity of the active constraints, tolerance-feasibility of inactive
/// ones, and (when requested) equality residuals within `restore_tol`.
fn feasible_improvement(
    problem: &Problem,
    candidate: &Candidate,
    trial: &[f64],
    f0: f64,
    active: &[usize],
    restore_tol: Option<f64>,
) -> Result<Option<ImprovementChecks>, AscentError> {
    if !problem.domain().contains(trial) {
        return Ok(None);
    }
    let f_trial = problem.objective().evaluate(trial)?;
    let gain = f_trial - f0;
    if !(gain > 0.0) {
        return Ok(None);
    }
    let mut ineq_values = Vec::with_capacity(problem.inequalities().len());
    for (i, g) in problem.inequalities().iter().enumerate() {
        let v = g.evaluate(trial)?;
        let ok = if active.contains(&i) {
            v > 0.0
        } else {
            v >= -candidate.act_tol
        };
        if !ok {
            return Ok(None);
        }
        ineq_values.push(v);
    }
    let mut eq_residuals = Vec::with_capacity(problem.equalities().len());
    if let Some(tol) = restore_tol {
        for h in problem.equalities() {
            let v = h.evaluate(trial)?.abs();
            if v > tol {
                return Ok(None);
            }
            eq_residuals.push(v);
        }
    }
    Ok(Some((gain, ineq_values, eq_residuals)))
}

/// Independent revalidation of an emitted certificate with fresh
/// evaluations: strict gain, feasibility, and equality residuals.
pub fn validate_certificate(
    problem: &Problem,
    candidate: &Candidate,
    cert: &AscentCertificate,
    restore_tol: f64,
) -> Result<bool, EvalError> {
    let f0 = problem.objective().evaluate(&candidate.point)?;
    let f1 = problem.objective().evaluate(&cert.improved_point)?;
    if !(f1 - f0 > 0.0) || !problem.domain().contains(&cert.improved_point) {
        return Ok(false);
    }
    for g in problem.inequalities() {
        if g.evaluate(&cert.improved_point)? < -candidate.act_tol {
            return Ok(false);
        }
    }
    for h in problem.equalities() {
        if h.evaluate(&cert.improved_point)?.abs() > restore_tol {
            return Ok(false);
        }
    }
    Ok(true)
}
