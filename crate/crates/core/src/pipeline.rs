//! End-to-end analysis: active set, Fritz John multipliers, constraint
//! qualifications, and either the (possibly KKT-normalized) multiplier
//! certificate or the constructive non-optimality certificate.
//!
//! Verdict policy:
//!
//! * `KKT` — multipliers exist, a constraint qualification verifies, and the
//!   certificate is normalized to `lambda_0 = 1`;
//! * `FJ` — multipliers exist with `lambda_0` above the stationarity
//!   tolerance but no qualification verified, so the document keeps the
//!   sum-one normalization and makes no KKT claim;
//! * `DEGENERATE` — multipliers exist only with `lambda_0 = 0`; the KKT form
//!   is unavailable;
//! * `NOT_OPTIMAL` — no multipliers exist and an improving feasible point
//!   certifies it.

use thiserror::Error;

use crate::ascent::{self, AscentError, RestoreConfig};
use crate::certificate::{
    ascent_doc, diff_report, multiplier_doc, CertificateDoc, DiffReportDoc, Verdict,
};
use crate::diff::{self, DiffError};
use crate::multipliers::{self, cq_report, EngineConfig, FritzJohnOutcome, MultiplierError};
use crate::problem::{Candidate, Problem, ScalarField};

/// Tolerances and knobs for one run, shared by every command.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub engine: EngineConfig,
    pub restore: RestoreConfig,
    /// Copied verbatim into the certificate when present.
    pub generated_at: Option<String>,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Problems with the input itself (exit code 1 in the CLI).
    #[error("{0}")]
    Input(String),
    /// A differentiability hypothesis failed numerically (exit code 2).
    #[error("differentiability hypothesis failed: {0}")]
    Hypothesis(DiffError),
    /// Numerical failure in the solver machinery (exit code 2).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<MultiplierError> for PipelineError {
    fn from(err: MultiplierError) -> PipelineError {
        match err {
            MultiplierError::InfeasibleCandidate(detail) => {
                PipelineError::Input(format!("candidate is infeasible: {}", detail))
            }
            MultiplierError::Diff(e) => match e {
                DiffError::LinearityViolation { .. } | DiffError::NonConvergent { .. } => {
                    PipelineError::Hypothesis(e)
                }
                other => PipelineError::Numerical(other.to_string()),
            },
            other => PipelineError::Numerical(other.to_string()),
        }
    }
}

impl From<AscentError> for PipelineError {
    fn from(err: AscentError) -> PipelineError {
        PipelineError::Numerical(err.to_string())
    }
}

/// Runs the full analysis and renders the certificate document.
pub fn check_problem(
    problem: &Problem,
    candidate: &Candidate,
    cfg: &RunConfig,
) -> Result<CertificateDoc, PipelineError> {
    let analysis = match problem {
        Problem::Inequality(p) => multipliers::fritz_john_inequality(p, candidate, &cfg.engine)?,
        Problem::Mixed(p) => multipliers::fritz_john_mixed(p, candidate, &cfg.engine)?,
    };
    let cq = cq_report(problem, &analysis).map_err(|e| PipelineError::Numerical(e.to_string()))?;

    match &analysis.outcome {
        FritzJohnOutcome::Certificate(cert) => {
            let (verdict, reported) = if cert.lambda0() <= cfg.engine.stat_tol {
                (Verdict::Degenerate, cert.clone())
            } else if cq.kkt_backed() {
                let kkt = multipliers::normalize_kkt(cert, cfg.engine.stat_tol)
                    .map_err(|e| PipelineError::Numerical(e.to_string()))?;
                (Verdict::Kkt, kkt)
            } else {
                (Verdict::FritzJohn, cert.clone())
            };
            Ok(multiplier_doc(
                verdict,
                problem,
                candidate,
                &analysis.active.indices,
                &reported,
                &cq,
                cfg.generated_at.clone(),
            ))
        }
        FritzJohnOutcome::NoMultipliers(witness) => {
            let cert = ascent::certify_nonoptimal(problem, candidate, witness, &cfg.restore)?;
            Ok(ascent_doc(
                problem,
                candidate,
                &analysis.active.indices,
                &cert,
                &cq,
                multipliers::HYPOTHESIS_NOTE,
                cfg.generated_at.clone(),
            ))
        }
    }
}

/// Outcome of `mrules ascend`: either the candidate is FJ-stationary (a
/// refusal, not an error) or a non-optimality certificate.
#[derive(Debug)]
pub enum AscendOutcome {
    Stationary(CertificateDoc),
    Improved(CertificateDoc),
}

pub fn ascend_problem(
    problem: &Problem,
    candidate: &Candidate,
    cfg: &RunConfig,
) -> Result<AscendOutcome, PipelineError> {
    let doc = check_problem(problem, candidate, cfg)?;
    match doc.verdict {
        Verdict::NotOptimal => Ok(AscendOutcome::Improved(doc)),
        _ => Ok(AscendOutcome::Stationary(doc)),
    }
}

/// Resolves `--function` selectors: `objective`/`f0`, inequality names
/// (`f<k>` or `g<k>`), equality names (`h<k>`), or a flat 0-based index
/// (objective, then inequalities, then equalities).
pub fn resolve_function<'a>(
    problem: &'a Problem,
    selector: &str,
) -> Result<(String, &'a ScalarField), PipelineError> {
    let m = problem.inequalities().len();
    let q = problem.equalities().len();
    let pick_ineq = |k: usize| -> Result<(String, &'a ScalarField), PipelineError> {
        if k == 0 || k > m {
            return Err(PipelineError::Input(format!(
                "inequality index {} out of range 1..={}",
                k, m
            )));
        }
        Ok((format!("g{}", k), &problem.inequalities()[k - 1]))
    };
    let trimmed = selector.trim();
    if trimmed.eq_ignore_ascii_case("objective") || trimmed.eq_ignore_ascii_case("f0") {
        return Ok(("objective".into(), problem.objective()));
    }
    if let Some(rest) = trimmed.strip_prefix('g') {
        if let Ok(k) = rest.parse::<usize>() {
            return pick_ineq(k);
        }
    }
    if let Some(rest) = trimmed.strip_prefix('f') {
        if let Ok(k) = rest.parse::<usize>() {
            return pick_ineq(k);
        }
    }
    if let Some(rest) = trimmed.strip_prefix('h') {
        if let Ok(k) = rest.parse::<usize>() {
            if k == 0 || k > q {
                return Err(PipelineError::Input(format!(
                    "equality index {} out of range 1..={}",
                    k, q
                )));
            }
            return Ok((format!("h{}", k), &problem.equalities()[k - 1]));
        }
    }
    if let Ok(flat) = trimmed.parse::<usize>() {
        if flat == 0 {
            return Ok(("objective".into(), problem.objective()));
        }
        if flat <= m {
            return pick_ineq(flat);
        }
        if flat <= m + q {
            let k = flat - m;
            return Ok((format!("h{}", k), &problem.equalities()[k - 1]));
        }
        return Err(PipelineError::Input(format!(
            "function index {} out of range 0..={}",
            flat,
            m + q
        )));
    }
    Err(PipelineError::Input(format!(
        "cannot resolve function `{}`",
        selector
    )))
}

/// Differentiability verdicts at the candidate, for one selected function or
/// for all of them.
pub fn diffcheck_problem(
    problem: &Problem,
    candidate: &Candidate,
    selector: Option<&str>,
    cfg: &RunConfig,
) -> Result<Vec<DiffReportDoc>, PipelineError> {
    let mut targets: Vec<(String, &ScalarField)> = Vec::new();
    match selector {
        Some(sel) => targets.push(resolve_function(problem, sel)?),
        None => {
            targets.push(("objective".into(), problem.objective()));
            for (i, g) in problem.inequalities().iter().enumerate() {
                targets.push((format!("g{}", i + 1), g));
            }
            for (j, h) in problem.equalities().iter().enumerate() {
                targets.push((format!("h{}", j + 1), h));
            }
        }
    }
    let diff_cfg = cfg
        .engine
        .diff
        .clamped_to(problem.domain(), &candidate.point);
    let mut reports = Vec::with_capacity(targets.len());
    for (label, field) in targets {
        let verdict = diff::classify(field, problem.domain(), &candidate.point, &diff_cfg)
            .map_err(|e| PipelineError::Numerical(e.to_string()))?;
        reports.push(diff_report(label, &verdict));
    }
    Ok(reports)
}
