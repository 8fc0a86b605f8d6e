//! Numerical differentiability diagnostics.
//!
//! Derivatives here are one-sided: the estimators extrapolate the forward
//! difference quotient over a geometric step ladder, because the underlying
//! directional limits are taken as the step decreases to zero from above.
//! Three layers build on the quotient:
//!
//! * [`gateaux_directional`] — Richardson-extrapolated directional
//!   derivative with an error bound;
//! * [`gateaux_gradient`] — componentwise gradient plus a linearity audit
//!   over random unit directions (a directional derivative that is not a
//!   linear function of the direction is not a Gateaux derivative);
//! * [`hadamard_probe`] — a refutation probe that re-runs the quotient
//!   along perturbed direction sequences `h_k = h + t_k d`, including
//!   adversarial `d` registered by builtins that hide a curve through the
//!   base point.
//!
//! Finite sampling can refute but never certify the sequence-uniform limit,
//! so the strongest positive verdict is spelled `HadamardConsistent`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::EvalError;
use crate::linalg::{axpy, dot, norm2};
use crate::problem::{DomainBox, ScalarField};

pub const DEFAULT_BASE_STEP: f64 = 1e-2;
pub const DEFAULT_DECAY: f64 = 0.5;
pub const DEFAULT_DEPTH: usize = 4;
pub const DEFAULT_LINEARITY_SAMPLES: usize = 16;
pub const DEFAULT_DIFF_TOL: f64 = 1e-6;
pub const DEFAULT_SEED: u64 = 17;

/// Step ladder and tolerance knobs for the estimators.
#[derive(Debug, Clone)]
pub struct DiffConfig {
    /// Base step `t0` of the ladder `t0 * decay^k`.
    pub base_step: f64,
    /// Geometric decay factor, in (0, 1).
    pub decay: f64,
    /// Richardson depth; the ladder has `depth + 1` rungs.
    pub depth: usize,
    /// Number of random unit directions in the linearity audit.
    pub linearity_samples: usize,
    /// Agreement tolerance for estimates and audits.
    pub tol: f64,
    /// Seed for the audit direction sampler.
    pub seed: u64,
}

impl Default for DiffConfig {
    fn default() -> DiffConfig {
        DiffConfig {
            base_step: DEFAULT_BASE_STEP,
            decay: DEFAULT_DECAY,
            depth: DEFAULT_DEPTH,
            linearity_samples: DEFAULT_LINEARITY_SAMPLES,
            tol: DEFAULT_DIFF_TOL,
            seed: DEFAULT_SEED,
        }
    }
}

impl DiffConfig {
    pub fn validate(&self) -> Result<(), DiffError> {
        if !(self.base_step > 0.0) || !(self.decay > 0.0 && self.decay < 1.0) || self.depth < 2 {
            return Err(DiffError::BadConfig);
        }
        Ok(())
    }

    /// Shrinks the base step so the whole ladder stays inside the box when
    /// probing unit-scale directions from `x`.
    pub fn clamped_to(&self, domain: &DomainBox, x: &[f64]) -> DiffConfig {
        let radius = domain.interior_radius(x);
        let mut cfg = self.clone();
        if radius.is_finite() {
            cfg.base_step = cfg.base_step.min(0.25 * radius);
        }
        cfg
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error("invalid differentiation config")]
    BadConfig,
    #[error("probe step t={step} leaves the domain box")]
    StepLeavesDomain { step: f64 },
    #[error("difference quotients do not converge (last extrapolants {last:?})")]
    NonConvergent { direction: Vec<f64>, last: Vec<f64> },
    #[error(
        "directional derivative is not linear: along {direction:?} got {directional}, \
         gradient predicts {linear_prediction}"
    )]
    LinearityViolation {
        direction: Vec<f64>,
        directional: f64,
        linear_prediction: f64,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One forward difference quotient `(f(x + t h) - f(x)) / t`.
pub fn directional_quotient(
    f: &ScalarField,
    domain: &DomainBox,
    x: &[f64],
    h: &[f64],
    t: f64,
) -> Result<f64, DiffError> {
    debug_assert!(t > 0.0);
    let shifted = axpy(x, t, h);
    if !domain.contains(x) || !domain.contains(&shifted) {
        return Err(DiffError::StepLeavesDomain { step: t });
    }
    let fx = f.evaluate(x)?;
    let fs = f.evaluate(&shifted)?;
    Ok((fs - fx) / t)
}

fn richardson(quotients: &[f64], decay: f64) -> (f64, f64) {
    let mut prev: Vec<f64> = Vec::new();
    let mut diag = Vec::with_capacity(quotients.len());
    for (k, q) in quotients.iter().enumerate() {
        let mut row = vec![*q];
        for j in 1..=k {
            let rho_j = decay.powi(j as i32);
            let val = (row[j - 1] - rho_j * prev[j - 1]) / (1.0 - rho_j);
            row.push(val);
        }
        diag.push(row[k]);
        prev = row;
    }
    let last = diag[diag.len() - 1];
    let spread = (last - diag[diag.len() - 2]).abs();
    (last, spread)
}

/// Richardson-extrapolated one-sided directional derivative along `h`.
/// Returns the estimate and the spread of the last two extrapolants.
pub fn gateaux_directional(
    f: &ScalarField,
    domain: &DomainBox,
    x: &[f64],
    h: &[f64],
    cfg: &DiffConfig,
) -> Result<(f64, f64), DiffError> {
    cfg.validate()?;
    let mut quotients = Vec::with_capacity(cfg.depth + 1);
    let mut t = cfg.base_step;
    for _ in 0..=cfg.depth {
        quotients.push(directional_quotient(f, domain, x, h, t)?);
        t *= cfg.decay;
    }
    // constant quotients (affine behavior along the ray): extrapolation
    // would only amplify the rounding floor eps*|f|/t, and the widest step
    // carries the least of it
    let raw_spread = quotients
        .iter()
        .fold(0.0f64, |m, q| m.max((q - quotients[0]).abs()));
    if raw_spread <= 1e-11 * quotients[0].abs().max(1.0) {
        return Ok((quotients[0], raw_spread));
    }
    let (estimate, spread) = richardson(&quotients, cfg.decay);
    if spread > cfg.tol * estimate.abs().max(1.0) {
        return Err(DiffError::NonConvergent {
            direction: h.to_vec(),
            last: quotients,
        });
    }
    Ok((estimate, spread))
}

fn canonical_direction(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn random_unit_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = norm2(&v);
        if norm > 0.1 {
            return v.iter().map(|c| c / norm).collect();
        }
    }
}

/// Gateaux gradient assembled from the canonical directions, audited for
/// linearity on `cfg.linearity_samples` random unit directions and their
/// negations.
pub fn gateaux_gradient(
    f: &ScalarField,
    domain: &DomainBox,
    x: &[f64],
    cfg: &DiffConfig,
) -> Result<Vec<f64>, DiffError> {
    cfg.validate()?;
    let n = x.len();
    let mut gradient = Vec::with_capacity(n);
    for i in 0..n {
        let e = canonical_direction(n, i);
        let (value, _) = gateaux_directional(f, domain, x, &e, cfg)?;
        gradient.push(value);
    }
    let bound = cfg.tol * (1.0 + norm2(&gradient));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.linearity_samples {
        let h = random_unit_direction(&mut rng, n);
        for signed in [h.clone(), h.iter().map(|c| -c).collect::<Vec<_>>()] {
            let (directional, _) = gateaux_directional(f, domain, x, &signed, cfg)?;
            let linear_prediction = dot(&gradient, &signed);
            if (directional - linear_prediction).abs() > bound {
                return Err(DiffError::LinearityViolation {
                    direction: signed,
                    directional,
                    linear_prediction,
                });
            }
        }
    }
    Ok(gradient)
}

/// Witness for a refuted Hadamard limit: the perturbed sequence
/// `h_k = h + t_k d` whose quotients fail to reproduce the Gateaux value.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardViolation {
    pub base_direction: Vec<f64>,
    pub perturbation: Vec<f64>,
    pub steps: Vec<f64>,
    pub quotients: Vec<f64>,
    pub gateaux_value: f64,
}

impl HadamardViolation {
    /// The `k`-th perturbed direction of the witness sequence.
    pub fn perturbed_direction(&self, k: usize) -> Vec<f64> {
        axpy(&self.base_direction, self.steps[k], &self.perturbation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HadamardProbe {
    Consistent,
    Violated(HadamardViolation),
}

/// Probes the quotient along perturbed direction sequences converging to
/// `h`. The perturbation family is the signed canonical basis plus any
/// adversarial directions registered by a builtin source of `f`.
pub fn hadamard_probe(
    f: &ScalarField,
    domain: &DomainBox,
    x: &[f64],
    h: &[f64],
    cfg: &DiffConfig,
) -> Result<HadamardProbe, DiffError> {
    cfg.validate()?;
    let n = x.len();
    let (gateaux_value, _) = gateaux_directional(f, domain, x, h, cfg)?;

    let mut family: Vec<Vec<f64>> = Vec::new();
    if let Some(builtin) = f.builtin() {
        family.extend(builtin.adversarial_directions(n));
    }
    for i in 0..n {
        let e = canonical_direction(n, i);
        family.push(e.clone());
        family.push(e.iter().map(|c| -c).collect());
    }

    let steps: Vec<f64> = (0..=cfg.depth)
        .map(|k| cfg.base_step * cfg.decay.powi(k as i32))
        .collect();
    for d in family {
        let mut quotients = Vec::with_capacity(steps.len());
        for &t in &steps {
            let h_k = axpy(h, t, &d);
            quotients.push(directional_quotient(f, domain, x, &h_k, t)?);
        }
        let (limit, spread) = richardson(&quotients, cfg.decay);
        let diverged = spread > cfg.tol * limit.abs().max(1.0);
        let inconsistent = (limit - gateaux_value).abs() > cfg.tol * gateaux_value.abs().max(1.0);
        if diverged || inconsistent {
            return Ok(HadamardProbe::Violated(HadamardViolation {
                base_direction: h.to_vec(),
                perturbation: d,
                steps,
                quotients,
                gateaux_value,
            }));
        }
    }
    Ok(HadamardProbe::Consistent)
}

/// Ordered differentiability verdicts, strongest last.
#[derive(Debug, Clone, PartialEq)]
pub enum DiffVerdict {
    /// Some directional quotient fails to converge.
    NotDirectional {
        direction: Vec<f64>,
        quotients: Vec<f64>,
    },
    /// Directional derivatives exist but are not a linear map of the
    /// direction.
    DirectionalNotLinear {
        direction: Vec<f64>,
        directional: f64,
        linear_prediction: f64,
    },
    /// Gateaux holds but some perturbed sequence refutes the Hadamard limit.
    Gateaux {
        gradient: Vec<f64>,
        violation: HadamardViolation,
    },
    /// Gateaux holds and every probed sequence is consistent.
    HadamardConsistent { gradient: Vec<f64> },
}

impl DiffVerdict {
    /// Position in the verdict order (higher is stronger).
    pub fn strength(&self) -> u8 {
        match self {
            DiffVerdict::NotDirectional { .. } => 0,
            DiffVerdict::DirectionalNotLinear { .. } => 1,
            DiffVerdict::Gateaux { .. } => 2,
            DiffVerdict::HadamardConsistent { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DiffVerdict::NotDirectional { .. } => "NotDirectional",
            DiffVerdict::DirectionalNotLinear { .. } => "DirectionalNotLinear",
            DiffVerdict::Gateaux { .. } => "Gateaux",
            DiffVerdict::HadamardConsistent { .. } => "HadamardConsistent",
        }
    }

    pub fn gradient(&self) -> Option<&[f64]> {
        match self {
            DiffVerdict::Gateaux { gradient, .. }
            | DiffVerdict::HadamardConsistent { gradient } => Some(gradient),
            _ => None,
        }
    }
}

/// Runs the estimator ladder and returns the strongest consistent verdict.
/// Only evaluation faults surface as errors; refutations are verdicts.
pub fn classify(
    f: &ScalarField,
    domain: &DomainBox,
    x: &[f64],
    cfg: &DiffConfig,
) -> Result<DiffVerdict, DiffError> {
    let gradient = match gateaux_gradient(f, domain, x, cfg) {
        Ok(g) => g,
        Err(DiffError::NonConvergent { direction, last }) => {
            return Ok(DiffVerdict::NotDirectional {
                direction,
                quotients: last,
            });
        }
        Err(DiffError::LinearityViolation {
            direction,
            directional,
            linear_prediction,
        }) => {
            return Ok(DiffVerdict::DirectionalNotLinear {
                direction,
                directional,
                linear_prediction,
            });
        }
        Err(other) => return Err(other),
    };
    for i in 0..x.len() {
        let h = canonical_direction(x.len(), i);
        match hadamard_probe(f, domain, x, &h, cfg)? {
            HadamardProbe::Consistent => {}
            HadamardProbe::Violated(violation) => {
                return Ok(DiffVerdict::Gateaux {
                    gradient,
                    violation,
                });
            }
        }
    }
    Ok(DiffVerdict::HadamardConsistent { gradient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Builtin;

    fn field(src: &str, names: &[&str]) -> ScalarField {
        let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        ScalarField::parse(src, &vars).unwrap()
    }

    fn boxed(n: usize) -> DomainBox {
        DomainBox::unbounded(n)
    }

    #[test]
    fn quotient_of_square_at_one() {
        let f = field("x1^2", &["x1", "x2"]);
        let q = directional_quotient(&f, &boxed(2), &[1.0, 0.0], &[1.0, 0.0], 0.1).unwrap();
        assert!((q - 2.1).abs() < 1e-12);
    }

    #[test]
    fn quotient_of_linear_is_exact() {
        let f = field("x1", &["x1", "x2"]);
        for t in [1.0, 0.1, 1e-4] {
            let q = directional_quotient(&f, &boxed(2), &[0.3, 0.7], &[1.0, 0.0], t).unwrap();
            assert!((q - 1.0).abs() <= 1e-11, "t={} q={}", t, q);
        }
        // with exactly representable base point and step the quotient is exact
        let q = directional_quotient(&f, &boxed(2), &[0.5, 0.0], &[1.0, 0.0], 0.25).unwrap();
        assert_eq!(q, 1.0);
    }

    #[test]
    fn quotient_of_norm_at_origin_is_one_sided() {
        let f = ScalarField::from_builtin(Builtin::EuclideanNorm, 2).unwrap();
        for t in [0.01, 1e-3, 1e-6] {
            let q = directional_quotient(&f, &boxed(2), &[0.0, 0.0], &[1.0, 0.0], t).unwrap();
            assert_eq!(q, 1.0);
            let q = directional_quotient(&f, &boxed(2), &[0.0, 0.0], &[0.0, 1.0], t).unwrap();
            assert_eq!(q, 1.0);
        }
    }

    #[test]
    fn quotient_respects_domain_box() {
        let f = field("x1", &["x1"]);
        let domain = DomainBox::new(vec![(0.0, 1.0)]).unwrap();
        let err = directional_quotient(&f, &domain, &[0.9], &[1.0], 0.5).unwrap_err();
        assert!(matches!(err, DiffError::StepLeavesDomain { .. }));
    }

    #[test]
    fn directional_derivative_of_quadratic() {
        let f = field("x1^2 + x2^2", &["x1", "x2"]);
        let cfg = DiffConfig::default();
        let (d, err) = gateaux_directional(&f, &boxed(2), &[0.5, 0.5], &[1.0, 0.0], &cfg).unwrap();
        assert!((d - 1.0).abs() <= 1e-8, "estimate {}", d);
        assert!(err <= 1e-8);
    }

    #[test]
    fn directional_derivative_of_exponential_matches_analytic() {
        let f = field("exp(x1)", &["x1"]);
        let cfg = DiffConfig::default();
        let (d, _) = gateaux_directional(&f, &boxed(1), &[0.0], &[1.0], &cfg).unwrap();
        assert!((d - 1.0).abs() <= 1e-8); // exp'(0) = 1
        let (d, _) = gateaux_directional(&f, &boxed(1), &[1.0], &[1.0], &cfg).unwrap();
        assert!((d - std::f64::consts::E).abs() <= 1e-8, "estimate {}", d);
    }

    #[test]
    fn parabola_indicator_has_zero_directional_derivative() {
        let f = ScalarField::from_builtin(Builtin::ParabolaIndicator, 2).unwrap();
        let cfg = DiffConfig::default();
        // no probed point (t, 0) lies on the parabola x2 = x1^2
        for k in 0..=cfg.depth {
            let t = cfg.base_step * cfg.decay.powi(k as i32);
            assert_eq!(f.evaluate(&[t, 0.0]).unwrap(), 0.0);
        }
        let (d, _) = gateaux_directional(&f, &boxed(2), &[0.0, 0.0], &[1.0, 0.0], &cfg).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn sqrt_of_abs_is_not_directional_at_zero() {
        let f = field("sqrt(abs(x1))", &["x1"]);
        let cfg = DiffConfig::default();
        let err = gateaux_directional(&f, &boxed(1), &[0.0], &[1.0], &cfg).unwrap_err();
        assert!(matches!(err, DiffError::NonConvergent { .. }));
    }

    #[test]
    fn gradient_of_linear_field() {
        let f = field("x1 + 2*x2", &["x1", "x2"]);
        let cfg = DiffConfig::default();
        let g = gateaux_gradient(&f, &boxed(2), &[0.4, -0.3], &cfg).unwrap();
        assert!((g[0] - 1.0).abs() <= 1e-9);
        assert!((g[1] - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn gradient_of_product_rule_point() {
        let f = field("x1*x2", &["x1", "x2"]);
        let cfg = DiffConfig::default();
        let g = gateaux_gradient(&f, &boxed(2), &[2.0, 3.0], &cfg).unwrap();
        assert!((g[0] - 3.0).abs() <= 1e-8);
        assert!((g[1] - 2.0).abs() <= 1e-8);
    }

    #[test]
    fn norm_at_origin_violates_linearity() {
        let f = ScalarField::from_builtin(Builtin::EuclideanNorm, 2).unwrap();
        let cfg = DiffConfig::default();
        match gateaux_gradient(&f, &boxed(2), &[0.0, 0.0], &cfg) {
            Err(DiffError::LinearityViolation {
                direction,
                directional,
                linear_prediction,
            }) => {
                // the quotient limit along -h is +|h|, never the linear value
                let (along_neg, _) = gateaux_directional(
                    &f,
                    &boxed(2),
                    &[0.0, 0.0],
                    &direction.iter().map(|c| -c).collect::<Vec<_>>(),
                    &cfg,
                )
                .unwrap();
                assert!((along_neg - 1.0).abs() <= 1e-9);
                assert!((directional - 1.0).abs() <= 1e-9);
                assert!((directional - linear_prediction).abs() > cfg.tol);
            }
            other => panic!("expected linearity violation, got {:?}", other),
        }
    }

    #[test]
    fn hadamard_probe_accepts_smooth_field() {
        let f = field("x1^2 + x2^2", &["x1", "x2"]);
        let cfg = DiffConfig::default();
        let probe = hadamard_probe(&f, &boxed(2), &[0.3, 0.4], &[1.0, 0.0], &cfg).unwrap();
        assert_eq!(probe, HadamardProbe::Consistent);
    }

    #[test]
    fn hadamard_probe_accepts_linear_field() {
        let f = field("3*x1 - x2", &["x1", "x2"]);
        let cfg = DiffConfig::default();
        for h in [[1.0, 0.0], [0.0, 1.0], [-0.6, 0.8]] {
            let probe = hadamard_probe(&f, &boxed(2), &[0.1, 0.2], &h, &cfg).unwrap();
            assert_eq!(probe, HadamardProbe::Consistent);
        }
    }

    #[test]
    fn hadamard_probe_refutes_parabola_indicator() {
        let f = ScalarField::from_builtin(Builtin::ParabolaIndicator, 2).unwrap();
        let cfg = DiffConfig::default();
        match hadamard_probe(&f, &boxed(2), &[0.0, 0.0], &[1.0, 0.0], &cfg).unwrap() {
            HadamardProbe::Violated(w) => {
                assert_eq!(w.gateaux_value, 0.0);
                assert_eq!(w.perturbation, vec![0.0, 1.0]);
                // witness sequence h_k = (1, t_k) runs along the parabola:
                // f(x + t_k h_k) = f(t_k, t_k^2) = 1 so the quotient is 1/t_k
                for (k, &t) in w.steps.iter().enumerate() {
                    assert_eq!(w.perturbed_direction(k), vec![1.0, t]);
                    assert_eq!(f.evaluate(&[t, t * t]).unwrap(), 1.0);
                    assert!((w.quotients[k] - 1.0 / t).abs() <= 1e-9 / t);
                }
            }
            HadamardProbe::Consistent => panic!("probe must refute the indicator"),
        }
    }

    #[test]
    fn classify_polynomial_as_hadamard_consistent() {
        let f = field("x1^2 - x1*x2 + 3", &["x1", "x2"]);
        let verdict = classify(&f, &boxed(2), &[0.2, -0.4], &DiffConfig::default()).unwrap();
        assert!(matches!(verdict, DiffVerdict::HadamardConsistent { .. }));
        assert_eq!(verdict.strength(), 3);
    }

    #[test]
    fn classify_parabola_indicator_as_gateaux_only() {
        let f = ScalarField::from_builtin(Builtin::ParabolaIndicator, 2).unwrap();
        let verdict = classify(&f, &boxed(2), &[0.0, 0.0], &DiffConfig::default()).unwrap();
        match &verdict {
            DiffVerdict::Gateaux {
                gradient,
                violation,
            } => {
                assert_eq!(gradient, &vec![0.0, 0.0]);
                assert_eq!(violation.base_direction, vec![1.0, 0.0]);
                assert_eq!(violation.perturbation, vec![0.0, 1.0]);
            }
            other => panic!("expected Gateaux verdict, got {:?}", other),
        }
        assert_eq!(verdict.strength(), 2);
    }

    #[test]
    fn classify_norm_at_origin_as_not_linear() {
        let f = ScalarField::from_builtin(Builtin::EuclideanNorm, 3).unwrap();
        let verdict = classify(&f, &boxed(3), &[0.0, 0.0, 0.0], &DiffConfig::default()).unwrap();
        assert!(matches!(verdict, DiffVerdict::DirectionalNotLinear { .. }));
        assert_eq!(verdict.strength(), 1);
    }

    #[test]
    fn classify_rough_field_as_not_directional() {
        let f = field("sqrt(abs(x1))", &["x1"]);
        let verdict = classify(&f, &boxed(1), &[0.0], &DiffConfig::default()).unwrap();
        assert!(matches!(verdict, DiffVerdict::NotDirectional { .. }));
        assert_eq!(verdict.strength(), 0);
    }

    #[test]
    fn directional_estimates_scale_with_direction() {
        let f = field("exp(x1)*sin(x2) + x1^2", &["x1", "x2"]);
        let cfg = DiffConfig::default();
        let x = [0.3, 0.9];
        let h = [0.8, -0.6];
        let (base, _) = gateaux_directional(&f, &boxed(2), &x, &h, &cfg).unwrap();
        for c in [2.0, 10.0] {
            let scaled_h: Vec<f64> = h.iter().map(|v| c * v).collect();
            let (scaled, _) = gateaux_directional(&f, &boxed(2), &x, &scaled_h, &cfg).unwrap();
            assert!(
                (scaled - c * base).abs() <= cfg.tol * (1.0 + (c * base).abs()),
                "c={} scaled={} base={}",
                c,
                scaled,
                base
            );
        }
    }

    #[test]
    fn clamped_config_respects_small_boxes() {
        let domain = DomainBox::new(vec![(0.0, 0.02)]).unwrap();
        let cfg = DiffConfig::default().clamped_to(&domain, &[0.01]);
        assert!(cfg.base_step <= 0.0025);
        let f = field("x1^2", &["x1"]);
        // the default ladder would step onto the boundary; the clamp keeps
        // every probe strictly inside
        assert!(gateaux_gradient(&f, &domain, &[0.01], &DiffConfig::default()).is_err());
        let g = gateaux_gradient(&f, &domain, &[0.01], &cfg).unwrap();
        assert!((g[0] - 0.02).abs() <= 1e-9, "gradient {}", g[0]);
    }
}
