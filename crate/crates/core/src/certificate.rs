//! Certificate documents: the JSON artifacts `mrules` emits.
//!
//! One document per analyzed problem. Field order is fixed by the struct
//! layout and every numeric value comes from a deterministic pipeline, so
//! repeated runs byte-agree. A timestamp is only included when the caller
//! supplies one (the `MRULES_TIMESTAMP` environment variable in the CLI);
//! by default the document carries no volatile fields.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ascent::{AscentCertificate, AscentDirection};
use crate::diff::DiffVerdict;
use crate::linalg::clean_zero;
use crate::multipliers::{CqReport, MultiplierCertificate};
use crate::problem::{to_file_string, Candidate, Problem};

/// Analysis verdicts, also the exit-code vocabulary of the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "FJ")]
    FritzJohn,
    #[serde(rename = "KKT")]
    Kkt,
    #[serde(rename = "NOT_OPTIMAL")]
    NotOptimal,
    #[serde(rename = "DEGENERATE")]
    Degenerate,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::FritzJohn | Verdict::Kkt => 0,
            Verdict::NotOptimal => 3,
            Verdict::Degenerate => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::FritzJohn => "FJ",
            Verdict::Kkt => "KKT",
            Verdict::NotOptimal => "NOT_OPTIMAL",
            Verdict::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CqDoc {
    pub slater: Option<bool>,
    pub rank: Option<usize>,
    pub kernel: Option<bool>,
}

impl From<&CqReport> for CqDoc {
    fn from(report: &CqReport) -> CqDoc {
        CqDoc {
            slater: report.condition_positive_direction,
            rank: report.equality_jacobian_rank,
            kernel: report.condition_kernel_direction,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AscentDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Vec<f64>>,
    pub alpha: f64,
    pub gain: f64,
    pub improved_point: Vec<f64>,
    pub inequality_values: Vec<f64>,
    pub equality_residuals: Vec<f64>,
    pub iterations: usize,
    pub backtracks: usize,
}

impl From<&AscentCertificate> for AscentDoc {
    fn from(cert: &AscentCertificate) -> AscentDoc {
        let (direction, fixed_point) = match &cert.direction {
            AscentDirection::Line(u) => (Some(u.clone()), None),
            AscentDirection::FixedPoint(k) => (None, Some(k.clone())),
        };
        AscentDoc {
            direction,
            fixed_point,
            alpha: cert.step,
            gain: cert.objective_gain,
            improved_point: cert.improved_point.clone(),
            inequality_values: cert.inequality_values.clone(),
            equality_residuals: cert.equality_residuals.clone(),
            iterations: cert.fixed_point_iterations,
            backtracks: cert.backtracks,
        }
    }
}

/// The certificate document. `active_set` uses 1-based constraint indices;
/// `lambda` lists the objective multiplier first and then one entry per
/// inequality constraint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub verdict: Verdict,
    pub problem_hash: String,
    pub point: Vec<f64>,
    pub active_set: Vec<usize>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub normalization: Option<String>,
    pub residual: Option<f64>,
    pub slackness: Vec<f64>,
    pub cq: CqDoc,
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ascent: Option<AscentDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

impl CertificateDoc {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("certificate serializes");
        out.push('\n');
        out
    }
}

/// Canonical identity of a (problem, candidate) pair: the SHA-256 of the
/// canonical problem-file text, so reformatted input files hash alike.
pub fn problem_hash(problem: &Problem, candidate: &Candidate) -> String {
    let canonical = to_file_string(problem, candidate);
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{:02x}", byte));
    }
    hex
}

pub fn multiplier_doc(
    verdict: Verdict,
    problem: &Problem,
    candidate: &Candidate,
    active_indices: &[usize],
    cert: &MultiplierCertificate,
    cq: &CqReport,
    generated_at: Option<String>,
) -> CertificateDoc {
    CertificateDoc {
        verdict,
        problem_hash: problem_hash(problem, candidate),
        point: candidate.point.clone(),
        active_set: active_indices.iter().map(|i| i + 1).collect(),
        lambda: cert.lambda.iter().map(|v| clean_zero(*v)).collect(),
        mu: cert.mu.iter().map(|v| clean_zero(*v)).collect(),
        normalization: Some(cert.normalization.name().to_string()),
        residual: Some(cert.stationarity_residual),
        slackness: cert.complementary_slackness.clone(),
        cq: cq.into(),
        note: cert.note.to_string(),
        ascent: None,
        generated_at,
    }
}

pub fn ascent_doc(
    problem: &Problem,
    candidate: &Candidate,
    active_indices: &[usize],
    cert: &AscentCertificate,
    cq: &CqReport,
    note: &str,
    generated_at: Option<String>,
) -> CertificateDoc {
    CertificateDoc {
        verdict: Verdict::NotOptimal,
        problem_hash: problem_hash(problem, candidate),
        point: candidate.point.clone(),
        active_set: active_indices.iter().map(|i| i + 1).collect(),
        lambda: Vec::new(),
        mu: Vec::new(),
        normalization: None,
        residual: None,
        slackness: Vec::new(),
        cq: cq.into(),
        note: note.to_string(),
        ascent: Some(cert.into()),
        generated_at,
    }
}

/// Per-function differentiability report emitted by `mrules diffcheck`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffReportDoc {
    pub function: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<DiffWitnessDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffWitnessDoc {
    pub kind: String,
    pub direction: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_prediction: Option<f64>,
}

pub fn diff_report(function: String, verdict: &DiffVerdict) -> DiffReportDoc {
    let witness = match verdict {
        DiffVerdict::HadamardConsistent { .. } => None,
        DiffVerdict::Gateaux { violation, .. } => Some(DiffWitnessDoc {
            kind: "hadamard_violation".into(),
            direction: violation.base_direction.clone(),
            perturbation: Some(violation.perturbation.clone()),
            steps: Some(violation.steps.clone()),
            quotients: Some(violation.quotients.clone()),
            observed: Some(violation.gateaux_value),
            linear_prediction: None,
        }),
        DiffVerdict::DirectionalNotLinear {
            direction,
            directional,
            linear_prediction,
        } => Some(DiffWitnessDoc {
            kind: "linearity_violation".into(),
            direction: direction.clone(),
            perturbation: None,
            steps: None,
            quotients: None,
            observed: Some(*directional),
            linear_prediction: Some(*linear_prediction),
        }),
        DiffVerdict::NotDirectional {
            direction,
            quotients,
        } => Some(DiffWitnessDoc {
            kind: "divergent_quotients".into(),
            direction: direction.clone(),
            perturbation: None,
            steps: None,
            quotients: Some(quotients.clone()),
            observed: None,
            linear_prediction: None,
        }),
    };
    DiffReportDoc {
        function,
        verdict: verdict.name().to_string(),
        gradient: verdict.gradient().map(|g| g.to_vec()),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::load_problem_str;

    #[test]
    fn hash_is_stable_under_reformatting() {
        let a = load_problem_str(
            "[problem]\nkind = \"inequality\"\nvars = [\"x1\"]\nobjective = \"x1\"\n\n[candidate]\npoint = [0.5]\n",
        )
        .unwrap();
        let b = load_problem_str(
            "[problem]\nkind   = \"inequality\"\nvars=[\"x1\"]\nobjective=\"x1\"\nineq = []\n\n[candidate]\npoint  = [0.5]\n",
        )
        .unwrap();
        assert_eq!(problem_hash(&a.0, &a.1), problem_hash(&b.0, &b.1));
    }

    #[test]
    fn verdict_exit_codes_are_total() {
        assert_eq!(Verdict::FritzJohn.exit_code(), 0);
        assert_eq!(Verdict::Kkt.exit_code(), 0);
        assert_eq!(Verdict::NotOptimal.exit_code(), 3);
        assert_eq!(Verdict::Degenerate.exit_code(), 4);
    }

    #[test]
    fn serialization_round_trips() {
        let doc = CertificateDoc {
            verdict: Verdict::Kkt,
            problem_hash: "abc".into(),
            point: vec![1.0, 0.0],
            active_set: vec![1],
            lambda: vec![1.0, 0.5],
            mu: vec![],
            normalization: Some("leading_one".into()),
            residual: Some(1e-12),
            slackness: vec![0.0],
            cq: CqDoc {
                slater: Some(true),
                rank: None,
                kernel: None,
            },
            note: "n".into(),
            ascent: None,
            generated_at: None,
        };
        let json = doc.to_json();
        assert!(!json.contains("generated_at"));
        let back: CertificateDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdict, Verdict::Kkt);
        assert_eq!(back.lambda, vec![1.0, 0.5]);
    }
}
