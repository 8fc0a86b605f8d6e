//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Run with
//!
//! ```text
//! cargo test -p mrules-cli --test acceptance -- --nocapture
//! ```
//!
//! Tolerances are pinned here and nowhere else looser:
//!
//! 1. catalog multipliers match hand-derived values within 1e-6, < 1s each
//! 2. Gordan dichotomy on 500 random gradient matrices, zero exceptions
//! 3. every multiplier certificate re-verifies independently
//! 4. 50 non-stationary candidates yield improving points, |h| <= 1e-8,
//!    <= 500 damped iterations, <= 20 step backtracks
//! 5. affine equalities: fixed point in exactly 1 iteration, |h| <= 1e-12
//! 6. gradient agreement 1e-6 on the C1 catalog; the parabola indicator
//!    refutes the sequence limit with witness h_k = (1, t_k); the norm at
//!    the origin is directional-but-not-linear
//! 7. constraint qualifications force the KKT normalization; the dependent
//!    fixture is DEGENERATE
//! 8. byte-identical certificates across 3 runs under a fixed seed

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use mrules_core::ascent::{self, RestoreConfig, Witness};
use mrules_core::certificate::Verdict;
use mrules_core::diff::{self, DiffConfig, DiffVerdict};
use mrules_core::multipliers::{
    self, cq_positive_direction, supporting_hyperplane, EngineConfig, FritzJohnOutcome,
    MultiplierCertificate,
};
use mrules_core::pipeline::{check_problem, RunConfig};
use mrules_core::problem::{load_problem, Builtin, Candidate, DomainBox, Problem, ScalarField};
use mrules_core::testing::{random_constraint_problem, random_linear_problem};

fn catalog_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../catalog")
        .canonicalize()
        .expect("catalog directory exists")
}

fn catalog_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(catalog_dir())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    files.sort();
    files
}

#[derive(Debug, Deserialize)]
struct Expected {
    verdict: String,
    #[serde(default)]
    lambda: Option<Vec<f64>>,
    #[serde(default)]
    mu: Option<Vec<f64>>,
}

fn expected_for(file: &Path) -> Expected {
    let text = std::fs::read_to_string(file.with_extension("expected")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn fritz_john(
    problem: &Problem,
    candidate: &Candidate,
    engine: &EngineConfig,
) -> multipliers::Analysis {
    match problem {
        Problem::Inequality(p) => multipliers::fritz_john_inequality(p, candidate, engine),
        Problem::Mixed(p) => multipliers::fritz_john_mixed(p, candidate, engine),
    }
    .expect("analysis runs")
}

#[test]
fn criterion_1_catalog_multipliers_within_1e6() {
    let cfg = RunConfig::default();
    let mut checked = 0;
    for file in catalog_files() {
        let expected = expected_for(&file);
        let (problem, candidate) = load_problem(&file).unwrap();
        let started = Instant::now();
        let doc = check_problem(&problem, &candidate, &cfg).unwrap();
        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "{}: took {:?}",
            file.display(),
            elapsed
        );
        assert_eq!(doc.verdict.name(), expected.verdict, "{}", file.display());
        let mut has_multipliers = false;
        if let Some(lambda) = &expected.lambda {
            has_multipliers = true;
            assert_eq!(lambda.len(), doc.lambda.len(), "{}", file.display());
            for (e, g) in lambda.iter().zip(&doc.lambda) {
                assert!(
                    (e - g).abs() <= 1e-6,
                    "{}: lambda expected {:?}, got {:?}",
                    file.display(),
                    lambda,
                    doc.lambda
                );
            }
        }
        if let Some(mu) = &expected.mu {
            for (e, g) in mu.iter().zip(&doc.mu) {
                assert!(
                    (e - g).abs() <= 1e-6,
                    "{}: mu expected {:?}, got {:?}",
                    file.display(),
                    mu,
                    doc.mu
                );
            }
        }
        if has_multipliers {
            checked += 1;
        }
    }
    assert!(
        checked >= 12,
        "catalog must carry at least 12 problems with derivable multipliers, found {}",
        checked
    );
    println!(
        "[PASS] criterion 1: {} catalog problems with hand-derived multipliers match within 1e-6 in under 1s each",
        checked
    );
}

#[test]
fn criterion_2_gordan_dichotomy_500_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let mut hyperplanes = 0;
    let mut directions = 0;
    for trial in 0..500 {
        let k = rng.gen_range(1..=6usize);
        let n = rng.gen_range(1..=8usize);
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let hyperplane = supporting_hyperplane(&rows, &vec![true; k]).unwrap();
        let direction = cq_positive_direction(&rows, n).unwrap();
        match (hyperplane.is_some(), direction.is_some()) {
            (true, false) => hyperplanes += 1,
            (false, true) => directions += 1,
            (both, neither) => panic!(
                "trial {}: dichotomy broken (hyperplane={}, direction={}) on {:?}",
                trial, both, neither, rows
            ),
        }
    }
    println!(
        "[PASS] criterion 2: 500/500 random gradient matrices split cleanly ({} multiplier sides, {} improving sides)",
        hyperplanes, directions
    );
}

#[test]
fn criterion_3_certificates_reverify_independently() {
    let engine = EngineConfig::default();
    let mut verified = 0;
    let mut audit = |problem: &Problem, candidate: &Candidate, cert: &MultiplierCertificate| {
        let report = multipliers::verify_certificate(problem, candidate, cert, &engine)
            .expect("verification runs");
        assert!(
            report.ok(),
            "certificate failed independent re-verification: {:?}",
            report
        );
        verified += 1;
    };
    for file in catalog_files() {
        let (problem, candidate) = load_problem(&file).unwrap();
        let analysis = fritz_john(&problem, &candidate, &engine);
        if let FritzJohnOutcome::Certificate(cert) = &analysis.outcome {
            audit(&problem, &candidate, cert);
            if cert.lambda0() > engine.stat_tol {
                let kkt = multipliers::normalize_kkt(cert, engine.stat_tol).unwrap();
                audit(&problem, &candidate, &kkt);
            }
        }
    }
    for seed in 1000..1100u64 {
        let generated = random_linear_problem(seed);
        let analysis = fritz_john(&generated.problem, &generated.candidate, &engine);
        if let FritzJohnOutcome::Certificate(cert) = &analysis.outcome {
            audit(&generated.problem, &generated.candidate, cert);
        }
    }
    assert!(verified >= 30, "battery too small: {}", verified);
    println!(
        "[PASS] criterion 3: {}/{} emitted certificates passed nontriviality, exact slackness, and 1e-7 stationarity with re-estimated gradients",
        verified, verified
    );
}

#[test]
fn criterion_4_fifty_nonstationary_candidates_certify() {
    let engine = EngineConfig::default();
    let restore = RestoreConfig::default();
    let mut certified = 0;
    let mut seed = 0u64;
    while certified < 50 {
        seed += 1;
        assert!(
            seed < 400,
            "generator starved at {} certificates",
            certified
        );
        let generated = random_constraint_problem(seed);
        let analysis = fritz_john(&generated.problem, &generated.candidate, &engine);
        let FritzJohnOutcome::NoMultipliers(witness) = &analysis.outcome else {
            continue;
        };
        let cert =
            ascent::certify_nonoptimal(&generated.problem, &generated.candidate, witness, &restore)
                .unwrap_or_else(|e| panic!("seed {}: {}\n{}", seed, e, generated.text));
        assert!(cert.objective_gain > 0.0, "seed {}", seed);
        for r in &cert.equality_residuals {
            assert!(*r <= 1e-8, "seed {}: equality residual {}", seed, r);
        }
        assert!(
            cert.fixed_point_iterations <= 500,
            "seed {}: {} iterations",
            seed,
            cert.fixed_point_iterations
        );
        assert!(
            cert.backtracks <= 20,
            "seed {}: {} backtracks",
            seed,
            cert.backtracks
        );
        assert!(
            ascent::validate_certificate(
                &generated.problem,
                &generated.candidate,
                &cert,
                restore.restore_tol
            )
            .unwrap(),
            "seed {}",
            seed
        );
        certified += 1;
    }
    println!(
        "[PASS] criterion 4: 50/50 feasible non-stationary candidates produced strict-gain points with |h| <= 1e-8 within the iteration budgets"
    );
}

#[test]
fn criterion_5_affine_equalities_settle_in_one_iteration() {
    let engine = EngineConfig::default();
    let restore = RestoreConfig::default();
    let mut cases = 0;
    // the shipped affine fixture plus the random affine battery
    let (problem, candidate) = load_problem(&catalog_dir().join("affine_eq_notopt.toml")).unwrap();
    let run_case = |problem: &Problem, candidate: &Candidate, label: String| {
        let analysis = fritz_john(problem, candidate, &engine);
        let FritzJohnOutcome::NoMultipliers(witness) = &analysis.outcome else {
            return false;
        };
        if !matches!(witness, Witness::Mixed { .. }) {
            return false;
        }
        let cert = ascent::certify_nonoptimal(problem, candidate, witness, &restore)
            .unwrap_or_else(|e| panic!("{}: {}", label, e));
        assert_eq!(
            cert.fixed_point_iterations, 1,
            "{}: affine fixed point must settle in exactly one iteration",
            label
        );
        for r in &cert.equality_residuals {
            assert!(*r <= 1e-12, "{}: restored residual {}", label, r);
        }
        true
    };
    assert!(run_case(&problem, &candidate, "affine_eq_notopt".into()));
    cases += 1;
    for seed in 2000..2060u64 {
        let generated = random_linear_problem(seed);
        if !matches!(generated.problem, Problem::Mixed(_)) {
            continue;
        }
        if run_case(
            &generated.problem,
            &generated.candidate,
            format!("seed {}", seed),
        ) {
            cases += 1;
        }
    }
    assert!(cases >= 10, "affine battery too small: {}", cases);
    println!(
        "[PASS] criterion 5: {} affine-equality restorations settled in exactly 1 iteration with residuals <= 1e-12",
        cases
    );
}

type Gradient = Box<dyn Fn(&[f64]) -> Vec<f64>>;

fn c1_catalog() -> Vec<(&'static str, usize, Gradient)> {
    vec![
        (
            "x1^2 + x2^2",
            2,
            Box::new(|x: &[f64]| vec![2.0 * x[0], 2.0 * x[1]]) as Gradient,
        ),
        ("x1 + 2*x2", 2, Box::new(|_: &[f64]| vec![1.0, 2.0])),
        ("x1*x2", 2, Box::new(|x: &[f64]| vec![x[1], x[0]])),
        (
            "exp(x1)*sin(x2)",
            2,
            Box::new(|x: &[f64]| vec![x[0].exp() * x[1].sin(), x[0].exp() * x[1].cos()]),
        ),
        (
            "cos(x1*x2)",
            2,
            Box::new(|x: &[f64]| {
                let s = -(x[0] * x[1]).sin();
                vec![s * x[1], s * x[0]]
            }),
        ),
        (
            "log(2 + x1^2 + x2^2)",
            2,
            Box::new(|x: &[f64]| {
                let d = 2.0 + x[0] * x[0] + x[1] * x[1];
                vec![2.0 * x[0] / d, 2.0 * x[1] / d]
            }),
        ),
        (
            "x1 / (1 + x2^2)",
            2,
            Box::new(|x: &[f64]| {
                let d = 1.0 + x[1] * x[1];
                vec![1.0 / d, -2.0 * x[0] * x[1] / (d * d)]
            }),
        ),
        (
            "sqrt(1 + x1^2 + x2^2)",
            2,
            Box::new(|x: &[f64]| {
                let d = (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt();
                vec![x[0] / d, x[1] / d]
            }),
        ),
    ]
}

#[test]
fn criterion_6_differentiability_diagnostics() {
    let cfg = DiffConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a6);
    let mut points = 0;
    for (src, arity, analytic) in c1_catalog() {
        let vars: Vec<String> = (1..=arity).map(|i| format!("x{}", i)).collect();
        let field = ScalarField::parse(src, &vars).unwrap();
        let domain = DomainBox::unbounded(arity);
        for _ in 0..100 {
            let x: Vec<f64> = (0..arity).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let estimated = diff::gateaux_gradient(&field, &domain, &x, &cfg).unwrap();
            let expected = analytic(&x);
            for (e, g) in estimated.iter().zip(&expected) {
                assert!(
                    (e - g).abs() <= 1e-6,
                    "field `{}` at {:?}: {} vs {}",
                    src,
                    x,
                    e,
                    g
                );
            }
            points += 1;
        }
    }

    // the parabola indicator: Gateaux passes, the sequence h_k = (1, t_k)
    // refutes the uniform limit
    let parabola = ScalarField::from_builtin(Builtin::ParabolaIndicator, 2).unwrap();
    let domain = DomainBox::unbounded(2);
    let verdict = diff::classify(&parabola, &domain, &[0.0, 0.0], &cfg).unwrap();
    let DiffVerdict::Gateaux {
        gradient,
        violation,
    } = &verdict
    else {
        panic!(
            "parabola indicator must classify as Gateaux, got {}",
            verdict.name()
        );
    };
    assert_eq!(gradient, &vec![0.0, 0.0]);
    assert_eq!(violation.base_direction, vec![1.0, 0.0]);
    assert_eq!(violation.perturbation, vec![0.0, 1.0]);
    for (k, t) in violation.steps.iter().enumerate() {
        assert_eq!(violation.perturbed_direction(k), vec![1.0, *t]);
    }

    // the euclidean norm at the origin: directional but not linear
    let norm = ScalarField::from_builtin(Builtin::EuclideanNorm, 2).unwrap();
    let verdict = diff::classify(&norm, &domain, &[0.0, 0.0], &cfg).unwrap();
    assert!(
        matches!(verdict, DiffVerdict::DirectionalNotLinear { .. }),
        "norm at origin classified as {}",
        verdict.name()
    );

    println!(
        "[PASS] criterion 6: gradients agree within 1e-6 at {} random points; parabola witness h_k = (1, t_k); norm at 0 is DirectionalNotLinear",
        points
    );
}

#[test]
fn criterion_7_constraint_qualifications_force_kkt() {
    let cfg = RunConfig::default();
    let mut kkt_backed = 0;
    for file in catalog_files() {
        let (problem, candidate) = load_problem(&file).unwrap();
        let doc = check_problem(&problem, &candidate, &cfg).unwrap();
        let cq_passes = match (&doc.cq.slater, &doc.cq.rank, &doc.cq.kernel) {
            (Some(slater), None, None) => *slater,
            (None, Some(rank), Some(kernel)) => *rank == problem.equalities().len() && *kernel,
            _ => false,
        };
        if cq_passes && doc.verdict != Verdict::NotOptimal {
            assert_eq!(
                doc.verdict,
                Verdict::Kkt,
                "{}: CQ passed but normalization did not happen",
                file.display()
            );
            assert_eq!(doc.lambda[0], 1.0, "{}", file.display());
            kkt_backed += 1;
        }
    }
    assert!(kkt_backed >= 12, "only {} KKT-backed problems", kkt_backed);

    let (problem, candidate) =
        load_problem(&catalog_dir().join("dependent_equalities.toml")).unwrap();
    let doc = check_problem(&problem, &candidate, &cfg).unwrap();
    assert_eq!(doc.verdict, Verdict::Degenerate);

    println!(
        "[PASS] criterion 7: {} catalog problems with verified qualifications normalized to lambda_0 = 1; the dependent-equalities fixture is DEGENERATE",
        kkt_backed
    );
}

#[test]
fn criterion_8_certificates_are_deterministic() {
    let catalog = catalog_dir();
    for file in [
        "circle_ineq_kkt.toml",
        "circle_eq_notopt.toml",
        "dependent_equalities.toml",
    ] {
        let path = catalog.join(file);
        let mut outputs: Vec<Vec<u8>> = Vec::new();
        for _ in 0..3 {
            let out = Command::new(env!("CARGO_BIN_EXE_mrules"))
                .args(["check", path.to_str().unwrap()])
                .env("MRULES_SEED", "31415")
                .env_remove("MRULES_TIMESTAMP")
                .output()
                .expect("binary runs");
            outputs.push(out.stdout);
        }
        assert!(!outputs[0].is_empty(), "{}: no certificate printed", file);
        assert_eq!(outputs[0], outputs[1], "{}: run 1 vs 2 differ", file);
        assert_eq!(outputs[1], outputs[2], "{}: run 2 vs 3 differ", file);
    }
    println!(
        "[PASS] criterion 8: three repeated runs with MRULES_SEED fixed produced byte-identical certificates on three catalog problems"
    );
}
