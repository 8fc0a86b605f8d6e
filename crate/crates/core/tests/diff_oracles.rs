//! Analytic-gradient oracle for the differentiation module: closed-form
//! gradients of a C1 field catalog, compared against the estimator at
//! random interior points.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mrules_core::diff::{self, DiffConfig};
use mrules_core::problem::{DomainBox, ScalarField};

type Gradient = Box<dyn Fn(&[f64]) -> Vec<f64>>;

fn catalog() -> Vec<(&'static str, usize, Gradient)> {
    vec![
        (
            "x1^2 + x2^2",
            2,
            Box::new(|x: &[f64]| vec![2.0 * x[0], 2.0 * x[1]]),
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
            "x1^3 - 2*x1*x2 + x2^2",
            2,
            Box::new(|x: &[f64]| vec![3.0 * x[0] * x[0] - 2.0 * x[1], -2.0 * x[0] + 2.0 * x[1]]),
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
        (
            "x1*x2*x3",
            3,
            Box::new(|x: &[f64]| vec![x[1] * x[2], x[0] * x[2], x[0] * x[1]]),
        ),
    ]
}

#[test]
fn gradients_match_analytic_oracle_at_random_points() {
    let cfg = DiffConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xca7a109);
    for (src, arity, analytic) in catalog() {
        let vars: Vec<String> = (1..=arity).map(|i| format!("x{}", i)).collect();
        let field = ScalarField::parse(src, &vars).unwrap();
        let domain = DomainBox::unbounded(arity);
        for _ in 0..100 {
            let x: Vec<f64> = (0..arity).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let estimated = diff::gateaux_gradient(&field, &domain, &x, &cfg).unwrap();
            let expected = analytic(&x);
            let err = estimated
                .iter()
                .zip(&expected)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(
                err <= 1e-6,
                "field `{}` at {:?}: estimated {:?}, analytic {:?} (err {})",
                src,
                x,
                estimated,
                expected,
                err
            );
        }
    }
}

#[test]
fn classify_is_hadamard_consistent_across_the_c1_catalog() {
    let cfg = DiffConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ff1ce);
    for (src, arity, _) in catalog() {
        let vars: Vec<String> = (1..=arity).map(|i| format!("x{}", i)).collect();
        let field = ScalarField::parse(src, &vars).unwrap();
        let domain = DomainBox::unbounded(arity);
        let x: Vec<f64> = (0..arity).map(|_| rng.gen_range(-0.9..0.9)).collect();
        let verdict = diff::classify(&field, &domain, &x, &cfg).unwrap();
        assert_eq!(
            verdict.strength(),
            3,
            "field `{}` at {:?} classified as {}",
            src,
            x,
            verdict.name()
        );
    }
}
