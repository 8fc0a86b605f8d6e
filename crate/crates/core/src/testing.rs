//! Seeded random-problem generators for the test batteries.
//!
//! Constraints are built so they hold *exactly* at the candidate: the
//! constant term of each constraint is produced by evaluating the
//! variable part at the candidate and embedding that value as a literal,
//! so the parsed expression reproduces the same floating-point sum and the
//! residual at the candidate is bit-zero.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::norm2;
use crate::lp;
use crate::problem::{load_problem_str, Candidate, Problem, ScalarField};

#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub text: String,
    pub problem: Problem,
    pub candidate: Candidate,
}

/// Coefficient on a 1/64 grid in `[lo, hi]`, never zero.
fn dyadic(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let raw = rng.gen_range(lo..hi);
        let snapped = (raw * 64.0).round() / 64.0;
        if snapped != 0.0 {
            return snapped;
        }
    }
}

fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{}", i)).collect()
}

fn linear_terms(coeffs: &[f64], vars: &[String]) -> String {
    coeffs
        .iter()
        .zip(vars)
        .map(|(c, v)| format!("{:?}*{}", c, v))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Renders `terms - c` where `c` is the value of `terms` at the candidate,
/// evaluated through the same parsed AST the final field will use.
fn anchored_constraint(terms: &str, vars: &[String], point: &[f64], offset: f64) -> String {
    let field = ScalarField::parse(terms, vars).expect("generated terms parse");
    let at_candidate = field.evaluate(point).expect("generated terms evaluate");
    if offset == 0.0 {
        format!("{} - {:?}", terms, at_candidate)
    } else {
        format!("{} - {:?} + {:?}", terms, at_candidate, offset)
    }
}

struct ConstraintDraw {
    source: String,
    gradient: Vec<f64>,
}

/// Draws a linear or quadratic constraint anchored at `point`, with its
/// analytic gradient there, rejecting near-zero gradients.
fn draw_constraint(
    rng: &mut ChaCha8Rng,
    vars: &[String],
    point: &[f64],
    allow_quadratic: bool,
    offset: f64,
) -> ConstraintDraw {
    let n = vars.len();
    loop {
        let linear: Vec<f64> = (0..n).map(|_| dyadic(rng, -2.0, 2.0)).collect();
        let quadratic: Vec<f64> = if allow_quadratic && rng.gen_bool(0.5) {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        dyadic(rng, -1.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        } else {
            vec![0.0; n]
        };
        let mut gradient = vec![0.0; n];
        for i in 0..n {
            gradient[i] = linear[i] + 2.0 * quadratic[i] * point[i];
        }
        if norm2(&gradient) < 0.3 {
            continue;
        }
        let mut parts = vec![linear_terms(&linear, vars)];
        for (i, d) in quadratic.iter().enumerate() {
            if *d != 0.0 {
                parts.push(format!("{:?}*{}^2", d, vars[i]));
            }
        }
        let terms = parts.join(" + ");
        let source = anchored_constraint(&terms, vars, point, offset);
        return ConstraintDraw { source, gradient };
    }
}

fn render_problem(
    kind: &str,
    vars: &[String],
    objective: &str,
    ineq: &[String],
    eq: &[String],
    point: &[f64],
) -> String {
    let mut out = String::new();
    out.push_str("[problem]\n");
    out.push_str(&format!("kind = \"{}\"\n", kind));
    let var_list = vars
        .iter()
        .map(|v| format!("\"{}\"", v))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("vars = [{}]\n", var_list));
    out.push_str(&format!("objective = \"{}\"\n", objective));
    let ineq_list = ineq
        .iter()
        .map(|s| format!("\"{}\"", s))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("ineq = [{}]\n", ineq_list));
    if !eq.is_empty() {
        let eq_list = eq
            .iter()
            .map(|s| format!("\"{}\"", s))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("eq = [{}]\n", eq_list));
    }
    out.push_str("\n[problem.domain]\n");
    for v in vars {
        out.push_str(&format!("{} = \"(-10, 10)\"\n", v));
    }
    out.push_str("\n[candidate]\n");
    let point_list = point
        .iter()
        .map(|x| format!("{:?}", x))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("point = [{}]\n", point_list));
    out
}

fn load(text: String) -> GeneratedProblem {
    let (problem, candidate) = load_problem_str(&text).expect("generated problem loads");
    GeneratedProblem {
        text,
        problem,
        candidate,
    }
}

/// Random problem with only linear objective and constraints; about half
/// are mixed, half inequality-only. The candidate is exactly feasible, with
/// a mix of active and inactive inequality constraints.
pub fn random_linear_problem(seed: u64) -> GeneratedProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6usize);
    let vars = var_names(n);
    let point: Vec<f64> = (0..n).map(|_| dyadic(&mut rng, -1.0, 1.0)).collect();
    let objective_coeffs: Vec<f64> = (0..n).map(|_| dyadic(&mut rng, -2.0, 2.0)).collect();
    let objective = linear_terms(&objective_coeffs, &vars);

    let mixed = rng.gen_bool(0.5);
    let mut eq = Vec::new();
    if mixed {
        let q = rng.gen_range(1..=usize::min(3, n - 1));
        let mut rows: Vec<Vec<f64>> = Vec::new();
        while rows.len() < q {
            let draw = draw_constraint(&mut rng, &vars, &point, false, 0.0);
            let mut trial = rows.clone();
            trial.push(draw.gradient.clone());
            if lp::rank(&trial, lp::RANK_TOL) == trial.len() {
                rows.push(draw.gradient);
                eq.push(draw.source);
            }
        }
    }
    let mut ineq = Vec::new();
    for _ in 0..rng.gen_range(0..=2usize) {
        // active at the candidate
        ineq.push(draw_constraint(&mut rng, &vars, &point, false, 0.0).source);
    }
    for _ in 0..rng.gen_range(0..=2usize) {
        // inactive: value 1 at the candidate
        ineq.push(draw_constraint(&mut rng, &vars, &point, false, 1.0).source);
    }
    let kind = if mixed { "mixed" } else { "inequality" };
    load(render_problem(kind, &vars, &objective, &ineq, &eq, &point))
}

/// Random mixed problem with linear/quadratic constraint mixes
/// (`q <= 3`, `n <= 6`), exactly feasible at the candidate. Used by the
/// non-optimality batteries; callers filter for the no-multiplier branch.
pub fn random_constraint_problem(seed: u64) -> GeneratedProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6usize);
    let vars = var_names(n);
    let point: Vec<f64> = (0..n).map(|_| dyadic(&mut rng, -1.0, 1.0)).collect();
    let objective_coeffs: Vec<f64> = (0..n).map(|_| dyadic(&mut rng, -2.0, 2.0)).collect();
    let objective = linear_terms(&objective_coeffs, &vars);

    let q = rng.gen_range(1..=usize::min(3, n - 1));
    let mut eq = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < q {
        let draw = draw_constraint(&mut rng, &vars, &point, true, 0.0);
        let mut trial = rows.clone();
        trial.push(draw.gradient.clone());
        if lp::rank(&trial, lp::RANK_TOL) == trial.len() {
            rows.push(draw.gradient);
            eq.push(draw.source);
        }
    }
    let mut ineq = Vec::new();
    if rng.gen_bool(0.5) {
        ineq.push(draw_constraint(&mut rng, &vars, &point, true, 0.0).source);
    }
    if rng.gen_bool(0.5) {
        ineq.push(draw_constraint(&mut rng, &vars, &point, true, 1.0).source);
    }
    load(render_problem(
        "mixed", &vars, &objective, &ineq, &eq, &point,
    ))
}
