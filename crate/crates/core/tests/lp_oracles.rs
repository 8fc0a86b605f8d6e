//! Independent oracles for the LP kernel: weak duality against random
//! feasible points, a one-sided Jacobi SVD as a rank oracle, and residual
//! re-checks of reported feasible points.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mrules_core::linalg::dot;
use mrules_core::lp::{self, Feasibility, LpOutcome, LpProblem, VarBound};

/// Rank by one-sided Jacobi orthogonalization of the columns. Independent of
/// the Gaussian-elimination path in the library.
#[allow(clippy::needless_range_loop)] // the rotation touches two columns at once
fn svd_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = rows.len();
    let n = rows[0].len();
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| rows[i][j]).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let app = dot(&cols[p], &cols[p]);
                let aqq = dot(&cols[q], &cols[q]);
                let apq = dot(&cols[p], &cols[q]);
                if apq.abs() <= 1e-14 * (app * aqq).sqrt().max(1e-300) {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (vp, vq) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigmas: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let smax = sigmas.iter().fold(0.0f64, |a, b| a.max(*b));
    if smax == 0.0 {
        return 0;
    }
    sigmas.iter().filter(|s| **s > rel_tol * smax).count()
}

#[test]
fn rank_matches_svd_oracle_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..200 {
        let m = rng.gen_range(1..=6usize);
        let n = rng.gen_range(1..=6usize);
        // exact low-rank product of small-integer factors so both rank
        // definitions agree far from any threshold
        let r = rng.gen_range(0..=m.min(n));
        let left: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..r).map(|_| rng.gen_range(-3..=3i32) as f64).collect())
            .collect();
        let right: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..n).map(|_| rng.gen_range(-3..=3i32) as f64).collect())
            .collect();
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..n)
                    .map(|j| (0..r).map(|k| left[i][k] * right[k][j]).sum())
                    .collect()
            })
            .collect();
        let ours = lp::rank(&rows, lp::RANK_TOL);
        let oracle = svd_rank(&rows, 1e-9);
        assert_eq!(
            ours, oracle,
            "trial {}: rank mismatch on {:?} (ours {}, svd {})",
            trial, rows, ours, oracle
        );
    }
}

#[test]
fn rank_agrees_with_determinant_on_small_full_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdead);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3usize);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-2..=2i32) as f64).collect())
            .collect();
        let det = match n {
            1 => rows[0][0],
            2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
            _ => {
                rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
                    - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
                    + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
            }
        };
        let full = lp::rank(&rows, lp::RANK_TOL) == n;
        assert_eq!(
            full,
            det != 0.0,
            "determinant oracle disagrees on {:?}",
            rows
        );
    }
}

fn random_box_lp(rng: &mut ChaCha8Rng) -> (LpProblem, Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.gen_range(1..=4usize);
    let k = rng.gen_range(1..=4usize);
    let interior: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut a_ge: Vec<Vec<f64>> = Vec::new();
    let mut b_ge: Vec<f64> = Vec::new();
    let mut cut_rows: Vec<Vec<f64>> = Vec::new();
    let mut cut_rhs: Vec<f64> = Vec::new();
    for _ in 0..k {
        let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let slack = rng.gen_range(0.1..1.0);
        let rhs = dot(&row, &interior) + slack;
        // row . x <= rhs
        a_ge.push(row.iter().map(|v| -v).collect());
        b_ge.push(-rhs);
        cut_rows.push(row);
        cut_rhs.push(rhs);
    }
    // box 0 <= x <= 1
    for i in 0..n {
        let mut upper = vec![0.0; n];
        upper[i] = -1.0;
        a_ge.push(upper);
        b_ge.push(-1.0);
    }
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (
        LpProblem {
            objective,
            a_eq: vec![],
            b_eq: vec![],
            a_ge,
            b_ge,
            bounds: vec![VarBound::NonNegative; n],
        },
        cut_rows,
        cut_rhs,
    )
}

#[test]
fn weak_duality_against_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0c5);
    for trial in 0..30 {
        let (problem, cut_rows, cut_rhs) = random_box_lp(&mut rng);
        let n = problem.objective.len();
        let LpOutcome::Optimal { x, value } = lp::solve_lp(&problem).unwrap() else {
            panic!("trial {}: constructed LP must be solvable", trial);
        };
        assert!(lp::residual(&problem, &x) <= 1e-9);
        let mut found = 0;
        let mut attempts = 0;
        while found < 1000 && attempts < 200_000 {
            attempts += 1;
            let candidate: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let feasible = cut_rows
                .iter()
                .zip(&cut_rhs)
                .all(|(row, rhs)| dot(row, &candidate) <= *rhs);
            if !feasible {
                continue;
            }
            found += 1;
            let objective = dot(&problem.objective, &candidate);
            assert!(
                objective <= value + 1e-7,
                "trial {}: feasible point beats the reported optimum ({} > {})",
                trial,
                objective,
                value
            );
        }
        assert!(
            found >= 500,
            "trial {}: sampler starved ({} points)",
            trial,
            found
        );
    }
}

#[test]
fn feasible_points_pass_independent_residual_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let mut feasible_seen = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4usize);
        let rows = rng.gen_range(1..=3usize);
        let a_eq: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let b_eq: Vec<f64> = (0..rows).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let bounds = vec![VarBound::NonNegative; n];
        if let Feasibility::Feasible(x) =
            lp::feasible_point(&a_eq, &b_eq, &[], &[], &bounds).unwrap()
        {
            feasible_seen += 1;
            for (row, rhs) in a_eq.iter().zip(&b_eq) {
                assert!(
                    (dot(row, &x) - rhs).abs() <= 1e-9,
                    "equality residual too large at {:?}",
                    x
                );
            }
            assert!(x.iter().all(|v| *v >= -1e-9));
        }
    }
    assert!(
        feasible_seen > 20,
        "generator produced too few feasible systems"
    );
}
