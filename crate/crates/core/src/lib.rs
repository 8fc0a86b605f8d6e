// negated comparisons are deliberate where NaN must fail the check; index
// loops extract matrix columns
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

//! Certificate engine for first-order necessary optimality conditions.
//!
//! Given a candidate point for a smooth (or not-so-smooth) constrained
//! maximization problem, the engine either produces a Fritz John / KKT
//! multiplier certificate or, when no multipliers exist, constructs a
//! strictly improving feasible point that refutes optimality of the
//! candidate. Constraint qualifications (positive direction, linear
//! independence, kernel direction) are checked alongside so the KKT
//! normalization `lambda_0 = 1` is only claimed when it is justified.
//!
//! The crate is organized as:
//!
//! * [`expr`] — expression parser and evaluator for objective/constraint text
//! * [`problem`] — problem model, domain boxes, and the problem-file loader
//! * [`diff`] — one-sided directional derivatives, Gateaux gradients with a
//!   linearity audit, and a Hadamard consistency probe
//! * [`lp`] — self-contained dense two-phase simplex and rank kernel
//! * [`multipliers`] — active sets, the supporting-hyperplane LP, multiplier
//!   certificates, and constraint-qualification checks
//! * [`ascent`] — improving directions and the simplex fixed-point
//!   restoration that produces non-optimality certificates
//! * [`certificate`] — the JSON certificate documents emitted by the tool
//! * [`pipeline`] — end-to-end analysis used by the `mrules` CLI

pub mod ascent;
pub mod certificate;
pub mod diff;
pub mod expr;
pub mod linalg;
pub mod lp;
pub mod multipliers;
pub mod pipeline;
pub mod problem;
pub mod testing;
