//! Exact integer feasibility for reverse-convex constraints.
//!
//! This crate decides whether a rational polytope still contains an integer
//! point after the interiors of finitely many convex sets (balls, convex
//! quadratics, H-polyhedra and their intersections) have been removed.  All
//! arithmetic is exact over `BigRational`; no floating point enters any
//! decision.
//!
//! ## Module map
//!
//! * [`linalg`] — rational scalars, vectors, matrices, exact linear solves,
//!   an LDLᵀ positive-semidefiniteness check, and rational square-root bounds.
//! * [`lp`] — a two-phase primal simplex with Bland's rule, plus a strict
//!   interior-point test for H-polyhedra.
//! * [`polyhedron`] — the `HPolyhedron` type, vertex enumeration, and exact
//!   quadratic minimization over a polytope via active-set KKT solves.
//! * [`convex`] — the convex set model: exact membership, separation
//!   oracles, and certified coordinate intervals for lattice enumeration.
//! * [`arrangement`] — maximal-cell enumeration for rational hyperplane
//!   arrangements by incremental cell splitting.
//! * [`integer_hull`] — lattice-point enumeration, integer-hull vertices, and
//!   the reverse-convex feasibility oracle built on the vertex property.
//! * [`int_feasibility`] — integer feasibility and optimization over a single
//!   convex set by coordinate branch-and-bound, and the brute-force reference
//!   oracle for whole instances.
//! * [`separation`] — weak separation of integer hulls by cut-generating
//!   master LPs, plus closed-form continuous separation for ball and
//!   polyhedron pairs.
//! * [`bhc`] — boundary hyperplane covers: radical hyperplanes for ball
//!   families, convexity-constrained quadratic forms, and cover verification.
//! * [`decompose`] — the decomposition pipeline that turns a covered family
//!   of removed sets into pieces whose removed part is certified convex.
//! * [`instance`] — the JSON instance model shared by the solver and the
//!   command-line tools.
//! * [`solver`] — the end-to-end feasibility pipeline and verdict model.
//! * [`gen`] — seeded random instance generation for testing and the CLI.

pub mod arrangement;
pub mod bhc;
pub mod convex;
pub mod decompose;
pub mod gen;
pub mod instance;
pub mod int_feasibility;
pub mod integer_hull;
pub mod linalg;
pub mod lp;
pub mod polyhedron;
pub mod separation;
pub mod solver;

pub use convex::ConvexSet;
pub use instance::Instance;
pub use linalg::{Rational, RationalMatrix, RationalVector};
pub use polyhedron::HPolyhedron;
pub use solver::{solve, solve_subdivision, SolveOptions, Stats, Status, Verdict};

use thiserror::Error;

/// How a removed convex set excludes lattice points.
///
/// `Interior` removes only the open interior (boundary lattice points stay
/// feasible); `Closed` removes the whole closed set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Removal {
    Interior,
    Closed,
}

/// Crate-wide error type.
///
/// `Refusal` marks inputs the solver declines on principle (unsupported set
/// classes, missing covers, guard overruns); callers map it to a dedicated
/// exit code so a refusal is never confused with an infeasibility verdict.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("refusal: {0}")]
    Refusal(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("separation failure: {0}")]
    SeparationFailure(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("malformed instance: {0}")]
    Json(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
