//! Solver for the clamped fourth-order boundary value problem
//!
//! ```text
//! u''''(x) = f(x, u, u', u'', u'''),   0 < x < 1,
//! u(0) = u(1) = u'(0) = u'(1) = 0,
//! ```
//!
//! and its general Dirichlet form on `[a, b]`. The problem is recast as a
//! fixed-point equation for the triplet `(φ, α, β)` where `φ = f(·, u, …)`
//! and `α = u''(0)`, `β = u''(1)`. Each iteration solves two second-order
//! problems with a fourth-order compact scheme, recovers `u'` and `u'''` by
//! five-point differentiation and updates `α, β` from two weighted
//! integrals of `φ`.
//!
//! Modules:
//! - [`kernels`]: Green kernels and their integral bounds.
//! - [`numerics`]: grids, Simpson quadrature, differentiation, the compact scheme.
//! - [`expr`]: the right-hand-side expression language.
//! - [`problem`]: problem files, boundary homogenization, interval rescaling.
//! - [`solver`]: the fixed-point iteration.
//! - [`analysis`]: existence/uniqueness conditions and error envelopes.
//! - [`catalog`]: the built-in example problems.

pub mod analysis;
pub mod catalog;
pub mod expr;
pub mod kernels;
pub mod numerics;
pub mod problem;
pub mod solver;

pub use analysis::{check_conditions, ConditionReport, DomainBox, Lattice};
pub use expr::{Expr, Point, Var};
pub use numerics::{Grid, GridFunction};
pub use problem::{CanonicalProblem, ProblemFile, RawProblem};
pub use solver::{solve, RightHandSide, SolveReport, SolverConfig, Triplet};
