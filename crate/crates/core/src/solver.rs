//! Fixed-point iteration for the triplet `ω = (φ, α, β)`.
//!
//! Starting from `φ₀ = f(x, 0, 0, 0, 0)`, `α₀ = β₀ = 0`, each step solves
//!
//! ```text
//! v'' = φ_k,  v(0) = α_k, v(1) = β_k
//! u'' = v,    u(0) = u(1) = 0
//! ```
//!
//! differentiates to get `y = u'`, `z = v'`, and updates
//!
//! ```text
//! φ_{k+1} = f(x, u, y, v, z)
//! α_{k+1} = 3 ∫ H0 φ_{k+1} - β_k / 2
//! β_{k+1} = 3 ∫ H1 φ_{k+1} - α_{k+1} / 2
//! ```
//!
//! The β update uses the fresh `α_{k+1}`. Iteration stops once
//! `e(k) = ‖u_k - u_{k-1}‖∞` drops to the tolerance.

use thiserror::Error;

use crate::expr::{EvalError, Expr, Point};
use crate::kernels;
use crate::numerics::{diff5, simpson, solve_second_order_bvp, Grid, GridError, GridFunction};
use crate::problem::CanonicalProblem;

/// A pure right-hand side `f(x, u, y, v, z)`.
pub trait RightHandSide: Sync {
    fn eval(&self, p: &Point) -> Result<f64, EvalError>;
}

impl RightHandSide for Expr {
    fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        Expr::eval(self, p)
    }
}

impl RightHandSide for CanonicalProblem {
    fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        self.rhs().eval(p)
    }
}

/// Adapter for plain closures.
pub struct FnRhs<F>(pub F);

impl<F> RightHandSide for FnRhs<F>
where
    F: Fn(&Point) -> f64 + Sync,
{
    fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        Ok((self.0)(p))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("right-hand side failed at node {node} (x = {x}): {source}")]
    Rhs {
        node: usize,
        x: f64,
        source: EvalError,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    pub phi: GridFunction,
    pub alpha: f64,
    pub beta: f64,
}

impl Triplet {
    /// `‖φ‖∞ + |α| + |β|`.
    pub fn norm(&self) -> f64 {
        self.phi.sup_norm() + self.alpha.abs() + self.beta.abs()
    }

    pub fn distance(&self, other: &Triplet) -> Result<f64, GridError> {
        Ok(self.phi.distance(&other.phi)?
            + (self.alpha - other.alpha).abs()
            + (self.beta - other.beta).abs())
    }
}

/// `u, u', u'', u'''` of one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateProfile {
    pub u: GridFunction,
    pub y: GridFunction,
    pub v: GridFunction,
    pub z: GridFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Grid intervals; even and at least 8.
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Number of consecutive increases of `e(k)` that counts as divergence.
    pub divergence_window: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 100,
            tol: 1e-15,
            max_iter: 200,
            divergence_window: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    /// Number of performed iterations `K`.
    pub iterations: usize,
    /// `e(1..=K)`.
    pub e_history: Vec<f64>,
    /// `eu(1..=K)`, present when an exact solution was supplied.
    pub eu_history: Option<Vec<f64>>,
    /// `‖ω₁ - ω₀‖`, the quantity the a-priori envelope scales with.
    pub first_step: f64,
    /// Profile of the last iterate `u_K`.
    pub profile: IterateProfile,
    /// The triplet `ω_K` that produced `profile`.
    pub triplet: Triplet,
    /// [`residual`] of `triplet`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("iteration diverged: e(k) grew for {window} consecutive steps (last e = {last:e})")]
    Diverged {
        window: usize,
        last: f64,
        report: Box<SolveReport>,
    },
    #[error("no convergence after {iterations} iterations (last e = {last:e})")]
    MaxIterations {
        iterations: usize,
        last: f64,
        report: Box<SolveReport>,
    },
    #[error(transparent)]
    Step(#[from] StepError),
}

impl SolveError {
    /// The partial report of a run that stopped without converging.
    pub fn report(&self) -> Option<&SolveReport> {
        match self {
            SolveError::Diverged { report, .. } | SolveError::MaxIterations { report, .. } => {
                Some(report)
            }
            _ => None,
        }
    }
}

/// `(∫ H0 φ, ∫ H1 φ)` by Simpson's rule on the node-wise products.
fn weighted_integrals(phi: &GridFunction) -> Result<(f64, f64), GridError> {
    let grid = phi.grid();
    let h0 = grid.sample(|t| kernels::h0(t).expect("grid nodes lie in [0, 1]"))?;
    let h1 = grid.sample(|t| kernels::h1(t).expect("grid nodes lie in [0, 1]"))?;
    Ok((simpson(&phi.mul(&h0)?), simpson(&phi.mul(&h1)?)))
}

/// `φ₀ = f(x, 0, 0, 0, 0)`, `α₀ = β₀ = 0`.
pub fn init_state<F: RightHandSide + ?Sized>(f: &F, grid: Grid) -> Result<Triplet, StepError> {
    let zero = grid.zeros();
    let phi = sample_rhs(
        f,
        &IterateProfile {
            u: zero.clone(),
            y: zero.clone(),
            v: zero.clone(),
            z: zero,
        },
    )?;
    Ok(Triplet {
        phi,
        alpha: 0.0,
        beta: 0.0,
    })
}

/// `u, u', u'', u'''` generated by a triplet.
pub fn profile(state: &Triplet) -> IterateProfile {
    let v = solve_second_order_bvp(&state.phi, state.alpha, state.beta);
    let u = solve_second_order_bvp(&v, 0.0, 0.0);
    let y = diff5(&u);
    let z = diff5(&v);
    IterateProfile { u, y, v, z }
}

fn sample_rhs<F: RightHandSide + ?Sized>(
    f: &F,
    p: &IterateProfile,
) -> Result<GridFunction, StepError> {
    let grid = p.u.grid();
    let values = grid
        .nodes()
        .enumerate()
        .map(|(i, x)| {
            f.eval(&Point::new(x, p.u[i], p.y[i], p.v[i], p.z[i]))
                .map_err(|source| StepError::Rhs { node: i, x, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GridFunction::new(grid, values)?)
}

/// One application of the iteration: returns `ω_{k+1}` and the profile of
/// `ω_k`.
pub fn step<F: RightHandSide + ?Sized>(
    state: &Triplet,
    f: &F,
) -> Result<(Triplet, IterateProfile), StepError> {
    let prof = profile(state);
    for g in [&prof.u, &prof.y, &prof.v, &prof.z] {
        g.ensure_finite()?;
    }
    let phi = sample_rhs(f, &prof)?;
    let (i0, i1) = weighted_integrals(&phi)?;
    let alpha = 3.0 * i0 - state.beta / 2.0;
    let beta = 3.0 * i1 - alpha / 2.0;
    Ok((Triplet { phi, alpha, beta }, prof))
}

/// Residual of the reduced system
///
/// ```text
/// φ = f(x, u_ω, y_ω, v_ω, z_ω),   ∫H0 φ = β/6 + α/3,   ∫H1 φ = β/3 + α/6
/// ```
///
/// as `‖φ - f(…)‖∞ + |∫H0 φ - β/6 - α/3| + |∫H1 φ - β/3 - α/6|`.
pub fn residual<F: RightHandSide + ?Sized>(state: &Triplet, f: &F) -> Result<f64, StepError> {
    let prof = profile(state);
    for g in [&prof.u, &prof.y, &prof.v, &prof.z] {
        g.ensure_finite()?;
    }
    let image = sample_rhs(f, &prof)?;
    let (i0, i1) = weighted_integrals(&state.phi)?;
    let (a, b) = (state.alpha, state.beta);
    Ok(state.phi.distance(&image)?
        + (i0 - (b / 6.0 + a / 3.0)).abs()
        + (-i1 + (b / 3.0 + a / 6.0)).abs())
}

/// Runs the iteration to convergence.
///
/// `exact`, when given, holds the exact canonical solution at the grid
/// nodes and enables the `eu(k)` history.
pub fn solve<F: RightHandSide + ?Sized>(
    f: &F,
    config: &SolverConfig,
    exact: Option<&GridFunction>,
) -> Result<SolveReport, SolveError> {
    let grid = Grid::new(config.n).map_err(|e| SolveError::Config(e.to_string()))?;
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(SolveError::Config(format!(
            "tolerance must be positive, got {}",
            config.tol
        )));
    }
    if config.max_iter == 0 {
        return Err(SolveError::Config("max_iter must be positive".into()));
    }
    if let Some(ex) = exact {
        if ex.grid() != grid {
            return Err(SolveError::Config(format!(
                "exact solution sampled on {} intervals, solver uses {}",
                ex.grid().intervals(),
                grid.intervals()
            )));
        }
    }

    let mut state = init_state(f, grid)?;
    let (mut next, mut prof) = step(&state, f)?;
    let first_step = next.distance(&state).map_err(StepError::from)?;
    let mut e_history = Vec::new();
    let mut eu_history = exact.map(|_| Vec::new());
    let mut rising = 0usize;

    for k in 1..=config.max_iter {
        let previous_u = prof.u;
        state = next;
        (next, prof) = step(&state, f)?;
        let e = prof.u.distance(&previous_u).map_err(StepError::from)?;
        if let (Some(hist), Some(ex)) = (eu_history.as_mut(), exact) {
            hist.push(prof.u.distance(ex).map_err(StepError::from)?);
        }
        if let Some(&last) = e_history.last() {
            rising = if e > last { rising + 1 } else { 0 };
        }
        e_history.push(e);

        let finished = e <= config.tol;
        let diverged = config.divergence_window > 0 && rising >= config.divergence_window;
        if finished || diverged || k == config.max_iter {
            let residual = residual(&state, f)?;
            let report = SolveReport {
                converged: finished,
                iterations: k,
                e_history,
                eu_history,
                first_step,
                profile: prof,
                triplet: state,
                residual,
            };
            return if finished {
                Ok(report)
            } else if diverged {
                Err(SolveError::Diverged {
                    window: config.divergence_window,
                    last: e,
                    report: Box::new(report),
                })
            } else {
                Err(SolveError::MaxIterations {
                    iterations: k,
                    last: e,
                    report: Box::new(report),
                })
            };
        }
    }
    unreachable!("loop returns at k == max_iter")
}
