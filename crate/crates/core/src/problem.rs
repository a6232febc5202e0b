//! Problem definitions and the reduction of a general Dirichlet problem
//!
//! ```text
//! w''''(t) = F(t, w, w', w'', w'''),  a < t < b,
//! w(a) = A1, w(b) = B1, w'(a) = A2, w'(b) = B2
//! ```
//!
//! to the clamped problem on `[0, 1]`. With `s = b - a`, `t = a + s x` and
//! `P` the Hermite cubic matching the boundary data, `u(x) = w(t) - P(t)`
//! solves `u'''' = f(x, u, u', u'', u''')` with
//!
//! ```text
//! f = s⁴ F(a + s x, u + P, (u' + P̃')/s, (u'' + P̃'')/s², (u''' + P̃''')/s³)
//! ```
//!
//! where `P̃(x) = P(a + s x)` and primes on `P̃` are taken in `x`.
//!
//! # Problem files
//!
//! UTF-8, one `key = value` per line, `#` starts a comment. Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `a`, `b` | interval | `0`, `1` |
//! | `A1`, `B1` | `w(a)`, `w(b)` | `0` |
//! | `A2`, `B2` | `w'(a)`, `w'(b)` | `0` |
//! | `f` | right-hand side in `x, u, y, v, z` (read as `t, w, w', w'', w'''`) | required |
//! | `exact` | exact solution `w` as an expression in `x` | none |
//! | `M` | radius of the domain box used by the condition check | none |
//! | `K1` … `K4` | Lipschitz constants in `u, y, v, z` | none |
//!
//! Numeric values may be constant expressions such as `1/(8*sqrt(3))`.

use std::collections::HashSet;

use thiserror::Error;

use crate::expr::{self, EvalError, Expr, ParseError, Point, Var};
use crate::numerics::{Grid, GridError, GridFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: `{key}`: {source}")]
    Expression {
        line: usize,
        key: String,
        source: ParseError,
    },
    #[error("line {line}: `{key}` must be a constant")]
    NotConstant { line: usize, key: String },
    #[error("line {line}: `{key}`: {source}")]
    Value {
        line: usize,
        key: String,
        source: EvalError,
    },
    #[error("line {line}: `{key}` must be {requirement}, got {value}")]
    OutOfRange {
        line: usize,
        key: String,
        requirement: &'static str,
        value: f64,
    },
    #[error("`exact` may depend on x only")]
    ExactNotUnivariate,
    #[error("missing required key `f`")]
    MissingRhs,
    #[error("interval needs a < b, got a = {a}, b = {b}")]
    EmptyInterval { a: f64, b: f64 },
    #[error("boundary value {name} = {value} is not finite")]
    NonFiniteBoundary { name: &'static str, value: f64 },
}

/// Dirichlet problem on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawProblem {
    a: f64,
    b: f64,
    boundary: BoundaryData,
    rhs: Expr,
    exact: Option<Expr>,
}

/// `w(a), w(b), w'(a), w'(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryData {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl RawProblem {
    pub fn new(a: f64, b: f64, boundary: BoundaryData, rhs: Expr) -> Result<Self, ProblemError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(ProblemError::EmptyInterval { a, b });
        }
        for (name, value) in [
            ("A1", boundary.a1),
            ("B1", boundary.b1),
            ("A2", boundary.a2),
            ("B2", boundary.b2),
        ] {
            if !value.is_finite() {
                return Err(ProblemError::NonFiniteBoundary { name, value });
            }
        }
        Ok(Self {
            a,
            b,
            boundary,
            rhs,
            exact: None,
        })
    }

    /// The homogeneous clamped problem on `[0, 1]`.
    pub fn clamped(rhs: Expr) -> Self {
        Self::new(0.0, 1.0, BoundaryData::default(), rhs).expect("unit interval is valid")
    }

    /// Attaches an exact solution `w(t)`, written in the variable `x`.
    pub fn with_exact(mut self, exact: Expr) -> Result<Self, ProblemError> {
        if Var::STATE.iter().any(|&v| exact.depends_on(v)) {
            return Err(ProblemError::ExactNotUnivariate);
        }
        self.exact = Some(exact);
        Ok(self)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn boundary(&self) -> BoundaryData {
        self.boundary
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn exact(&self) -> Option<&Expr> {
        self.exact.as_ref()
    }

    pub fn hermite_cubic(&self) -> HermiteCubic {
        HermiteCubic::new(self.a, self.b, self.boundary)
    }

    pub fn canonicalize(&self) -> CanonicalProblem {
        CanonicalProblem::new(self.clone())
    }
}

/// Optional analysis metadata carried by a problem file.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Certificate {
    pub m: Option<f64>,
    pub k: [Option<f64>; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub raw: RawProblem,
    pub certificate: Certificate,
}

const KEYS: [&str; 13] = [
    "a", "b", "A1", "B1", "A2", "B2", "f", "exact", "M", "K1", "K2", "K3", "K4",
];

impl ProblemFile {
    pub fn parse(source: &str) -> Result<Self, ProblemError> {
        let mut seen = HashSet::new();
        let mut a = 0.0;
        let mut b = 1.0;
        let mut boundary = BoundaryData::default();
        let mut rhs = None;
        let mut exact = None;
        let mut certificate = Certificate::default();

        for (index, raw_line) in source.lines().enumerate() {
            let line = index + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(ProblemError::Syntax { line })?;
            if !KEYS.contains(&key) {
                return Err(ProblemError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(ProblemError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            let parse_expr = || {
                Expr::parse(value).map_err(|source| ProblemError::Expression {
                    line,
                    key: key.to_string(),
                    source,
                })
            };
            match key {
                "f" => rhs = Some(parse_expr()?),
                "exact" => exact = Some((line, parse_expr()?)),
                _ => {
                    let c = constant(line, key, parse_expr()?)?;
                    match key {
                        "a" => a = c,
                        "b" => b = c,
                        "A1" => boundary.a1 = c,
                        "B1" => boundary.b1 = c,
                        "A2" => boundary.a2 = c,
                        "B2" => boundary.b2 = c,
                        "M" => {
                            if c <= 0.0 {
                                return Err(out_of_range(line, key, "positive", c));
                            }
                            certificate.m = Some(c);
                        }
                        _ => {
                            if c < 0.0 {
                                return Err(out_of_range(line, key, "nonnegative", c));
                            }
                            let slot = key[1..].parse::<usize>().expect("K1..K4") - 1;
                            certificate.k[slot] = Some(c);
                        }
                    }
                }
            }
        }

        let rhs = rhs.ok_or(ProblemError::MissingRhs)?;
        let mut raw = RawProblem::new(a, b, boundary, rhs)?;
        if let Some((_, e)) = exact {
            raw = raw.with_exact(e)?;
        }
        Ok(Self { raw, certificate })
    }
}

fn constant(line: usize, key: &str, e: Expr) -> Result<f64, ProblemError> {
    if Var::ALL.iter().any(|&v| e.depends_on(v)) {
        return Err(ProblemError::NotConstant {
            line,
            key: key.to_string(),
        });
    }
    e.eval(&Point::default())
        .map_err(|source| ProblemError::Value {
            line,
            key: key.to_string(),
            source,
        })
}

fn out_of_range(line: usize, key: &str, requirement: &'static str, value: f64) -> ProblemError {
    ProblemError::OutOfRange {
        line,
        key: key.to_string(),
        requirement,
        value,
    }
}

/// Cubic `P` with `P(a) = A1, P(b) = B1, P'(a) = A2, P'(b) = B2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteCubic {
    a: f64,
    scale: f64,
    /// Coefficients of `P(a + s x)` in powers of `x`.
    local: [f64; 4],
}

impl HermiteCubic {
    pub fn new(a: f64, b: f64, data: BoundaryData) -> Self {
        let s = b - a;
        let BoundaryData { a1, b1, a2, b2 } = data;
        let local = [
            a1,
            s * a2,
            3.0 * (b1 - a1) - s * (2.0 * a2 + b2),
            2.0 * (a1 - b1) + s * (a2 + b2),
        ];
        Self { a, scale: s, local }
    }

    /// Coefficients `c0..c3` of `P(t) = c0 + c1 t + c2 t² + c3 t³`.
    pub fn coefficients(&self) -> [f64; 4] {
        let (a, s) = (self.a, self.scale);
        let binom = [
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0],
            [1.0, 3.0, 3.0, 1.0],
        ];
        let mut c = [0.0; 4];
        for (k, &dk) in self.local.iter().enumerate() {
            let scaled = dk / s.powi(k as i32);
            for (j, cj) in c.iter_mut().enumerate().take(k + 1) {
                *cj += scaled * binom[k][j] * (-a).powi((k - j) as i32);
            }
        }
        c
    }

    /// Coefficients of `x ↦ P(a + s x)`.
    pub fn local_coefficients(&self) -> [f64; 4] {
        self.local
    }

    fn local_derivative(&self, order: usize, x: f64) -> f64 {
        let d = self.local;
        match order {
            0 => d[0] + x * (d[1] + x * (d[2] + x * d[3])),
            1 => d[1] + x * (2.0 * d[2] + x * 3.0 * d[3]),
            2 => 2.0 * d[2] + 6.0 * d[3] * x,
            3 => 6.0 * d[3],
            _ => 0.0,
        }
    }

    /// `P^(order)(t)` for `order <= 3`.
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        let x = (t - self.a) / self.scale;
        self.local_derivative(order, x) / self.scale.powi(order as i32)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    pub fn is_zero(&self) -> bool {
        self.local.iter().all(|&c| c == 0.0)
    }
}

/// The clamped problem on `[0, 1]` derived from a [`RawProblem`].
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalProblem {
    raw: RawProblem,
    cubic: HermiteCubic,
    rhs: Expr,
}

impl CanonicalProblem {
    fn new(raw: RawProblem) -> Self {
        let cubic = raw.hermite_cubic();
        let (a, b) = raw.interval();
        let s = b - a;
        let x = Expr::Var(Var::X);
        let d = cubic.local_coefficients();
        let p = [
            expr::polynomial(&d, &x),
            expr::polynomial(&[d[1], 2.0 * d[2], 3.0 * d[3]], &x),
            expr::polynomial(&[2.0 * d[2], 6.0 * d[3]], &x),
            expr::polynomial(&[6.0 * d[3]], &x),
        ];
        let t = expr::add(expr::num(a), expr::mul(expr::num(s), x.clone()));
        let lift = |var: Var, order: usize| {
            expr::div(
                expr::add(Expr::Var(var), p[order].clone()),
                expr::num(s.powi(order as i32)),
            )
        };
        let substituted = raw.rhs().substitute(&|var| match var {
            Var::X => t.clone(),
            Var::U => lift(Var::U, 0),
            Var::Y => lift(Var::Y, 1),
            Var::V => lift(Var::V, 2),
            Var::Z => lift(Var::Z, 3),
        });
        let rhs = expr::mul(expr::num(s.powi(4)), substituted);
        Self { raw, cubic, rhs }
    }

    /// Right-hand side `f(x, u, y, v, z)` of the clamped problem.
    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn raw(&self) -> &RawProblem {
        &self.raw
    }

    pub fn cubic(&self) -> &HermiteCubic {
        &self.cubic
    }

    /// `b - a`; the right-hand side carries a factor `scale⁴`.
    pub fn scale(&self) -> f64 {
        let (a, b) = self.raw.interval();
        b - a
    }

    pub fn raw_abscissa(&self, x: f64) -> f64 {
        let (a, b) = self.raw.interval();
        a + (b - a) * x
    }

    /// The exact canonical solution `w(t) - P(t)` at the nodes, when the raw
    /// problem carries one.
    pub fn exact_on(&self, grid: Grid) -> Option<Result<GridFunction, RecoveryError>> {
        let exact = self.raw.exact()?;
        let values: Result<Vec<f64>, RecoveryError> = grid
            .nodes()
            .map(|x| {
                let t = self.raw_abscissa(x);
                let w = exact.eval(&Point::new(t, 0.0, 0.0, 0.0, 0.0))?;
                Ok(w - self.cubic.local_derivative(0, x))
            })
            .collect();
        Some(values.and_then(|v| Ok(GridFunction::new(grid, v)?)))
    }

    /// Maps a canonical solution back to `w` on `[a, b]`.
    pub fn recover(&self, u: &GridFunction) -> RecoveredSolution {
        let grid = u.grid();
        let (t, w) = grid
            .nodes()
            .zip(u.values())
            .map(|(x, &ux)| (self.raw_abscissa(x), ux + self.cubic.local_derivative(0, x)))
            .unzip();
        RecoveredSolution { t, w }
    }

    /// Maps the canonical derivative `u^(order)` back to `w^(order)`.
    pub fn recover_derivative(&self, order: usize, du: &GridFunction) -> Vec<f64> {
        let s = self.scale().powi(order as i32);
        du.grid()
            .nodes()
            .zip(du.values())
            .map(|(x, &d)| (d + self.cubic.local_derivative(order, x)) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecoveryError {
    #[error("exact solution: {0}")]
    Eval(#[from] EvalError),
    #[error("exact solution: {0}")]
    Grid(#[from] GridError),
}

/// Solution of the raw problem sampled at `t_i = a + (b - a) x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredSolution {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
}
