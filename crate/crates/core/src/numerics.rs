//! Uniform grids on `[0, 1]` and the fourth-order discrete toolbox:
//! five-point differentiation, the compact three-point scheme for
//! `u'' = g`, and composite Simpson quadrature.

use std::ops::Index;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs an even number of intervals, at least 8 (got {0})")]
    BadIntervalCount(usize),
    #[error("grid function has {got} values, grid with {n} intervals needs {}", n + 1)]
    LengthMismatch { n: usize, got: usize },
    #[error("non-finite value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("grid functions live on different grids ({0} vs {1} intervals)")]
    GridMismatch(usize, usize),
}

/// Uniform grid `x_i = i / n`, `i = 0..=n`, on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, GridError> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(GridError::BadIntervalCount(n));
        }
        Ok(Self { n })
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        i as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n + 1).map(move |i| self.node(i))
    }

    /// Samples `f` at every node.
    pub fn sample(&self, mut f: impl FnMut(f64) -> f64) -> Result<GridFunction, GridError> {
        GridFunction::new(*self, self.nodes().map(&mut f).collect())
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction {
            grid: *self,
            values: vec![0.0; self.len()],
        }
    }
}

/// Real values at the nodes of a [`Grid`].
///
/// Constructors reject non-finite values. The solvers in this module may
/// still overflow on extreme input; check with [`GridFunction::ensure_finite`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                n: grid.n,
                got: values.len(),
            });
        }
        let f = Self { grid, values };
        f.ensure_finite()?;
        Ok(f)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Fails on the first NaN or infinite value.
    pub fn ensure_finite(&self) -> Result<(), GridError> {
        match self.values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            Some((index, &value)) => Err(GridError::NonFinite { index, value }),
            None => Ok(()),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Uniform norm `max_i |f(x_i)|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise product, e.g. a weight function times a density.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction, GridError> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        GridFunction::new(self.grid, values)
    }

    /// `max_i |f(x_i) - g(x_i)|`.
    pub fn distance(&self, other: &GridFunction) -> Result<f64, GridError> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<(), GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch(self.grid.n, other.grid.n));
        }
        Ok(())
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Composite Simpson rule over `[0, 1]`. Exact for cubics.
pub fn simpson(f: &GridFunction) -> f64 {
    let v = f.values();
    let n = f.grid.n;
    debug_assert!(n.is_multiple_of(2));
    let odd: f64 = (1..n).step_by(2).map(|i| v[i]).sum();
    let even: f64 = (2..n).step_by(2).map(|i| v[i]).sum();
    f.grid.step() / 3.0 * (v[0] + 4.0 * odd + 2.0 * even + v[n])
}

/// Fourth-order first derivative at every node. Interior nodes use the
/// centered five-point stencil; the two nodes at each end use the shifted
/// one-sided stencils.
pub fn diff5(f: &GridFunction) -> GridFunction {
    let v = f.values();
    let n = f.grid.n;
    let scale = 1.0 / (12.0 * f.grid.step());
    let mut d = vec![0.0; n + 1];
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * scale;
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * scale;
    for i in 2..=n - 2 {
        d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) * scale;
    }
    d[n - 1] =
        (-v[n - 4] + 6.0 * v[n - 3] - 18.0 * v[n - 2] + 10.0 * v[n - 1] + 3.0 * v[n]) * scale;
    d[n] = (3.0 * v[n - 4] - 16.0 * v[n - 3] + 36.0 * v[n - 2] - 48.0 * v[n - 1] + 25.0 * v[n])
        * scale;
    GridFunction {
        grid: f.grid,
        values: d,
    }
}

/// Solves `u'' = g` on `(0, 1)` with `u(0) = left`, `u(1) = right` by the
/// compact scheme
///
/// ```text
/// (u[i-1] - 2 u[i] + u[i+1]) / h² = g[i] + (g[i-1] - 2 g[i] + g[i+1]) / 12
/// ```
///
/// which is fourth-order accurate for smooth `g` and exact when `u` is a
/// polynomial of degree at most five.
pub fn solve_second_order_bvp(g: &GridFunction, left: f64, right: f64) -> GridFunction {
    let n = g.grid.n;
    let h2 = g.grid.step() * g.grid.step();
    let gv = g.values();

    let m = n - 1;
    let mut rhs: Vec<f64> = (1..n)
        .map(|i| h2 / 12.0 * (gv[i - 1] + 10.0 * gv[i] + gv[i + 1]))
        .collect();
    rhs[0] -= left;
    rhs[m - 1] -= right;

    let interior = thomas_constant(1.0, -2.0, 1.0, &mut rhs);

    let mut values = Vec::with_capacity(n + 1);
    values.push(left);
    values.extend(interior);
    values.push(right);
    GridFunction {
        grid: g.grid,
        values,
    }
}

/// Thomas elimination for a tridiagonal Toeplitz matrix with sub-diagonal
/// `a`, diagonal `b` and super-diagonal `c`. Consumes `d` as scratch.
fn thomas_constant(a: f64, b: f64, c: f64, d: &mut [f64]) -> Vec<f64> {
    let m = d.len();
    let mut cp = vec![0.0; m];
    cp[0] = c / b;
    d[0] /= b;
    for i in 1..m {
        let denom = b - a * cp[i - 1];
        cp[i] = c / denom;
        d[i] = (d[i] - a * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - cp[i] * x[i + 1];
    }
    x
}
