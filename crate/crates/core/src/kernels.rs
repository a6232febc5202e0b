//! Green kernels of the clamped biharmonic operator and the Dirichlet
//! Laplacian on `[0, 1]`, plus the weight functions that turn the clamped
//! slope conditions into two scalar equations for `u''(0)` and `u''(1)`.
//!
//! All kernels are piecewise polynomials and are evaluated in closed form.
//! On the diagonal `t == x` the lower (`t <= x`) branch is used; both
//! branches coincide there.

use thiserror::Error;

/// Inputs this close to `[0, 1]` are clamped onto the interval.
pub const CLAMP_SLACK: f64 = 1e-12;

const FRAC_1_SQRT_3: f64 = 0.577_350_269_189_625_8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("kernel argument {name} = {value} lies outside [0, 1]")]
pub struct KernelDomainError {
    pub name: &'static str,
    pub value: f64,
}

/// Uniform bounds on the kernel integrals over `t in [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBounds {
    /// `sup_x ∫|G0(x,t)| dt`
    pub bound_g0: f64,
    /// `sup_x ∫|∂G0/∂x (x,t)| dt`
    pub bound_g0x: f64,
    /// `sup_x ∫|G(x,t)| dt`
    pub bound_g: f64,
    /// Shared published bound for `∫|H0|` and `∫|H1|`. The exact value of
    /// both integrals is [`H_INTEGRAL`].
    pub bound_h: f64,
}

pub const KERNEL_BOUNDS: KernelBounds = KernelBounds {
    bound_g0: 1.0 / 384.0,
    bound_g0x: FRAC_1_SQRT_3 / 72.0,
    bound_g: 1.0 / 8.0,
    bound_h: 21.0 / 500.0,
};

/// Exact value of `∫₀¹ H0 = ∫₀¹ H1`.
pub const H_INTEGRAL: f64 = 1.0 / 24.0;

fn unit(name: &'static str, value: f64) -> Result<f64, KernelDomainError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if (-CLAMP_SLACK..0.0).contains(&value) {
        Ok(0.0)
    } else if value > 1.0 && value <= 1.0 + CLAMP_SLACK {
        Ok(1.0)
    } else {
        Err(KernelDomainError { name, value })
    }
}

/// Green function of `u'''' = φ` with `u = u' = 0` at both ends.
pub fn g0(x: f64, t: f64) -> Result<f64, KernelDomainError> {
    let (x, t) = (unit("x", x)?, unit("t", t)?);
    let value = if t <= x {
        t * t * (x - 1.0) * (x - 1.0) * (3.0 * x - 2.0 * t * x - t)
    } else {
        x * x * (t - 1.0) * (t - 1.0) * (3.0 * t - 2.0 * t * x - x)
    };
    Ok(value / 6.0)
}

/// `∂G0/∂x`.
pub fn g0_dx(x: f64, t: f64) -> Result<f64, KernelDomainError> {
    let (x, t) = (unit("x", x)?, unit("t", t)?);
    let value = if t <= x {
        t * t * (1.0 - x) * (2.0 * t * x - 3.0 * x + 1.0)
    } else {
        (t - 1.0) * (t - 1.0) * x * (2.0 * t - 2.0 * t * x - x)
    };
    Ok(value / 2.0)
}

/// Green function of `-u'' = φ` with `u(0) = u(1) = 0`.
pub fn g(x: f64, t: f64) -> Result<f64, KernelDomainError> {
    let (x, t) = (unit("x", x)?, unit("t", t)?);
    Ok(if t <= x { t * (1.0 - x) } else { x * (1.0 - t) })
}

/// `H0(t) = ∫₀¹ (1 - s) G(s, t) ds`.
pub fn h0(t: f64) -> Result<f64, KernelDomainError> {
    let t = unit("t", t)?;
    Ok(t * (1.0 - t) * (2.0 - t) / 6.0)
}

/// `H1(t) = ∫₀¹ s G(s, t) ds`.
pub fn h1(t: f64) -> Result<f64, KernelDomainError> {
    let t = unit("t", t)?;
    Ok(t * (1.0 - t) * (1.0 + t) / 6.0)
}
