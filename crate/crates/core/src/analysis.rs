//! Existence and uniqueness conditions for the clamped problem.
//!
//! For `M > 0` the box
//!
//! ```text
//! D_M = { 0 ≤ x ≤ 1, |u| ≤ M/384, |y| ≤ M/(72√3), |v| ≤ M, |z| ≤ M }
//! ```
//!
//! is where `f` has to be controlled. If `|f| ≤ M/2` on `D_M` a solution
//! exists. If in addition `f` is Lipschitz on `D_M` with constants
//! `K1..K4` in `u, y, v, z` and
//!
//! ```text
//! q = K1/384 + K2/(72√3) + K3 + K4 < 1/2
//! ```
//!
//! the solution is unique and the iteration converges with ratio `q + 1/2`.
//!
//! Without hand-derived bounds, [`check_conditions`] samples `|f|` and the
//! partial derivatives on a lattice over `D_M`. Those numbers are estimates,
//! and the report says so.

use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{DiffError, EvalError, Expr, Point, Var};
use crate::kernels::KERNEL_BOUNDS;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("M must be positive, got {0}")]
    NonPositiveM(f64),
    #[error("K{index} must be nonnegative, got {value}")]
    NegativeK { index: usize, value: f64 },
    #[error("lattice needs at least 5 points per axis, got {0}")]
    LatticeTooCoarse(usize),
    #[error("f is not defined on D_M at {point}: {source}")]
    Undefined { point: Point, source: EvalError },
    #[error("q = {0} is not below 1/2; the a-priori bound does not apply")]
    NotContractive(f64),
    #[error("invalid a-priori bound input: {0}")]
    BoundInput(String),
}

/// The box `D_M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBox {
    m: f64,
}

impl DomainBox {
    pub fn new(m: f64) -> Result<Self, AnalysisError> {
        if m > 0.0 && m.is_finite() {
            Ok(Self { m })
        } else {
            Err(AnalysisError::NonPositiveM(m))
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Half-widths of the box along `u, y, v, z`.
    pub fn bounds(&self) -> [f64; 4] {
        [
            self.m * KERNEL_BOUNDS.bound_g0,
            self.m * KERNEL_BOUNDS.bound_g0x,
            self.m,
            self.m,
        ]
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0.0..=1.0).contains(&p.x)
            && Var::STATE
                .iter()
                .zip(self.bounds())
                .all(|(&v, b)| p.get(v).abs() <= b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub points_per_axis: usize,
}

impl Default for Lattice {
    fn default() -> Self {
        Self { points_per_axis: 9 }
    }
}

impl Lattice {
    fn coordinate(&self, index: usize, half_width: f64) -> f64 {
        let p = self.points_per_axis;
        -half_width + 2.0 * half_width * index as f64 / (p - 1) as f64
    }

    fn point(&self, flat: usize, domain: &DomainBox) -> Point {
        let p = self.points_per_axis;
        let mut rest = flat;
        let mut digit = || {
            let d = rest % p;
            rest /= p;
            d
        };
        let x = digit() as f64 / (p - 1) as f64;
        let [bu, by, bv, bz] = domain.bounds();
        Point::new(
            x,
            self.coordinate(digit(), bu),
            self.coordinate(digit(), by),
            self.coordinate(digit(), bv),
            self.coordinate(digit(), bz),
        )
    }
}

/// Where a reported number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Given by the caller (hand-derived bound).
    Supplied,
    /// Lattice maximum of the symbolic partial derivative.
    Symbolic,
    /// Lattice maximum involving central differences, used where the
    /// symbolic derivative is unavailable or undefined.
    FiniteDifference,
    /// Lattice maximum of `|f|`.
    Sampled,
}

impl Provenance {
    pub fn is_estimate(self) -> bool {
        self != Provenance::Supplied
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckInput {
    pub k: [Option<f64>; 4],
    /// A proven bound for `sup |f|` on `D_M`; sampled when absent.
    pub sup_f: Option<f64>,
    pub lattice: Lattice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub m: f64,
    pub sup_f: f64,
    pub sup_f_provenance: Provenance,
    pub k: [f64; 4],
    pub k_provenance: [Provenance; 4],
    pub q: f64,
    /// `sup |f| <= M/2`.
    pub lemma1_ok: bool,
    /// `lemma1_ok` and `q < 1/2`.
    pub theorem1_ok: bool,
}

impl ConditionReport {
    pub fn is_estimate(&self) -> bool {
        self.sup_f_provenance.is_estimate() || self.k_provenance.iter().any(|p| p.is_estimate())
    }
}

/// `q = K1/384 + K2/(72√3) + K3 + K4`.
pub fn contraction_factor(k: [f64; 4]) -> Result<f64, AnalysisError> {
    if let Some((i, &value)) = k.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(AnalysisError::NegativeK {
            index: i + 1,
            value,
        });
    }
    Ok(k[0] * KERNEL_BOUNDS.bound_g0 + k[1] * KERNEL_BOUNDS.bound_g0x + k[2] + k[3])
}

#[derive(Debug, Clone, Copy, Default)]
struct Sample {
    sup_f: f64,
    k: [f64; 4],
    fd_used: [bool; 4],
}

impl Sample {
    fn merge(mut self, other: Sample) -> Sample {
        self.sup_f = self.sup_f.max(other.sup_f);
        for i in 0..4 {
            self.k[i] = self.k[i].max(other.k[i]);
            self.fd_used[i] |= other.fd_used[i];
        }
        self
    }
}

type Failure = (usize, AnalysisError);

fn merge(a: Result<Sample, Failure>, b: Result<Sample, Failure>) -> Result<Sample, Failure> {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(x.merge(y)),
        (Err(e), Ok(_)) | (Ok(_), Err(e)) => Err(e),
        (Err(e1), Err(e2)) => Err(if e1.0 <= e2.0 { e1 } else { e2 }),
    }
}

/// Checks the boundedness and contraction conditions for `f` on `D_M`.
///
/// Lipschitz constants not given in `input` are estimated as lattice maxima
/// of `|∂f/∂u|, …, |∂f/∂z|`. Evaluation failures anywhere on the lattice are
/// errors: they mean `f` is not defined on all of `D_M`.
pub fn check_conditions(
    f: &Expr,
    m: f64,
    input: &CheckInput,
) -> Result<ConditionReport, AnalysisError> {
    let domain = DomainBox::new(m)?;
    let lattice = input.lattice;
    if lattice.points_per_axis < 5 {
        return Err(AnalysisError::LatticeTooCoarse(lattice.points_per_axis));
    }
    for (i, k) in input.k.iter().enumerate() {
        if let Some(value) = *k {
            if value.is_nan() || value < 0.0 {
                return Err(AnalysisError::NegativeK {
                    index: i + 1,
                    value,
                });
            }
        }
    }

    let partials: Vec<Option<Result<Expr, DiffError>>> = Var::STATE
        .iter()
        .zip(input.k)
        .map(|(&var, given)| given.is_none().then(|| f.differentiate(var)))
        .collect();
    let widths = domain.bounds().map(|b| 2.0 * b);

    let total = lattice.points_per_axis.pow(5);
    let sample = (0..total)
        .into_par_iter()
        .map(|flat| {
            let point = lattice.point(flat, &domain);
            let fail = |source| (flat, AnalysisError::Undefined { point, source });
            let value = f.eval(&point).map_err(fail)?;
            let mut s = Sample {
                sup_f: value.abs(),
                ..Default::default()
            };
            for (i, (&var, partial)) in Var::STATE.iter().zip(&partials).enumerate() {
                let Some(partial) = partial else { continue };
                let symbolic = partial.as_ref().ok().and_then(|d| d.eval(&point).ok());
                s.k[i] = match symbolic {
                    Some(d) => d.abs(),
                    None => {
                        s.fd_used[i] = true;
                        central_difference(f, &point, var, widths[i], &domain)
                            .map_err(|(p, source)| {
                                (flat, AnalysisError::Undefined { point: p, source })
                            })?
                            .abs()
                    }
                };
            }
            Ok(s)
        })
        .reduce(|| Ok(Sample::default()), merge)
        .map_err(|(_, e)| e)?;

    let mut k = [0.0; 4];
    let mut k_provenance = [Provenance::Supplied; 4];
    for i in 0..4 {
        match input.k[i] {
            Some(value) => k[i] = value,
            None => {
                k[i] = sample.k[i];
                k_provenance[i] = if sample.fd_used[i] {
                    Provenance::FiniteDifference
                } else {
                    Provenance::Symbolic
                };
            }
        }
    }
    let (sup_f, sup_f_provenance) = match input.sup_f {
        Some(s) => (s, Provenance::Supplied),
        None => (sample.sup_f, Provenance::Sampled),
    };
    let q = contraction_factor(k)?;
    let lemma1_ok = sup_f <= m / 2.0;
    Ok(ConditionReport {
        m,
        sup_f,
        sup_f_provenance,
        k,
        k_provenance,
        q,
        lemma1_ok,
        theorem1_ok: lemma1_ok && q < 0.5,
    })
}

/// Central difference along `var`, shifted inward so both stencil points
/// stay in the box.
fn central_difference(
    f: &Expr,
    p: &Point,
    var: Var,
    width: f64,
    domain: &DomainBox,
) -> Result<f64, (Point, EvalError)> {
    let step = 1e-6 * width;
    let half = width / 2.0;
    let center = p.get(var).clamp(-half + step, half - step);
    let lo = p.with(var, center - step);
    let hi = p.with(var, center + step);
    debug_assert!(domain.contains(&lo) && domain.contains(&hi));
    let flo = f.eval(&lo).map_err(|e| (lo, e))?;
    let fhi = f.eval(&hi).map_err(|e| (hi, e))?;
    Ok((fhi - flo) / (2.0 * step))
}

/// The envelope `p_k = (q + 1/2)^k / (1/2 - q) · ‖ω₁ - ω₀‖` and the
/// resulting bounds on the error of `u_k` and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AprioriBound {
    pub p: f64,
    /// Bound on `‖u_k - u‖`: `p/384`.
    pub u: f64,
    /// Bound on `‖u'_k - u'‖`: `p/(72√3)`.
    pub y: f64,
    /// Bound on `‖u''_k - u''‖` and `‖u'''_k - u'''‖`: `p`.
    pub v: f64,
    pub z: f64,
}

pub fn apriori_bound(q: f64, first_step: f64, k: u32) -> Result<AprioriBound, AnalysisError> {
    if !(0.0..0.5).contains(&q) {
        return Err(AnalysisError::NotContractive(q));
    }
    if !(first_step >= 0.0 && first_step.is_finite()) {
        return Err(AnalysisError::BoundInput(format!(
            "first step must be finite and nonnegative, got {first_step}"
        )));
    }
    let p = (q + 0.5).powi(k as i32) / (0.5 - q) * first_step;
    Ok(AprioriBound {
        p,
        u: p * KERNEL_BOUNDS.bound_g0,
        y: p * KERNEL_BOUNDS.bound_g0x,
        v: p,
        z: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn contraction_factor_examples() {
        let q1 = contraction_factor([18.0, 37.0 / 4.0, 1.0 / (8.0 * SQRT3), 3.0 / 64.0]).unwrap();
        assert_abs_diff_eq!(q1, 0.24, epsilon = 0.005);
        let q2 =
            contraction_factor([25.0 / 192.0, 1.0, 25.0 / 147456.0, 5.0 / (72.0 * SQRT3)]).unwrap();
        assert_abs_diff_eq!(q2, 0.05, epsilon = 0.005);
        assert_eq!(contraction_factor([0.0; 4]).unwrap(), 0.0);
        assert!(matches!(
            contraction_factor([1.0, -1.0, 0.0, 0.0]),
            Err(AnalysisError::NegativeK { index: 2, .. })
        ));
    }

    #[test]
    fn domain_box_bounds() {
        let d = DomainBox::new(384.0).unwrap();
        assert_eq!(d.bounds()[0], 1.0);
        assert_abs_diff_eq!(d.bounds()[1], 384.0 / (72.0 * SQRT3), epsilon = 1e-12);
        assert!(d.contains(&Point::new(0.5, 1.0, 0.0, -384.0, 384.0)));
        assert!(!d.contains(&Point::new(0.5, 1.01, 0.0, 0.0, 0.0)));
        assert!(DomainBox::new(0.0).is_err());
        assert!(DomainBox::new(f64::NAN).is_err());
    }

    #[test]
    fn lattice_covers_corners() {
        let lattice = Lattice { points_per_axis: 5 };
        let d = DomainBox::new(2.0).unwrap();
        let first = lattice.point(0, &d);
        let last = lattice.point(5usize.pow(5) - 1, &d);
        assert_eq!(first.x, 0.0);
        assert_eq!(first.v, -2.0);
        assert_eq!(last.x, 1.0);
        assert_eq!(last.z, 2.0);
        assert_eq!(last.u, 2.0 / 384.0);
    }

    #[test]
    fn zero_rhs_is_trivially_certified() {
        let r = check_conditions(&Expr::Num(0.0), 1.0, &CheckInput::default()).unwrap();
        assert_eq!(r.sup_f, 0.0);
        assert_eq!(r.k, [0.0; 4]);
        assert_eq!(r.q, 0.0);
        assert!(r.lemma1_ok && r.theorem1_ok);
        assert!(r.is_estimate());
    }

    #[test]
    fn example_one_with_supplied_constants() {
        let f = Expr::parse("12 + u*z/2 - y*v/4 + y/4").unwrap();
        let input = CheckInput {
            k: [
                Some(18.0),
                Some(37.0 / 4.0),
                Some(1.0 / (8.0 * SQRT3)),
                Some(3.0 / 64.0),
            ],
            ..Default::default()
        };
        let r = check_conditions(&f, 36.0, &input).unwrap();
        assert!(r.lemma1_ok && r.theorem1_ok);
        assert_abs_diff_eq!(r.q, 0.24, epsilon = 0.005);
        assert_eq!(r.k_provenance, [Provenance::Supplied; 4]);
        assert!(r.sup_f <= 18.0);
    }

    #[test]
    fn example_one_estimated_constants_are_exact_here() {
        // all partials are linear, so lattice corners hit the maxima
        let f = Expr::parse("12 + u*z/2 - y*v/4 + y/4").unwrap();
        let r = check_conditions(&f, 36.0, &CheckInput::default()).unwrap();
        assert_abs_diff_eq!(r.k[0], 18.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.k[1], 37.0 / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.k[2], 36.0 / (288.0 * SQRT3), epsilon = 1e-12);
        assert_abs_diff_eq!(r.k[3], 36.0 / 768.0, epsilon = 1e-12);
        assert_eq!(r.k_provenance, [Provenance::Symbolic; 4]);
    }

    #[test]
    fn small_m_fails_lemma() {
        let f = Expr::parse("12 + u*z/2 - y*v/4 + y/4").unwrap();
        let r = check_conditions(&f, 1.0, &CheckInput::default()).unwrap();
        assert!(r.sup_f > 11.9);
        assert!(!r.lemma1_ok && !r.theorem1_ok);
    }

    #[test]
    fn undefined_rhs_reports_point() {
        let f = Expr::parse("sqrt(u)").unwrap();
        let err = check_conditions(&f, 6.0, &CheckInput::default()).unwrap_err();
        match err {
            AnalysisError::Undefined { point, .. } => assert!(point.u < 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn abs_falls_back_to_differences() {
        let f = Expr::parse("abs(v)/4 + 1").unwrap();
        let r = check_conditions(&f, 1.0, &CheckInput::default()).unwrap();
        assert_eq!(r.k_provenance[2], Provenance::FiniteDifference);
        assert_abs_diff_eq!(r.k[2], 0.25, epsilon = 1e-6);
        assert_eq!(r.k_provenance[0], Provenance::Symbolic);
    }

    #[test]
    fn rejects_bad_input() {
        let f = Expr::Num(1.0);
        assert!(matches!(
            check_conditions(&f, -1.0, &CheckInput::default()),
            Err(AnalysisError::NonPositiveM(_))
        ));
        let coarse = CheckInput {
            lattice: Lattice { points_per_axis: 4 },
            ..Default::default()
        };
        assert!(matches!(
            check_conditions(&f, 1.0, &coarse),
            Err(AnalysisError::LatticeTooCoarse(4))
        ));
        let negative = CheckInput {
            k: [None, None, Some(-0.1), None],
            ..Default::default()
        };
        assert!(check_conditions(&f, 1.0, &negative).is_err());
    }

    #[test]
    fn apriori_values() {
        assert_abs_diff_eq!(apriori_bound(0.0, 1.0, 3).unwrap().p, 0.25, epsilon = 1e-16);
        let s = 2.5;
        assert_abs_diff_eq!(
            apriori_bound(0.24, s, 0).unwrap().p,
            s / 0.26,
            epsilon = 1e-14
        );
        for k in 0..30 {
            let a = apriori_bound(0.24, 1.0, k).unwrap();
            let b = apriori_bound(0.24, 1.0, k + 1).unwrap();
            assert_abs_diff_eq!(b.p / a.p, 0.74, epsilon = 1e-12);
            assert_abs_diff_eq!(a.u, a.p / 384.0, epsilon = 1e-18);
        }
        assert!(matches!(
            apriori_bound(0.5, 1.0, 1),
            Err(AnalysisError::NotContractive(_))
        ));
        assert!(apriori_bound(0.1, -1.0, 1).is_err());
    }
}
