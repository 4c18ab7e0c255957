//! Fourier modes of the warped-cylinder Dirac operator and the first-order
//! systems they reduce to.
//!
//! For a mode `e^{ikθ}(u, v)` with mass `m = k + A` the eigenvalue equation
//! `Dψ = λψ` becomes
//!
//! ```text
//! u' = −(f'/2f − m/f) u − iλ v
//! v' = −(f'/2f + m/f) v − iλ u
//! ```
//!
//! and after `u → f^{1/2} u`, `w = −i f^{1/2} v` the real system
//!
//! ```text
//! u' =  (m/f) u + λ w
//! w' = −(m/f) w − λ u
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::warp::WarpProfile;

/// Lattice-membership and integer-alignment tolerance.
pub(crate) const LATTICE_TOL: f64 = 1e-12;

/// Masses below this are the excluded `m = 0` case.
pub const MASS_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinStructure {
    /// Modes `k ∈ ℤ`.
    Periodic,
    /// Modes `k ∈ ℤ + ½`.
    AntiPeriodic,
}

impl SpinStructure {
    /// Offset of the mode lattice from the integers.
    pub fn offset(self) -> f64 {
        match self {
            SpinStructure::Periodic => 0.0,
            SpinStructure::AntiPeriodic => 0.5,
        }
    }

    pub fn contains(self, k: f64) -> bool {
        let x = k - self.offset();
        (x - x.round()).abs() <= LATTICE_TOL
    }

    /// Lattice points in the closed interval `[lo, hi]`, ascending.
    pub fn modes_between(self, lo: f64, hi: f64) -> Vec<f64> {
        let off = self.offset();
        let first = (lo - off).ceil() as i64;
        let last = (hi - off).floor() as i64;
        (first..=last).map(|n| n as f64 + off).collect()
    }
}

/// One Fourier mode at a fixed gauge value. The mass `m = k + A` is always
/// recomputed from `k` and `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeContext {
    k: f64,
    gauge: f64,
    spin: SpinStructure,
    profile: WarpProfile,
}

impl ModeContext {
    pub fn new(k: f64, gauge: f64, spin: SpinStructure, profile: WarpProfile) -> Result<Self> {
        if !spin.contains(k) {
            return Err(Error::InvalidParameter(format!(
                "mode k = {k} is not in the {spin:?} lattice"
            )));
        }
        if !gauge.is_finite() {
            return Err(Error::InvalidParameter(format!("gauge value {gauge} is not finite")));
        }
        Ok(ModeContext {
            k,
            gauge,
            spin,
            profile,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    pub fn spin(&self) -> SpinStructure {
        self.spin
    }

    pub fn profile(&self) -> &WarpProfile {
        &self.profile
    }

    pub fn m(&self) -> f64 {
        self.k + self.gauge
    }

    /// The same mode at another gauge value.
    pub fn with_gauge(&self, gauge: f64) -> Self {
        ModeContext { gauge, ..*self }
    }

    /// `(f'/2f, m/f)` at `t`, no domain check.
    #[inline]
    pub(crate) fn coefficients(&self, t: f64) -> (f64, f64) {
        let (f, fp, _) = self.profile.derivs_unchecked(t);
        (0.5 * fp / f, self.m() / f)
    }

    pub(crate) fn require_invertible(&self) -> Result<f64> {
        let m = self.m();
        if m.abs() < MASS_EPS {
            Err(Error::NonInvertibleBoundary(format!(
                "mode k = {} has m = k + A = {m:e}; the APS projector is ambiguous",
                self.k
            )))
        } else {
            Ok(m)
        }
    }
}

/// A line `a·x + b·y = 0` through the origin of a two-dimensional endpoint
/// space, stored with `a² + b² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLine {
    a: f64,
    b: f64,
}

impl BoundaryLine {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let n = a.hypot(b);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "boundary line coefficients ({a}, {b}) must be finite and not both zero"
            )));
        }
        Ok(BoundaryLine { a: a / n, b: b / n })
    }

    pub fn coeffs(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// The functional `a·x + b·y`.
    pub fn apply<T>(&self, x: T, y: T) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        x * self.a + y * self.b
    }

    /// Unoriented angle between two lines, in `[0, π/2]`.
    pub fn angle_to(&self, other: &BoundaryLine) -> f64 {
        let cross = (self.a * other.b - self.b * other.a).abs();
        let dot = (self.a * other.a + self.b * other.b).abs();
        cross.atan2(dot)
    }
}

/// `(μ₀⁺, μ₀⁻, μ_T⁺, μ_T⁻) = (m/f(0), −m/f(0), m/f(T), −m/f(T))`.
pub fn boundary_eigenvalues(ctx: &ModeContext) -> (f64, f64, f64, f64) {
    let p = ctx.profile();
    let m = ctx.m();
    let f0 = p.f_unchecked(0.0);
    let ft = p.f_unchecked(p.length());
    (m / f0, -m / f0, m / ft, -m / ft)
}

/// APS endpoint functionals in `(u, v)` components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApsFunctionals {
    pub left: BoundaryLine,
    pub right: BoundaryLine,
}

/// `m > 0`: `u(0) = 0, v(T) = 0`; `m < 0`: `v(0) = 0, u(T) = 0`.
pub fn aps_boundary_functionals(ctx: &ModeContext) -> Result<ApsFunctionals> {
    let m = ctx.require_invertible()?;
    let upper = BoundaryLine { a: 1.0, b: 0.0 };
    let lower = BoundaryLine { a: 0.0, b: 1.0 };
    Ok(if m > 0.0 {
        ApsFunctionals {
            left: upper,
            right: lower,
        }
    } else {
        ApsFunctionals {
            left: lower,
            right: upper,
        }
    })
}

#[inline]
pub(crate) fn complex_rhs(
    q: f64,
    p: f64,
    lambda: f64,
    u: Complex64,
    v: Complex64,
) -> (Complex64, Complex64) {
    let il = Complex64::new(0.0, lambda);
    (-(q - p) * u - il * v, -(q + p) * v - il * u)
}

/// `(u', v')` of the complex mode system.
pub fn complex_system_rhs(
    ctx: &ModeContext,
    lambda: f64,
    t: f64,
    (u, v): (Complex64, Complex64),
) -> Result<(Complex64, Complex64)> {
    ctx.profile().eval_f(t)?;
    let (q, p) = ctx.coefficients(t);
    Ok(complex_rhs(q, p, lambda, u, v))
}

/// `(u', w')` of the real mode system.
pub fn real_system_rhs(ctx: &ModeContext, lambda: f64, t: f64, (u, w): (f64, f64)) -> Result<(f64, f64)> {
    ctx.profile().eval_f(t)?;
    let (_, p) = ctx.coefficients(t);
    Ok((p * u + lambda * w, -p * w - lambda * u))
}

/// Propagator of the real system at `λ = 0`: `diag(e^{mℓ(T)}, e^{−mℓ(T)})`.
pub fn transfer_matrix_zero(ctx: &ModeContext) -> [[f64; 2]; 2] {
    let x = ctx.m() * ctx.profile().total_ell();
    [[x.exp(), 0.0], [0.0, (-x).exp()]]
}

/// Second spinor component from the first: `v = (i/λ)(u' + (f'/2f − m/f) u)`.
pub fn reconstruct_v(
    ctx: &ModeContext,
    lambda: f64,
    t: f64,
    u: Complex64,
    du: Complex64,
) -> Result<Complex64> {
    if lambda == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    ctx.profile().eval_f(t)?;
    let (q, p) = ctx.coefficients(t);
    Ok(Complex64::new(0.0, 1.0 / lambda) * (du + (q - p) * u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(k: f64, a: f64) -> ModeContext {
        ModeContext::new(k, a, SpinStructure::Periodic, WarpProfile::new(1.0, 1.5).unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lattices() {
        assert!(SpinStructure::Periodic.contains(-3.0));
        assert!(!SpinStructure::Periodic.contains(0.5));
        assert!(SpinStructure::AntiPeriodic.contains(-1.5));
        assert!(!SpinStructure::AntiPeriodic.contains(1.0));
        assert_eq!(SpinStructure::Periodic.modes_between(-2.75, 0.25), vec![-2.0, -1.0, 0.0]);
        assert_eq!(SpinStructure::AntiPeriodic.modes_between(-1.0, 1.0), vec![-0.5, 0.5]);
        let p = WarpProfile::new(1.0, 1.0).unwrap();
        assert!(ModeContext::new(0.5, 0.0, SpinStructure::Periodic, p).is_err());
    }

    #[test]
    fn boundary_eigenvalue_examples() {
        let (a, b, c_, d) = boundary_eigenvalues(&ctx(1.0, 0.3));
        assert!((a - 0.65).abs() < 1e-15 && (b + 0.65).abs() < 1e-15);
        assert!((c_ - 0.276_312_422_712_482_3).abs() < 1e-15 && (d + c_).abs() == 0.0);
        let (a, b, _, _) = boundary_eigenvalues(&ctx(-1.0, 0.3));
        assert!((a + 0.35).abs() < 1e-15 && (b - 0.35).abs() < 1e-15);
        let z = boundary_eigenvalues(&ctx(0.0, 0.0));
        assert_eq!((z.0.abs(), z.1.abs(), z.2.abs(), z.3.abs()), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn aps_functionals_follow_mass_sign() {
        let pos = aps_boundary_functionals(&ctx(1.0, 0.3)).unwrap();
        assert_eq!(pos.left.coeffs(), (1.0, 0.0));
        assert_eq!(pos.right.coeffs(), (0.0, 1.0));
        let neg = aps_boundary_functionals(&ctx(-1.0, 0.3)).unwrap();
        assert_eq!(neg.left.coeffs(), (0.0, 1.0));
        assert_eq!(neg.right.coeffs(), (1.0, 0.0));
        assert!(matches!(
            aps_boundary_functionals(&ctx(0.0, 0.0)),
            Err(Error::NonInvertibleBoundary(_))
        ));
    }

    #[test]
    fn complex_rhs_examples() {
        let k = ctx(1.0, 0.3);
        let (du, dv) = complex_system_rhs(&k, 2.0, 0.0, (c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert!((du - c(0.65, 0.0)).norm() < 1e-15);
        assert!((dv - c(0.0, -2.0)).norm() < 1e-15);
        let (du, dv) = complex_system_rhs(&k, 2.0, 0.0, (c(0.0, 0.0), c(1.0, 0.0))).unwrap();
        assert!((du - c(0.0, -2.0)).norm() < 1e-15);
        assert!((dv - c(-0.65, 0.0)).norm() < 1e-15);

        let z = ctx(0.0, 0.0);
        let t = 0.9;
        let (f, fp, _) = z.profile().eval_f_derivs(t).unwrap();
        let damp = -fp / (2.0 * f);
        let (du, dv) = complex_system_rhs(&z, 0.0, t, (c(1.0, 2.0), c(-3.0, 0.5))).unwrap();
        assert!((du - c(1.0, 2.0) * damp).norm() < 1e-15);
        assert!((dv - c(-3.0, 0.5) * damp).norm() < 1e-15);
    }

    #[test]
    fn real_rhs_examples() {
        assert_eq!(real_system_rhs(&ctx(0.0, 0.0), 1.0, 0.4, (1.0, 0.0)).unwrap(), (0.0, -1.0));
        let k = ctx(1.0, 0.3);
        let (a, b) = real_system_rhs(&k, 0.0, 0.0, (1.0, 1.0)).unwrap();
        assert!((a - 0.65).abs() < 1e-15 && (b + 0.65).abs() < 1e-15);
        let (a, b) = real_system_rhs(&k, 2.0, 0.0, (1.0, 1.0)).unwrap();
        assert!((a - 2.65).abs() < 1e-15 && (b + 2.65).abs() < 1e-15);
        assert!(real_system_rhs(&k, 2.0, 1.6, (1.0, 1.0)).is_err());
    }

    #[test]
    fn transfer_matrix_examples() {
        assert_eq!(transfer_matrix_zero(&ctx(0.0, 0.0)), [[1.0, 0.0], [0.0, 1.0]]);
        let p = transfer_matrix_zero(&ctx(1.0, 0.0));
        assert!((p[0][0] - 1.760_968_906_493_306).abs() < 1e-12);
        assert!((p[1][1] - 0.567_869_197_640_373_8).abs() < 1e-12);
        assert!((p[0][0] * p[1][1] - 1.0).abs() < 1e-15);
        let n = transfer_matrix_zero(&ctx(-1.0, 0.0));
        assert_eq!((n[0][0], n[1][1]), (p[1][1], p[0][0]));
    }

    #[test]
    fn reconstruct_v_examples() {
        let k = ctx(1.0, 0.3);
        let zero = c(0.0, 0.0);
        assert_eq!(reconstruct_v(&k, 2.0, 0.3, zero, zero).unwrap(), zero);
        let v = reconstruct_v(&k, 2.0, 0.0, c(1.0, 0.0), c(0.65, 0.0)).unwrap();
        assert!(v.norm() < 1e-15);
        let v = reconstruct_v(&k, 2.0, 0.0, zero, c(0.0, -2.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(
            reconstruct_v(&k, 0.0, 0.0, zero, zero),
            Err(Error::ZeroSpectralParameter)
        );
    }

    #[test]
    fn boundary_line_normalization() {
        let l = BoundaryLine::new(3.0, 4.0).unwrap();
        assert_eq!(l.coeffs(), (0.6, 0.8));
        assert!(BoundaryLine::new(0.0, 0.0).is_err());
        let u0 = BoundaryLine::new(1.0, 0.0).unwrap();
        let w0 = BoundaryLine::new(0.0, -2.0).unwrap();
        assert!((u0.angle_to(&w0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(u0.angle_to(&BoundaryLine::new(-5.0, 0.0).unwrap()), 0.0);
    }
}
