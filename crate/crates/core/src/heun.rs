//! Singularity structure of the master scalar equation.
//!
//! Eliminating `v` gives
//!
//! ```text
//! u'' + P u' + R u = 0,   P = f'/f,
//! R = λ² − m²/f² + m f'/f² + f''/2f − f'²/4f²
//! ```
//!
//! In `z = e^t` the coefficients are rational with regular singular points
//! at `0`, `±i√α` and `∞`, so the equation is of Heun class. Exponents at
//! `±i√α` are not computed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{complex_rhs, ModeContext};
use crate::ode::{Basis, FundamentalSolution};
use crate::warp::WarpProfile;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

/// Characteristic exponents `(ρ, −ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub plus: Complex64,
    pub minus: Complex64,
    /// Double root `0`.
    pub degenerate: bool,
}

impl ExponentPair {
    fn new(plus: Complex64) -> Self {
        ExponentPair {
            plus,
            minus: -plus,
            degenerate: plus == Complex64::new(0.0, 0.0),
        }
    }

    pub fn sum(&self) -> Complex64 {
        self.plus + self.minus
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(alpha.sqrt())
    } else {
        Err(Error::domain("alpha", alpha, 0.0, f64::INFINITY))
    }
}

/// `{0, i√α, −i√α, ∞}`.
pub fn singular_points(alpha: f64) -> Result<[SpherePoint; 4]> {
    let b = check_alpha(alpha)?;
    Ok([
        SpherePoint::Finite(Complex64::new(0.0, 0.0)),
        SpherePoint::Finite(Complex64::new(0.0, b)),
        SpherePoint::Finite(Complex64::new(0.0, -b)),
        SpherePoint::Infinity,
    ])
}

/// Roots of `ρ² + (λ² − m/α) = 0`: `±i√(λ² − m/α)` or `±√(m/α − λ²)`.
pub fn exponents_at_zero(lambda: f64, m: f64, alpha: f64) -> Result<ExponentPair> {
    check_alpha(alpha)?;
    let (l2, q) = (lambda * lambda, m / alpha);
    let d = l2 - q;
    if d.abs() <= 4.0 * f64::EPSILON * l2.max(q.abs()) {
        return Ok(ExponentPair::new(Complex64::new(0.0, 0.0)));
    }
    Ok(ExponentPair::new(if d > 0.0 {
        Complex64::new(0.0, d.sqrt())
    } else {
        Complex64::new((-d).sqrt(), 0.0)
    }))
}

/// `±iλ`, with the imaginary part of `plus` nonnegative.
pub fn exponents_at_infinity(lambda: f64) -> ExponentPair {
    ExponentPair::new(Complex64::new(0.0, lambda.abs()))
}

/// `x = (z − i√α)/(z + i√α)`; errors at the pole `z = −i√α`.
pub fn mobius_map(z: Complex64, alpha: f64) -> Result<Complex64> {
    let ib = Complex64::new(0.0, check_alpha(alpha)?);
    let den = z + ib;
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter(format!(
            "z = {z} is the pole of the Möbius map"
        )));
    }
    Ok((z - ib) / den)
}

/// [`mobius_map`] extended to the sphere: `∞ ↦ 1` and `−i√α ↦ ∞`.
pub fn mobius_map_sphere(p: SpherePoint, alpha: f64) -> Result<SpherePoint> {
    check_alpha(alpha)?;
    Ok(match p {
        SpherePoint::Infinity => SpherePoint::Finite(Complex64::new(1.0, 0.0)),
        SpherePoint::Finite(z) => match mobius_map(z, alpha) {
            Ok(x) => SpherePoint::Finite(x),
            Err(_) => SpherePoint::Infinity,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub alpha: f64,
    pub lambda: f64,
    pub m: f64,
    /// `0, i√α, −i√α, ∞`.
    pub points: [SpherePoint; 4],
    pub regular: [bool; 4],
    pub mobius_images: [SpherePoint; 4],
    pub exponents_at_zero: ExponentPair,
    pub exponents_at_infinity: ExponentPair,
    pub exponents_at_branch_points: String,
    pub class: String,
}

impl SingularityReport {
    pub fn compute(alpha: f64, lambda: f64, m: f64) -> Result<Self> {
        let points = singular_points(alpha)?;
        let mut images = [SpherePoint::Infinity; 4];
        for (img, p) in images.iter_mut().zip(points) {
            *img = mobius_map_sphere(p, alpha)?;
        }
        Ok(SingularityReport {
            alpha,
            lambda,
            m,
            points,
            regular: [true; 4],
            mobius_images: images,
            exponents_at_zero: exponents_at_zero(lambda, m, alpha)?,
            exponents_at_infinity: exponents_at_infinity(lambda),
            exponents_at_branch_points: "symbolic, unimplemented".into(),
            class: "Heun (four regular singular points)".into(),
        })
    }
}

/// `(P, R)` of the master equation at `t`.
pub fn master_coefficients(profile: &WarpProfile, m: f64, lambda: f64, t: f64) -> Result<(f64, f64)> {
    let (f, fp, fpp) = profile.eval_f_derivs(t)?;
    let f2 = f * f;
    let r = lambda * lambda - m * m / f2 + m * fp / f2 + fpp / (2.0 * f) - fp * fp / (4.0 * f2);
    Ok((fp / f, r))
}

/// `R − P'/2 − P²/4`, the potential after removing the first-derivative term.
pub fn liouville_potential(profile: &WarpProfile, m: f64, lambda: f64, t: f64) -> Result<f64> {
    let (f, fp, fpp) = profile.eval_f_derivs(t)?;
    let (p, r) = master_coefficients(profile, m, lambda, t)?;
    let dp = fpp / f - fp * fp / (f * f);
    Ok(r - 0.5 * dp - 0.25 * p * p)
}

/// Five-point derivative of samples on a uniform grid with spacing `h`.
fn differentiate(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    assert!(n >= 5, "five-point stencil needs at least five samples");
    let s = 1.0 / (12.0 * h);
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                -y[i + 2] + y[i + 1] * 8.0 - y[i - 1] * 8.0 + y[i - 2]
            } else if i == 0 {
                y[0] * -25.0 + y[1] * 48.0 - y[2] * 36.0 + y[3] * 16.0 - y[4] * 3.0
            } else if i == 1 {
                y[0] * -3.0 - y[1] * 10.0 + y[2] * 18.0 - y[3] * 6.0 + y[4]
            } else if i == n - 2 {
                -(y[n - 1] * -3.0 - y[n - 2] * 10.0 + y[n - 3] * 18.0 - y[n - 4] * 6.0 + y[n - 5])
            } else {
                -(y[n - 1] * -25.0 + y[n - 2] * 48.0 - y[n - 3] * 36.0 + y[n - 4] * 16.0 - y[n - 5] * 3.0)
            };
            d * s
        })
        .collect()
}

/// Sup-norm of `u'' + P u' + R u` for column `column` of a complex-basis
/// fundamental solution. `u'` comes from the first-order system; `u''` from
/// a five-point difference of `u'` on the grid.
pub fn second_order_residual(ctx: &ModeContext, sol: &FundamentalSolution, column: usize) -> Result<f64> {
    if sol.basis() != Basis::ComplexUV {
        return Err(Error::InvalidParameter("second-order residual needs the complex (u, v) basis".into()));
    }
    if column > 1 {
        return Err(Error::InvalidParameter(format!("column {column} out of range")));
    }
    if sol.grid().len() < 5 {
        return Err(Error::InvalidParameter("at least five grid points are needed".into()));
    }
    let lambda = sol.lambda();
    let grid = sol.grid();
    let du: Vec<Complex64> = grid
        .iter()
        .zip(sol.matrices())
        .map(|(&t, psi)| {
            let (q, p) = ctx.coefficients(t);
            complex_rhs(q, p, lambda, psi[0][column], psi[1][column]).0
        })
        .collect();
    let h = grid[1] - grid[0];
    let ddu = differentiate(&du, h);
    let mut worst = 0.0f64;
    for (i, &t) in grid.iter().enumerate() {
        let (p, r) = master_coefficients(ctx.profile(), ctx.m(), lambda, t)?;
        let u = sol.matrices()[i][0][column];
        worst = worst.max((ddu[i] + du[i] * p + u * r).norm());
    }
    Ok(worst)
}
