//! Modewise APS spectrum by shooting.
//!
//! For `m > 0` the left condition `u(0) = 0` fixes the solution started from
//! `(u, v) = (0, 1)` and the eigenvalues are the zeros of `λ ↦ v(T)`; for
//! `m < 0` the solution starts from `(1, 0)` and the zeros of `u(T)` are
//! taken. Real `u` with imaginary `v` (and the reverse) is preserved by the
//! system, so the returned value is real.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{aps_boundary_functionals, complex_rhs, ModeContext};
use crate::ode::{complex_system, solve_to_end, IntegratorConfig};

/// Largest tolerated ratio of discarded to kept component of `F_k`.
const PHASE_RESIDUE: f64 = 1e-10;

/// Bisection stops once the bracket is at most this wide.
pub const ROOT_BRACKET: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    lambda_min: f64,
    lambda_max: f64,
    scan_points: usize,
}

impl SpectralWindow {
    pub fn new(lambda_min: f64, lambda_max: f64, scan_points: usize) -> Result<Self> {
        if !(lambda_min.is_finite() && lambda_max.is_finite() && lambda_min < lambda_max) {
            return Err(Error::InvalidParameter(format!(
                "spectral window [{lambda_min}, {lambda_max}] is empty or not finite"
            )));
        }
        if scan_points < 2 {
            return Err(Error::InvalidParameter(format!(
                "scan_points must be at least 2, got {scan_points}"
            )));
        }
        Ok(SpectralWindow {
            lambda_min,
            lambda_max,
            scan_points,
        })
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn scan_points(&self) -> usize {
        self.scan_points
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.scan_points - 1;
        let h = (self.lambda_max - self.lambda_min) / n as f64;
        (0..=n)
            .map(|i| if i == n { self.lambda_max } else { self.lambda_min + i as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub lambda: f64,
    /// `|F_k(λ)|` at the reported root.
    pub residual: f64,
    /// Width of the final sign-change bracket.
    pub bracket: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub k: f64,
    /// Increasing in `λ`.
    pub roots: Vec<Root>,
}

/// Modewise characteristic function `F_k(λ)`; its zeros are the APS
/// eigenvalues of the mode. At `λ = 0` it equals `√(f(0)/f(T))·e^{−|m|ℓ(T)}`.
pub fn char_fn(ctx: &ModeContext, lambda: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let m = ctx.require_invertible()?;
    let y0 = if m > 0.0 { [0.0, 0.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0, 0.0] };
    let rhs = |t: f64, y: &[f64; 4]| {
        let (q, p) = ctx.coefficients(t);
        let (du, dv) = complex_rhs(
            q,
            p,
            lambda,
            Complex64::new(y[0], y[1]),
            Complex64::new(y[2], y[3]),
        );
        [du.re, du.im, dv.re, dv.im]
    };
    let y = solve_to_end(rhs, y0, 0.0, ctx.profile().length(), cfg)?;
    let (keep, drop) = if m > 0.0 { (y[2], y[3]) } else { (y[0], y[1]) };
    if drop.abs() > PHASE_RESIDUE * keep.abs().max(PHASE_RESIDUE) {
        return Err(Error::Numerical(format!(
            "characteristic function lost its real normalization at λ = {lambda}"
        )));
    }
    Ok(keep)
}

/// Determinant of the 2×2 boundary matrix built from the APS functionals and
/// the fundamental pair `Ψ·M`. Equals `det M · F_k(λ)` for `m > 0` and
/// `−det M · F_k(λ)` for `m < 0`.
pub fn char_fn_determinant(
    ctx: &ModeContext,
    lambda: f64,
    pair: [[f64; 2]; 2],
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let aps = aps_boundary_functionals(ctx)?;
    let det_m = pair[0][0] * pair[1][1] - pair[0][1] * pair[1][0];
    if !(det_m.is_finite() && det_m != 0.0) {
        return Err(Error::InvalidParameter("fundamental pair change must be invertible".into()));
    }
    let y0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let y = solve_to_end(complex_system(ctx, lambda), y0, 0.0, ctx.profile().length(), cfg)?;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let psi_t = [[c(y[0], y[1]), c(y[4], y[5])], [c(y[2], y[3]), c(y[6], y[7])]];
    let column = |psi: &[[Complex64; 2]; 2], j: usize| -> (Complex64, Complex64) {
        let (a, b) = (pair[0][j], pair[1][j]);
        (psi[0][0] * a + psi[0][1] * b, psi[1][0] * a + psi[1][1] * b)
    };
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let psi_0 = [[one, zero], [zero, one]];
    let row = |line: &crate::modes::BoundaryLine, psi: &[[Complex64; 2]; 2]| {
        let (a, b) = line.coeffs();
        let (u1, v1) = column(psi, 0);
        let (u2, v2) = column(psi, 1);
        (u1 * a + v1 * b, u2 * a + v2 * b)
    };
    let (b00, b01) = row(&aps.left, &psi_0);
    let (b10, b11) = row(&aps.right, &psi_t);
    Ok((b00 * b11 - b01 * b10).re)
}

/// Roots of `F_k` in the window: sign changes on the scan grid refined by
/// bisection. Tangential zeros without a sign change are not reported.
pub fn find_eigenvalues(
    ctx: &ModeContext,
    window: &SpectralWindow,
    cfg: &IntegratorConfig,
) -> Result<EigenvalueList> {
    ctx.require_invertible()?;
    cfg.validate()?;
    let grid = window.grid();
    let values = grid
        .par_iter()
        .map(|&l| char_fn(ctx, l, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let brackets: Vec<(f64, f64, f64, f64)> = grid
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0] != 0.0 && v[1] != 0.0 && (v[0] < 0.0) != (v[1] < 0.0))
        .map(|(l, v)| (l[0], l[1], v[0], v[1]))
        .collect();
    let mut roots = brackets
        .par_iter()
        .map(|&(lo, hi, flo, _)| refine(ctx, lo, hi, flo, cfg))
        .collect::<Result<Vec<Root>>>()?;
    roots.extend(grid.iter().zip(&values).filter(|(_, &v)| v == 0.0).map(|(&l, _)| Root {
        lambda: l,
        residual: 0.0,
        bracket: 0.0,
    }));
    roots.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(EigenvalueList { k: ctx.k(), roots })
}

fn refine(ctx: &ModeContext, mut lo: f64, mut hi: f64, mut flo: f64, cfg: &IntegratorConfig) -> Result<Root> {
    while hi - lo > ROOT_BRACKET {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = char_fn(ctx, mid, cfg)?;
        if fm == 0.0 {
            return Ok(Root {
                lambda: mid,
                residual: 0.0,
                bracket: 0.0,
            });
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    Ok(Root {
        lambda,
        residual: char_fn(ctx, lambda, cfg)?.abs(),
        bracket: hi - lo,
    })
}
