//! Regularized endpoint family and spectral flow along gauge paths.
//!
//! The APS lines `{u = 0}` / `{w = 0}` jump when `m = k + A(s)` changes sign.
//! Replacing them by
//!
//! ```text
//! x(0) ∝ (1 − α₀, −(1 + α₀)),    (1 + α_T) u(T) + (1 − α_T) w(T) = 0,
//! α₀ = tanh(m/δ),  α_T = −α₀
//! ```
//!
//! gives a family that is continuous in `s`. At `λ = 0` the matching function
//! factors through `m (ℓ(T) − 2/δ)`, so for `δ ≠ 2/ℓ(T)` zero modes occur
//! exactly at boundary zeros `k + A(s) = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BlockingZero, Error, Result};
use crate::gauge::{allowed_modes, GaugePath};
use crate::modes::{BoundaryLine, ModeContext, SpinStructure};
use crate::ode::{real_system, solve_to_end, IntegratorConfig};
use crate::riccati::shoot_projective;
use crate::warp::WarpProfile;

/// Minimum distance of `δ` from `2/ℓ(T)`.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// `|A'|` above this makes a boundary zero transverse.
pub const CLASSIFY_TOL: f64 = 1e-8;
/// A point is a boundary zero when `|k + A(s)|` is at most this.
pub const BOUNDARY_ZERO_TOL: f64 = 1e-10;
/// Centered-difference step for `∂_λF`.
pub const LAMBDA_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    delta: f64,
}

impl RegularizationParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        Ok(RegularizationParams { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `2/ℓ(T)`, where the zero-mode criterion degenerates.
    pub fn threshold(profile: &WarpProfile) -> f64 {
        2.0 / profile.total_ell()
    }

    pub fn is_degenerate(&self, profile: &WarpProfile) -> bool {
        (self.delta - Self::threshold(profile)).abs() <= DEGENERACY_TOL
    }

    pub fn check_nondegenerate(&self, profile: &WarpProfile) -> Result<()> {
        if self.is_degenerate(profile) {
            Err(Error::DegenerateDelta {
                delta: self.delta,
                threshold: Self::threshold(profile),
            })
        } else {
            Ok(())
        }
    }
}

/// `(α₀, α_T) = (tanh(m/δ), −tanh(m/δ))`.
pub fn alpha_coeffs(m: f64, delta: f64) -> (f64, f64) {
    let a = (m / delta).tanh();
    (a, -a)
}

/// Regularized endpoint lines in `(u, w)` components. As `m/δ → ±∞` they
/// tend to the APS lines.
pub fn regularized_lines(m: f64, delta: f64) -> (BoundaryLine, BoundaryLine) {
    let (a0, at) = alpha_coeffs(m, delta);
    (
        BoundaryLine::new(1.0 + a0, 1.0 - a0).expect("tanh lies in (-1, 1)"),
        BoundaryLine::new(1.0 + at, 1.0 - at).expect("tanh lies in (-1, 1)"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingClass {
    Transverse,
    Touching,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub s_star: f64,
    pub k: f64,
    pub class: CrossingClass,
    /// Sign of `dλ/ds` at the crossing; 0 unless transverse.
    pub slope_sign: i8,
    /// `dλ/ds = −∂_sF/∂_λF`, transverse crossings only.
    pub slope: Option<f64>,
    pub a_prime: f64,
    pub a_second: f64,
}

/// What to do with touching boundary zeros when counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TouchingPolicy {
    #[default]
    Refuse,
    /// Touching zeros contribute 0; unclassified zeros are still refused.
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFlowReport {
    /// Upward zero crossings of eigenvalues counted +1.
    pub net: i64,
    pub per_mode: Vec<(f64, i64)>,
    pub crossings: Vec<CrossingRecord>,
    pub excluded_touching: usize,
    /// `A(s₂) − A(s₁)` when integral.
    pub winding: Option<i64>,
    /// `net / winding` when it is ±1.
    pub orientation: Option<i64>,
    pub delta: f64,
    pub threshold: f64,
}

/// A gauge path with the data needed to pose the regularized problem.
#[derive(Debug, Clone)]
pub struct RegularizedFamily {
    pub path: GaugePath,
    pub spin: SpinStructure,
    pub params: RegularizationParams,
    pub profile: WarpProfile,
    pub cfg: IntegratorConfig,
}

impl RegularizedFamily {
    pub fn new(
        path: GaugePath,
        spin: SpinStructure,
        delta: f64,
        profile: WarpProfile,
        cfg: IntegratorConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        Ok(RegularizedFamily {
            path,
            spin,
            params: RegularizationParams::new(delta)?,
            profile,
            cfg,
        })
    }

    pub fn delta(&self) -> f64 {
        self.params.delta()
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Ok(RegularizedFamily {
            params: RegularizationParams::new(delta)?,
            ..self.clone()
        })
    }

    pub fn with_config(&self, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(RegularizedFamily { cfg, ..self.clone() })
    }

    pub fn context(&self, s: f64, k: f64) -> Result<ModeContext> {
        ModeContext::new(k, self.path.a(s)?, self.spin, self.profile)
    }

    fn start(&self, ctx: &ModeContext) -> ((f64, f64), f64) {
        let (a0, at) = alpha_coeffs(ctx.m(), self.delta());
        ((1.0 - a0, -(1.0 + a0)), at)
    }

    /// `F(s, λ, k) = (1 + α_T) u(T) + (1 − α_T) w(T)` for the solution of the
    /// real system started on the regularized left line.
    pub fn matching_fn(&self, s: f64, lambda: f64, k: f64) -> Result<f64> {
        let ctx = self.context(s, k)?;
        let ((u0, w0), at) = self.start(&ctx);
        let y = solve_to_end(real_system(&ctx, lambda), [u0, w0, 0.0, 0.0], 0.0, self.profile.length(), &self.cfg)?;
        Ok((1.0 + at) * y[0] + (1.0 - at) * y[1])
    }

    /// Same as [`matching_fn`](Self::matching_fn) through the two-chart
    /// Riccati integration, which stays well conditioned across zeros of `u`.
    pub fn matching_fn_projective(&self, s: f64, lambda: f64, k: f64) -> Result<f64> {
        let ctx = self.context(s, k)?;
        let (x0, at) = self.start(&ctx);
        let end = shoot_projective(&ctx, lambda, x0, &self.cfg)?;
        Ok((1.0 + at) * end.x.0 + (1.0 - at) * end.x.1)
    }

    /// `(1 − tanh(m/δ))² e^{mℓ(T)} − (1 + tanh(m/δ))² e^{−mℓ(T)}`.
    pub fn matching_fn_zero_closed(&self, s: f64, k: f64) -> Result<f64> {
        let m = self.context(s, k)?.m();
        let t = (m / self.delta()).tanh();
        let x = m * self.profile.total_ell();
        Ok((1.0 - t).powi(2) * x.exp() - (1.0 + t).powi(2) * (-x).exp())
    }

    /// Boundary zeros of mode `k`: the `s` with `k + A(s) = 0`.
    pub fn zero_mode_criterion(&self, k: f64) -> Result<Vec<f64>> {
        self.params.check_nondegenerate(&self.profile)?;
        if !self.spin.contains(k) {
            return Err(Error::InvalidParameter(format!("mode k = {k} is not in the {:?} lattice", self.spin)));
        }
        Ok(self.path.level_set(-k))
    }

    /// `∂_sF(s★, 0, k) = 2 A'(s★) (ℓ(T) − 2/δ)` at a boundary zero.
    pub fn crossing_derivative(&self, s_star: f64, k: f64) -> Result<f64> {
        let m = k + self.path.a(s_star)?;
        if m.abs() > BOUNDARY_ZERO_TOL {
            return Err(Error::NotBoundaryZero { s: s_star, k, m });
        }
        let ap = self.path.a_prime(s_star)?;
        Ok(2.0 * ap * (self.profile.total_ell() - 2.0 / self.delta()))
    }

    /// `∂_λF(s, 0, k)` by centered differences, refined by Richardson
    /// extrapolation when the `h` and `h/2` estimates disagree.
    pub fn lambda_derivative(&self, s: f64, k: f64) -> Result<f64> {
        let d = |h: f64| -> Result<f64> {
            Ok((self.matching_fn(s, h, k)? - self.matching_fn(s, -h, k)?) / (2.0 * h))
        };
        let d1 = d(LAMBDA_STEP)?;
        let d2 = d(0.5 * LAMBDA_STEP)?;
        if (d1 - d2).abs() > 1e-3 * d2.abs() {
            Ok((4.0 * d2 - d1) / 3.0)
        } else {
            Ok(d1)
        }
    }

    fn classify(&self, s: f64, k: f64) -> Result<CrossingRecord> {
        let (_, a_prime, a_second) = self.path.eval(s);
        let class = if a_prime.abs() > CLASSIFY_TOL {
            CrossingClass::Transverse
        } else if a_second.abs() > CLASSIFY_TOL {
            CrossingClass::Touching
        } else {
            CrossingClass::Unclassified
        };
        let slope = if class == CrossingClass::Transverse {
            let ds = self.crossing_derivative(s, k)?;
            let dl = self.lambda_derivative(s, k)?;
            if dl == 0.0 || !dl.is_finite() {
                return Err(Error::Numerical(format!(
                    "∂λF vanishes at the crossing s = {s}, k = {k}"
                )));
            }
            Some(-ds / dl)
        } else {
            None
        };
        Ok(CrossingRecord {
            s_star: s,
            k,
            class,
            slope_sign: slope.map_or(0, |v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 }),
            slope,
            a_prime,
            a_second,
        })
    }

    /// Every boundary zero over all modes, classified, sorted by `(k, s)`.
    pub fn detect_crossings(&self) -> Result<Vec<CrossingRecord>> {
        self.path.check_endpoint_invertibility(self.spin, None)?;
        self.params.check_nondegenerate(&self.profile)?;
        let jobs: Vec<(f64, f64)> = allowed_modes(self.spin, &self.path)
            .into_iter()
            .map(|k| Ok(self.zero_mode_criterion(k)?.into_iter().map(move |s| (k, s))))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        jobs.par_iter().map(|&(k, s)| self.classify(s, k)).collect()
    }

    /// Net signed count of eigenvalues crossing zero upward.
    pub fn spectral_flow(&self, policy: TouchingPolicy) -> Result<SpectralFlowReport> {
        let crossings = self.detect_crossings()?;
        let blocking: Vec<BlockingZero> = crossings
            .iter()
            .filter(|c| match c.class {
                CrossingClass::Transverse => false,
                CrossingClass::Touching => policy == TouchingPolicy::Refuse,
                CrossingClass::Unclassified => true,
            })
            .map(|c| BlockingZero {
                k: c.k,
                s: c.s_star,
                a_prime: c.a_prime,
                a_second: c.a_second,
            })
            .collect();
        if !blocking.is_empty() {
            return Err(Error::NontransverseCrossing(blocking));
        }
        let mut per_mode: Vec<(f64, i64)> = Vec::new();
        for c in &crossings {
            match per_mode.last_mut() {
                Some((k, n)) if *k == c.k => *n += c.slope_sign as i64,
                _ => per_mode.push((c.k, c.slope_sign as i64)),
            }
        }
        let net: i64 = per_mode.iter().map(|x| x.1).sum();
        let winding = self.path.winding();
        let orientation = winding.and_then(|w| {
            (w != 0 && net % w == 0 && (net / w).abs() == 1).then_some(net / w)
        });
        Ok(SpectralFlowReport {
            net,
            per_mode,
            excluded_touching: crossings.iter().filter(|c| c.class == CrossingClass::Touching).count(),
            crossings,
            winding,
            orientation,
            delta: self.delta(),
            threshold: RegularizationParams::threshold(&self.profile),
        })
    }

    /// Eigenvalues of the regularized problem at fixed `s`: sign changes of
    /// `λ ↦ F(s, λ, k)` on `scan_points` nodes, bisected to 1e−12.
    pub fn eigenvalues_at(&self, s: f64, k: f64, lambda_min: f64, lambda_max: f64, scan_points: usize) -> Result<Vec<f64>> {
        let window = crate::spectrum::SpectralWindow::new(lambda_min, lambda_max, scan_points)?;
        let grid = window.grid();
        let vals = grid
            .par_iter()
            .map(|&l| self.matching_fn_projective(s, l, k))
            .collect::<Result<Vec<f64>>>()?;
        let mut roots = Vec::new();
        for i in 0..grid.len() - 1 {
            let (a, b) = (vals[i], vals[i + 1]);
            if a == 0.0 {
                roots.push(grid[i]);
            } else if b != 0.0 && (a < 0.0) != (b < 0.0) {
                let (mut lo, mut hi, mut flo) = (grid[i], grid[i + 1], a);
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.matching_fn_projective(s, mid, k)?;
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        if vals[grid.len() - 1] == 0.0 {
            roots.push(grid[grid.len() - 1]);
        }
        Ok(roots)
    }
}
