//! Adaptive Dormand–Prince 5(4) integration of the mode systems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{complex_rhs, ModeContext};
use crate::warp::WarpProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper step bound; clipped to the cylinder length.
    pub max_step: f64,
    pub min_step: f64,
    /// Points of the uniform dense-output grid, endpoints included.
    pub grid_points: usize,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.1,
            min_step: 1e-14,
            grid_points: 257,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    /// Default configuration with `rel_tol = tol` and `abs_tol = tol/100`.
    pub fn with_tolerance(tol: f64) -> Self {
        IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            ..Default::default()
        }
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            v.push(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            v.push(format!("abs_tol must be positive, got {}", self.abs_tol));
        }
        if !(self.min_step.is_finite() && self.min_step > 0.0) {
            v.push(format!("min_step must be positive, got {}", self.min_step));
        }
        if !(self.max_step.is_finite() && self.max_step >= self.min_step) {
            v.push(format!(
                "max_step must be finite and at least min_step, got {}",
                self.max_step
            ));
        }
        if self.grid_points < 2 {
            v.push(format!("grid_points must be at least 2, got {}", self.grid_points));
        }
        if self.max_steps == 0 {
            v.push("max_steps must be positive".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().as_slice() {
            [] => Ok(()),
            msgs => Err(Error::InvalidParameter(msgs.join("; "))),
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Quartic dense-output interpolant of one accepted step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.cont;
        std::array::from_fn(|i| {
            c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])))
        })
    }
}

/// Step-by-step driver. The state may be replaced between steps, which the
/// two-chart Riccati integration uses at chart switches.
pub(crate) struct Dopri<const N: usize, F> {
    rhs: F,
    t: f64,
    t_end: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    max_step: f64,
    cfg: IntegratorConfig,
    steps: usize,
}

impl<const N: usize, F> Dopri<N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], t_end: f64, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let k1 = rhs(t0, &y0);
        let max_step = cfg.max_step.min(t_end - t0);
        let mut d = Dopri {
            rhs,
            t: t0,
            t_end,
            y: y0,
            k1,
            h: 0.0,
            max_step,
            cfg: *cfg,
            steps: 0,
        };
        d.h = d.initial_step();
        Ok(d)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn done(&self) -> bool {
        self.t >= self.t_end
    }

    /// Replaces the current state; the step size is kept.
    pub fn reset_state(&mut self, y: [f64; N]) {
        self.y = y;
        self.k1 = (self.rhs)(self.t, &y);
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.cfg.abs_tol + self.cfg.rel_tol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> f64 {
        let rms = |v: &[f64; N], sc: &dyn Fn(usize) -> f64| {
            (v.iter().enumerate().map(|(i, x)| (x / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt()
        };
        let y0 = self.y;
        let sk = |i: usize| self.cfg.abs_tol + self.cfg.rel_tol * y0[i].abs();
        let d0 = rms(&y0, &sk);
        let d1 = rms(&self.k1, &sk);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.max_step);
        let y1: [f64; N] = std::array::from_fn(|i| y0[i] + h0 * self.k1[i]);
        let f1 = (self.rhs)(self.t + h0, &y1);
        let diff: [f64; N] = std::array::from_fn(|i| f1[i] - self.k1[i]);
        let d2 = rms(&diff, &sk) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.max_step).max(self.cfg.min_step)
    }

    /// Takes one accepted step. Returns `None` once `t_end` is reached.
    pub fn advance(&mut self) -> Result<Option<DenseStep<N>>> {
        if self.done() {
            return Ok(None);
        }
        let mut rejected = false;
        loop {
            self.steps += 1;
            if self.steps > self.cfg.max_steps {
                return Err(Error::StepLimit {
                    t: self.t,
                    steps: self.cfg.max_steps,
                });
            }
            let remaining = self.t_end - self.t;
            let mut h = self.h.min(self.max_step);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            } else if h < self.cfg.min_step {
                return Err(Error::StepUnderflow { t: self.t, h });
            }
            let (t, y, k1) = (self.t, self.y, self.k1);
            let stage = |coef: &[(f64, &[f64; N])]| -> [f64; N] {
                std::array::from_fn(|i| y[i] + h * coef.iter().map(|(c, k)| c * k[i]).sum::<f64>())
            };
            let rhs = &mut self.rhs;
            let k2 = rhs(t + C2 * h, &stage(&[(A21, &k1)]));
            let k3 = rhs(t + C3 * h, &stage(&[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(t + C4 * h, &stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = rhs(
                t + C5 * h,
                &stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                t + h,
                &stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y1 = stage(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let t1 = if last { self.t_end } else { t + h };
            let k7 = rhs(t1, &y1);

            let mut acc = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                acc += (e / self.scale(y[i], y1[i])).powi(2);
            }
            let err = (acc / N as f64).sqrt();
            if !err.is_finite() {
                if h <= self.cfg.min_step {
                    return Err(Error::Numerical(format!("non-finite state near t = {t}")));
                }
                self.h = h * 0.2;
                rejected = true;
                continue;
            }
            if err <= 1.0 {
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let fac = if rejected { fac.min(1.0) } else { fac };
                let mut cont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k7[i] - bspl;
                    cont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                self.t = t1;
                self.y = y1;
                self.k1 = k7;
                if !last {
                    self.h = h * fac;
                }
                return Ok(Some(DenseStep { t0: t, h, cont }));
            }
            self.h = h * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            rejected = true;
        }
    }
}

/// State at `t_end`.
pub(crate) fn solve_to_end<const N: usize>(
    rhs: impl FnMut(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<[f64; N]> {
    let mut d = Dopri::new(rhs, t0, y0, t_end, cfg)?;
    while d.advance()?.is_some() {}
    Ok(*d.y())
}

/// Uniform grid of `n` points on `[0, t_end]` with exact endpoints.
pub(crate) fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    let h = t_end / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { t_end } else { i as f64 * h })
        .collect()
}

/// States on a uniform grid of `cfg.grid_points` points over `[0, t_end]`.
pub(crate) fn solve_on_grid<const N: usize>(
    rhs: impl FnMut(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, Vec<[f64; N]>)> {
    cfg.validate()?;
    let grid = uniform_grid(t_end, cfg.grid_points);
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    let mut d = Dopri::new(rhs, 0.0, y0, t_end, cfg)?;
    let mut next = 1;
    while let Some(step) = d.advance()? {
        while next < grid.len() - 1 && grid[next] <= d.t() {
            out.push(step.eval(grid[next]));
            next += 1;
        }
    }
    out.push(*d.y());
    Ok((grid, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// `(u, v)` components of the complex system.
    ComplexUV,
    /// `(u, w)` components of the real system.
    RealUW,
}

/// Fundamental matrix `Ψ(t)` with `Ψ(0) = I`; column `j` is the solution
/// started from the `j`-th unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution {
    lambda: f64,
    basis: Basis,
    grid: Vec<f64>,
    matrices: Vec<[[Complex64; 2]; 2]>,
}

impl FundamentalSolution {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn matrices(&self) -> &[[[Complex64; 2]; 2]] {
        &self.matrices
    }

    pub fn at_end(&self) -> [[Complex64; 2]; 2] {
        *self.matrices.last().expect("grid has at least two points")
    }

    pub fn determinants(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.matrices.iter().map(|p| p[0][0] * p[1][1] - p[0][1] * p[1][0])
    }
}

pub(crate) fn complex_system<'a>(
    ctx: &'a ModeContext,
    lambda: f64,
) -> impl Fn(f64, &[f64; 8]) -> [f64; 8] + 'a {
    move |t, y| {
        let (q, p) = ctx.coefficients(t);
        let mut out = [0.0; 8];
        for col in 0..2 {
            let o = 4 * col;
            let u = Complex64::new(y[o], y[o + 1]);
            let v = Complex64::new(y[o + 2], y[o + 3]);
            let (du, dv) = complex_rhs(q, p, lambda, u, v);
            out[o] = du.re;
            out[o + 1] = du.im;
            out[o + 2] = dv.re;
            out[o + 3] = dv.im;
        }
        out
    }
}

pub(crate) fn real_system<'a>(
    ctx: &'a ModeContext,
    lambda: f64,
) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + 'a {
    move |t, y| {
        let (_, p) = ctx.coefficients(t);
        let mut out = [0.0; 4];
        for o in [0, 2] {
            out[o] = p * y[o] + lambda * y[o + 1];
            out[o + 1] = -p * y[o + 1] - lambda * y[o];
        }
        out
    }
}

/// Propagates the 2×2 matrix system from `Ψ(0) = I` to `T`.
pub fn integrate_fundamental(
    ctx: &ModeContext,
    lambda: f64,
    basis: Basis,
    cfg: &IntegratorConfig,
) -> Result<FundamentalSolution> {
    let t_end = ctx.profile().length();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (grid, matrices) = match basis {
        Basis::ComplexUV => {
            let y0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
            let (grid, ys) = solve_on_grid(complex_system(ctx, lambda), y0, t_end, cfg)?;
            let m = ys
                .iter()
                .map(|y| [[c(y[0], y[1]), c(y[4], y[5])], [c(y[2], y[3]), c(y[6], y[7])]])
                .collect();
            (grid, m)
        }
        Basis::RealUW => {
            let y0 = [1.0, 0.0, 0.0, 1.0];
            let (grid, ys) = solve_on_grid(real_system(ctx, lambda), y0, t_end, cfg)?;
            let m = ys
                .iter()
                .map(|y| [[c(y[0], 0.0), c(y[2], 0.0)], [c(y[1], 0.0), c(y[3], 0.0)]])
                .collect();
            (grid, m)
        }
    };
    Ok(FundamentalSolution {
        lambda,
        basis,
        grid,
        matrices,
    })
}

/// `|f(t)·det Ψ(t) − f(0)|` (complex basis) or `|det Ψ(t) − 1|` (real basis)
/// along the grid.
pub fn wronskian_drift(sol: &FundamentalSolution, profile: &WarpProfile) -> Vec<(f64, f64)> {
    let f0 = profile.f_unchecked(0.0);
    sol.grid
        .iter()
        .zip(sol.determinants())
        .map(|(&t, det)| {
            let drift = match sol.basis {
                Basis::ComplexUV => (det * profile.f_unchecked(t) - f0).norm(),
                Basis::RealUW => (det - 1.0).norm(),
            };
            (t, drift)
        })
        .collect()
}
