//! Projective integration of the real mode system.
//!
//! The ratio `r = w/u` satisfies
//! `r' = −2(m/f) r − λ(1 + r²)` and its inverse `q = u/w` satisfies
//! `q' = 2(m/f) q + λ(1 + q²)`. Integration runs in whichever chart keeps the
//! ratio bounded by 2 and switches charts beyond that, so zeros of `u` are
//! crossed without blow-up. The log-amplitude of the chart's denominator and
//! an integer lift of the polar angle are carried along, so the endpoint
//! vector itself is recoverable.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::modes::ModeContext;
use crate::ode::{uniform_grid, Dopri, IntegratorConfig};

const SWITCH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Chart {
    /// `r = w/u`, log-amplitude `ln|u|`.
    R,
    /// `q = u/w`, log-amplitude `ln|w|`.
    Q,
}

/// Output of [`integrate_riccati`].
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    /// `r(T)`; infinite when `u(T) = 0`.
    pub r_end: f64,
    /// Number of zeros of `u` on `(0, T)`, i.e. poles of `r` passed.
    pub pole_passages: usize,
    /// Uniform grid of `cfg.grid_points` points.
    pub grid: Vec<f64>,
    /// `r` on the grid.
    pub ratio: Vec<f64>,
}

/// Endpoint of a projective shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ProjectiveEnd {
    pub x: (f64, f64),
    pub pole_passages: usize,
}

struct Lift {
    chart: Chart,
    ratio: f64,
    log_amp: f64,
    turns: f64,
}

impl Lift {
    fn new(u: f64, w: f64) -> Self {
        let (chart, ratio, log_amp) = if u.abs() >= w.abs() {
            (Chart::R, w / u, u.abs().ln())
        } else {
            (Chart::Q, u / w, w.abs().ln())
        };
        let mut l = Lift {
            chart,
            ratio,
            log_amp,
            turns: 0.0,
        };
        l.turns = ((w.atan2(u) - l.base()) / std::f64::consts::PI).round();
        l
    }

    fn base(&self) -> f64 {
        match self.chart {
            Chart::R => self.ratio.atan(),
            Chart::Q => std::f64::consts::FRAC_PI_2 - self.ratio.atan(),
        }
    }

    fn angle(&self) -> f64 {
        self.base() + self.turns * std::f64::consts::PI
    }

    fn vector(&self) -> (f64, f64) {
        let norm = self.log_amp.exp() * self.ratio.hypot(1.0);
        let (s, c) = self.angle().sin_cos();
        (norm * c, norm * s)
    }

    /// Switches chart when the ratio leaves `[−2, 2]`.
    fn maybe_switch(&mut self) -> bool {
        if self.ratio.abs() <= SWITCH {
            return false;
        }
        let x = self.ratio;
        self.log_amp += x.abs().ln();
        self.ratio = 1.0 / x;
        match self.chart {
            Chart::R => {
                self.chart = Chart::Q;
                if x < 0.0 {
                    self.turns -= 1.0;
                }
            }
            Chart::Q => {
                self.chart = Chart::R;
                if x < 0.0 {
                    self.turns += 1.0;
                }
            }
        }
        true
    }

    fn r(&self) -> f64 {
        match self.chart {
            Chart::R => self.ratio,
            Chart::Q => 1.0 / self.ratio,
        }
    }
}

fn min_warp(ctx: &ModeContext) -> f64 {
    let p = ctx.profile();
    let t_min = (0.5 * p.alpha().ln()).clamp(0.0, p.length());
    [0.0, p.length(), t_min]
        .into_iter()
        .map(|t| p.f_unchecked(t))
        .fold(f64::INFINITY, f64::min)
}

fn shoot(
    ctx: &ModeContext,
    lambda: f64,
    x0: (f64, f64),
    cfg: &IntegratorConfig,
    mut record: Option<(&[f64], &mut Vec<f64>)>,
) -> Result<(Lift, usize)> {
    if !(x0.0.is_finite() && x0.1.is_finite()) || (x0.0 == 0.0 && x0.1 == 0.0) {
        return Err(Error::InvalidParameter("initial vector must be finite and nonzero".into()));
    }
    let t_end = ctx.profile().length();
    // The polar angle moves at most |λ| + |m|/f per unit t, so this cap keeps
    // each step well inside one chart.
    let cap = 0.25 / (lambda.abs() + ctx.m().abs() / min_warp(ctx) + 1.0);
    let cfg = IntegratorConfig {
        max_step: cfg.max_step.min(cap),
        ..*cfg
    };
    let mut lift = Lift::new(x0.0, x0.1);
    let chart = Cell::new(lift.chart);
    let rhs = |t: f64, y: &[f64; 2]| {
        let (_, p) = ctx.coefficients(t);
        let x = y[0];
        match chart.get() {
            Chart::R => [-2.0 * p * x - lambda * (1.0 + x * x), p + lambda * x],
            Chart::Q => [2.0 * p * x + lambda * (1.0 + x * x), -p - lambda * x],
        }
    };
    let mut d = Dopri::new(rhs, 0.0, [lift.ratio, lift.log_amp], t_end, &cfg)?;
    let mut poles = 0;
    let mut next = 1;
    if let Some((_, out)) = record.as_mut() {
        out.push(lift.r());
    }
    loop {
        let prev = lift.ratio;
        let step = match d.advance()? {
            Some(s) => s,
            None => break,
        };
        let y = *d.y();
        if let Some((grid, out)) = record.as_mut() {
            while next < grid.len() - 1 && grid[next] <= d.t() {
                let x = step.eval(grid[next])[0];
                out.push(if lift.chart == Chart::R { x } else { 1.0 / x });
                next += 1;
            }
        }
        lift.ratio = y[0];
        lift.log_amp = y[1];
        if lift.chart == Chart::Q && (prev < 0.0) != (y[0] < 0.0) && prev != 0.0 {
            poles += 1;
        }
        if lift.maybe_switch() {
            chart.set(lift.chart);
            d.reset_state([lift.ratio, lift.log_amp]);
        }
    }
    if let Some((_, out)) = record.as_mut() {
        out.push(lift.r());
    }
    Ok((lift, poles))
}

/// Integrates the real system projectively from `x0` and returns the
/// endpoint vector.
pub(crate) fn shoot_projective(
    ctx: &ModeContext,
    lambda: f64,
    x0: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<ProjectiveEnd> {
    let (lift, pole_passages) = shoot(ctx, lambda, x0, cfg, None)?;
    Ok(ProjectiveEnd {
        x: lift.vector(),
        pole_passages,
    })
}

/// Integrates the ratio `r = w/u` from `r(0) = r0` across poles of `r`.
pub fn integrate_riccati(
    ctx: &ModeContext,
    lambda: f64,
    r0: f64,
    cfg: &IntegratorConfig,
) -> Result<RiccatiSolution> {
    if r0.is_nan() {
        return Err(Error::InvalidParameter("r0 is NaN".into()));
    }
    cfg.validate()?;
    let x0 = if r0.is_infinite() { (0.0, 1.0) } else { (1.0, r0) };
    let grid = uniform_grid(ctx.profile().length(), cfg.grid_points);
    let mut ratio = Vec::with_capacity(grid.len());
    let (lift, pole_passages) = shoot(ctx, lambda, x0, cfg, Some((&grid, &mut ratio)))?;
    Ok(RiccatiSolution {
        r_end: lift.r(),
        pole_passages,
        grid,
        ratio,
    })
}
