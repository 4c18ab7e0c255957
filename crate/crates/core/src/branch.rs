//! Predictor–corrector continuation of eigenvalue branches `s ↦ λ(s, k)` of
//! the regularized problem.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{CrossingClass, CrossingRecord, RegularizedFamily};

/// Residual `|F|` every accepted sample satisfies.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest accepted corrector move away from the predicted `λ`.
const JUMP_GUARD: f64 = 0.25;
/// Number of step halvings before a branch is abandoned.
const MAX_HALVINGS: u32 = 12;
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BranchSeed {
    Crossing(CrossingRecord),
    Point { s: f64, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchStatus {
    /// Reached both ends of the path.
    Complete,
    /// The corrector failed after repeated step halving.
    Terminated { forward: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub s: f64,
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub k: f64,
    /// Increasing in `s`.
    pub samples: Vec<BranchSample>,
    pub origin: BranchSeed,
    pub status: BranchStatus,
}

impl Branch {
    /// `λ` at a sampled `s`, if present.
    pub fn lambda_at(&self, s: f64) -> Option<f64> {
        self.samples.iter().find(|p| (p.s - s).abs() <= 1e-12).map(|p| p.lambda)
    }
}

impl RegularizedFamily {
    fn residual(&self, s: f64, lambda: f64, k: f64) -> Result<f64> {
        self.matching_fn_projective(s, lambda, k)
    }

    /// Secant iteration in `λ` at fixed `s`, started from `guess`.
    fn correct(&self, s: f64, guess: f64, k: f64) -> Result<Option<(f64, f64)>> {
        let (mut x0, mut x1) = (guess, guess + 1e-6);
        let (mut f0, mut f1) = (self.residual(s, x0, k)?, self.residual(s, x1, k)?);
        for _ in 0..40 {
            if f1 == 0.0 {
                break;
            }
            if f1 == f0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !x2.is_finite() || (x2 - guess).abs() > JUMP_GUARD {
                return Ok(None);
            }
            let f2 = self.residual(s, x2, k)?;
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = f2;
            if f1.abs() <= RESIDUAL_TOL && (x1 - x0).abs() <= 1e-13 * x1.abs().max(1.0) {
                break;
            }
        }
        Ok((f1.abs() <= RESIDUAL_TOL && (x1 - guess).abs() <= JUMP_GUARD).then_some((x1, f1.abs())))
    }

    /// `dλ/ds = −∂_sF/∂_λF` by centered differences.
    fn slope(&self, s: f64, lambda: f64, k: f64) -> Result<f64> {
        let (s1, s2) = self.path.s_range();
        let (lo, hi) = ((s - FD_STEP).max(s1), (s + FD_STEP).min(s2));
        let ds = (self.residual(hi, lambda, k)? - self.residual(lo, lambda, k)?) / (hi - lo);
        let dl = (self.residual(s, lambda + FD_STEP, k)? - self.residual(s, lambda - FD_STEP, k)?)
            / (2.0 * FD_STEP);
        Ok(if dl == 0.0 { 0.0 } else { -ds / dl })
    }

    /// Continues one direction from `(s0, λ0)`; returns the nominal samples
    /// `s0 ± i·Δs` (excluding `s0`) and whether the end of the path was reached.
    fn continue_dir(&self, s0: f64, l0: f64, k: f64, ds: f64) -> Result<(Vec<BranchSample>, bool)> {
        let (s1, s2) = self.path.s_range();
        let mut out = Vec::new();
        let (mut s, mut l) = (s0, l0);
        let mut i = 1;
        loop {
            let target = s0 + i as f64 * ds;
            if target < s1 - 1e-12 || target > s2 + 1e-12 {
                return Ok((out, true));
            }
            let target = target.clamp(s1, s2);
            let mut h = target - s;
            let mut halvings = 0;
            while s != target {
                let next = if (target - s).abs() <= h.abs() * (1.0 + 1e-9) { target } else { s + h };
                let pred = l + self.slope(s, l, k)? * (next - s);
                match self.correct(next, pred, k)? {
                    Some((lc, _)) => {
                        s = next;
                        l = lc;
                    }
                    None => {
                        halvings += 1;
                        if halvings > MAX_HALVINGS {
                            return Ok((out, false));
                        }
                        h *= 0.5;
                    }
                }
            }
            out.push(BranchSample {
                s,
                lambda: l,
                residual: self.residual(s, l, k)?.abs(),
            });
            i += 1;
        }
    }

    /// Tracks the branch through `seed` in both directions with nominal step
    /// `ds`. A crossing seed starts at `(s★, 0)`.
    pub fn track_branch(&self, seed: BranchSeed, k: f64, ds: f64) -> Result<Branch> {
        if !(ds.is_finite() && ds > 0.0) {
            return Err(Error::InvalidParameter(format!("branch step must be positive, got {ds}")));
        }
        let (s0, guess) = match seed {
            BranchSeed::Crossing(c) => {
                if c.class != CrossingClass::Transverse {
                    return Err(Error::InvalidParameter(
                        "branches are seeded only at transverse crossings".into(),
                    ));
                }
                (c.s_star, 0.0)
            }
            BranchSeed::Point { s, lambda } => (s, lambda),
        };
        self.path.a(s0)?;
        let r0 = self.residual(s0, guess, k)?;
        let (l0, r0) = if r0.abs() <= RESIDUAL_TOL {
            (guess, r0.abs())
        } else {
            self.correct(s0, guess, k)?.ok_or_else(|| {
                Error::Numerical(format!("seed (s = {s0}, λ = {guess}) is not on a branch of mode k = {k}"))
            })?
        };
        let (back, fwd) = rayon::join(
            || self.continue_dir(s0, l0, k, -ds),
            || self.continue_dir(s0, l0, k, ds),
        );
        let ((back, back_ok), (fwd, fwd_ok)) = (back?, fwd?);
        let mut samples: Vec<BranchSample> = back.into_iter().rev().collect();
        samples.push(BranchSample {
            s: s0,
            lambda: l0,
            residual: r0,
        });
        samples.extend(fwd);
        let status = match (back_ok, fwd_ok) {
            (true, true) => BranchStatus::Complete,
            (false, _) => BranchStatus::Terminated { forward: false },
            (true, false) => BranchStatus::Terminated { forward: true },
        };
        Ok(Branch {
            k,
            samples,
            origin: seed,
            status,
        })
    }

    /// Branches through every transverse crossing and through every
    /// eigenvalue in `[−λ_max, λ_max]` at the start of the path, for the
    /// given modes. Branches that coincide with an earlier one are dropped.
    pub fn track_all(&self, modes: &[f64], lambda_max: f64, scan_points: usize, ds: f64) -> Result<Vec<Branch>> {
        let crossings = self.detect_crossings()?;
        let (s1, _) = self.path.s_range();
        let mut seeds: Vec<(f64, BranchSeed)> = crossings
            .iter()
            .filter(|c| c.class == CrossingClass::Transverse && modes.contains(&c.k))
            .map(|c| (c.k, BranchSeed::Crossing(*c)))
            .collect();
        for &k in modes {
            for lambda in self.eigenvalues_at(s1, k, -lambda_max, lambda_max, scan_points)? {
                seeds.push((k, BranchSeed::Point { s: s1, lambda }));
            }
        }
        let tracked = seeds
            .par_iter()
            .map(|&(k, seed)| self.track_branch(seed, k, ds))
            .collect::<Result<Vec<Branch>>>()?;
        let mut out: Vec<Branch> = Vec::new();
        for b in tracked {
            let dup = out.iter().any(|o| {
                o.k == b.k
                    && b.samples.iter().any(|p| o.lambda_at(p.s).is_some_and(|l| (l - p.lambda).abs() <= 1e-6))
            });
            if !dup {
                out.push(b);
            }
        }
        out.sort_by(|a, b| a.k.total_cmp(&b.k).then(a.samples[0].lambda.total_cmp(&b.samples[0].lambda)));
        Ok(out)
    }
}
