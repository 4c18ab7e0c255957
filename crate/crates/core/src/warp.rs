//! The warp factor `f(t) = e^t + α e^{-t}` on `[0, T]` and the quantities
//! derived from it: derivatives, the accumulated length
//! `ℓ(t) = ∫₀ᵗ dτ / f(τ)` and the Liouville effective potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A smooth positive warp factor on `[0, T]`.
///
/// Only [`WarpProfile`] implements this today; the shooting code works with
/// the concrete profile because the closed-form zero-mode results need `ℓ`
/// in closed form.
pub trait WarpFactor {
    /// Cylinder length `T`.
    fn length(&self) -> f64;
    /// `(f, f', f'')` at `t`.
    fn derivs(&self, t: f64) -> Result<(f64, f64, f64)>;
    /// `ℓ(t) = ∫₀ᵗ dτ / f(τ)`.
    fn ell(&self, t: f64) -> Result<f64>;
}

/// `f(t) = e^t + α e^{-t}` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpProfile {
    alpha: f64,
    length: f64,
}

impl WarpProfile {
    pub fn new(alpha: f64, length: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "warp parameter alpha must be positive, got {alpha}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cylinder length T must be positive, got {length}"
            )));
        }
        Ok(WarpProfile { alpha, length })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    fn check(&self, t: f64) -> Result<()> {
        if (0.0..=self.length).contains(&t) {
            Ok(())
        } else {
            Err(Error::domain("t", t, 0.0, self.length))
        }
    }

    pub fn eval_f(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.f_unchecked(t))
    }

    pub fn eval_f_derivs(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check(t)?;
        Ok(self.derivs_unchecked(t))
    }

    /// Closed form `ℓ(t) = α^{-1/2} [atan(e^t/√α) − atan(1/√α)]`, evaluated
    /// through the arctangent subtraction formula to avoid cancellation at
    /// small `t`.
    pub fn eval_ell(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.ell_unchecked(t))
    }

    /// `ℓ(T)`.
    pub fn total_ell(&self) -> f64 {
        self.ell_unchecked(self.length)
    }

    /// Liouville potential `λ² − m²/f² + m f'/f²`.
    pub fn eval_potential(&self, m: f64, lambda: f64, t: f64) -> Result<f64> {
        self.check(t)?;
        let (f, fp, _) = self.derivs_unchecked(t);
        Ok(lambda * lambda - m * m / (f * f) + m * fp / (f * f))
    }

    pub(crate) fn f_unchecked(&self, t: f64) -> f64 {
        t.exp() + self.alpha * (-t).exp()
    }

    pub(crate) fn derivs_unchecked(&self, t: f64) -> (f64, f64, f64) {
        let (ep, em) = (t.exp(), self.alpha * (-t).exp());
        (ep + em, ep - em, ep + em)
    }

    pub(crate) fn ell_unchecked(&self, t: f64) -> f64 {
        let sa = self.alpha.sqrt();
        let num = sa * t.exp_m1();
        let den = self.alpha + t.exp();
        (num / den).atan() / sa
    }
}

impl WarpFactor for WarpProfile {
    fn length(&self) -> f64 {
        self.length
    }

    fn derivs(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.eval_f_derivs(t)
    }

    fn ell(&self, t: f64) -> Result<f64> {
        self.eval_ell(t)
    }
}
