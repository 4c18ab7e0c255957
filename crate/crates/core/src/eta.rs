//! Circle η- and ξ-invariants of the boundary operator and the APS index in
//! constant gauge.
//!
//! The boundary spectrum `{k + A : k ∈ 𝒦}` is a shifted copy of `ℤ + ρ` with
//! `ρ ∈ (0, 1)`, and its η-invariant is `η = 1 − 2ρ`. The endpoint operators
//! are positive multiples of `∓B_A`, so their ξ-invariants cancel exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{SpinStructure, LATTICE_TOL};
use crate::warp::WarpProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoReduction {
    /// In the open interval `(0, 1)`.
    pub rho: f64,
    /// Integer part: shifted gauge `= ell_shift + rho`.
    pub ell_shift: i64,
}

/// Splits `A` (periodic) or `A + 1/2` (anti-periodic) into integer and
/// fractional parts.
pub fn reduce_rho(a: f64, spin: SpinStructure) -> Result<RhoReduction> {
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("gauge value {a} is not finite")));
    }
    let x = a + spin.offset();
    let n = x.floor();
    let rho = x - n;
    if rho <= LATTICE_TOL || rho >= 1.0 - LATTICE_TOL {
        return Err(Error::NonInvertibleBoundary(format!(
            "A = {a} puts a {spin:?} mode at k + A = 0"
        )));
    }
    Ok(RhoReduction {
        rho,
        ell_shift: n as i64,
    })
}

/// `η(B_A) = 1 − 2ρ`.
pub fn eta_circle(a: f64, spin: SpinStructure) -> Result<f64> {
    Ok(1.0 - 2.0 * reduce_rho(a, spin)?.rho)
}

/// `(ξ(B₀⁺), ξ(B_T⁺), sum)` with `ξ(B₀⁺) = −ξ(B_A)`, `ξ(B_T⁺) = ξ(B_A)`.
/// The sum is formed from the two literal values and is exactly zero. The
/// warp profile only rescales the endpoint operators, which leaves ξ fixed.
pub fn xi_endpoints(a: f64, spin: SpinStructure, _profile: &WarpProfile) -> Result<(f64, f64, f64)> {
    let xi = 0.5 * eta_circle(a, spin)?;
    let (left, right) = (-xi, xi);
    Ok((left, right, left + right))
}

/// APS index of the constant-gauge operator: the curvature term vanishes for
/// a flat connection and the endpoint ξ-invariants cancel.
pub fn aps_index_constant_gauge(a: f64, spin: SpinStructure, profile: &WarpProfile) -> Result<i64> {
    let curvature = 0.0;
    let (_, _, xi_sum) = xi_endpoints(a, spin, profile)?;
    Ok((curvature - xi_sum) as i64)
}

/// Everything the `eta` command reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaReport {
    pub a: f64,
    pub spin: SpinStructure,
    pub rho: f64,
    pub ell_shift: i64,
    pub eta: f64,
    pub xi: f64,
    pub xi_b0_plus: f64,
    pub xi_bt_plus: f64,
    pub xi_sum: f64,
    pub index: i64,
    /// `η(A) = −η(−A)` to 1e−12.
    pub odd_symmetry: bool,
}

impl EtaReport {
    pub fn compute(a: f64, spin: SpinStructure, profile: &WarpProfile) -> Result<Self> {
        let red = reduce_rho(a, spin)?;
        let eta = eta_circle(a, spin)?;
        let (xi_b0_plus, xi_bt_plus, xi_sum) = xi_endpoints(a, spin, profile)?;
        let index = aps_index_constant_gauge(a, spin, profile)?;
        let odd_symmetry = (eta + eta_circle(-a, spin)?).abs() <= 1e-12;
        Ok(EtaReport {
            a,
            spin,
            rho: red.rho,
            ell_shift: red.ell_shift,
            eta,
            xi: 0.5 * eta,
            xi_b0_plus,
            xi_bt_plus,
            xi_sum,
            index,
            odd_symmetry,
        })
    }
}
