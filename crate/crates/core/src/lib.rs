//! Modewise spectral analysis of the Dirac operator on a warped cylinder
//! `[0, T] × S¹` with metric `dt² + f(t)² dθ²` and a constant-in-`t` gauge
//! potential.

pub mod error;
pub mod branch;
pub mod eta;
pub mod flow;
pub mod gauge;
pub mod heun;
pub mod modes;
pub mod ode;
pub mod riccati;
pub mod spectrum;
pub mod warp;

pub use error::{Error, Result};

// The guide's listings run as doctests; one module per chapter keeps
// failures traceable to their source file.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/eta.md")]
    mod eta {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/singularities.md")]
    mod singularities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
