//! Numerical special geometry for horizontal slices of the period domain of
//! Calabi–Yau threefolds.
//!
//! Starting from a holomorphic prepotential `u`, the crate builds the period
//! vector `Ω` as a Taylor jet, then derives the Weil-Petersson metric, the
//! Yukawa cubic form, the Hodge metric and the curvature tensors of both,
//! the projection of the Hodge filtration to Siegel space, and numerical
//! checks of the curvature bounds and of the degeneration estimate.

#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod error;
pub mod fd;
pub mod fixtures;
pub mod hodge_geometry;
pub mod jets;
pub mod linalg;
pub mod period_domain;
pub mod prepotential;
pub mod wp_geometry;

pub use error::{Error, Result};
pub use jets::{Jet, JetError, LogJet, MultiIndex, C64};
pub use prepotential::{PeriodJet, Prepotential, SymplecticForm};

/// `c(n) = (√n + 1)² + 1`, the constant governing the Hodge-metric curvature bounds.
pub fn c_n(n: usize) -> f64 {
    let s = (n as f64).sqrt() + 1.0;
    s * s + 1.0
}
