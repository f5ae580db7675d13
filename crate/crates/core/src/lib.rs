//! Hermite functions `H_ν` and parabolic cylinder functions `D_ν` of negative
//! order, the ratio `R_ν = H_{ν-1}² / (H_ν H_{ν-2})` with its bounds
//! `1 < R_ν < (ν-1)/ν`, and Monte Carlo checks of the Ornstein–Uhlenbeck
//! hitting-time identities that link them.
//!
//! Values are carried in log space ([`LogValue`]) because `H_ν(x)` grows like
//! `e^{x²}` as `x -> -inf`.

// Coefficient tables keep their published digits; `!(a > b)` checks reject NaN on purpose.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gamma;
pub mod golden;
pub mod logvalue;
pub mod ousim;
pub mod quadrature;
pub mod ratio;
pub mod specfun;
mod stats;

pub use error::{Error, Result};
pub use logvalue::LogValue;
pub use ousim::{
    HitOutcome, HitSamples, HitTimeStats, HolderReport, LaplaceEstimate, OUParams, SimConfig,
};
pub use quadrature::QuadratureConfig;
pub use ratio::{RatioPoint, ScanKind, ScanReport};
pub use specfun::{EvalResult, Order};

/// Acceptance bands shared by the test suites and the command-line checks.
pub mod tolerances {
    /// `D_ν` vs `H_ν` identity, absolute in log space.
    pub const IDENTITY: f64 = 1e-10;
    /// Central finite difference vs `2ν H_{ν-1}`, relative.
    pub const DERIVATIVE_FD: f64 = 1e-6;
    /// Step of the central finite difference.
    pub const FD_STEP: f64 = 1e-5;
    /// Three-term recurrence, relative.
    pub const RECURRENCE: f64 = 1e-9;
    /// OU generator eigen-equation, relative.
    pub const GENERATOR: f64 = 1e-9;
    /// `Ψ (ν-1)/ν` vs `R_ν`, relative.
    pub const STEP2_IDENTITY: f64 = 1e-9;
    /// Golden agreement, absolute in log space.
    pub const GOLDEN_LOG: f64 = 1e-10;
    /// Monte Carlo band on |z|.
    pub const Z_BAND: f64 = 4.0;
    /// Hölder gap must exceed this many standard errors.
    pub const HOLDER_SIGMAS: f64 = 3.0;
}
