//! Shared inputs for the criterion benchmarks.

/// Orders used across the benchmarks, spanning the singular (`-1 < ν < 0`)
/// and smooth regimes of the integrand.
pub const ORDERS: [f64; 4] = [-0.3, -1.0, -2.5, -4.0];

/// Arguments covering both asymptotic regimes and the overflow band.
pub const ARGS: [f64; 5] = [-30.0, -5.0, 0.0, 5.0, 30.0];
