//! The ratio `R_ν(x) = H_{ν-1}(x)² / (H_ν(x) H_{ν-2}(x))`, its cylinder
//! counterpart, and grid scans of monotonicity and bounds.
//!
//! For `ν < 0`, `R_ν` decreases strictly from `(ν-1)/ν` at `-inf` to `1` at
//! `+inf`. All ratios are formed from logarithms, so they stay meaningful
//! where the individual Hermite values overflow.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ousim::OUParams;
use crate::quadrature::QuadratureConfig;
use crate::specfun::{hermite, psi, Order};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub x: f64,
    pub r: f64,
    /// Propagated relative error of `r`.
    pub rel_err: f64,
}

/// `ln R_ν(x)` and its propagated error.
fn log_ratio_hermite(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let h0 = hermite(nu, x, cfg)?;
    let h1 = hermite(nu.lowered(1), x, cfg)?;
    let h2 = hermite(nu.lowered(2), x, cfg)?;
    let log_r = 2.0 * h1.log_mag() - h0.log_mag() - h2.log_mag();
    let err = 2.0 * h1.abs_err_log + h0.abs_err_log + h2.abs_err_log;
    Ok((log_r, err))
}

pub fn ratio_hermite(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<RatioPoint> {
    let (log_r, err) = log_ratio_hermite(nu, x, cfg)?;
    Ok(RatioPoint {
        x,
        r: log_r.exp(),
        rel_err: err,
    })
}

/// `D_{ν-1}(x)² / (D_ν(x) D_{ν-2}(x))`, which equals `R_ν(x/√2)`.
pub fn ratio_cylinder(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<RatioPoint> {
    let p = ratio_hermite(nu, x / SQRT_2, cfg)?;
    Ok(RatioPoint { x, ..p })
}

/// Best possible bounds `(1, (ν-1)/ν)` on `R_ν`.
pub fn bounds(nu: Order) -> (f64, f64) {
    let v = nu.get();
    (1.0, (v - 1.0) / v)
}

/// `1 - 1/R_ν(x)`: positive exactly when `H_{ν-1}² - H_ν H_{ν-2} > 0`.
pub fn turan_margin(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (log_r, _) = log_ratio_hermite(nu, x, cfg)?;
    Ok(-(-log_r).exp_m1())
}

/// Upper limit of the Turán margin, `1 - ν/(ν-1)`.
pub fn turan_margin_bound(nu: Order) -> f64 {
    let v = nu.get();
    1.0 - v / (v - 1.0)
}

/// `ln Ψ(x)` with `Ψ = ψ'² / (ψ ψ'')`, plus propagated error.
fn log_capital_psi(
    x: f64,
    params: &OUParams,
    nu: Order,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let p0 = psi(0, x, params, nu, cfg)?;
    let p1 = psi(1, x, params, nu, cfg)?;
    let p2 = psi(2, x, params, nu, cfg)?;
    Ok((
        2.0 * p1.log_mag() - p0.log_mag() - p2.log_mag(),
        2.0 * p1.abs_err_log + p0.abs_err_log + p2.abs_err_log,
    ))
}

/// `Ψ(x) = ψ'(x)² / (ψ(x) ψ''(x))`, which equals `ν/(ν-1) · R_ν((μ-x)/σ)`.
pub fn capital_psi(x: f64, params: &OUParams, nu: Order, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(log_capital_psi(x, params, nu, cfg)?.0.exp())
}

/// Which function a scan walks along the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ScanKind {
    /// `R_ν(x)`: decreasing, range `(1, (ν-1)/ν)`.
    RatioH,
    /// `R̃_ν(x)`: decreasing, range `(1, (ν-1)/ν)`.
    RatioD,
    /// `1 - 1/R_ν(x)`: decreasing, range `(0, 1 - ν/(ν-1))`.
    Turan,
    /// `Ψ(x)`: increasing, range `(ν/(ν-1), 1)`.
    Psi { mu: f64, sigma: f64 },
}

impl ScanKind {
    fn decreasing(&self) -> bool {
        !matches!(self, ScanKind::Psi { .. })
    }

    /// Limits as `x -> -inf` and `x -> +inf`.
    pub fn limits(&self, nu: Order) -> (f64, f64) {
        let (lo, hi) = bounds(nu);
        match self {
            ScanKind::RatioH | ScanKind::RatioD => (hi, lo),
            ScanKind::Turan => (turan_margin_bound(nu), 0.0),
            ScanKind::Psi { .. } => (1.0 / hi, 1.0),
        }
    }

    /// Open interval containing every value.
    pub fn range(&self, nu: Order) -> (f64, f64) {
        let (left, right) = self.limits(nu);
        (left.min(right), left.max(right))
    }

    fn eval(&self, nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<RatioPoint> {
        match *self {
            ScanKind::RatioH => ratio_hermite(nu, x, cfg),
            ScanKind::RatioD => ratio_cylinder(nu, x, cfg),
            ScanKind::Turan => {
                let (log_r, err) = log_ratio_hermite(nu, x, cfg)?;
                let m = -(-log_r).exp_m1();
                // d(1 - e^{-l}) = e^{-l} dl
                let rel_err = if m > 0.0 {
                    (-log_r).exp() * err / m
                } else {
                    err
                };
                Ok(RatioPoint { x, r: m, rel_err })
            }
            ScanKind::Psi { mu, sigma } => {
                let params = OUParams::new(mu, sigma)?;
                let (log_v, err) = log_capital_psi(x, &params, nu, cfg)?;
                Ok(RatioPoint {
                    x,
                    r: log_v.exp(),
                    rel_err: err,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub nu: Order,
    pub kind: ScanKind,
    pub points: Vec<RatioPoint>,
    /// Adjacent index pairs that fail to move strictly in the expected
    /// direction by more than the error guard.
    pub monotone_violations: Vec<(usize, usize)>,
    /// Indices whose value is not strictly inside the proven range by more
    /// than the error guard.
    pub bound_violations: Vec<usize>,
    /// `|v(x_min) - left limit|`
    pub left_limit_gap: f64,
    /// `|v(x_max) - right limit|`
    pub right_limit_gap: f64,
}

impl ScanReport {
    pub fn is_clean(&self) -> bool {
        self.monotone_violations.is_empty() && self.bound_violations.is_empty()
    }
}

/// Multiplier on the propagated error that defines the violation guard band.
pub const GUARD_FACTOR: f64 = 10.0;

/// `n` equally spaced points from `x_min` to `x_max` inclusive.
pub fn uniform_grid(x_min: f64, x_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::Precondition(format!(
            "need finite x_min < x_max, got [{x_min}, {x_max}]"
        )));
    }
    if n < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 grid points, got {n}"
        )));
    }
    let h = (x_max - x_min) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                x_max
            } else {
                x_min + i as f64 * h
            }
        })
        .collect())
}

/// Monotonicity and range violations of a scanned sequence, each judged
/// against `GUARD_FACTOR` times the propagated error.
pub fn find_violations(
    kind: ScanKind,
    nu: Order,
    points: &[RatioPoint],
) -> (Vec<(usize, usize)>, Vec<usize>) {
    let guard = |p: &RatioPoint| GUARD_FACTOR * p.rel_err * p.r.abs();
    let monotone = points
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let tol = guard(&w[0]).max(guard(&w[1]));
            let step = if kind.decreasing() {
                w[0].r - w[1].r
            } else {
                w[1].r - w[0].r
            };
            (step <= tol).then_some((i, i + 1))
        })
        .collect();

    let (lo, hi) = kind.range(nu);
    let out_of_range = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let tol = guard(p);
            (p.r <= lo + tol || p.r >= hi - tol).then_some(i)
        })
        .collect();
    (monotone, out_of_range)
}

pub fn scan(
    kind: ScanKind,
    nu: Order,
    x_min: f64,
    x_max: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<ScanReport> {
    cfg.validate()?;
    let grid = uniform_grid(x_min, x_max, n)?;
    let points = grid
        .par_iter()
        .map(|&x| kind.eval(nu, x, cfg))
        .collect::<Result<Vec<_>>>()?;

    let (monotone_violations, bound_violations) = find_violations(kind, nu, &points);

    let (left, right) = kind.limits(nu);
    let first = points.first().expect("n >= 3");
    let last = points.last().expect("n >= 3");
    Ok(ScanReport {
        nu,
        kind,
        left_limit_gap: (first.r - left).abs(),
        right_limit_gap: (last.r - right).abs(),
        points,
        monotone_violations,
        bound_violations,
    })
}

/// Scan of `R_ν` for strict decrease and the bounds `(1, (ν-1)/ν)`.
pub fn scan_monotonicity(
    nu: Order,
    x_min: f64,
    x_max: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<ScanReport> {
    scan(ScanKind::RatioH, nu, x_min, x_max, n, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn o(nu: f64) -> Order {
        Order::new(nu).unwrap()
    }

    #[test]
    fn ratio_examples() {
        let p = ratio_hermite(o(-1.0), 0.0, &cfg()).unwrap();
        assert!((p.r - 4.0 / PI).abs() < 1e-12);
        assert!(p.rel_err >= 0.0 && p.rel_err < 1e-10);
        let r = ratio_hermite(o(-1.0), 30.0, &cfg()).unwrap().r;
        assert!(r > 1.0 && r < 1.01);
        let r = ratio_hermite(o(-1.0), -30.0, &cfg()).unwrap().r;
        assert!(r > 1.99 && r < 2.0);
    }

    #[test]
    fn cylinder_examples() {
        assert!((ratio_cylinder(o(-1.0), 0.0, &cfg()).unwrap().r - 4.0 / PI).abs() < 1e-12);
        let a = ratio_cylinder(o(-1.0), SQRT_2, &cfg()).unwrap();
        let b = ratio_hermite(o(-1.0), 1.0, &cfg()).unwrap();
        assert!(((a.r - b.r) / b.r).abs() < 1e-10);
        assert_eq!(a.x, SQRT_2);
        let r = ratio_cylinder(o(-2.0), -10.0, &cfg()).unwrap().r;
        assert!(r > 1.0 && r < 1.5);
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(bounds(o(-1.0)), (1.0, 2.0));
        assert_eq!(bounds(o(-0.5)), (1.0, 3.0));
        assert_eq!(bounds(o(-2.0)), (1.0, 1.5));
    }

    #[test]
    fn turan_examples() {
        let m = turan_margin(o(-1.0), 0.0, &cfg()).unwrap();
        assert!((m - (1.0 - PI / 4.0)).abs() < 1e-12);
        let m = turan_margin(o(-1.0), 30.0, &cfg()).unwrap();
        assert!(m > 0.0 && m < 0.01);
        let m = turan_margin(o(-3.0), -20.0, &cfg()).unwrap();
        assert!(m > 0.0 && m < turan_margin_bound(o(-3.0)));
        assert!((turan_margin_bound(o(-3.0)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn capital_psi_examples() {
        let p = OUParams::new(0.0, 1.0).unwrap();
        let v = capital_psi(0.0, &p, o(-1.0), &cfg()).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-12);
        let far = capital_psi(25.0, &p, o(-1.0), &cfg()).unwrap();
        assert!(far < 1.0 && far > 0.99);
        for x in [-8.0, -1.0, 0.3, 4.0] {
            let v = capital_psi(x, &p, o(-1.0), &cfg()).unwrap();
            assert!(v > 0.5 && v < 1.0);
        }
    }

    #[test]
    fn scan_examples() {
        let s = scan_monotonicity(o(-0.5), -5.0, 5.0, 101, &cfg()).unwrap();
        assert!(
            s.is_clean(),
            "{:?} {:?}",
            s.monotone_violations,
            s.bound_violations
        );
        assert_eq!(s.points.len(), 101);

        let s = scan_monotonicity(o(-1.0), 0.0, 0.01, 3, &cfg()).unwrap();
        assert!(s.is_clean());
        assert!(s.points[1].r < s.points[0].r);
        assert!(s.points[0].r - s.points[2].r < 0.01);
    }

    #[test]
    fn scan_kinds_other_than_ratio() {
        for kind in [
            ScanKind::RatioD,
            ScanKind::Turan,
            ScanKind::Psi {
                mu: 1.0,
                sigma: 2.0,
            },
        ] {
            let s = scan(kind, o(-1.7), -6.0, 6.0, 25, &cfg()).unwrap();
            assert!(s.is_clean(), "{kind:?}");
        }
    }

    #[test]
    fn detects_injected_violations() {
        let pt = |x: f64, r: f64| RatioPoint {
            x,
            r,
            rel_err: 1e-12,
        };
        let pts = [
            pt(0.0, 1.8),
            pt(1.0, 1.5),
            pt(2.0, 1.6),
            pt(3.0, 2.5),
            pt(4.0, 1.0),
        ];
        let (mono, out) = find_violations(ScanKind::RatioH, o(-1.0), &pts);
        assert_eq!(mono, vec![(1, 2), (2, 3)]);
        assert_eq!(out, vec![3, 4]);

        // equal neighbours are not strictly decreasing
        let flat = [pt(0.0, 1.5), pt(1.0, 1.5), pt(2.0, 1.4)];
        let (mono, out) = find_violations(ScanKind::RatioH, o(-1.0), &flat);
        assert_eq!(mono, vec![(0, 1)]);
        assert!(out.is_empty());

        // a decrease smaller than the guard band is flagged too
        let fuzzy = [
            RatioPoint {
                x: 0.0,
                r: 1.5,
                rel_err: 1e-6,
            },
            RatioPoint {
                x: 1.0,
                r: 1.5 - 1e-6,
                rel_err: 1e-6,
            },
        ];
        assert_eq!(
            find_violations(ScanKind::RatioH, o(-1.0), &fuzzy).0,
            vec![(0, 1)]
        );

        let up = [pt(0.0, 0.6), pt(1.0, 0.7)];
        assert!(find_violations(
            ScanKind::Psi {
                mu: 0.0,
                sigma: 1.0
            },
            o(-1.0),
            &up
        )
        .0
        .is_empty());
    }

    #[test]
    fn scan_preconditions() {
        assert!(scan_monotonicity(o(-1.0), 1.0, 0.0, 10, &cfg()).is_err());
        assert!(scan_monotonicity(o(-1.0), 0.0, 1.0, 2, &cfg()).is_err());
        let g = uniform_grid(-1.0, 1.0, 5).unwrap();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
