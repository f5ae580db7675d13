//! Parabolic cylinder functions `D_ν` and Hermite functions `H_ν` of negative
//! order, evaluated in log space from the integral representation
//!
//! ```text
//! D_ν(x) = e^{-x²/4} / Γ(-ν) ∫_0^∞ t^{-ν-1} e^{-t²/2 - x t} dt,   ν < 0,
//! H_ν(x) = 2^{ν/2} e^{x²/2} D_ν(√2 x).
//! ```
//!
//! For `x < 0` the exponent is rewritten as `-(t + x)²/2 + x²/2`, so the
//! integrand is a Gaussian bump at `t = -x` and the `e^{x²/2}` factor goes
//! straight into the logarithm. The quadrature itself only ever sees values
//! rescaled by their peak, so nothing overflows for any finite `x`.

use std::f64::consts::{LN_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::ln_gamma_pos;
use crate::logvalue::LogValue;
use crate::ousim::OUParams;
use crate::quadrature::{integrate, QuadratureConfig};

/// Order `ν` of a Hermite or parabolic cylinder function; always `< 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::Domain(format!("order must be finite, got {nu}")));
        }
        if nu >= 0.0 {
            return Err(Error::Domain(format!("order must be negative, got {nu}")));
        }
        Ok(Self(nu))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `ν - k`; lowering a negative order keeps it negative.
    pub fn lowered(self, k: u32) -> Self {
        Self(self.0 - f64::from(k))
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;

    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

impl From<Order> for f64 {
    fn from(o: Order) -> f64 {
        o.0
    }
}

/// A function value together with its estimated error, expressed as an
/// absolute error on `ln|value|` (equivalently a relative error on the value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: LogValue,
    pub abs_err_log: f64,
}

impl EvalResult {
    pub fn log_mag(&self) -> f64 {
        self.value.log_mag()
    }
}

fn check_x(x: f64) -> Result<()> {
    if !x.is_finite() || !(x * x).is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {x}")));
    }
    Ok(())
}

/// Applies `f` to the value, including the best estimate carried by a
/// convergence error.
fn map_eval(r: Result<EvalResult>, f: impl Fn(EvalResult) -> EvalResult) -> Result<EvalResult> {
    match r {
        Ok(v) => Ok(f(v)),
        Err(Error::Convergence {
            best,
            achieved,
            requested,
        }) => {
            let best = f(best);
            Err(Error::Convergence {
                best,
                achieved: best.abs_err_log.max(achieved),
                requested,
            })
        }
        Err(e) => Err(e),
    }
}

/// Natural log of the core integral together with its relative error.
///
/// Computes `∫_0^∞ t^p e^{q(t)} dt` with `q(t) = -t²/2 - x t` for `x >= 0`
/// and `q(t) = -(t + x)²/2` for `x < 0`. The integrand is divided by its
/// peak value before integration.
fn log_core_integral(p: f64, x: f64, cfg: &QuadratureConfig) -> (f64, f64, bool) {
    let q = |t: f64| {
        if x >= 0.0 {
            -t * (0.5 * t + x)
        } else {
            let d = t + x;
            -0.5 * d * d
        }
    };
    let log_pow = |t: f64| if p == 0.0 { 0.0 } else { p * t.ln() };
    let expo = |t: f64| log_pow(t) + q(t);

    let (peak, width, scale) = if p > 0.0 {
        let root = (x * x + 4.0 * p).sqrt();
        let t = if x >= 0.0 {
            2.0 * p / (x + root)
        } else {
            0.5 * (root - x)
        };
        (t, 1.0 / (1.0 + p / (t * t)).sqrt(), expo(t))
    } else {
        let w = if x > 0.0 { 1.0 / (1.0 + x) } else { 1.0 };
        (x.min(0.0).abs(), w, 0.0)
    };

    let cutoff = -0.5 * cfg.tail_sigma * cfg.tail_sigma;
    let mut pts = vec![0.0];
    for j in -6..=6 {
        let t = peak + f64::from(j) * width;
        if t > 0.0 {
            pts.push(t);
        }
    }
    let mut d = 12.0 * width;
    loop {
        let lo = peak - d;
        if lo > 0.0 {
            pts.push(lo);
        }
        let hi = peak + d;
        pts.push(hi);
        if expo(hi) - scale < cutoff {
            break;
        }
        d *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let upper = *pts.last().expect("non-empty");

    // t = a·s^m on the first panel removes the t^p endpoint behaviour
    // (fully for -1 < p < 0, up to an integer power of s otherwise).
    let first = pts[1];
    let smooth_at_zero = p >= 0.0 && p.fract() == 0.0;
    let n_pow = (p + 1.0).ceil();
    let m = n_pow / (p + 1.0);
    let log_jac_const = m.ln() + log_pow(first) - scale;

    let integrand = |t: f64| {
        if !smooth_at_zero && t < first {
            let s = t / first;
            let ls = s.ln();
            let inner = first * (m * ls).exp();
            let mut e = log_jac_const + q(inner);
            if n_pow > 1.0 {
                e += (n_pow - 1.0) * ls;
            }
            e.exp()
        } else {
            (expo(t) - scale).exp()
        }
    };

    let res = integrate(integrand, &pts, cfg.rel_tol, cfg.max_subdivisions);
    // beyond the cut the log-integrand is concave and decreasing
    let slope = p / upper - (upper + x);
    let tail = (expo(upper) - scale).exp() / slope.abs();
    let rel = res.rel_err() + tail / res.value;
    (scale + res.value.ln(), rel, res.converged)
}

/// Γ(a) for `a > 0`.
pub fn gamma_pos(a: f64) -> Result<f64> {
    crate::gamma::gamma_pos(a)
}

/// Parabolic cylinder function `D_ν(x)`.
pub fn dnu(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    cfg.validate()?;
    check_x(x)?;
    let p = -nu.get() - 1.0;
    let ln_gamma = ln_gamma_pos(-nu.get())?;
    let (log_int, rel, converged) = log_core_integral(p, x, cfg);
    let quarter_sq = 0.25 * x * x;
    let log_mag = if x >= 0.0 {
        log_int - quarter_sq - ln_gamma
    } else {
        log_int + quarter_sq - ln_gamma
    };
    let out = EvalResult {
        value: LogValue::from_log(log_mag),
        abs_err_log: rel,
    };
    if !converged || !log_mag.is_finite() {
        return Err(Error::Convergence {
            best: out,
            achieved: rel,
            requested: cfg.rel_tol,
        });
    }
    Ok(out)
}

/// Hermite function `H_ν(x) = 2^{ν/2} e^{x²/2} D_ν(√2 x)`.
pub fn hermite(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    check_x(x)?;
    let shift = 0.5 * nu.get() * LN_2 + 0.5 * x * x;
    map_eval(dnu(nu, SQRT_2 * x, cfg), |d| EvalResult {
        value: d.value.scale_log(shift),
        abs_err_log: d.abs_err_log,
    })
}

/// `H_ν'(x) = 2ν H_{ν-1}(x)`; negative for every `ν < 0`.
pub fn hermite_derivative(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    let factor = LogValue::from_f64(2.0 * nu.get());
    map_eval(hermite(nu.lowered(1), x, cfg), |h| EvalResult {
        value: factor * h.value,
        abs_err_log: h.abs_err_log,
    })
}

/// Relative residual of `H_ν - 2x H_{ν-1} + 2(ν-1) H_{ν-2} = 0`, which is the
/// Hermite ODE rewritten with the derivative identity.
pub fn recurrence_residual(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let h0 = hermite(nu, x, cfg)?.value;
    let h1 = hermite(nu.lowered(1), x, cfg)?.value;
    let h2 = hermite(nu.lowered(2), x, cfg)?.value;
    let r = 1.0 - 2.0 * x * h1.ratio(h0) + 2.0 * (nu.get() - 1.0) * h2.ratio(h0);
    Ok(r.abs())
}

/// `|ln D_ν(x) - (-(ν/2) ln 2 - x²/4 + ln H_ν(x/√2))|`.
pub fn identity_residual(nu: Order, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let d = dnu(nu, x, cfg)?;
    let y = x / SQRT_2;
    let h = hermite(nu, y, cfg)?;
    let via_h = -0.5 * nu.get() * LN_2 - 0.5 * y * y + h.log_mag();
    Ok((d.log_mag() - via_h).abs())
}

/// Highest derivative order supported by [`psi`].
pub const MAX_PSI_ORDER: u32 = 3;

/// k-th derivative of the increasing eigenfunction `ψ(x) = H_ν((μ - x)/σ)`
/// of the OU generator:
/// `ψ^{(k)}(x) = (-2/σ)^k ∏_{j<k}(ν - j) · H_{ν-k}((μ - x)/σ)`, positive for all k.
pub fn psi(
    k: u32,
    x: f64,
    params: &OUParams,
    nu: Order,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    if k > MAX_PSI_ORDER {
        return Err(Error::Domain(format!(
            "psi derivative order must be <= {MAX_PSI_ORDER}, got {k}"
        )));
    }
    check_x(x)?;
    let z = (params.mu() - x) / params.sigma();
    let mut coeff = LogValue::from_f64(-2.0 / params.sigma()).powi(k as i32);
    for j in 0..k {
        coeff = coeff * LogValue::from_f64(nu.get() - f64::from(j));
    }
    map_eval(hermite(nu.lowered(k), z, cfg), |h| EvalResult {
        value: coeff * h.value,
        abs_err_log: h.abs_err_log,
    })
}

/// Relative residual of `(σ²/2)ψ'' + (μ - x)ψ' + νψ = 0`.
pub fn generator_residual(
    x: f64,
    params: &OUParams,
    nu: Order,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let p0 = psi(0, x, params, nu, cfg)?.value;
    let p1 = psi(1, x, params, nu, cfg)?.value;
    let p2 = psi(2, x, params, nu, cfg)?.value;
    let s2 = params.sigma() * params.sigma();
    let r = 0.5 * s2 * p2.ratio(p0) + (params.mu() - x) * p1.ratio(p0) + nu.get();
    Ok(r.abs())
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

    fn close(got: f64, want: f64, rel: f64) {
        assert!(
            ((got - want) / want).abs() <= rel,
            "got {got}, want {want} (rel {rel})"
        );
    }

    #[test]
    fn order_rejects_nonnegative_and_nan() {
        assert!(Order::new(0.0).is_err());
        assert!(Order::new(0.5).is_err());
        assert!(Order::new(f64::NAN).is_err());
        assert!(Order::new(f64::NEG_INFINITY).is_err());
        assert_eq!(o(-1.5).lowered(2).get(), -3.5);
    }

    #[test]
    fn gamma_examples() {
        close(gamma_pos(1.0).unwrap(), 1.0, 1e-15);
        close(gamma_pos(0.5).unwrap(), 1.772_453_850_905_516, 1e-15);
        close(gamma_pos(2.0).unwrap(), 1.0, 1e-15);
    }

    #[test]
    fn dnu_examples() {
        let d = dnu(o(-1.0), 0.0, &cfg()).unwrap();
        assert_eq!(d.value.sign(), 1);
        close(d.value.to_f64(), (PI / 2.0).sqrt(), 1e-13);
        close(
            dnu(o(-2.0), 0.0, &cfg()).unwrap().value.to_f64(),
            1.0,
            1e-13,
        );
        // e·sqrt(pi/2)·erfc(sqrt 2)
        close(
            dnu(o(-1.0), 2.0, &cfg()).unwrap().value.to_f64(),
            0.155_013_076_597_330_83,
            1e-13,
        );
    }

    #[test]
    fn hermite_examples() {
        close(
            hermite(o(-1.0), 0.0, &cfg()).unwrap().value.to_f64(),
            PI.sqrt() / 2.0,
            1e-13,
        );
        close(
            hermite(o(-2.0), 0.0, &cfg()).unwrap().value.to_f64(),
            0.5,
            1e-13,
        );
        close(
            hermite(o(-1.0), 1.0, &cfg()).unwrap().value.to_f64(),
            0.378_936_078_070_656_05,
            1e-13,
        );
        close(
            hermite(o(-3.0), 0.0, &cfg()).unwrap().value.to_f64(),
            PI.sqrt() / 8.0,
            1e-13,
        );
    }

    #[test]
    fn dnu_at_zero_matches_gamma_closed_form() {
        // D_ν(0) = 2^{-ν/2-1} Γ(-ν/2) / Γ(-ν)
        for nu in [-0.3, -0.5, -1.7, -2.5, -4.0, -6.5] {
            let want = 2f64.powf(-nu / 2.0 - 1.0) * gamma_pos(-nu / 2.0).unwrap()
                / gamma_pos(-nu).unwrap();
            close(dnu(o(nu), 0.0, &cfg()).unwrap().value.to_f64(), want, 1e-12);
        }
    }

    #[test]
    fn no_overflow_far_left() {
        let h = hermite(o(-1.0), -30.0, &cfg()).unwrap();
        assert!(h.value.overflows_f64());
        assert!(h.log_mag() > 895.0 && h.log_mag() < 905.0);
        let d = dnu(o(-0.3), -200.0, &cfg()).unwrap();
        assert!(d.log_mag().is_finite());
        let d = dnu(o(-4.0), 300.0, &cfg()).unwrap();
        assert!(d.log_mag() < -20_000.0);
    }

    #[test]
    fn derivative_examples() {
        let d = hermite_derivative(o(-1.0), 0.0, &cfg()).unwrap();
        assert_eq!(d.value.sign(), -1);
        close(d.value.to_f64(), -1.0, 1e-13);

        let h = |x: f64| hermite(o(-1.0), x, &cfg()).unwrap().value.to_f64();
        let step = 1e-5;
        let fd = (h(0.7 + step) - h(0.7 - step)) / (2.0 * step);
        close(
            hermite_derivative(o(-1.0), 0.7, &cfg())
                .unwrap()
                .value
                .to_f64(),
            fd,
            1e-6,
        );

        let lhs = hermite_derivative(o(-0.5), 0.0, &cfg())
            .unwrap()
            .value
            .to_f64();
        let rhs = -hermite(o(-1.5), 0.0, &cfg()).unwrap().value.to_f64();
        close(lhs, rhs, 1e-15);
        close(rhs, -0.691_367_339_036_293_35, 1e-13);
    }

    #[test]
    fn recurrence_examples() {
        assert!(recurrence_residual(o(-1.0), 0.0, &cfg()).unwrap() < 1e-12);
        assert!(recurrence_residual(o(-0.5), 3.0, &cfg()).unwrap() <= 1e-10);
        assert!(recurrence_residual(o(-2.5), -3.0, &cfg()).unwrap() <= 1e-10);
    }

    #[test]
    fn psi_examples() {
        let p = OUParams::new(0.0, 1.0).unwrap();
        let v = |k| psi(k, 0.0, &p, o(-1.0), &cfg()).unwrap();
        close(v(0).value.to_f64(), 0.886_226_925_452_758, 1e-13);
        close(v(1).value.to_f64(), 1.0, 1e-13);
        close(v(2).value.to_f64(), PI.sqrt(), 1e-13);
        for k in 0..=3 {
            assert_eq!(v(k).value.sign(), 1);
        }
        assert!(matches!(
            psi(4, 0.0, &p, o(-1.0), &cfg()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn generator_examples() {
        let std = OUParams::new(0.0, 1.0).unwrap();
        assert!(generator_residual(0.0, &std, o(-1.0), &cfg()).unwrap() < 1e-12);
        let p = OUParams::new(1.0, 2.0).unwrap();
        assert!(generator_residual(2.0, &p, o(-0.5), &cfg()).unwrap() <= 1e-9);
        assert!(generator_residual(-4.0, &std, o(-2.5), &cfg()).unwrap() <= 1e-9);
    }

    #[test]
    fn identity_example() {
        assert!(identity_residual(o(-1.5), 2.5, &cfg()).unwrap() <= 1e-10);
    }

    #[test]
    fn rejects_nonfinite_argument() {
        assert!(dnu(o(-1.0), f64::NAN, &cfg()).is_err());
        assert!(hermite(o(-1.0), f64::INFINITY, &cfg()).is_err());
        assert!(dnu(o(-1.0), 1e200, &cfg()).is_err());
    }

    #[test]
    fn starved_budget_reports_convergence_error_with_estimate() {
        let tight = QuadratureConfig {
            rel_tol: 1e-15,
            max_subdivisions: 1,
            tail_sigma: 12.0,
        };
        match hermite(o(-0.3), 0.0, &tight) {
            Err(Error::Convergence { best, achieved, .. }) => {
                assert!(achieved > 1e-15);
                let exact = hermite(o(-0.3), 0.0, &cfg()).unwrap();
                assert!((best.log_mag() - exact.log_mag()).abs() < 1e-6);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
