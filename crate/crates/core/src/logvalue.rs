//! Sign plus natural-log magnitude representation of a real number.
//!
//! Hermite functions of negative order grow like `e^{x^2}` as `x -> -inf`,
//! which leaves the range of `f64` near `|x| = 27`. Every value produced by
//! [`crate::specfun`] is therefore carried as a [`LogValue`], and products,
//! quotients and powers act on the logarithm only.

use std::cmp::Ordering;
use std::ops::{Div, Mul, Neg};

use serde::{Deserialize, Serialize};

/// `sign * exp(log_mag)`. When `sign == 0` the magnitude is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    sign: i8,
    log_mag: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };

    pub const ONE: LogValue = LogValue {
        sign: 1,
        log_mag: 0.0,
    };

    /// A positive value given by its natural logarithm.
    pub fn from_log(log_mag: f64) -> Self {
        Self { sign: 1, log_mag }
    }

    pub fn with_sign(sign: i8, log_mag: f64) -> Self {
        match sign.cmp(&0) {
            Ordering::Equal => Self::ZERO,
            Ordering::Greater => Self { sign: 1, log_mag },
            Ordering::Less => Self { sign: -1, log_mag },
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if v > 0.0 { 1 } else { -1 },
                log_mag: v.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the absolute value (`-inf` for zero).
    pub fn log_mag(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_mag
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Linear-scale value; saturates to `±inf` or `0` outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_mag.exp(),
        }
    }

    /// True when `to_f64` would overflow.
    pub fn overflows_f64(&self) -> bool {
        self.sign != 0 && self.log_mag > f64::MAX.ln()
    }

    pub fn abs(self) -> Self {
        Self::with_sign(self.sign.abs(), self.log_mag)
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let sign = if n % 2 == 0 {
            self.sign.abs()
        } else {
            self.sign
        };
        Self::with_sign(sign, self.log_mag * f64::from(n))
    }

    /// Multiplies by a positive constant given in log form.
    pub fn scale_log(self, log_factor: f64) -> Self {
        Self::with_sign(self.sign, self.log_mag + log_factor)
    }

    /// `self / other` as a plain `f64`. Well defined even when both operands
    /// overflow linear scale, as long as their ratio does not.
    pub fn ratio(self, other: LogValue) -> f64 {
        (self / other).to_f64()
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        Self::with_sign(self.sign * rhs.sign, self.log_mag + rhs.log_mag)
    }
}

impl Div for LogValue {
    type Output = LogValue;

    fn div(self, rhs: LogValue) -> LogValue {
        assert!(rhs.sign != 0, "LogValue division by zero");
        Self::with_sign(self.sign * rhs.sign, self.log_mag - rhs.log_mag)
    }
}

impl Neg for LogValue {
    type Output = LogValue;

    fn neg(self) -> LogValue {
        Self::with_sign(-self.sign, self.log_mag)
    }
}
