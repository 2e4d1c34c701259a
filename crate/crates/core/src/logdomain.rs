//! Signed base-10 logarithmic magnitudes.
//!
//! Quantities in this crate span from ~1e-120 (visibility deficits) to ~1e60
//! (angular momenta in units of hbar). Products of such numbers are formed in
//! the log domain and only converted to linear values when representable.

use std::fmt;
use std::ops::{Div, Mul, Neg};

/// A real number stored as `sign * 10^log10`.
///
/// Zero is represented with `sign == 0` and `log10 == -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMagnitude {
    sign: i8,
    log10: f64,
}

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude { sign: 0, log10: f64::NEG_INFINITY };
    pub const ONE: LogMagnitude = LogMagnitude { sign: 1, log10: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { sign: if x > 0.0 { 1 } else { -1 }, log10: x.abs().log10() }
        }
    }

    /// Builds a value from a sign (any sign of `sign` is used, zero gives zero) and a log10 magnitude.
    pub fn from_parts(sign: f64, log10: f64) -> Self {
        if sign == 0.0 || log10 == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign: if sign > 0.0 { 1 } else { -1 }, log10 }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// log10 of the absolute value.
    pub fn log10_abs(&self) -> f64 {
        self.log10
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Linear value; underflows to zero or overflows to infinity outside the f64 range.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * 10f64.powf(self.log10)
        }
    }

    /// Whether the linear value is a normal, finite f64.
    pub fn is_representable(&self) -> bool {
        self.sign == 0 || (self.log10 > -307.0 && self.log10 < 308.0)
    }

    pub fn abs(self) -> Self {
        Self { sign: self.sign.abs(), ..self }
    }

    pub fn powi(self, n: i32) -> Self {
        if self.sign == 0 {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        let sign = if n % 2 == 0 { 1 } else { self.sign };
        Self { sign, log10: self.log10 * f64::from(n) }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero log magnitude");
        Self { sign: self.sign, log10: -self.log10 }
    }
}

impl Mul for LogMagnitude {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self { sign: self.sign * rhs.sign, log10: self.log10 + rhs.log10 }
    }
}

impl Mul<f64> for LogMagnitude {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self * LogMagnitude::from_f64(rhs)
    }
}

impl Div for LogMagnitude {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Div<f64> for LogMagnitude {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self / LogMagnitude::from_f64(rhs)
    }
}

impl Neg for LogMagnitude {
    type Output = Self;
    fn neg(self) -> Self {
        Self { sign: -self.sign, ..self }
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}10^{:.6}", if s < 0 { "-" } else { "" }, self.log10),
        }
    }
}
