//! Arbitrary-precision numeric kernel.
//!
//! Exact rationals and binary floats come from GMP/MPFR through `rug`;
//! complex values, dense polynomials, the simultaneous root finder and the
//! quadrature rules used by the analytic modules are defined here.
//!
//! Every analytic routine in the crate follows the same precision contract:
//! the caller asks for an absolute accuracy of `2^-P`, the routine works with
//! `P + GUARD_BITS` bits internally, and comparisons between independently
//! computed quantities are made at `2^(-P + GUARD_BITS)`.

mod complex;
mod poly;
mod quadrature;
mod rational;
mod roots;

use rug::float::Constant;
use rug::Float;
use thiserror::Error;

pub use complex::ComplexBF;
pub use poly::{DensePoly, RatPoly};
pub use quadrature::{gauss_legendre_nodes, periodic_nodes, GaussLegendre};
pub use rational::{parse_rational, rat_arith, RatOp};
pub use roots::complex_roots;

/// Binary floating value; its precision in bits travels with the value.
pub type BigFloat = Float;

/// Canonical integer fraction (reduced, positive denominator).
pub type ExactRational = rug::Rational;

/// Guard margin, in bits, between working precision and the accuracy
/// promised to callers.
pub const GUARD_BITS: u32 = 32;

#[derive(Debug, Error)]
pub enum MpError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{0}` as a rational number")]
    Parse(String),
    #[error("polynomial has degree {0}; at least 1 is required")]
    DegreeTooSmall(usize),
    #[error("root finder did not converge for degree {degree} (residual {residual:e})")]
    RootsNotConverged { degree: usize, residual: f64 },
    #[error("Newton iteration for Legendre root {index} of order {order} did not converge")]
    LegendreNotConverged { order: usize, index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// `pi` at `prec` bits.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2^e` at `prec` bits.
pub fn pow2(e: i32, prec: u32) -> Float {
    Float::with_val(prec, Float::i_exp(1, e))
}

/// Re-rounds `x` so that it carries at least `P` bits after the binary point,
/// i.e. an absolute (not relative) resolution of `2^-P`.
pub fn with_abs_precision(x: &Float, bits: u32) -> Float {
    let exp = x.get_exp().unwrap_or(0).max(0) as u32;
    Float::with_val(bits + exp + 2, x)
}

/// Absolute tolerance `2^(-P + GUARD_BITS)` used for cross-checks.
pub fn check_tolerance(bits: u32) -> Float {
    pow2(-(bits as i32) + GUARD_BITS as i32, 64)
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

/// Number of decimal digits that `bits` binary digits resolve.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_precision_covers_integer_part() {
        let x = Float::with_val(64, 1000);
        let y = with_abs_precision(&x, 100);
        assert!(y.prec() >= 110);
    }

    #[test]
    fn tolerance_is_power_of_two() {
        let t = check_tolerance(256);
        assert_eq!(t, Float::with_val(64, Float::i_exp(1, -224)));
    }
}
