//! Exact arithmetic: rationals, cyclotomic fields and characters of finite
//! abelian groups.
//!
//! Everything here is exact. Floating point never enters, so equality of two
//! values is decidable and tests can compare coefficient vectors directly.

mod cyclotomic;
mod group;
mod poly;

pub use cyclotomic::{cyc_inv, cyc_mul, cyc_root, cyc_to_rational, Cyclotomic, CyclotomicField};
pub use group::{char_inner, Character, FiniteAbelianGroup, IsotypeKey};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("cyclotomic order mismatch: {left} vs {right}")]
    OrderMismatch { left: u64, right: u64 },
    #[error("division by zero in cyclotomic field of order {order}")]
    DivisionByZero { order: u64 },
    #[error("element is not rational: coefficient of zeta^{degree} is nonzero")]
    NotRational { degree: usize },
    #[error("character groups differ: {left:?} vs {right:?}")]
    GroupMismatch { left: Vec<u64>, right: Vec<u64> },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid character exponents {exponents:?} for group {orders:?}")]
    InvalidCharacter { exponents: Vec<u64>, orders: Vec<u64> },
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
}

/// Builds the rational `p/q`. Panics when `q == 0`.
pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `p/q`, always including the denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// found by walking the continued-fraction convergents. Returns `None` when no
/// convergent within the bound reproduces `x` to `tol`.
pub fn rational_reconstruction(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a_int = a as i128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        if ((p2 as f64) / (q2 as f64) - x).abs() <= tol {
            return Some(Rational::new(BigInt::from(p2), BigInt::from(q2)));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rem - a;
        if frac.abs() < f64::EPSILON {
            break;
        }
        rem = 1.0 / frac;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_formatting_keeps_denominator() {
        assert_eq!(format_rational(&rational(-2, 1)), "-2/1");
        assert_eq!(format_rational(&rational(10, -15)), "-2/3");
        assert_eq!(parse_rational("-5/3"), Some(rational(-5, 3)));
        assert_eq!(parse_rational("7"), Some(rational(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn reconstruction_recovers_small_fractions() {
        assert_eq!(rational_reconstruction(-2.0 / 3.0, 36, 1e-10), Some(rational(-2, 3)));
        assert_eq!(rational_reconstruction(-5.0 / 3.0, 36, 1e-10), Some(rational(-5, 3)));
        assert_eq!(rational_reconstruction(0.0, 36, 1e-10), Some(rational(0, 1)));
        assert_eq!(rational_reconstruction(std::f64::consts::PI, 36, 1e-10), None);
    }
}
