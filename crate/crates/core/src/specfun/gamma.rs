use super::SpecfunError;
use std::f64::consts::PI;

/// `Gamma(k + 1/2)` from the double-factorial closed forms
/// `Gamma(k + 1/2) = (2k-1)!! sqrt(pi) / 2^k` and
/// `Gamma(1/2 - k) = (-2)^k sqrt(pi) / (2k-1)!!`.
///
/// Half-integers are never poles of Gamma; the only failure is overflow.
pub fn gamma_half(k: i64) -> Result<f64, SpecfunError> {
    let sqrt_pi = PI.sqrt();
    let value = if k >= 0 {
        (1..=k).fold(sqrt_pi, |acc, j| acc * (j as f64 - 0.5))
    } else {
        (1..=-k).fold(sqrt_pi, |acc, j| acc / (0.5 - j as f64))
    };
    if value.is_finite() && value != 0.0 {
        Ok(value)
    } else {
        Err(SpecfunError::Overflow { function: "gamma_half", argument: k as f64 + 0.5 })
    }
}
