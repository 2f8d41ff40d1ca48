use super::SpecfunError;

/// `B_{2k} / (2k)!` for k = 1..=9. The first eight are used as correction
/// terms, the ninth bounds the remainder.
const BERNOULLI_OVER_FACTORIAL: [f64; 9] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
];

const CORRECTION_TERMS: usize = 8;
const REMAINDER_TARGET: f64 = 1e-15;
const MAX_SHIFT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzValue {
    pub value: f64,
    /// Euler-Maclaurin remainder bound plus accumulated rounding.
    pub error_bound: f64,
    /// Number of terms summed directly before the asymptotic tail.
    pub shift: u64,
}

/// Hurwitz zeta `sum_{n>=0} (n + a)^{-s}`, analytically continued.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64, SpecfunError> {
    hurwitz_zeta_with_error(s, a).map(|v| v.value)
}

/// Magnitude of the Euler-Maclaurin term of index `k` (1-based, k <= 9) at
/// base `x = N + a`.
fn correction_term(s: f64, x: f64, k: usize) -> f64 {
    // rising factorial s (s+1) ... (s + 2k - 2)
    let rising: f64 = (0..2 * k - 1).map(|i| s + i as f64).product();
    BERNOULLI_OVER_FACTORIAL[k - 1] * rising * x.powf(-s - (2 * k - 1) as f64)
}

/// Hurwitz zeta with the remainder bound of the Euler-Maclaurin tail.
///
/// The shift N is the smallest count of directly summed terms for which the
/// first omitted correction (the `B_18` term) drops below 1e-15 relative to
/// `max(1, |value|)`. Keeping N minimal limits cancellation for negative `s`.
pub fn hurwitz_zeta_with_error(s: f64, a: f64) -> Result<HurwitzValue, SpecfunError> {
    if !s.is_finite() || !a.is_finite() {
        return Err(SpecfunError::NonFinite);
    }
    if s == 1.0 {
        return Err(SpecfunError::Pole { function: "hurwitz_zeta", argument: s });
    }
    if a <= 0.0 {
        return Err(SpecfunError::Domain(format!("hurwitz_zeta needs a > 0, got {a}")));
    }
    let mut shift = 0u64;
    loop {
        let x = shift as f64 + a;
        let omitted = correction_term(s, x, CORRECTION_TERMS + 1).abs();
        let scale = x.powf(1.0 - s).abs() / (s - 1.0).abs();
        if omitted <= REMAINDER_TARGET * scale.max(1.0) || shift >= MAX_SHIFT {
            break;
        }
        shift = if shift < 16 { shift + 1 } else { shift * 2 };
    }

    let x = shift as f64 + a;
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for n in 0..shift {
        let term = (n as f64 + a).powf(-s);
        sum += term;
        magnitude += term.abs();
    }
    let mut push = |t: f64| {
        sum += t;
        magnitude += t.abs();
    };
    push(x.powf(1.0 - s) / (s - 1.0));
    push(0.5 * x.powf(-s));
    for k in 1..=CORRECTION_TERMS {
        push(correction_term(s, x, k));
    }
    let remainder = correction_term(s, x, CORRECTION_TERMS + 1).abs();
    let rounding = 4.0 * f64::EPSILON * magnitude;
    Ok(HurwitzValue { value: sum, error_bound: remainder + rounding, shift })
}
