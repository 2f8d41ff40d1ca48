//! Dense univariate polynomials over the rationals, coefficients stored from
//! the constant term upwards. Only what the cyclotomic field needs.

use super::Rational;
use num_traits::{One, Zero};

pub(crate) type QPoly = Vec<Rational>;

pub(crate) fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn degree(p: &QPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn mul(a: &[Rational], b: &[Rational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

pub(crate) fn sub(a: &[Rational], b: &[Rational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            match b.get(i) {
                Some(y) => x - y,
                None => x,
            }
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by the nonzero polynomial `b`.
pub(crate) fn divrem(a: &[Rational], b: &[Rational]) -> (QPoly, QPoly) {
    let db = degree(&b.to_vec()).expect("division by the zero polynomial");
    let lead_inv = Rational::one() / &b[db];
    let mut rem: QPoly = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = &rem[dr] * &lead_inv;
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            if !bj.is_zero() {
                rem[shift + j] -= &c * bj;
            }
        }
        quot[shift] = c;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// Integer polynomial exact division by a monic divisor. Used only while
/// building cyclotomic polynomials, whose coefficients stay tiny.
pub(crate) fn int_div_exact(a: &[i64], monic: &[i64]) -> Vec<i64> {
    let db = monic.len() - 1;
    debug_assert_eq!(monic[db], 1);
    let mut rem = a.to_vec();
    let mut quot = vec![0i64; a.len() - db];
    for shift in (0..quot.len()).rev() {
        let c = rem[shift + db];
        quot[shift] = c;
        if c != 0 {
            for (j, m) in monic.iter().enumerate() {
                rem[shift + j] -= c * m;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}
