use super::InvariantError;
use crate::exact::{Cyclotomic, CyclotomicField, Rational};
use num_bigint::BigInt;
use num_traits::Zero;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// The lens space `S^{2n-1} / Z_m` with generator acting by rotation angles
/// `2 pi r_j / m`, and the character `ell` of `Z_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LensInput {
    m: u64,
    ell: u64,
    rotations: Vec<u64>,
}

impl LensInput {
    /// `ell` and the rotations are reduced mod `m`. Every rotation must be a
    /// unit mod `m` so that the action on the sphere is free.
    pub fn new(m: u64, ell: i64, rotations: &[i64]) -> Result<Self, InvariantError> {
        if m < 2 {
            return Err(InvariantError::InvalidInput(format!("group order must be at least 2, got {m}")));
        }
        if rotations.is_empty() {
            return Err(InvariantError::InvalidInput("at least one rotation is needed".into()));
        }
        let modulus = m as i64;
        let mut reduced = Vec::with_capacity(rotations.len());
        for &r in rotations {
            let r_mod = r.rem_euclid(modulus) as u64;
            if r_mod.gcd(&m) != 1 {
                return Err(InvariantError::NonFree { rotation: r, m });
            }
            reduced.push(r_mod);
        }
        Ok(LensInput { m, ell: ell.rem_euclid(modulus) as u64, rotations: reduced })
    }

    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn ell(&self) -> u64 {
        self.ell
    }
    pub fn rotations(&self) -> &[u64] {
        &self.rotations
    }
    /// Complex dimension `n`; the lens space has real dimension `2n - 1`.
    pub fn n(&self) -> usize {
        self.rotations.len()
    }

    fn with_ell(&self, ell: u64) -> Self {
        LensInput { m: self.m, ell, rotations: self.rotations.clone() }
    }
}

/// An element of `Z[x]/(x^m - 1)`, `x` standing for `zeta_m^{-1}`; a root of
/// unity times an element is a rotation of its coefficients.
type GroupRing = Vec<BigInt>;

fn cyclic_mul(a: &GroupRing, b: &GroupRing) -> GroupRing {
    let m = a.len();
    let mut out = vec![BigInt::zero(); m];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            out[(i + j) % m] += x * y;
        }
    }
    out
}

/// `m (1 + u) / (1 - u)` for `u = x^e`, `e` not divisible by `m`: with `d` the
/// order of `u`, `1 / (1 - u) = -(1/d) sum_{j<d} j u^j`.
fn cayley_numerator(e: u64, m: u64) -> GroupRing {
    let d = m / e.gcd(&m);
    let w = BigInt::from(m / d);
    let mut out = vec![BigInt::zero(); m as usize];
    out[0] -= &w * BigInt::from(d - 1);
    for j in 1..d {
        out[(e * j % m) as usize] -= &w * BigInt::from(2 * j - 1);
    }
    out
}

/// `m^n P_k`, `P_k = prod_j (1 + u_j^k) / (1 - u_j^k)`, for `k = 1..m-1`.
fn cayley_products(input: &LensInput) -> Vec<GroupRing> {
    let m = input.m;
    let mut cache: HashMap<u64, GroupRing> = HashMap::new();
    (1..m)
        .map(|k| {
            let mut p: Option<GroupRing> = None;
            for &r in &input.rotations {
                let c = cache.entry(r * k % m).or_insert_with_key(|&e| cayley_numerator(e, m));
                p = Some(match p {
                    None => c.clone(),
                    Some(acc) => cyclic_mul(&acc, c),
                });
            }
            p.expect("at least one rotation")
        })
        .collect()
}

/// `(1/m) sum_k P_k (u_0^k - 1)` as an element of `Q(zeta_L)`, `L = lcm(4, m)`.
fn root_form_sum(input: &LensInput, field: &Arc<CyclotomicField>, products: &[GroupRing]) -> Cyclotomic {
    let m = input.m as usize;
    let mut total = vec![BigInt::zero(); m];
    if input.ell != 0 {
        for (idx, p) in products.iter().enumerate() {
            let shift = (input.ell as usize * (idx + 1)) % m;
            for (i, c) in p.iter().enumerate() {
                total[(i + shift) % m] += c;
                total[i] -= c;
            }
        }
    }
    // x = zeta_m^{-1} = zeta_L^{-L/m}
    let l = field.order() as usize;
    let scale = l / m;
    let denom = BigInt::from(input.m).pow(input.n() as u32 + 1);
    let mut poly = vec![Rational::zero(); l];
    for (i, c) in total.into_iter().enumerate() {
        poly[(l - i * scale % l) % l] += Rational::new(c, denom.clone());
    }
    Cyclotomic::from_poly(field, poly)
}

fn lens_field(m: u64) -> Result<Arc<CyclotomicField>, InvariantError> {
    Ok(CyclotomicField::new(m.lcm(&4))?)
}

/// The equivariant eta invariant of the lens space, exactly.
///
/// Uses `u_j = zeta_m^{-r_j}` and `u_0 = zeta_m^{-ell}` in
/// `eta = (1/m) sum_{k=1}^{m-1} prod_j (1 + u_j^k)/(1 - u_j^k) (u_0^k - 1)`.
/// With this branch `(1 + u)/(1 - u) = -i cot(k theta / 2)`, which is the
/// orientation under which `m = 6`, rotations `(1, 5)` gives
/// `0, -2/3, -5/3, -2, -5/3, -2/3` for `ell = 0..5`.
pub fn lens_eta_exact(input: &LensInput) -> Result<Rational, InvariantError> {
    if input.ell == 0 {
        return Ok(Rational::zero());
    }
    let field = lens_field(input.m)?;
    Ok(root_form_sum(input, &field, &cayley_products(input)).to_rational()?)
}

/// `lens_eta_exact` for every `ell = 0..m-1`, sharing the products.
pub fn lens_eta_exact_all(input: &LensInput) -> Result<Vec<Rational>, InvariantError> {
    let field = lens_field(input.m)?;
    let products = cayley_products(input);
    (0..input.m)
        .map(|ell| Ok(root_form_sum(&input.with_ell(ell), &field, &products).to_rational()?))
        .collect()
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// The real cotangent form, chosen by the parity of `n`:
/// even `n`: `(2 (-1)^{n/2+1} / m) sum_k prod_j cot(k theta_j / 2) sin^2(k ell pi / m)`,
/// odd `n = 2s+1`: `((-1)^{s+1} / m) sum_k prod_j cot(k theta_j / 2) sin(2 k ell pi / m)`.
pub fn lens_eta_numeric(input: &LensInput) -> f64 {
    let m = input.m;
    if input.ell == 0 {
        return 0.0;
    }
    let n = input.n();
    let mf = m as f64;
    let mut sum = 0.0;
    for k in 1..m {
        let prod: f64 = input.rotations.iter().map(|&r| cot(PI * (r * k % m) as f64 / mf)).product();
        let phase = PI * (input.ell * k % m) as f64 / mf;
        sum += if n % 2 == 0 { prod * phase.sin().powi(2) } else { prod * (2.0 * phase).sin() };
    }
    if n % 2 == 0 {
        let sign = if (n / 2 + 1) % 2 == 0 { 1.0 } else { -1.0 };
        2.0 * sign * sum / mf
    } else {
        let s = (n - 1) / 2;
        let sign = if (s + 1) % 2 == 0 { 1.0 } else { -1.0 };
        sign * sum / mf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealityResidual {
    /// `|Im|` of the complex form summed in floating point.
    pub numeric: f64,
    /// Whether the exact sum is fixed by complex conjugation.
    pub exact_is_real: bool,
}

/// Checks that the complex form `(1/m) sum_k i^{-n} prod cot(k theta_j/2) (e^{-2 pi i k ell/m} - 1)`
/// is real, numerically and exactly.
pub fn lens_reality_residual(input: &LensInput) -> Result<RealityResidual, InvariantError> {
    let m = input.m;
    let mf = m as f64;
    let n = input.n();
    let i_pow = Complex64::i().powi(-(n as i32));
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..m {
        let prod: f64 = input.rotations.iter().map(|&r| cot(PI * (r * k % m) as f64 / mf)).product();
        let phase = Complex64::from_polar(1.0, -2.0 * PI * (input.ell * k % m) as f64 / mf);
        sum += i_pow * prod * (phase - 1.0);
    }
    let numeric = (sum / mf).im.abs();
    let exact = root_form_sum(input, &lens_field(m)?, &cayley_products(input));
    Ok(RealityResidual { numeric, exact_is_real: exact == exact.conj() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub input: LensInput,
    pub exact: Rational,
    pub numeric: f64,
}

/// Every lens input with `2 <= m <= max_m`, `1 <= n <= max_n`, rotations a
/// non-decreasing tuple of units mod `m`, and all `ell`.
pub fn lens_sweep(max_m: u64, max_n: usize) -> Result<Vec<SweepEntry>, InvariantError> {
    let mut jobs = Vec::new();
    for m in 2..=max_m {
        let units: Vec<u64> = (1..m).filter(|r| r.gcd(&m) == 1).collect();
        for n in 1..=max_n {
            for tuple in multisets(&units, n) {
                jobs.push((m, tuple));
            }
        }
    }
    let per_job: Vec<Result<Vec<SweepEntry>, InvariantError>> = jobs
        .par_iter()
        .map(|(m, tuple)| {
            let rotations: Vec<i64> = tuple.iter().map(|&r| r as i64).collect();
            let base = LensInput::new(*m, 0, &rotations)?;
            let exact = lens_eta_exact_all(&base)?;
            Ok(exact
                .into_iter()
                .enumerate()
                .map(|(ell, value)| {
                    let input = base.with_ell(ell as u64);
                    let numeric = lens_eta_numeric(&input);
                    SweepEntry { input, exact: value, numeric }
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in per_job {
        out.extend(r?);
    }
    Ok(out)
}

fn multisets(items: &[u64], n: usize) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], n - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}
