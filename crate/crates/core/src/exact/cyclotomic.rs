//! The cyclotomic field Q(zeta_L) realised as Q[x]/(Phi_L(x)).
//!
//! Elements are residues of degree < phi(L), so the coefficient vector is a
//! canonical form and `==` is field equality.

use super::poly::{self, QPoly};
use super::{ExactError, Rational};
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Q(zeta_L) together with its defining polynomial Phi_L.
#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    order: u64,
    /// Phi_L, constant term first, monic of degree phi(L).
    modulus: Vec<i64>,
}

fn cyclotomic_polynomial(order: u64, cache: &mut HashMap<u64, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = cache.get(&order) {
        return p.clone();
    }
    // Phi_L = (x^L - 1) / prod_{d | L, d < L} Phi_d
    let mut numer = vec![0i64; order as usize + 1];
    numer[0] = -1;
    numer[order as usize] = 1;
    for d in 1..order {
        if order % d == 0 {
            let phi_d = cyclotomic_polynomial(d, cache);
            numer = poly::int_div_exact(&numer, &phi_d);
        }
    }
    cache.insert(order, numer.clone());
    numer
}

fn field_cache() -> &'static Mutex<HashMap<u64, Arc<CyclotomicField>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl CyclotomicField {
    /// Returns the (shared, cached) field of order `order`.
    pub fn new(order: u64) -> Result<Arc<Self>, ExactError> {
        if order == 0 {
            return Err(ExactError::ZeroOrder);
        }
        let mut cache = field_cache().lock().expect("cyclotomic cache poisoned");
        if let Some(f) = cache.get(&order) {
            return Ok(Arc::clone(f));
        }
        let mut polys = HashMap::new();
        let modulus = cyclotomic_polynomial(order, &mut polys);
        let field = Arc::new(CyclotomicField { order, modulus });
        cache.insert(order, Arc::clone(&field));
        Ok(field)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Euler totient of the order, the degree of the field over Q.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Coefficients of Phi_L, constant term first.
    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    fn reduce(&self, mut p: QPoly) -> Vec<Rational> {
        let deg = self.degree();
        for top in (deg..p.len()).rev() {
            if p[top].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut p[top]);
            let shift = top - deg;
            for (j, m) in self.modulus.iter().enumerate().take(deg) {
                if *m != 0 {
                    p[shift + j] -= &c * Rational::from_integer((*m).into());
                }
            }
        }
        p.resize(deg, Rational::zero());
        p
    }
}

/// An element of Q(zeta_L).
#[derive(Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    field: Arc<CyclotomicField>,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic[{}](", self.field.order)?;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})z^{i}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Cyclotomic {
    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        Cyclotomic { field: Arc::clone(field), coeffs: vec![Rational::zero(); field.degree()] }
    }

    pub fn one(field: &Arc<CyclotomicField>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, q: Rational) -> Self {
        let mut out = Self::zero(field);
        out.coeffs[0] = q;
        out
    }

    /// zeta_L^p, any integer p.
    pub fn root(field: &Arc<CyclotomicField>, p: i64) -> Self {
        let l = field.order as i64;
        let e = p.mod_floor(&l) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        Cyclotomic { field: Arc::clone(field), coeffs: field.reduce(poly) }
    }

    /// Reduces an arbitrary polynomial in zeta modulo Phi_L.
    pub fn from_poly(field: &Arc<CyclotomicField>, coeffs: Vec<Rational>) -> Self {
        Cyclotomic { field: Arc::clone(field), coeffs: field.reduce(coeffs) }
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), ExactError> {
        if self.field.order != other.field.order {
            return Err(ExactError::OrderMismatch { left: self.field.order, right: other.field.order });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Cyclotomic { field: Arc::clone(&self.field), coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Cyclotomic { field: Arc::clone(&self.field), coeffs })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        let prod = poly::mul(&self.coeffs, &other.coeffs);
        Ok(Cyclotomic { field: Arc::clone(&self.field), coeffs: self.field.reduce(prod) })
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm against Phi_L.
    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero { order: self.field.order });
        }
        let modulus: QPoly =
            self.field.modulus.iter().map(|&m| Rational::from_integer(m.into())).collect();
        let mut r0 = modulus;
        let mut r1 = self.coeffs.clone();
        poly::trim(&mut r1);
        let mut s0: QPoly = Vec::new();
        let mut s1: QPoly = vec![Rational::one()];
        while poly::degree(&r1).is_some() {
            let (q, r) = poly::divrem(&r0, &r1);
            let s2 = poly::sub(&s0, &poly::mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // Phi_L is irreducible, so the last nonzero remainder is a unit.
        debug_assert_eq!(poly::degree(&r0), Some(0));
        let c_inv = Rational::one() / &r0[0];
        let inv: QPoly = s0.iter().map(|c| c * &c_inv).collect();
        Ok(Cyclotomic { field: Arc::clone(&self.field), coeffs: self.field.reduce(inv) })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Complex conjugation, the automorphism zeta -> zeta^{L-1}.
    pub fn conj(&self) -> Self {
        let l = self.field.order as usize;
        let mut poly = vec![Rational::zero(); l];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[(l - i) % l] += c;
            }
        }
        Self::from_poly(&self.field, poly)
    }

    /// The rational value, when the element lies in Q.
    pub fn to_rational(&self) -> Result<Rational, ExactError> {
        if let Some(degree) = self.coeffs.iter().skip(1).position(|c| !c.is_zero()) {
            return Err(ExactError::NotRational { degree: degree + 1 });
        }
        Ok(self.coeffs[0].clone())
    }

    /// Floating value as (re, im), for diagnostics only.
    pub fn to_complex(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let l = self.field.order as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let ang = std::f64::consts::TAU * i as f64 / l;
            re += c * ang.cos();
            im += c * ang.sin();
        }
        (re, im)
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_sub(rhs).expect("cyclotomic order mismatch")
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// zeta_L^p reduced modulo Phi_L.
pub fn cyc_root(order: u64, p: i64) -> Result<Cyclotomic, ExactError> {
    let field = CyclotomicField::new(order)?;
    Ok(Cyclotomic::root(&field, p))
}

pub fn cyc_mul(a: &Cyclotomic, b: &Cyclotomic) -> Result<Cyclotomic, ExactError> {
    a.try_mul(b)
}

pub fn cyc_inv(a: &Cyclotomic) -> Result<Cyclotomic, ExactError> {
    a.inv()
}

pub fn cyc_to_rational(a: &Cyclotomic) -> Result<Rational, ExactError> {
    a.to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{poly::divrem, rational};
    use proptest::prelude::*;

    fn field(l: u64) -> Arc<CyclotomicField> {
        CyclotomicField::new(l).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials_match_known_values() {
        assert_eq!(field(1).modulus(), &[-1, 1]);
        assert_eq!(field(4).modulus(), &[1, 0, 1]);
        assert_eq!(field(5).modulus(), &[1, 1, 1, 1, 1]);
        assert_eq!(field(6).modulus(), &[1, -1, 1]);
        assert_eq!(field(12).modulus(), &[1, 0, -1, 0, 1]);
        assert_eq!(field(18).modulus(), &[1, 0, 0, -1, 0, 0, 1]);
        assert_eq!(field(105).degree(), 48);
    }

    #[test]
    fn root_of_order_is_one() {
        assert_eq!(cyc_root(6, 6).unwrap(), Cyclotomic::one(&field(6)));
        assert_eq!(cyc_root(6, -1).unwrap(), cyc_root(6, 5).unwrap());
    }

    #[test]
    fn fourth_root_squares_to_minus_one() {
        let i = cyc_root(4, 1).unwrap();
        let minus_one = Cyclotomic::from_rational(&field(4), rational(-1, 1));
        assert_eq!(cyc_mul(&i, &i).unwrap(), minus_one);
    }

    #[test]
    fn nontrivial_fifth_roots_sum_to_minus_one() {
        // Oracle: remainder of 1 + x + x^2 + x^3 + x^4 by Phi_5 is zero, so the
        // four nontrivial roots sum to -1.
        let phi5: Vec<Rational> = field(5).modulus().iter().map(|&c| rational(c, 1)).collect();
        let (_, rem) = divrem(&phi5, &phi5);
        assert!(rem.is_empty());
        let f = field(5);
        let sum = (1..5).fold(Cyclotomic::zero(&f), |acc, p| &acc + &Cyclotomic::root(&f, p));
        assert_eq!(sum.to_rational().unwrap(), rational(-1, 1));
    }

    #[test]
    fn products_of_sixth_roots() {
        let f = field(6);
        let z = Cyclotomic::root(&f, 1);
        assert_eq!(&z * &Cyclotomic::root(&f, 5), Cyclotomic::one(&f));
        let one = Cyclotomic::one(&f);
        let lhs = &(&one + &z) * &(&one - &z);
        assert_eq!(lhs, &one - &Cyclotomic::root(&f, 2));
    }

    #[test]
    fn inverses() {
        let f6 = field(6);
        assert_eq!(Cyclotomic::one(&f6).inv().unwrap(), Cyclotomic::one(&f6));
        assert_eq!(Cyclotomic::root(&f6, 1).inv().unwrap(), Cyclotomic::root(&f6, 5));
        let f4 = field(4);
        let one = Cyclotomic::one(&f4);
        let i = Cyclotomic::root(&f4, 1);
        // (1 - i)(1 + i)/2 = (1 - i^2)/2 = 1
        let expected = (&one + &i).scale(&rational(1, 2));
        assert_eq!((&one - &i).inv().unwrap(), expected);
        assert_eq!(&(&one - &i) * &expected, one);
        assert_eq!(Cyclotomic::zero(&f4).inv(), Err(ExactError::DivisionByZero { order: 4 }));
    }

    #[test]
    fn rational_extraction() {
        let f = field(6);
        let two_cos = &Cyclotomic::root(&f, 1) + &Cyclotomic::root(&f, 5);
        assert_eq!(cyc_to_rational(&two_cos).unwrap(), rational(1, 1));
        assert_eq!(cyc_to_rational(&Cyclotomic::one(&f)).unwrap(), rational(1, 1));
        assert!(matches!(
            cyc_to_rational(&Cyclotomic::root(&f, 1)),
            Err(ExactError::NotRational { .. })
        ));
    }

    #[test]
    fn order_mismatch_is_reported() {
        let a = cyc_root(4, 1).unwrap();
        let b = cyc_root(6, 1).unwrap();
        assert_eq!(cyc_mul(&a, &b), Err(ExactError::OrderMismatch { left: 4, right: 6 }));
    }

    fn arb_element() -> impl Strategy<Value = (u64, Vec<(i64, i64)>)> {
        (prop::sample::select(vec![3u64, 4, 5, 7, 8, 9, 12, 15]), prop::collection::vec((-6i64..7, 1i64..5), 16))
    }

    fn build(l: u64, raw: &[(i64, i64)]) -> Cyclotomic {
        let f = field(l);
        let coeffs = raw.iter().map(|&(p, q)| rational(p, q)).collect();
        Cyclotomic::from_poly(&f, coeffs)
    }

    proptest! {
        #[test]
        fn field_axioms_hold((l, a) in arb_element(), b in prop::collection::vec((-6i64..7, 1i64..5), 16),
                             c in prop::collection::vec((-6i64..7, 1i64..5), 16)) {
            let (a, b, c) = (build(l, &a), build(l, &b), build(l, &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), Cyclotomic::one(a.field()));
            }
        }

        #[test]
        fn rationals_round_trip(l in 1u64..30, p in -1000i64..1000, q in 1i64..1000) {
            let f = field(l);
            let x = rational(p, q);
            prop_assert_eq!(Cyclotomic::from_rational(&f, x.clone()).to_rational().unwrap(), x);
        }
    }
}
