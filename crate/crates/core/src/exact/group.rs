//! Finite abelian groups `Z_{m_1} x ... x Z_{m_r}` and their characters.
//!
//! Every irreducible representation of such a group is one-dimensional, so a
//! character is determined by its exponent tuple.

use super::{Cyclotomic, CyclotomicField, ExactError, Rational};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self, ExactError> {
        if orders.contains(&0) {
            return Err(ExactError::InvalidGroup(format!("cyclic orders must be >= 1: {orders:?}")));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn cyclic(m: u64) -> Result<Self, ExactError> {
        Self::new(vec![m])
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { orders: Vec::new() }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// lcm of the cyclic orders; every character value is a root of unity of
    /// this order.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &m| acc.lcm(&m))
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &m in &self.orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..m).map(move |g| {
                        let mut v = prefix.clone();
                        v.push(g);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// All characters, ordered like [`FiniteAbelianGroup::elements`].
    pub fn characters(&self) -> Vec<Character> {
        self.elements()
            .into_iter()
            .map(|exponents| Character { group: self.clone(), exponents })
            .collect()
    }

    pub fn trivial_character(&self) -> Character {
        Character { group: self.clone(), exponents: vec![0; self.orders.len()] }
    }

    pub fn character(&self, exponents: Vec<u64>) -> Result<Character, ExactError> {
        Character::new(self.clone(), exponents)
    }

    pub fn contains_key(&self, key: &IsotypeKey) -> bool {
        key.0.len() == self.orders.len() && key.0.iter().zip(&self.orders).all(|(e, m)| e < m)
    }
}

/// Exponent tuple of a character, used as a map key when the group is known
/// from context. Displays as `"j"` for cyclic groups and `"e1,e2,..."` in
/// general; the trivial group's only key displays as `"0"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsotypeKey(pub Vec<u64>);

impl IsotypeKey {
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        IsotypeKey(vec![0; group.orders().len()])
    }
}

impl fmt::Display for IsotypeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for IsotypeKey {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',').map(|p| p.trim().parse::<u64>()).collect::<Result<_, _>>().map(IsotypeKey)
    }
}

impl IsotypeKey {
    /// Parses a key for `group`, accepting `"0"` for the trivial group.
    pub fn parse_for(s: &str, group: &FiniteAbelianGroup) -> Option<Self> {
        let key: IsotypeKey = s.parse().ok()?;
        if group.orders().is_empty() && key.0 == [0] {
            return Some(IsotypeKey(Vec::new()));
        }
        group.contains_key(&key).then_some(key)
    }
}

/// A one-dimensional character `g -> prod zeta_{m_i}^{e_i g_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    group: FiniteAbelianGroup,
    exponents: Vec<u64>,
}

impl Character {
    pub fn new(group: FiniteAbelianGroup, exponents: Vec<u64>) -> Result<Self, ExactError> {
        if !group.contains_key(&IsotypeKey(exponents.clone())) {
            return Err(ExactError::InvalidCharacter { exponents, orders: group.orders.clone() });
        }
        Ok(Character { group, exponents })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn key(&self) -> IsotypeKey {
        IsotypeKey(self.exponents.clone())
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Power p with value = zeta_M^p, M the group exponent.
    pub fn exponent_at(&self, element: &[u64]) -> u64 {
        let big_m = self.group.exponent();
        self.exponents
            .iter()
            .zip(element)
            .zip(&self.group.orders)
            .map(|((e, g), m)| (e * g % m) * (big_m / m))
            .sum::<u64>()
            % big_m
    }

    pub fn value(&self, field: &Arc<CyclotomicField>, element: &[u64]) -> Cyclotomic {
        let big_m = self.group.exponent();
        debug_assert_eq!(field.order() % big_m, 0);
        let scale = field.order() / big_m;
        Cyclotomic::root(field, (self.exponent_at(element) * scale) as i64)
    }
}

/// `(1/|G|) sum_g a(g) conj(b(g))`, computed in Q(zeta_M).
pub fn char_inner(a: &Character, b: &Character) -> Result<Rational, ExactError> {
    if a.group != b.group {
        return Err(ExactError::GroupMismatch { left: a.group.orders.clone(), right: b.group.orders.clone() });
    }
    let field = CyclotomicField::new(a.group.exponent())?;
    let mut acc = Cyclotomic::zero(&field);
    for g in a.group.elements() {
        acc = &acc + &(&a.value(&field, &g) * &b.value(&field, &g).conj());
    }
    let total = acc.to_rational()?;
    Ok(total / Rational::from_integer(a.group.order().into()))
}
