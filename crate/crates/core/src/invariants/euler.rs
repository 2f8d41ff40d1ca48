use super::InvariantError;
use crate::exact::{Character, Cyclotomic, CyclotomicField, IsotypeKey, Rational};
use num_traits::{One, ToPrimitive};
use std::collections::BTreeMap;
use std::sync::Arc;

type Matrix = Vec<Vec<Cyclotomic>>;

/// The action of a generator of `Z_m` on harmonic forms, one matrix per degree.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyAction {
    order: u64,
    field: Arc<CyclotomicField>,
    degrees: Vec<Matrix>,
}

fn identity(field: &Arc<CyclotomicField>, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Cyclotomic::one(field) } else { Cyclotomic::zero(field) }).collect())
        .collect()
}

fn matmul(a: &Matrix, b: &Matrix, field: &Arc<CyclotomicField>) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Cyclotomic::zero(field), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

fn trace(a: &Matrix, field: &Arc<CyclotomicField>) -> Cyclotomic {
    (0..a.len()).fold(Cyclotomic::zero(field), |acc, i| &acc + &a[i][i])
}

impl CohomologyAction {
    /// Entries must lie in one field `Q(zeta_L)` with `m | L`; the generator
    /// must satisfy `A^m = I` in every degree.
    pub fn new(order: u64, field: Arc<CyclotomicField>, degrees: Vec<Matrix>) -> Result<Self, InvariantError> {
        if order == 0 {
            return Err(InvariantError::InconsistentAction("group order must be positive".into()));
        }
        if field.order() % order != 0 {
            return Err(InvariantError::InconsistentAction(format!(
                "field Q(zeta_{}) does not contain the characters of Z_{order}",
                field.order()
            )));
        }
        for (q, mat) in degrees.iter().enumerate() {
            let n = mat.len();
            if mat.iter().any(|row| row.len() != n) {
                return Err(InvariantError::InconsistentAction(format!("degree {q} matrix is not square")));
            }
            if mat.iter().flatten().any(|e| e.order() != field.order()) {
                return Err(InvariantError::InconsistentAction(format!("degree {q} entries live in a different field")));
            }
            let mut power = identity(&field, n);
            for _ in 0..order {
                power = matmul(&power, mat, &field);
            }
            if power != identity(&field, n) {
                return Err(InvariantError::InconsistentAction(format!("degree {q}: generator^{order} is not the identity")));
            }
        }
        Ok(CohomologyAction { order, field, degrees })
    }

    /// Integer matrices, taken in `Q(zeta_m)`.
    pub fn from_integer_matrices(order: u64, degrees: &[Vec<Vec<i64>>]) -> Result<Self, InvariantError> {
        let field = CyclotomicField::new(order)?;
        let lift = |x: i64| Cyclotomic::from_rational(&field, Rational::from_integer(x.into()));
        let mats = degrees.iter().map(|m| m.iter().map(|row| row.iter().map(|&x| lift(x)).collect()).collect()).collect();
        CohomologyAction::new(order, field, mats)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|m| m.len()).collect()
    }

    /// `sum_q (-1)^q dim H^q`.
    pub fn euler_characteristic(&self) -> i64 {
        self.betti().iter().enumerate().map(|(q, &b)| if q % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

/// `chi^rho(M) = sum_q (-1)^q <chi_rho, tr(A_q^g)>` for the cyclic group
/// generated by the action.
pub fn euler_from_action(action: &CohomologyAction, rho: &Character) -> Result<i64, InvariantError> {
    let m = action.order;
    if rho.group().orders() != [m] {
        return Err(InvariantError::InvalidInput(format!(
            "character of {:?} does not belong to Z_{m}",
            rho.group().orders()
        )));
    }
    let field = &action.field;
    let scale = field.order() / m;
    let e = rho.exponents()[0];
    let mut total = Cyclotomic::zero(field);
    for (q, mat) in action.degrees.iter().enumerate() {
        let mut power = identity(field, mat.len());
        let mut inner = Cyclotomic::zero(field);
        for g in 0..m {
            let conj_rho = Cyclotomic::root(field, -((e * g * scale) as i64));
            inner = &inner + &(&trace(&power, field) * &conj_rho);
            power = matmul(&power, mat, field);
        }
        total = if q % 2 == 0 { &total + &inner } else { &total - &inner };
    }
    let value = total.to_rational()? / Rational::from_integer((m as i64).into());
    if !value.denom().is_one() {
        return Err(InvariantError::NonIntegral(format!("character pairing {value} is not an integer")));
    }
    value
        .to_integer()
        .to_i64()
        .ok_or_else(|| InvariantError::NonIntegral(format!("pairing {value} does not fit in i64")))
}

/// `chi^rho` for every character of `Z_m`.
pub fn euler_table(action: &CohomologyAction) -> Result<BTreeMap<IsotypeKey, i64>, InvariantError> {
    let group = crate::exact::FiniteAbelianGroup::cyclic(action.order)?;
    let table: BTreeMap<IsotypeKey, i64> = group
        .characters()
        .iter()
        .map(|chi| Ok((chi.key(), euler_from_action(action, chi)?)))
        .collect::<Result<_, InvariantError>>()?;
    let sum: i64 = table.values().sum();
    if sum != action.euler_characteristic() {
        return Err(InvariantError::InconsistentAction(format!(
            "isotypic Euler characteristics sum to {sum}, not {}",
            action.euler_characteristic()
        )));
    }
    Ok(table)
}

/// Rotation by a quarter turn of `T^2`, on the harmonic basis
/// `{1}, {dy_1, dy_2}, {dy_1 ^ dy_2}`.
pub fn torus_z4_action() -> CohomologyAction {
    CohomologyAction::from_integer_matrices(4, &[vec![vec![1]], vec![vec![0, -1], vec![1, 0]], vec![vec![1]]])
        .expect("quarter turn has order 4")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereAction {
    /// `O(n)` rotating the latitude spheres of `S^n`.
    Latitude,
    /// `Z_2` acting by `x -> -x`.
    Antipodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereCharacter {
    Trivial,
    /// The sign (determinant) character.
    Xi,
}

pub fn euler_sphere(n: u32, action: SphereAction, rho: SphereCharacter) -> Result<i64, InvariantError> {
    if n == 0 {
        return Err(InvariantError::InvalidInput("sphere dimension must be positive".into()));
    }
    let even = n % 2 == 0;
    Ok(match (action, rho) {
        (SphereAction::Latitude, SphereCharacter::Trivial) => 1,
        (SphereAction::Latitude, SphereCharacter::Xi) => {
            if even {
                1
            } else {
                -1
            }
        }
        (SphereAction::Antipodal, SphereCharacter::Trivial) => i64::from(even),
        (SphereAction::Antipodal, SphereCharacter::Xi) => i64::from(even),
    })
}

/// The antipodal map on harmonic forms of `S^n`: identity on `H^0`, degree
/// `(-1)^{n+1}` on `H^n`.
pub fn sphere_antipodal_action(n: u32) -> Result<CohomologyAction, InvariantError> {
    if n == 0 {
        return Err(InvariantError::InvalidInput("sphere dimension must be positive".into()));
    }
    let mut degrees = vec![Vec::new(); n as usize + 1];
    degrees[0] = vec![vec![1]];
    degrees[n as usize] = vec![vec![if n % 2 == 0 { -1 } else { 1 }]];
    CohomologyAction::from_integer_matrices(2, &degrees)
}

/// Index of `dbar + dbar^*` on `Omega^{j, even} -> Omega^{j, odd}` of `CP^n`
/// restricted to a character of the torus: `(-1)^j` on the trivial one.
pub fn dolbeault_index_cpn(n: u32, j: u32, trivial: bool) -> Result<i64, InvariantError> {
    if j > n {
        return Err(InvariantError::InvalidInput(format!("need 0 <= j <= n, got j = {j}, n = {n}")));
    }
    Ok(if !trivial {
        0
    } else if j % 2 == 0 {
        1
    } else {
        -1
    })
}
