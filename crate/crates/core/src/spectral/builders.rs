use super::model::{ArithmeticProgression, IsotypeMap, IsotypicFamily, Kernel, ModelKind, ModelParts, SpectralLine, SpectralModel, Tail};
use super::SpectralError;
use crate::exact::{char_inner, Character, FiniteAbelianGroup, IsotypeKey};
use num_traits::ToPrimitive;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

/// The `j`-th isotypic progression of the `Z_k`-equivariant circle operator
/// with offset `a`: `{ k n + j + a : n in Z }`.
pub fn ap_isotypic(a: f64, k: u64, j: u64) -> Result<ArithmeticProgression, SpectralError> {
    if k == 0 || j >= k {
        return Err(SpectralError::InvalidParameter(format!("need 0 <= j < k, got j = {j}, k = {k}")));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(SpectralError::InvalidParameter(format!("offset a must lie in (0, 1), got {a}")));
    }
    ArithmeticProgression::new(k as f64, j as f64 + a, 1)
}

/// `-i d/dtheta + a` on the circle, with `Z_k` acting by rotation: eigenvalue
/// `n + a` carries character `n mod k`.
pub fn build_circle_dirac(a: f64, k: u64, cutoff: f64) -> Result<SpectralModel, SpectralError> {
    if !(cutoff >= 1.0 && cutoff.is_finite()) {
        return Err(SpectralError::InvalidParameter(format!("cutoff must be at least 1, got {cutoff}")));
    }
    let group = FiniteAbelianGroup::cyclic(k)?;
    let families = (0..k)
        .map(|j| Ok(IsotypicFamily { progression: ap_isotypic(a, k, j)?, isotype: IsotypeKey(vec![j]) }))
        .collect::<Result<Vec<_>, SpectralError>>()?;
    SpectralModel::from_families(families, cutoff, group, 1, 1, Kernel::default())
}

/// Laplacian of the circle `R / 2 pi Z` with `Z_k` acting by rotation:
/// eigenvalue `n^2` is spanned by `e^{+-i n theta}`, carrying characters
/// `+-n mod k`.
pub fn build_circle_laplacian(k: u64, cutoff: f64) -> Result<SpectralModel, SpectralError> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(SpectralError::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    let group = FiniteAbelianGroup::cyclic(k)?;
    let top = cutoff.floor() as u64;
    let lines = (0..=top)
        .map(|n| {
            let mut isotypes = IsotypeMap::new();
            *isotypes.entry(IsotypeKey(vec![n % k])).or_insert(0) += 1;
            if n > 0 {
                *isotypes.entry(IsotypeKey(vec![(k - n % k) % k])).or_insert(0) += 1;
            }
            SpectralLine { lambda: (n * n) as f64, multiplicity: if n == 0 { 1 } else { 2 }, isotypes }
        })
        .collect();
    SpectralModel::new(ModelParts {
        lines,
        manifold_dim: 1,
        orbit_dim: 1,
        cutoff,
        group,
        kind: ModelKind::Laplacian,
        kernel: Kernel::default(),
        families: None,
        tail: Tail::Spaced { spacing: 1.0, weight: 2.0 },
    })
}

/// Laplacian of the flat torus `R^2 / Z^2`: eigenvalues `4 pi^2 (p^2 + q^2)`
/// with `sqrt(mu) <= cutoff`. `T^2` acts on itself with full orbits.
pub fn build_torus_laplacian(cutoff: f64) -> Result<SpectralModel, SpectralError> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(SpectralError::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    let group = FiniteAbelianGroup::trivial();
    let radius = cutoff / (2.0 * PI);
    let r = radius.floor() as i64;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for p in -r..=r {
        for q in -r..=r {
            let n = p * p + q * q;
            if (n as f64).sqrt() <= radius {
                *counts.entry(n).or_insert(0) += 1;
            }
        }
    }
    let lines = counts
        .into_iter()
        .map(|(n, mult)| SpectralLine::trivial(4.0 * PI * PI * n as f64, mult, &group))
        .collect();
    SpectralModel::new(ModelParts {
        lines,
        manifold_dim: 2,
        orbit_dim: 2,
        cutoff,
        group,
        kind: ModelKind::Laplacian,
        kernel: Kernel::default(),
        families: None,
        // N(mu) <= pi (r + 1/sqrt 2)^2 <= mu / (2 pi) + pi with r = sqrt(mu) / (2 pi)
        tail: Tail::Planar { slope: 1.0 / (2.0 * PI), intercept: PI },
    })
}

struct Projector<'a> {
    rho: &'a Character,
    group: &'a FiniteAbelianGroup,
    memo: HashMap<IsotypeKey, u64>,
}

impl Projector<'_> {
    /// Multiplicity of `rho` in the representation with character
    /// `sum_sigma n_sigma sigma`, via the orthogonality integral.
    fn project(&mut self, isotypes: &IsotypeMap) -> Result<u64, SpectralError> {
        let mut dim = 0u64;
        for (key, &count) in isotypes {
            let weight = match self.memo.get(key) {
                Some(&w) => w,
                None => {
                    let sigma = Character::new(self.group.clone(), key.0.clone())?;
                    let inner = char_inner(&sigma, self.rho)?;
                    let w = inner
                        .to_integer()
                        .to_u64()
                        .filter(|_| inner.is_integer())
                        .ok_or_else(|| SpectralError::InvalidModel(format!("non-integral character pairing {inner}")))?;
                    self.memo.insert(key.clone(), w);
                    w
                }
            };
            dim += weight * count;
        }
        Ok(dim)
    }
}

/// The restriction of the model to the `rho`-isotypic subspace.
pub fn project_isotypic(model: &SpectralModel, rho: &Character) -> Result<SpectralModel, SpectralError> {
    if rho.group() != model.group() {
        return Err(SpectralError::Exact(crate::exact::ExactError::GroupMismatch {
            left: model.group().orders().to_vec(),
            right: rho.group().orders().to_vec(),
        }));
    }
    let mut projector = Projector { rho, group: model.group(), memo: HashMap::new() };
    let key = rho.key();
    let single = |count: u64| {
        let mut m = IsotypeMap::new();
        if count > 0 {
            m.insert(key.clone(), count);
        }
        m
    };
    let mut lines = Vec::new();
    for line in model.lines() {
        let dim = projector.project(&line.isotypes)?;
        if dim > 0 {
            lines.push(SpectralLine { lambda: line.lambda, multiplicity: dim, isotypes: single(dim) });
        }
    }
    let kernel_dim = projector.project(&model.kernel().isotypes)?;
    let kernel = Kernel { dim: kernel_dim, isotypes: single(kernel_dim) };
    let families: Option<Vec<IsotypicFamily>> =
        model.families().map(|fams| fams.iter().filter(|f| f.isotype == key).cloned().collect());
    let tail = match (&families, model.tail()) {
        (Some(f), _) if f.is_empty() => Tail::Finite,
        (Some(f), _) => Tail::Spaced {
            spacing: f.iter().map(|x| x.progression.step).fold(f64::INFINITY, f64::min),
            weight: f.iter().map(|x| 2.0 * x.progression.weight as f64).sum(),
        },
        (None, t) => t,
    };
    SpectralModel::new(ModelParts {
        lines,
        manifold_dim: model.manifold_dim(),
        orbit_dim: model.orbit_dim(),
        cutoff: model.cutoff(),
        group: model.group().clone(),
        kind: model.kind(),
        kernel,
        families,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_dirac_enumeration() {
        let m = build_circle_dirac(0.25, 1, 3.5).unwrap();
        let values: Vec<f64> = m.lines().iter().map(|l| l.lambda).collect();
        assert_eq!(values, vec![-2.75, -1.75, -0.75, 0.25, 1.25, 2.25, 3.25]);
        assert!(build_circle_dirac(0.0, 1, 3.0).is_err());
        assert!(build_circle_dirac(1.0, 1, 3.0).is_err());
        assert!(build_circle_dirac(0.5, 1, 0.5).is_err());
        let sym = build_circle_dirac(0.5, 1, 10.0).unwrap();
        let neg: Vec<f64> = sym.lines().iter().rev().map(|l| -l.lambda).collect();
        assert_eq!(neg, sym.lines().iter().map(|l| l.lambda).collect::<Vec<_>>());
    }

    #[test]
    fn circle_laplacian_isotypes() {
        let m = build_circle_laplacian(3, 10.0).unwrap();
        for line in m.lines() {
            let n = line.lambda.sqrt().round() as u64;
            let total: u64 = line.isotypes.values().sum();
            assert_eq!(total, line.multiplicity);
            if n % 3 == 0 {
                assert_eq!(line.isotypes.get(&IsotypeKey(vec![0])), Some(&line.multiplicity));
            } else {
                assert_eq!(line.isotypes.len(), 2);
            }
        }
    }

    #[test]
    fn circle_dirac_lines() {
        let m = build_circle_dirac(0.25, 3, 3.0).unwrap();
        let values: Vec<f64> = m.lines().iter().map(|l| l.lambda).collect();
        assert_eq!(values, vec![-2.75, -1.75, -0.75, 0.25, 1.25, 2.25]);
        // n = -3 -> character 0, n = 1 -> character 1
        assert_eq!(m.lines()[0].isotypes.get(&IsotypeKey(vec![0])), Some(&1));
        assert_eq!(m.lines()[4].isotypes.get(&IsotypeKey(vec![1])), Some(&1));
        assert!(matches!(m.tail(), Tail::Spaced { .. }));
    }

    #[test]
    fn progression_members() {
        let p = ap_isotypic(0.25, 3, 1).unwrap();
        assert_eq!(p.enumerate(6.0), vec![-4.75, -1.75, 1.25, 4.25]);
        assert!(ap_isotypic(0.25, 3, 3).is_err());
        assert!(ap_isotypic(0.0, 3, 1).is_err());
    }

    #[test]
    fn torus_multiplicities() {
        let m = build_torus_laplacian(2.0 * PI * 2.0 + 1e-9).unwrap();
        let counts: Vec<u64> = m.lines().iter().map(|l| l.multiplicity).collect();
        // n = 0, 1, 2, 4
        assert_eq!(counts, vec![1, 4, 4, 4]);
        assert_eq!(m.lines()[0].lambda, 0.0);
        assert!((m.lines()[1].lambda - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn torus_count_against_area() {
        use crate::spectral::counting_function;
        for cutoff in [40.0, 60.0, 100.0] {
            let m = build_torus_laplacian(cutoff).unwrap();
            let n = counting_function(&m, cutoff * cutoff).unwrap() as f64;
            let ratio = n / (cutoff * cutoff / (4.0 * PI));
            assert!((ratio - 1.0).abs() < 0.05, "cutoff {cutoff}: ratio {ratio}");
        }
    }

    #[test]
    fn trivial_projection_is_identity() {
        let m = build_torus_laplacian(30.0).unwrap();
        let rho = m.group().trivial_character();
        let p = project_isotypic(&m, &rho).unwrap();
        assert_eq!(p.lines(), m.lines());
    }

    #[test]
    fn projection_matches_direct_lookup() {
        let m = build_circle_dirac(0.4, 4, 20.0).unwrap();
        let mut total = 0;
        for chi in m.group().characters() {
            let p = project_isotypic(&m, &chi).unwrap();
            for line in p.lines() {
                let orig = m.lines().iter().find(|l| l.lambda == line.lambda).unwrap();
                assert_eq!(orig.isotypes.get(&chi.key()).copied(), Some(line.multiplicity));
                let n = (line.lambda - 0.4).round() as i64;
                assert_eq!(n.rem_euclid(4) as u64, chi.exponents()[0]);
            }
            total += p.lines().len();
            assert_eq!(p.families().unwrap().len(), 1);
        }
        assert_eq!(total, m.lines().len());
    }

    #[test]
    fn projection_rejects_foreign_character() {
        let m = build_circle_dirac(0.4, 4, 5.0).unwrap();
        let chi = FiniteAbelianGroup::cyclic(3).unwrap().character(vec![1]).unwrap();
        assert!(project_isotypic(&m, &chi).is_err());
    }
}
