use super::SpectralError;
use crate::exact::{FiniteAbelianGroup, IsotypeKey};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Decomposition of an eigenspace into characters of the model's group.
pub type IsotypeMap = BTreeMap<IsotypeKey, u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Lines are eigenvalues of a first-order operator D; signs matter.
    Dirac,
    /// Lines are eigenvalues of D^2 (or another Laplacian); no sign structure.
    Laplacian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    pub lambda: f64,
    pub multiplicity: u64,
    pub isotypes: IsotypeMap,
}

impl SpectralLine {
    /// A line whose whole eigenspace carries the trivial character.
    pub fn trivial(lambda: f64, multiplicity: u64, group: &FiniteAbelianGroup) -> Self {
        let mut isotypes = IsotypeMap::new();
        isotypes.insert(IsotypeKey::trivial(group), multiplicity);
        SpectralLine { lambda, multiplicity, isotypes }
    }
}

/// Zero modes, kept apart from the lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Kernel {
    pub dim: u64,
    pub isotypes: IsotypeMap,
}

/// `{ step * n + offset : n in Z }` counted `weight` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArithmeticProgression {
    pub step: f64,
    pub offset: f64,
    pub weight: i64,
}

impl ArithmeticProgression {
    pub fn new(step: f64, offset: f64, weight: i64) -> Result<Self, SpectralError> {
        if !(step.is_finite() && offset.is_finite()) || step <= 0.0 {
            return Err(SpectralError::InvalidParameter(format!("progression step must be positive, got {step}")));
        }
        if !(offset > 0.0 && offset < step) {
            return Err(SpectralError::InvalidParameter(format!(
                "progression offset must satisfy 0 < a < d, got a = {offset}, d = {step}"
            )));
        }
        Ok(ArithmeticProgression { step, offset, weight })
    }

    /// The progression of negated values, `{ d n + (d - a) }`.
    pub fn negated(&self) -> Self {
        ArithmeticProgression { step: self.step, offset: self.step - self.offset, weight: self.weight }
    }

    /// Members with `|value| <= cutoff`, ascending.
    pub fn enumerate(&self, cutoff: f64) -> Vec<f64> {
        let first = ((-cutoff - self.offset) / self.step).ceil() as i64;
        let last = ((cutoff - self.offset) / self.step).floor() as i64;
        (first..=last)
            .map(|n| self.step * n as f64 + self.offset)
            .filter(|v| v.abs() <= cutoff)
            .collect()
    }
}

/// A progression whose eigenvectors all carry one character.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotypicFamily {
    pub progression: ArithmeticProgression,
    pub isotype: IsotypeKey,
}

/// What is known about the spectrum beyond the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// The stored lines are the entire spectrum.
    Finite,
    /// Every half-open window of `|lambda|` of length `spacing` beyond the
    /// cutoff carries total multiplicity at most `weight` (`|lambda| = sqrt(mu)`
    /// for Laplacian-type models).
    Spaced { spacing: f64, weight: f64 },
    /// Laplacian-type counting bound `N(mu) <= slope * mu + intercept`.
    Planar { slope: f64, intercept: f64 },
}

impl Tail {
    /// Bound on `sum_{|lambda| > cutoff} f(|lambda|)` for a unimodal `f >= 0`,
    /// given `sup_{x > cutoff} f` and `int_cutoff^inf f`. `None` when the tail
    /// kind does not support it.
    pub fn unimodal_bound(&self, sup: f64, integral: f64) -> Option<f64> {
        match *self {
            Tail::Finite => Some(0.0),
            Tail::Spaced { spacing, weight } => Some(weight * (2.0 * sup + integral / spacing)),
            Tail::Planar { .. } => None,
        }
    }
}

/// A truncated spectrum with group action: the computable stand-in for an
/// operator commuting with a finite abelian group.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    lines: Vec<SpectralLine>,
    manifold_dim: u32,
    orbit_dim: u32,
    cutoff: f64,
    group: FiniteAbelianGroup,
    kind: ModelKind,
    kernel: Kernel,
    families: Option<Vec<IsotypicFamily>>,
    tail: Tail,
}

/// Unvalidated parts of a [`SpectralModel`].
#[derive(Debug, Clone)]
pub struct ModelParts {
    pub lines: Vec<SpectralLine>,
    pub manifold_dim: u32,
    pub orbit_dim: u32,
    pub cutoff: f64,
    pub group: FiniteAbelianGroup,
    pub kind: ModelKind,
    pub kernel: Kernel,
    pub families: Option<Vec<IsotypicFamily>>,
    pub tail: Tail,
}

fn check_isotypes(group: &FiniteAbelianGroup, map: &IsotypeMap, total: u64, what: &str) -> Result<(), SpectralError> {
    let mut sum = 0u64;
    for (key, &count) in map {
        if !group.contains_key(key) {
            return Err(SpectralError::InvalidModel(format!("{what}: character {key} is not in group {:?}", group.orders())));
        }
        sum += count;
    }
    if sum != total {
        return Err(SpectralError::InvalidModel(format!("{what}: isotype counts sum to {sum}, multiplicity is {total}")));
    }
    Ok(())
}

impl SpectralModel {
    pub fn new(mut parts: ModelParts) -> Result<Self, SpectralError> {
        if parts.manifold_dim == 0 {
            return Err(SpectralError::InvalidModel("manifold dimension must be positive".into()));
        }
        if parts.orbit_dim > parts.manifold_dim {
            return Err(SpectralError::InvalidModel(format!(
                "orbit dimension {} exceeds manifold dimension {}",
                parts.orbit_dim, parts.manifold_dim
            )));
        }
        if !(parts.cutoff.is_finite() && parts.cutoff > 0.0) {
            return Err(SpectralError::InvalidModel(format!("cutoff must be positive, got {}", parts.cutoff)));
        }
        parts.lines.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        for pair in parts.lines.windows(2) {
            if pair[0].lambda == pair[1].lambda {
                return Err(SpectralError::InvalidModel(format!("duplicate eigenvalue {}", pair[0].lambda)));
            }
        }
        for line in &parts.lines {
            if !line.lambda.is_finite() {
                return Err(SpectralError::InvalidModel("non-finite eigenvalue".into()));
            }
            if line.multiplicity == 0 {
                return Err(SpectralError::InvalidModel(format!("eigenvalue {} has zero multiplicity", line.lambda)));
            }
            let magnitude = match parts.kind {
                ModelKind::Dirac => {
                    if line.lambda == 0.0 {
                        return Err(SpectralError::InvalidModel(
                            "zero modes belong in the kernel, not in the lines".into(),
                        ));
                    }
                    line.lambda.abs()
                }
                ModelKind::Laplacian => {
                    if line.lambda < 0.0 {
                        return Err(SpectralError::InvalidModel(format!("negative Laplacian eigenvalue {}", line.lambda)));
                    }
                    line.lambda.sqrt()
                }
            };
            if magnitude > parts.cutoff * (1.0 + 1e-12) {
                return Err(SpectralError::InvalidModel(format!("eigenvalue {} lies beyond cutoff {}", line.lambda, parts.cutoff)));
            }
            check_isotypes(&parts.group, &line.isotypes, line.multiplicity, &format!("line {}", line.lambda))?;
        }
        check_isotypes(&parts.group, &parts.kernel.isotypes, parts.kernel.dim, "kernel")?;
        if let Some(families) = &parts.families {
            for fam in families {
                if !parts.group.contains_key(&fam.isotype) {
                    return Err(SpectralError::InvalidModel(format!("family character {} not in group", fam.isotype)));
                }
                if fam.progression.weight <= 0 {
                    return Err(SpectralError::InvalidModel("family weights must be positive".into()));
                }
            }
        }
        Ok(SpectralModel {
            lines: parts.lines,
            manifold_dim: parts.manifold_dim,
            orbit_dim: parts.orbit_dim,
            cutoff: parts.cutoff,
            group: parts.group,
            kind: parts.kind,
            kernel: parts.kernel,
            families: parts.families,
            tail: parts.tail,
        })
    }

    /// A Dirac-type model generated by isotypic progressions up to `cutoff`.
    pub fn from_families(
        families: Vec<IsotypicFamily>,
        cutoff: f64,
        group: FiniteAbelianGroup,
        manifold_dim: u32,
        orbit_dim: u32,
        kernel: Kernel,
    ) -> Result<Self, SpectralError> {
        let mut by_value: BTreeMap<u64, SpectralLine> = BTreeMap::new();
        let mut values: Vec<(f64, IsotypeKey, u64)> = Vec::new();
        for fam in &families {
            let w = u64::try_from(fam.progression.weight)
                .map_err(|_| SpectralError::InvalidModel("family weights must be positive".into()))?;
            for v in fam.progression.enumerate(cutoff) {
                values.push((v, fam.isotype.clone(), w));
            }
        }
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (v, key, w) in values {
            // total_cmp-consistent key; equal f64 values merge
            let bits = ordered_bits(v);
            let line = by_value.entry(bits).or_insert_with(|| SpectralLine { lambda: v, multiplicity: 0, isotypes: IsotypeMap::new() });
            line.multiplicity += w;
            *line.isotypes.entry(key).or_insert(0) += w;
        }
        let tail = families_tail(&families);
        SpectralModel::new(ModelParts {
            lines: by_value.into_values().collect(),
            manifold_dim,
            orbit_dim,
            cutoff,
            group,
            kind: ModelKind::Dirac,
            kernel,
            families: Some(families),
            tail,
        })
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }
    pub fn manifold_dim(&self) -> u32 {
        self.manifold_dim
    }
    pub fn orbit_dim(&self) -> u32 {
        self.orbit_dim
    }
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }
    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }
    pub fn families(&self) -> Option<&[IsotypicFamily]> {
        self.families.as_deref()
    }
    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// The exact progressions behind the model, without isotype labels.
    pub fn progressions(&self) -> Option<Vec<ArithmeticProgression>> {
        self.families.as_ref().map(|f| f.iter().map(|fam| fam.progression).collect())
    }

    pub fn require_dirac(&self) -> Result<(), SpectralError> {
        match self.kind {
            ModelKind::Dirac => Ok(()),
            ModelKind::Laplacian => Err(SpectralError::WrongKind { expected: ModelKind::Dirac, found: ModelKind::Laplacian }),
        }
    }

    /// The same operator truncated at a different cutoff. Growing the cutoff
    /// needs the generating families (or a finite spectrum).
    pub fn with_cutoff(&self, cutoff: f64) -> Result<Self, SpectralError> {
        if let Some(families) = &self.families {
            return SpectralModel::from_families(
                families.clone(),
                cutoff,
                self.group.clone(),
                self.manifold_dim,
                self.orbit_dim,
                self.kernel.clone(),
            );
        }
        if cutoff > self.cutoff && self.tail != Tail::Finite {
            return Err(SpectralError::InvalidParameter(format!(
                "cannot extend a model without generating families beyond its cutoff {}",
                self.cutoff
            )));
        }
        let keep = |l: &SpectralLine| match self.kind {
            ModelKind::Dirac => l.lambda.abs() <= cutoff,
            ModelKind::Laplacian => l.lambda.sqrt() <= cutoff,
        };
        let mut out = self.clone();
        out.lines.retain(keep);
        if self.tail != Tail::Finite {
            out.cutoff = cutoff;
        } else {
            out.cutoff = cutoff.max(self.cutoff);
        }
        Ok(out)
    }

    /// The model of `-D`.
    pub fn negated(&self) -> Result<Self, SpectralError> {
        self.require_dirac()?;
        let lines = self
            .lines
            .iter()
            .map(|l| SpectralLine { lambda: -l.lambda, multiplicity: l.multiplicity, isotypes: l.isotypes.clone() })
            .collect();
        let families = self.families.as_ref().map(|fams| {
            fams.iter()
                .map(|f| IsotypicFamily { progression: f.progression.negated(), isotype: f.isotype.clone() })
                .collect()
        });
        SpectralModel::new(ModelParts {
            lines,
            manifold_dim: self.manifold_dim,
            orbit_dim: self.orbit_dim,
            cutoff: self.cutoff,
            group: self.group.clone(),
            kind: self.kind,
            kernel: self.kernel.clone(),
            families,
            tail: self.tail,
        })
    }

    pub fn into_parts(self) -> ModelParts {
        ModelParts {
            lines: self.lines,
            manifold_dim: self.manifold_dim,
            orbit_dim: self.orbit_dim,
            cutoff: self.cutoff,
            group: self.group,
            kind: self.kind,
            kernel: self.kernel,
            families: self.families,
            tail: self.tail,
        }
    }
}

fn ordered_bits(v: f64) -> u64 {
    let bits = v.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

fn families_tail(families: &[IsotypicFamily]) -> Tail {
    if families.is_empty() {
        return Tail::Finite;
    }
    // Each family puts at most one value per sign in any |lambda| window of
    // length <= its step.
    let spacing = families.iter().map(|f| f.progression.step).fold(f64::INFINITY, f64::min);
    let weight = families.iter().map(|f| 2.0 * f.progression.weight as f64).sum();
    Tail::Spaced { spacing, weight }
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Serialize, Deserialize)]
struct LineDoc {
    lambda: f64,
    mult: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    isotypes: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct KernelDoc {
    dim: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    isotypes: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    lines: Vec<LineDoc>,
    m: u32,
    #[serde(rename = "m_G")]
    m_g: u32,
    group: Vec<u64>,
    cutoff: f64,
    kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel: Option<KernelDoc>,
}

fn keys_to_strings(map: &IsotypeMap) -> BTreeMap<String, u64> {
    map.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn strings_to_keys(
    group: &FiniteAbelianGroup,
    map: BTreeMap<String, u64>,
    total: u64,
) -> Result<IsotypeMap, SpectralError> {
    if map.is_empty() {
        let mut out = IsotypeMap::new();
        if total > 0 {
            out.insert(IsotypeKey::trivial(group), total);
        }
        return Ok(out);
    }
    map.into_iter()
        .map(|(k, v)| {
            IsotypeKey::parse_for(&k, group)
                .map(|key| (key, v))
                .ok_or_else(|| SpectralError::Json(format!("bad isotype key {k:?} for group {:?}", group.orders())))
        })
        .collect()
}

impl SpectralModel {
    /// Serialises to the model JSON document. Generating families are not part
    /// of the document; a reloaded model is treated as a finite spectrum.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = ModelDoc {
            lines: self
                .lines
                .iter()
                .map(|l| LineDoc { lambda: l.lambda, mult: l.multiplicity, isotypes: keys_to_strings(&l.isotypes) })
                .collect(),
            m: self.manifold_dim,
            m_g: self.orbit_dim,
            group: self.group.orders().to_vec(),
            cutoff: self.cutoff,
            kind: self.kind,
            kernel: (self.kernel.dim > 0)
                .then(|| KernelDoc { dim: self.kernel.dim, isotypes: keys_to_strings(&self.kernel.isotypes) }),
        };
        serde_json::to_value(doc).expect("model document serialises")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, SpectralError> {
        let doc: ModelDoc = serde_json::from_value(value.clone()).map_err(|e| SpectralError::Json(e.to_string()))?;
        let group = FiniteAbelianGroup::new(doc.group)?;
        let lines = doc
            .lines
            .into_iter()
            .map(|l| {
                Ok(SpectralLine { lambda: l.lambda, multiplicity: l.mult, isotypes: strings_to_keys(&group, l.isotypes, l.mult)? })
            })
            .collect::<Result<Vec<_>, SpectralError>>()?;
        let kernel = match doc.kernel {
            Some(k) => Kernel { dim: k.dim, isotypes: strings_to_keys(&group, k.isotypes, k.dim)? },
            None => Kernel::default(),
        };
        SpectralModel::new(ModelParts {
            lines,
            manifold_dim: doc.m,
            orbit_dim: doc.m_g,
            cutoff: doc.cutoff,
            group,
            kind: doc.kind,
            kernel,
            families: None,
            tail: Tail::Finite,
        })
    }
}
