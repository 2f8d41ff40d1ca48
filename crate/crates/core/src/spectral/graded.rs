use super::model::IsotypeMap;
use super::SpectralError;
use crate::exact::{FiniteAbelianGroup, IsotypeKey};
use std::collections::BTreeMap;

/// A nonzero eigenvalue `mu` of `D^- D^+`, shared with `D^+ D^-`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedLine {
    pub mu: f64,
    pub multiplicity: u64,
    pub isotypes: IsotypeMap,
}

/// A Z/2-graded operator `D = [[0, D^-], [D^+, 0]]` described by its kernels
/// and the common nonzero spectrum of the two Laplacians.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSpectralModel {
    plus_kernel_dim: u64,
    minus_kernel_dim: u64,
    paired: Vec<PairedLine>,
    kernel_isotypes: BTreeMap<IsotypeKey, (u64, u64)>,
    group: FiniteAbelianGroup,
}

impl GradedSpectralModel {
    /// Kernel isotypes default to the trivial character when `kernel_isotypes`
    /// is empty.
    pub fn new(
        group: FiniteAbelianGroup,
        plus_kernel_dim: u64,
        minus_kernel_dim: u64,
        paired: Vec<PairedLine>,
        kernel_isotypes: BTreeMap<IsotypeKey, (u64, u64)>,
    ) -> Result<Self, SpectralError> {
        for line in &paired {
            if !(line.mu.is_finite() && line.mu > 0.0) {
                return Err(SpectralError::InvalidModel(format!("paired eigenvalue must be positive, got {}", line.mu)));
            }
            if line.multiplicity == 0 {
                return Err(SpectralError::InvalidModel(format!("paired eigenvalue {} has zero multiplicity", line.mu)));
            }
            let sum: u64 = line.isotypes.values().sum();
            if !line.isotypes.is_empty() && sum != line.multiplicity {
                return Err(SpectralError::InvalidModel(format!(
                    "paired eigenvalue {}: isotypes sum to {sum}, multiplicity {}",
                    line.mu, line.multiplicity
                )));
            }
            if let Some(bad) = line.isotypes.keys().find(|k| !group.contains_key(k)) {
                return Err(SpectralError::InvalidModel(format!("character {bad} not in group")));
            }
        }
        let kernel_isotypes = if kernel_isotypes.is_empty() {
            let mut m = BTreeMap::new();
            if plus_kernel_dim + minus_kernel_dim > 0 {
                m.insert(IsotypeKey::trivial(&group), (plus_kernel_dim, minus_kernel_dim));
            }
            m
        } else {
            if let Some(bad) = kernel_isotypes.keys().find(|k| !group.contains_key(k)) {
                return Err(SpectralError::InvalidModel(format!("character {bad} not in group")));
            }
            let plus: u64 = kernel_isotypes.values().map(|v| v.0).sum();
            let minus: u64 = kernel_isotypes.values().map(|v| v.1).sum();
            if plus != plus_kernel_dim || minus != minus_kernel_dim {
                return Err(SpectralError::InvalidModel(format!(
                    "kernel isotypes sum to ({plus}, {minus}), kernels are ({plus_kernel_dim}, {minus_kernel_dim})"
                )));
            }
            kernel_isotypes
        };
        Ok(GradedSpectralModel { plus_kernel_dim, minus_kernel_dim, paired, kernel_isotypes, group })
    }

    pub fn plus_kernel_dim(&self) -> u64 {
        self.plus_kernel_dim
    }
    pub fn minus_kernel_dim(&self) -> u64 {
        self.minus_kernel_dim
    }
    pub fn paired_lines(&self) -> &[PairedLine] {
        &self.paired
    }
    pub fn kernel_isotypes(&self) -> &BTreeMap<IsotypeKey, (u64, u64)> {
        &self.kernel_isotypes
    }
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// `dim ker D^+ - dim ker D^-`.
    pub fn index(&self) -> i64 {
        self.plus_kernel_dim as i64 - self.minus_kernel_dim as i64
    }
}
