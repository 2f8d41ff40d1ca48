use super::model::{ModelKind, SpectralModel};
use super::SpectralError;

const MIN_COUNTING_VALUES: usize = 20;
const MIN_WINDOW_POINTS: usize = 5;

/// `N(T)`: eigenvalues of the Laplacian-type operator (`D^2` for Dirac-type
/// models) at most `T`, kernel included.
pub fn counting_function(model: &SpectralModel, threshold: f64) -> Result<u64, SpectralError> {
    let limit = model.cutoff() * model.cutoff();
    if !threshold.is_finite() || threshold > limit * (1.0 + 1e-12) {
        return Err(SpectralError::BeyondCutoff { threshold, limit });
    }
    if threshold < 0.0 {
        return Ok(0);
    }
    let lines: u64 = model
        .lines()
        .iter()
        .filter(|l| square(model.kind(), l.lambda) <= threshold)
        .map(|l| l.multiplicity)
        .sum();
    Ok(lines + model.kernel().dim)
}

fn square(kind: ModelKind, lambda: f64) -> f64 {
    match kind {
        ModelKind::Dirac => lambda * lambda,
        ModelKind::Laplacian => lambda,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylFit {
    /// Fitted exponent of `N(T) ~ C T^exponent`; the Weyl law predicts `m / 2`.
    pub exponent: f64,
    pub constant: f64,
    /// Jump points used in the fit.
    pub points: usize,
}

/// Log-log least squares of `N` at its jump points in the top decade
/// `[cutoff^2 / 10, cutoff^2]`.
pub fn weyl_fit(model: &SpectralModel) -> Result<WeylFit, SpectralError> {
    let limit = model.cutoff() * model.cutoff();
    let mut jumps: Vec<f64> = model
        .lines()
        .iter()
        .map(|l| square(model.kind(), l.lambda))
        .filter(|&t| t > 0.0 && t <= limit)
        .collect();
    jumps.sort_by(f64::total_cmp);
    jumps.dedup();
    if jumps.len() < MIN_COUNTING_VALUES {
        return Err(SpectralError::InsufficientData { found: jumps.len(), needed: MIN_COUNTING_VALUES });
    }
    let mut points = Vec::new();
    let mut running = model.kernel().dim
        + model.lines().iter().filter(|l| square(model.kind(), l.lambda) <= 0.0).map(|l| l.multiplicity).sum::<u64>();
    let mut sorted: Vec<(f64, u64)> = model
        .lines()
        .iter()
        .map(|l| (square(model.kind(), l.lambda), l.multiplicity))
        .filter(|&(t, _)| t > 0.0)
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == t {
            running += sorted[i].1;
            i += 1;
        }
        if t >= limit / 10.0 && t <= limit {
            points.push((t.ln(), (running as f64).ln()));
        }
    }
    if points.len() < MIN_WINDOW_POINTS {
        return Err(SpectralError::InsufficientData { found: points.len(), needed: MIN_WINDOW_POINTS });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Ok(WeylFit { exponent, constant: (my - exponent * mx).exp(), points: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_circle_dirac, build_circle_laplacian, build_torus_laplacian};

    #[test]
    fn counting_includes_kernel_and_respects_cutoff() {
        let m = build_circle_laplacian(1, 10.0).unwrap();
        assert_eq!(counting_function(&m, 0.0).unwrap(), 1);
        assert_eq!(counting_function(&m, 4.0).unwrap(), 5);
        assert_eq!(counting_function(&m, -1.0).unwrap(), 0);
        assert!(matches!(counting_function(&m, 101.0), Err(SpectralError::BeyondCutoff { .. })));
    }

    #[test]
    fn dirac_counting_uses_squares() {
        let m = build_circle_dirac(0.5, 1, 10.0).unwrap();
        // |n + 1/2| <= 2: -1.5, -0.5, 0.5, 1.5
        assert_eq!(counting_function(&m, 4.0).unwrap(), 4);
    }

    #[test]
    fn torus_exponent_approaches_one() {
        let exps: Vec<f64> =
            [40.0, 60.0, 80.0].iter().map(|&c| weyl_fit(&build_torus_laplacian(c).unwrap()).unwrap().exponent).collect();
        assert!(exps[0] < exps[1] && exps[1] < exps[2] && exps[2] < 1.0, "{exps:?}");
        assert!((exps[1] - 1.0).abs() < 0.05, "{exps:?}");
    }

    #[test]
    fn circle_dirac_counting_example() {
        let m = build_circle_dirac(0.25, 1, 3.5).unwrap();
        // lines with lambda^2 <= 1 are -0.75 and 0.25
        assert_eq!(counting_function(&m, 1.0).unwrap(), 2);
        assert_eq!(counting_function(&m, 0.0).unwrap(), 0);
        let mut last = 0;
        for i in 0..=120 {
            let n = counting_function(&m, i as f64 * 0.1).unwrap();
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn single_line_is_insufficient() {
        use crate::exact::FiniteAbelianGroup;
        use crate::spectral::{Kernel, ModelKind, ModelParts, SpectralLine, SpectralModel, Tail};
        let g = FiniteAbelianGroup::trivial();
        let m = SpectralModel::new(ModelParts {
            lines: vec![SpectralLine::trivial(1.0, 1, &g)],
            manifold_dim: 1,
            orbit_dim: 1,
            cutoff: 2.0,
            group: g,
            kind: ModelKind::Dirac,
            kernel: Kernel::default(),
            families: None,
            tail: Tail::Finite,
        })
        .unwrap();
        assert!(matches!(weyl_fit(&m), Err(SpectralError::InsufficientData { .. })));
    }

    #[test]
    fn circle_exponent_near_half() {
        let fit = weyl_fit(&build_circle_laplacian(1, 500.0).unwrap()).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.05, "{}", fit.exponent);
        let fit = weyl_fit(&build_circle_dirac(0.25, 1, 500.0).unwrap()).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.05, "{}", fit.exponent);
    }

    #[test]
    fn too_few_points() {
        let m = build_torus_laplacian(20.0).unwrap();
        assert!(matches!(weyl_fit(&m), Err(SpectralError::InsufficientData { .. })));
    }
}
