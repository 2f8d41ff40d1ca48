use super::HeatError;
use crate::exact::IsotypeKey;
use crate::specfun::{erfc, erfc_integral_from};
use crate::spectral::{GradedSpectralModel, ModelKind, SpectralModel, Tail, TraceValue};
use std::f64::consts::PI;

fn check_time(t: f64) -> Result<(), HeatError> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(HeatError::InvalidArgument(format!("t must be positive and finite, got {t}")))
    }
}

/// Bound on `sum_{mu > X} e^{-t mu}` under `N(mu) <= slope mu + intercept`.
fn planar_heat_tail(slope: f64, intercept: f64, x: f64, t: f64) -> f64 {
    (-t * x).exp() * (slope * x + intercept + slope / t)
}

/// `Tr e^{-t D^2}` (Dirac-type) or `Tr e^{-t L}` (Laplacian-type) over the
/// stored lines and the kernel, with a bound on the omitted spectrum.
pub fn heat_trace(model: &SpectralModel, t: f64) -> Result<TraceValue, HeatError> {
    check_time(t)?;
    let square = |lambda: f64| match model.kind() {
        ModelKind::Dirac => lambda * lambda,
        ModelKind::Laplacian => lambda,
    };
    // sum small terms first
    let mut terms: Vec<f64> = model.lines().iter().map(|l| l.multiplicity as f64 * (-t * square(l.lambda)).exp()).collect();
    terms.sort_by(f64::total_cmp);
    let value = terms.iter().sum::<f64>() + model.kernel().dim as f64;
    let cutoff = model.cutoff();
    let tail_bound = match model.tail() {
        Tail::Planar { slope, intercept } => planar_heat_tail(slope, intercept, cutoff * cutoff, t),
        tail => {
            let sup = (-t * cutoff * cutoff).exp();
            let integral = 0.5 * (PI / t).sqrt() * erfc(cutoff * t.sqrt());
            tail.unimodal_bound(sup, integral).unwrap_or(f64::INFINITY)
        }
    };
    Ok(TraceValue { value, tail_bound })
}

/// `sum sgn(lambda) mult f(|lambda|)`. The two signs are summed separately in
/// increasing `|lambda|`, so a symmetric spectrum cancels exactly.
fn signed_sum<F: Fn(f64) -> f64>(model: &SpectralModel, f: F) -> f64 {
    let lines = model.lines();
    let split = lines.partition_point(|l| l.lambda < 0.0);
    let positive: f64 = lines[split..].iter().map(|l| l.multiplicity as f64 * f(l.lambda)).sum();
    let negative: f64 = lines[..split].iter().rev().map(|l| l.multiplicity as f64 * f(-l.lambda)).sum();
    positive - negative
}

/// The cylinder function `K(t) = -sum_lambda (sgn lambda / 2) erfc(|lambda| sqrt t)`
/// over the nonzero spectrum.
pub fn k_of_t(model: &SpectralModel, t: f64) -> Result<TraceValue, HeatError> {
    check_time(t)?;
    model.require_dirac()?;
    let root = t.sqrt();
    let value = -0.5 * signed_sum(model, |x| erfc(x * root));
    let x = model.cutoff() * root;
    let sup = 0.5 * erfc(x);
    let integral = 0.5 * erfc_integral_from(x) / root;
    let tail_bound = model.tail().unimodal_bound(sup, integral).unwrap_or(f64::INFINITY);
    Ok(TraceValue { value, tail_bound })
}

/// `alpha(t) = Tr D e^{-t D^2}` over the stored lines, with tail bound.
pub fn alpha_trace(model: &SpectralModel, t: f64) -> Result<TraceValue, HeatError> {
    check_time(t)?;
    model.require_dirac()?;
    let value = signed_sum(model, |x| x * (-t * x * x).exp());
    let cutoff = model.cutoff();
    let peak = (2.0 * t).sqrt().recip();
    let at = cutoff.max(peak);
    let sup = at * (-t * at * at).exp();
    let integral = (-t * cutoff * cutoff).exp() / (2.0 * t);
    let tail_bound = model.tail().unimodal_bound(sup, integral).unwrap_or(f64::INFINITY);
    Ok(TraceValue { value, tail_bound })
}

/// `|centered difference of K at t - (4 pi t)^{-1/2} alpha(t)|` with step
/// `1e-4 t`. Both sides use the same stored lines.
pub fn k_prime_identity_residual(model: &SpectralModel, t: f64) -> Result<f64, HeatError> {
    check_time(t)?;
    let h = 1e-4 * t;
    let plus = k_of_t(model, t + h)?.value;
    let minus = k_of_t(model, t - h)?.value;
    let derivative = (plus - minus) / (2.0 * h);
    let alpha = alpha_trace(model, t)?.value;
    Ok((derivative - alpha / (4.0 * PI * t).sqrt()).abs())
}

/// `Tr e^{-t D^- D^+} - Tr e^{-t D^+ D^-}`, with both traces evaluated.
pub fn mckean_singer(graded: &GradedSpectralModel, t: f64) -> Result<f64, HeatError> {
    check_time(t)?;
    let paired: Vec<f64> = graded.paired_lines().iter().map(|l| l.multiplicity as f64 * (-t * l.mu).exp()).collect();
    let plus = graded.plus_kernel_dim() as f64 + paired.iter().sum::<f64>();
    let minus = graded.minus_kernel_dim() as f64 + paired.iter().sum::<f64>();
    Ok(plus - minus)
}

/// The supertrace restricted to the `rho`-isotypic subspace.
pub fn mckean_singer_isotypic(graded: &GradedSpectralModel, rho: &IsotypeKey, t: f64) -> Result<f64, HeatError> {
    check_time(t)?;
    if !graded.group().contains_key(rho) {
        return Err(HeatError::InvalidArgument(format!("character {rho} not in group {:?}", graded.group().orders())));
    }
    let (kp, km) = graded.kernel_isotypes().get(rho).copied().unwrap_or((0, 0));
    let paired: Vec<f64> = graded
        .paired_lines()
        .iter()
        .map(|l| {
            let count = if l.isotypes.is_empty() {
                if *rho == IsotypeKey::trivial(graded.group()) { l.multiplicity } else { 0 }
            } else {
                l.isotypes.get(rho).copied().unwrap_or(0)
            };
            count as f64 * (-t * l.mu).exp()
        })
        .collect();
    let plus = kp as f64 + paired.iter().sum::<f64>();
    let minus = km as f64 + paired.iter().sum::<f64>();
    Ok(plus - minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::FiniteAbelianGroup;
    use crate::spectral::{build_circle_dirac, build_circle_laplacian, Kernel, ModelParts, PairedLine, SpectralLine};
    use std::collections::BTreeMap;

    fn finite(lines: &[(f64, u64)]) -> SpectralModel {
        let g = FiniteAbelianGroup::trivial();
        SpectralModel::new(ModelParts {
            lines: lines.iter().map(|&(l, m)| SpectralLine::trivial(l, m, &g)).collect(),
            manifold_dim: 1,
            orbit_dim: 1,
            cutoff: 10.0,
            group: g,
            kind: ModelKind::Dirac,
            kernel: Kernel::default(),
            families: None,
            tail: Tail::Finite,
        })
        .unwrap()
    }

    #[test]
    fn heat_trace_small_cases() {
        assert_eq!(heat_trace(&finite(&[]), 1.0).unwrap().value, 0.0);
        let v = heat_trace(&finite(&[(1.0, 3)]), 1.0).unwrap();
        assert!((v.value - 3.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(v.tail_bound, 0.0);
        assert!(heat_trace(&finite(&[]), 0.0).is_err());
    }

    #[test]
    fn circle_heat_trace_poisson() {
        let m = build_circle_laplacian(1, 100.0).unwrap();
        let t = 0.01;
        let v = heat_trace(&m, t).unwrap();
        // correction terms are e^{-pi^2 k^2 / t} ~ e^{-987}
        assert!((v.value - (PI / t).sqrt()).abs() < 1e-8, "{}", v.value);
        assert!(v.tail_bound < 1e-30);
    }

    #[test]
    fn k_single_line() {
        let v = k_of_t(&finite(&[(1.0, 1)]), 1.0).unwrap();
        assert!((v.value + 0.0786496035251426).abs() < 1e-15, "{}", v.value);
    }

    #[test]
    fn k_symmetric_is_zero() {
        let m = build_circle_dirac(0.5, 1, 40.0).unwrap();
        for t in [1e-4, 0.01, 0.3, 2.0, 50.0] {
            assert_eq!(k_of_t(&m, t).unwrap().value, 0.0);
            assert_eq!(k_prime_identity_residual(&m, t).unwrap(), 0.0);
        }
        assert_eq!(k_of_t(&finite(&[(-2.0, 3), (2.0, 3)]), 0.7).unwrap().value, 0.0);
    }

    #[test]
    fn k_decays_like_smallest_eigenvalue() {
        let m = build_circle_dirac(0.25, 1, 50.0).unwrap();
        // the lowest line 1/4 dominates: K(t) ~ -erfc(sqrt(t)/4)/2
        for t in [25.0, 100.0, 400.0] {
            let k = k_of_t(&m, t).unwrap().value;
            let lead = -0.5 * erfc(0.25 * t.sqrt());
            assert!((k - lead).abs() <= 0.5 * erfc(0.75 * t.sqrt()) * 1.01 + 1e-300, "t = {t}");
        }
        assert!(k_of_t(&m, 400.0).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn alpha_examples() {
        let v = alpha_trace(&finite(&[(2.0, 1)]), 1.0).unwrap();
        assert!((v.value - 2.0 * (-4.0f64).exp()).abs() < 1e-16);
        let sym = build_circle_dirac(0.5, 1, 30.0).unwrap();
        assert_eq!(alpha_trace(&sym, 0.2).unwrap().value, 0.0);
        let m = build_circle_dirac(0.25, 1, 80.0).unwrap();
        let a = alpha_trace(&m, 0.01).unwrap();
        assert!(a.value.abs() < 1e-8, "{}", a.value);
        assert!(a.tail_bound < 1e-8);
        assert!(alpha_trace(&build_circle_laplacian(1, 5.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn k_prime_identity() {
        let single = finite(&[(1.0, 1)]);
        assert!(k_prime_identity_residual(&single, 1.0).unwrap() <= 1e-8);
        let m = build_circle_dirac(0.25, 1, 40.0).unwrap();
        assert!(k_prime_identity_residual(&m, 0.5).unwrap() <= 1e-7);
    }

    #[test]
    fn mckean_singer_constant() {
        let g = FiniteAbelianGroup::trivial();
        let paired = [1.0, 2.0, 3.0]
            .iter()
            .map(|&mu| PairedLine { mu, multiplicity: 1, isotypes: BTreeMap::new() })
            .collect();
        let graded = GradedSpectralModel::new(g, 2, 1, paired, BTreeMap::new()).unwrap();
        let values: Vec<f64> = [0.01, 0.1, 1.0, 10.0].iter().map(|&t| mckean_singer(&graded, t).unwrap()).collect();
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 1e-12);
        assert!(values.iter().all(|v| v.round() == 1.0 && (v - 1.0).abs() < 1e-12));
        let empty = GradedSpectralModel::new(FiniteAbelianGroup::trivial(), 0, 0, vec![], BTreeMap::new()).unwrap();
        assert_eq!(mckean_singer(&empty, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn mckean_singer_isotypic_index() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let mut kernel = BTreeMap::new();
        kernel.insert(IsotypeKey(vec![0]), (2, 0));
        kernel.insert(IsotypeKey(vec![1]), (0, 1));
        let mut iso = BTreeMap::new();
        iso.insert(IsotypeKey(vec![1]), 2);
        let paired = vec![PairedLine { mu: 0.5, multiplicity: 2, isotypes: iso }];
        let graded = GradedSpectralModel::new(g, 2, 1, paired, kernel).unwrap();
        assert!((mckean_singer_isotypic(&graded, &IsotypeKey(vec![0]), 0.3).unwrap() - 2.0).abs() < 1e-12);
        assert!((mckean_singer_isotypic(&graded, &IsotypeKey(vec![1]), 0.3).unwrap() + 1.0).abs() < 1e-12);
        assert!((mckean_singer(&graded, 0.3).unwrap() - 1.0).abs() < 1e-12);
    }
}
