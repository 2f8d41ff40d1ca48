use super::{EtaError, EtaResult, Route};
use crate::exact::Character;
use crate::heat::{alpha_trace, k_of_t};
use crate::specfun::{erfc, gamma_half, hurwitz_zeta_with_error, quad_adaptive, Tolerance};
use crate::spectral::{project_isotypic, ArithmeticProgression, SpectralModel, Tail};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Absolute accuracy aimed for by the numeric routes.
const TARGET: f64 = 1e-9;
/// Lines regenerated for a series tail are capped at this cutoff.
const MAX_SERIES_CUTOFF: f64 = 1e6;

fn diagnostics(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// `sum sgn(lambda) mult |lambda|^{-z}` over the stored lines, plus a tail
/// bound from the model's line density. Finite spectra are summed exactly for
/// any `z`; infinite ones need `z > m + 1`.
pub fn eta_series(model: &SpectralModel, z: f64) -> Result<EtaResult, EtaError> {
    model.require_dirac()?;
    if !z.is_finite() {
        return Err(EtaError::InvalidArgument(format!("z must be finite, got {z}")));
    }
    let infinite = model.tail() != Tail::Finite;
    let needed = model.manifold_dim() as f64 + 1.0;
    if infinite && z <= needed {
        return Err(EtaError::SeriesDivergent { z, needed });
    }
    let bound_at = |cutoff: f64| -> f64 {
        if !infinite {
            return 0.0;
        }
        let sup = cutoff.powf(-z);
        let integral = cutoff.powf(1.0 - z) / (z - 1.0);
        model.tail().unimodal_bound(sup, integral).unwrap_or(f64::INFINITY)
    };
    let mut working = model.clone();
    if infinite && model.families().is_some() {
        while bound_at(working.cutoff()) > TARGET * 1e-2 && working.cutoff() < MAX_SERIES_CUTOFF {
            working = working.with_cutoff((2.0 * working.cutoff()).min(MAX_SERIES_CUTOFF))?;
        }
    }
    let lines = working.lines();
    let split = lines.partition_point(|l| l.lambda < 0.0);
    // small terms first on each side
    let positive: f64 = lines[split..].iter().rev().map(|l| l.multiplicity as f64 * l.lambda.powf(-z)).sum();
    let negative: f64 = lines[..split].iter().map(|l| l.multiplicity as f64 * (-l.lambda).powf(-z)).sum();
    let tail = bound_at(working.cutoff());
    let rounding = 4.0 * f64::EPSILON * (positive.abs() + negative.abs());
    Ok(EtaResult {
        value: positive - negative,
        z,
        route: Route::Series,
        estimated_error: tail + rounding,
        diagnostics: diagnostics(&[("cutoff", working.cutoff()), ("tail_bound", tail), ("lines", lines.len() as f64)]),
    })
}

/// `sum_families weight d^{-z} [zeta(z, a/d) - zeta(z, 1 - a/d)]`.
pub fn eta_hurwitz(families: &[ArithmeticProgression], z: f64) -> Result<EtaResult, EtaError> {
    if z == 1.0 {
        return Err(EtaError::InvalidArgument("eta has a pole at z = 1 on progression spectra".into()));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for fam in families {
        let checked = ArithmeticProgression::new(fam.step, fam.offset, fam.weight)?;
        let q = checked.offset / checked.step;
        let scale = checked.weight as f64 * checked.step.powf(-z);
        let plus = hurwitz_zeta_with_error(z, q)?;
        let minus = hurwitz_zeta_with_error(z, 1.0 - q)?;
        value += scale * (plus.value - minus.value);
        error += scale.abs() * (plus.error_bound + minus.error_bound);
    }
    Ok(EtaResult {
        value,
        z,
        route: Route::Hurwitz,
        estimated_error: error,
        diagnostics: diagnostics(&[("families", families.len() as f64), ("hurwitz_error", error)]),
    })
}

/// Poisson-summation bound on `|alpha(t)|` for `{ d n + a }`:
/// `(2 pi^{3/2} / (d^2 t^{3/2})) q / (1 - q)^2` with `q = exp(-pi^2 / (d^2 t))`.
fn poisson_alpha_bound(step: f64, t: f64) -> f64 {
    let q = (-PI * PI / (step * step * t)).exp();
    2.0 * PI.powf(1.5) / (step * step * t.powf(1.5)) * q / ((1.0 - q) * (1.0 - q))
}

/// Upper bound on `int_T^inf |alpha(t)| t^{-1/2} dt`, spectrum-wide.
fn large_time_tail(model: &SpectralModel, big_t: f64) -> f64 {
    let root = big_t.sqrt();
    let lines: f64 = model
        .lines()
        .iter()
        .map(|l| l.multiplicity as f64 * (-big_t * l.lambda * l.lambda).exp() / (l.lambda.abs() * root))
        .sum();
    let cutoff = model.cutoff();
    let sup = (-big_t * cutoff * cutoff).exp() / (cutoff * root);
    let integral = 0.5 * PI.sqrt() * erfc(cutoff * root) / (cutoff * big_t);
    lines + model.tail().unimodal_bound(sup, integral).unwrap_or(f64::INFINITY)
}

/// `eta(0) = pi^{-1/2} int_0^inf alpha(t) t^{-1/2} dt`, for spectra whose
/// `alpha` is known to be integrable at 0: finite spectra, or progression
/// families (where `alpha` is exponentially small as `t -> 0`).
pub fn eta_zero_mellin(model: &SpectralModel) -> Result<EtaResult, EtaError> {
    model.require_dirac()?;
    let budget = TARGET / 10.0;
    let tol = Tolerance::absolute(budget);
    let integrand = |m: &SpectralModel| {
        let m = m.clone();
        move |t: f64| alpha_trace(&m, t).map(|a| a.value / t.sqrt()).unwrap_or(f64::NAN)
    };

    let (working, t_min, head, truncation_at_tmin) = match (model.tail(), model.progressions()) {
        (Tail::Finite, _) => (model.clone(), 0.0, 0.0, 0.0),
        (_, Some(fams)) if !fams.is_empty() => {
            let widest = fams.iter().map(|f| f.step).fold(0.0, f64::max);
            let head_at = |t: f64| -> f64 {
                fams.iter().map(|f| f.weight as f64 * 2.0 * t.sqrt() * poisson_alpha_bound(f.step, t)).sum()
            };
            // the bound is increasing on t < 2 pi^2 / (3 d^2)
            let mut t_min = (PI * PI / (2.0 * widest * widest)).min(1.0);
            while head_at(t_min) > budget {
                t_min *= 0.5;
            }
            let cutoff = (46.0 / t_min).sqrt().max((2.0 * t_min).sqrt().recip()).max(model.cutoff());
            let working = model.with_cutoff(cutoff)?;
            let truncation = alpha_trace(&working, t_min)?.tail_bound;
            (working, t_min, head_at(t_min), truncation)
        }
        _ => {
            return Err(EtaError::NoDecayCertificate(
                "alpha(t) near t = 0 depends on the spectrum beyond the cutoff; the Mellin integral needs generating \
                 progressions (exponentially small alpha) or a finite spectrum, otherwise its small-time pole must be subtracted"
                    .into(),
            ))
        }
    };

    let mut t_max = 2.0;
    while large_time_tail(&working, t_max) > budget {
        t_max *= 2.0;
        if t_max > 1e12 {
            return Err(EtaError::InvalidArgument("spectrum accumulates at 0; large-time tail does not decay".into()));
        }
    }
    let f = integrand(&working);
    let split = 1.0f64.max(t_min);
    let near = quad_adaptive(&f, t_min, split, tol)?;
    let far = quad_adaptive(&f, split, t_max, tol)?;
    let tail = large_time_tail(&working, t_max);
    let truncation = truncation_at_tmin * 2.0 * t_max.sqrt();
    let sqrt_pi = gamma_half(0)?;
    let value = (near.value + far.value) / sqrt_pi;
    let estimated_error = (near.error_estimate + far.error_estimate + head + tail + truncation) / sqrt_pi;
    Ok(EtaResult {
        value,
        z: 0.0,
        route: Route::Mellin,
        estimated_error,
        diagnostics: diagnostics(&[
            ("cutoff", working.cutoff()),
            ("t_min", t_min),
            ("t_max", t_max),
            ("head_bound", head),
            ("tail_bound", tail),
            ("truncation_bound", truncation),
            ("quadrature_error", near.error_estimate + far.error_estimate),
            ("panels", (near.panels + far.panels) as f64),
        ]),
    })
}

/// `eta(0) = -2 (lim_{t -> 0+} K(t) + h/2)` with `h = dim ker D`. The limit is
/// Richardson-extrapolated from `t_j = 4^{-j}`, `j = 3..=10`, eliminating
/// the `t^{1/2}` and `t` error terms.
pub fn eta_zero_kroute(model: &SpectralModel, h: u64) -> Result<EtaResult, EtaError> {
    model.require_dirac()?;
    let finite = model.tail() == Tail::Finite;
    if !finite && model.families().map_or(true, |f| f.is_empty()) {
        return Err(EtaError::NoDecayCertificate(
            "K(t) near t = 0 depends on the spectrum beyond the cutoff; supply generating progressions".into(),
        ));
    }
    let times: Vec<f64> = (3..=10).map(|j| 4f64.powi(-j)).collect();
    // erfc(6) < 2.2e-17, so lines beyond 6 / sqrt(t) are invisible
    let smallest = times[times.len() - 1];
    let working = if finite { model.clone() } else { model.with_cutoff((6.0 / smallest.sqrt()).max(model.cutoff()))? };
    let mut sequence = Vec::with_capacity(times.len());
    let mut tail = 0.0f64;
    for &t in &times {
        let k = k_of_t(&working, t)?;
        tail = tail.max(k.tail_bound);
        sequence.push((t, k.value));
    }
    let first: Vec<f64> = sequence.windows(2).map(|w| 2.0 * w[1].1 - w[0].1).collect();
    let second: Vec<f64> = first.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    let n = second.len();
    let limit = second[n - 1];
    let change = (second[n - 1] - second[n - 2]).abs();
    let scale = limit.abs().max(1.0);
    if !(change <= 1e-7 * scale) || !limit.is_finite() {
        return Err(EtaError::NotConverged { sequence });
    }
    let rounding = 16.0 * f64::EPSILON * working.lines().len() as f64;
    let value = -2.0 * (limit + 0.5 * h as f64);
    Ok(EtaResult {
        value,
        z: 0.0,
        route: Route::Kroute,
        estimated_error: 2.0 * (change + 5.0 * tail + rounding),
        diagnostics: diagnostics(&[
            ("cutoff", working.cutoff()),
            ("extrapolation_order", 2.0),
            ("last_change", change),
            ("tail_bound", tail),
            ("t_smallest", smallest),
            ("h", h as f64),
        ]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoutePreference {
    /// Hurwitz when the projection keeps its progressions, an exact sum for
    /// finite spectra, the Mellin integral otherwise.
    #[default]
    Auto,
    Hurwitz,
    Mellin,
    Kroute,
    Series,
}

/// `eta_{D_rho}(0)`: project onto the `rho`-isotypic subspace, then evaluate
/// by the requested route. The K route uses `h_rho = dim ker D_rho`.
pub fn eta_isotypic_zero(model: &SpectralModel, rho: &Character, route: RoutePreference) -> Result<EtaResult, EtaError> {
    let projected = project_isotypic(model, rho)?;
    let hurwitz = |m: &SpectralModel| match m.progressions() {
        Some(p) => eta_hurwitz(&p, 0.0),
        None => Err(EtaError::InvalidArgument("the hurwitz route needs generating progressions".into())),
    };
    match route {
        RoutePreference::Hurwitz => hurwitz(&projected),
        RoutePreference::Mellin => eta_zero_mellin(&projected),
        RoutePreference::Kroute => eta_zero_kroute(&projected, projected.kernel().dim),
        RoutePreference::Series => eta_series(&projected, 0.0),
        RoutePreference::Auto => {
            if projected.families().is_some() {
                hurwitz(&projected)
            } else if projected.tail() == Tail::Finite {
                eta_series(&projected, 0.0)
            } else {
                eta_zero_mellin(&projected)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::FiniteAbelianGroup;
    use crate::spectral::{ap_isotypic, build_circle_dirac, Kernel, ModelKind, ModelParts, SpectralLine};

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

    fn progression(step: f64, offset: f64) -> ArithmeticProgression {
        ArithmeticProgression::new(step, offset, 1).unwrap()
    }

    #[test]
    fn series_examples() {
        let r = eta_series(&finite(&[(1.0, 2), (-2.0, 1)]), 2.0).unwrap();
        assert!((r.value - 1.75).abs() < 1e-15);
        assert_eq!(eta_series(&finite(&[(-3.0, 2), (3.0, 2)]), 0.7).unwrap().value, 0.0);
        let circle = build_circle_dirac(0.25, 1, 20.0).unwrap();
        let s = eta_series(&circle, 4.0).unwrap();
        let h = eta_hurwitz(&circle.progressions().unwrap(), 4.0).unwrap();
        assert!((s.value - h.value).abs() < 1e-8, "{} vs {}", s.value, h.value);
        assert!(s.estimated_error < 1e-8);
        assert!(matches!(eta_series(&circle, 1.5), Err(EtaError::SeriesDivergent { .. })));
    }

    #[test]
    fn hurwitz_examples() {
        let r = eta_hurwitz(&[progression(1.0, 0.25)], 0.0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(eta_hurwitz(&[progression(1.0, 0.5)], 0.0).unwrap().value.abs() < 1e-15);
        let mut sum = 0.0;
        for j in 0..3 {
            let v = eta_hurwitz(&[ap_isotypic(0.25, 3, j).unwrap()], 0.0).unwrap().value;
            assert!((v - (1.0 - 2.0 * (j as f64 + 0.25) / 3.0)).abs() < 1e-12);
            sum += v;
        }
        assert!((sum - 0.5).abs() < 1e-12);
        assert!(eta_hurwitz(&[progression(1.0, 0.25)], 1.0).is_err());
        assert!(eta_hurwitz(&[ArithmeticProgression { step: 1.0, offset: 0.0, weight: 1 }], 0.0).is_err());
    }

    #[test]
    fn mellin_examples() {
        for (a, want, tol) in [(0.25, 0.5, 1e-6), (0.5, 0.0, 1e-8), (0.1, 0.8, 1e-6)] {
            let r = eta_zero_mellin(&build_circle_dirac(a, 1, 5.0).unwrap()).unwrap();
            assert!((r.value - want).abs() <= tol, "a = {a}: {}", r.value);
            assert!(r.estimated_error <= 1e-7, "a = {a}: error {}", r.estimated_error);
        }
        let r = eta_zero_mellin(&finite(&[(1.0, 2), (-2.0, 1), (0.5, 3)])).unwrap();
        assert!((r.value - 4.0).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn mellin_rejects_uncertified_tail() {
        let circle = build_circle_dirac(0.25, 1, 5.0).unwrap();
        let mut parts = circle.into_parts();
        parts.families = None;
        let stripped = SpectralModel::new(parts).unwrap();
        match eta_zero_mellin(&stripped) {
            Err(EtaError::NoDecayCertificate(msg)) => assert!(msg.contains("beyond the cutoff")),
            other => panic!("expected a certificate error, got {other:?}"),
        }
    }

    #[test]
    fn kroute_examples() {
        let circle = build_circle_dirac(0.25, 1, 5.0).unwrap();
        let r = eta_zero_kroute(&circle, 0).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-5, "{}", r.value);
        let r2 = eta_zero_kroute(&circle, 2).unwrap();
        assert!((r2.value + 1.5).abs() <= 1e-5, "{}", r2.value);
        let sym = build_circle_dirac(0.5, 1, 5.0).unwrap();
        assert_eq!(eta_zero_kroute(&sym, 0).unwrap().value, 0.0);
    }

    #[test]
    fn antisymmetry_on_all_routes() {
        let m = build_circle_dirac(0.3, 2, 5.0).unwrap();
        let n = m.negated().unwrap();
        let h = |x: &SpectralModel| eta_hurwitz(&x.progressions().unwrap(), 0.0).unwrap().value;
        assert_eq!(h(&m), -h(&n));
        assert!((eta_zero_mellin(&m).unwrap().value + eta_zero_mellin(&n).unwrap().value).abs() < 1e-8);
        assert!((eta_zero_kroute(&m, 0).unwrap().value + eta_zero_kroute(&n, 0).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn isotypic_agrees_with_progressions() {
        let m = build_circle_dirac(0.25, 3, 5.0).unwrap();
        let mut total = 0.0;
        for chi in m.group().characters() {
            let j = chi.exponents()[0];
            let auto = eta_isotypic_zero(&m, &chi, RoutePreference::Auto).unwrap();
            assert_eq!(auto.route, Route::Hurwitz);
            let direct = eta_hurwitz(&[ap_isotypic(0.25, 3, j).unwrap()], 0.0).unwrap();
            assert!((auto.value - direct.value).abs() < 1e-14);
            let mellin = eta_isotypic_zero(&m, &chi, RoutePreference::Mellin).unwrap();
            assert!((mellin.value - direct.value).abs() < 1e-6);
            total += auto.value;
        }
        assert!((total - 0.5).abs() < 1e-10);
    }

    #[test]
    fn trivial_group_projection_is_identity() {
        let m = build_circle_dirac(0.25, 1, 5.0).unwrap();
        let rho = m.group().trivial_character();
        let iso = eta_isotypic_zero(&m, &rho, RoutePreference::Auto).unwrap();
        let full = eta_hurwitz(&m.progressions().unwrap(), 0.0).unwrap();
        assert_eq!(iso.value, full.value);
    }
}
