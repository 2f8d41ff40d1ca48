use super::HeatError;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Condition numbers above this make the fit an error rather than a result.
pub const CONDITION_LIMIT: f64 = 1e13;
/// Coefficients below this fraction of the largest are flagged negligible.
pub const NEGLIGIBLE_RATIO: f64 = 1e-6;

/// Samples of a heat trace on `t > 0`, strictly increasing in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatSamples {
    points: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct SampleRow {
    t: f64,
    value: f64,
}

impl HeatSamples {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, HeatError> {
        if points.len() < 4 {
            return Err(HeatError::InvalidSamples(format!("need at least 4 samples, got {}", points.len())));
        }
        for (i, &(t, v)) in points.iter().enumerate() {
            if !(t.is_finite() && t > 0.0 && v.is_finite()) {
                return Err(HeatError::InvalidSamples(format!("sample {i}: ({t}, {v}) is not a finite point with t > 0")));
            }
            if i > 0 && t <= points[i - 1].0 {
                return Err(HeatError::InvalidSamples(format!("sample {i}: t = {t} does not increase")));
            }
        }
        Ok(HeatSamples { points })
    }

    /// Samples `f` at `n` geometrically spaced points of `[lo, hi]`.
    pub fn geometric<F: FnMut(f64) -> Result<f64, HeatError>>(
        lo: f64,
        hi: f64,
        n: usize,
        mut f: F,
    ) -> Result<Self, HeatError> {
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(HeatError::InvalidArgument(format!("bad sampling grid [{lo}, {hi}] with {n} points")));
        }
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        let points = (0..n)
            .map(|i| {
                let t = if i + 1 == n { hi } else { lo * (ratio * i as f64).exp() };
                f(t).map(|v| (t, v))
            })
            .collect::<Result<Vec<_>, _>>()?;
        HeatSamples::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Reads `t,value` CSV with a header row.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, HeatError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| HeatError::Csv(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
            return Err(HeatError::Csv(format!("expected header \"t,value\", got {:?}", headers.iter().collect::<Vec<_>>())));
        }
        let rows = rdr
            .deserialize::<SampleRow>()
            .map(|r| r.map(|row| (row.t, row.value)).map_err(|e| HeatError::Csv(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        HeatSamples::new(rows)
    }

    pub fn to_csv<W: Write>(&self, writer: W) -> Result<(), HeatError> {
        let mut wtr = csv::Writer::from_writer(writer);
        for &(t, value) in &self.points {
            wtr.serialize(SampleRow { t, value }).map_err(|e| HeatError::Csv(e.to_string()))?;
        }
        wtr.flush().map_err(|e| HeatError::Csv(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitTerm {
    /// Power of `t^{1/2}`.
    pub i: i32,
    /// Power of `log t`.
    pub j: u32,
    pub coeff: f64,
    #[serde(skip)]
    pub negligible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionFit {
    pub terms: Vec<FitTerm>,
    pub i_range: (i32, i32),
    pub j_max: u32,
    pub residual_rms: f64,
    pub condition: f64,
}

#[derive(Serialize, Deserialize)]
struct FitDoc {
    terms: Vec<FitTerm>,
    residual_rms: f64,
    condition: f64,
}

impl ExpansionFit {
    pub fn coeff(&self, i: i32, j: u32) -> Option<f64> {
        self.terms.iter().find(|t| t.i == i && t.j == j).map(|t| t.coeff)
    }

    /// Largest `|coeff|` among terms with a log factor.
    pub fn max_log_coeff(&self) -> f64 {
        self.terms.iter().filter(|t| t.j > 0).map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.coeff * basis(term.i, term.j, t)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FitDoc { terms: self.terms.clone(), residual_rms: self.residual_rms, condition: self.condition })
            .expect("fit document serialises")
    }
}

fn basis(i: i32, j: u32, t: f64) -> f64 {
    t.powf(0.5 * i as f64) * t.ln().powi(j as i32)
}

/// Least squares in `{ t^{i/2} (log t)^j : i_min <= i <= i_max, 0 <= j <= j_max }`.
///
/// Rows are scaled by `t^{-i_min/2}` and columns to unit norm before an SVD
/// solve; the condition estimate is that of the scaled design matrix.
pub fn fit_expansion(samples: &HeatSamples, i_min: i32, i_max: i32, j_max: u32) -> Result<ExpansionFit, HeatError> {
    if i_min > i_max {
        return Err(HeatError::InvalidArgument(format!("empty exponent range [{i_min}, {i_max}]")));
    }
    let exponents: Vec<(i32, u32)> = (i_min..=i_max).flat_map(|i| (0..=j_max).map(move |j| (i, j))).collect();
    let points = samples.points();
    if points.len() < exponents.len() + 2 {
        return Err(HeatError::InvalidSamples(format!(
            "{} samples for {} basis terms; need at least {}",
            points.len(),
            exponents.len(),
            exponents.len() + 2
        )));
    }
    if let Some(&(t, _)) = points.iter().find(|p| p.0 > 1.0) {
        return Err(HeatError::InvalidSamples(format!("sample at t = {t} lies outside the asymptotic range t <= 1")));
    }
    let rows = points.len();
    let cols = exponents.len();
    let weight = |t: f64| t.powf(-0.5 * i_min as f64);
    let mut design = DMatrix::from_fn(rows, cols, |r, c| {
        let t = points[r].0;
        weight(t) * basis(exponents[c].0, exponents[c].1, t)
    });
    let rhs = DVector::from_fn(rows, |r, _| weight(points[r].0) * points[r].1);
    let norms: Vec<f64> = (0..cols).map(|c| design.column(c).norm()).collect();
    for (c, &n) in norms.iter().enumerate() {
        if n == 0.0 || !n.is_finite() {
            return Err(HeatError::RankDeficient { condition: f64::INFINITY });
        }
        design.column_mut(c).scale_mut(1.0 / n);
    }
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(HeatError::RankDeficient { condition });
    }
    let scaled = svd.solve(&rhs, 0.0).map_err(|e| HeatError::InvalidArgument(e.to_string()))?;
    let coeffs: Vec<f64> = (0..cols).map(|c| scaled[c] / norms[c]).collect();
    let largest = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let terms: Vec<FitTerm> = exponents
        .iter()
        .zip(&coeffs)
        .map(|(&(i, j), &coeff)| FitTerm { i, j, coeff, negligible: coeff.abs() < NEGLIGIBLE_RATIO * largest })
        .collect();
    let mut fit = ExpansionFit { terms, i_range: (i_min, i_max), j_max, residual_rms: 0.0, condition };
    let sq: f64 = points.iter().map(|&(t, v)| (fit.evaluate(t) - v).powi(2)).sum();
    fit.residual_rms = (sq / rows as f64).sqrt();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn planted(t: f64) -> f64 {
        3.0 * t.powf(-0.5) + 2.0 * t.ln() + 5.0 + t.sqrt()
    }

    #[test]
    fn recovers_planted_log_term() {
        let s = HeatSamples::geometric(1e-4, 1e-1, 40, |t| Ok(planted(t))).unwrap();
        let fit = fit_expansion(&s, -1, 1, 1).unwrap();
        for (i, j, want) in [(-1, 0, 3.0), (0, 1, 2.0), (0, 0, 5.0), (1, 0, 1.0), (-1, 1, 0.0), (1, 1, 0.0)] {
            let got = fit.coeff(i, j).unwrap();
            assert!((got - want).abs() < 1e-8, "({i}, {j}): {got}");
        }
        assert!(fit.max_log_coeff() > 1.0);
        assert!(fit.terms.iter().find(|t| t.i == 1 && t.j == 1).unwrap().negligible);
        assert!(fit.residual_rms < 1e-10);
    }

    #[test]
    fn rejects_too_few_and_late_samples() {
        let s = HeatSamples::geometric(1e-3, 1e-1, 6, |t| Ok(planted(t))).unwrap();
        assert!(matches!(fit_expansion(&s, -1, 1, 1), Err(HeatError::InvalidSamples(_))));
        let s = HeatSamples::geometric(1e-3, 2.0, 20, |t| Ok(planted(t))).unwrap();
        assert!(matches!(fit_expansion(&s, -1, 1, 0), Err(HeatError::InvalidSamples(_))));
    }

    #[test]
    fn rank_deficient_grid() {
        // a grid this narrow cannot separate many powers of t
        let s = HeatSamples::geometric(0.5, 0.5000001, 30, Ok).unwrap();
        match fit_expansion(&s, -2, 2, 1) {
            Err(HeatError::RankDeficient { condition }) => assert!(condition > CONDITION_LIMIT),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn sample_validation() {
        assert!(HeatSamples::new(vec![(1.0, 1.0); 3]).is_err());
        assert!(HeatSamples::new(vec![(0.1, 1.0), (0.2, 1.0), (0.2, 1.0), (0.3, 1.0)]).is_err());
        assert!(HeatSamples::new(vec![(0.0, 1.0), (0.2, 1.0), (0.25, 1.0), (0.3, 1.0)]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = HeatSamples::geometric(1e-3, 1.0, 8, |t| Ok(planted(t))).unwrap();
        let mut buf = Vec::new();
        s.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value\n"));
        assert_eq!(HeatSamples::from_csv(buf.as_slice()).unwrap(), s);
        assert!(HeatSamples::from_csv("x,y\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn json_shape() {
        let s = HeatSamples::geometric(1e-4, 1e-1, 40, |t| Ok(planted(t))).unwrap();
        let v = fit_expansion(&s, -1, 1, 1).unwrap().to_json();
        assert!(v["terms"][0]["i"].is_i64());
        assert!(v["residual_rms"].is_f64());
        assert!(v["condition"].is_f64());
    }

    proptest! {
        #[test]
        fn exact_on_basis_span(c in prop::collection::vec(-10.0f64..10.0, 6)) {
            let f = |t: f64| c[0] * t.powf(-0.5) + c[1] * t.powf(-0.5) * t.ln() + c[2] + c[3] * t.ln() + c[4] * t.sqrt() + c[5] * t.sqrt() * t.ln();
            let s = HeatSamples::geometric(1e-4, 1e-1, 30, |t| Ok(f(t))).unwrap();
            let fit = fit_expansion(&s, -1, 1, 1).unwrap();
            prop_assert!(fit.residual_rms <= 1e-10, "rms {}", fit.residual_rms);
        }
    }
}
