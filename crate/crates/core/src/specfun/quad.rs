use super::SpecfunError;

/// Requested accuracy: the run stops once the error estimate is below
/// `max(absolute, relative * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Tolerance {
    pub fn new(absolute: f64, relative: f64) -> Result<Self, SpecfunError> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(absolute) || !ok(relative) || (absolute == 0.0 && relative == 0.0) {
            return Err(SpecfunError::Domain(format!(
                "tolerance needs non-negative parts, not both zero: ({absolute}, {relative})"
            )));
        }
        Ok(Tolerance { absolute, relative })
    }

    pub fn absolute(absolute: f64) -> Self {
        Tolerance { absolute, relative: 0.0 }
    }

    fn target(&self, value: f64) -> f64 {
        self.absolute.max(self.relative * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel, SpecfunError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut finite = fc.is_finite();
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        finite &= pair.is_finite();
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    if !finite {
        return Err(SpecfunError::NonFinite);
    }
    Ok(Panel { lo, hi, value: kron * half, error: ((kron - gauss) * half).abs() })
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: Tolerance) -> Result<Quadrature, SpecfunError> {
    let mut panels = vec![kronrod(f, lo, hi)?];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let rounding = 50.0 * f64::EPSILON * panels.iter().map(|p| p.value.abs()).sum::<f64>();
        if error <= tol.target(value).max(rounding) {
            return Ok(Quadrature { value, error_estimate: error, panels: panels.len() });
        }
        if panels.len() >= MAX_PANELS {
            return Err(SpecfunError::NotConverged { estimate: value, error });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo || mid >= p.hi {
            return Err(SpecfunError::NotConverged { estimate: value, error });
        }
        panels.push(kronrod(f, p.lo, mid)?);
        panels.push(kronrod(f, mid, p.hi)?);
    }
}

/// Adaptive Gauss-Kronrod integration of `f` over `[lo, hi]`.
///
/// A panel starting at 0 is integrated after the substitution `t = u^2`, which
/// turns `t^{-1/2}` endpoint singularities into smooth integrands. Non-convergence
/// returns the best estimate inside the error.
pub fn quad_adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Quadrature, SpecfunError> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(SpecfunError::NonFinite);
    }
    if lo >= hi {
        return Err(SpecfunError::Domain(format!("quadrature needs lo < hi, got [{lo}, {hi}]")));
    }
    if lo == 0.0 {
        let split = hi.min(1.0);
        let substituted = |u: f64| 2.0 * u * f(u * u);
        let mut head = adaptive(&substituted, 0.0, split.sqrt(), tol)?;
        if split < hi {
            let tail = adaptive(&f, split, hi, tol)?;
            head.value += tail.value;
            head.error_estimate += tail.error_estimate;
            head.panels += tail.panels;
        }
        return Ok(head);
    }
    adaptive(&f, lo, hi, tol)
}

/// Integral over `[lo, inf)` truncated at `cutoff`. The caller supplies a
/// bound on the neglected tail, which is added to the error estimate.
pub fn quad_with_tail<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    cutoff: f64,
    tail_bound: f64,
    tol: Tolerance,
) -> Result<Quadrature, SpecfunError> {
    if !(tail_bound >= 0.0) {
        return Err(SpecfunError::Domain(format!("tail bound must be >= 0, got {tail_bound}")));
    }
    let mut q = quad_adaptive(f, lo, cutoff, tol)?;
    q.error_estimate += tail_bound;
    Ok(q)
}
