/// Ingredients of the index formula `ind D = c0 - (h + eta(0)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApsData {
    pub index: i64,
    pub h: u64,
    pub eta_zero: f64,
    pub c0: f64,
}

impl ApsData {
    /// The `rho`-isotypic form, where the interior term is `a_plus - a_minus`.
    pub fn equivariant(index_rho: i64, h_rho: u64, eta_rho: f64, a_plus: f64, a_minus: f64) -> Self {
        ApsData { index: index_rho, h: h_rho, eta_zero: eta_rho, c0: a_plus - a_minus }
    }
}

/// `|index - c0 + (h + eta) / 2|`.
pub fn aps_consistency(data: &ApsData) -> f64 {
    (data.index as f64 - data.c0 + 0.5 * (data.h as f64 + data.eta_zero)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebraic_cases() {
        assert_eq!(aps_consistency(&ApsData { index: 1, h: 0, eta_zero: -2.0, c0: 0.0 }), 0.0);
        assert_eq!(aps_consistency(&ApsData { index: 0, h: 2, eta_zero: -2.0, c0: 0.0 }), 0.0);
        assert_eq!(aps_consistency(&ApsData { index: 2, h: 0, eta_zero: 0.0, c0: 0.0 }), 2.0);
    }

    #[test]
    fn equivariant_form() {
        let d = ApsData::equivariant(1, 1, 0.5, 2.0, 0.25);
        assert_eq!(aps_consistency(&d), 0.0);
    }
}
