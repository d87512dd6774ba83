//! Constants defined by formula, and slots for the empirical ones.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::partition::DecayFit;

/// `ĉ = max(c, 1/c)`.
pub fn c_hat(c: f64) -> f64 {
    c.max(1.0 / c)
}

/// Slack applied to `ĉ⁴` in the derivative bound.
pub const D_SLACK: f64 = 1.05;

/// `D(c) = 1.05·ĉ⁴`.
pub fn derivative_bound(c: f64) -> f64 {
    D_SLACK * c_hat(c).powi(4)
}

/// `ν = ln γ₂ / (2 ln r + ln γ₂)`.
pub fn nu_formula(gamma2: f64, r: f64) -> f64 {
    gamma2.ln() / (2.0 * r.ln() + gamma2.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantsLedger {
    pub c: f64,
    pub c_hat: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub gamma1_hat: Option<f64>,
    pub gamma2_hat: Option<f64>,
    pub r_hat: Option<f64>,
    pub nu_formula: Option<f64>,
}

pub fn ledger_for(c: f64, fits: Option<&DecayFit>, r_estimate: Option<f64>) -> Result<ConstantsLedger> {
    if !(c.is_finite() && c > 0.0) {
        return Err(LabError::InvalidParameter(format!("break size must be positive, got {}", c)));
    }
    if c == 1.0 {
        return Err(LabError::InvalidParameter("break size 1 has no break".into()));
    }
    let d = derivative_bound(c);
    let gamma2 = fits.map(|f| f.gamma2_hat);
    let in_unit = |x: f64| x > 0.0 && x < 1.0;
    let nu = match (gamma2, r_estimate) {
        (Some(g), Some(r)) if in_unit(g) && in_unit(r) => Some(nu_formula(g, r)),
        _ => None,
    };
    Ok(ConstantsLedger {
        c,
        c_hat: c_hat(c),
        d,
        lambda: 1.0 / (1.0 + 1.0 / d),
        gamma1_hat: fits.map(|f| f.gamma1_hat),
        gamma2_hat: gamma2,
        r_hat: r_estimate,
        nu_formula: nu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_for_e() {
        let l = ledger_for(std::f64::consts::E, None, None).unwrap();
        assert!((l.d - 57.328058).abs() < 1e-5);
        assert!((l.lambda - 0.982856).abs() < 1e-6);
        assert!(l.nu_formula.is_none());
    }

    #[test]
    fn reciprocal_break_sizes_agree() {
        let a = ledger_for(0.5, None, None).unwrap();
        let b = ledger_for(2.0, None, None).unwrap();
        assert_eq!(a.c_hat, 2.0);
        assert!((a.d - 16.8).abs() < 1e-12);
        assert_eq!((a.d, a.lambda), (b.d, b.lambda));
    }

    #[test]
    fn nu_from_decay_and_ratio() {
        assert!((nu_formula(0.8, 0.1) - 0.046216).abs() < 1e-6);
        assert!(ledger_for(1.0, None, None).is_err());
    }
}
