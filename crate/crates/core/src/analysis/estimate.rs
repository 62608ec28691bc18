use serde::{Deserialize, Serialize};

use crate::analysis::fit::DecayFit;
use crate::closed_form::{infidelity_bounds, BoundVariant, InfidelityBounds};
use crate::error::{Error, Result};
use crate::generators::GroupName;

/// A decay constant with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub stderr: f64,
}

/// Infidelity bounds from measured decay constants, with first-order
/// uncertainty on each endpoint. SPAM uncertainty is not included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfidelityEstimate {
    pub variant: BoundVariant,
    pub n_qubits: usize,
    pub lambdas: Vec<Measured>,
    pub bounds: InfidelityBounds,
    pub lower: f64,
    pub upper: f64,
    pub point_estimate: f64,
    pub lower_stderr: f64,
    pub upper_stderr: f64,
    pub worst_case_factor: f64,
}

impl InfidelityEstimate {
    /// `[lower − k σ_lower, upper + k σ_upper]`.
    pub fn inflated(&self, k: f64) -> (f64, f64) {
        (self.lower - k * self.lower_stderr, self.upper + k * self.upper_stderr)
    }

    pub fn contains(&self, p: f64, k: f64) -> bool {
        let (lo, hi) = self.inflated(k);
        lo <= p && p <= hi
    }
}

pub fn estimate_infidelity(variant: BoundVariant, n: usize, lambdas: &[Measured]) -> Result<InfidelityEstimate> {
    let values: Vec<f64> = lambdas.iter().map(|m| m.value).collect();
    let bounds = infidelity_bounds(variant, &values, n)?;
    // every endpoint is linear in the deficit, whose gradient is −1 in each λ
    let deficit_se = lambdas.iter().map(|m| m.stderr * m.stderr).sum::<f64>().sqrt();
    Ok(InfidelityEstimate {
        variant,
        n_qubits: n,
        lambdas: lambdas.to_vec(),
        lower: bounds.lower,
        upper: bounds.upper,
        point_estimate: bounds.point_estimate,
        lower_stderr: bounds.lower_slope * deficit_se,
        upper_stderr: bounds.upper_slope * deficit_se,
        worst_case_factor: bounds.worst_case_factor,
        bounds,
    })
}

/// Uses the leading decay constant of each fit, in the order the variant lists
/// its blocks (`λ1` then `λ2` for the two-run variant).
pub fn estimate_from_fits(
    variant: BoundVariant,
    group: GroupName,
    n: usize,
    fits: &[&DecayFit],
) -> Result<InfidelityEstimate> {
    if variant.group() != group {
        return Err(Error::InapplicableVariant {
            variant: variant.as_str().into(),
            reason: format!("applies to the {} group, not {group}", variant.group()),
        });
    }
    if fits.len() != variant.arity() {
        return Err(Error::InapplicableVariant {
            variant: variant.as_str().into(),
            reason: format!("needs {} fits, got {}", variant.arity(), fits.len()),
        });
    }
    let lambdas: Vec<Measured> = fits
        .iter()
        .map(|f| {
            let (value, se) = f.lambda();
            Measured {
                value,
                stderr: se.unwrap_or(f64::INFINITY),
            }
        })
        .collect();
    estimate_infidelity(variant, n, &lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(value: f64, stderr: f64) -> Measured {
        Measured { value, stderr }
    }

    #[test]
    fn real_example() {
        let e = estimate_infidelity(BoundVariant::RealFromLambda1, 2, &[m(0.99, 0.001)]).unwrap();
        assert!((e.lower - 0.0075).abs() < 1e-12);
        assert!((e.upper - 0.01125).abs() < 1e-12);
        assert!((e.lower_stderr - 0.00075).abs() < 1e-12);
        assert!((e.upper_stderr - 0.001125).abs() < 1e-12);
        assert!(e.lower <= e.point_estimate && e.point_estimate <= e.upper);
    }

    #[test]
    fn cnot_pair_example() {
        let e = estimate_infidelity(BoundVariant::CnotPauliFromLambda12, 2, &[m(0.99, 0.0), m(0.99, 0.0)]).unwrap();
        assert!((e.lower - 0.0075).abs() < 1e-12);
        assert!((e.upper - 0.015).abs() < 1e-12);
        assert_eq!(e.worst_case_factor, 2.0);
    }

    #[test]
    fn perfect_lambda_gives_zero() {
        let e = estimate_infidelity(BoundVariant::RealFromLambda1, 3, &[m(1.0, 0.0)]).unwrap();
        assert_eq!((e.lower, e.upper), (0.0, 0.0));
    }

    #[test]
    fn mismatches_are_rejected() {
        assert!(estimate_infidelity(BoundVariant::CnotPauliFromLambda3, 2, &[m(0.99, 0.0)]).is_err());
        assert!(estimate_infidelity(BoundVariant::CnotPauliFromLambda12, 2, &[m(0.99, 0.0)]).is_err());
        assert!(estimate_from_fits(BoundVariant::RealFromLambda1, GroupName::CnotPauli, 2, &[]).is_err());
    }
}
