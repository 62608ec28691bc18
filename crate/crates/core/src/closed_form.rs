//! Closed-form block eigenvalues and entanglement-infidelity bounds for the
//! real Clifford group and the CNOT+Pauli group.
//!
//! With `d = 2^n`, the twirled eigenvalues are
//!
//! * real Clifford, `B1` (even Y count) and `B2` (odd Y count):
//!   `λ1 = 1 − p1·d²/(d²+d−2) − p2·d/(d−1)`,
//!   `λ2 = 1 − p1·d/(d−1) − p2·(d²−2d)/(d²−d)`;
//! * CNOT+Pauli, blocks `B1..B4`:
//!   `λ1 = 1 − (p2+p3+p4)·d/(d−1)`, `λ2 = 1 − (p1+p3+p4)·d/(d−1)`,
//!   `λ3 = 1 − (p1+p2+p4)·d/(d−1) − p3·(d²−4d)/(d²−3d+2)`,
//!   `λ4 = 1 − (p1+p2+p3)·d/(d−1) − p4·(d−2)/(d−1)`;
//! * full Clifford (depolarizing): `λ = 1 − p·d²/(d²−1)`.
//!
//! A term whose block is empty (CNOT+Pauli `B3` at `n = 1`) is dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GroupName;
use crate::orbit::closed_form_sizes;
use crate::pauli::check_qubits;

fn dims(n: usize) -> (f64, f64) {
    let d = 2f64.powi(n as i32);
    (d, d * d)
}

fn check_p_list(group: GroupName, n: usize, p: &[f64]) -> Result<()> {
    let sizes: Vec<usize> = closed_form_sizes(group, n)?.into_iter().map(|s| s as usize).collect();
    crate::channel::validate_probabilities(p, &sizes)
}

/// Block eigenvalues from block probabilities, one per non-identity block.
pub fn closed_form_lambdas(group: GroupName, n: usize, p: &[f64]) -> Result<Vec<f64>> {
    check_qubits(n)?;
    if group == GroupName::Pauli {
        return Err(Error::UnsupportedGroup(
            "no closed-form eigenvalues for the Pauli group; use block_eigenvalue".into(),
        ));
    }
    check_p_list(group, n, p)?;
    let (d, d2) = dims(n);
    Ok(match group {
        GroupName::Full => vec![depolarizing_lambda(n, p[0])?],
        GroupName::Real => {
            let (p1, p2) = (p[0], p[1]);
            vec![
                1.0 - p1 * d2 / (d2 + d - 2.0) - p2 * d / (d - 1.0),
                1.0 - p1 * d / (d - 1.0) - p2 * (d2 - 2.0 * d) / (d2 - d),
            ]
        }
        GroupName::CnotPauli => {
            let (p1, p2, p3, p4) = (p[0], p[1], p[2], p[3]);
            let c = d / (d - 1.0);
            // B3 is empty for n = 1, where p3 = 0 and its coefficient is 0/0.
            let p3_coeff = if n == 1 { 0.0 } else { (d2 - 4.0 * d) / (d2 - 3.0 * d + 2.0) };
            vec![
                1.0 - (p2 + p3 + p4) * c,
                1.0 - (p1 + p3 + p4) * c,
                1.0 - (p1 + p2 + p4) * c - p3 * p3_coeff,
                1.0 - (p1 + p2 + p3) * c - p4 * (d - 2.0) / (d - 1.0),
            ]
        }
        GroupName::Pauli => unreachable!(),
    })
}

/// Leading-order expansions of [`closed_form_lambdas`], accurate to `O(4^{-n})`.
pub fn first_order_lambdas(group: GroupName, n: usize, p: &[f64]) -> Result<Vec<f64>> {
    check_qubits(n)?;
    if matches!(group, GroupName::Full | GroupName::Pauli) {
        return Err(Error::UnsupportedGroup(format!("no first-order expansion for {group}")));
    }
    check_p_list(group, n, p)?;
    let u = 2f64.powi(-(n as i32));
    let total: f64 = p.iter().sum();
    Ok(match group {
        GroupName::Real => {
            let (p1, p2) = (p[0], p[1]);
            vec![1.0 - total + (p1 - p2) * u, 1.0 - total + (p2 - p1) * u]
        }
        GroupName::CnotPauli => {
            let (p1, p2, p3, p4) = (p[0], p[1], p[2], p[3]);
            vec![
                1.0 - (p2 + p3 + p4) * (1.0 + u),
                1.0 - (p1 + p3 + p4) * (1.0 + u),
                1.0 - total + (p3 - p1 - p2 - p4) * u,
                1.0 - total + (p4 - p1 - p2 - p3) * u,
            ]
        }
        GroupName::Full | GroupName::Pauli => unreachable!(),
    })
}

/// Eigenvalue of a fully depolarizing channel with infidelity `p`.
pub fn depolarizing_lambda(n: usize, p: f64) -> Result<f64> {
    check_qubits(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbabilities(format!("p = {p}")));
    }
    let (_, d2) = dims(n);
    Ok(1.0 - p * d2 / (d2 - 1.0))
}

/// Average infidelity from entanglement infidelity: `2^n p / (2^n + 1)`.
pub fn average_infidelity(p: f64, n: usize) -> Result<f64> {
    check_qubits(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbabilities(format!("p = {p}")));
    }
    let (d, _) = dims(n);
    Ok(d * p / (d + 1.0))
}

/// Which measured decay constants the bound is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVariant {
    /// Real Clifford, `λ1` only.
    #[serde(alias = "real_from_lambda1", alias = "real_from_λ1")]
    RealFromLambda1,
    /// CNOT+Pauli, `λ1` and `λ2` from two runs.
    #[serde(alias = "cnotpauli_from_lambda1_lambda2", alias = "cnotpauli_from_λ1λ2")]
    CnotPauliFromLambda12,
    /// CNOT+Pauli, `λ3` only; needs `n > 2`.
    #[serde(alias = "cnotpauli_from_lambda3", alias = "cnotpauli_from_λ3")]
    CnotPauliFromLambda3,
}

impl BoundVariant {
    pub fn group(self) -> GroupName {
        match self {
            BoundVariant::RealFromLambda1 => GroupName::Real,
            _ => GroupName::CnotPauli,
        }
    }

    /// Number of decay constants consumed.
    pub fn arity(self) -> usize {
        match self {
            BoundVariant::CnotPauliFromLambda12 => 2,
            _ => 1,
        }
    }

    /// Blocks whose eigenvalues the variant consumes, in order.
    pub fn blocks(self) -> &'static [usize] {
        match self {
            BoundVariant::RealFromLambda1 => &[1],
            BoundVariant::CnotPauliFromLambda12 => &[1, 2],
            BoundVariant::CnotPauliFromLambda3 => &[3],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundVariant::RealFromLambda1 => "real-from-lambda1",
            BoundVariant::CnotPauliFromLambda12 => "cnot-pauli-from-lambda12",
            BoundVariant::CnotPauliFromLambda3 => "cnot-pauli-from-lambda3",
        }
    }

    /// Largest possible ratio of the upper bound to the true infidelity.
    pub fn worst_case_factor(self, n: usize) -> f64 {
        let (d, _) = dims(n);
        match self {
            BoundVariant::RealFromLambda1 => (d + 2.0) / d,
            BoundVariant::CnotPauliFromLambda12 => 2.0,
            BoundVariant::CnotPauliFromLambda3 => (d - 2.0) / (d - 4.0),
        }
    }

    /// `(lower, upper)` multipliers applied to the decay deficit
    /// (`1 − λ` or `2 − λ1 − λ2`).
    fn coefficients(self, n: usize) -> Result<(f64, f64)> {
        check_qubits(n)?;
        let (d, d2) = dims(n);
        match self {
            BoundVariant::RealFromLambda1 => Ok(((d - 1.0) / d, (d2 + d - 2.0) / d2)),
            BoundVariant::CnotPauliFromLambda12 => Ok(((d - 1.0) / (2.0 * d), (d - 1.0) / d)),
            BoundVariant::CnotPauliFromLambda3 => {
                if n <= 2 {
                    return Err(Error::InapplicableVariant {
                        variant: self.as_str().into(),
                        reason: format!("needs n > 2 (4^n − 2^(n+2) ≤ 0 at n = {n})"),
                    });
                }
                Ok(((d - 1.0) / d, (d2 - 3.0 * d + 2.0) / (d2 - 4.0 * d)))
            }
        }
    }

    /// `1 − λ` or `2 − λ1 − λ2`.
    fn deficit(self, lambdas: &[f64]) -> Result<f64> {
        if lambdas.len() != self.arity() {
            return Err(Error::InapplicableVariant {
                variant: self.as_str().into(),
                reason: format!("needs {} decay constants, got {}", self.arity(), lambdas.len()),
            });
        }
        Ok(match self {
            BoundVariant::CnotPauliFromLambda12 => 2.0 - lambdas[0] - lambdas[1],
            _ => 1.0 - lambdas[0],
        })
    }
}

impl std::fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "real-from-lambda1" | "real" | "lambda1" => Ok(BoundVariant::RealFromLambda1),
            "cnot-pauli-from-lambda12" | "cnotpauli-from-lambda1-lambda2" | "lambda12" => {
                Ok(BoundVariant::CnotPauliFromLambda12)
            }
            "cnot-pauli-from-lambda3" | "cnotpauli-from-lambda3" | "lambda3" => {
                Ok(BoundVariant::CnotPauliFromLambda3)
            }
            _ => Err(Error::InapplicableVariant {
                variant: s.into(),
                reason: "unknown bound variant".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfidelityBounds {
    pub lower: f64,
    pub upper: f64,
    /// The upper bound, i.e. the conservative estimate.
    pub point_estimate: f64,
    pub worst_case_factor: f64,
    /// `d lower / d deficit` and `d upper / d deficit`; the deficit has slope −1
    /// in every λ.
    pub lower_slope: f64,
    pub upper_slope: f64,
}

/// Bounds on the entanglement infidelity from measured decay constants.
pub fn infidelity_bounds(variant: BoundVariant, lambdas: &[f64], n: usize) -> Result<InfidelityBounds> {
    let (lo, hi) = variant.coefficients(n)?;
    let deficit = variant.deficit(lambdas)?;
    Ok(InfidelityBounds {
        lower: lo * deficit,
        upper: hi * deficit,
        point_estimate: hi * deficit,
        worst_case_factor: variant.worst_case_factor(n),
        lower_slope: lo,
        upper_slope: hi,
    })
}
