//! Decay-curve fitting and infidelity estimates from fitted decay constants.

mod estimate;
mod fit;

pub use estimate::{estimate_from_fits, estimate_infidelity, InfidelityEstimate, Measured};
pub use fit::{
    bootstrap_lambda_stderrs, fit_decay, fit_single_exponential, fit_two_exponentials, DecayFit, FitDiagnostics,
    DEGENERATE_GAP, PAIR_GRID_STEP, REDUNDANT_AMPLITUDE, SINGLE_GRID_STEP, STDERR_FLOOR,
};
