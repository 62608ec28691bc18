//! Randomized benchmarking with restricted Clifford subgroups.
//!
//! The crate covers the full pipeline: symplectic Paulis and Clifford
//! tableaus, orbit (block) decompositions of the Pauli group under a gate
//! set, twirled Pauli channels and their decay eigenvalues, an RB sequence
//! simulator, and decay-curve fitting with infidelity bounds.
//!
//! ```
//! use rbkit::{compute_blocks, GeneratorSet, GroupName};
//!
//! let gens = GeneratorSet::new(GroupName::Real, 2).unwrap();
//! let blocks = compute_blocks(&gens).unwrap();
//! assert_eq!(blocks.sizes(), vec![9, 6]);
//! ```

pub mod analysis;
pub mod channel;
pub mod closed_form;
pub mod dense;
pub mod engine;
pub mod error;
pub mod generators;
pub mod orbit;
pub mod pauli;
pub mod tableau;

pub use analysis::{fit_single_exponential, fit_two_exponentials, DecayFit, InfidelityEstimate};
pub use channel::{BlockChannel, ChannelFile, PauliChannel};
pub use closed_form::{closed_form_lambdas, infidelity_bounds, BoundVariant, InfidelityBounds};
pub use engine::{run_experiment, DecayData, Engine, ExperimentConfig, SamplingMode};
pub use error::{Error, Result};
pub use generators::{enumerate_group, CliffordGroup, Gate, GeneratorSet, GroupName};
pub use orbit::{anticommutation_census, compute_blocks, AnticommutationCensus, BlockDecomposition};
pub use pauli::PauliOperator;
pub use tableau::CliffordTableau;
