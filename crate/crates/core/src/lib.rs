//! Dense complex linear algebra and fidelity computations for small quantum
//! systems.
//!
//! The crate is self-contained: eigendecompositions, singular value
//! decompositions, and all derived quantities (state fidelity, optimal
//! purifications, channel dilations, fidelity witnesses) are built from one
//! Jacobi kernel, so every numeric claim in the public API is auditable down
//! to the rotation level. Everything is deterministic: random ensembles are
//! driven by an explicit fixed generator in [`rng`], and equal seeds produce
//! bit-identical samples on every platform.

pub mod error;
pub mod tol;
pub mod mat;
pub mod rng;
pub mod eig;
pub mod svd;
pub mod states;
pub mod fidelity;
pub mod channels;
pub mod witness;
pub mod verify;

pub use error::{Error, Result};
pub use mat::{composite_index, kron, kron_vec, partial_trace_env, partial_trace_sys, C64, ComplexMatrix};
pub use rng::{derive_seed, Rng};
pub use eig::{herm_eig, psd_sqrt, HermEigResult};
pub use svd::{polar_unitary, svd, trace_norm, Svd};
pub use states::{
    random_density, random_pure, random_unitary, reduce, standard_purification, validate_density,
    validate_density_with_report, DensityMatrix, PureState, Purification, ValidationReport,
};
pub use fidelity::{
    classical_fidelity, fidelity, pure_overlap, random_purification_sweep, seeded_pair,
    test_pass_probability, uhlmann_optimal_purifications, uhlmann_variational, UhlmannResult,
    VariationalTrace, VARIATIONAL_MAX_ITERS, VARIATIONAL_RESTARTS,
};
pub use channels::{
    apply_dilation, choi_distance, kraus_from_dilation, random_channel, stinespring_dilate,
    validate_kraus, KrausChannel, StinespringDilation,
};
pub use witness::{
    construct_witness, monotonicity_check, monotonicity_via_witness, overlap_upper_bound_check,
    two_pair_unitary, verify_witness, FidelityWitness, MonotonicityReport, WitnessReport,
};
pub use verify::{run_suites, CheckOutcome, Report, SuiteConfig, SuiteKind, SuiteOutcome};
pub use tol::SuiteTolerances;
