//! Centralized numerical tolerances.
//!
//! Every default threshold used by the crate lives here so that the numeric
//! contracts are auditable in one place. Operations that accept an explicit
//! tolerance parameter default to these values; the suite runner can carry a
//! customized copy.

use serde::{Deserialize, Serialize};

/// Relative off-diagonal mass at which the Jacobi eigensolver stops.
pub const EIG_CONVERGENCE: f64 = 1e-14;

/// Sweep budget for the Jacobi eigensolver.
pub const EIG_MAX_SWEEPS: usize = 100;

/// Hermiticity check threshold (Frobenius, relative to `max(1, ‖M‖_F)`).
pub const HERMITICITY: f64 = 1e-10;

/// Negativity clip window for PSD square roots.
pub const PSD_CLIP: f64 = 1e-10;

/// Validation threshold for density matrices (hermiticity, trace, spectrum).
pub const DENSITY_VALIDATION: f64 = 1e-10;

/// Pure-state normalization threshold.
pub const PURE_NORM: f64 = 1e-12;

/// Spectral floor used inside fidelity kernels: eigenvalues of unit-scale
/// operators below this magnitude are rounding debris of exact zeros and are
/// treated as zero before any square root can amplify them.
pub const SPECTRAL_FLOOR: f64 = 1e-13;

/// Eigenvalue threshold that counts toward the rank of a density matrix.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Relative cutoff below which a singular value is reported as exactly zero.
pub const SVD_NULL_CUTOFF: f64 = 1e-7;

/// Gram–Schmidt residual below which a vector pair is treated as linearly
/// dependent.
pub const DEPENDENCE: f64 = 1e-8;

/// Completeness threshold for Kraus families (`‖ΣK†K − I‖_F`).
pub const KRAUS_COMPLETENESS: f64 = 1e-9;

/// Validation threshold for channel outputs. Looser than state validation:
/// a Kraus family that is complete to `KRAUS_COMPLETENESS` can shift the
/// output trace by that much, so the output check must sit above it.
pub const CHANNEL_OUTPUT: f64 = 1e-8;

/// Unitarity threshold (`‖U†U − I‖_F`) for constructed unitaries.
pub const UNITARITY: f64 = 1e-9;

/// Allowed overshoot when clamping a fidelity into `[0, 1]`.
pub const FIDELITY_CLAMP: f64 = 1e-9;

/// Gram-entry agreement threshold for pair-mapping unitaries.
pub const GRAM_MATCH: f64 = 1e-9;

/// Default residual threshold for witness verification.
pub const WITNESS_RESIDUAL: f64 = 1e-8;

/// Step-size floor at which the variational ascent declares a restart done.
pub const VARIATIONAL_STEP: f64 = 1e-10;

/// Shortfall below the closed-form value at which the variational ascent is
/// considered to have failed outright.
pub const VARIATIONAL_FAILURE: f64 = 1e-3;

/// Named thresholds consumed by the self-check suites.
///
/// One field per acceptance check; `Default` reproduces the contractual
/// values. All fields are plain numbers so a config file can override any
/// subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteTolerances {
    /// `|fidelity − trace_norm(√σ·√ρ)|`.
    pub cross_form: f64,
    /// `|fidelity − Σ√(pᵢqᵢ)|` on commuting pairs.
    pub classical_match: f64,
    /// `|F(ρ,σ) − F(σ,ρ)|`.
    pub symmetry: f64,
    /// `1 − F(ρ,ρ)`.
    pub self_fidelity: f64,
    /// `|F(|ψ⟩⟨ψ|, |φ⟩⟨φ|) − |⟨ψ|φ⟩||`.
    pub pure_reduction: f64,
    /// `|test_pass_probability − overlap²|`.
    pub pass_probability: f64,
    /// `||⟨ψ₀|φ₀⟩| − F|` for the optimal purification pair.
    pub uhlmann_overlap: f64,
    /// Slack allowed above `F` for any random-purification sample.
    pub sweep_margin: f64,
    /// `|variational final − F|`.
    pub variational: f64,
    /// Choi residual of the dilation round trip.
    pub dilation_choi: f64,
    /// `‖U†U − I‖_F` of the dilation unitary.
    pub dilation_unitarity: f64,
    /// Largest witness residual (state images and overlap match).
    pub witness_residual: f64,
    /// Allowed undershoot of `F(𝓔ρ,𝓔σ) − |⟨ψ|φ⟩|` below zero.
    pub bound_floor: f64,
    /// Allowed undershoot of `F(𝓖ρ,𝓖σ) − F(ρ,σ)` below zero.
    pub monotonicity_floor: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        SuiteTolerances {
            cross_form: 1e-9,
            classical_match: 1e-10,
            symmetry: 1e-10,
            self_fidelity: 1e-10,
            pure_reduction: 1e-9,
            pass_probability: 1e-12,
            uhlmann_overlap: 1e-8,
            sweep_margin: 1e-9,
            variational: 1e-5,
            dilation_choi: 1e-8,
            dilation_unitarity: 1e-9,
            witness_residual: 1e-8,
            bound_floor: 1e-8,
            monotonicity_floor: 1e-8,
        }
    }
}
