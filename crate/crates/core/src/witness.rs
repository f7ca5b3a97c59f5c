//! Operational fidelity witnesses.
//!
//! The fidelity of two mixed states is realized here as a concrete experiment:
//! two pure inputs whose overlap magnitude *is* the fidelity, plus one channel
//! that maps them onto the two states. Feeding the second input to the channel
//! and testing the output against the first state's image can then succeed
//! with probability exactly `F²`. The same construction certifies the
//! data-processing behaviour of fidelity: post-composing any channel can only
//! raise the pure-input overlap bound, never lower it.

use crate::channels::{kraus_from_dilation, KrausChannel, StinespringDilation};
use crate::error::{Error, Result};
use crate::fidelity::{fidelity, uhlmann_optimal_purifications};
use crate::mat::{complete_orthonormal_basis, project_out, vec_inner, vec_norm, C64, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};
use crate::tol;

/// Pure inputs, channel, and bookkeeping produced by [`construct_witness`].
#[derive(Debug, Clone)]
pub struct FidelityWitness {
    /// First pure input; the channel maps it onto the first state.
    pub psi: PureState,
    /// Second pure input; the channel maps it onto the second state.
    pub phi: PureState,
    /// Channel carrying both inputs onto their states.
    pub channel: KrausChannel,
    /// `⟨ψ|φ⟩` as realized by the stored vectors.
    pub overlap: C64,
    /// Closed-form fidelity of the two states; `|overlap|` matches it.
    pub fidelity_target: f64,
}

/// Residuals measured by [`verify_witness`].
#[derive(Debug, Clone, Copy)]
pub struct WitnessReport {
    /// `‖𝓔(|ψ⟩⟨ψ|) − ρ‖_F`.
    pub rho_residual: f64,
    /// `‖𝓔(|φ⟩⟨φ|) − σ‖_F`.
    pub sigma_residual: f64,
    /// `||⟨ψ|φ⟩| − F(ρ,σ)|`.
    pub overlap_residual: f64,
    /// All residuals within tolerance.
    pub pass: bool,
}

/// Residuals measured by [`monotonicity_via_witness`].
#[derive(Debug, Clone, Copy)]
pub struct MonotonicityReport {
    /// `‖(𝓖∘𝓔)(|ψ⟩⟨ψ|) − 𝓖(ρ)‖_F`.
    pub psi_residual: f64,
    /// `‖(𝓖∘𝓔)(|φ⟩⟨φ|) − 𝓖(σ)‖_F`.
    pub phi_residual: f64,
    /// `F(𝓖ρ, 𝓖σ) − |⟨ψ|φ⟩|`; non-negative up to tolerance.
    pub bound_residual: f64,
    /// Residuals within tolerance and the bound holds.
    pub pass: bool,
}

fn check_unit(v: &[C64]) -> Result<()> {
    let deviation = (vec_norm(v) - 1.0).abs();
    if deviation > tol::UNITARITY {
        return Err(Error::NotNormalized { deviation, tolerance: tol::UNITARITY });
    }
    Ok(())
}

/// Residual of `second` after removing its `first` component, with one
/// re-orthogonalization pass so the direction stays orthogonal to `first`
/// even when the residual is tiny.
fn gram_residual(first: &[C64], second: &[C64], overlap: C64) -> Vec<C64> {
    let mut res: Vec<C64> = second
        .iter()
        .zip(first)
        .map(|(&s, &f)| s - overlap * f)
        .collect();
    project_out(&mut res, std::slice::from_ref(&first.to_vec()));
    res
}

/// Unitary mapping `a1 → b1` and `a2 → b2` for two pairs of unit vectors
/// with matching Gram data (`⟨a1|a2⟩ = ⟨b1|b2⟩` within `gram_tol`).
///
/// When both pair members are effectively parallel (residuals below the
/// dependence threshold on both sides) only the first vectors are pinned and
/// the rest of the basis is completed freely; the second images are then
/// still correct up to the residual sizes.
pub fn two_pair_unitary(
    a1: &[C64],
    a2: &[C64],
    b1: &[C64],
    b2: &[C64],
    gram_tol: f64,
) -> Result<ComplexMatrix> {
    let dim = a1.len();
    if a2.len() != dim || b1.len() != dim || b2.len() != dim || dim == 0 {
        return Err(Error::dims(format!(
            "pair vectors have lengths {}, {}, {}, {}",
            a1.len(),
            a2.len(),
            b1.len(),
            b2.len()
        )));
    }
    for v in [a1, a2, b1, b2] {
        check_unit(v)?;
    }
    let g_a = vec_inner(a1, a2);
    let g_b = vec_inner(b1, b2);
    if (g_a - g_b).norm() > gram_tol {
        return Err(Error::GramMismatch {
            left_re: g_a.re,
            left_im: g_a.im,
            right_re: g_b.re,
            right_im: g_b.im,
            tolerance: gram_tol,
        });
    }

    let res_a = gram_residual(a1, a2, g_a);
    let res_b = gram_residual(b1, b2, g_b);
    let norm_a = vec_norm(&res_a);
    let norm_b = vec_norm(&res_b);

    let mut basis_a = vec![a1.to_vec()];
    let mut basis_b = vec![b1.to_vec()];
    // pin the second directions only when at least one side is genuinely
    // independent; a side whose residual vanished outright cannot contribute
    // a direction and falls back to completion
    if norm_a >= tol::DEPENDENCE || norm_b >= tol::DEPENDENCE {
        if norm_a > 0.0 {
            basis_a.push(res_a.iter().map(|&z| z / norm_a).collect());
        }
        if norm_b > 0.0 {
            basis_b.push(res_b.iter().map(|&z| z / norm_b).collect());
        }
        // a one-sided dropout would desynchronize the two bases
        if basis_a.len() != basis_b.len() {
            basis_a.truncate(1);
            basis_b.truncate(1);
        }
    }
    complete_orthonormal_basis(&mut basis_a, dim, tol::DEPENDENCE);
    complete_orthonormal_basis(&mut basis_b, dim, tol::DEPENDENCE);

    // U = Σ_k |b_k⟩⟨a_k| maps the A-basis onto the B-basis in order
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (bk, ak) in basis_b.iter().zip(&basis_a) {
        for i in 0..dim {
            for j in 0..dim {
                u.set(i, j, u.get(i, j) + bk[i] * ak[j].conj());
            }
        }
    }
    let residual = u.unitarity_deviation();
    if residual > tol::UNITARITY {
        return Err(Error::CompletionFailure { residual });
    }
    Ok(u)
}

/// Build the operational witness for a pair of states: pure inputs `ψ`, `φ`
/// with `|⟨ψ|φ⟩| = F(ρ,σ)` and a channel taking `ψ ↦ ρ`, `φ ↦ σ`.
///
/// The two inputs are the optimal purification overlap geometry replayed in
/// the system space — `ψ` a basis state and `φ` tilted away from it by
/// exactly the measured overlap — and the channel is the environment-tracing
/// map of a unitary that carries the two inputs onto the two optimal
/// purifications.
pub fn construct_witness(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FidelityWitness> {
    let d = rho.dim();
    if sigma.dim() != d {
        return Err(Error::dims(format!(
            "states have dimensions {} and {}",
            d,
            sigma.dim()
        )));
    }
    let fidelity_target = fidelity(rho, sigma)?;
    if d == 1 {
        // one-level systems admit exactly one state; the identity does it all
        let only = PureState::new(vec![C64::new(1.0, 0.0)])?;
        return Ok(FidelityWitness {
            psi: only.clone(),
            phi: only,
            channel: KrausChannel::identity(1),
            overlap: C64::new(1.0, 0.0),
            fidelity_target,
        });
    }

    let pair = uhlmann_optimal_purifications(rho, sigma, d)?;
    let psi0 = pair.psi0.vector().amplitudes();
    let phi0 = pair.phi0.vector().amplitudes();

    // replay the (overlap, residual) geometry of the purification pair on
    // two fixed system axes; measuring both numbers from the vectors keeps
    // the Gram data consistent to rounding even when the pair is degenerate
    let g = vec_inner(psi0, phi0);
    let r = vec_norm(&gram_residual(psi0, phi0, g));
    let mut phi_raw = vec![C64::new(0.0, 0.0); d];
    phi_raw[0] = g;
    phi_raw[1] = C64::new(r, 0.0);
    let psi = PureState::basis(d, 0);
    let phi = PureState::from_unnormalized(phi_raw)?;

    // lift both inputs to the composite space with the environment at rest
    let total = d * d;
    let mut a1 = vec![C64::new(0.0, 0.0); total];
    a1[..d].copy_from_slice(psi.amplitudes());
    let mut a2 = vec![C64::new(0.0, 0.0); total];
    a2[..d].copy_from_slice(phi.amplitudes());

    let unitary = two_pair_unitary(&a1, &a2, psi0, phi0, tol::GRAM_MATCH)?;
    let dilation = StinespringDilation { dim_q: d, dim_e: d, unitary, env_init_index: 0 };
    let channel = kraus_from_dilation(&dilation);

    let overlap = psi.inner(&phi);
    Ok(FidelityWitness { psi, phi, channel, overlap, fidelity_target })
}

/// Re-measure everything the witness claims: both state images and the
/// overlap against the closed-form fidelity.
pub fn verify_witness(
    witness: &FidelityWitness,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tolerance: f64,
) -> Result<WitnessReport> {
    let rho_image = witness.channel.apply_pure(&witness.psi)?;
    let sigma_image = witness.channel.apply_pure(&witness.phi)?;
    let rho_residual = rho_image.matrix().sub(rho.matrix()).fro_norm();
    let sigma_residual = sigma_image.matrix().sub(sigma.matrix()).fro_norm();
    let overlap_residual = (witness.overlap.norm() - fidelity(rho, sigma)?).abs();
    let pass = rho_residual <= tolerance
        && sigma_residual <= tolerance
        && overlap_residual <= tolerance;
    Ok(WitnessReport { rho_residual, sigma_residual, overlap_residual, pass })
}

/// Signed slack of the pure-input bound: `F(𝓔ψ, 𝓔φ) − |⟨ψ|φ⟩|`.
///
/// Non-negative (up to numerics) for every channel and input pair; zero
/// exactly when the channel is a witness for its own images.
pub fn overlap_upper_bound_check(
    channel: &KrausChannel,
    psi: &PureState,
    phi: &PureState,
) -> Result<f64> {
    let out_psi = channel.apply_pure(psi)?;
    let out_phi = channel.apply_pure(phi)?;
    Ok(fidelity(&out_psi, &out_phi)? - psi.inner(phi).norm())
}

/// Signed slack of fidelity under post-processing:
/// `F(𝓖ρ, 𝓖σ) − F(ρ, σ)`.
pub fn monotonicity_check(
    channel: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<f64> {
    let out_rho = channel.apply(rho)?;
    let out_sigma = channel.apply(sigma)?;
    Ok(fidelity(&out_rho, &out_sigma)? - fidelity(rho, sigma)?)
}

/// Prove the post-processing bound for a concrete channel by routing it
/// through a witness: composing `𝓖` after the witness channel exhibits
/// `𝓖ρ` and `𝓖σ` as images of two pure states whose overlap is `F(ρ,σ)`,
/// so the pure-input bound forces `F(𝓖ρ, 𝓖σ) ≥ F(ρ, σ)`.
pub fn monotonicity_via_witness(
    channel: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tolerance: f64,
) -> Result<MonotonicityReport> {
    let witness = construct_witness(rho, sigma)?;
    let composed = witness.channel.then(channel)?;
    let psi_image = composed.apply_pure(&witness.psi)?;
    let phi_image = composed.apply_pure(&witness.phi)?;
    let psi_residual = psi_image.matrix().sub(channel.apply(rho)?.matrix()).fro_norm();
    let phi_residual = phi_image.matrix().sub(channel.apply(sigma)?.matrix()).fro_norm();
    let bound_residual = fidelity(&psi_image, &phi_image)? - witness.overlap.norm();
    let pass = psi_residual <= tolerance
        && phi_residual <= tolerance
        && bound_residual >= -tolerance;
    Ok(MonotonicityReport { psi_residual, phi_residual, bound_residual, pass })
}
