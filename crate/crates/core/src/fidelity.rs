//! State fidelity and its purification-overlap characterizations.
//!
//! Three independent routes to the same number live here and are kept
//! deliberately separate so they can cross-check each other:
//!
//! 1. the closed form `tr √(√ρ·σ·√ρ)`;
//! 2. the overlap `|⟨ψ₀|φ₀⟩|` of an explicitly constructed optimal
//!    purification pair (an environment twist by the polar factor of the
//!    cross-overlap matrix);
//! 3. a Riemannian gradient ascent over environment unitaries that must
//!    rediscover the same maximum without knowing the construction.
//!
//! A randomized sweep over environment twists additionally certifies that no
//! purification pair ever beats the closed form.

use crate::error::{Error, Result};
use crate::mat::{vec_inner, C64, ComplexMatrix};
use crate::psd_sqrt;
use crate::rng::derive_seed;
use crate::states::{
    canonical_eig_descending, purification_from_eig, DensityMatrix, PureState, Purification,
};
use crate::svd::polar_unitary;
use crate::tol;

/// Optimal purification pair achieving the fidelity as an overlap.
#[derive(Debug, Clone)]
pub struct UhlmannResult {
    /// The achieved overlap magnitude, clamped into `[0, 1]`.
    pub fidelity: f64,
    /// Canonical purification of the first state.
    pub psi0: Purification,
    /// Twisted purification of the second state; phase-fixed so the overlap
    /// with `psi0` is real and non-negative.
    pub phi0: Purification,
    /// `⟨ψ₀|φ₀⟩` after phase fixing.
    pub overlap: C64,
}

/// Default restart budget for [`uhlmann_variational`].
pub const VARIATIONAL_RESTARTS: usize = 8;

/// Default per-restart iteration budget for [`uhlmann_variational`].
pub const VARIATIONAL_MAX_ITERS: usize = 500;

/// Per-iteration record of the variational ascent.
#[derive(Debug, Clone)]
pub struct VariationalTrace {
    /// Iterations recorded (the longest restart).
    pub iterations: usize,
    /// Best overlap seen up to each iteration, merged over restarts;
    /// non-decreasing by construction.
    pub best_overlap_per_iteration: Vec<f64>,
    /// Final best overlap.
    pub final_overlap: f64,
}

/// Fidelity `tr √(√ρ·σ·√ρ)` of two density matrices.
///
/// The result is clamped into `[0, 1]`; an excursion beyond
/// `FIDELITY_CLAMP` is reported as a hard numeric error rather than hidden.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(format!(
            "fidelity needs equal dimensions, got {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let sqrt_rho = psd_sqrt(rho.matrix(), tol::SPECTRAL_FLOOR)?;
    let inner = sqrt_rho.mul(sigma.matrix()).mul(&sqrt_rho).hermitize();
    let outer_root = psd_sqrt(&inner, tol::SPECTRAL_FLOOR)?;
    clamp_unit("fidelity", outer_root.trace().re)
}

fn clamp_unit(quantity: &'static str, value: f64) -> Result<f64> {
    if value < -tol::FIDELITY_CLAMP || value > 1.0 + tol::FIDELITY_CLAMP {
        return Err(Error::OutOfRange { quantity, value, tolerance: tol::FIDELITY_CLAMP });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `|⟨ψ|φ⟩|` — the fidelity of two pure states.
pub fn pure_overlap(psi: &PureState, phi: &PureState) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(Error::dims(format!(
            "overlap needs equal dimensions, got {} and {}",
            psi.dim(),
            phi.dim()
        )));
    }
    clamp_unit("pure overlap", psi.inner(phi).norm())
}

/// Probability that `φ` passes the projective test `{|ψ⟩⟨ψ|, 1−|ψ⟩⟨ψ|}`:
/// the squared overlap.
pub fn test_pass_probability(psi: &PureState, phi: &PureState) -> Result<f64> {
    let overlap = pure_overlap(psi, phi)?;
    Ok(overlap * overlap)
}

/// Classical fidelity `Σ √(pᵢ·qᵢ)` of two probability distributions.
pub fn classical_fidelity(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::dims(format!(
            "distributions have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    for (name, dist) in [("first", p), ("second", q)] {
        if dist.is_empty() {
            return Err(Error::BadDistribution { detail: format!("{name} distribution is empty") });
        }
        if let Some(&x) = dist.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::BadDistribution {
                detail: format!("{name} distribution has weight {x}"),
            });
        }
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > tol::DENSITY_VALIDATION {
            return Err(Error::BadDistribution {
                detail: format!("{name} distribution sums to {sum}"),
            });
        }
    }
    clamp_unit(
        "classical fidelity",
        p.iter().zip(q).map(|(&a, &b)| (a * b).sqrt()).sum(),
    )
}

/// Cross-overlap matrix `M(i,j) = √pᵢ·√qⱼ·⟨uᵢ|vⱼ⟩` over the canonical
/// descending eigendata of the two states, zero-padded to `dim_e × dim_e`.
///
/// For any environment unitary `V`, the overlap of `ψ₀` with the `V`-twisted
/// canonical purification of `σ` equals `tr(Vᵀ·M)`; maximizing that trace
/// over unitaries is exactly the trace norm of `M`.
fn cross_overlap_matrix(
    rho_values: &[f64],
    rho_vectors: &ComplexMatrix,
    sigma_values: &[f64],
    sigma_vectors: &ComplexMatrix,
    dim_e: usize,
) -> ComplexMatrix {
    let dim_q = rho_vectors.rows();
    let mut m = ComplexMatrix::zeros(dim_e, dim_e);
    for i in 0..dim_q.min(dim_e) {
        let p = rho_values[i];
        if p <= tol::SPECTRAL_FLOOR {
            continue;
        }
        for j in 0..dim_q.min(dim_e) {
            let q = sigma_values[j];
            if q <= tol::SPECTRAL_FLOOR {
                continue;
            }
            let g = vec_inner(&rho_vectors.column(i), &sigma_vectors.column(j));
            m.set(i, j, g * (p.sqrt() * q.sqrt()));
        }
    }
    m
}

/// Apply an environment unitary: `|v⟩ → (V ⊗ I)|v⟩`.
fn env_twist(v: &[C64], u: &ComplexMatrix, dim_q: usize) -> Vec<C64> {
    let dim_e = u.rows();
    debug_assert_eq!(v.len(), dim_e * dim_q);
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for e in 0..dim_e {
        for q in 0..dim_q {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..dim_e {
                acc += u.get(e, j) * v[j * dim_q + q];
            }
            out[e * dim_q + q] = acc;
        }
    }
    out
}

fn check_pair(rho: &DensityMatrix, sigma: &DensityMatrix, dim_e: usize) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(format!(
            "states have dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    if dim_e < rho.dim() {
        return Err(Error::EnvTooSmall { dim_e, rank: rho.dim() });
    }
    Ok(())
}

/// Construct a purification pair whose overlap attains the fidelity.
///
/// `ψ₀` is the canonical purification of `rho`; `φ₀` is the canonical
/// purification of `sigma` twisted on the environment by the conjugate of
/// the polar factor of the cross-overlap matrix, then phase-fixed so the
/// overlap is real and non-negative.
pub fn uhlmann_optimal_purifications(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    dim_e: usize,
) -> Result<UhlmannResult> {
    check_pair(rho, sigma, dim_e)?;
    let (p_values, p_vectors) = canonical_eig_descending(rho)?;
    let (q_values, q_vectors) = canonical_eig_descending(sigma)?;
    let psi0 = purification_from_eig(&p_values, &p_vectors, dim_e)?;
    let phi0_std = purification_from_eig(&q_values, &q_vectors, dim_e)?;

    let m = cross_overlap_matrix(&p_values, &p_vectors, &q_values, &q_vectors, dim_e);
    let w = polar_unitary(&m)?;
    let v_opt = w.conj();

    let twisted = env_twist(phi0_std.vector().amplitudes(), &v_opt, rho.dim());
    let raw = vec_inner(psi0.vector().amplitudes(), &twisted);
    let magnitude = raw.norm();
    // rotate the global phase so the overlap lands on the positive real axis
    let phi0_vec = if magnitude > 0.0 {
        let phase = (raw / magnitude).conj();
        twisted.iter().map(|&z| z * phase).collect()
    } else {
        twisted
    };
    let phi0 = Purification::new(
        dim_e,
        rho.dim(),
        PureState::from_unnormalized(phi0_vec)?,
    )?;

    let fidelity = clamp_unit("purification overlap", magnitude)?;
    Ok(UhlmannResult {
        fidelity,
        psi0,
        phi0,
        overlap: C64::new(fidelity, 0.0),
    })
}

/// `f(V) = |tr(Vᵀ·M)|` and its ascent direction on the unitary group.
struct AscentProblem {
    m: ComplexMatrix,
}

impl AscentProblem {
    fn objective(&self, v: &ComplexMatrix) -> f64 {
        v.transpose().mul(&self.m).trace().norm()
    }

    /// Skew-Hermitian tangent `Ω = (V†G − G†V)/2` of the Riemannian gradient,
    /// with `G` the Euclidean gradient `(g/|g|)·conj(M)`.
    fn tangent(&self, v: &ComplexMatrix) -> ComplexMatrix {
        let g_val = v.transpose().mul(&self.m).trace();
        let scale = if g_val.norm() > 0.0 { g_val / g_val.norm() } else { C64::new(1.0, 0.0) };
        let grad = self.m.conj().scale(scale);
        let vg = v.adjoint().mul(&grad);
        vg.sub(&vg.adjoint()).scale(C64::new(0.5, 0.0))
    }
}

/// Cayley step `V · (I − ηΩ/2)⁻¹(I + ηΩ/2)`: exactly unitary for
/// skew-Hermitian `Ω`, no matrix exponential needed.
fn cayley_step(v: &ComplexMatrix, omega: &ComplexMatrix, eta: f64) -> Result<ComplexMatrix> {
    let n = v.rows();
    let half = omega.scale(C64::new(0.5 * eta, 0.0));
    let id = ComplexMatrix::identity(n);
    let rotation = id.sub(&half).solve(&id.add(&half))?;
    Ok(v.mul(&rotation))
}

/// Variational confirmation of the fidelity: maximize the purification
/// overlap by Riemannian gradient ascent over environment unitaries.
///
/// Runs `restarts` independent ascents (the first from the identity, the
/// rest from seeded Haar unitaries) of at most `max_iters` Cayley steps each,
/// stopping a restart when the step size underflows `step_tol`. Fails with
/// [`Error::NoConvergence`] only if every restart stalls more than
/// `VARIATIONAL_FAILURE` below the closed-form value.
pub fn uhlmann_variational(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    dim_e: usize,
    restarts: usize,
    max_iters: usize,
    step_tol: f64,
    seed: u64,
) -> Result<VariationalTrace> {
    check_pair(rho, sigma, dim_e)?;
    let (p_values, p_vectors) = canonical_eig_descending(rho)?;
    let (q_values, q_vectors) = canonical_eig_descending(sigma)?;
    let problem = AscentProblem {
        m: cross_overlap_matrix(&p_values, &p_vectors, &q_values, &q_vectors, dim_e),
    };

    let mut traces: Vec<Vec<f64>> = Vec::with_capacity(restarts.max(1));
    for r in 0..restarts.max(1) {
        let mut v = if r == 0 {
            ComplexMatrix::identity(dim_e)
        } else {
            crate::states::random_unitary(dim_e, derive_seed(seed, r as u64))
        };
        let mut best = problem.objective(&v);
        let mut eta = 1.0;
        let mut trace = vec![best];
        for _ in 0..max_iters {
            let omega = problem.tangent(&v);
            let omega_norm = omega.fro_norm();
            if eta * omega_norm < step_tol {
                break;
            }
            let current = problem.objective(&v);
            let mut accepted = false;
            while eta * omega_norm >= step_tol {
                let candidate = cayley_step(&v, &omega, eta)?;
                if problem.objective(&candidate) > current {
                    v = candidate;
                    eta = (eta * 1.5).min(4.0);
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            best = best.max(problem.objective(&v));
            trace.push(best);
            if !accepted {
                break;
            }
        }
        traces.push(trace);
    }

    // merge: at each iteration take the best value any restart had reached
    let iterations = traces.iter().map(Vec::len).max().unwrap_or(0);
    let mut merged = Vec::with_capacity(iterations);
    let mut running = 0.0f64;
    for k in 0..iterations {
        let at_k = traces
            .iter()
            .map(|t| t[k.min(t.len() - 1)])
            .fold(0.0f64, f64::max);
        running = running.max(at_k);
        merged.push(running);
    }
    let final_overlap = merged.last().copied().unwrap_or(0.0);

    let closed_form = fidelity(rho, sigma)?;
    if final_overlap < closed_form - tol::VARIATIONAL_FAILURE {
        return Err(Error::NoConvergence {
            context: "variational overlap ascent",
            iterations: max_iters,
            residual: closed_form - final_overlap,
        });
    }
    Ok(VariationalTrace {
        iterations,
        best_overlap_per_iteration: merged,
        final_overlap,
    })
}

/// Randomized certificate that no purification pair beats the fidelity.
///
/// Draws `trials` seeded Haar environment twists of the canonical second
/// purification, checks each overlap against `F + sweep margin`, and returns
/// the largest overlap seen (0 for zero trials).
pub fn random_purification_sweep(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    dim_e: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_pair(rho, sigma, dim_e)?;
    let closed_form = fidelity(rho, sigma)?;
    let psi0 = crate::states::standard_purification(rho, dim_e)?;
    let phi0_std = crate::states::standard_purification(sigma, dim_e)?;

    let mut best = 0.0f64;
    for t in 0..trials {
        let u = crate::states::random_unitary(dim_e, derive_seed(seed, t as u64));
        let twisted = env_twist(phi0_std.vector().amplitudes(), &u, rho.dim());
        let overlap = vec_inner(psi0.vector().amplitudes(), &twisted).norm();
        assert!(
            overlap <= closed_form + tol::FIDELITY_CLAMP,
            "purification overlap {overlap} exceeds fidelity {closed_form}"
        );
        best = best.max(overlap);
    }
    Ok(best)
}

/// Sample a seeded mixed-state pair for the given dimension; trial index
/// selects a deterministic rank pattern covering full- and low-rank states.
pub fn seeded_pair(dim: usize, trial: u64, seed: u64) -> Result<(DensityMatrix, DensityMatrix)> {
    let rank_rho = 1 + (trial as usize % dim);
    let rank_sigma = 1 + ((trial as usize / dim) % dim);
    let rho = crate::states::random_density(dim, rank_rho, derive_seed(seed, 2 * trial))?;
    let sigma = crate::states::random_density(dim, rank_sigma, derive_seed(seed, 2 * trial + 1))?;
    Ok((rho, sigma))
}
