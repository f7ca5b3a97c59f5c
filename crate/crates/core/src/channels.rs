//! Quantum channels: Kraus families, Choi matrices, and unitary dilations.
//!
//! A channel is carried as an explicit Kraus family `{K_m}` with
//! `Σ K†K = 1`. Two representations are considered the same channel exactly
//! when their Choi matrices agree, so all round-trip checks in this module
//! compare Chois rather than operator lists. The dilation of a `d`-level
//! channel acts on an environment of dimension exactly `d²` (environment
//! factor first), large enough for any Kraus rank the channel can have.

use crate::error::{Error, Result};
use crate::mat::{
    complete_orthonormal_basis, composite_index, kron, outer, partial_trace_env, C64,
    ComplexMatrix,
};
use crate::rng::derive_seed;
use crate::states::{random_unitary, validate_density, DensityMatrix, PureState};
use crate::tol;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim_q: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Unitary extension of a channel onto system ⊗ environment.
///
/// Feeding the environment the basis state `env_init_index`, conjugating by
/// `unitary`, and tracing the environment out reproduces the channel.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    /// System dimension.
    pub dim_q: usize,
    /// Environment dimension (always `dim_q²` for constructed dilations).
    pub dim_e: usize,
    /// Unitary on the composite space, environment factor first.
    pub unitary: ComplexMatrix,
    /// Basis index the environment must start in.
    pub env_init_index: usize,
}

/// Check that a Kraus family is well-formed and complete: non-empty, square
/// operators of one common dimension, and `‖ΣK†K − 1‖_F ≤ tol`.
pub fn validate_kraus(ops: &[ComplexMatrix], tol_param: f64) -> Result<()> {
    let dim = match ops.first() {
        None => return Err(Error::dims("empty Kraus family")),
        Some(k) => k.rows(),
    };
    for (m, k) in ops.iter().enumerate() {
        if !k.is_square() || k.rows() != dim {
            return Err(Error::dims(format!(
                "Kraus operator {m} is {}×{}, expected {dim}×{dim}",
                k.rows(),
                k.cols()
            )));
        }
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for k in ops {
        sum = sum.add(&k.adjoint().mul(k));
    }
    let deviation = sum.sub(&ComplexMatrix::identity(dim)).fro_norm();
    if deviation > tol_param {
        return Err(Error::NotTracePreserving { deviation, tolerance: tol_param });
    }
    Ok(())
}

impl KrausChannel {
    /// Build a channel from a Kraus family, validating completeness against
    /// [`tol::KRAUS_COMPLETENESS`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        validate_kraus(&kraus, tol::KRAUS_COMPLETENESS)?;
        let dim_q = kraus[0].rows();
        Ok(KrausChannel { dim_q, kraus })
    }

    /// Wrap operators whose completeness is already guaranteed by
    /// construction (e.g. blocks of a unitary).
    pub(crate) fn from_parts(dim_q: usize, kraus: Vec<ComplexMatrix>) -> Self {
        debug_assert!(validate_kraus(&kraus, tol::KRAUS_COMPLETENESS).is_ok());
        KrausChannel { dim_q, kraus }
    }

    /// The identity channel on `dim` levels.
    pub fn identity(dim: usize) -> Self {
        KrausChannel { dim_q: dim, kraus: vec![ComplexMatrix::identity(dim)] }
    }

    /// System dimension the channel acts on.
    pub fn dim(&self) -> usize {
        self.dim_q
    }

    /// The Kraus operators.
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Apply the channel: `ρ → Σ K ρ K†`, validated as a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_q {
            return Err(Error::dims(format!(
                "channel acts on dimension {}, state has {}",
                self.dim_q,
                rho.dim()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_q, self.dim_q);
        for k in &self.kraus {
            out = out.add(&k.mul(rho.matrix()).mul(&k.adjoint()));
        }
        validate_density(&out.hermitize(), tol::CHANNEL_OUTPUT)
    }

    /// Apply the channel to a pure input (the output is mixed in general).
    pub fn apply_pure(&self, psi: &PureState) -> Result<DensityMatrix> {
        self.apply(&DensityMatrix::from_pure(psi))
    }

    /// Composition `later ∘ self`: the family `{L_j·K_m}`.
    ///
    /// The product family can be redundant (more than `dim²` operators);
    /// that is still a faithful representation of the composed map.
    pub fn then(&self, later: &KrausChannel) -> Result<KrausChannel> {
        if later.dim_q != self.dim_q {
            return Err(Error::dims(format!(
                "cannot compose channels on dimensions {} and {}",
                self.dim_q, later.dim_q
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * later.kraus.len());
        for l in &later.kraus {
            for k in &self.kraus {
                kraus.push(l.mul(k));
            }
        }
        Ok(KrausChannel { dim_q: self.dim_q, kraus })
    }

    /// Choi matrix `Σ_m |w_m⟩⟨w_m|` with `w_m(a·d + i) = K_m(i, a)`
    /// (reference factor first, unnormalized: the trace is `d`).
    ///
    /// Two Kraus families represent the same channel exactly when their
    /// Choi matrices coincide.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim_q;
        let mut c = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.kraus {
            let mut w = vec![C64::new(0.0, 0.0); d * d];
            for a in 0..d {
                for i in 0..d {
                    w[composite_index(a, i, d)] = k.get(i, a);
                }
            }
            c = c.add(&outer(&w, &w));
        }
        c
    }
}

/// Frobenius distance between the Choi matrices of two channels.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dims(format!(
            "channels act on dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.choi().sub(&b.choi()).fro_norm())
}

/// Build a unitary dilation of the channel on an environment of dimension
/// exactly `dim²`.
///
/// The columns with the environment in its initial state are fixed by the
/// Kraus family — `U(k·d+i, j) = K_k(i, j)` — and the rest are completed to
/// an orthonormal basis. Fails with [`Error::TooManyKraus`] when the family
/// has more than `dim²` operators (reduce it first via its Choi
/// decomposition), and with [`Error::CompletionFailure`] if the completed
/// matrix misses unitarity by more than [`tol::UNITARITY`].
pub fn stinespring_dilate(channel: &KrausChannel) -> Result<StinespringDilation> {
    let d = channel.dim_q;
    let dim_e = d * d;
    let total = dim_e * d;
    if channel.kraus.len() > dim_e {
        return Err(Error::TooManyKraus { count: channel.kraus.len(), max: dim_e });
    }

    // columns for env index 0: |0⟩_E ⊗ |j⟩_Q sits at composite index j
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(total);
    for j in 0..d {
        let mut col = vec![C64::new(0.0, 0.0); total];
        for (k, kraus) in channel.kraus.iter().enumerate() {
            for i in 0..d {
                col[composite_index(k, i, d)] = kraus.get(i, j);
            }
        }
        columns.push(col);
    }
    complete_orthonormal_basis(&mut columns, total, tol::DEPENDENCE);

    let mut unitary = ComplexMatrix::zeros(total, total);
    for (j, col) in columns.iter().enumerate() {
        unitary.set_column(j, col);
    }
    let residual = unitary.unitarity_deviation();
    if residual > tol::UNITARITY {
        return Err(Error::CompletionFailure { residual });
    }
    Ok(StinespringDilation { dim_q: d, dim_e, unitary, env_init_index: 0 })
}

/// Run a state through the dilation: adjoin the environment in its initial
/// basis state, conjugate by the dilation unitary, trace the environment
/// back out.
pub fn apply_dilation(dilation: &StinespringDilation, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != dilation.dim_q {
        return Err(Error::dims(format!(
            "dilation acts on dimension {}, state has {}",
            dilation.dim_q,
            rho.dim()
        )));
    }
    let mut env = ComplexMatrix::zeros(dilation.dim_e, dilation.dim_e);
    env.set(dilation.env_init_index, dilation.env_init_index, C64::new(1.0, 0.0));
    let joint = kron(&env, rho.matrix());
    let evolved = dilation.unitary.mul(&joint).mul(&dilation.unitary.adjoint());
    let reduced = partial_trace_env(&evolved, dilation.dim_e, dilation.dim_q)?;
    validate_density(&reduced.hermitize(), tol::CHANNEL_OUTPUT)
}

/// Read a Kraus family back out of a dilation: `K_k(i, j) = U(k·d+i, j)`.
///
/// Produces one operator per environment level; levels the channel never
/// reaches come out as exact zero matrices, which is harmless.
pub fn kraus_from_dilation(dilation: &StinespringDilation) -> KrausChannel {
    let d = dilation.dim_q;
    let kraus = (0..dilation.dim_e)
        .map(|k| {
            ComplexMatrix::from_fn(d, d, |i, j| {
                dilation.unitary.get(composite_index(k, i, d), j)
            })
        })
        .collect();
    KrausChannel::from_parts(d, kraus)
}

/// Seeded random channel of the given Kraus rank: the first `dim` columns of
/// a Haar unitary on `rank·dim` levels, cut into `rank` stacked blocks.
///
/// Orthonormality of those columns makes the family complete by
/// construction. `rank` must lie in `1..=dim²`.
pub fn random_channel(dim: usize, rank: usize, seed: u64) -> Result<KrausChannel> {
    if dim == 0 {
        return Err(Error::dims("channel dimension must be positive"));
    }
    if rank == 0 || rank > dim * dim {
        return Err(Error::BadRank { rank, max: dim * dim });
    }
    let big = random_unitary(rank * dim, derive_seed(seed, 0x6368_616e));
    let kraus = (0..rank)
        .map(|k| ComplexMatrix::from_fn(dim, dim, |i, j| big.get(k * dim + i, j)))
        .collect();
    Ok(KrausChannel::from_parts(dim, kraus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_density, random_pure};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    fn amplitude_damping(gamma: f64) -> KrausChannel {
        let k0 = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - gamma).sqrt(), 0.0)],
        )
        .unwrap();
        let k1 = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(0.0, 0.0), c(gamma.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        KrausChannel::new(vec![k0, k1]).unwrap()
    }

    #[test]
    fn identity_channel_fixes_seeded_states() {
        let id = KrausChannel::identity(3);
        for seed in 0..5u64 {
            let rho = random_density(3, 3, seed).unwrap();
            let out = id.apply(&rho).unwrap();
            assert!(out.matrix().sub(rho.matrix()).fro_norm() < 1e-12);
        }
    }

    #[test]
    fn incomplete_family_is_rejected_with_measurement() {
        let shrunk = ComplexMatrix::identity(2).scale(c(0.9, 0.0));
        match validate_kraus(&[shrunk], 1e-9) {
            Err(Error::NotTracePreserving { deviation, .. }) => {
                // ‖0.81·I − I‖_F = 0.19·√2
                assert!((deviation - 0.19 * std::f64::consts::SQRT_2).abs() < 1e-12);
            }
            other => panic!("expected NotTracePreserving, got {other:?}"),
        }
    }

    #[test]
    fn empty_family_is_rejected() {
        assert!(matches!(validate_kraus(&[], 1e-9), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn amplitude_damping_sends_excited_toward_ground() {
        let chan = amplitude_damping(0.3);
        let excited = DensityMatrix::from_distribution(&[0.0, 1.0]).unwrap();
        let out = chan.apply(&excited).unwrap();
        // populations mix as (γ, 1−γ); coherences are absent
        assert!((out.matrix().get(0, 0).re - 0.3).abs() < 1e-12);
        assert!((out.matrix().get(1, 1).re - 0.7).abs() < 1e-12);
        assert!(out.matrix().get(0, 1).norm() < 1e-12);
    }

    #[test]
    fn composition_of_dampings_is_a_damping() {
        let first = amplitude_damping(0.2);
        let second = amplitude_damping(0.5);
        let composed = first.then(&second).unwrap();
        // decay probabilities compound: 1−(1−γ₁)(1−γ₂)
        let direct = amplitude_damping(1.0 - 0.8 * 0.5);
        assert!(choi_distance(&composed, &direct).unwrap() < 1e-12);
        assert_eq!(composed.kraus().len(), 4);
    }

    #[test]
    fn choi_of_identity_is_the_maximally_entangled_projector() {
        let c_mat = KrausChannel::identity(2).choi();
        // Σ_{a,b} |aa⟩⟨bb| has ones exactly at composite indices (a·2+a, b·2+b)
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i == 0 || i == 3) && (j == 0 || j == 3) { 1.0 } else { 0.0 };
                assert!((c_mat.get(i, j) - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn choi_trace_equals_dimension() {
        for (dim, rank, seed) in [(2, 3, 1u64), (3, 2, 2), (4, 5, 3)] {
            let chan = random_channel(dim, rank, seed).unwrap();
            let tr = chan.choi().trace();
            assert!((tr.re - dim as f64).abs() < 1e-10, "dim {dim}: trace {tr}");
            assert!(tr.im.abs() < 1e-12);
        }
    }

    #[test]
    fn random_channels_are_deterministic_and_complete() {
        let a = random_channel(3, 4, 7).unwrap();
        let b = random_channel(3, 4, 7).unwrap();
        assert!(choi_distance(&a, &b).unwrap() == 0.0);
        assert!(validate_kraus(a.kraus(), 1e-12).is_ok());
        assert!(matches!(random_channel(2, 0, 1), Err(Error::BadRank { .. })));
        assert!(matches!(random_channel(2, 5, 1), Err(Error::BadRank { .. })));
    }

    #[test]
    fn dilation_has_full_environment_and_tight_unitarity() {
        for (dim, rank) in [(2usize, 1usize), (2, 4), (3, 2)] {
            let chan = random_channel(dim, rank, 11).unwrap();
            let dil = stinespring_dilate(&chan).unwrap();
            assert_eq!(dil.dim_e, dim * dim);
            assert_eq!(dil.env_init_index, 0);
            assert!(dil.unitary.unitarity_deviation() < 1e-9);
        }
    }

    #[test]
    fn dilation_reproduces_the_channel_action() {
        for (dim, rank, seed) in [(2, 2, 5u64), (3, 4, 6), (2, 4, 7)] {
            let chan = random_channel(dim, rank, seed).unwrap();
            let dil = stinespring_dilate(&chan).unwrap();
            let rho = random_density(dim, dim, derive_seed(seed, 1)).unwrap();
            let direct = chan.apply(&rho).unwrap();
            let via_dilation = apply_dilation(&dil, &rho).unwrap();
            let gap = direct.matrix().sub(via_dilation.matrix()).fro_norm();
            assert!(gap < 1e-10, "dim {dim} rank {rank}: gap {gap}");
        }
    }

    #[test]
    fn kraus_extraction_roundtrips_the_choi() {
        for (dim, rank, seed) in [(2, 3, 8u64), (3, 5, 9)] {
            let chan = random_channel(dim, rank, seed).unwrap();
            let extracted = kraus_from_dilation(&stinespring_dilate(&chan).unwrap());
            assert_eq!(extracted.kraus().len(), dim * dim);
            let gap = choi_distance(&chan, &extracted).unwrap();
            assert!(gap < 1e-12, "dim {dim} rank {rank}: Choi gap {gap}");
        }
    }

    #[test]
    fn oversized_kraus_family_cannot_dilate() {
        // five scaled phase rotations on a qubit: complete, but too many
        let phases: Vec<ComplexMatrix> = (0..5)
            .map(|k| ComplexMatrix::identity(2).scale(C64::from_polar((0.2f64).sqrt(), k as f64)))
            .collect();
        let chan = KrausChannel::new(phases).unwrap();
        assert!(matches!(
            stinespring_dilate(&chan),
            Err(Error::TooManyKraus { count: 5, max: 4 })
        ));
    }

    #[test]
    fn apply_pure_matches_apply_on_the_projector() {
        let chan = random_channel(3, 2, 13).unwrap();
        let psi = random_pure(3, 14);
        let a = chan.apply_pure(&psi).unwrap();
        let b = chan.apply(&DensityMatrix::from_pure(&psi)).unwrap();
        assert!(a.matrix().sub(b.matrix()).fro_norm() < 1e-12);
    }

    #[test]
    fn unitary_channel_dilation_keeps_output_pure() {
        // Hadamard-like unitary as a single-Kraus channel
        let h = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
        )
        .unwrap()
        .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        let chan = KrausChannel::new(vec![h]).unwrap();
        let dil = stinespring_dilate(&chan).unwrap();
        let input = DensityMatrix::from_distribution(&[1.0, 0.0]).unwrap();
        let out = apply_dilation(&dil, &input).unwrap();
        // H|0⟩ = |+⟩, still pure
        assert_eq!(out.rank().unwrap(), 1);
        assert!((out.matrix().get(0, 1).re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let chan = KrausChannel::identity(2);
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(chan.apply(&rho), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            chan.then(&KrausChannel::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let dil = stinespring_dilate(&chan).unwrap();
        assert!(matches!(apply_dilation(&dil, &rho), Err(Error::DimensionMismatch { .. })));
    }
}
