//! Quantum state types: density matrices, pure states, purifications.
//!
//! Construction is validating: a [`DensityMatrix`] can only be obtained
//! through a path that checked (or guarantees) hermiticity, positivity, and
//! unit trace, so downstream algorithms never re-litigate those invariants.
//! Random ensembles are bit-deterministic functions of their seed.

use crate::eig::herm_eig;
use crate::error::{Error, Result};
use crate::mat::{composite_index, vec_norm, C64, ComplexMatrix};
use crate::rng::Rng;
use crate::tol;

/// Validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

/// Normalized pure state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<C64>,
}

/// Pure state on an environment⊗system space that purifies a system state.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    dim_e: usize,
    dim_q: usize,
    vector: PureState,
}

/// What [`validate_density_with_report`] had to fix to accept an input.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    /// `‖M − M†‖_F` of the raw input.
    pub hermiticity_deviation: f64,
    /// Most negative eigenvalue clipped to zero (0 when nothing was clipped).
    pub clipped_negativity: f64,
    /// `|tr(M) − 1|` of the raw input.
    pub trace_deviation: f64,
    /// Whether the spectrum was reconstructed after clipping.
    pub spectrum_clipped: bool,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        DensityMatrix { dim, matrix: m }
    }

    /// Projector onto a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        let m = crate::mat::outer(psi.amplitudes(), psi.amplitudes());
        DensityMatrix { dim: psi.dim(), matrix: m.hermitize() }
    }

    /// Diagonal state from a probability distribution.
    pub fn from_distribution(p: &[f64]) -> Result<Self> {
        check_distribution(p)?;
        Ok(DensityMatrix { dim: p.len(), matrix: ComplexMatrix::diag(p) })
    }

    /// Wrap a matrix that is Hermitian and PSD by construction, fixing only
    /// the trace. Callers must guarantee the spectral invariants.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let dim = matrix.rows();
        debug_assert!(matrix.hermiticity_deviation() < 1e-10);
        let trace = matrix.trace().re;
        let matrix = if trace != 1.0 {
            matrix.scale(C64::new(1.0 / trace, 0.0))
        } else {
            matrix
        };
        DensityMatrix { dim, matrix }
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(herm_eig(&self.matrix, tol::HERMITICITY)?.eigenvalues)
    }

    /// Number of eigenvalues above the rank threshold.
    pub fn rank(&self) -> Result<usize> {
        Ok(self
            .spectrum()?
            .iter()
            .filter(|&&x| x > tol::RANK_THRESHOLD)
            .count())
    }
}

impl PureState {
    /// Validate a unit vector.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::dims("pure state needs at least one amplitude"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::dims("non-finite amplitude"));
        }
        let deviation = (vec_norm(&amplitudes) - 1.0).abs();
        if deviation > tol::PURE_NORM {
            return Err(Error::NotNormalized { deviation, tolerance: tol::PURE_NORM });
        }
        Ok(PureState { dim: amplitudes.len(), amplitudes })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn from_unnormalized(v: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&v);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::dims("cannot normalize a zero or non-finite vector"));
        }
        let dim = v.len();
        let amplitudes = v.into_iter().map(|z| z / norm).collect();
        Ok(PureState { dim, amplitudes })
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[k] = C64::new(1.0, 0.0);
        PureState { dim, amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        crate::mat::vec_inner(&self.amplitudes, &other.amplitudes)
    }
}

impl Purification {
    /// Wrap an environment⊗system vector; checks the length factorization.
    pub fn new(dim_e: usize, dim_q: usize, vector: PureState) -> Result<Self> {
        if vector.dim() != dim_e * dim_q {
            return Err(Error::dims(format!(
                "purification vector has length {}, expected {}·{}",
                vector.dim(),
                dim_e,
                dim_q
            )));
        }
        Ok(Purification { dim_e, dim_q, vector })
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn dim_q(&self) -> usize {
        self.dim_q
    }

    pub fn vector(&self) -> &PureState {
        &self.vector
    }

    /// `⟨self|other⟩` of the underlying composite vectors.
    pub fn inner(&self, other: &Purification) -> C64 {
        self.vector.inner(&other.vector)
    }
}

/// Validate an arbitrary matrix as a density matrix.
///
/// Deviations up to `tol` are repaired (symmetrization, spectral clip of
/// negative rounding debris, trace renormalization); anything larger is
/// rejected with the measured deviation.
pub fn validate_density(m: &ComplexMatrix, tol_param: f64) -> Result<DensityMatrix> {
    validate_density_with_report(m, tol_param).map(|(state, _)| state)
}

/// As [`validate_density`], and also report what was repaired.
pub fn validate_density_with_report(
    m: &ComplexMatrix,
    tol_param: f64,
) -> Result<(DensityMatrix, ValidationReport)> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "density matrix must be square, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut report = ValidationReport::default();

    report.hermiticity_deviation = m.hermiticity_deviation();
    if report.hermiticity_deviation > tol_param {
        return Err(Error::NotHermitian {
            deviation: report.hermiticity_deviation,
            tolerance: tol_param,
        });
    }
    let herm = m.hermitize();

    let trace = herm.trace().re;
    report.trace_deviation = (trace - 1.0).abs();
    if report.trace_deviation > tol_param {
        return Err(Error::BadTrace {
            trace,
            deviation: report.trace_deviation,
            tolerance: tol_param,
        });
    }

    let eig = herm_eig(&herm, tol::HERMITICITY)?;
    let min_eig = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min_eig < -tol_param {
        return Err(Error::NotPsd { min_eigenvalue: min_eig, tolerance: tol_param });
    }

    let matrix = if min_eig < 0.0 {
        // reconstruct with the negative debris clipped to zero
        report.spectrum_clipped = true;
        report.clipped_negativity = -min_eig;
        let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
        eig.eigenvectors
            .mul(&ComplexMatrix::diag(&clipped))
            .mul(&eig.eigenvectors.adjoint())
            .hermitize()
    } else {
        herm
    };

    Ok((DensityMatrix::from_trusted(matrix), report))
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::BadDistribution { detail: "empty distribution".into() });
    }
    if let Some(&x) = p.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::BadDistribution { detail: format!("negative or non-finite weight {x}") });
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol::DENSITY_VALIDATION {
        return Err(Error::BadDistribution { detail: format!("weights sum to {sum}, expected 1") });
    }
    Ok(())
}

/// Eigenvalues (descending) with phase-canonical eigenvector columns.
///
/// Each eigenvector's first component of modulus above `1e-12` is rotated to
/// the positive real axis, making the basis — and everything derived from it
/// — a deterministic function of the input matrix.
pub(crate) fn canonical_eig_descending(rho: &DensityMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let eig = herm_eig(rho.matrix(), tol::HERMITICITY)?;
    let d = rho.dim();
    let mut values = Vec::with_capacity(d);
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (dst, src) in (0..d).rev().enumerate() {
        values.push(eig.eigenvalues[src]);
        let mut col = eig.eigenvectors.column(src);
        if let Some(lead) = col.iter().find(|z| z.norm() > 1e-12) {
            let phase = lead / lead.norm();
            let correction = phase.conj();
            for z in col.iter_mut() {
                *z *= correction;
            }
        }
        vectors.set_column(dst, &col);
    }
    Ok((values, vectors))
}

/// Build the canonical purification from descending eigendata.
pub(crate) fn purification_from_eig(
    values: &[f64],
    vectors: &ComplexMatrix,
    dim_e: usize,
) -> Result<Purification> {
    let dim_q = vectors.rows();
    let rank = values.iter().filter(|&&p| p > tol::RANK_THRESHOLD).count();
    if dim_e < rank {
        return Err(Error::EnvTooSmall { dim_e, rank });
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); dim_e * dim_q];
    for (e, &p) in values.iter().enumerate().take(dim_e.min(dim_q)) {
        // eigenvalues below the spectral floor are rounding debris of exact
        // zeros; their square roots must not leak into the vector
        if p <= tol::SPECTRAL_FLOOR {
            continue;
        }
        let root = p.sqrt();
        let col = vectors.column(e);
        for q in 0..dim_q {
            amplitudes[composite_index(e, q, dim_q)] = col[q] * root;
        }
    }
    let vector = PureState::from_unnormalized(amplitudes)?;
    Purification::new(dim_e, dim_q, vector)
}

/// Canonical purification of `rho` on an environment of dimension `dim_e`.
///
/// Writes `Σ_e √p_e |e⟩⊗|u_e⟩` over the descending phase-canonical
/// eigenbasis; fails with [`Error::EnvTooSmall`] when the environment cannot
/// hold the state's rank.
pub fn standard_purification(rho: &DensityMatrix, dim_e: usize) -> Result<Purification> {
    let (values, vectors) = canonical_eig_descending(rho)?;
    purification_from_eig(&values, &vectors, dim_e)
}

/// Reduced system state `tr_E |v⟩⟨v|` of a purification.
pub fn reduce(p: &Purification) -> DensityMatrix {
    let (dim_e, dim_q) = (p.dim_e(), p.dim_q());
    let amp = p.vector().amplitudes();
    let mut m = ComplexMatrix::zeros(dim_q, dim_q);
    for q in 0..dim_q {
        for q2 in 0..dim_q {
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..dim_e {
                acc += amp[composite_index(e, q, dim_q)]
                    * amp[composite_index(e, q2, dim_q)].conj();
            }
            m.set(q, q2, acc);
        }
    }
    // a Gram matrix of sub-vectors: Hermitian and PSD by construction
    DensityMatrix::from_trusted(m.hermitize())
}

/// Seeded random density matrix of the given rank (Wishart construction
/// `GG†/tr` with `G` a `dim×rank` complex Gaussian matrix).
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::BadRank { rank, max: dim });
    }
    let mut rng = Rng::new(seed);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| rng.next_complex_gaussian());
    let m = g.mul(&g.adjoint()).hermitize();
    Ok(DensityMatrix::from_trusted(m))
}

/// Seeded random pure state (normalized complex Gaussian vector).
pub fn random_pure(dim: usize, seed: u64) -> PureState {
    let mut rng = Rng::new(seed);
    let v: Vec<C64> = (0..dim).map(|_| rng.next_complex_gaussian()).collect();
    PureState::from_unnormalized(v).expect("gaussian vector is nonzero")
}

/// Seeded Haar-distributed unitary.
///
/// Gram–Schmidt of a complex Ginibre matrix with the R-diagonal rotated
/// positive real — the invariant-measure construction, fixed so equal seeds
/// give bit-identical matrices.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = Rng::new(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.next_complex_gaussian());
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        crate::mat::project_out(&mut v, &cols);
        let norm = vec_norm(&v);
        assert!(norm > 1e-300, "degenerate Ginibre sample");
        for x in v.iter_mut() {
            *x /= norm;
        }
        crate::mat::project_out(&mut v, &cols);
        let norm = vec_norm(&v);
        for x in v.iter_mut() {
            *x /= norm;
        }
        // rotate so the R-factor diagonal entry ⟨v|g_j⟩ is real positive
        let r_diag = crate::mat::vec_inner(&v, &g.column(j));
        if r_diag.norm() > 0.0 {
            let phase = (r_diag / r_diag.norm()).conj();
            for x in v.iter_mut() {
                *x *= phase;
            }
        }
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        u.set_column(j, col);
    }
    u
}
