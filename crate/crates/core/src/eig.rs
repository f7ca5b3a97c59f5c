//! Hermitian eigendecomposition via cyclic complex Jacobi rotations.
//!
//! The solver targets small dense matrices (dim ≤ 64). Each sweep visits
//! every upper-triangle pivot once and annihilates it with a complex Givens
//! rotation; convergence is declared when the off-diagonal Frobenius mass
//! drops below `EIG_CONVERGENCE · ‖M‖_F`, after which one polishing sweep
//! drives the residual to the rounding floor so downstream square roots see
//! eigenvalues of exact-rank-deficient inputs as clean zeros.

use crate::error::{Error, Result};
use crate::mat::{C64, ComplexMatrix};
use crate::tol;

/// Eigenvalues (ascending) with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermEigResult {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

/// Off-diagonal Frobenius mass of a square matrix.
fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One cyclic sweep of complex Jacobi rotations over the upper triangle.
///
/// `a` is kept Hermitian; `v` accumulates the rotations so that on exit
/// `v_in · J = v_out` and `a_out = J† a_in J`.
fn jacobi_sweep(a: &mut ComplexMatrix, v: &mut ComplexMatrix) {
    let n = a.rows();
    for p in 0..n {
        for q in (p + 1)..n {
            let apq = a.get(p, q);
            let abs_apq = apq.norm();
            if abs_apq == 0.0 {
                continue;
            }
            // rotation angle: zero A[p][q] with tan θ = t, phase ph = A[p][q]/|A[p][q]|
            let ph = apq / abs_apq;
            let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * abs_apq);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            let s_ph = ph * s;

            // diagonal update is exact in the rotated plane
            let app = a.get(p, p).re - t * abs_apq;
            let aqq = a.get(q, q).re + t * abs_apq;
            a.set(p, p, C64::new(app, 0.0));
            a.set(q, q, C64::new(aqq, 0.0));
            a.set(p, q, C64::new(0.0, 0.0));
            a.set(q, p, C64::new(0.0, 0.0));

            // remaining rows/columns: A ← J† A J with J supported on {p,q}
            for j in 0..n {
                if j == p || j == q {
                    continue;
                }
                let ajp = a.get(j, p);
                let ajq = a.get(j, q);
                let new_jp = ajp * c - ajq * s_ph.conj();
                let new_jq = ajp * s_ph + ajq * c;
                a.set(j, p, new_jp);
                a.set(j, q, new_jq);
                a.set(p, j, new_jp.conj());
                a.set(q, j, new_jq.conj());
            }

            // eigenvector accumulation V ← V·J
            for j in 0..n {
                let vjp = v.get(j, p);
                let vjq = v.get(j, q);
                v.set(j, p, vjp * c - vjq * s_ph.conj());
                v.set(j, q, vjp * s_ph + vjq * c);
            }
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `tol` bounds the accepted hermiticity deviation `‖M − M†‖_F` relative to
/// `max(1, ‖M‖_F)`; the input is symmetrized before iterating so the result
/// is exactly Hermitian-consistent.
pub fn herm_eig(m: &ComplexMatrix, tol: f64) -> Result<HermEigResult> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "eigendecomposition needs a square matrix, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.fro_norm().max(1.0);
    let deviation = m.hermiticity_deviation();
    if deviation > tol * scale {
        return Err(Error::NotHermitian { deviation, tolerance: tol * scale });
    }

    let n = m.rows();
    let mut a = m.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol::EIG_CONVERGENCE * m.fro_norm();

    let mut converged = false;
    for _ in 0..tol::EIG_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        jacobi_sweep(&mut a, &mut v);
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence {
            context: "jacobi eigensolver",
            iterations: tol::EIG_MAX_SWEEPS,
            residual: off_diagonal_norm(&a),
        });
    }
    // polishing sweep: quadratic convergence takes the off-mass from the stop
    // threshold to the rounding floor, which downstream rank decisions rely on
    jacobi_sweep(&mut a, &mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &v.column(src));
    }
    Ok(HermEigResult { eigenvalues, eigenvectors })
}

/// Positive-semidefinite square root `R` with `R·R ≈ M`.
///
/// Eigenvalues inside the window `(−thr, thr)` with `thr = tol·max(1, λ_max)`
/// are treated as exact zeros — rounding debris in a singular direction must
/// not survive the square root. Anything below `−thr` is a genuine negativity
/// and is rejected.
pub fn psd_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(m, tol::HERMITICITY.max(tol))?;
    let lam_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let threshold = tol * lam_max.max(1.0);
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .filter(|&&x| x < -threshold)
        .min_by(|a, b| a.total_cmp(b))
    {
        return Err(Error::NotPsd { min_eigenvalue: min, tolerance: threshold });
    }
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= threshold {
            continue;
        }
        let root = lam.sqrt();
        let col = eig.eigenvectors.column(k);
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + col[i] * col[j].conj() * root;
                out.set(i, j, v);
            }
        }
    }
    Ok(out.hermitize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::vec_inner;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_comes_back_sorted_with_permuted_identity_vectors() {
        let m = ComplexMatrix::diag(&[3.0, 1.0, 2.0]);
        let eig = herm_eig(&m, tol::HERMITICITY).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        // eigenvector of eigenvalue 1.0 is e₁, of 2.0 is e₂, of 3.0 is e₀
        assert_eq!(eig.eigenvectors.column(0), vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(eig.eigenvectors.column(1), vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(eig.eigenvectors.column(2), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn pauli_y_eigensystem() {
        // [[0, -i], [i, 0]] has eigenvalues ∓1 with eigenvectors (1, ∓i)/√2
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        )
        .unwrap();
        let eig = herm_eig(&m, tol::HERMITICITY).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            let mv = m.apply_vec(&v);
            let res: f64 = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-14, "residual {res}");
        }
    }

    #[test]
    fn hermitian_2x2_with_known_spectrum() {
        // [[2, 1+i], [1-i, 3]]: trace 5, det 4 → eigenvalues 1 and 4
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)],
        )
        .unwrap();
        let eig = herm_eig(&m, tol::HERMITICITY).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_orthonormality_on_seeded_matrices() {
        for seed in 0..20u64 {
            for dim in 2..=6usize {
                let mut rng = crate::rng::Rng::new(crate::rng::derive_seed(seed, dim as u64));
                let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.next_complex_gaussian());
                let m = g.hermitize();
                let eig = herm_eig(&m, tol::HERMITICITY).unwrap();
                // ascending order
                for w in eig.eigenvalues.windows(2) {
                    assert!(w[0] <= w[1]);
                }
                // orthonormal columns
                for i in 0..dim {
                    for j in 0..dim {
                        let g = vec_inner(&eig.eigenvectors.column(i), &eig.eigenvectors.column(j));
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((g - c(expect, 0.0)).norm() < 1e-13);
                    }
                }
                // V·Λ·V† reconstructs M
                let recon = eig
                    .eigenvectors
                    .mul(&ComplexMatrix::diag(&eig.eigenvalues))
                    .mul(&eig.eigenvectors.adjoint());
                let res = recon.sub(&m).fro_norm();
                assert!(res < 1e-12 * m.fro_norm().max(1.0), "residual {res}");
            }
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected_with_measured_deviation() {
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(1.0, 0.0), c(0.5, 0.0), c(0.1, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        match herm_eig(&m, tol::HERMITICITY) {
            Err(Error::NotHermitian { deviation, .. }) => {
                assert!((deviation - (2f64 * 0.4f64.powi(2)).sqrt()).abs() < 1e-12)
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn non_square_input_is_rejected() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&m, 1e-10), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn psd_sqrt_squares_back_on_seeded_psd_matrices() {
        for seed in 0..10u64 {
            let dim = 4;
            let mut rng = crate::rng::Rng::new(seed);
            let g = ComplexMatrix::from_fn(dim, 2, |_, _| rng.next_complex_gaussian());
            let m = g.mul(&g.adjoint()); // PSD of rank 2
            let r = psd_sqrt(&m, tol::PSD_CLIP).unwrap();
            let res = r.mul(&r).sub(&m).fro_norm();
            assert!(res < 1e-10 * m.fro_norm().max(1.0), "residual {res}");
            assert!(r.hermiticity_deviation() < 1e-13);
        }
    }

    #[test]
    fn psd_sqrt_of_diagonal_is_entrywise_root() {
        let m = ComplexMatrix::diag(&[4.0, 9.0]);
        let r = psd_sqrt(&m, tol::PSD_CLIP).unwrap();
        assert!((r.get(0, 0) - c(2.0, 0.0)).norm() < 1e-14);
        assert!((r.get(1, 1) - c(3.0, 0.0)).norm() < 1e-14);
        assert!(r.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_clips_rounding_scale_negatives_and_rejects_real_ones() {
        let tiny = ComplexMatrix::diag(&[1.0, -1e-12]);
        let r = psd_sqrt(&tiny, tol::PSD_CLIP).unwrap();
        assert_eq!(r.get(1, 1), c(0.0, 0.0));

        let negative = ComplexMatrix::diag(&[1.0, -1e-3]);
        match psd_sqrt(&negative, tol::PSD_CLIP) {
            Err(Error::NotPsd { min_eigenvalue, .. }) => {
                assert!((min_eigenvalue + 1e-3).abs() < 1e-12)
            }
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn zero_matrix_has_zero_root() {
        let m = ComplexMatrix::zeros(3, 3);
        let r = psd_sqrt(&m, tol::PSD_CLIP).unwrap();
        assert_eq!(r.fro_norm(), 0.0);
    }
}
