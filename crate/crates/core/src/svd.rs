//! Singular value decomposition, polar factor, and trace norm.
//!
//! The SVD is obtained from the Hermitian eigendecomposition of `M†M`:
//! right singular vectors are its eigenvectors, singular values the clipped
//! square roots of its eigenvalues, and left singular vectors are recovered
//! as `M·vᵢ/sᵢ` with a Gram–Schmidt completion for the null space. Squaring
//! the matrix costs accuracy near zero, so singular values below
//! `SVD_NULL_CUTOFF · s_max` are reported as exact zeros; for this crate's
//! inputs (spectra are either of order one or exactly zero) that is the
//! behaviour the downstream identities need.

use crate::eig::herm_eig;
use crate::error::{Error, Result};
use crate::mat::{complete_orthonormal_basis, project_out, vec_norm, C64, ComplexMatrix};
use crate::tol;

/// Thin singular value decomposition `M = U·diag(s)·V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Non-increasing, non-negative.
    pub singular_values: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: ComplexMatrix,
}

/// Singular value decomposition of an arbitrary rectangular matrix.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if m.rows() < m.cols() {
        // work on the adjoint and swap the factors back
        let t = svd(&m.adjoint())?;
        return Ok(Svd { u: t.v, singular_values: t.singular_values, v: t.u });
    }
    let n = m.cols();
    let h = m.adjoint().mul(m).hermitize();
    let eig = herm_eig(&h, tol::HERMITICITY)?;

    // descending eigenvalue order
    let order: Vec<usize> = (0..n).rev().collect();
    let s_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x.max(0.0))).sqrt();
    let cutoff = tol::SVD_NULL_CUTOFF * s_max;

    let mut singular_values = Vec::with_capacity(n);
    let mut v = ComplexMatrix::zeros(n, n);
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut null_slots = Vec::new();

    for (dst, &src) in order.iter().enumerate() {
        let s = eig.eigenvalues[src].max(0.0).sqrt();
        let vi = eig.eigenvectors.column(src);
        v.set_column(dst, &vi);
        if s > cutoff {
            singular_values.push(s);
            let mut ui = m.apply_vec(&vi);
            for x in ui.iter_mut() {
                *x /= s;
            }
            // re-orthogonalize against earlier columns: eigenvectors of
            // near-degenerate squared values can mix under the division
            project_out(&mut ui, &u_cols);
            let norm = vec_norm(&ui);
            if norm < tol::DEPENDENCE {
                // column collapsed; treat the direction as null
                singular_values.pop();
                singular_values.push(0.0);
                null_slots.push(dst);
                u_cols.push(vec![C64::new(0.0, 0.0); m.rows()]);
                continue;
            }
            for x in ui.iter_mut() {
                *x /= norm;
            }
            u_cols.push(ui);
        } else {
            singular_values.push(0.0);
            null_slots.push(dst);
            u_cols.push(vec![C64::new(0.0, 0.0); m.rows()]);
        }
    }

    if !null_slots.is_empty() {
        let mut basis: Vec<Vec<C64>> =
            u_cols.iter().filter(|c| vec_norm(c) > 0.0).cloned().collect();
        let have = basis.len();
        complete_orthonormal_basis(&mut basis, m.rows(), tol::DEPENDENCE);
        for (extra, &slot) in basis[have..].iter().zip(&null_slots) {
            u_cols[slot] = extra.clone();
        }
    }

    let mut u = ComplexMatrix::zeros(m.rows(), n);
    for (j, col) in u_cols.iter().enumerate() {
        u.set_column(j, col);
    }
    Ok(Svd { u, singular_values, v })
}

/// Unitary polar factor `W = U·V†` of a square matrix; `W†M` is PSD.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "polar factor needs a square matrix, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    let d = svd(m)?;
    Ok(d.u.mul(&d.v.adjoint()))
}

/// Trace norm `‖M‖₁ = Σ sᵢ`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{outer, vec_inner};
    use crate::rng::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = Rng::new(seed);
        ComplexMatrix::from_fn(rows, cols, |_, _| rng.next_complex_gaussian())
    }

    fn reconstruction_residual(m: &ComplexMatrix, d: &Svd) -> f64 {
        let k = d.singular_values.len();
        let mut recon = ComplexMatrix::zeros(m.rows(), m.cols());
        for i in 0..k {
            let term = outer(&d.u.column(i), &d.v.column(i)).scale(c(d.singular_values[i], 0.0));
            recon = recon.add(&term);
        }
        recon.sub(m).fro_norm()
    }

    #[test]
    fn svd_reconstructs_seeded_square_matrices() {
        for seed in 0..10u64 {
            let m = random_matrix(3, 3, seed);
            let d = svd(&m).unwrap();
            for w in d.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
            let res = reconstruction_residual(&m, &d);
            assert!(res < 1e-10 * m.fro_norm().max(1.0), "seed {seed}: residual {res}");
            assert!(d.u.unitarity_deviation() < 1e-12);
            assert!(d.v.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn svd_handles_rectangular_shapes_both_ways() {
        for &(rows, cols) in &[(4usize, 2usize), (2, 4)] {
            let m = random_matrix(rows, cols, 77);
            let d = svd(&m).unwrap();
            let k = rows.min(cols);
            assert_eq!(d.singular_values.len(), k);
            assert_eq!((d.u.rows(), d.u.cols()), (rows, k));
            assert_eq!((d.v.rows(), d.v.cols()), (cols, k));
            let res = reconstruction_residual(&m, &d);
            assert!(res < 1e-10 * m.fro_norm().max(1.0), "residual {res}");
        }
    }

    #[test]
    fn rank_one_outer_product_has_single_singular_value() {
        // |a⟩⟨b| with unit a, b has s = (1, 0, 0)
        let a = vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let b = vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
        let m = outer(&a, &b);
        let d = svd(&m).unwrap();
        assert!((d.singular_values[0] - 1.0).abs() < 1e-12);
        assert_eq!(d.singular_values[1], 0.0);
        assert_eq!(d.singular_values[2], 0.0);
        let res = reconstruction_residual(&m, &d);
        assert!(res < 1e-12, "residual {res}");
        // completed null columns still orthonormal
        assert!(d.u.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn diagonal_singular_values_are_absolute_values() {
        let m = ComplexMatrix::diag(&[-2.0, 0.5, 0.0]);
        let d = svd(&m).unwrap();
        assert!((d.singular_values[0] - 2.0).abs() < 1e-13);
        assert!((d.singular_values[1] - 0.5).abs() < 1e-13);
        assert_eq!(d.singular_values[2], 0.0);
    }

    #[test]
    fn polar_factor_is_unitary_and_makes_adjoint_product_psd() {
        for seed in 0..8u64 {
            let m = random_matrix(4, 4, 1000 + seed);
            let w = polar_unitary(&m).unwrap();
            assert!(w.unitarity_deviation() < 1e-11, "unitarity");
            let p = w.adjoint().mul(&m).hermitize();
            let eig = herm_eig(&p, tol::HERMITICITY).unwrap();
            assert!(
                eig.eigenvalues.iter().all(|&x| x > -1e-10 * m.fro_norm().max(1.0)),
                "W†M eigenvalues {:?}",
                eig.eigenvalues
            );
        }
    }

    #[test]
    fn polar_factor_of_unitary_is_itself() {
        // a unitary already is its own polar factor
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![
                c(inv_sqrt2, 0.0),
                c(inv_sqrt2, 0.0),
                c(0.0, inv_sqrt2),
                c(0.0, -inv_sqrt2),
            ],
        )
        .unwrap();
        let w = polar_unitary(&m).unwrap();
        assert!(w.sub(&m).fro_norm() < 1e-12);
    }

    #[test]
    fn polar_rejects_rectangular_input() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(polar_unitary(&m), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn trace_norm_of_diagonal_is_abs_sum() {
        let m = ComplexMatrix::diag(&[3.0, -4.0]);
        assert!((trace_norm(&m).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant() {
        for seed in 0..5u64 {
            let m = random_matrix(3, 3, 50 + seed);
            let w = polar_unitary(&random_matrix(3, 3, 90 + seed)).unwrap();
            let tn = trace_norm(&m).unwrap();
            let tn_rot = trace_norm(&w.mul(&m)).unwrap();
            assert!((tn - tn_rot).abs() < 1e-10 * tn.max(1.0));
        }
    }

    #[test]
    fn singular_vectors_stay_orthonormal_under_degeneracy() {
        // M with a doubly degenerate singular value: U must still be orthonormal
        let m = ComplexMatrix::diag(&[2.0, 2.0, 1.0]);
        let d = svd(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let g = vec_inner(&d.u.column(i), &d.u.column(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}
