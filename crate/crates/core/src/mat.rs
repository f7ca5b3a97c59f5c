//! Dense complex matrices and vectors, row-major storage.
//!
//! Dimensions in this crate are small (≤ 64), so everything is a plain
//! `Vec<Complex64>` with no blocking or stride tricks. Composite
//! environment⊗system indices are always `e·dim_q + q`; [`composite_index`]
//! is the only place that encodes that convention.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar type used throughout the crate.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Index of basis vector `|e⟩⊗|q⟩` in an environment-first composite space.
#[inline]
pub fn composite_index(e: usize, q: usize, dim_q: usize) -> usize {
    e * dim_q + q
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        m
    }

    /// Build from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from row-major data; rejects length mismatches and non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "{}×{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if let Some(z) = data.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::dims(format!("non-finite matrix entry {z}")));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, C64::new(x, 0.0));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value;
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Overwrite column `j`.
    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    /// Matrix product.
    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: C64) -> ComplexMatrix {
        let data = self.data.iter().map(|a| a * factor).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix-vector product.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "vector length must match column count");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Trace (square matrices only).
    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(M + M†)/2`; exact for Hermitian input.
    pub fn hermitize(&self) -> ComplexMatrix {
        assert!(self.is_square(), "hermitize requires a square matrix");
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// `‖M − M†‖_F`.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square(), "hermiticity requires a square matrix");
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                sum += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// `‖U†U − I‖_F`; how far `U` is from an isometry on its columns.
    pub fn unitarity_deviation(&self) -> f64 {
        self.adjoint().mul(self).sub(&ComplexMatrix::identity(self.cols)).fro_norm()
    }

    /// Solve `A·X = B` by Gaussian elimination with partial pivoting.
    ///
    /// Intended for the tiny well-conditioned systems this crate produces
    /// (Cayley steps); not a general-purpose solver.
    pub(crate) fn solve(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !self.is_square() || self.rows != rhs.rows {
            return Err(Error::dims(format!(
                "solve needs square A and matching B rows, got {}×{} and {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a.get(i, k).norm().total_cmp(&a.get(j, k).norm()))
                .expect("non-empty pivot range");
            let pval = a.get(pivot, k);
            if pval.norm() == 0.0 {
                return Err(Error::dims("singular system in linear solve".to_string()));
            }
            if pivot != k {
                for j in 0..n {
                    let (x, y) = (a.get(k, j), a.get(pivot, j));
                    a.set(k, j, y);
                    a.set(pivot, j, x);
                }
                for j in 0..b.cols {
                    let (x, y) = (b.get(k, j), b.get(pivot, j));
                    b.set(k, j, y);
                    b.set(pivot, j, x);
                }
            }
            for i in (k + 1)..n {
                let factor = a.get(i, k) / a.get(k, k);
                if factor == ZERO {
                    continue;
                }
                for j in k..n {
                    let v = a.get(i, j) - factor * a.get(k, j);
                    a.set(i, j, v);
                }
                for j in 0..b.cols {
                    let v = b.get(i, j) - factor * b.get(k, j);
                    b.set(i, j, v);
                }
            }
        }
        // back substitution
        let mut x = ComplexMatrix::zeros(n, b.cols);
        for j in 0..b.cols {
            for i in (0..n).rev() {
                let mut acc = b.get(i, j);
                for k in (i + 1)..n {
                    acc -= a.get(i, k) * x.get(k, j);
                }
                x.set(i, j, acc / a.get(i, i));
            }
        }
        Ok(x)
    }
}

/// Kronecker product with the left factor indexing the slow (environment) axis.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let av = a.get(i, j);
            if av == ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, av * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors, environment-first.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Trace out the leading (environment) factor of a `dim_e·dim_q` square matrix.
pub fn partial_trace_env(m: &ComplexMatrix, dim_e: usize, dim_q: usize) -> Result<ComplexMatrix> {
    check_composite(m, dim_e, dim_q)?;
    let mut out = ComplexMatrix::zeros(dim_q, dim_q);
    for q in 0..dim_q {
        for q2 in 0..dim_q {
            let mut acc = ZERO;
            for e in 0..dim_e {
                acc += m.get(composite_index(e, q, dim_q), composite_index(e, q2, dim_q));
            }
            out.set(q, q2, acc);
        }
    }
    Ok(out)
}

/// Trace out the trailing (system) factor of a `dim_e·dim_q` square matrix.
pub fn partial_trace_sys(m: &ComplexMatrix, dim_e: usize, dim_q: usize) -> Result<ComplexMatrix> {
    check_composite(m, dim_e, dim_q)?;
    let mut out = ComplexMatrix::zeros(dim_e, dim_e);
    for e in 0..dim_e {
        for e2 in 0..dim_e {
            let mut acc = ZERO;
            for q in 0..dim_q {
                acc += m.get(composite_index(e, q, dim_q), composite_index(e2, q, dim_q));
            }
            out.set(e, e2, acc);
        }
    }
    Ok(out)
}

fn check_composite(m: &ComplexMatrix, dim_e: usize, dim_q: usize) -> Result<()> {
    let dim = dim_e * dim_q;
    if !m.is_square() || m.rows() != dim {
        return Err(Error::dims(format!(
            "partial trace expects a {dim}×{dim} matrix for dims {dim_e}⊗{dim_q}, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn vec_inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product needs equal lengths");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|a⟩⟨b|`.
pub fn outer(a: &[C64], b: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

/// Subtract from `v` its projections onto each (orthonormal) basis vector.
pub(crate) fn project_out(v: &mut [C64], basis: &[Vec<C64>]) {
    for b in basis {
        let coeff = vec_inner(b, v);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= coeff * y;
        }
    }
}

/// Extend `accepted` to an orthonormal basis of `C^dim` by Gram–Schmidt over
/// the standard basis, skipping candidates whose residual norm falls below
/// `skip_tol`. One re-orthogonalization pass keeps the result orthonormal to
/// machine precision.
pub(crate) fn complete_orthonormal_basis(
    accepted: &mut Vec<Vec<C64>>,
    dim: usize,
    skip_tol: f64,
) {
    for k in 0..dim {
        if accepted.len() == dim {
            break;
        }
        let mut cand = vec![ZERO; dim];
        cand[k] = ONE;
        project_out(&mut cand, accepted);
        let norm = vec_norm(&cand);
        if norm < skip_tol {
            continue;
        }
        for x in cand.iter_mut() {
            *x /= norm;
        }
        // second pass removes the O(ε) residue the first projection left behind
        project_out(&mut cand, accepted);
        let norm = vec_norm(&cand);
        if norm < skip_tol {
            continue;
        }
        for x in cand.iter_mut() {
            *x /= norm;
        }
        accepted.push(cand);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_multiplication_is_neutral() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, (i as f64) - 1.0));
        let id = ComplexMatrix::identity(3);
        assert_eq!(a.mul(&id), a);
        assert_eq!(id.mul(&a), a);
    }

    #[test]
    fn from_row_major_rejects_bad_lengths_and_nonfinite() {
        let short = ComplexMatrix::from_row_major(2, 2, vec![ONE; 3]);
        assert!(matches!(short, Err(Error::DimensionMismatch { .. })));
        let nan = ComplexMatrix::from_row_major(1, 2, vec![ONE, c(f64::NAN, 0.0)]);
        assert!(matches!(nan, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_row_major(1, 2, vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let ad = a.adjoint();
        assert_eq!(ad.rows(), 2);
        assert_eq!(ad.get(0, 0), c(1.0, -2.0));
        assert_eq!(ad.get(1, 0), c(3.0, 4.0));
    }

    #[test]
    fn kron_ordering_is_environment_first() {
        // kron(A, B) must place A on the slow index: entry ((i·rB+k),(j·cB+l)).
        let a = ComplexMatrix::from_row_major(2, 2, vec![ONE, ZERO, ZERO, c(2.0, 0.0)]).unwrap();
        let b = ComplexMatrix::from_row_major(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        let k = kron(&a, &b);
        assert_eq!(k.get(0, 1), ONE);
        assert_eq!(k.get(2, 3), c(2.0, 0.0));
        assert_eq!(k.get(3, 2), c(2.0, 0.0));
        assert_eq!(k.get(0, 3), ZERO);
    }

    #[test]
    fn kron_vec_matches_composite_index() {
        let e = vec![ZERO, ONE]; // |1⟩ of the environment
        let q = vec![c(0.6, 0.0), c(0.8, 0.0)];
        let v = kron_vec(&e, &q);
        assert_eq!(v[composite_index(1, 0, 2)], c(0.6, 0.0));
        assert_eq!(v[composite_index(1, 1, 2)], c(0.8, 0.0));
        assert_eq!(v[composite_index(0, 0, 2)], ZERO);
    }

    #[test]
    fn partial_traces_are_complementary_on_products() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c((1 + i + j) as f64, (i as f64) - (j as f64)));
        let a = a.hermitize();
        let b = ComplexMatrix::from_fn(3, 3, |i, j| c((i * j) as f64 + 1.0, 0.0));
        let b = b.hermitize();
        let prod = kron(&a, &b);
        let tr_env = partial_trace_env(&prod, 2, 3).unwrap();
        let tr_sys = partial_trace_sys(&prod, 2, 3).unwrap();
        // tr_E(A⊗B) = tr(A)·B and tr_Q(A⊗B) = tr(B)·A
        let expect_env = b.scale(a.trace());
        let expect_sys = a.scale(b.trace());
        assert!(tr_env.sub(&expect_env).fro_norm() < 1e-12);
        assert!(tr_sys.sub(&expect_sys).fro_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_wrong_shapes() {
        let m = ComplexMatrix::identity(5);
        assert!(matches!(
            partial_trace_env(&m, 2, 2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(2.0, 1.0), c(0.0, -1.0), c(1.0, 0.0), c(3.0, 0.0)],
        )
        .unwrap();
        let x = ComplexMatrix::from_row_major(2, 1, vec![c(1.0, -2.0), c(0.5, 0.25)]).unwrap();
        let b = a.mul(&x);
        let got = a.solve(&b).unwrap();
        assert!(got.sub(&x).fro_norm() < 1e-12);
    }

    #[test]
    fn completion_builds_a_full_orthonormal_basis() {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut basis = vec![vec![c(inv_sqrt2, 0.0), c(0.0, inv_sqrt2), ZERO]];
        complete_orthonormal_basis(&mut basis, 3, 1e-8);
        assert_eq!(basis.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let g = vec_inner(&basis[i], &basis[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn hermitize_fixes_small_asymmetry() {
        let mut a = ComplexMatrix::identity(2);
        a.set(0, 1, c(0.1, 0.2));
        a.set(1, 0, c(0.1, -0.2 + 1e-13));
        let h = a.hermitize();
        assert!(h.hermiticity_deviation() < 1e-15);
        assert!(a.hermiticity_deviation() > 1e-14);
    }
}
