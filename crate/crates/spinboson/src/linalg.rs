//! Dense complex matrices, sized for the problems this crate actually
//! solves (a few hundred rows). Row-major storage, no views, no BLAS.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance on `max |M - M†|` accepted by [`HermitianOperator::new`].
pub const HERMITICITY_RTOL: f64 = 1e-12;

/// Row-major dense matrix over `Complex64`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Square matrix with the given (complex) diagonal.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = ComplexMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
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

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when every entry has exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let lhs_row = self.row(i);
            // i-k-j order keeps both inner accesses contiguous.
            for (k, &aik) in lhs_row.iter().enumerate() {
                let rhs_row = other.row(k);
                let out_row = out.row_mut(i);
                for (o, &bkj) in out_row.iter_mut().zip(rhs_row) {
                    *o += aik * bkj;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in self.row(i).iter().zip(v) {
                acc += a * b;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Rescales column `j` by `factors[j]` in place.
    pub fn scale_columns(&mut self, factors: &[Complex64]) -> Result<()> {
        if factors.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} column factors for a {}x{} matrix",
                factors.len(),
                self.rows,
                self.cols
            )));
        }
        for i in 0..self.rows {
            for (e, f) in self.row_mut(i).iter_mut().zip(factors) {
                *e *= f;
            }
        }
        Ok(())
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Copy of the sub-block with the given rows and columns, in order.
    pub fn gather(&self, row_idx: &[usize], col_idx: &[usize]) -> ComplexMatrix {
        ComplexMatrix::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self[(row_idx[i], col_idx[j])]
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |self - other|`, the distance used by most checks here.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot compare {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max_ij |M[i][j] - conj(M[j][i])|`; zero iff exactly Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols.min(self.rows) {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Kronecker product, `(a ⊗ b)[i*p + k][j*q + l] = a[i][j] b[k][l]`.
    pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let aij = a[(i, j)];
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

/// A square matrix checked Hermitian at construction.
///
/// The check is `max |M - M†| ≤ HERMITICITY_RTOL * max |M|`, so a matrix
/// assembled from exact symmetric writes always passes and one produced by
/// noisy arithmetic must stay Hermitian to near round-off.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidParameter(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.all_finite() {
            return Err(Error::InvalidParameter(
                "Hermitian operator has non-finite entries".into(),
            ));
        }
        let defect = matrix.hermiticity_defect();
        let scale = matrix.max_abs();
        if defect > HERMITICITY_RTOL * scale {
            return Err(Error::ContractViolation(format!(
                "matrix is not Hermitian: defect {defect:.3e} exceeds {HERMITICITY_RTOL:.0e} * {scale:.3e}"
            )));
        }
        Ok(HermitianOperator { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_matches_hand_computation() {
        // [[1, i], [0, 2]] * [[1, 1], [i, 0]] = [[1 + i*i, 1], [2i, 0]]
        let a = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (0, 1) => c(0.0, 1.0),
            (1, 1) => c(2.0, 0.0),
            _ => c(0.0, 0.0),
        });
        let b = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (0, 1) => c(1.0, 0.0),
            (1, 0) => c(0.0, 1.0),
            _ => c(0.0, 0.0),
        });
        let p = a.mul(&b).unwrap();
        assert_eq!(p[(0, 0)], c(0.0, 0.0));
        assert_eq!(p[(0, 1)], c(1.0, 0.0));
        assert_eq!(p[(1, 0)], c(0.0, 2.0));
        assert_eq!(p[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn mul_rejects_mismatched_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 2);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let ad = a.adjoint();
        assert_eq!(ad.rows(), 3);
        assert_eq!(ad.cols(), 2);
        assert_eq!(ad[(2, 1)], c(1.0, -2.0));
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c((i * 3 + j) as f64, 1.0));
        let id = ComplexMatrix::identity(3);
        assert_eq!(a.mul(&id).unwrap(), a);
        assert_eq!(id.mul(&a).unwrap(), a);
    }

    #[test]
    fn matvec_agrees_with_mul_by_column() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        let v = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 2.0)];
        let got = a.matvec(&v).unwrap();
        let vm = ComplexMatrix::from_fn(3, 1, |i, _| v[i]);
        let want = a.mul(&vm).unwrap();
        for i in 0..3 {
            assert_eq!(got[i], want[(i, 0)]);
        }
    }

    #[test]
    fn kron_of_two_by_two_blocks() {
        let sx = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) }
        });
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let k = ComplexMatrix::kron(&sx, &d);
        // sx ⊗ d swaps the 2x2 diagonal blocks into the off-diagonal.
        assert_eq!(k[(0, 2)], c(1.0, 0.0));
        assert_eq!(k[(1, 3)], c(2.0, 0.0));
        assert_eq!(k[(2, 0)], c(1.0, 0.0));
        assert_eq!(k[(3, 1)], c(2.0, 0.0));
        assert_eq!(k[(0, 0)], c(0.0, 0.0));
        assert_eq!(k.max_abs(), 2.0);
    }

    #[test]
    fn gather_extracts_even_block() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| c((10 * i + j) as f64, 0.0));
        let evens = [0usize, 2];
        let b = a.gather(&evens, &evens);
        assert_eq!(b[(0, 0)], c(0.0, 0.0));
        assert_eq!(b[(0, 1)], c(2.0, 0.0));
        assert_eq!(b[(1, 0)], c(20.0, 0.0));
        assert_eq!(b[(1, 1)], c(22.0, 0.0));
    }

    #[test]
    fn hermitian_wrapper_accepts_exact_and_rejects_skew() {
        let good = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(1.0, -2.0),
            (1, 0) => c(1.0, 2.0),
            _ => c(i as f64, 0.0),
        });
        assert!(HermitianOperator::new(good).is_ok());

        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 1)] = c(1e-3, 0.0);
        assert!(matches!(
            HermitianOperator::new(bad),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn hermitian_wrapper_rejects_non_square_and_non_finite() {
        assert!(matches!(
            HermitianOperator::new(ComplexMatrix::zeros(2, 3)),
            Err(Error::InvalidParameter(_))
        ));
        let mut nan = ComplexMatrix::identity(2);
        nan[(1, 1)] = c(f64::NAN, 0.0);
        assert!(HermitianOperator::new(nan).is_err());
    }

    #[test]
    fn hermiticity_defect_is_scale_relative() {
        // Defect 1e-9 on a matrix of scale 1e6 sits inside the relative gate.
        let mut m = ComplexMatrix::from_diagonal(&[c(1e6, 0.0), c(-1e6, 0.0)]);
        m[(0, 1)] = c(5.0e5, 1e-9);
        m[(1, 0)] = c(5.0e5, 1e-9); // conjugate would have im = -1e-9
        assert!(m.hermiticity_defect() <= 2e-9);
        assert!(HermitianOperator::new(m).is_ok());
    }
}
