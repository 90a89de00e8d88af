//! Dense complex linear algebra primitives: matrices, Kronecker products,
//! partial traces, operator vectorization, and a Jacobi eigensolver for
//! Hermitian matrices.
//!
//! Composite indices follow a single convention throughout the crate: the
//! product-basis vector |j>_1 |i>_2 of H1 (x) H2 lives at flat index
//! `j * dim2 + i`, i.e. the first tensor factor is the slow index.

use num_complex::Complex64;

use crate::error::{shape, Error, Result};

/// Default absolute tolerance for Hermiticity and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Sweep cap for the Jacobi eigensolver.
const JACOBI_MAX_SWEEPS: usize = 100;

/// The eigensolver stops once the off-diagonal Frobenius mass drops below
/// this factor times the Frobenius norm of the input.
const JACOBI_CONVERGENCE_FACTOR: f64 = 1e-13;

/// Dense row-major complex matrix.
///
/// Element (r, c) lives at `data[r * cols + c]`. Entries admitted through
/// [`ComplexMatrix::new`] are checked to be finite; computational
/// constructors trust their inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix data length",
                expected: (rows * cols).to_string(),
                got: data.len().to_string(),
            });
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// The d-dimensional identity.
    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Fills a matrix entry by entry from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Convenience constructor from real-valued rows.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let nr = rows.len();
        let nc = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        Self::from_fn(nr, nc, |r, c| Complex64::new(rows[r][c], 0.0))
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference |self - other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_dist(&self, other: &Self) -> f64 {
        self.sub(other).frobenius_norm()
    }

    /// Largest entry magnitude of `self - self†`. Zero for Hermitian input.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Kronecker product. The result has shape
    /// (self.rows * other.rows, self.cols * other.cols) and the composite
    /// row index is `r_self * other.rows + r_other` (likewise for columns).
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for ra in 0..self.rows {
            for ca in 0..self.cols {
                let a = self.get(ra, ca);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for rb in 0..other.rows {
                    for cb in 0..other.cols {
                        out.set(
                            ra * other.rows + rb,
                            ca * other.cols + cb,
                            a * other.get(rb, cb),
                        );
                    }
                }
            }
        }
        out
    }
}

/// Kronecker product as a free function; see [`ComplexMatrix::tensor`].
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Which tensor factor [`partial_trace`] sums out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of a square matrix on a product space of side
/// `dim1 * dim2` (composite row index `i1 * dim2 + i2`).
///
/// Tracing out `Second` returns the dim1 x dim1 matrix with entries
/// `sum_k M[(i,k),(j,k)]`; tracing out `First` returns the dim2 x dim2
/// matrix with entries `sum_i M[(i,k),(i,l)]`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim1: usize,
    dim2: usize,
    traced: Subsystem,
) -> Result<ComplexMatrix> {
    let side = dim1 * dim2;
    if !m.is_square() || m.rows() != side {
        return Err(Error::DimensionMismatch {
            context: "partial trace input",
            expected: shape(side, side),
            got: shape(m.rows(), m.cols()),
        });
    }
    let out = match traced {
        Subsystem::Second => ComplexMatrix::from_fn(dim1, dim1, |i, j| {
            (0..dim2)
                .map(|k| m.get(i * dim2 + k, j * dim2 + k))
                .sum()
        }),
        Subsystem::First => ComplexMatrix::from_fn(dim2, dim2, |k, l| {
            (0..dim1)
                .map(|i| m.get(i * dim2 + k, i * dim2 + l))
                .sum()
        }),
    };
    Ok(out)
}

/// Stacks a d_out x d_in operator C into the column vector |C>> with
/// component C[i][j] at flat index `j * d_out + i`.
pub fn vectorize(c: &ComplexMatrix) -> ComplexMatrix {
    let (d_out, d_in) = (c.rows(), c.cols());
    let mut v = ComplexMatrix::zeros(d_in * d_out, 1);
    for i in 0..d_out {
        for j in 0..d_in {
            v.set(j * d_out + i, 0, c.get(i, j));
        }
    }
    v
}

/// Exact inverse of [`vectorize`]: unpacks a length d_in * d_out column
/// vector into the d_out x d_in operator it came from.
pub fn devectorize(v: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<ComplexMatrix> {
    if v.cols() != 1 || v.rows() != d_in * d_out {
        return Err(Error::DimensionMismatch {
            context: "devectorize input",
            expected: shape(d_in * d_out, 1),
            got: shape(v.rows(), v.cols()),
        });
    }
    Ok(ComplexMatrix::from_fn(d_out, d_in, |i, j| {
        v.get(j * d_out + i, 0)
    }))
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted descending; column k of `eigenvectors`
/// is the unit eigenvector paired with `eigenvalues[k]`. Within degenerate
/// eigenspaces the vector choice is arbitrary and callers must not rely on
/// a particular one.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    /// Rebuilds `sum_k lambda_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |a, b| {
            (0..self.eigenvalues.len())
                .map(|k| v.get(a, k) * v.get(b, k).conj() * self.eigenvalues[k])
                .sum()
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self
            .eigenvalues
            .last()
            .expect("decomposition of a nonempty matrix")
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input must be Hermitian within `tol` (largest entry of |m - m†|);
/// it is symmetrized before iterating so the result corresponds to
/// (m + m†)/2. Convergence is declared when the off-diagonal Frobenius
/// mass falls below 1e-13 times the input norm; 100 sweeps is the cap.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "eigendecomposition input",
            expected: "square".to_string(),
            got: shape(m.rows(), m.cols()),
        });
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian {
            residual: defect,
            tol,
        });
    }

    let n = m.rows();
    // Work on the Hermitian part so a tolerated asymmetry cannot leak in.
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| (m.get(r, c) + m.get(c, r).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_CONVERGENCE_FACTOR * m.frobenius_norm();

    let mut off = off_diagonal_norm(&a);
    let mut converged = off <= threshold;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
        converged = off <= threshold;
    }
    if !converged {
        return Err(Error::EigDidNotConverge {
            sweeps: JACOBI_MAX_SWEEPS,
            residual: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps Jacobi output order within ties.
    order.sort_by(|&i, &j| a.get(j, j).re.partial_cmp(&a.get(i, i).re).unwrap());
    let eigenvalues = order.iter().map(|&i| a.get(i, i).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += a.get(r, c).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating a[p][q], updating a <- U† a U and
/// accumulating v <- v U. In the (p,q) plane U = [[e^{i phi} c, e^{i phi} s],
/// [-s, c]] with phi the phase of a[p][q] and (c, s) the classic real
/// rotation for the phase-stripped 2x2 block.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let up = phase * c; // U[p][p]
    let uq = phase * s; // U[p][q]

    let n = a.rows();
    // A <- A U (columns p, q), then A <- U† A (rows p, q).
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * up - aiq * s);
        a.set(i, q, aip * uq + aiq * c);
    }
    let upc = up.conj();
    let uqc = uq.conj();
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * upc - aqj * s);
        a.set(q, j, apj * uqc + aqj * c);
    }
    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * up - viq * s);
        v.set(i, q, vip * uq + viq * c);
    }

    // The rotation zeroes the pivot and keeps the diagonal real; pin both
    // against roundoff drift.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dp = a.get(p, p).re;
    let dq = a.get(q, q).re;
    a.set(p, p, Complex64::new(dp, 0.0));
    a.set(q, q, Complex64::new(dq, 0.0));
}

/// Outcome of a positive-semidefiniteness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub ok: bool,
    pub min_eigenvalue: f64,
}

/// Checks positive semidefiniteness of a Hermitian matrix: `ok` holds when
/// the smallest eigenvalue is at least `-tol`.
pub fn psd_check(m: &ComplexMatrix, tol: f64) -> Result<PsdReport> {
    let eig = hermitian_eig(m, tol)?;
    let min = eig.min_eigenvalue();
    Ok(PsdReport {
        ok: min >= -tol,
        min_eigenvalue: min,
    })
}
