//! Channel representations and the conversions between them.
//!
//! A channel mapping a `d_in`-dimensional input space to a `d_out`-dimensional
//! output space is carried either as a [`KrausRepr`] or as its [`ChoiMatrix`].
//! The Choi matrix lives on input (x) output with composite index
//! `j * d_out + i`, input index j slow. Conventions differ across the
//! literature; this one is fixed crate-wide and all tests and file formats
//! pin it.

use num_complex::Complex64;

use crate::error::{shape, Error, Result};
use crate::linalg::{
    devectorize, hermitian_eig, partial_trace, psd_check, vectorize, ComplexMatrix, Subsystem,
    DEFAULT_TOL,
};

/// A channel as a finite list of d_out x d_in Kraus operators.
///
/// Construction does not require trace preservation, so CP-only maps are
/// representable; [`kraus_tp_defect`] measures how far the completeness sum
/// is from the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausRepr {
    d_in: usize,
    d_out: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausRepr {
    pub fn new(d_in: usize, d_out: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::EmptyKrausList);
        }
        for op in &operators {
            if op.rows() != d_out || op.cols() != d_in {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator",
                    expected: shape(d_out, d_in),
                    got: shape(op.rows(), op.cols()),
                });
            }
        }
        Ok(Self {
            d_in,
            d_out,
            operators,
        })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a KrausRepr always holds at least one operator
    }
}

/// A channel as its Choi matrix: a Hermitian square matrix of side
/// `d_in * d_out` on the input (x) output space.
///
/// Hermiticity is enforced at construction; CP and TP membership are
/// diagnostics reported by [`validate_cptp`], not construction invariants,
/// so infeasible iterates can be represented during optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    m: ComplexMatrix,
}

impl ChoiMatrix {
    /// Wraps a matrix as a Choi matrix, checking the side and Hermiticity
    /// within [`DEFAULT_TOL`].
    pub fn new(d_in: usize, d_out: usize, m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(d_in, d_out, m, DEFAULT_TOL)
    }

    /// Same as [`ChoiMatrix::new`] with an explicit Hermiticity tolerance.
    pub fn with_tolerance(
        d_in: usize,
        d_out: usize,
        m: ComplexMatrix,
        tol: f64,
    ) -> Result<Self> {
        let side = d_in * d_out;
        if !m.is_square() || m.rows() != side {
            return Err(Error::DimensionMismatch {
                context: "Choi matrix",
                expected: shape(side, side),
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
        Ok(Self { d_in, d_out, m })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn side(&self) -> usize {
        self.d_in * self.d_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }
}

/// A quantum state: Hermitian, unit trace, positive semidefinite, all
/// within the given tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotDensityMatrix(format!(
                "matrix is {}x{}, not square",
                m.rows(),
                m.cols()
            )));
        }
        let herm = m.hermiticity_defect();
        if herm > tol {
            return Err(Error::NotDensityMatrix(format!(
                "Hermiticity residual {herm:.3e} exceeds {tol:.3e}"
            )));
        }
        let tr = m.trace();
        let tr_err = (tr - Complex64::new(1.0, 0.0)).norm();
        if tr_err > tol {
            return Err(Error::NotDensityMatrix(format!(
                "trace {tr} differs from 1 by {tr_err:.3e}"
            )));
        }
        let psd = psd_check(&m, tol)?;
        if !psd.ok {
            return Err(Error::NotDensityMatrix(format!(
                "minimum eigenvalue {:.3e} is negative",
                psd.min_eigenvalue
            )));
        }
        Ok(Self { m })
    }

    pub fn d(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }
}

/// The matrix unit E^{p,q} with a single 1 at row p, column q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixUnit {
    d: usize,
    p: usize,
    q: usize,
}

impl MatrixUnit {
    pub fn new(d: usize, p: usize, q: usize) -> Result<Self> {
        if p >= d || q >= d {
            return Err(Error::InvalidArgument(format!(
                "matrix unit indices ({p},{q}) out of range for dimension {d}"
            )));
        }
        Ok(Self { d, p, q })
    }

    pub fn to_matrix(self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.d, self.d);
        m.set(self.p, self.q, Complex64::new(1.0, 0.0));
        m
    }
}

/// Applies a channel in Kraus form: `sum_k A_k rho A_k†`.
///
/// Any square d_in x d_in input is accepted, not only density matrices, so
/// linearity arguments and matrix-unit probes work directly.
pub fn apply_kraus(k: &KrausRepr, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.rows() != k.d_in || rho.cols() != k.d_in {
        return Err(Error::DimensionMismatch {
            context: "channel input",
            expected: shape(k.d_in, k.d_in),
            got: shape(rho.rows(), rho.cols()),
        });
    }
    let mut out = ComplexMatrix::zeros(k.d_out, k.d_out);
    for op in &k.operators {
        out = out.add(&op.matmul(rho).matmul(&op.dagger()));
    }
    Ok(out)
}

/// Largest entry of |sum_k A_k† A_k - I|; zero exactly when the
/// representation is trace preserving.
pub fn kraus_tp_defect(k: &KrausRepr) -> f64 {
    let mut sum = ComplexMatrix::zeros(k.d_in, k.d_in);
    for op in &k.operators {
        sum = sum.add(&op.dagger().matmul(op));
    }
    sum.max_abs_diff(&ComplexMatrix::identity(k.d_in))
}

/// Choi matrix of a Kraus representation: `sum_k |A_k>><<A_k|`.
pub fn kraus_to_choi(k: &KrausRepr) -> ChoiMatrix {
    let side = k.d_in * k.d_out;
    let mut m = ComplexMatrix::zeros(side, side);
    for op in &k.operators {
        let v = vectorize(op);
        m = m.add(&v.matmul(&v.dagger()));
    }
    ChoiMatrix::new(k.d_in, k.d_out, m).expect("sum of outer products is Hermitian")
}

/// Choi matrix assembled from the channel's action on matrix units:
/// `sum_{p,q} E^{p,q} (x) apply(E^{p,q})`.
///
/// This is the independent construction used to cross-check
/// [`kraus_to_choi`]; `apply` must accept arbitrary d_in x d_in matrices
/// (matrix units are not density matrices) and return d_out x d_out.
pub fn choi_via_basis_action<F>(mut apply: F, d_in: usize, d_out: usize) -> Result<ChoiMatrix>
where
    F: FnMut(&ComplexMatrix) -> ComplexMatrix,
{
    let side = d_in * d_out;
    let mut m = ComplexMatrix::zeros(side, side);
    for p in 0..d_in {
        for q in 0..d_in {
            let unit = MatrixUnit::new(d_in, p, q)?.to_matrix();
            let image = apply(&unit);
            if image.rows() != d_out || image.cols() != d_out {
                return Err(Error::DimensionMismatch {
                    context: "channel action output",
                    expected: shape(d_out, d_out),
                    got: shape(image.rows(), image.cols()),
                });
            }
            m = m.add(&unit.tensor(&image));
        }
    }
    ChoiMatrix::new(d_in, d_out, m)
}

/// Applies a channel given by its Choi matrix:
/// `E(rho) = tr_1((rho^T (x) I_out) X)`.
pub fn apply_choi(x: &ChoiMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.rows() != x.d_in || rho.cols() != x.d_in {
        return Err(Error::DimensionMismatch {
            context: "channel input",
            expected: shape(x.d_in, x.d_in),
            got: shape(rho.rows(), rho.cols()),
        });
    }
    let lifted = rho.transpose().tensor(&ComplexMatrix::identity(x.d_out));
    partial_trace(&lifted.matmul(&x.m), x.d_in, x.d_out, Subsystem::First)
}

/// Extracts an orthogonal Kraus representation from a Choi matrix via its
/// spectral decomposition: `A_k = devectorize(sqrt(kappa_k) |Phi_k>)` for
/// every eigenvalue above `rank_tol`.
///
/// `rank_tol` defaults to 1e-12 times the largest eigenvalue; eigenvalues
/// in (-rank_tol, rank_tol] are treated as numerical zeros and dropped.
/// An eigenvalue below -rank_tol means the map is not completely positive
/// and the conversion is rejected. Eigenvector phases are not canonical,
/// so the operators are unique only up to phase and degenerate-subspace
/// rotation; compare channels by their Choi matrices or their action.
pub fn choi_to_kraus(x: &ChoiMatrix, rank_tol: Option<f64>) -> Result<KrausRepr> {
    let eig = hermitian_eig(&x.m, DEFAULT_TOL)?;
    let largest = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let rank_tol = rank_tol.unwrap_or(1e-12 * largest);
    let min = eig.min_eigenvalue();
    if min < -rank_tol {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let mut operators = Vec::new();
    for (k, &kappa) in eig.eigenvalues.iter().enumerate() {
        if kappa <= rank_tol {
            continue; // eigenvalues are sorted descending
        }
        let w = kappa.sqrt();
        let col = ComplexMatrix::from_fn(x.side(), 1, |r, _| eig.eigenvectors.get(r, k) * w);
        operators.push(devectorize(&col, x.d_in, x.d_out)?);
    }
    if operators.is_empty() {
        // The zero map: represent it with a single zero operator so the
        // list stays nonempty.
        operators.push(ComplexMatrix::zeros(x.d_out, x.d_in));
    }
    KrausRepr::new(x.d_in, x.d_out, operators)
}

/// Gram matrix G[k][l] = tr(A_k† A_l) of a Kraus set. Diagonal (with the
/// Choi eigenvalues on the diagonal) exactly when the set came from
/// [`choi_to_kraus`].
pub fn kraus_gram(k: &KrausRepr) -> ComplexMatrix {
    let n = k.operators.len();
    ComplexMatrix::from_fn(n, n, |a, b| {
        k.operators[a].dagger().matmul(&k.operators[b]).trace()
    })
}

/// Outcome of [`validate_cptp`]: the two membership flags plus the raw
/// diagnostics they were derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub cp: bool,
    pub tp: bool,
    pub min_eigenvalue: f64,
    pub tp_defect: f64,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.cp && self.tp
    }
}

/// Checks complete positivity (Choi matrix PSD) and trace preservation
/// (partial trace over the output factor equal to the identity) within
/// `tol`, reporting both diagnostics unconditionally.
pub fn validate_cptp(x: &ChoiMatrix, tol: f64) -> Result<CptpReport> {
    let defect = x.m.hermiticity_defect();
    if defect > tol.max(DEFAULT_TOL) {
        return Err(Error::NotHermitian {
            residual: defect,
            tol,
        });
    }
    let psd = psd_check(&x.m, tol.max(DEFAULT_TOL))?;
    let reduced = partial_trace(&x.m, x.d_in, x.d_out, Subsystem::Second)?;
    let tp_defect = reduced.max_abs_diff(&ComplexMatrix::identity(x.d_in));
    Ok(CptpReport {
        cp: psd.min_eigenvalue >= -tol,
        tp: tp_defect <= tol,
        min_eigenvalue: psd.min_eigenvalue,
        tp_defect,
    })
}

/// Reorders the tensor factors of a square matrix on a product space.
///
/// `dims` are the factor sides in the current order (slowest first) and
/// `perm[new] = old` names the factor that moves to each new slot. Rows and
/// columns are reindexed simultaneously.
pub fn permute_factors(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix> {
    let side: usize = dims.iter().product();
    if !m.is_square() || m.rows() != side {
        return Err(Error::DimensionMismatch {
            context: "factor permutation input",
            expected: shape(side, side),
            got: shape(m.rows(), m.cols()),
        });
    }
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidArgument(format!(
            "{perm:?} is not a permutation of {} factors",
            dims.len()
        )));
    }

    // old flat index -> new flat index
    let map: Vec<usize> = (0..side)
        .map(|flat| {
            let mut digits = vec![0usize; dims.len()];
            let mut rest = flat;
            for f in (0..dims.len()).rev() {
                digits[f] = rest % dims[f];
                rest /= dims[f];
            }
            let mut out = 0usize;
            for (new, &old) in perm.iter().enumerate() {
                let _ = new;
                out = out * dims[old] + digits[old];
            }
            out
        })
        .collect();

    let mut out = ComplexMatrix::zeros(side, side);
    for r in 0..side {
        for c in 0..side {
            out.set(map[r], map[c], m.get(r, c));
        }
    }
    Ok(out)
}

/// Choi matrix of the parallel composition of two independent channels.
///
/// The joint channel acts on input A (x) input B and produces output
/// A (x) output B; its Choi matrix is the Kronecker product of the factors
/// with the tensor slots reshuffled from (inA, outA, inB, outB) to
/// (inA, inB, outA, outB) so the crate's input-slow convention holds.
pub fn product_choi(xa: &ChoiMatrix, xb: &ChoiMatrix) -> ChoiMatrix {
    let raw = xa.m.tensor(&xb.m);
    let dims = [xa.d_in, xa.d_out, xb.d_in, xb.d_out];
    let m = permute_factors(&raw, &dims, &[0, 2, 1, 3])
        .expect("kron of Choi matrices has the product side");
    ChoiMatrix::new(xa.d_in * xb.d_in, xa.d_out * xb.d_out, m)
        .expect("permuted kron of Hermitian matrices is Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{amplitude_damping_choi, amplitude_damping_kraus, identity_channel};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "matrices differ by {d:.3e} > {tol:.3e}");
    }

    #[test]
    fn apply_kraus_amplitude_damping_worked_example() {
        let k = amplitude_damping_kraus(0.36).unwrap();
        let out = apply_kraus(&k, &plus_state()).unwrap();
        let expected = ComplexMatrix::from_real(&[&[0.68, 0.4], &[0.4, 0.32]]);
        assert_close(&out, &expected, 1e-15);
    }

    #[test]
    fn apply_kraus_identity_channel() {
        let k = identity_channel(2);
        let rho = ComplexMatrix::from_fn(2, 2, |r, c_| c(0.1 * (r + c_) as f64 + 0.3, 0.2));
        let out = apply_kraus(&k, &rho).unwrap();
        assert_close(&out, &rho, 0.0);
    }

    #[test]
    fn apply_kraus_full_damping_collapses_to_ground() {
        let k = amplitude_damping_kraus(1.0).unwrap();
        let rho = ComplexMatrix::from_fn(2, 2, |r, c_| match (r, c_) {
            (0, 0) => c(0.35, 0.0),
            (1, 1) => c(0.65, 0.0),
            (0, 1) => c(0.2, 0.1),
            _ => c(0.2, -0.1),
        });
        let out = apply_kraus(&k, &rho).unwrap();
        let expected = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_close(&out, &expected, 1e-15);
    }

    #[test]
    fn apply_kraus_rejects_wrong_input_side() {
        let k = amplitude_damping_kraus(0.5).unwrap();
        let rho = ComplexMatrix::identity(3);
        assert!(matches!(
            apply_kraus(&k, &rho),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tp_defect_of_amplitude_damping_vanishes() {
        for p in [0.0, 0.25, 0.36, 0.75, 1.0] {
            let k = amplitude_damping_kraus(p).unwrap();
            assert!(kraus_tp_defect(&k) <= 1e-15, "p = {p}");
        }
    }

    #[test]
    fn tp_defect_of_halved_identity() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        let k = KrausRepr::new(2, 2, vec![half]).unwrap();
        assert!((kraus_tp_defect(&k) - 0.75).abs() <= 1e-15);
    }

    #[test]
    fn kraus_to_choi_reproduces_amplitude_damping_matrix() {
        for p in [0.0, 0.36, 0.75, 1.0] {
            let k = amplitude_damping_kraus(p).unwrap();
            let x = kraus_to_choi(&k);
            let expected = amplitude_damping_choi(p).unwrap();
            assert_close(x.matrix(), expected.matrix(), 1e-15);
        }
    }

    #[test]
    fn kraus_to_choi_identity_is_rank_one() {
        let x = kraus_to_choi(&identity_channel(2));
        let v = vectorize(&ComplexMatrix::identity(2));
        let expected = v.matmul(&v.dagger());
        assert_close(x.matrix(), &expected, 0.0);
    }

    #[test]
    fn basis_action_matches_kraus_construction() {
        let k = amplitude_damping_kraus(0.36).unwrap();
        let x = choi_via_basis_action(|rho| apply_kraus(&k, rho).unwrap(), 2, 2).unwrap();
        let expected = amplitude_damping_choi(0.36).unwrap();
        assert_close(x.matrix(), expected.matrix(), 1e-15);
    }

    #[test]
    fn basis_action_of_identity_function() {
        let x = choi_via_basis_action(|rho| rho.clone(), 2, 2).unwrap();
        let v = vectorize(&ComplexMatrix::identity(2));
        assert_close(x.matrix(), &v.matmul(&v.dagger()), 0.0);
    }

    #[test]
    fn apply_choi_amplitude_damping_worked_example() {
        let x = amplitude_damping_choi(0.36).unwrap();
        let out = apply_choi(&x, &plus_state()).unwrap();
        let expected = ComplexMatrix::from_real(&[&[0.68, 0.4], &[0.4, 0.32]]);
        assert_close(&out, &expected, 1e-15);
    }

    #[test]
    fn apply_choi_identity_channel_fixes_states() {
        let x = kraus_to_choi(&identity_channel(2));
        let rho = ComplexMatrix::from_fn(2, 2, |r, c_| c(0.4 - 0.1 * r as f64, 0.3 * c_ as f64));
        let out = apply_choi(&x, &rho).unwrap();
        assert_close(&out, &rho, 1e-15);
    }

    #[test]
    fn choi_to_kraus_full_damping() {
        let x = amplitude_damping_choi(1.0).unwrap();
        let k = choi_to_kraus(&x, None).unwrap();
        assert_eq!(k.len(), 2);
        // Up to phase the operators are E^{0,0} and E^{0,1}.
        let mags: Vec<Vec<f64>> = k
            .operators()
            .iter()
            .map(|op| op.data().iter().map(|z| z.norm()).collect())
            .collect();
        let expect_a = [1.0, 0.0, 0.0, 0.0];
        let expect_b = [0.0, 1.0, 0.0, 0.0];
        let matches = |m: &[f64], e: &[f64]| m.iter().zip(e).all(|(x, y)| (x - y).abs() <= 1e-12);
        assert!(
            (matches(&mags[0], &expect_a) && matches(&mags[1], &expect_b))
                || (matches(&mags[0], &expect_b) && matches(&mags[1], &expect_a)),
            "unexpected operators {mags:?}"
        );
    }

    #[test]
    fn choi_to_kraus_rank_one_identity() {
        let x = kraus_to_choi(&identity_channel(2));
        let k = choi_to_kraus(&x, None).unwrap();
        assert_eq!(k.len(), 1);
        let op = &k.operators()[0];
        // Equal to the identity up to a global phase.
        let phase = op.get(0, 0) / op.get(0, 0).norm();
        let unphased = op.scale(phase.conj());
        assert_close(&unphased, &ComplexMatrix::identity(2), 1e-12);
    }

    #[test]
    fn choi_to_kraus_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -0.5, 0.0, 0.0],
            &[0.0, 0.0, 0.5, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        let x = ChoiMatrix::new(2, 2, m).unwrap();
        assert!(matches!(
            choi_to_kraus(&x, None),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn choi_to_kraus_round_trip() {
        let x = amplitude_damping_choi(0.36).unwrap();
        let k = choi_to_kraus(&x, None).unwrap();
        let back = kraus_to_choi(&k);
        assert_close(back.matrix(), x.matrix(), 1e-13);
    }

    #[test]
    fn gram_of_printed_amplitude_damping_pair() {
        for p in [0.1, 0.36, 0.9] {
            let k = amplitude_damping_kraus(p).unwrap();
            let g = kraus_gram(&k);
            let expected = ComplexMatrix::from_real(&[&[2.0 - p, 0.0], &[0.0, p]]);
            assert_close(&g, &expected, 1e-15);
        }
    }

    #[test]
    fn gram_of_extracted_kraus_is_diagonal() {
        let x = amplitude_damping_choi(0.36).unwrap();
        let k = choi_to_kraus(&x, None).unwrap();
        let g = kraus_gram(&k);
        for a in 0..g.rows() {
            for b in 0..g.cols() {
                if a != b {
                    assert!(g.get(a, b).norm() <= 1e-11);
                }
            }
        }
    }

    #[test]
    fn gram_of_single_operator() {
        let k = identity_channel(3);
        let g = kraus_gram(&k);
        assert_eq!(g.rows(), 1);
        assert!((g.get(0, 0) - c(3.0, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn validate_cptp_on_amplitude_damping() {
        let x = amplitude_damping_choi(0.36).unwrap();
        let rep = validate_cptp(&x, 1e-9).unwrap();
        assert!(rep.cp && rep.tp);
    }

    #[test]
    fn validate_cptp_flags_scaled_choi() {
        let x = amplitude_damping_choi(0.36).unwrap();
        let scaled = ChoiMatrix::new(2, 2, x.matrix().scale(2.0)).unwrap();
        let rep = validate_cptp(&scaled, 1e-9).unwrap();
        assert!(rep.cp);
        assert!(!rep.tp);
        assert!((rep.tp_defect - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn validate_cptp_flags_negative_eigenvalue() {
        let m = ComplexMatrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -0.25, 0.0, 0.0],
            &[0.0, 0.0, 1.25, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        let x = ChoiMatrix::new(2, 2, m).unwrap();
        let rep = validate_cptp(&x, 1e-9).unwrap();
        assert!(!rep.cp);
        assert!((rep.min_eigenvalue + 0.25).abs() <= 1e-12);
    }

    #[test]
    fn permute_factors_identity_and_swap() {
        let a = ComplexMatrix::from_fn(2, 2, |r, c_| c((r + 1) as f64, c_ as f64));
        let b = ComplexMatrix::from_fn(3, 3, |r, c_| c(r as f64 - 1.0, (c_ * r) as f64));
        let ab = a.tensor(&b);

        let same = permute_factors(&ab, &[2, 3], &[0, 1]).unwrap();
        assert_close(&same, &ab, 0.0);

        let swapped = permute_factors(&ab, &[2, 3], &[1, 0]).unwrap();
        assert_close(&swapped, &b.tensor(&a), 0.0);
    }

    #[test]
    fn permute_factors_transposition_is_involutive() {
        let m = ComplexMatrix::from_fn(8, 8, |r, c_| c((r * 13 % 7) as f64, (c_ * 5 % 3) as f64));
        let once = permute_factors(&m, &[2, 2, 2], &[2, 1, 0]).unwrap();
        let twice = permute_factors(&once, &[2, 2, 2], &[2, 1, 0]).unwrap();
        assert_eq!(twice, m);
    }

    #[test]
    fn permute_factors_rejects_bad_perm() {
        let m = ComplexMatrix::identity(4);
        assert!(permute_factors(&m, &[2, 2], &[0, 0]).is_err());
        assert!(permute_factors(&m, &[2, 3], &[0, 1]).is_err());
    }

    #[test]
    fn product_choi_of_identities_is_identity_channel() {
        let x = kraus_to_choi(&identity_channel(2));
        let prod = product_choi(&x, &x);
        let expected = kraus_to_choi(&identity_channel(4));
        assert_close(prod.matrix(), expected.matrix(), 1e-15);
    }

    #[test]
    fn product_choi_factorizes_on_product_states() {
        let xa = amplitude_damping_choi(0.36).unwrap();
        let xb = amplitude_damping_choi(0.75).unwrap();
        let prod = product_choi(&xa, &xb);

        let rho_a = plus_state();
        let rho_b = ComplexMatrix::from_real(&[&[0.25, 0.1], &[0.1, 0.75]]);
        let joint = apply_choi(&prod, &rho_a.tensor(&rho_b)).unwrap();
        let separate = apply_choi(&xa, &rho_a)
            .unwrap()
            .tensor(&apply_choi(&xb, &rho_b).unwrap());
        assert_close(&joint, &separate, 1e-13);
    }

    #[test]
    fn product_choi_stays_cptp() {
        let xa = amplitude_damping_choi(0.25).unwrap();
        let xb = amplitude_damping_choi(0.9).unwrap();
        let prod = product_choi(&xa, &xb);
        let rep = validate_cptp(&prod, 1e-9).unwrap();
        assert!(rep.cp && rep.tp);
    }

    #[test]
    fn matrix_unit_materializes_delta_pattern() {
        let e = MatrixUnit::new(3, 1, 2).unwrap().to_matrix();
        for r in 0..3 {
            for c_ in 0..3 {
                let want = if (r, c_) == (1, 2) { 1.0 } else { 0.0 };
                assert_eq!(e.get(r, c_), c(want, 0.0));
            }
        }
        assert!(MatrixUnit::new(2, 2, 0).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(plus_state(), 1e-8).is_ok());
        let not_unit_trace = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(not_unit_trace, 1e-8),
            Err(Error::NotDensityMatrix(_))
        ));
        let negative = ComplexMatrix::from_real(&[&[1.5, 0.0], &[0.0, -0.5]]);
        assert!(matches!(
            DensityMatrix::new(negative, 1e-8),
            Err(Error::NotDensityMatrix(_))
        ));
    }

    #[test]
    fn choi_matrix_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(4);
        m.set(0, 1, c(0.5, 0.0));
        assert!(matches!(
            ChoiMatrix::new(2, 2, m),
            Err(Error::NotHermitian { .. })
        ));
    }
}
