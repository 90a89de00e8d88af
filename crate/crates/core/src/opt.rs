//! Parametrization of Choi matrices on a product operator basis and
//! optimization of linear objectives over the CPTP set.
//!
//! The feasible set is the intersection of the PSD cone with the
//! trace-preservation affine subspace {X : tr_2 X = I}. Feasibility is
//! restored by Dykstra alternating projections between the two sets, and
//! linear objectives are driven by projected gradient steps with a
//! diminishing step size.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::channels::ChoiMatrix;
use crate::error::{shape, Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, ComplexMatrix, Subsystem, DEFAULT_TOL};

/// Default initial step size for [`optimize_linear`].
pub const DEFAULT_STEP0: f64 = 1.0;
/// Default stopping tolerance for [`optimize_linear`].
pub const DEFAULT_OPT_TOL: f64 = 1e-9;
/// Default outer iteration cap for [`optimize_linear`].
pub const DEFAULT_MAX_ITER: usize = 5000;
/// Default iteration cap for the Dykstra projection.
pub const DEFAULT_PROJECTION_MAX_ITER: usize = 500;

/// The stopping rule watches the objective over this many consecutive
/// iterations.
const CONVERGENCE_WINDOW: usize = 10;

/// An orthogonal Hermitian operator basis: the identity first, then d²-1
/// traceless elements with tr(sigma_j sigma_k) = 2 delta_jk.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    d: usize,
    elements: Vec<ComplexMatrix>,
    norm_sq: Vec<f64>,
}

impl HermitianBasis {
    /// Validates and wraps a custom basis: element 0 must be the identity,
    /// the rest traceless, all Hermitian and mutually trace-orthogonal.
    pub fn new(d: usize, elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.len() != d * d {
            return Err(Error::DimensionMismatch {
                context: "Hermitian basis",
                expected: format!("{} elements", d * d),
                got: format!("{} elements", elements.len()),
            });
        }
        if elements[0].max_abs_diff(&ComplexMatrix::identity(d)) > DEFAULT_TOL {
            return Err(Error::InvalidArgument(
                "basis element 0 must be the identity".to_string(),
            ));
        }
        for (j, el) in elements.iter().enumerate() {
            if el.rows() != d || el.cols() != d {
                return Err(Error::DimensionMismatch {
                    context: "basis element",
                    expected: shape(d, d),
                    got: shape(el.rows(), el.cols()),
                });
            }
            if el.hermiticity_defect() > DEFAULT_TOL {
                return Err(Error::InvalidArgument(format!(
                    "basis element {j} is not Hermitian"
                )));
            }
            if j >= 1 && el.trace().norm() > DEFAULT_TOL {
                return Err(Error::InvalidArgument(format!(
                    "basis element {j} is not traceless"
                )));
            }
        }
        for j in 0..elements.len() {
            for k in (j + 1)..elements.len() {
                let overlap = elements[j].matmul(&elements[k]).trace().norm();
                if overlap > DEFAULT_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "basis elements {j} and {k} are not orthogonal (overlap {overlap:.3e})"
                    )));
                }
            }
        }
        Ok(Self::trusted(d, elements))
    }

    fn trusted(d: usize, elements: Vec<ComplexMatrix>) -> Self {
        let norm_sq = elements
            .iter()
            .map(|el| el.matmul(el).trace().re)
            .collect();
        Self {
            d,
            elements,
            norm_sq,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a basis always holds d*d >= 1 elements
    }

    pub fn element(&self, j: usize) -> &ComplexMatrix {
        &self.elements[j]
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// The generalized Gell-Mann basis in dimension d: identity, then the
/// d(d-1)/2 symmetric and d(d-1)/2 antisymmetric pair generators, then the
/// d-1 diagonal traceless generators, normalized to tr(sigma_j sigma_k) =
/// 2 delta_jk for the traceless part.
pub fn gell_mann_basis(d: usize) -> HermitianBasis {
    assert!(d >= 1, "basis dimension must be positive");
    let mut elements = Vec::with_capacity(d * d);
    elements.push(ComplexMatrix::identity(d));
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m.set(j, k, Complex64::new(1.0, 0.0));
            m.set(k, j, Complex64::new(1.0, 0.0));
            elements.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m.set(j, k, Complex64::new(0.0, -1.0));
            m.set(k, j, Complex64::new(0.0, 1.0));
            elements.push(m);
        }
    }
    for l in 1..d {
        let w = (2.0 / (l as f64 * (l + 1) as f64)).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            m.set(i, i, Complex64::new(w, 0.0));
        }
        m.set(l, l, Complex64::new(-w * l as f64, 0.0));
        elements.push(m);
    }
    HermitianBasis::trusted(d, elements)
}

/// Real coefficients of a Hermitian matrix on the product basis
/// sigma_j (x) tau_k, stored flat with index `j * d_out^2 + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    d_in: usize,
    d_out: usize,
    x: Vec<f64>,
}

impl ParamVector {
    pub fn new(d_in: usize, d_out: usize, x: Vec<f64>) -> Result<Self> {
        let expected = d_in * d_in * d_out * d_out;
        if x.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "parameter vector",
                expected: expected.to_string(),
                got: x.len().to_string(),
            });
        }
        if let Some(idx) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: idx / (d_out * d_out),
                col: idx % (d_out * d_out),
            });
        }
        Ok(Self { d_in, d_out, x })
    }

    pub fn zeros(d_in: usize, d_out: usize) -> Self {
        Self {
            d_in,
            d_out,
            x: vec![0.0; d_in * d_in * d_out * d_out],
        }
    }

    /// The maximally depolarizing point: only x[0,0] = 1/d_out is set, which
    /// reconstructs to the trace-preserving Choi matrix I / d_out.
    pub fn depolarizing(d_in: usize, d_out: usize) -> Self {
        let mut p = Self::zeros(d_in, d_out);
        p.set(0, 0, 1.0 / d_out as f64);
        p
    }

    #[inline]
    fn index(&self, j: usize, k: usize) -> usize {
        j * self.d_out * self.d_out + k
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.x[self.index(j, k)]
    }

    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        let idx = self.index(j, k);
        self.x[idx] = v;
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.x
    }
}

/// Reconstructs X = sum_{j,k} x_{j,k} sigma_j (x) tau_k with the input
/// basis on the slow tensor factor.
pub fn params_to_choi(
    p: &ParamVector,
    basis_in: &HermitianBasis,
    basis_out: &HermitianBasis,
) -> Result<ChoiMatrix> {
    if basis_in.d() != p.d_in || basis_out.d() != p.d_out {
        return Err(Error::DimensionMismatch {
            context: "parameter basis",
            expected: format!("bases of dimension {} and {}", p.d_in, p.d_out),
            got: format!("{} and {}", basis_in.d(), basis_out.d()),
        });
    }
    let side = p.d_in * p.d_out;
    let mut m = ComplexMatrix::zeros(side, side);
    for j in 0..basis_in.len() {
        for k in 0..basis_out.len() {
            let coeff = p.get(j, k);
            if coeff == 0.0 {
                continue;
            }
            m = m.add(&basis_in.element(j).tensor(basis_out.element(k)).scale(coeff));
        }
    }
    ChoiMatrix::new(p.d_in, p.d_out, m)
}

/// Reads the coefficients of a Choi matrix off the product basis:
/// x_{j,k} = tr((sigma_j (x) tau_k) X) / (tr sigma_j^2 * tr tau_k^2).
/// Exact inverse of [`params_to_choi`].
pub fn choi_to_params(
    x: &ChoiMatrix,
    basis_in: &HermitianBasis,
    basis_out: &HermitianBasis,
) -> Result<ParamVector> {
    if basis_in.d() != x.d_in() || basis_out.d() != x.d_out() {
        return Err(Error::DimensionMismatch {
            context: "parameter basis",
            expected: format!("bases of dimension {} and {}", x.d_in(), x.d_out()),
            got: format!("{} and {}", basis_in.d(), basis_out.d()),
        });
    }
    let mut p = ParamVector::zeros(x.d_in(), x.d_out());
    for j in 0..basis_in.len() {
        for k in 0..basis_out.len() {
            let probe = basis_in.element(j).tensor(basis_out.element(k));
            let overlap = probe.matmul(x.matrix()).trace().re;
            p.set(j, k, overlap / (basis_in.norm_sq[j] * basis_out.norm_sq[k]));
        }
    }
    Ok(p)
}

/// Orthogonal (Frobenius) projection onto the trace-preservation affine
/// subspace: X' = X + (I - tr_2 X) (x) I/d_out, so tr_2 X' = I up to
/// roundoff.
pub fn project_tp_affine(x: &ChoiMatrix) -> ChoiMatrix {
    let m = tp_project_matrix(x.matrix(), x.d_in(), x.d_out());
    ChoiMatrix::new(x.d_in(), x.d_out(), m).expect("projection preserves Hermiticity")
}

fn tp_project_matrix(m: &ComplexMatrix, d_in: usize, d_out: usize) -> ComplexMatrix {
    let reduced = partial_trace(m, d_in, d_out, Subsystem::Second)
        .expect("Choi side matches its dimensions");
    let delta = ComplexMatrix::identity(d_in).sub(&reduced);
    let correction = delta.tensor(&ComplexMatrix::identity(d_out).scale(1.0 / d_out as f64));
    m.add(&correction)
}

/// Frobenius-nearest positive semidefinite matrix: eigendecompose, clip
/// negative eigenvalues to zero, reconstruct.
pub fn project_psd(x: &ChoiMatrix) -> Result<ChoiMatrix> {
    let m = psd_clip_matrix(x.matrix())?;
    ChoiMatrix::new(x.d_in(), x.d_out(), m)
}

fn psd_clip_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, DEFAULT_TOL)?;
    let n = m.rows();
    let v = &eig.eigenvectors;
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        (0..n)
            .filter(|&k| eig.eigenvalues[k] > 0.0)
            .map(|k| v.get(a, k) * v.get(b, k).conj() * eig.eigenvalues[k])
            .sum()
    }))
}

fn feasibility_of(m: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<Feasibility> {
    let eig = hermitian_eig(m, DEFAULT_TOL)?;
    let reduced = partial_trace(m, d_in, d_out, Subsystem::Second)?;
    let tp_defect = reduced.max_abs_diff(&ComplexMatrix::identity(d_in));
    Ok(Feasibility {
        min_eigenvalue: eig.min_eigenvalue(),
        tp_defect,
    })
}

/// Dykstra alternating projections between the PSD cone and the
/// trace-preservation subspace.
///
/// Returns once the current iterate has min eigenvalue >= -tol and
/// trace-preservation defect <= tol; running out of iterations reports
/// both residuals instead of returning a bad point.
pub fn project_cptp(x: &ChoiMatrix, tol: f64, max_iter: usize) -> Result<ChoiMatrix> {
    let (d_in, d_out) = (x.d_in(), x.d_out());
    let side = x.side();
    let mut cur = x.matrix().clone();
    let mut p = ComplexMatrix::zeros(side, side);
    let mut q = ComplexMatrix::zeros(side, side);
    let mut last = Feasibility {
        min_eigenvalue: f64::NEG_INFINITY,
        tp_defect: f64::INFINITY,
    };
    for it in 0..max_iter {
        let shifted = cur.add(&p);
        let y = psd_clip_matrix(&shifted)?;
        p = shifted.sub(&y);
        let shifted_tp = y.add(&q);
        let z = tp_project_matrix(&shifted_tp, d_in, d_out);
        q = shifted_tp.sub(&z);
        cur = z;

        last = feasibility_of(&cur, d_in, d_out)?;
        if last.min_eigenvalue >= -tol && last.tp_defect <= tol {
            return ChoiMatrix::new(d_in, d_out, cur);
        }
        let _ = it;
    }
    Err(Error::ProjectionDidNotConverge {
        iterations: max_iter,
        min_eigenvalue: last.min_eigenvalue,
        tp_defect: last.tp_defect,
    })
}

/// Direction of optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// A linear objective tr(F X) with a Hermitian coefficient matrix, so the
/// value is real on Hermitian arguments.
#[derive(Debug, Clone)]
pub struct LinearObjective {
    f: ComplexMatrix,
    sense: Sense,
}

impl LinearObjective {
    pub fn new(f: ComplexMatrix, sense: Sense) -> Result<Self> {
        if !f.is_square() {
            return Err(Error::DimensionMismatch {
                context: "objective matrix",
                expected: "square".to_string(),
                got: shape(f.rows(), f.cols()),
            });
        }
        let defect = f.hermiticity_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::NotHermitian {
                residual: defect,
                tol: DEFAULT_TOL,
            });
        }
        Ok(Self { f, sense })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Objective value tr(F X).
    pub fn value(&self, x: &ChoiMatrix) -> f64 {
        self.f.matmul(x.matrix()).trace().re
    }
}

/// Feasibility diagnostics of an iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub min_eigenvalue: f64,
    pub tp_defect: f64,
}

/// Result of [`optimize_linear`].
#[derive(Debug, Clone)]
pub struct OptReport {
    pub x_opt: ChoiMatrix,
    pub objective_value: f64,
    pub iterations: usize,
    pub feasibility: Feasibility,
    pub converged: bool,
}

/// The maximally depolarizing Choi matrix I / d_out: trace preserving,
/// strictly inside the PSD cone. The default optimizer start.
pub fn depolarizing_start(d_in: usize, d_out: usize) -> ChoiMatrix {
    let side = d_in * d_out;
    let m = ComplexMatrix::identity(side).scale(1.0 / d_out as f64);
    ChoiMatrix::new(d_in, d_out, m).expect("scaled identity is a valid Choi matrix")
}

/// Projected gradient ascent/descent for a linear objective over the CPTP
/// set: X_{t+1} = project_cptp(X_t ± eta_t F) with eta_t = step0/sqrt(t+1).
///
/// Stops once the objective has moved by at most `tol` over a
/// 10-iteration window, or after `max_iter` steps (reported as
/// `converged = false`). The feasibility projection runs at a tolerance
/// well below `tol` so projection noise cannot mask convergence.
pub fn optimize_linear(
    obj: &LinearObjective,
    start: &ChoiMatrix,
    step0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<OptReport> {
    let side = start.side();
    if obj.f.rows() != side {
        return Err(Error::DimensionMismatch {
            context: "objective matrix",
            expected: shape(side, side),
            got: shape(obj.f.rows(), obj.f.cols()),
        });
    }
    let sign = match obj.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let proj_tol = (tol * 1e-3).max(1e-13);

    let mut x = project_cptp(start, proj_tol, DEFAULT_PROJECTION_MAX_ITER)?;
    let mut window: VecDeque<f64> = VecDeque::with_capacity(CONVERGENCE_WINDOW + 1);
    window.push_back(obj.value(&x));
    let mut converged = false;
    let mut iterations = 0;

    for t in 0..max_iter {
        let eta = step0 / ((t + 1) as f64).sqrt();
        let stepped = x.matrix().add(&obj.f.scale(sign * eta));
        let stepped =
            ChoiMatrix::new(x.d_in(), x.d_out(), stepped).expect("gradient step is Hermitian");
        x = project_cptp(&stepped, proj_tol, DEFAULT_PROJECTION_MAX_ITER)?;
        iterations = t + 1;

        window.push_back(obj.value(&x));
        if window.len() > CONVERGENCE_WINDOW + 1 {
            window.pop_front();
        }
        if window.len() == CONVERGENCE_WINDOW + 1 {
            let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= tol {
                converged = true;
                break;
            }
        }
    }

    let feasibility = feasibility_of(x.matrix(), x.d_in(), x.d_out())?;
    let objective_value = obj.value(&x);
    Ok(OptReport {
        x_opt: x,
        objective_value,
        iterations,
        feasibility,
        converged,
    })
}
