//! Quantum channels through their Choi matrices.
//!
//! The crate carries a completely positive map either as a list of Kraus
//! operators or as its Choi matrix, converts between the two in both
//! directions, applies channels to states, validates complete positivity
//! and trace preservation, combines channels in parallel, and optimizes
//! linear objectives over the CPTP set via a product-basis parametrization
//! and alternating projections.
//!
//! Index convention, fixed everywhere: on a product space H1 (x) H2 the
//! basis vector |j>_1 |i>_2 has flat index `j * dim2 + i`. A Choi matrix
//! for a channel with input dimension `d_in` and output dimension `d_out`
//! lives on input (x) output, so its composite index is `j * d_out + i`
//! with j the input index.

pub mod builtin;
pub mod channels;
mod error;
pub mod linalg;
pub mod opt;

pub use error::{Error, Result};
pub use linalg::{
    devectorize, hermitian_eig, partial_trace, psd_check, tensor_product, vectorize,
    ComplexMatrix, EigDecomposition, PsdReport, Subsystem, DEFAULT_TOL,
};
pub use num_complex::Complex64;

pub use builtin::{
    amplitude_damping_choi, amplitude_damping_kraus, identity_channel, random_cptp_choi,
};
pub use channels::{
    apply_choi, apply_kraus, choi_to_kraus, choi_via_basis_action, kraus_gram, kraus_to_choi,
    kraus_tp_defect, permute_factors, product_choi, validate_cptp, ChoiMatrix, CptpReport,
    DensityMatrix, KrausRepr, MatrixUnit,
};
pub use opt::{
    choi_to_params, depolarizing_start, gell_mann_basis, optimize_linear, params_to_choi,
    project_cptp, project_psd, project_tp_affine, Feasibility, HermitianBasis, LinearObjective,
    OptReport, ParamVector, Sense,
};
