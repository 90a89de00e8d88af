//! Ready-made channels: the amplitude damping family, the identity
//! channel, and seeded random CPTP generators used as test fixtures.
//!
//! Every generator is deterministic: the same seed produces bit-identical
//! output within a build. Retries after a singular draw move to a fresh
//! ChaCha stream, so they stay reproducible too.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{ChoiMatrix, DensityMatrix, KrausRepr};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, ComplexMatrix, Subsystem, DEFAULT_TOL};

/// Retry cap when a random draw produces a singular partial trace.
const MAX_ATTEMPTS: u64 = 16;

/// Eigenvalues of the partial trace at or below this floor count as
/// singular and trigger a retry.
const SINGULAR_FLOOR: f64 = 1e-12;

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "damping probability must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// The two Kraus operators of the qubit amplitude damping channel:
/// A0 = [[1, 0], [0, sqrt(1-p)]] and A1 = [[0, sqrt(p)], [0, 0]].
///
/// At p = 0 the second operator is the zero matrix; it is kept so the
/// output shape does not depend on p. Callers wanting a minimal
/// representation can round-trip through [`crate::channels::choi_to_kraus`].
pub fn amplitude_damping_kraus(p: f64) -> Result<KrausRepr> {
    check_probability(p)?;
    let a0 = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, (1.0 - p).sqrt()]]);
    let a1 = ComplexMatrix::from_real(&[&[0.0, p.sqrt()], &[0.0, 0.0]]);
    KrausRepr::new(2, 2, vec![a0, a1])
}

/// The amplitude damping Choi matrix, written out directly:
/// [[1, 0, 0, s], [0, 0, 0, 0], [0, 0, p, 0], [s, 0, 0, 1-p]] with
/// s = sqrt(1-p).
pub fn amplitude_damping_choi(p: f64) -> Result<ChoiMatrix> {
    check_probability(p)?;
    let s = (1.0 - p).sqrt();
    let m = ComplexMatrix::from_real(&[
        &[1.0, 0.0, 0.0, s],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, p, 0.0],
        &[s, 0.0, 0.0, 1.0 - p],
    ]);
    ChoiMatrix::new(2, 2, m)
}

/// The identity channel on a d-dimensional space as a single Kraus
/// operator I_d.
pub fn identity_channel(d: usize) -> KrausRepr {
    assert!(d >= 1, "channel dimension must be positive");
    KrausRepr::new(d, d, vec![ComplexMatrix::identity(d)]).expect("one operator, matching dims")
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Inverse square root of a positive definite Hermitian matrix, or `None`
/// if any eigenvalue sits at or below the singularity floor.
fn inv_sqrt_positive(m: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
    let eig = hermitian_eig(m, DEFAULT_TOL)?;
    if eig.min_eigenvalue() <= SINGULAR_FLOOR {
        return Ok(None);
    }
    let n = m.rows();
    let v = &eig.eigenvectors;
    let out = ComplexMatrix::from_fn(n, n, |a, b| {
        (0..n)
            .map(|k| v.get(a, k) * v.get(b, k).conj() * eig.eigenvalues[k].sqrt().recip())
            .sum()
    });
    Ok(Some(out))
}

/// Random Choi matrix of a CPTP channel with the requested Kraus rank.
///
/// A complex Gaussian (d_in * d_out) x rank factor G gives the PSD matrix
/// W = G G†; the trace-preservation dressing
/// X = (S^{-1/2} (x) I) W (S^{-1/2} (x) I) with S the partial trace of W
/// over the output factor makes tr_2 X the identity exactly. The same seed
/// yields the same matrix bit for bit; a singular S (vanishing probability)
/// retries on a fresh stream up to 16 times.
pub fn random_cptp_choi(d_in: usize, d_out: usize, rank: usize, seed: u64) -> Result<ChoiMatrix> {
    let side = d_in * d_out;
    if rank < 1 || rank > side {
        return Err(Error::InvalidArgument(format!(
            "rank must lie in [1, {side}], got {rank}"
        )));
    }
    // A trace-preserving channel needs tr_2 X = I of full rank d_in, and
    // rank(tr_2 X) <= rank(X) * d_out; below that the dressing is doomed.
    if rank * d_out < d_in {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} cannot support a trace-preserving channel: need rank * d_out >= d_in ({rank} * {d_out} < {d_in})"
        )));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let g = gaussian_matrix(&mut rng, side, rank);
        let mut w = g.matmul(&g.dagger());
        // Dress twice: the second pass removes the eigensolver roundoff of
        // the first and leaves tr_2 X = I at machine precision.
        let mut dressed = false;
        for _ in 0..2 {
            let s = partial_trace(&w, d_in, d_out, Subsystem::Second)?;
            let Some(s_inv_sqrt) = inv_sqrt_positive(&s)? else {
                break;
            };
            let dress = s_inv_sqrt.tensor(&ComplexMatrix::identity(d_out));
            let x = dress.matmul(&w).matmul(&dress);
            // Symmetrize away the last-bit asymmetry of the triple product.
            w = x.add(&x.dagger()).scale(0.5);
            dressed = true;
        }
        if dressed {
            return ChoiMatrix::new(d_in, d_out, w);
        }
    }
    Err(Error::SingularPartialTrace {
        attempts: MAX_ATTEMPTS as usize,
    })
}

/// Random trace-preserving Kraus set: `num_ops` complex Gaussian operators
/// B_k, polar-corrected to A_k = B_k T^{-1/2} with T = sum_k B_k† B_k so
/// that the completeness sum is the identity.
pub fn random_kraus(d_in: usize, d_out: usize, num_ops: usize, seed: u64) -> Result<KrausRepr> {
    if num_ops < 1 {
        return Err(Error::InvalidArgument(
            "need at least one Kraus operator".to_string(),
        ));
    }
    if num_ops * d_out < d_in {
        return Err(Error::InvalidArgument(format!(
            "{num_ops} operators cannot be trace preserving: need num_ops * d_out >= d_in ({num_ops} * {d_out} < {d_in})"
        )));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt.wrapping_add(0x9e37_79b9));
        let mut ops: Vec<ComplexMatrix> = (0..num_ops)
            .map(|_| gaussian_matrix(&mut rng, d_out, d_in))
            .collect();
        // Two polar-correction passes: the second one cancels the
        // eigensolver roundoff and brings the completeness sum to the
        // identity at machine precision.
        let mut corrected = false;
        for _ in 0..2 {
            let mut t = ComplexMatrix::zeros(d_in, d_in);
            for b in &ops {
                t = t.add(&b.dagger().matmul(b));
            }
            let Some(t_inv_sqrt) = inv_sqrt_positive(&t)? else {
                break;
            };
            ops = ops.iter().map(|b| b.matmul(&t_inv_sqrt)).collect();
            corrected = true;
        }
        if corrected {
            return KrausRepr::new(d_in, d_out, ops);
        }
    }
    Err(Error::SingularPartialTrace {
        attempts: MAX_ATTEMPTS as usize,
    })
}

/// Random full-support density matrix, drawn as a normalized Gaussian Gram
/// matrix G G† / tr(G G†).
pub fn random_density_matrix(d: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x5eed);
    let g = gaussian_matrix(&mut rng, d, d);
    let w = g.matmul(&g.dagger());
    let tr = w.trace().re;
    let m = w.scale(tr.recip());
    DensityMatrix::new(m, 1e-9).expect("normalized Gram matrix is a state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        apply_choi, apply_kraus, choi_to_kraus, kraus_to_choi, kraus_tp_defect, validate_cptp,
    };

    #[test]
    fn amplitude_damping_values_at_p036() {
        let k = amplitude_damping_kraus(0.36).unwrap();
        let a0 = &k.operators()[0];
        let a1 = &k.operators()[1];
        assert_eq!(a0.get(1, 1), Complex64::new(0.8, 0.0));
        assert_eq!(a1.get(0, 1), Complex64::new(0.6, 0.0));
    }

    #[test]
    fn amplitude_damping_rejects_out_of_range() {
        assert!(amplitude_damping_kraus(-0.1).is_err());
        assert!(amplitude_damping_kraus(1.1).is_err());
        assert!(amplitude_damping_choi(f64::NAN).is_err());
    }

    #[test]
    fn amplitude_damping_choi_entries() {
        let x = amplitude_damping_choi(0.36).unwrap();
        let m = x.matrix();
        assert_eq!(m.get(0, 3), Complex64::new(0.8, 0.0));
        assert_eq!(m.get(3, 0), Complex64::new(0.8, 0.0));
        assert_eq!(m.get(2, 2), Complex64::new(0.36, 0.0));
        assert_eq!(m.get(3, 3), Complex64::new(0.64, 0.0));
    }

    #[test]
    fn amplitude_damping_choi_at_zero_is_identity_choi() {
        let x = amplitude_damping_choi(0.0).unwrap();
        let expected = kraus_to_choi(&identity_channel(2));
        assert!(x.matrix().max_abs_diff(expected.matrix()) <= 1e-15);
    }

    #[test]
    fn amplitude_damping_constructions_agree() {
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let via_kraus = kraus_to_choi(&amplitude_damping_kraus(p).unwrap());
            let direct = amplitude_damping_choi(p).unwrap();
            assert!(
                via_kraus.matrix().max_abs_diff(direct.matrix()) <= 1e-15,
                "p = {p}"
            );
        }
    }

    #[test]
    fn full_damping_sends_everything_to_ground() {
        let x = amplitude_damping_choi(1.0).unwrap();
        for seed in 0..20u64 {
            let rho = random_density_matrix(2, seed);
            let out = apply_choi(&x, rho.matrix()).unwrap();
            let ground = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]);
            assert!(out.max_abs_diff(&ground) <= 1e-12);
        }
    }

    #[test]
    fn identity_channel_is_cptp() {
        let x = kraus_to_choi(&identity_channel(3));
        assert!((x.matrix().trace().re - 3.0).abs() <= 1e-15);
        let rep = validate_cptp(&x, 1e-9).unwrap();
        assert!(rep.cp && rep.tp);
    }

    #[test]
    fn random_cptp_choi_passes_validation() {
        for (d_in, d_out, rank, seed) in
            [(2, 2, 1, 1u64), (2, 2, 4, 2), (3, 2, 3, 3), (2, 3, 5, 4), (4, 4, 7, 5)]
        {
            let x = random_cptp_choi(d_in, d_out, rank, seed).unwrap();
            let rep = validate_cptp(&x, 1e-9).unwrap();
            assert!(rep.cp && rep.tp, "dims ({d_in},{d_out}) rank {rank}");
        }
    }

    #[test]
    fn random_cptp_choi_respects_rank() {
        let x = random_cptp_choi(2, 2, 1, 7).unwrap();
        let k = choi_to_kraus(&x, None).unwrap();
        assert_eq!(k.len(), 1);

        let x3 = random_cptp_choi(2, 2, 3, 8).unwrap();
        let k3 = choi_to_kraus(&x3, None).unwrap();
        assert_eq!(k3.len(), 3);
    }

    #[test]
    fn random_cptp_choi_is_deterministic() {
        let a = random_cptp_choi(3, 2, 4, 42).unwrap();
        let b = random_cptp_choi(3, 2, 4, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = random_cptp_choi(3, 2, 4, 43).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn random_cptp_choi_rejects_bad_rank() {
        assert!(random_cptp_choi(2, 2, 0, 1).is_err());
        assert!(random_cptp_choi(2, 2, 5, 1).is_err());
        // rank * d_out < d_in cannot be trace preserving.
        assert!(random_cptp_choi(3, 2, 1, 1).is_err());
        assert!(random_kraus(4, 2, 1, 1).is_err());
    }

    #[test]
    fn random_kraus_is_trace_preserving() {
        for seed in 0..5u64 {
            let k = random_kraus(3, 2, 4, seed).unwrap();
            assert!(kraus_tp_defect(&k) <= 1e-12);
        }
    }

    #[test]
    fn random_kraus_matches_its_choi_on_states() {
        let k = random_kraus(2, 3, 3, 11).unwrap();
        let x = kraus_to_choi(&k);
        let rho = random_density_matrix(2, 12);
        let via_kraus = apply_kraus(&k, rho.matrix()).unwrap();
        let via_choi = apply_choi(&x, rho.matrix()).unwrap();
        assert!(via_kraus.max_abs_diff(&via_choi) <= 1e-12);
    }

    #[test]
    fn random_density_matrix_is_reproducible() {
        let a = random_density_matrix(3, 5);
        let b = random_density_matrix(3, 5);
        assert_eq!(a.matrix(), b.matrix());
    }
}
