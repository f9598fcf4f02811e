//! Seeded sampling of isometries, unitaries and channels.
//!
//! Isometries come from the QR orthonormalization of a complex standard
//! normal matrix, with the phases of `R`'s diagonal absorbed so the result is
//! Haar distributed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{Channel, KrausSet, StinespringIsometry};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Deterministic generator used throughout the crate's randomized suites.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// `rows x cols` matrix with orthonormal columns; requires `rows >= cols`.
pub fn random_isometry_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    let g = complex_gaussian(rows, cols, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..cols {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..rows {
                q[(i, k)] *= phase;
            }
        }
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry_matrix(d, d, rng)
}

pub fn random_isometry<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    dim_env: usize,
    rng: &mut R,
) -> Result<StinespringIsometry> {
    if dim_in == 0 || dim_out * dim_env < dim_in {
        return Err(Error::InvalidParameter(format!(
            "no isometry from dimension {dim_in} into {dim_out} x {dim_env}"
        )));
    }
    StinespringIsometry::new(random_isometry_matrix(dim_out * dim_env, dim_in, rng), dim_out, dim_env)
}

/// Kraus set of a random channel with `dim_env` operators.
pub fn random_kraus<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, dim_env: usize, rng: &mut R) -> Result<KrausSet> {
    Ok(random_isometry(dim_in, dim_out, dim_env, rng)?.to_kraus())
}

/// Random channel whose environment dimension is drawn from `{2, 3}`, raised
/// to `⌈dim_in / dim_out⌉` when that is larger.
pub fn random_channel<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, rng: &mut R) -> Result<Channel> {
    let env = rng.random_range(2..=3usize).max(dim_in.div_ceil(dim_out.max(1)));
    Ok(random_kraus(dim_in, dim_out, env, rng)?.to_channel())
}

/// Random channel of full Kraus rank `dim_in · dim_out`; its Choi operator is
/// positive definite almost surely.
pub fn random_full_rank_channel<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, rng: &mut R) -> Result<Channel> {
    Ok(random_kraus(dim_in, dim_out, dim_in * dim_out, rng)?.to_channel())
}

/// Random density matrix of full rank.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_gaussian(d, d, rng);
    let rho = &g * g.adjoint();
    let t = crate::matrix::trace(&rho);
    rho / t
}
