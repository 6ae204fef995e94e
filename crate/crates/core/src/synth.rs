//! Seeded synthetic instances: planted tubal-train and tubal-rank tensors,
//! Gaussian noise, and Bernoulli observation masks.
//!
//! Everything here is driven by a ChaCha12 stream cipher RNG, so a seed
//! fully determines the generated bytes across runs and platforms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tensor::{ifft_tube_real, ComplexTensor, DenseTensor, ENFORCE_REAL_TOL};
use crate::tprod::explicit_slice_count;
use crate::tt::TtFormat;
use crate::ttt::TttFormat;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Uniform entries in [-1, 1).
pub fn random_dense(shape: &[usize], seed: u64) -> DenseTensor {
    let mut rng = rng(seed);
    let numel: usize = shape.iter().product();
    let data: Vec<f64> = (0..numel).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseTensor::from_data(shape, data).expect("valid shape")
}

/// Standard-normal entries.
pub fn random_gaussian(shape: &[usize], seed: u64) -> DenseTensor {
    let mut rng = rng(seed);
    let numel: usize = shape.iter().product();
    let data: Vec<f64> = (0..numel).map(|_| rng.sample(StandardNormal)).collect();
    DenseTensor::from_data(shape, data).expect("valid shape")
}

/// Random tubal-train format with the given internal rank profile: core `n`
/// has shape `r_{n-1} x I_n x r_n x T` with standard-normal entries.
pub fn random_ttt(dims: &[usize], tube_len: usize, ranks: &[usize], seed: u64) -> Result<TttFormat> {
    if dims.is_empty() {
        return Err(Error::shape("at least one mode required".into()));
    }
    if ranks.len() + 1 != dims.len() {
        return Err(Error::InfeasibleRanks(format!(
            "{} modes need {} internal ranks, got {}",
            dims.len(),
            dims.len() - 1,
            ranks.len()
        )));
    }
    let mut rng = rng(seed);
    let bounded = full_ranks(ranks);
    let mut cores = Vec::with_capacity(dims.len());
    for (n, &i_n) in dims.iter().enumerate() {
        let shape = [bounded[n], i_n, bounded[n + 1], tube_len];
        let numel: usize = shape.iter().product();
        let data: Vec<f64> = (0..numel).map(|_| rng.sample(StandardNormal)).collect();
        cores.push(DenseTensor::from_data(&shape, data)?);
    }
    TttFormat::new(cores)
}

/// Dense tensor contracted from [`random_ttt`]; shape `dims x tube_len`.
pub fn random_ttt_tensor(
    dims: &[usize],
    tube_len: usize,
    ranks: &[usize],
    seed: u64,
) -> Result<DenseTensor> {
    random_ttt(dims, tube_len, ranks, seed)?.contract()
}

/// Random classical TT format with standard-normal cores.
pub fn random_tt(dims: &[usize], ranks: &[usize], seed: u64) -> Result<TtFormat<f64>> {
    if ranks.len() + 1 != dims.len() {
        return Err(Error::InfeasibleRanks(format!(
            "{} modes need {} internal ranks, got {}",
            dims.len(),
            dims.len() - 1,
            ranks.len()
        )));
    }
    let mut rng = rng(seed);
    let bounded = full_ranks(ranks);
    let mut cores = Vec::with_capacity(dims.len());
    for (n, &i_n) in dims.iter().enumerate() {
        let shape = [bounded[n], i_n, bounded[n + 1]];
        let numel: usize = shape.iter().product();
        let data: Vec<f64> = (0..numel).map(|_| rng.sample(StandardNormal)).collect();
        cores.push(DenseTensor::from_data(&shape, data)?);
    }
    TtFormat::new(cores)
}

/// Third-order tensor with exact tubal rank `rank`, built in the Fourier
/// domain as `Q1 diag(sigma) Q2^H` per slice with conjugate mirroring.
pub fn random_tubal_rank_tensor(
    i1: usize,
    i2: usize,
    tube_len: usize,
    rank: usize,
    seed: u64,
) -> Result<DenseTensor> {
    if rank == 0 || rank > i1.min(i2) {
        return Err(Error::InfeasibleRanks(format!(
            "tubal rank {rank} out of range for {i1}x{i2} slices"
        )));
    }
    let mut rng = rng(seed);
    let half = explicit_slice_count(tube_len);
    let mut hat = ComplexTensor::zeros(&[i1, i2, tube_len]);
    let mut slices: Vec<DMatrix<Complex64>> = Vec::with_capacity(half);
    for k in 0..half {
        let self_conjugate = k == 0 || (tube_len % 2 == 0 && k == tube_len / 2);
        let q1 = random_orthonormal(&mut rng, i1, rank, self_conjugate);
        let q2 = random_orthonormal(&mut rng, i2, rank, self_conjugate);
        let mut sigma: Vec<f64> = (0..rank).map(|_| rng.random_range(0.5..2.0)).collect();
        sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut s = DMatrix::<Complex64>::zeros(rank, rank);
        for (j, &v) in sigma.iter().enumerate() {
            s[(j, j)] = Complex64::new(v, 0.0);
        }
        slices.push(&q1 * s * q2.adjoint());
    }
    for (k, m) in slices.iter().enumerate() {
        hat.set_frontal_slice(k, m)?;
    }
    for k in half..tube_len {
        let m = slices[tube_len - k].map(|z| z.conj());
        hat.set_frontal_slice(k, &m)?;
    }
    ifft_tube_real(&hat, ENFORCE_REAL_TOL)
}

fn random_orthonormal(
    rng: &mut ChaCha12Rng,
    n: usize,
    r: usize,
    real_valued: bool,
) -> DMatrix<Complex64> {
    let raw = DMatrix::<Complex64>::from_fn(n, r, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if real_valued { 0.0 } else { rng.sample(StandardNormal) };
        Complex64::new(re, im)
    });
    let qr = raw.qr();
    qr.q()
}

/// Adds Gaussian noise scaled so that `‖noise‖_F = level * ‖x‖_F`.
pub fn add_relative_noise(x: &DenseTensor, level: f64, seed: u64) -> DenseTensor {
    if level == 0.0 {
        return x.clone();
    }
    let noise = random_gaussian(x.shape(), seed);
    let scale = level * x.frobenius_norm() / noise.frobenius_norm();
    x.add(&noise.scale(scale)).expect("same shape")
}

/// Indicator tensor with entries in {0, 1}; each entry is removed (set to
/// zero) independently with probability `missing_fraction`.
pub fn bernoulli_mask(shape: &[usize], missing_fraction: f64, seed: u64) -> Result<DenseTensor> {
    if !(0.0..=1.0).contains(&missing_fraction) {
        return Err(Error::InvalidMask(format!(
            "missing fraction {missing_fraction} outside [0, 1]"
        )));
    }
    let mut rng = rng(seed);
    let numel: usize = shape.iter().product();
    let data: Vec<f64> = (0..numel)
        .map(|_| {
            if rng.random::<f64>() < missing_fraction {
                0.0
            } else {
                1.0
            }
        })
        .collect();
    DenseTensor::from_data(shape, data)
}

fn full_ranks(internal: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(internal.len() + 2);
    out.push(1);
    out.extend_from_slice(internal);
    out.push(1);
    out
}
