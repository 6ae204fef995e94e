//! Slice-wise Fourier-domain tensor SVD (T-SVD): full, fixed-rank
//! truncated, and tolerance-driven variants.
//!
//! Only the first `⌈(T+1)/2⌉` Fourier slices are factored; the remaining
//! slices follow from conjugate symmetry (`U` and `V` mirror-conjugated,
//! `S` mirror-copied), so the spatial-domain factors come out real.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{ifft_tube_real, ComplexTensor, DenseTensor, ENFORCE_REAL_TOL};
use crate::tprod::{explicit_slice_count, fourier_slices, tprod_fast, ttranspose};

/// Result of a (truncated) T-SVD: `x ≈ u ∗ s ∗ vᵀ` with partially
/// orthogonal `u`, `v` and f-diagonal `s`.
#[derive(Clone, Debug)]
pub struct TsvdFactors {
    /// `I1 x R x T`
    pub u: DenseTensor,
    /// `R x R x T`, f-diagonal with real nonnegative nonincreasing
    /// diagonal in every Fourier slice.
    pub s: DenseTensor,
    /// `I2 x R x T`
    pub v: DenseTensor,
    /// Retained tubal rank.
    pub rank: usize,
    /// Spatial-domain Frobenius norm of the discarded part,
    /// `sqrt((1/T) * Σ_slices Σ_{j>R} σ_j²)`.
    pub truncation_error: f64,
}

impl TsvdFactors {
    /// Contracts the factors back to a dense tensor.
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        tsvd_reconstruct(self)
    }
}

/// Rank-`r` truncated T-SVD per the slice-wise Fourier algorithm.
pub fn tsvd_truncated(x: &DenseTensor, rank: usize) -> Result<TsvdFactors> {
    let f = FourierTsvd::compute(x)?;
    if rank == 0 || rank > f.max_rank() {
        return Err(Error::InfeasibleRanks(format!(
            "tubal rank {rank} out of range 1..={} for shape {:?}",
            f.max_rank(),
            x.shape()
        )));
    }
    f.factors(rank)
}

/// Smallest-rank truncated T-SVD whose reconstruction error is at most
/// `delta` (absolute, Frobenius). `delta = 0` returns the full rank.
///
/// The rank is selected in the Fourier domain: the spatial squared error of
/// a rank-`R` truncation equals `(1/T) * Σ tail σ²`, so the tail budget is
/// `delta² * T`.
pub fn tsvd_tolerance(x: &DenseTensor, delta: f64) -> Result<TsvdFactors> {
    if delta < 0.0 {
        return Err(Error::NumericFailure(format!(
            "negative tolerance {delta}"
        )));
    }
    let f = FourierTsvd::compute(x)?;
    let rank = f.smallest_rank_for(delta);
    f.factors(rank)
}

/// `u ∗ s ∗ vᵀ` via the fast t-product.
pub fn tsvd_reconstruct(f: &TsvdFactors) -> Result<DenseTensor> {
    let us = tprod_fast(&f.u, &f.s)?;
    tprod_fast(&us, &ttranspose(&f.v)?)
}

/// Full thin SVDs of the explicit Fourier slices of a third-order tensor.
/// Shared by the public T-SVD variants and by the tubal-train constructor,
/// which needs `u` and the carry `s ∗ vᵀ` without materializing `v`.
pub(crate) struct FourierTsvd {
    i1: usize,
    i2: usize,
    tube_len: usize,
    /// One entry per explicit slice (0 ..= T/2).
    slices: Vec<SliceSvd>,
}

pub(crate) struct SliceSvd {
    u: DMatrix<Complex64>,
    sigma: Vec<f64>,
    v_t: DMatrix<Complex64>,
}

impl FourierTsvd {
    pub(crate) fn compute(x: &DenseTensor) -> Result<Self> {
        if x.order() != 3 {
            return Err(Error::shape(format!(
                "T-SVD requires a third-order tensor, got order {}",
                x.order()
            )));
        }
        let (i1, i2, t) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        let hat = fourier_slices(x)?;
        let half = explicit_slice_count(t);
        let slices: Vec<Result<SliceSvd>> = hat[..half]
            .par_iter()
            .map(|m| {
                let svd = nalgebra::SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
                    .ok_or_else(|| {
                        Error::NumericFailure("slice SVD did not converge".into())
                    })?;
                Ok(SliceSvd {
                    u: svd.u.expect("requested"),
                    sigma: svd.singular_values.as_slice().to_vec(),
                    v_t: svd.v_t.expect("requested"),
                })
            })
            .collect();
        let slices = slices.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(FourierTsvd {
            i1,
            i2,
            tube_len: t,
            slices,
        })
    }

    pub(crate) fn max_rank(&self) -> usize {
        self.i1.min(self.i2)
    }

    /// Multiplicity of explicit slice `k` in sums over all `T` slices.
    fn weight(&self, k: usize) -> f64 {
        if k == 0 || (self.tube_len % 2 == 0 && k == self.tube_len / 2) {
            1.0
        } else {
            2.0
        }
    }

    /// Fourier-domain energy discarded by truncating every slice at `rank`.
    pub(crate) fn tail_energy(&self, rank: usize) -> f64 {
        self.slices
            .iter()
            .enumerate()
            .map(|(k, s)| {
                // Sum smallest-first for accuracy.
                let tail: f64 = s.sigma[rank.min(s.sigma.len())..]
                    .iter()
                    .rev()
                    .map(|v| v * v)
                    .sum();
                self.weight(k) * tail
            })
            .sum()
    }

    /// Smallest rank whose spatial truncation error is at most `delta`.
    pub(crate) fn smallest_rank_for(&self, delta: f64) -> usize {
        let budget = delta * delta * self.tube_len as f64;
        let mut rank = self.max_rank();
        while rank > 1 && self.tail_energy(rank - 1) <= budget {
            rank -= 1;
        }
        rank
    }

    /// Spatial-domain error of a rank-`r` truncation.
    pub(crate) fn truncation_error(&self, rank: usize) -> f64 {
        (self.tail_energy(rank) / self.tube_len as f64).sqrt()
    }

    fn mirrored<F>(&self, shape: [usize; 3], explicit: F) -> Result<DenseTensor>
    where
        F: Fn(&SliceSvd) -> DMatrix<Complex64>,
    {
        let t = self.tube_len;
        let half = self.slices.len();
        let mut hat = ComplexTensor::zeros(&shape);
        for (k, s) in self.slices.iter().enumerate() {
            hat.set_frontal_slice(k, &explicit(s))?;
        }
        for k in half..t {
            let m = explicit(&self.slices[t - k]).map(|z| z.conj());
            hat.set_frontal_slice(k, &m)?;
        }
        ifft_tube_real(&hat, ENFORCE_REAL_TOL)
    }

    /// Spatial `u` factor at rank `r` (`I1 x r x T`).
    pub(crate) fn u_tensor(&self, rank: usize) -> Result<DenseTensor> {
        self.mirrored([self.i1, rank, self.tube_len], |s| {
            s.u.columns(0, rank).into_owned()
        })
    }

    /// Spatial carry `s ∗ vᵀ` at rank `r` (`r x I2 x T`), formed directly
    /// in the Fourier domain as `diag(σ) v_t` per slice.
    pub(crate) fn carry(&self, rank: usize) -> Result<DenseTensor> {
        self.mirrored([rank, self.i2, self.tube_len], |s| {
            let mut m = s.v_t.rows(0, rank).into_owned();
            for j in 0..rank {
                let scale = Complex64::new(s.sigma[j], 0.0);
                m.row_mut(j).apply(|z| *z *= scale);
            }
            m
        })
    }

    pub(crate) fn factors(&self, rank: usize) -> Result<TsvdFactors> {
        let u = self.u_tensor(rank)?;
        let s = self.mirrored([rank, rank, self.tube_len], |sl| {
            let mut m = DMatrix::<Complex64>::zeros(rank, rank);
            for j in 0..rank {
                m[(j, j)] = Complex64::new(sl.sigma[j], 0.0);
            }
            m
        })?;
        let v = self.mirrored([self.i2, rank, self.tube_len], |sl| {
            sl.v_t.rows(0, rank).adjoint()
        })?;
        Ok(TsvdFactors {
            u,
            s,
            v,
            rank,
            truncation_error: self.truncation_error(rank),
        })
    }
}
