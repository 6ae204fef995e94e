//! The t-product algebra for third-order tensors.
//!
//! Two routes are provided for the product itself: [`tprod_reference`]
//! materializes the block-circulant matrix of the defining equation and is
//! the ground truth (and test oracle); [`tprod_fast`] block-diagonalizes it
//! with the tube-mode FFT and multiplies only the first `⌈(T+1)/2⌉` Fourier
//! slices, filling the rest by conjugate symmetry.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{
    fft_tube, ifft_tube_real, ComplexTensor, DenseTensor, Tensor, ENFORCE_REAL_TOL,
};

/// Number of Fourier slices that must be computed explicitly for tube
/// length `t`; the remaining slices follow by conjugate symmetry.
pub fn explicit_slice_count(t: usize) -> usize {
    t / 2 + 1
}

/// Mirror partner of Fourier slice `k` (0-based): slice `k` of a real
/// tensor's transform is the conjugate of slice `t - k`.
pub(crate) fn mirror_index(k: usize, t: usize) -> usize {
    debug_assert!(k > 0 && k < t);
    t - k
}

fn check_tprod_shapes(x: &DenseTensor, y: &DenseTensor) -> Result<(usize, usize, usize, usize)> {
    if x.order() != 3 || y.order() != 3 {
        return Err(Error::shape(format!(
            "t-product requires third-order tensors, got orders {} and {}",
            x.order(),
            y.order()
        )));
    }
    let (i1, i2, i3) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let (j1, i4, j3) = (y.shape()[0], y.shape()[1], y.shape()[2]);
    if i2 != j1 {
        return Err(Error::shape(format!(
            "inner mode mismatch: {i1}x{i2}x{i3} * {j1}x{i4}x{j3}"
        )));
    }
    if i3 != j3 {
        return Err(Error::shape(format!(
            "tube length mismatch: {i3} vs {j3}"
        )));
    }
    Ok((i1, i2, i3, i4))
}

/// Block-circulant reference t-product: `fold(circ(x) * unfold(y))`.
///
/// This is the defining formula, kept as a documented slow path; use
/// [`tprod_fast`] everywhere performance matters.
pub fn tprod_reference(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    let (i1, i2, t, i4) = check_tprod_shapes(x, y)?;

    let mut circ = DMatrix::<f64>::zeros(i1 * t, i2 * t);
    for bi in 0..t {
        for bj in 0..t {
            let src = x.frontal_slice((bi + t - bj) % t)?;
            circ.view_mut((bi * i1, bj * i2), (i1, i2)).copy_from(&src);
        }
    }
    let mut unfold = DMatrix::<f64>::zeros(i2 * t, i4);
    for b in 0..t {
        unfold
            .view_mut((b * i2, 0), (i2, i4))
            .copy_from(&y.frontal_slice(b)?);
    }
    let folded = circ * unfold;
    let mut out = DenseTensor::zeros(&[i1, i4, t]);
    for b in 0..t {
        let block = folded.view((b * i1, 0), (i1, i4)).into_owned();
        out.set_frontal_slice(b, &block)?;
    }
    Ok(out)
}

/// Fast t-product via the tube-mode FFT.
pub fn tprod_fast(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    let (i1, _, t, i4) = check_tprod_shapes(x, y)?;
    let xf = fft_tube(x);
    let yf = fft_tube(y);

    let half = explicit_slice_count(t);
    let products: Vec<DMatrix<Complex64>> = (0..half)
        .into_par_iter()
        .map(|k| {
            let a = xf.frontal_slice(k).expect("slice in range");
            let b = yf.frontal_slice(k).expect("slice in range");
            a * b
        })
        .collect();

    let mut cf = ComplexTensor::zeros(&[i1, i4, t]);
    for (k, m) in products.iter().enumerate() {
        cf.set_frontal_slice(k, m)?;
    }
    for k in half..t {
        let mirrored = products[mirror_index(k, t)].map(|z| z.conj());
        cf.set_frontal_slice(k, &mirrored)?;
    }
    ifft_tube_real(&cf, ENFORCE_REAL_TOL)
}

/// Tensor transpose: transpose every frontal slice and reverse the order of
/// slices 2..T. In the Fourier domain this is the slicewise conjugate
/// transpose.
pub fn ttranspose(x: &DenseTensor) -> Result<DenseTensor> {
    if x.order() != 3 {
        return Err(Error::shape(format!(
            "ttranspose requires a third-order tensor, got order {}",
            x.order()
        )));
    }
    let (i1, i2, t) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let mut out = DenseTensor::zeros(&[i2, i1, t]);
    for k in 0..t {
        let src = x.frontal_slice(if k == 0 { 0 } else { t - k })?;
        out.set_frontal_slice(k, &src.transpose())?;
    }
    Ok(out)
}

/// Identity tensor: first frontal slice is the identity matrix, the rest
/// are zero. Every Fourier slice equals the identity.
pub fn identity_tensor(size: usize, tube_len: usize) -> DenseTensor {
    let mut out = DenseTensor::zeros(&[size, size, tube_len]);
    for d in 0..size {
        out.data_mut()[d * size + d] = 1.0;
    }
    out
}

/// True iff `‖qᵀ∗q − I‖_F ≤ tol` and `‖q∗qᵀ − I‖_F ≤ tol` (square `q`).
pub fn is_orthogonal(q: &DenseTensor, tol: f64) -> Result<bool> {
    if q.order() != 3 {
        return Err(Error::shape("orthogonality check requires order 3".into()));
    }
    if q.shape()[0] != q.shape()[1] {
        return Err(Error::shape(format!(
            "orthogonality requires square lateral dimensions, got {:?}",
            q.shape()
        )));
    }
    let qt = ttranspose(q)?;
    Ok(gram_residual(&qt, q)? <= tol && gram_residual(q, &qt)? <= tol)
}

/// Partial-orthogonality test for a rectangular `I1 x R x T` factor:
/// `‖qᵀ∗q − I_R‖_F ≤ tol`.
pub fn is_partially_orthogonal(q: &DenseTensor, tol: f64) -> Result<bool> {
    if q.order() != 3 {
        return Err(Error::shape("orthogonality check requires order 3".into()));
    }
    let qt = ttranspose(q)?;
    Ok(gram_residual(&qt, q)? <= tol)
}

fn gram_residual(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    let gram = tprod_fast(a, b)?;
    let eye = identity_tensor(gram.shape()[0], gram.shape()[2]);
    Ok(gram.sub(&eye)?.frobenius_norm())
}

/// True iff every off-diagonal entry of every Fourier slice has magnitude
/// at most `tol`.
pub fn is_f_diagonal(s: &DenseTensor, tol: f64) -> Result<bool> {
    if s.order() != 3 {
        return Err(Error::shape("f-diagonality check requires order 3".into()));
    }
    let sf = fft_tube(s);
    let (i1, i2, t) = (s.shape()[0], s.shape()[1], s.shape()[2]);
    for k in 0..t {
        let chunk = sf.frontal_slice_data(k)?;
        for j in 0..i2 {
            for i in 0..i1 {
                if i != j && chunk[j * i1 + i].norm() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Tubal outer product of hyper-vectors: each `a_n` is an `I_n x T` tensor
/// of tubes; the result has shape `I_1 x ... x I_N x T` with entry tubes
/// equal to the circular convolution of the selected tubes.
///
/// Computed in the Fourier domain where tube convolution is pointwise
/// multiplication.
pub fn tubal_outer_product(vectors: &[DenseTensor]) -> Result<DenseTensor> {
    if vectors.is_empty() {
        return Err(Error::shape("tubal outer product of no vectors".into()));
    }
    for v in vectors {
        if v.order() != 2 {
            return Err(Error::shape(format!(
                "hyper-vectors must be I x T tensors, got order {}",
                v.order()
            )));
        }
    }
    let t = vectors[0].shape()[1];
    if vectors.iter().any(|v| v.shape()[1] != t) {
        return Err(Error::shape(format!(
            "tube-length mismatch across hyper-vectors: {:?}",
            vectors.iter().map(|v| v.shape()[1]).collect::<Vec<_>>()
        )));
    }

    // Progressive pointwise outer product per frequency.
    let mut cur: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); t];
    let mut cur_lead = 1usize;
    let mut shape: Vec<usize> = Vec::new();
    for v in vectors {
        let vf = fft_tube(v);
        let i_n = v.shape()[0];
        let mut next = vec![Complex64::new(0.0, 0.0); cur_lead * i_n * t];
        let next_lead = cur_lead * i_n;
        for k in 0..t {
            for i in 0..i_n {
                let w = vf.data()[i + k * i_n];
                for p in 0..cur_lead {
                    next[p + i * cur_lead + k * next_lead] = cur[p + k * cur_lead] * w;
                }
            }
        }
        cur = next;
        cur_lead = next_lead;
        shape.push(i_n);
    }
    shape.push(t);
    let hat = ComplexTensor::from_data(&shape, cur)?;
    ifft_tube_real(&hat, ENFORCE_REAL_TOL)
}

/// Frontal-slice matrices of the tube-mode FFT, for modules that work
/// slice-wise in the Fourier domain.
pub(crate) fn fourier_slices(x: &DenseTensor) -> Result<Vec<DMatrix<Complex64>>> {
    let xf = fft_tube(x);
    (0..x.tube_len()).map(|k| xf.frontal_slice(k)).collect()
}

/// Rebuilds a real tensor from per-slice Fourier matrices.
pub(crate) fn from_fourier_slices(
    slices: &[DMatrix<Complex64>],
    shape: &[usize; 3],
) -> Result<DenseTensor> {
    let mut hat = ComplexTensor::zeros(shape);
    for (k, m) in slices.iter().enumerate() {
        hat.set_frontal_slice(k, m)?;
    }
    ifft_tube_real(&hat, ENFORCE_REAL_TOL)
}

impl Tensor<f64> {
    /// Convenience t-product operator used by higher-level modules.
    pub fn tprod(&self, rhs: &DenseTensor) -> Result<DenseTensor> {
        tprod_fast(self, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_tensor(shape: &[usize], seed: u64) -> DenseTensor {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let numel: usize = shape.iter().product();
        let data: Vec<f64> = (0..numel).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseTensor::from_data(shape, data).unwrap()
    }

    fn max_abs_diff(a: &DenseTensor, b: &DenseTensor) -> f64 {
        a.sub(b)
            .unwrap()
            .data()
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    // Direct O(T^2) circular convolution, independent of the FFT path.
    fn conv_oracle(a: &[f64], b: &[f64]) -> Vec<f64> {
        let t = a.len();
        let mut out = vec![0.0; t];
        for (k, slot) in out.iter_mut().enumerate() {
            for j in 0..t {
                *slot += a[j] * b[(k + t - j) % t];
            }
        }
        out
    }

    #[test]
    fn reference_identity_law() {
        let x = random_tensor(&[4, 3, 5], 1);
        let id = identity_tensor(4, 5);
        let prod = tprod_reference(&id, &x).unwrap();
        assert!(max_abs_diff(&prod, &x) < 1e-13);
    }

    #[test]
    fn reference_degenerates_to_matrix_product_for_t1() {
        let x = random_tensor(&[3, 4, 1], 2);
        let y = random_tensor(&[4, 2, 1], 3);
        let c = tprod_reference(&x, &y).unwrap();
        let m = x.frontal_slice(0).unwrap() * y.frontal_slice(0).unwrap();
        let mut expect = DenseTensor::zeros(&[3, 2, 1]);
        expect.set_frontal_slice(0, &m).unwrap();
        assert!(max_abs_diff(&c, &expect) < 1e-13);
    }

    #[test]
    fn reference_single_tube_is_circular_convolution() {
        let t = 6;
        let a: Vec<f64> = (0..t).map(|k| (k as f64).sin() + 0.5).collect();
        let b: Vec<f64> = (0..t).map(|k| (k as f64 * 0.7).cos()).collect();
        let mut x = DenseTensor::zeros(&[1, 1, t]);
        let mut y = DenseTensor::zeros(&[1, 1, t]);
        x.data_mut().copy_from_slice(&a);
        y.data_mut().copy_from_slice(&b);
        let c = tprod_reference(&x, &y).unwrap();
        let expect = conv_oracle(&a, &b);
        for (got, want) in c.data().iter().zip(&expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_matches_reference() {
        let x = random_tensor(&[5, 4, 7], 4);
        let y = random_tensor(&[4, 6, 7], 5);
        let a = tprod_reference(&x, &y).unwrap();
        let b = tprod_fast(&x, &y).unwrap();
        assert!(max_abs_diff(&a, &b) <= 1e-10);
    }

    #[test]
    fn fast_matches_reference_even_tube_length() {
        // Even T exercises the self-conjugate Nyquist slice.
        let x = random_tensor(&[3, 5, 6], 6);
        let y = random_tensor(&[5, 2, 6], 7);
        let a = tprod_reference(&x, &y).unwrap();
        let b = tprod_fast(&x, &y).unwrap();
        assert!(max_abs_diff(&a, &b) <= 1e-10);
    }

    #[test]
    fn fast_identity_law() {
        let x = random_tensor(&[3, 4, 4], 8);
        let id = identity_tensor(3, 4);
        let prod = tprod_fast(&id, &x).unwrap();
        assert!(max_abs_diff(&prod, &x) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let x = random_tensor(&[3, 4, 5], 9);
        let y = random_tensor(&[3, 4, 5], 10);
        assert!(matches!(
            tprod_fast(&x, &y),
            Err(Error::ShapeMismatch(_))
        ));
        let z = random_tensor(&[4, 3, 4], 11);
        assert!(matches!(
            tprod_fast(&x, &z),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn transpose_is_involution_and_matrix_case() {
        let x = random_tensor(&[3, 4, 5], 12);
        let xtt = ttranspose(&ttranspose(&x).unwrap()).unwrap();
        assert_eq!(max_abs_diff(&x, &xtt), 0.0);

        let m = random_tensor(&[3, 4, 1], 13);
        let mt = ttranspose(&m).unwrap();
        let expect = m.frontal_slice(0).unwrap().transpose();
        assert_eq!(mt.frontal_slice(0).unwrap(), expect);
    }

    #[test]
    fn transpose_is_conjugate_transpose_in_fourier_domain() {
        let x = random_tensor(&[3, 4, 5], 14);
        let xf = fft_tube(&x);
        let xtf = fft_tube(&ttranspose(&x).unwrap());
        for k in 0..5 {
            let a = xf.frontal_slice(k).unwrap().map(|z| z.conj()).transpose();
            let b = xtf.frontal_slice(k).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_tensor_fourier_slices_are_identity() {
        let id = identity_tensor(3, 4);
        let idf = fft_tube(&id);
        for k in 0..4 {
            let m = idf.frontal_slice(k).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((m[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-13);
                }
            }
        }
        assert_eq!(identity_tensor(2, 1).frontal_slice(0).unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn orthogonality_predicates() {
        let id = identity_tensor(3, 4);
        assert!(is_orthogonal(&id, 1e-8).unwrap());
        assert!(!is_orthogonal(&id.scale(2.0), 1e-8).unwrap());
        let rect = random_tensor(&[4, 2, 3], 15);
        assert!(is_partially_orthogonal(&rect, 1e-8).is_ok());
    }

    #[test]
    fn f_diagonality_detects_off_diagonal_fourier_energy() {
        let id = identity_tensor(3, 4);
        assert!(is_f_diagonal(&id, 1e-8).unwrap());

        // Construct a tensor with one off-diagonal Fourier entry of 1e-3.
        let mut hat = ComplexTensor::zeros(&[3, 3, 4]);
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        m[(0, 1)] = Complex64::new(1e-3, 0.0);
        for k in 0..4 {
            hat.set_frontal_slice(k, &m).unwrap();
        }
        let s = ifft_tube_real(&hat, ENFORCE_REAL_TOL).unwrap();
        assert!(!is_f_diagonal(&s, 1e-8).unwrap());
        assert!(is_f_diagonal(&s, 1e-2).unwrap());
    }

    #[test]
    fn outer_product_of_delta_tubes_is_delta() {
        let t = 5;
        let mut delta = DenseTensor::zeros(&[2, t]);
        delta.data_mut()[0] = 1.0;
        delta.data_mut()[1] = 1.0;
        let y = tubal_outer_product(&[delta.clone(), delta.clone()]).unwrap();
        assert_eq!(y.shape(), &[2, 2, t]);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..t {
                    let want = if k == 0 { 1.0 } else { 0.0 };
                    assert!((y.get(&[i, j, k]).unwrap() - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn outer_product_t1_is_ordinary_outer_product() {
        let a = DenseTensor::from_data(&[3, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let b = DenseTensor::from_data(&[2, 1], vec![4.0, 5.0]).unwrap();
        let y = tubal_outer_product(&[a, b]).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let want = (i as f64 + 1.0) * (j as f64 + 4.0);
                assert!((y.get(&[i, j, 0]).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outer_product_matches_direct_convolution() {
        let a = random_tensor(&[2, 3], 16);
        let b = random_tensor(&[2, 3], 17);
        let y = tubal_outer_product(&[a.clone(), b.clone()]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let ta: Vec<f64> = (0..3).map(|k| a.get(&[i, k]).unwrap()).collect();
                let tb: Vec<f64> = (0..3).map(|k| b.get(&[j, k]).unwrap()).collect();
                let want = conv_oracle(&ta, &tb);
                for k in 0..3 {
                    assert!((y.get(&[i, j, k]).unwrap() - want[k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn outer_product_rejects_tube_mismatch() {
        let a = DenseTensor::zeros(&[2, 3]);
        let b = DenseTensor::zeros(&[2, 4]);
        assert!(matches!(
            tubal_outer_product(&[a, b]),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
