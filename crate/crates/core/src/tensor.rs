//! Dense tensor containers with column-major storage, tube-mode FFT, and
//! Frobenius norms.
//!
//! The last mode of a tensor is its *tube* mode: the mode along which the
//! t-product performs circular convolution. All storage is column-major
//! (first index varies fastest), so reshapes reinterpret the flat buffer
//! without moving data, exactly like MATLAB's `reshape`. The FFT follows the
//! MATLAB convention: unnormalized forward transform, `1/T` on the inverse.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Dense tensor over scalar type `T` with explicit shape and column-major
/// flat storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

/// Real tensor (64-bit floats).
pub type DenseTensor = Tensor<f64>;
/// Complex tensor, as produced by the tube-mode FFT.
pub type ComplexTensor = Tensor<Complex64>;

/// A length-`T` fiber along the tube mode — the scalar of the t-product
/// algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Tube {
    pub values: Vec<f64>,
}

impl<T: Copy + num_traits::Zero> Tensor<T> {
    /// All-zero tensor of the given shape.
    pub fn zeros(shape: &[usize]) -> Self {
        let numel = checked_numel(shape).expect("mode sizes overflow");
        Tensor {
            shape: shape.to_vec(),
            data: vec![T::zero(); numel],
        }
    }
}

impl<T: Copy> Tensor<T> {
    /// Builds a tensor from column-major flat data.
    pub fn from_data(shape: &[usize], data: Vec<T>) -> Result<Self> {
        validate_shape(shape)?;
        let numel = checked_numel(shape)
            .ok_or_else(|| Error::shape("mode size product overflows usize"))?;
        if data.len() != numel {
            return Err(Error::shape(format!(
                "data length {} does not match shape {:?} (numel {})",
                data.len(),
                shape,
                numel
            )));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Builds a tensor by evaluating `f` at every multi-index, column-major.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Self
    where
        T: num_traits::Zero,
    {
        let mut out = Self::zeros(shape);
        let mut idx = vec![0usize; shape.len()];
        for pos in 0..out.numel() {
            out.data[pos] = f(&idx);
            advance(&mut idx, shape);
        }
        out
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Number of modes.
    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Length of the last (tube) mode.
    pub fn tube_len(&self) -> usize {
        *self.shape.last().expect("tensor has at least one mode")
    }

    /// Product of all modes except the last.
    pub fn leading_numel(&self) -> usize {
        self.numel() / self.tube_len()
    }

    /// Column-major linear offset of a multi-index.
    pub fn linear_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.shape.len() {
            return Err(Error::IndexOutOfRange(format!(
                "index has {} components, tensor has {} modes",
                index.len(),
                self.shape.len()
            )));
        }
        let mut offset = 0usize;
        let mut stride = 1usize;
        for (k, (&i, &n)) in index.iter().zip(&self.shape).enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange(format!(
                    "index {i} out of range for mode {k} of size {n}"
                )));
            }
            offset += i * stride;
            stride *= n;
        }
        Ok(offset)
    }

    pub fn get(&self, index: &[usize]) -> Result<T> {
        Ok(self.data[self.linear_index(index)?])
    }

    /// Reinterprets the flat data under a new shape with the same entry
    /// order. Never moves data (column-major contract).
    pub fn reshape(&self, new_shape: &[usize]) -> Result<Self> {
        self.clone().into_reshape(new_shape)
    }

    /// Consuming reshape; no data copy beyond the move.
    pub fn into_reshape(self, new_shape: &[usize]) -> Result<Self> {
        validate_shape(new_shape)?;
        let numel = checked_numel(new_shape)
            .ok_or_else(|| Error::shape("mode size product overflows usize"))?;
        if numel != self.data.len() {
            return Err(Error::shape(format!(
                "cannot reshape {:?} (numel {}) to {:?} (numel {})",
                self.shape,
                self.data.len(),
                new_shape,
                numel
            )));
        }
        Ok(Tensor {
            shape: new_shape.to_vec(),
            data: self.data,
        })
    }

    /// Flat slice holding frontal slice `k` of a third-order tensor
    /// (column-major I1 x I2 block).
    pub fn frontal_slice_data(&self, k: usize) -> Result<&[T]> {
        if self.order() != 3 {
            return Err(Error::shape(format!(
                "frontal slice requires a third-order tensor, got order {}",
                self.order()
            )));
        }
        let (i1, i2, i3) = (self.shape[0], self.shape[1], self.shape[2]);
        if k >= i3 {
            return Err(Error::IndexOutOfRange(format!(
                "frontal slice {k} out of range for {i3} slices"
            )));
        }
        let block = i1 * i2;
        Ok(&self.data[k * block..(k + 1) * block])
    }

    /// Frontal slice `k` of a third-order tensor as a matrix.
    pub fn frontal_slice(&self, k: usize) -> Result<DMatrix<T>>
    where
        T: nalgebra::Scalar,
    {
        let (i1, i2) = (self.shape[0], self.shape[1]);
        let chunk = self.frontal_slice_data(k)?;
        Ok(DMatrix::from_column_slice(i1, i2, chunk))
    }

    /// Overwrites frontal slice `k` of a third-order tensor.
    pub fn set_frontal_slice(&mut self, k: usize, m: &DMatrix<T>) -> Result<()>
    where
        T: nalgebra::Scalar,
    {
        if self.order() != 3 {
            return Err(Error::shape("set_frontal_slice requires order 3".into()));
        }
        let (i1, i2, i3) = (self.shape[0], self.shape[1], self.shape[2]);
        if k >= i3 {
            return Err(Error::IndexOutOfRange(format!(
                "frontal slice {k} out of range for {i3} slices"
            )));
        }
        if m.nrows() != i1 || m.ncols() != i2 {
            return Err(Error::shape(format!(
                "slice is {}x{}, tensor slices are {i1}x{i2}",
                m.nrows(),
                m.ncols()
            )));
        }
        let block = i1 * i2;
        self.data[k * block..(k + 1) * block].copy_from_slice(m.as_slice());
        Ok(())
    }

    /// Flat slice holding hyper-slice `k` along the last mode (all leading
    /// modes, tube index fixed). Contiguous because storage is column-major.
    pub fn last_mode_slice_data(&self, k: usize) -> Result<&[T]> {
        let t = self.tube_len();
        if k >= t {
            return Err(Error::IndexOutOfRange(format!(
                "slice {k} out of range for tube length {t}"
            )));
        }
        let lead = self.leading_numel();
        Ok(&self.data[k * lead..(k + 1) * lead])
    }

    /// Hyper-slice `k` along the last mode as a tensor over the leading
    /// modes.
    pub fn last_mode_slice(&self, k: usize) -> Result<Tensor<T>> {
        let chunk = self.last_mode_slice_data(k)?.to_vec();
        Tensor::from_data(&self.shape[..self.order() - 1], chunk)
    }

    /// Whole tensor viewed as a `rows x cols` column-major matrix, where
    /// `rows` is the product of the first `split` modes.
    pub fn as_matrix(&self, split: usize) -> DMatrix<T>
    where
        T: nalgebra::Scalar,
    {
        let rows: usize = self.shape[..split].iter().product();
        let cols = self.numel() / rows.max(1);
        DMatrix::from_column_slice(rows.max(1), cols, &self.data)
    }
}

impl DenseTensor {
    /// sqrt of the sum of squared entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> ComplexTensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Elementwise difference; shapes must match.
    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(Error::shape(format!(
                "cannot subtract {:?} from {:?}",
                other.shape, self.shape
            )));
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Elementwise sum; shapes must match.
    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(Error::shape(format!(
                "cannot add {:?} to {:?}",
                other.shape, self.shape
            )));
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> DenseTensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

impl ComplexTensor {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.data.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_real_abs(&self) -> f64 {
        self.data.iter().map(|v| v.re.abs()).fold(0.0, f64::max)
    }

    /// Drops imaginary parts without checking them; see [`ifft_tube_real`]
    /// for the checked path.
    pub fn real_part(&self) -> DenseTensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v.re).collect(),
        }
    }

    pub fn conj(&self) -> ComplexTensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }
}

/// ‖x − y‖_F / ‖x‖_F. Errors on shape mismatch or a zero-norm reference.
pub fn relative_error(reference: &DenseTensor, estimate: &DenseTensor) -> Result<f64> {
    let diff = reference.sub(estimate)?;
    let denom = reference.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::ZeroNormReference(
            "relative error against an all-zero reference".into(),
        ));
    }
    Ok(diff.frobenius_norm() / denom)
}

/// Default relative tolerance for residual-imaginary checks.
pub const ENFORCE_REAL_TOL: f64 = 1e-8;

/// Unnormalized DFT of every tube (fiber along the last mode).
pub fn fft_tube(x: &DenseTensor) -> ComplexTensor {
    let mut out = x.to_complex();
    fft_last_mode_in_place(&mut out, FftDirection::Forward);
    out
}

/// Inverse DFT (scaled by 1/T) of every tube; stays complex.
pub fn ifft_tube(x: &ComplexTensor) -> ComplexTensor {
    let mut out = x.clone();
    fft_last_mode_in_place(&mut out, FftDirection::Inverse);
    out
}

/// Inverse DFT followed by a residual-imaginary check: the result must be
/// real to within `max |im| <= tol * (1 + max |re|)`.
pub fn ifft_tube_real(x: &ComplexTensor, tol: f64) -> Result<DenseTensor> {
    let out = ifft_tube(x);
    enforce_real(&out, tol)
}

/// Checks the residual-imaginary bound and strips imaginary parts.
pub fn enforce_real(x: &ComplexTensor, tol: f64) -> Result<DenseTensor> {
    let max_imag = x.max_imag_abs();
    let allowed = tol * (1.0 + x.max_real_abs());
    if max_imag > allowed {
        return Err(Error::ResidualImaginary { max_imag, allowed });
    }
    Ok(x.real_part())
}

enum FftDirection {
    Forward,
    Inverse,
}

fn fft_last_mode_in_place(x: &mut ComplexTensor, dir: FftDirection) {
    let t = x.tube_len();
    let lead = x.leading_numel();
    if t == 1 {
        return; // length-1 DFT is the identity under both conventions
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = match dir {
        FftDirection::Forward => planner.plan_fft_forward(t),
        FftDirection::Inverse => planner.plan_fft_inverse(t),
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); t];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let scale = match dir {
        FftDirection::Forward => 1.0,
        FftDirection::Inverse => 1.0 / t as f64,
    };
    let data = x.data_mut();
    for j in 0..lead {
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = data[j + k * lead];
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (k, value) in buf.iter().enumerate() {
            data[j + k * lead] = value * scale;
        }
    }
}

fn validate_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() {
        return Err(Error::shape("shape must have at least one mode".into()));
    }
    if shape.iter().any(|&n| n == 0) {
        return Err(Error::shape(format!("zero mode size in shape {shape:?}")));
    }
    Ok(())
}

fn checked_numel(shape: &[usize]) -> Option<usize> {
    shape.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n))
}

fn advance(idx: &mut [usize], shape: &[usize]) {
    for (i, &n) in idx.iter_mut().zip(shape) {
        *i += 1;
        if *i < n {
            return;
        }
        *i = 0;
    }
}
