//! Dense third-order tensors.
//!
//! Entries are stored with the row index fastest, then the column index,
//! then the tube index, so frontal slice `k` occupies the contiguous range
//! `k*n1*n2 .. (k+1)*n1*n2` in column-major order.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Shape `(n1, n2, n3)` of a third-order tensor.
pub type Shape = (usize, usize, usize);

fn check_dims(op: &'static str, n1: usize, n2: usize, n3: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::InvalidDimension { op, detail: "every dimension must be at least 1" });
    }
    Ok(())
}

/// Dense real `n1 x n2 x n3` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        check_dims("zeros", n1, n2, n3)?;
        Ok(Self { n1, n2, n3, data: vec![0.0; n1 * n2 * n3] })
    }

    /// Builds a tensor from i-fastest data, rejecting NaN and infinities.
    pub fn from_vec(n1: usize, n2: usize, n3: usize, data: Vec<f64>) -> Result<Self> {
        check_dims("from_vec", n1, n2, n3)?;
        if data.len() != n1 * n2 * n3 {
            return Err(Error::ShapeMismatch {
                op: "from_vec",
                expected: (n1, n2, n3),
                found: (data.len(), 1, 1),
            });
        }
        if let Some(position) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { position });
        }
        Ok(Self { n1, n2, n3, data })
    }

    pub fn from_fn(
        n1: usize,
        n2: usize,
        n3: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        check_dims("from_fn", n1, n2, n3)?;
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for k in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::from_vec(n1, n2, n3, data)
    }

    /// Builds a tensor from frontal slices, each given column-major.
    pub fn from_slices(n1: usize, n2: usize, slices: &[Vec<f64>]) -> Result<Self> {
        let n3 = slices.len();
        check_dims("from_slices", n1, n2, n3)?;
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for s in slices {
            if s.len() != n1 * n2 {
                return Err(Error::ShapeMismatch {
                    op: "from_slices",
                    expected: (n1, n2, 1),
                    found: (s.len(), 1, 1),
                });
            }
            data.extend_from_slice(s);
        }
        Self::from_vec(n1, n2, n3, data)
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        (self.n1, self.n2, self.n3)
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }

    #[inline]
    pub fn n3(&self) -> usize {
        self.n3
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2 && k < self.n3);
        i + self.n1 * (j + self.n2 * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let o = self.offset(i, j, k);
        self.data[o] = value;
    }

    /// Frontal slice `k`, column-major.
    pub fn frontal_slice(&self, k: usize) -> &[f64] {
        let m = self.n1 * self.n2;
        &self.data[k * m..(k + 1) * m]
    }

    pub fn frontal_slice_mut(&mut self, k: usize) -> &mut [f64] {
        let m = self.n1 * self.n2;
        &mut self.data[k * m..(k + 1) * m]
    }

    /// The `(i, j)` tube.
    pub fn tube(&self, i: usize, j: usize) -> Tube {
        Tube((0..self.n3).map(|k| self.get(i, j, k)).collect())
    }

    pub fn set_tube(&mut self, i: usize, j: usize, tube: &Tube) {
        assert_eq!(tube.len(), self.n3, "tube length must equal n3");
        for (k, &v) in tube.0.iter().enumerate() {
            self.set(i, j, k, v);
        }
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Tensor3 {
        Tensor3 { n1: self.n1, n2: self.n2, n3: self.n3, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: f64) -> Tensor3 {
        self.map(|v| v * c)
    }

    fn zip_with(&self, other: &Tensor3, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Tensor3> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch { op, expected: self.shape(), found: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Tensor3 { n1: self.n1, n2: self.n2, n3: self.n3, data })
    }

    pub fn add(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Frobenius norm of `self - other` divided by the Frobenius norm of `other`.
    ///
    /// Returns the absolute difference norm when `other` is zero.
    pub fn relative_error(&self, other: &Tensor3) -> Result<f64> {
        let diff = self.sub(other)?.norm(Norm::Frobenius);
        let base = other.norm(Norm::Frobenius);
        Ok(if base > 0.0 { diff / base } else { diff })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn norm(&self, kind: Norm) -> f64 {
        match kind {
            Norm::Frobenius => self.data.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::Max => self.data.iter().fold(0.0, |m, v| m.max(v.abs())),
            Norm::L1 => self.data.iter().map(|v| v.abs()).sum(),
            Norm::L112 => {
                let mut total = 0.0;
                for j in 0..self.n2 {
                    for i in 0..self.n1 {
                        let sq: f64 = (0..self.n3).map(|k| self.get(i, j, k).powi(2)).sum();
                        total += sq.sqrt();
                    }
                }
                total
            }
        }
    }

    /// Extracts the sub-tensor with rows `r0..r0+h` and columns `c0..c0+w`, all tubes.
    pub fn sub_block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Result<Tensor3> {
        if h == 0 || w == 0 || r0 + h > self.n1 || c0 + w > self.n2 {
            return Err(Error::InvalidDimension { op: "sub_block", detail: "block exceeds tensor bounds" });
        }
        let mut data = Vec::with_capacity(h * w * self.n3);
        for k in 0..self.n3 {
            for j in c0..c0 + w {
                let start = self.offset(r0, j, k);
                data.extend_from_slice(&self.data[start..start + h]);
            }
        }
        Ok(Tensor3 { n1: h, n2: w, n3: self.n3, data })
    }

    /// Writes `block` into rows starting at `r0` and columns starting at `c0`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &Tensor3) -> Result<()> {
        let (h, w, n3) = block.shape();
        if n3 != self.n3 || r0 + h > self.n1 || c0 + w > self.n2 {
            return Err(Error::ShapeMismatch { op: "put_block", expected: self.shape(), found: block.shape() });
        }
        for k in 0..n3 {
            for j in 0..w {
                let dst = self.offset(r0, c0 + j, k);
                let src = j * h + k * h * w;
                self.data[dst..dst + h].copy_from_slice(&block.data[src..src + h]);
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;

    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[self.offset(i, j, k)]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        let o = self.offset(i, j, k);
        &mut self.data[o]
    }
}

/// Entrywise tensor norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    /// Square root of the sum of squared entries.
    Frobenius,
    /// Largest entry magnitude.
    Max,
    /// Sum of entry magnitudes.
    L1,
    /// Sum over `(i, j)` of the Euclidean norm of tube `(i, j)`.
    L112,
}

/// Complex tensor holding the Fourier transform of a real tensor along its tubes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<Complex64>,
}

impl SpectralTensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        check_dims("zeros", n1, n2, n3)?;
        Ok(Self { n1, n2, n3, data: vec![Complex64::new(0.0, 0.0); n1 * n2 * n3] })
    }

    pub fn from_vec(n1: usize, n2: usize, n3: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dims("from_vec", n1, n2, n3)?;
        if data.len() != n1 * n2 * n3 {
            return Err(Error::ShapeMismatch {
                op: "from_vec",
                expected: (n1, n2, n3),
                found: (data.len(), 1, 1),
            });
        }
        Ok(Self { n1, n2, n3, data })
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        (self.n1, self.n2, self.n3)
    }

    #[inline]
    pub fn n3(&self) -> usize {
        self.n3
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[i + self.n1 * (j + self.n2 * k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Complex64) {
        self.data[i + self.n1 * (j + self.n2 * k)] = value;
    }

    pub fn frontal_slice(&self, k: usize) -> &[Complex64] {
        let m = self.n1 * self.n2;
        &self.data[k * m..(k + 1) * m]
    }

    pub fn frontal_slice_mut(&mut self, k: usize) -> &mut [Complex64] {
        let m = self.n1 * self.n2;
        &mut self.data[k * m..(k + 1) * m]
    }

    /// Sum of squared magnitudes over all entries.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// A single tube: a length-`n3` fiber along the third mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Tube(pub Vec<f64>);

impl Tube {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension { op: "tube", detail: "tube length must be at least 1" });
        }
        Ok(Tube(values))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Circular convolution, `(a • b)[k] = Σ_m a[m] b[(k - m) mod n]`.
    pub fn circular_convolve(&self, other: &Tube) -> Result<Tube> {
        let n = self.len();
        if other.len() != n {
            return Err(Error::ShapeMismatch {
                op: "circular_convolve",
                expected: (1, 1, n),
                found: (1, 1, other.len()),
            });
        }
        let mut out = vec![0.0; n];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (0..n).map(|m| self.0[m] * other.0[(k + n - m) % n]).sum();
        }
        Ok(Tube(out))
    }
}

/// `n x n x n3` identity: first frontal slice is the identity matrix, the rest are zero.
pub fn identity_tensor(n: usize, n3: usize) -> Result<Tensor3> {
    let mut t = Tensor3::zeros(n, n, n3)?;
    for i in 0..n {
        t.set(i, i, 0, 1.0);
    }
    Ok(t)
}

/// Column basis `e_i` of size `n x 1 x n3` with a single unit at `(i, 0, 0)`.
///
/// `i` is zero-based.
pub fn standard_basis(i: usize, n: usize, n3: usize) -> Result<Tensor3> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let mut t = Tensor3::zeros(n, 1, n3)?;
    t.set(i, 0, 0, 1.0);
    Ok(t)
}

/// Transposes every frontal slice and reverses the order of slices `2..n3`.
pub fn conj_transpose(a: &Tensor3) -> Tensor3 {
    let (n1, n2, n3) = a.shape();
    let mut out = Tensor3 { n1: n2, n2: n1, n3, data: vec![0.0; a.len()] };
    for k in 0..n3 {
        let src = if k == 0 { 0 } else { n3 - k };
        for j in 0..n2 {
            for i in 0..n1 {
                out.set(j, i, k, a.get(i, j, src));
            }
        }
    }
    out
}

/// Returns true iff every off-diagonal entry of every frontal slice is at most `tol` in magnitude.
pub fn is_fdiagonal(s: &Tensor3, tol: f64) -> bool {
    let (n1, n2, n3) = s.shape();
    (0..n3).all(|k| {
        (0..n2).all(|j| (0..n1).all(|i| i == j || s.get(i, j, k).abs() <= tol))
    })
}
