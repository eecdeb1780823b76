//! Discrete Fourier transforms along the tube dimension.
//!
//! Forward transforms are unnormalized, `X[k] = Σ_m x[m] exp(-2πi km/n)`;
//! the inverse carries the `1/n` factor. Power-of-two lengths use an
//! iterative radix-2 kernel, other lengths go through Bluestein's chirp-z
//! reduction onto a power-of-two convolution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::tensor::{SpectralTensor3, Tensor3};

/// Relative tolerance on the imaginary residue left by [`ifft3`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

#[inline]
fn unit_root(num: usize, den: usize) -> Complex64 {
    // exp(-2πi num/den) with num reduced mod den for accuracy
    let angle = -2.0 * PI * ((num % den) as f64) / (den as f64);
    Complex64::new(angle.cos(), angle.sin())
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2).map(|k| unit_root(k, n)).collect();
        Self { n, twiddles }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let r = i.reverse_bits() >> (usize::BITS - bits);
            if r > i {
                buf.swap(i, r);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for t in 0..half {
                    let w = self.twiddles[t * stride];
                    let a = buf[start + t];
                    let b = buf[start + t + half] * w;
                    buf[start + t] = a + b;
                    buf[start + t + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    inner: Radix2,
    chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // chirp[k] = exp(-πi k²/n) = unit_root(k², 2n)
        let chirp: Vec<Complex64> = (0..n).map(|k| unit_root((k * k) % (2 * n), 2 * n)).collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        Self { n, inner, chirp, kernel_hat: kernel }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let m = self.inner.n;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..self.n {
            work[k] = buf[k] * self.chirp[k];
        }
        self.inner.forward(&mut work);
        for (w, h) in work.iter_mut().zip(&self.kernel_hat) {
            *w = (*w * h).conj();
        }
        // inverse via conjugation: ifft(y) = conj(fft(conj(y))) / m
        self.inner.forward(&mut work);
        let scale = 1.0 / m as f64;
        for k in 0..self.n {
            buf[k] = work[k].conj() * scale * self.chirp[k];
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// A reusable transform plan for one length.
#[derive(Debug, Clone)]
pub struct DftPlan {
    n: usize,
    kernel: Kernel,
}

impl DftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform length must be at least 1");
        let kernel = if n.is_power_of_two() {
            Kernel::Radix2(Radix2::new(n))
        } else {
            Kernel::Bluestein(Bluestein::new(n))
        };
        Self { n, kernel }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place unnormalized forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        match &self.kernel {
            Kernel::Radix2(k) => k.forward(buf),
            Kernel::Bluestein(k) => k.forward(buf),
        }
    }

    /// In-place inverse transform including the `1/n` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        for z in buf.iter_mut() {
            *z = z.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z = z.conj() * scale;
        }
    }
}

/// Number of leading Fourier slices that determine the rest by conjugate symmetry.
#[inline]
pub fn independent_slices(n3: usize) -> usize {
    n3 / 2 + 1
}

/// Index of the slice whose conjugate equals slice `k`.
#[inline]
pub fn mirror_slice(k: usize, n3: usize) -> usize {
    if k == 0 {
        0
    } else {
        n3 - k
    }
}

/// Fourier transform of every tube.
///
/// The output is exactly conjugate-symmetric: slice `n3 - k` is the
/// conjugate of slice `k`, and self-mirrored slices are real.
pub fn fft3(a: &Tensor3) -> SpectralTensor3 {
    let (n1, n2, n3) = a.shape();
    let plan = DftPlan::new(n3);
    let mut out = SpectralTensor3::zeros(n1, n2, n3).expect("shape already validated");
    let mut tube = vec![Complex64::new(0.0, 0.0); n3];
    for j in 0..n2 {
        for i in 0..n1 {
            for (k, z) in tube.iter_mut().enumerate() {
                *z = Complex64::new(a.get(i, j, k), 0.0);
            }
            plan.forward(&mut tube);
            for k in 0..independent_slices(n3) {
                let mirror = mirror_slice(k, n3);
                if mirror == k {
                    out.set(i, j, k, Complex64::new(tube[k].re, 0.0));
                } else {
                    out.set(i, j, k, tube[k]);
                    out.set(i, j, mirror, tube[k].conj());
                }
            }
        }
    }
    out
}

/// Inverse Fourier transform of every tube, returning the real part.
///
/// Fails with [`Error::SymmetryViolation`] when an entry's imaginary part
/// exceeds `IMAG_RESIDUE_TOL * (1 + |real part|)`.
pub fn ifft3(a: &SpectralTensor3) -> Result<Tensor3> {
    let (n1, n2, n3) = a.shape();
    let plan = DftPlan::new(n3);
    let mut out = Tensor3::zeros(n1, n2, n3)?;
    let mut tube = vec![Complex64::new(0.0, 0.0); n3];
    for j in 0..n2 {
        for i in 0..n1 {
            for (k, z) in tube.iter_mut().enumerate() {
                *z = a.get(i, j, k);
            }
            plan.inverse(&mut tube);
            for (k, z) in tube.iter().enumerate() {
                if z.im.abs() > IMAG_RESIDUE_TOL * (1.0 + z.re.abs()) {
                    return Err(Error::SymmetryViolation {
                        position: i + n1 * (j + n2 * k),
                        residue: z.im,
                    });
                }
                out.set(i, j, k, z.re);
            }
        }
    }
    Ok(out)
}
