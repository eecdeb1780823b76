#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tubal_core::Tensor3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n1: usize, n2: usize, n3: usize) -> Tensor3 {
    Tensor3::from_fn(n1, n2, n3, |_, _, _| rng.sample(StandardNormal)).unwrap()
}

pub fn dim(rng: &mut ChaCha8Rng, max: usize) -> usize {
    rng.random_range(1..=max)
}

/// Fourier slices by the defining sum, one nalgebra matrix per slice.
pub fn direct_fourier_slices(a: &Tensor3) -> Vec<DMatrix<Complex64>> {
    let (n1, n2, n3) = a.shape();
    (0..n3)
        .map(|f| {
            DMatrix::from_fn(n1, n2, |i, j| {
                (0..n3)
                    .map(|m| {
                        let angle = -2.0 * std::f64::consts::PI * ((f * m) % n3) as f64 / n3 as f64;
                        Complex64::from_polar(a.get(i, j, m), angle)
                    })
                    .sum()
            })
        })
        .collect()
}

/// Block-diagonal matrix of all Fourier slices.
pub fn blkdiag(a: &Tensor3) -> DMatrix<Complex64> {
    let (n1, n2, n3) = a.shape();
    let mut out = DMatrix::zeros(n1 * n3, n2 * n3);
    for (k, s) in direct_fourier_slices(a).iter().enumerate() {
        out.view_mut((k * n1, k * n2), (n1, n2)).copy_from(s);
    }
    out
}

/// Singular values of each Fourier slice from nalgebra, nonincreasing.
pub fn oracle_singular_values(a: &Tensor3) -> Vec<Vec<f64>> {
    direct_fourier_slices(a)
        .into_iter()
        .map(|m| {
            let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
            s.sort_by(|x, y| y.total_cmp(x));
            s
        })
        .collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Gaussian tensor with random dimensions up to the given bounds.
pub fn random_shaped(rng: &mut ChaCha8Rng, max1: usize, max2: usize, max3: usize) -> Tensor3 {
    let (n1, n2, n3) = (dim(rng, max1), dim(rng, max2), dim(rng, max3));
    gaussian(rng, n1, n2, n3)
}
