//! t-SVD, tensor ranks, the tensor nuclear norm and singular value thresholding.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::algebra::{slice_matrix, store_with_mirror};
use crate::error::{Error, Result};
use crate::fft::{fft3, ifft3, independent_slices, mirror_slice};
use crate::linalg::{svd, CMatrix, Svd};
use crate::tensor::{SpectralTensor3, Tensor3};

/// Default relative tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Factors of `a = u * s * vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsvdFactors {
    /// `n1 x n1 x n3`, orthogonal.
    pub u: Tensor3,
    /// `n1 x n2 x n3`, f-diagonal.
    pub s: Tensor3,
    /// `n2 x n2 x n3`, orthogonal.
    pub v: Tensor3,
}

/// Ranks of the Fourier-domain frontal slices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiRank(pub Vec<usize>);

impl MultiRank {
    /// Largest slice rank.
    pub fn tubal(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

fn slice_svd(spec: &SpectralTensor3, k: usize) -> Result<Svd> {
    svd(&slice_matrix(spec, k)).map_err(|_| Error::NumericalFailure { slice: k })
}

/// SVDs of the independent Fourier slices `0..=n3/2`.
fn half_spectrum_svds(spec: &SpectralTensor3) -> Result<Vec<Svd>> {
    (0..independent_slices(spec.n3())).map(|k| slice_svd(spec, k)).collect()
}

/// Singular values of every Fourier frontal slice of `a`, each nonincreasing.
pub fn fourier_singular_values(a: &Tensor3) -> Result<Vec<Vec<f64>>> {
    let n3 = a.n3();
    let svds = half_spectrum_svds(&fft3(a))?;
    Ok((0..n3).map(|k| svds[mirror_slice(k, n3).min(k)].s.clone()).collect())
}

/// t-SVD by per-slice SVD in the Fourier domain.
///
/// Slices past `n3/2` are taken as conjugates of their mirrors, so the
/// factors come back exactly real.
pub fn tsvd(a: &Tensor3) -> Result<TsvdFactors> {
    let (n1, n2, n3) = a.shape();
    let spec = fft3(a);
    let mut u_hat = SpectralTensor3::zeros(n1, n1, n3)?;
    let mut s_hat = SpectralTensor3::zeros(n1, n2, n3)?;
    let mut v_hat = SpectralTensor3::zeros(n2, n2, n3)?;
    for k in 0..independent_slices(n3) {
        let f = slice_svd(&spec, k)?;
        let mut sigma = CMatrix::zeros(n1, n2);
        for (l, &value) in f.s.iter().enumerate() {
            sigma[(l, l)] = value.into();
        }
        store_with_mirror(&mut u_hat, k, &f.u);
        store_with_mirror(&mut s_hat, k, &sigma);
        store_with_mirror(&mut v_hat, k, &f.v);
    }
    Ok(TsvdFactors { u: ifft3(&u_hat)?, s: ifft3(&s_hat)?, v: ifft3(&v_hat)? })
}

/// Per-slice ranks, counting singular values above `rel_tol` times the
/// largest singular value over all slices.
pub fn multi_rank(a: &Tensor3, rel_tol: f64) -> Result<MultiRank> {
    let sv = fourier_singular_values(a)?;
    let global = sv.iter().flat_map(|s| s.first().copied()).fold(0.0, f64::max);
    let cut = rel_tol * global;
    Ok(MultiRank(sv.iter().map(|s| s.iter().filter(|&&x| x > cut && x > 0.0).count()).collect()))
}

/// Tubal rank: the maximum entry of the multi-rank.
pub fn tubal_rank(a: &Tensor3, rel_tol: f64) -> Result<usize> {
    Ok(multi_rank(a, rel_tol)?.tubal())
}

/// Tubal rank read off an f-diagonal factor: the number of singular tubes
/// `s(i, i, :)` whose norm exceeds `rel_tol * σ_max / √n3`.
///
/// `σ_max` is the largest Fourier-domain singular value, recovered as the
/// largest tube DFT magnitude.
pub fn tubal_rank_from_factor(s: &Tensor3, rel_tol: f64) -> usize {
    let (n1, n2, n3) = s.shape();
    let spec = fft3(s);
    let d = n1.min(n2);
    let sigma_max = (0..d)
        .flat_map(|i| (0..n3).map(move |k| (i, k)))
        .map(|(i, k)| spec.get(i, i, k).norm())
        .fold(0.0, f64::max);
    let cut = rel_tol * sigma_max / (n3 as f64).sqrt();
    (0..d)
        .filter(|&i| {
            let tube_norm = (0..n3).map(|k| s.get(i, i, k).powi(2)).sum::<f64>().sqrt();
            tube_norm > cut && tube_norm > 0.0
        })
        .count()
}

/// Tensor nuclear norm: sum of singular values over all Fourier slices.
pub fn tnn(a: &Tensor3) -> Result<f64> {
    Ok(fourier_singular_values(a)?.iter().flatten().sum())
}

/// Soft-thresholds the singular values of every Fourier slice by `tau`.
pub fn svt(a: &Tensor3, tau: f64) -> Result<Tensor3> {
    if tau.is_nan() || tau < 0.0 || tau.is_infinite() {
        return Err(Error::InvalidConfig { field: "tau" });
    }
    let (n1, n2, n3) = a.shape();
    let spec = fft3(a);
    let mut out = SpectralTensor3::zeros(n1, n2, n3)?;
    let mut shrunk = vec![0.0; n1.min(n2)];
    for k in 0..independent_slices(n3) {
        let f = slice_svd(&spec, k)?;
        for (dst, &sigma) in shrunk.iter_mut().zip(&f.s) {
            *dst = (sigma - tau).max(0.0);
        }
        store_with_mirror(&mut out, k, &f.recompose_with(&shrunk));
    }
    ifft3(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_orthogonal, tproduct};
    use crate::tensor::{conj_transpose, identity_tensor, is_fdiagonal};

    #[test]
    fn zero_tensor() {
        let z = Tensor3::zeros(3, 3, 2).unwrap();
        let f = tsvd(&z).unwrap();
        assert!(f.s.is_zero());
        let r = tproduct(&f.u, &tproduct(&f.s, &conj_transpose(&f.v)).unwrap()).unwrap();
        assert!(r.is_zero());
        assert_eq!(multi_rank(&z, DEFAULT_RANK_TOL).unwrap(), MultiRank(vec![0, 0]));
        assert_eq!(tubal_rank(&z, DEFAULT_RANK_TOL).unwrap(), 0);
        assert_eq!(tnn(&z).unwrap(), 0.0);
    }

    #[test]
    fn identity_factors() {
        let id = identity_tensor(2, 3).unwrap();
        let f = tsvd(&id).unwrap();
        assert!(f.s.relative_error(&id).unwrap() < 1e-12);
        assert!(is_orthogonal(&f.u, 1e-12).unwrap());
        assert!(is_fdiagonal(&f.s, 1e-12));
        let r = tproduct(&f.u, &tproduct(&f.s, &conj_transpose(&f.v)).unwrap()).unwrap();
        assert!(r.relative_error(&id).unwrap() < 1e-12);
    }

    #[test]
    fn identity_ranks_and_norm() {
        let id = identity_tensor(3, 4).unwrap();
        assert_eq!(multi_rank(&id, DEFAULT_RANK_TOL).unwrap(), MultiRank(vec![3; 4]));
        assert_eq!(tubal_rank(&id, DEFAULT_RANK_TOL).unwrap(), 3);
        assert_eq!(tubal_rank_from_factor(&tsvd(&id).unwrap().s, DEFAULT_RANK_TOL), 3);
        for (n, n3) in [(1, 1), (2, 3), (4, 5)] {
            let t = tnn(&identity_tensor(n, n3).unwrap()).unwrap();
            assert!((t - (n * n3) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn svt_extremes() {
        let id = identity_tensor(2, 2).unwrap();
        assert!(svt(&id, 1.0).unwrap().norm(crate::tensor::Norm::Max) < 1e-15);
        assert!(svt(&id, 0.0).unwrap().relative_error(&id).unwrap() < 1e-15);
        assert!(matches!(svt(&id, -1.0), Err(Error::InvalidConfig { .. })));
        assert!(matches!(svt(&id, f64::NAN), Err(Error::InvalidConfig { .. })));
    }
}
