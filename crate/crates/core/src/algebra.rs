//! The t-product and the properties defined through it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fft3, ifft3, independent_slices, mirror_slice};
use crate::linalg::CMatrix;
use crate::tensor::{conj_transpose, identity_tensor, Norm, SpectralTensor3, Tensor3, Tube};

/// Copies Fourier slice `k` into a matrix.
pub(crate) fn slice_matrix(a: &SpectralTensor3, k: usize) -> CMatrix {
    let (n1, n2, _) = a.shape();
    CMatrix::from_col_major(n1, n2, a.frontal_slice(k).to_vec())
}

/// Stores `m` as Fourier slice `k` and its conjugate as the mirror slice.
pub(crate) fn store_with_mirror(out: &mut SpectralTensor3, k: usize, m: &CMatrix) {
    let n3 = out.n3();
    let mirror = mirror_slice(k, n3);
    if mirror == k {
        for (dst, src) in out.frontal_slice_mut(k).iter_mut().zip(m.as_slice()) {
            *dst = Complex64::new(src.re, 0.0);
        }
    } else {
        out.frontal_slice_mut(k).copy_from_slice(m.as_slice());
        for (dst, src) in out.frontal_slice_mut(mirror).iter_mut().zip(m.as_slice()) {
            *dst = src.conj();
        }
    }
}

fn check_product_shapes(op: &'static str, a: &Tensor3, b: &Tensor3) -> Result<()> {
    let (_, n2, n3) = a.shape();
    let (m2, n4, m3) = b.shape();
    if n2 != m2 || n3 != m3 {
        return Err(Error::ShapeMismatch { op, expected: (n2, n4, n3), found: (m2, n4, m3) });
    }
    Ok(())
}

/// t-product `a * b` of an `n1 x n2 x n3` and an `n2 x n4 x n3` tensor.
///
/// Computed as slice-wise matrix products in the Fourier domain.
pub fn tproduct(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_product_shapes("tproduct", a, b)?;
    let (n1, _, n3) = a.shape();
    let n4 = b.n2();
    let fa = fft3(a);
    let fb = fft3(b);
    let mut out = SpectralTensor3::zeros(n1, n4, n3)?;
    for k in 0..independent_slices(n3) {
        let prod = slice_matrix(&fa, k).matmul(&slice_matrix(&fb, k));
        store_with_mirror(&mut out, k, &prod);
    }
    ifft3(&out)
}

/// t-product by direct tube-wise circular convolution, without transforms.
pub fn tproduct_naive(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_product_shapes("tproduct_naive", a, b)?;
    let (n1, n2, n3) = a.shape();
    let n4 = b.n2();
    let mut out = Tensor3::zeros(n1, n4, n3)?;
    for j in 0..n4 {
        for i in 0..n1 {
            let mut acc = Tube(alloc::vec![0.0; n3]);
            for l in 0..n2 {
                let c = a.tube(i, l).circular_convolve(&b.tube(l, j))?;
                for (x, y) in acc.0.iter_mut().zip(c.0) {
                    *x += y;
                }
            }
            out.set_tube(i, j, &acc);
        }
    }
    Ok(out)
}

/// True iff `qᵀ * q` and `q * qᵀ` are both within `tol` (Frobenius) of the identity.
pub fn is_orthogonal(q: &Tensor3, tol: f64) -> Result<bool> {
    let (n1, n2, n3) = q.shape();
    if n1 != n2 {
        return Err(Error::ShapeMismatch { op: "is_orthogonal", expected: (n1, n1, n3), found: (n1, n2, n3) });
    }
    let id = identity_tensor(n1, n3)?;
    let qt = conj_transpose(q);
    let left = tproduct(&qt, q)?.sub(&id)?.norm(Norm::Frobenius);
    let right = tproduct(q, &qt)?.sub(&id)?.norm(Norm::Frobenius);
    Ok(left <= tol && right <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::standard_basis;

    fn filled(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
        let mut s = seed;
        Tensor3::from_fn(n1, n2, n3, |_, _, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .unwrap()
    }

    #[test]
    fn scalar_tubes() {
        let a = Tensor3::from_vec(1, 1, 2, alloc::vec![1.0, 2.0]).unwrap();
        let b = Tensor3::from_vec(1, 1, 2, alloc::vec![3.0, 4.0]).unwrap();
        let p = tproduct(&a, &b).unwrap();
        assert!((p.get(0, 0, 0) - 11.0).abs() < 1e-12);
        assert!((p.get(0, 0, 1) - 10.0).abs() < 1e-12);
        assert_eq!(tproduct_naive(&a, &b).unwrap().as_slice(), &[11.0, 10.0]);

        let five = Tensor3::from_vec(1, 1, 1, alloc::vec![5.0]).unwrap();
        let seven = Tensor3::from_vec(1, 1, 1, alloc::vec![7.0]).unwrap();
        assert_eq!(tproduct_naive(&five, &seven).unwrap().as_slice(), &[35.0]);
    }

    #[test]
    fn identity_laws() {
        let a = filled(3, 3, 4, 5);
        let id = identity_tensor(3, 4).unwrap();
        assert!(tproduct(&id, &a).unwrap().relative_error(&a).unwrap() < 1e-12);
        assert_eq!(tproduct_naive(&a, &id).unwrap(), a);
    }

    #[test]
    fn shape_checks() {
        let a = filled(2, 3, 4, 1);
        assert!(matches!(tproduct(&a, &a), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(tproduct_naive(&a, &filled(3, 2, 5, 2)), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(is_orthogonal(&a, 1e-9), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn orthogonality() {
        let id = identity_tensor(3, 4).unwrap();
        assert!(is_orthogonal(&id, 1e-12).unwrap());
        assert!(!is_orthogonal(&id.scale(2.0), 1e-9).unwrap());
    }

    #[test]
    fn basis_selects_horizontal_slice() {
        let a = filled(4, 3, 5, 9);
        let at = conj_transpose(&a);
        for i in 0..4 {
            let e = standard_basis(i, 4, 5).unwrap();
            let got = tproduct(&at, &e).unwrap();
            // horizontal slice i, tube-transposed: tube index k maps to (n3 - k) mod n3
            let expected = Tensor3::from_fn(3, 1, 5, |j, _, k| a.get(i, j, (5 - k) % 5)).unwrap();
            assert!(got.relative_error(&expected).unwrap() < 1e-12);
        }
    }
}
