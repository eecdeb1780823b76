//! Block tensor incoherence diagnostics.
//!
//! For a square block `l` of tubal rank `r` with truncated t-SVD factors
//! `U_p`, `V_p` (each `n x r x n3`), the three incoherence conditions are
//!
//! ```text
//! max_i ‖U_pᵀ * e_i‖_F  ≤ √(µ r / (n n3))
//! max_j ‖V_pᵀ * e_j‖_F  ≤ √(µ r / (n n3))
//! ‖U_p * V_pᵀ‖_∞        ≤ √(µ r / (n² n3²))
//! ```
//!
//! The report gives, for each condition, the smallest `µ` for which it holds.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::algebra::{slice_matrix, store_with_mirror, tproduct};
use crate::error::{Error, Result};
use crate::fft::{fft3, ifft3, independent_slices};
use crate::linalg::svd;
use crate::tensor::{conj_transpose, standard_basis, Norm, SpectralTensor3, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncoherenceReport {
    /// Smallest µ satisfying the left singular factor condition.
    pub mu_u: f64,
    /// Smallest µ satisfying the right singular factor condition.
    pub mu_v: f64,
    /// Smallest µ satisfying the joint max-entry condition.
    pub mu_uv: f64,
    /// `max(mu_u, mu_v, mu_uv)`.
    pub mu: f64,
    /// Tubal rank used for truncation.
    pub r: usize,
    /// Block side.
    pub n: usize,
    pub n3: usize,
}

/// Truncated orthonormal factors `(U_p, V_p)` of tubal rank `r`, or `None` for a zero block.
fn truncated_factors(l: &Tensor3, rel_tol: f64) -> Result<Option<(Tensor3, Tensor3, usize)>> {
    let (n, _, n3) = l.shape();
    let spec = fft3(l);
    let svds = (0..independent_slices(n3))
        .map(|k| svd(&slice_matrix(&spec, k)).map_err(|_| Error::NumericalFailure { slice: k }))
        .collect::<Result<alloc::vec::Vec<_>>>()?;
    let global = svds.iter().flat_map(|f| f.s.first().copied()).fold(0.0, f64::max);
    if global == 0.0 {
        return Ok(None);
    }
    let cut = rel_tol * global;
    let r = svds.iter().map(|f| f.s.iter().filter(|&&x| x > cut).count()).max().unwrap_or(0);
    if r == 0 {
        return Ok(None);
    }
    let mut u_hat = SpectralTensor3::zeros(n, r, n3)?;
    let mut v_hat = SpectralTensor3::zeros(n, r, n3)?;
    for (k, f) in svds.iter().enumerate() {
        store_with_mirror(&mut u_hat, k, &f.u.leading_columns(r));
        store_with_mirror(&mut v_hat, k, &f.v.leading_columns(r));
    }
    Ok(Some((ifft3(&u_hat)?, ifft3(&v_hat)?, r)))
}

fn max_basis_projection(factor: &Tensor3) -> Result<f64> {
    let (n, _, n3) = factor.shape();
    let ft = conj_transpose(factor);
    let mut best: f64 = 0.0;
    for i in 0..n {
        let p = tproduct(&ft, &standard_basis(i, n, n3)?)?;
        best = best.max(p.norm(Norm::Frobenius));
    }
    Ok(best)
}

/// Computes the incoherence report of a square block.
pub fn incoherence_report(l: &Tensor3, rel_tol: f64) -> Result<IncoherenceReport> {
    let (n, n2, n3) = l.shape();
    if n != n2 {
        return Err(Error::ShapeMismatch { op: "incoherence_report", expected: (n, n, n3), found: (n, n2, n3) });
    }
    let Some((u, v, r)) = truncated_factors(l, rel_tol)? else {
        return Err(Error::ZeroTensor);
    };
    let (nf, n3f, rf) = (n as f64, n3 as f64, r as f64);
    let mu_u = nf * n3f / rf * max_basis_projection(&u)?.powi(2);
    let mu_v = nf * n3f / rf * max_basis_projection(&v)?.powi(2);
    let joint = tproduct(&u, &conj_transpose(&v))?.norm(Norm::Max);
    let mu_uv = nf * nf * n3f * n3f * joint * joint / rf;
    Ok(IncoherenceReport { mu_u, mu_v, mu_uv, mu: mu_u.max(mu_v).max(mu_uv), r, n, n3 })
}

/// True iff all three incoherence conditions hold with parameter `mu_budget`.
pub fn check_conditions(l: &Tensor3, mu_budget: f64, rel_tol: f64) -> Result<bool> {
    Ok(incoherence_report(l, rel_tol)?.mu <= mu_budget)
}
