//! Third-order tensor algebra built on the t-product.
//!
//! Tensors are dense `n1 x n2 x n3` arrays of `f64`. The t-product acts on
//! them like matrix multiplication over tubes, and is evaluated slice by
//! slice after a Fourier transform along the third mode. On top of that
//! this crate provides the t-SVD, multi-rank and tubal rank, the tensor
//! nuclear norm, singular value thresholding, block incoherence
//! diagnostics, and the iterative block tensor singular value thresholding
//! decomposition of a tensor into low-rank and sparse parts.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod block;
pub mod error;
pub mod fft;
pub mod incoherence;
pub mod linalg;
pub mod tensor;
pub mod tsvd;

pub use algebra::{is_orthogonal, tproduct, tproduct_naive};
pub use block::{
    concatenate, ibtsvt, ibtsvt_with, partition, sparse_residual, BlockDescriptor, BlockExecutor, BlockGrid,
    DecompositionResult, IbtsvtConfig, Sequential,
};
pub use error::{Error, Result};
pub use fft::{fft3, ifft3};
pub use incoherence::{check_conditions, incoherence_report, IncoherenceReport};
pub use tensor::{conj_transpose, identity_tensor, is_fdiagonal, standard_basis, Norm, SpectralTensor3, Tensor3, Tube};
pub use tsvd::{
    fourier_singular_values, multi_rank, svt, tnn, tsvd, tubal_rank, tubal_rank_from_factor, MultiRank, TsvdFactors,
    DEFAULT_RANK_TOL,
};
