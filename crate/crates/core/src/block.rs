//! Block partitioning and iterative block tensor singular value thresholding.
//!
//! The input is cut into blocks spanning the full tube dimension. Every
//! iteration multiplies the decay state by `mu`, derives the threshold
//! `tau_k = tau0 / eta_k`, and replaces each block by its singular value
//! thresholded version. The low-rank estimate is the concatenation of the
//! blocks once the relative change of the concatenated tensor drops to `eps`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::tensor::{Norm, Shape, Tensor3};
use crate::tsvd::{svt, tubal_rank, DEFAULT_RANK_TOL};

/// Location and extent of one block on the `n1 x n2` face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockDescriptor {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

/// Tiling of a tensor face into blocks, listed in row-major order of offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    shape: Shape,
    block_rows: usize,
    block_cols: usize,
    blocks: Vec<BlockDescriptor>,
}

impl BlockGrid {
    pub fn new(shape: Shape, block_rows: usize, block_cols: usize) -> Result<Self> {
        let (n1, n2, n3) = shape;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::InvalidDimension { op: "partition", detail: "tensor dimensions must be positive" });
        }
        if block_rows == 0 || block_cols == 0 || block_rows > n1 || block_cols > n2 {
            return Err(Error::ShapeMismatch {
                op: "partition",
                expected: (n1, n2, n3),
                found: (block_rows, block_cols, n3),
            });
        }
        let mut blocks = Vec::with_capacity(n1.div_ceil(block_rows) * n2.div_ceil(block_cols));
        for row in (0..n1).step_by(block_rows) {
            for col in (0..n2).step_by(block_cols) {
                blocks.push(BlockDescriptor {
                    row,
                    col,
                    height: block_rows.min(n1 - row),
                    width: block_cols.min(n2 - col),
                });
            }
        }
        Ok(Self { shape, block_rows, block_cols, blocks })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Nominal block sides `(b1, b2)`; edge blocks may be smaller.
    pub fn block_sides(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    pub fn descriptors(&self) -> &[BlockDescriptor] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Splits `x` into `b1 x b2 x n3` blocks.
pub fn partition(x: &Tensor3, b1: usize, b2: usize) -> Result<(BlockGrid, Vec<Tensor3>)> {
    let grid = BlockGrid::new(x.shape(), b1, b2)?;
    let blocks = grid
        .descriptors()
        .iter()
        .map(|d| x.sub_block(d.row, d.col, d.height, d.width))
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, blocks))
}

/// Reassembles blocks produced by [`partition`].
pub fn concatenate(grid: &BlockGrid, blocks: &[Tensor3]) -> Result<Tensor3> {
    let (n1, n2, n3) = grid.shape();
    if blocks.len() != grid.len() {
        return Err(Error::ShapeMismatch { op: "concatenate", expected: (grid.len(), 1, 1), found: (blocks.len(), 1, 1) });
    }
    let mut out = Tensor3::zeros(n1, n2, n3)?;
    for (index, (d, b)) in grid.descriptors().iter().zip(blocks).enumerate() {
        if b.shape() != (d.height, d.width, n3) {
            return Err(Error::DescriptorMismatch { block: index });
        }
        out.put_block(d.row, d.col, b)?;
    }
    Ok(out)
}

/// `x - l`, entrywise.
pub fn sparse_residual(x: &Tensor3, l: &Tensor3) -> Result<Tensor3> {
    x.sub(l)
}

/// Strategy for applying a per-block update across all blocks of one iteration.
pub trait BlockExecutor {
    fn for_each_block(
        &self,
        blocks: &mut [Tensor3],
        op: &(dyn Fn(&mut Tensor3) -> Result<()> + Sync),
    ) -> Result<()>;
}

/// Processes blocks one after another in grid order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl BlockExecutor for Sequential {
    fn for_each_block(
        &self,
        blocks: &mut [Tensor3],
        op: &(dyn Fn(&mut Tensor3) -> Result<()> + Sync),
    ) -> Result<()> {
        blocks.iter_mut().try_for_each(op)
    }
}

/// Parameters of the iterative block thresholding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbtsvtConfig {
    /// Explicit initial threshold. When `None`, `tau_scale / √(n n3)` is used
    /// with `n = max(b1, b2)`.
    pub tau0: Option<f64>,
    pub tau_scale: f64,
    /// Geometric growth factor of `eta`.
    pub mu: f64,
    /// Initial `eta`.
    pub eta0: f64,
    /// Stopping tolerance on the relative change between iterates.
    pub eps: f64,
    pub max_iters: usize,
    pub block_rows: usize,
    pub block_cols: usize,
}

impl Default for IbtsvtConfig {
    fn default() -> Self {
        Self {
            tau0: None,
            tau_scale: 20.0,
            mu: 1.8,
            eta0: 1.0,
            eps: 1e-2,
            max_iters: 50,
            block_rows: 2,
            block_cols: 2,
        }
    }
}

impl IbtsvtConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if let Some(t) = self.tau0 {
            if !positive(t) {
                return Err(Error::InvalidConfig { field: "tau0" });
            }
        }
        if !positive(self.tau_scale) {
            return Err(Error::InvalidConfig { field: "tau_scale" });
        }
        if !(self.mu.is_finite() && self.mu > 1.0) {
            return Err(Error::InvalidConfig { field: "mu" });
        }
        if !positive(self.eta0) {
            return Err(Error::InvalidConfig { field: "eta0" });
        }
        if !positive(self.eps) {
            return Err(Error::InvalidConfig { field: "eps" });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig { field: "max_iters" });
        }
        if self.block_rows == 0 || self.block_cols == 0 {
            return Err(Error::InvalidConfig { field: "block" });
        }
        Ok(())
    }

    /// Initial threshold for tensors with tube length `n3`.
    pub fn resolved_tau0(&self, n3: usize) -> f64 {
        self.tau0.unwrap_or_else(|| {
            let n = self.block_rows.max(self.block_cols) as f64;
            self.tau_scale / (n * n3 as f64).sqrt()
        })
    }

    /// Threshold applied at iteration `k` (1-based): `tau0 / (eta0 mu^k)`.
    pub fn threshold_at(&self, n3: usize, k: usize) -> f64 {
        let mut eta = self.eta0;
        for _ in 0..k {
            eta *= self.mu;
        }
        self.resolved_tau0(n3) / eta
    }
}

/// Output of [`ibtsvt`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    /// Low-rank component.
    pub l: Tensor3,
    /// Sparse component, `x - l`.
    pub s: Tensor3,
    pub iterations: usize,
    /// Relative change `‖X_{k+1} - X_k‖_F / ‖X_k‖_F` after each iteration.
    pub history: Vec<f64>,
    /// Threshold applied at each iteration.
    pub thresholds: Vec<f64>,
    /// Tubal rank of every final block, in grid order.
    pub block_ranks: Vec<usize>,
    /// False when `max_iters` was reached before the stopping rule held.
    pub converged: bool,
    pub tau0: f64,
}

/// Runs the block thresholding iteration sequentially.
pub fn ibtsvt(x: &Tensor3, cfg: &IbtsvtConfig) -> Result<DecompositionResult> {
    ibtsvt_with(x, cfg, &Sequential)
}

/// Runs the block thresholding iteration, dispatching per-block work through `executor`.
pub fn ibtsvt_with<E: BlockExecutor + ?Sized>(
    x: &Tensor3,
    cfg: &IbtsvtConfig,
    executor: &E,
) -> Result<DecompositionResult> {
    cfg.validate()?;
    let (n1, n2, n3) = x.shape();
    let tau0 = cfg.resolved_tau0(n3);
    let (grid, mut blocks) = partition(x, cfg.block_rows, cfg.block_cols)?;

    if x.is_zero() {
        return Ok(DecompositionResult {
            l: Tensor3::zeros(n1, n2, n3)?,
            s: x.clone(),
            iterations: 0,
            history: Vec::new(),
            thresholds: Vec::new(),
            block_ranks: alloc::vec![0; grid.len()],
            converged: true,
            tau0,
        });
    }

    let mut current = x.clone();
    let mut current_norm = current.norm(Norm::Frobenius);
    let mut eta = cfg.eta0;
    let mut history = Vec::new();
    let mut thresholds = Vec::new();
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        eta *= cfg.mu;
        let tau = tau0 / eta;
        executor.for_each_block(&mut blocks, &|b: &mut Tensor3| {
            *b = svt(b, tau)?;
            Ok(())
        })?;
        let next = concatenate(&grid, &blocks)?;
        let change = if current_norm > 0.0 {
            next.sub(&current)?.norm(Norm::Frobenius) / current_norm
        } else {
            0.0
        };
        history.push(change);
        thresholds.push(tau);
        current = next;
        current_norm = current.norm(Norm::Frobenius);
        if change <= cfg.eps {
            converged = true;
            break;
        }
    }

    let block_ranks = blocks
        .iter()
        .map(|b| tubal_rank(b, DEFAULT_RANK_TOL))
        .collect::<Result<Vec<_>>>()?;
    let s = sparse_residual(x, &current)?;
    Ok(DecompositionResult {
        l: current,
        s,
        iterations: history.len(),
        history,
        thresholds,
        block_ranks,
        converged,
        tau0,
    })
}
