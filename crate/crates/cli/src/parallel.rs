use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};
use tubal_core::{BlockExecutor, Result, Tensor3};

/// Runs the per-block updates of one iteration on a dedicated thread pool.
///
/// Each block is updated by exactly one task and blocks do not interact,
/// so results do not depend on the thread count.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    pub fn new(threads: usize) -> Result<Self, ThreadPoolBuildError> {
        Ok(Self { pool: ThreadPoolBuilder::new().num_threads(threads).build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl BlockExecutor for RayonExecutor {
    fn for_each_block(
        &self,
        blocks: &mut [Tensor3],
        op: &(dyn Fn(&mut Tensor3) -> Result<()> + Sync),
    ) -> Result<()> {
        self.pool.install(|| blocks.par_iter_mut().try_for_each(op))
    }
}
