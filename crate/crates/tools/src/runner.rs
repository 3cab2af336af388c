//! Trial-parallel execution on a private rayon pool.
//!
//! Work is split into fixed-size chunks of trial indices and the per-chunk
//! results come back in index order. Trials draw from per-index streams, so
//! the output does not depend on the worker count.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Result, ToolError};

/// Trials per scheduled chunk.
pub const CHUNK: u64 = 256;

pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(ToolError::Config("need at least one worker".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ToolError::Config(format!("thread pool: {e}")))?;
        Ok(Runner { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// `f` over consecutive ranges of at most `chunk` indices covering `0..n`.
    pub fn map_chunks<T, F>(&self, n: u64, chunk: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let chunks = n.div_ceil(chunk);
        self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| f(c * chunk..((c + 1) * chunk).min(n)))
                .collect()
        })
    }

    /// Number of indices in `0..n` for which `f` returns true.
    pub fn count<E, F>(&self, n: u64, f: F) -> Result<u64, E>
    where
        E: Send,
        F: Fn(u64) -> Result<bool, E> + Sync + Send,
    {
        let parts = self.map_chunks(n, CHUNK, |range| {
            let mut hits = 0u64;
            for i in range {
                hits += u64::from(f(i)?);
            }
            Ok(hits)
        });
        parts.into_iter().sum()
    }
}
