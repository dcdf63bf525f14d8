use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BOGOFISHER_THREADS";

/// Worker pool sized by [`THREADS_ENV`], or by rayon's default when unset.
pub fn worker_pool() -> Result<ThreadPool> {
    let mut builder = ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| Error::InvalidArgument(e.to_string()))
}
