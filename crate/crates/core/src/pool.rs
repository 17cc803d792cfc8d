//! Worker-pool sizing. Results never depend on the pool size: parallel
//! reductions in this crate either merge integers or write independent cells.

use rayon::ThreadPoolBuilder;

pub const THREADS_ENV: &str = "ZQ_THREADS";

/// Worker count from `ZQ_THREADS`, else the hardware parallelism.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run `f` inside a dedicated rayon pool of `threads` workers.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(f)
}
