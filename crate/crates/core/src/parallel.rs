//! Order-fixed parallel execution over trial indices.

use rayon::prelude::*;

use crate::rng::RandomStream;

/// Runs `f(trial, stream)` for every trial, each with the substream
/// `(seed, trial)`, and returns results in trial order.
///
/// `jobs = None` uses the global rayon pool; `Some(k)` runs on a dedicated
/// pool of `k` workers. Output never depends on the worker count.
pub fn map_trials<R, F>(seed: u64, trials: usize, jobs: Option<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &mut RandomStream) -> R + Sync + Send,
{
    let run = || {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut stream = RandomStream::substream(seed, t as u64);
                f(t, &mut stream)
            })
            .collect::<Vec<R>>()
    };
    match jobs {
        Some(1) => (0..trials)
            .map(|t| {
                let mut stream = RandomStream::substream(seed, t as u64);
                f(t, &mut stream)
            })
            .collect(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}
