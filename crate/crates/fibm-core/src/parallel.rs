//! Minimal deterministic fork-join helper.
//!
//! Work items are split into contiguous chunks and results are stitched back
//! in input order, so output never depends on scheduling. `FIBM_THREADS`
//! caps worker concurrency.

/// Resolve the worker count: `requested` if given, else all available cores,
/// in both cases capped by the `FIBM_THREADS` environment variable.
pub fn thread_count(requested: Option<usize>) -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let base = requested.unwrap_or(available).max(1);
    match std::env::var("FIBM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(cap) if cap >= 1 => base.min(cap),
        _ => base,
    }
}

/// Map `f` over `0..len`, preserving index order in the result.
pub fn par_map_indexed<R, F>(len: usize, threads: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    if threads <= 1 || len <= 1 {
        return (0..len).map(f).collect();
    }
    let workers = threads.min(len);
    let chunk = len.div_ceil(workers);
    let mut out: Vec<Vec<R>> = Vec::with_capacity(workers);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for w in 0..workers {
            let start = w * chunk;
            let end = ((w + 1) * chunk).min(len);
            let f = &f;
            handles.push(scope.spawn(move || (start..end).map(f).collect::<Vec<R>>()));
        }
        for h in handles {
            out.push(h.join().expect("worker panicked"));
        }
    });
    out.into_iter().flatten().collect()
}
