//! Seed-parallel execution: each seed's pipeline runs sequentially on one
//! worker; results merge in seed order. `TTKIT_THREADS` caps the pool.

/// Number of workers: `TTKIT_THREADS` if set, else available parallelism.
pub fn worker_count() -> usize {
    if let Ok(v) = std::env::var("TTKIT_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs `f(seed)` for every seed on a bounded pool, returning outputs in
/// input order.
pub fn run_seeds<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let workers = worker_count().min(seeds.len().max(1));
    if workers <= 1 || seeds.len() <= 1 {
        return seeds.iter().map(|&s| f(s)).collect();
    }
    let mut out: Vec<Option<T>> = (0..seeds.len()).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let out_cells: Vec<std::sync::Mutex<Option<T>>> =
        (0..seeds.len()).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if idx >= seeds.len() {
                    break;
                }
                let val = f(seeds[idx]);
                *out_cells[idx].lock().expect("poisoned") = Some(val);
            });
        }
    });
    for (slot, cell) in out.iter_mut().zip(out_cells) {
        *slot = cell.into_inner().expect("poisoned");
    }
    out.into_iter().map(|x| x.expect("worker finished")).collect()
}
