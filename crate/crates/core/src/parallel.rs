// SPDX-License-Identifier: Apache-2.0

//! Order-preserving fan-out for independent sweep points.

use std::thread;

/// Environment variable capping sweep parallelism; `0` runs serially.
pub const THREADS_ENV: &str = "POLYORB_THREADS";

/// Worker count from `POLYORB_THREADS`, defaulting to the available cores.
pub fn sweep_threads() -> usize {
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()) {
        Some(n) => n,
        None => thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

/// Applies `f` to every item, using up to `threads` scoped workers. Results
/// come back in input order whatever the completion order.
pub fn ordered_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads.min(items.len());
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..97).collect();
        for threads in [0, 1, 3, 8, 200] {
            let out = ordered_map(&items, threads, |x| x * x);
            assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }
}
