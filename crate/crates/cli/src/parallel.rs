//! Bounded scoped-thread map for embarrassingly parallel grids.
//!
//! The thread count is capped by the `DIRAC_SELBERG_THREADS` environment
//! variable (default: available parallelism). Results are returned in input
//! order, so output is deterministic regardless of scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};

pub fn thread_cap() -> usize {
    std::env::var("DIRAC_SELBERG_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}

/// Applies `f` to every item, using up to `thread_cap()` worker threads.
pub fn map_indexed<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let n = items.len();
    let workers = thread_cap().min(n.max(1));
    if workers <= 1 || n <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut slots: Vec<Option<U>> = (0..n).map(|_| None).collect();
    let next = AtomicUsize::new(0);
    let slots_ptr = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(&items[i]);
                let mut guard = slots_ptr.lock().unwrap();
                guard[i] = Some(value);
            });
        }
    });
    slots.into_iter().map(|v| v.expect("every slot filled")).collect()
}
