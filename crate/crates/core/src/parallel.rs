//! Deterministic fan-out: item `i` is computed by `f(i)` on a fixed-size pool
//! and results come back in index order, whatever the scheduling.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub fn map_indexed<T, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if threads <= 1 {
        return Ok((0..n).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

/// Like [`map_indexed`] for fallible work; the error of the lowest index wins.
pub fn try_map_indexed<T, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_indexed(n, threads, f)?.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_threads() {
        let one = map_indexed(1000, 1, |i| i * i).unwrap();
        let four = map_indexed(1000, 4, |i| i * i).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn first_error_is_reported() {
        let r = try_map_indexed(10, 3, |i| if i >= 4 { Err(Error::Sample(format!("{i}"))) } else { Ok(i) });
        assert_eq!(r, Err(Error::Sample("4".into())));
    }
}
