//! Thread-pool drivers over the core's fixed-chunk decompositions.
//!
//! Chunk boundaries and the reduction tree are defined in the core and do
//! not depend on the worker count, so every function here is bit-identical
//! across 1..n threads.

use rayon::prelude::*;
use spex_core::expsum::{chunk_count, combine_chunks, phi_of_modulus, sum_chunk};
use spex_core::poly::SparsePolynomial;
use spex_core::Complex64;

use crate::Result;

/// Worker count: the `--threads` flag, else `SPEX_THREADS`, else all cores.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("SPEX_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .filter(|&n| n >= 1)
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

/// S_q(f) over a dedicated pool of `threads` workers.
pub fn sum_units_parallel(f: &SparsePolynomial, budget: u64, threads: usize) -> Result<Complex64> {
    let phi = phi_of_modulus(f)?;
    if phi > budget {
        return Err(spex_core::Error::BudgetExceeded {
            required: phi as u128,
            budget,
            what: "unit-group term evaluations",
        }
        .into());
    }
    let chunks = chunk_count(f.modulus());
    if threads <= 1 || chunks < 2 {
        let sums: Vec<Complex64> = (0..chunks).map(|k| sum_chunk(f, k)).collect();
        return Ok(combine_chunks(&sums));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction");
    let sums: Vec<Complex64> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|k| sum_chunk(f, k))
            .collect()
    });
    Ok(combine_chunks(&sums))
}
