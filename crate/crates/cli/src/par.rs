//! Parallel drivers over the per-configuration and per-chunk core functions.
//! Results are collected in index order, so output does not depend on the
//! number of worker threads.

use cone_lab_core::mc::{self, ChunkStats, OperatorEstimate, Sampler};
use cone_lab_core::tube::{self, GramCertificate, GramTolerances, WitnessOptions};
use cone_lab_core::{Algebra, Element, LinOp, Result};
use rayon::prelude::*;

/// Worker-count variable. Unset or invalid means rayon's default.
pub const THREADS_ENV: &str = "CONE_LAB_THREADS";

pub fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Raw certificates of configurations `0..count`.
pub fn evaluate_configurations(
    alg: Algebra,
    mu: f64,
    seed: u64,
    count: u64,
    tol: GramTolerances,
) -> Result<Vec<GramCertificate>> {
    (0..count).into_par_iter().map(|i| tube::evaluate_configuration(alg, mu, seed, i, tol)).collect()
}

/// Same result as [`tube::witness_search`], evaluated in parallel.
pub fn witness_search(alg: Algebra, mu: f64, seed: u64, opts: &WitnessOptions) -> Result<GramCertificate> {
    let certs = evaluate_configurations(alg, mu, seed, opts.budget, opts.tol)?;
    let chosen = tube::refinement_candidates(&certs, opts);
    let refined: Vec<GramCertificate> = chosen
        .par_iter()
        .map(|&i| tube::refine(mu, &certs[i], opts.refine_iterations, opts.tol))
        .collect::<Result<_>>()?;
    let mut all = certs;
    all.extend(refined);
    tube::best_certificate(all).ok_or(cone_lab_core::Error::Degenerate("empty budget"))
}

/// Same result as [`mc::estimate_operator_mean`], with chunks in parallel.
pub fn estimate_operator_mean<S, F>(sampler: &S, f: &F, samples: u64, seed: u64) -> Result<OperatorEstimate>
where
    S: Sampler,
    F: Fn(&Element) -> Result<LinOp> + Sync,
{
    let alg = sampler.algebra();
    let chunks: Vec<ChunkStats> = (0..mc::chunk_count(samples))
        .into_par_iter()
        .map(|c| mc::estimate_chunk(sampler, f, samples, seed, c))
        .collect::<Result<_>>()?;
    let n = alg.dim();
    let mut total = ChunkStats::new(n * n);
    for c in &chunks {
        total.merge(c);
    }
    OperatorEstimate::from_stats(alg, &total, seed)
}

/// `count` draws from `sampler`, chunked like the estimators.
pub fn draw_samples<S: Sampler>(sampler: &S, count: u64, seed: u64) -> Result<Vec<Element>> {
    use rand::SeedableRng;
    let chunks: Vec<Vec<Element>> = (0..mc::chunk_count(count))
        .into_par_iter()
        .map(|c| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let start = c * mc::CHUNK_SIZE;
            let end = count.min(start + mc::CHUNK_SIZE);
            (start..end).map(|_| sampler.sample(&mut rng)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
