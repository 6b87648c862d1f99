//! Multi-threaded versions of the core pipelines.
//!
//! Work is split into disjoint ranges and merged in range order, so results are
//! identical to the sequential functions in `binsum-core` for any number of workers.

use std::time::Instant;

use binsum_core::arith::primorial;
use binsum_core::density::{self, DensityEstimate, GapProfile};
use binsum_core::search::{
    self, certify_residue, check_r_range, cond1_failures_in, RangeMode, VerificationReport, VerifyConfig,
};
use binsum_core::sums;
use rayon::prelude::*;

use crate::Result;

const SCAN_CHUNK: u64 = 64;

/// Runs `f` on a pool with `workers` threads, or on the global pool when `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

pub fn enumerate_cond1_failures(r: u64, mode: RangeMode) -> Result<Vec<u64>> {
    let ctx = primorial(r)?;
    let limit = mode.limit(ctx.modulus_u64()?);
    let segments: Vec<(u64, u64)> = search::segments(limit).collect();
    let parts: Vec<Vec<u64>> = segments
        .par_iter()
        .map(|&(lo, hi)| cond1_failures_in(&ctx, lo, hi))
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// `n ∈ [1, n_max]` with `S_r(n)` integral.
pub fn nonintegral_scan(r: u64, n_max: u64) -> Result<Vec<u64>> {
    let chunks: Vec<(u64, u64)> = (0..n_max.div_ceil(SCAN_CHUNK))
        .map(|k| (1 + k * SCAN_CHUNK, ((k + 1) * SCAN_CHUNK).min(n_max)))
        .collect();
    let parts = chunks
        .par_iter()
        .map(|&(lo, hi)| sums::nonintegral_scan_range(r, lo, hi))
        .collect::<binsum_core::Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Same pipeline as [`binsum_core::search::verify_r`], parallel over segments and residues.
pub fn verify_r(r: u64, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    check_r_range(r, cfg)?;
    let ctx = primorial(r)?;
    let small_n_violations = nonintegral_scan(r, cfg.small_n_bound_for(r))?;
    let failures = enumerate_cond1_failures(r, RangeMode::Full)?;
    let outcomes = failures
        .par_iter()
        .map(|&s| certify_residue(s, &ctx, &cfg.proof))
        .collect::<binsum_core::Result<Vec<_>>>()?;
    let mut report = VerificationReport::assemble(&ctx, cfg, failures, outcomes, small_n_violations)?;
    report.wall_time = Some(started.elapsed());
    Ok(report)
}

pub fn gap_profile(q: u64) -> Result<GapProfile> {
    if q == 0 {
        return Err(binsum_core::Error::Zero("gap_profile(q)").into());
    }
    let factors = density::prime_factors(q);
    let end = q + 2;
    let step = search::SEGMENT_LEN;
    let ranges: Vec<(u64, u64)> = (0..(end - 1).div_ceil(step))
        .map(|k| (1 + k * step, (1 + (k + 1) * step).min(end)))
        .collect();
    let parts: Vec<Vec<u64>> = ranges
        .par_iter()
        .map(|&(lo, hi)| density::totatives_in(&factors, lo, hi))
        .collect();
    Ok(GapProfile::from_totatives(q, parts.into_iter().flatten().collect()))
}

/// Density rows for `r ∈ [2, r_max]`, one profile per distinct `m_r`.
pub fn density_curve(r_max: u64, alpha: f64, max_r: u64) -> Result<Vec<DensityEstimate>> {
    // validates arguments exactly like the sequential version on a trivial range
    density::density_curve(2, alpha, max_r)?;
    if r_max > max_r.min(density::DENSITY_HARD_MAX_R) || r_max < 2 {
        return Ok(density::density_curve(r_max, alpha, max_r)?);
    }
    let mut rows = Vec::new();
    let mut profile: Option<GapProfile> = None;
    for r in 2..=r_max {
        let q = primorial(r)?.modulus_u64()?;
        if profile.as_ref().is_none_or(|p| p.q != q) {
            profile = Some(gap_profile(q)?);
        }
        if let Some(p) = &profile {
            rows.push(DensityEstimate::from_profile(r, p, alpha)?);
        }
    }
    Ok(rows)
}
