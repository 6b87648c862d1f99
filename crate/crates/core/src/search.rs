//! Primorial-periodic sieve and the per-`r` verification pipeline.
//!
//! Whether a window has a member coprime to `m_r` depends only on its start modulo
//! `m_r`, so one period of starts decides every window. The sieve marks, for each
//! integer, divisibility by 2, by 3 and by any prime in `[5, r]`; everything the
//! interval conditions need follows from those three bits plus residues mod 8 and 9.

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::arith::primorial;
use crate::witness::{prove_residue_class, verify_certificate, Certificate, ProofOptions};
use crate::{sums, Error, PrimorialContext, Result};

/// Integers per sieve segment.
pub const SEGMENT_LEN: u64 = 1 << 22;

/// Largest `r` verified unless configured otherwise.
pub const DEFAULT_MAX_R: u64 = 22;

const DIV2: u8 = 1;
const DIV3: u8 = 2;
const DIV_HIGH: u8 = 4;

/// Divisibility flags for the integers `base, base+1, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveFlags {
    base: u64,
    flags: Vec<u8>,
}

impl SieveFlags {
    /// Sieves `[base, base + len)` by the primes of `ctx`.
    pub fn sieve(ctx: &PrimorialContext, base: u64, len: u64) -> Self {
        let mut flags = vec![0u8; len as usize];
        for &p in ctx.primes() {
            let bit = match p {
                2 => DIV2,
                3 => DIV3,
                _ => DIV_HIGH,
            };
            let mut i = ((p - base % p) % p) as usize;
            while i < flags.len() {
                flags[i] |= bit;
                i += p as usize;
            }
        }
        Self { base, flags }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> u64 {
        self.flags.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        x >= self.base && x - self.base < self.len()
    }

    fn get(&self, x: u64) -> u8 {
        self.flags[(x - self.base) as usize]
    }

    pub fn coprime_to_modulus(&self, x: u64) -> bool {
        self.get(x) == 0
    }

    /// `gcd(x, m_r) = 2`.
    pub fn even_and_odd_smooth_free(&self, x: u64) -> bool {
        self.get(x) == DIV2
    }

    /// Multiple of 3, free of primes in `[5, r]`, not divisible by 8.
    pub fn div3_smooth_free(&self, x: u64) -> bool {
        self.get(x) & (DIV3 | DIV_HIGH) == DIV3 && !x.is_multiple_of(8)
    }

    /// Divisible by some odd prime up to `r`.
    pub fn has_small_odd_prime(&self, x: u64) -> bool {
        self.get(x) & (DIV3 | DIV_HIGH) != 0
    }

    pub fn residue_mod8(&self, x: u64) -> u8 {
        (x % 8) as u8
    }

    pub fn residue_mod9(&self, x: u64) -> u8 {
        (x % 9) as u8
    }
}

/// Which window starts to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RangeMode {
    /// Starts in `[1, m_r/2]`; the failure set is symmetric under reflection.
    Half,
    /// Starts in `[1, m_r]`.
    Full,
}

impl RangeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RangeMode::Half => "half",
            RangeMode::Full => "full",
        }
    }

    /// Last start in range.
    pub fn limit(&self, modulus: u64) -> u64 {
        match self {
            RangeMode::Half => modulus / 2,
            RangeMode::Full => modulus,
        }
    }
}

/// Starts `s` in `[lo, hi)` whose window `{s..s+r−1}` has no member coprime to `m_r`.
pub fn cond1_failures_in(ctx: &PrimorialContext, lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    let r = ctx.r();
    let sieve = SieveFlags::sieve(ctx, lo, hi - lo + r - 1);
    // walk right to left tracking the nearest coprime at or after each position
    let mut next_coprime = u64::MAX;
    for x in (hi..hi + r - 1).rev() {
        if sieve.coprime_to_modulus(x) {
            next_coprime = x;
        }
    }
    let mut out = Vec::new();
    for s in (lo..hi).rev() {
        if sieve.coprime_to_modulus(s) {
            next_coprime = s;
        }
        if next_coprime > s + r - 1 {
            out.push(s);
        }
    }
    out.reverse();
    out
}

/// Segment boundaries `[lo, hi)` covering starts `1..=limit`.
pub fn segments(limit: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..limit.div_ceil(SEGMENT_LEN)).map(move |k| {
        let lo = 1 + k * SEGMENT_LEN;
        (lo, (lo + SEGMENT_LEN).min(limit + 1))
    })
}

/// All window starts in range with no member coprime to `m_r`, ascending.
pub fn enumerate_cond1_failures(r: u64, mode: RangeMode) -> Result<Vec<u64>> {
    let ctx = primorial(r)?;
    let limit = mode.limit(ctx.modulus_u64()?);
    Ok(segments(limit)
        .flat_map(|(lo, hi)| cond1_failures_in(&ctx, lo, hi))
        .collect())
}

/// Whether every member of `{start..start+r−1}` has an odd prime factor at most `r`.
pub fn check_fully_covered(start: u64, r: u64) -> bool {
    let odd: Vec<u64> = crate::arith::primes_up_to(r).into_iter().filter(|&p| p > 2).collect();
    (start..start + r).all(|x| odd.iter().any(|&p| x % p == 0))
}

/// Least start `≤ limit` whose window is fully covered by odd primes up to `r`.
pub fn bounded_covered_search(r: u64, limit: u64) -> Result<Option<u64>> {
    let ctx = primorial(r)?;
    if ctx.odd_primes().is_empty() {
        return Ok(None);
    }
    for (lo, hi) in segments(limit) {
        let sieve = SieveFlags::sieve(&ctx, lo, hi - lo + r - 1);
        let mut run = 0u64;
        for x in lo..hi + r - 1 {
            run = if sieve.has_small_odd_prime(x) { run + 1 } else { 0 };
            if run >= r {
                let start = x + 1 - r;
                if start >= lo && start < hi {
                    return Ok(Some(start));
                }
            }
        }
    }
    Ok(None)
}

/// Settings for [`verify_r`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub max_r: u64,
    /// Exact scan bound for small `n`; `None` means `max(2r, 50)`.
    pub small_n_bound: Option<u64>,
    /// Which failures the report lists. Certification always covers the full period.
    pub range_mode: RangeMode,
    pub proof: ProofOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_r: DEFAULT_MAX_R,
            small_n_bound: None,
            range_mode: RangeMode::Full,
            proof: ProofOptions::default(),
        }
    }
}

impl VerifyConfig {
    pub fn small_n_bound_for(&self, r: u64) -> u64 {
        self.small_n_bound.unwrap_or((2 * r).max(50))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Verified,
    /// Residues left without a verified certificate.
    Inconclusive(Vec<u64>),
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Verified => "VERIFIED",
            Status::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

/// Outcome of certifying one residue class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueOutcome {
    pub residue_start: u64,
    pub certificate: Option<Certificate>,
    /// The certificate re-verified under a freshly built context.
    pub verified: bool,
}

/// Proves a residue class and re-checks the result against a new context.
pub fn certify_residue(residue_start: u64, ctx: &PrimorialContext, opts: &ProofOptions) -> Result<ResidueOutcome> {
    let certificate = prove_residue_class(residue_start, ctx, opts)?;
    let verified = match &certificate {
        Some(cert) => {
            let fresh = primorial(ctx.r())?;
            verify_certificate(cert, &fresh)?
        }
        None => false,
    };
    Ok(ResidueOutcome {
        residue_start,
        certificate,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub r: u64,
    pub modulus: u64,
    pub search_range: RangeMode,
    /// Failures of condition 1 among starts in `search_range`.
    pub cond1_failure_starts: Vec<u64>,
    pub cond1_failure_count: usize,
    pub half_period_failure_count: usize,
    pub full_period_failure_count: usize,
    /// One certificate per full-period failure that was certified.
    pub certificates: Vec<Certificate>,
    pub small_n_checked_up_to: u64,
    /// `n ≤ small_n_checked_up_to` with `S_r(n)` integral; empty when all is well.
    pub small_n_violations: Vec<u64>,
    pub status: Status,
    pub wall_time: Option<Duration>,
}

impl VerificationReport {
    /// Combines the pipeline stages; `outcomes` must follow `full_failures` in order.
    pub fn assemble(
        ctx: &PrimorialContext,
        cfg: &VerifyConfig,
        full_failures: Vec<u64>,
        outcomes: Vec<ResidueOutcome>,
        small_n_violations: Vec<u64>,
    ) -> Result<Self> {
        let modulus = ctx.modulus_u64()?;
        let half_limit = RangeMode::Half.limit(modulus);
        let half_period_failure_count = full_failures.iter().take_while(|&&s| s <= half_limit).count();
        let cond1_failure_starts: Vec<u64> = match cfg.range_mode {
            RangeMode::Full => full_failures.clone(),
            RangeMode::Half => full_failures[..half_period_failure_count].to_vec(),
        };
        let mut uncertified = Vec::new();
        let mut certificates = Vec::with_capacity(outcomes.len());
        for outcome in outcomes {
            if !outcome.verified {
                uncertified.push(outcome.residue_start);
            }
            certificates.extend(outcome.certificate);
        }
        let status = if uncertified.is_empty() && small_n_violations.is_empty() {
            Status::Verified
        } else {
            Status::Inconclusive(uncertified)
        };
        Ok(Self {
            r: ctx.r(),
            modulus,
            search_range: cfg.range_mode,
            cond1_failure_count: cond1_failure_starts.len(),
            cond1_failure_starts,
            half_period_failure_count,
            full_period_failure_count: full_failures.len(),
            certificates,
            small_n_checked_up_to: cfg.small_n_bound_for(ctx.r()),
            small_n_violations,
            status,
            wall_time: None,
        })
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }
}

/// Checks that the configured bounds admit `r`.
pub fn check_r_range(r: u64, cfg: &VerifyConfig) -> Result<()> {
    if r < 1 {
        return Err(Error::RTooSmall { r, min: 1 });
    }
    if r > cfg.max_r {
        return Err(Error::RTooLarge { r, max: cfg.max_r });
    }
    Ok(())
}

/// Full sequential verification of `r`: exact scan of small `n`, full-period
/// enumeration of condition-1 failures, and a verified certificate for each failure.
pub fn verify_r(r: u64, cfg: &VerifyConfig) -> Result<VerificationReport> {
    check_r_range(r, cfg)?;
    let ctx = primorial(r)?;
    let small_n_violations = sums::nonintegral_scan(r, cfg.small_n_bound_for(r))?;
    let failures = enumerate_cond1_failures(r, RangeMode::Full)?;
    let outcomes = failures
        .iter()
        .map(|&s| certify_residue(s, &ctx, &cfg.proof))
        .collect::<Result<Vec<_>>>()?;
    VerificationReport::assemble(&ctx, cfg, failures, outcomes, small_n_violations)
}
