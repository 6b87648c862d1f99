//! Totative gap statistics.
//!
//! For `q ≥ 1` let `1 = a_1 < a_2 < … < a_{φ(q)+1} = q + 1` be the integers in
//! `[1, q+1]` coprime to `q`. A window `{n+1, …, n+r}` with no totative sits strictly
//! inside one gap `(a_w, a_{w+1})`, and a gap of length `g` holds exactly `g − r` such
//! windows when `g > r`. Summing over one period gives the count of bad starts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factor_u64, primes_up_to, primorial};
use crate::{Error, ExactRational, Result};

/// Largest `r` accepted by the density routines unless configured otherwise.
pub const DEFAULT_DENSITY_MAX_R: u64 = 19;

/// Hard ceiling: `m_r` for `r ≤ 22` stays below `10^7`.
pub const DENSITY_HARD_MAX_R: u64 = 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapProfile {
    pub q: u64,
    /// Totatives in `[1, q+1]`, ascending.
    pub totatives: Vec<u64>,
    /// `gaps[i] = totatives[i+1] − totatives[i]`.
    pub gaps: Vec<u64>,
    pub phi_q: u64,
}

impl GapProfile {
    /// Builds a profile from a complete ascending totative list of `[1, q+1]`.
    pub fn from_totatives(q: u64, totatives: Vec<u64>) -> Self {
        let gaps: Vec<u64> = totatives.windows(2).map(|w| w[1] - w[0]).collect();
        Self {
            q,
            phi_q: gaps.len() as u64,
            totatives,
            gaps,
        }
    }

    pub fn max_gap(&self) -> u64 {
        self.gaps.iter().copied().max().unwrap_or(0)
    }

    /// Gap length → multiplicity.
    pub fn histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for &g in &self.gaps {
            *h.entry(g).or_insert(0) += 1;
        }
        h
    }

    /// `Σ max(g − r, 0)`: starts `n ∈ [1, q]` whose window `{n+1..n+r}` misses every totative.
    pub fn bad_start_count(&self, r: u64) -> u64 {
        self.gaps.iter().map(|&g| g.saturating_sub(r)).sum()
    }

    /// `N = Σ_{g ≥ r} g`.
    pub fn long_gap_mass(&self, r: u64) -> u64 {
        self.gaps.iter().filter(|&&g| g >= r).sum()
    }

    pub fn v_alpha(&self, alpha: f64) -> Result<VAlpha> {
        check_alpha(alpha)?;
        let hist = self.histogram();
        if let Some(k) = integral_alpha(alpha) {
            let total = hist
                .iter()
                .fold(BigUint::zero(), |acc, (&g, &c)| acc + BigUint::from(g).pow(k) * c);
            return Ok(VAlpha::Exact(total));
        }
        let mut sum = NeumaierSum::default();
        for (&g, &c) in &hist {
            sum.add(libm::pow(g as f64, alpha) * c as f64);
        }
        Ok(VAlpha::Approx(sum.value()))
    }

    /// `V_α(q) / (φ(q)·(q/φ(q))^α)`.
    pub fn mv_ratio(&self, alpha: f64) -> Result<f64> {
        let v = self.v_alpha(alpha)?;
        Ok(match (v, integral_alpha(alpha)) {
            (VAlpha::Exact(v), Some(k)) => {
                // V·φ^{α−1} / q^α, exactly
                let num = BigInt::from(v) * BigInt::from(self.phi_q).pow(k - 1);
                let den = BigInt::from(self.q).pow(k);
                ExactRational::new(num, den).to_f64()
            }
            (v, _) => {
                let phi = self.phi_q as f64;
                v.to_f64() / (phi * libm::pow(self.q as f64 / phi, alpha))
            }
        })
    }

    /// `N·r^{α−1} ≤ V_α(q)`; exact for integral `α`.
    pub fn bound_chain_ok(&self, r: u64, alpha: f64) -> Result<bool> {
        let n = self.long_gap_mass(r);
        Ok(match self.v_alpha(alpha)? {
            VAlpha::Exact(v) => {
                let k = integral_alpha(alpha).unwrap_or(1);
                BigUint::from(n) * BigUint::from(r).pow(k - 1) <= v
            }
            VAlpha::Approx(v) => {
                let lhs = n as f64 * libm::pow(r as f64, alpha - 1.0);
                lhs <= v * (1.0 + 1e-12)
            }
        })
    }
}

/// `V_α(q)`: exact for integral `α`, otherwise a compensated floating-point sum.
#[derive(Debug, Clone, PartialEq)]
pub enum VAlpha {
    Exact(BigUint),
    Approx(f64),
}

impl VAlpha {
    pub fn to_f64(&self) -> f64 {
        match self {
            VAlpha::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
            VAlpha::Approx(v) => *v,
        }
    }
}

impl core::fmt::Display for VAlpha {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VAlpha::Exact(v) => write!(f, "{v}"),
            VAlpha::Approx(v) => write!(f, "{v:.6e}"),
        }
    }
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::AlphaBelowOne(alpha));
    }
    Ok(())
}

fn integral_alpha(alpha: f64) -> Option<u32> {
    (libm::trunc(alpha) == alpha && alpha <= u32::MAX as f64).then_some(alpha as u32)
}

/// Totatives of a number with the given distinct prime factors, in `[lo, hi)`.
pub fn totatives_in(prime_factors: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    let mut hit = vec![false; (hi - lo) as usize];
    for &p in prime_factors {
        let mut i = ((p - lo % p) % p) as usize;
        while i < hit.len() {
            hit[i] = true;
            i += p as usize;
        }
    }
    hit.iter()
        .enumerate()
        .filter(|(_, &h)| !h)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// Distinct prime factors of `q`.
pub fn prime_factors(q: u64) -> Vec<u64> {
    factor_u64(q).into_iter().map(|(p, _)| p).collect()
}

/// Sorted totatives of `q` in `[1, q+1]` and their gaps.
pub fn gap_profile(q: u64) -> Result<GapProfile> {
    if q == 0 {
        return Err(Error::Zero("gap_profile(q)"));
    }
    let totatives = totatives_in(&prime_factors(q), 1, q + 2);
    Ok(GapProfile::from_totatives(q, totatives))
}

pub fn v_alpha(q: u64, alpha: f64) -> Result<VAlpha> {
    gap_profile(q)?.v_alpha(alpha)
}

pub fn bad_start_count(q: u64, r: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::RTooSmall { r, min: 1 });
    }
    Ok(gap_profile(q)?.bad_start_count(r))
}

pub fn mv_ratio(q: u64, alpha: f64) -> Result<f64> {
    gap_profile(q)?.mv_ratio(alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub r: u64,
    pub q: u64,
    pub phi_q: u64,
    pub bad_start_count: u64,
    /// `bad_start_count / q`.
    pub density: ExactRational,
    pub alpha: f64,
    pub v_alpha: VAlpha,
    pub mv_ratio: f64,
    /// `N = Σ_{g ≥ r} g`.
    pub long_gap_mass: u64,
    pub bound_chain_ok: bool,
}

impl DensityEstimate {
    pub fn from_profile(r: u64, profile: &GapProfile, alpha: f64) -> Result<Self> {
        let bad = profile.bad_start_count(r);
        Ok(Self {
            r,
            q: profile.q,
            phi_q: profile.phi_q,
            bad_start_count: bad,
            density: ExactRational::new(bad, profile.q),
            alpha,
            v_alpha: profile.v_alpha(alpha)?,
            mv_ratio: profile.mv_ratio(alpha)?,
            long_gap_mass: profile.long_gap_mass(r),
            bound_chain_ok: profile.bound_chain_ok(r, alpha)?,
        })
    }
}

fn check_density_r(r: u64, max_r: u64) -> Result<()> {
    if r < 2 {
        return Err(Error::RTooSmall { r, min: 2 });
    }
    let max = max_r.min(DENSITY_HARD_MAX_R);
    if r > max {
        return Err(Error::RTooLarge { r, max });
    }
    Ok(())
}

/// Exact density of starts whose window misses every totative of `m_r`.
pub fn empirical_bad_density(r: u64, alpha: f64) -> Result<DensityEstimate> {
    check_density_r(r, DENSITY_HARD_MAX_R)?;
    let q = primorial(r)?.modulus_u64()?;
    DensityEstimate::from_profile(r, &gap_profile(q)?, alpha)
}

/// One row per `r ∈ [2, r_max]`; profiles are shared between `r` with equal `m_r`.
pub fn density_curve(r_max: u64, alpha: f64, max_r: u64) -> Result<Vec<DensityEstimate>> {
    check_density_r(r_max, max_r)?;
    check_alpha(alpha)?;
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

/// `n!/φ(n!) = Π_{p ≤ n} p/(p−1)`, in lowest terms.
pub fn euler_ratio(n: u64) -> Result<ExactRational> {
    if n < 2 {
        return Err(Error::RTooSmall { r: n, min: 2 });
    }
    let primes = primes_up_to(n);
    // exponent of each prime in Π p / Π (p−1); every prime of p−1 is below n
    let mut exponent: BTreeMap<u64, i64> = primes.iter().map(|&p| (p, 1)).collect();
    for &p in &primes {
        for (q, e) in factor_u64(p - 1) {
            *exponent.entry(q).or_insert(0) -= i64::from(e);
        }
    }
    let mut numer = BigUint::one();
    let mut denom = BigUint::one();
    for (p, e) in exponent {
        if e > 0 {
            numer *= BigUint::from(p).pow(e as u32);
        } else if e < 0 {
            denom *= BigUint::from(p).pow((-e) as u32);
        }
    }
    Ok(ExactRational::new(numer, denom))
}

/// `n!/φ(n!) < 3 ln n`.
pub fn euler_ratio_bound_holds(n: u64) -> Result<bool> {
    Ok(euler_ratio(n)?.to_f64() < 3.0 * libm::log(n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_examples() {
        let p = gap_profile(6).unwrap();
        assert_eq!(p.totatives, [1, 5, 7]);
        assert_eq!(p.gaps, [4, 2]);
        let p = gap_profile(2).unwrap();
        assert_eq!(p.totatives, [1, 3]);
        assert_eq!(p.gaps, [2]);
        let p = gap_profile(30).unwrap();
        assert_eq!(p.gaps, [6, 4, 2, 4, 2, 4, 6, 2]);
        assert_eq!(p.phi_q, 8);
        let p = gap_profile(1).unwrap();
        assert_eq!((p.totatives.as_slice(), p.phi_q), (&[1u64, 2][..], 1));
        assert!(gap_profile(0).is_err());
    }

    #[test]
    fn profile_invariants() {
        for q in 1..2000u64 {
            let p = gap_profile(q).unwrap();
            assert_eq!(p.totatives[0], 1);
            assert_eq!(*p.totatives.last().unwrap(), q + 1);
            assert_eq!(p.gaps.iter().sum::<u64>(), q);
            let phi = (1..=q).filter(|&k| num_integer::gcd(k, q) == 1).count() as u64;
            assert_eq!(p.phi_q, phi);
        }
    }

    #[test]
    fn v_alpha_examples() {
        assert_eq!(v_alpha(6, 2.0).unwrap(), VAlpha::Exact(BigUint::from(20u32)));
        assert_eq!(v_alpha(30, 2.0).unwrap(), VAlpha::Exact(BigUint::from(132u32)));
        assert_eq!(v_alpha(30, 1.0).unwrap(), VAlpha::Exact(BigUint::from(30u32)));
        assert!(v_alpha(30, 0.5).is_err());
        assert!(v_alpha(30, f64::NAN).is_err());
        let VAlpha::Approx(v) = v_alpha(30, 1.5).unwrap() else { panic!() };
        let direct: f64 = [6.0f64, 4.0, 2.0, 4.0, 2.0, 4.0, 6.0, 2.0].iter().map(|g| g.powf(1.5)).sum();
        assert!((v - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn bad_start_examples() {
        assert_eq!(bad_start_count(6, 3).unwrap(), 1);
        assert_eq!(bad_start_count(30, 5).unwrap(), 2);
        assert_eq!(bad_start_count(2, 2).unwrap(), 0);
        assert_eq!(bad_start_count(6, 4).unwrap(), 0);
        assert!(bad_start_count(6, 0).is_err());
    }

    #[test]
    fn mv_ratio_examples() {
        for q in [1u64, 2, 30, 2310, 12345] {
            assert_eq!(mv_ratio(q, 1.0).unwrap(), 1.0);
        }
        let v = mv_ratio(30, 2.0).unwrap();
        assert!((v - 132.0 / (8.0 * (30.0f64 / 8.0).powi(2))).abs() < 1e-12);
        assert!((v - 1.1733).abs() < 1e-4);
        let v = mv_ratio(2310, 2.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn density_examples() {
        assert_eq!(empirical_bad_density(3, 2.0).unwrap().density, ExactRational::new(1, 6));
        assert_eq!(empirical_bad_density(5, 2.0).unwrap().density, ExactRational::new(1, 15));
        assert_eq!(empirical_bad_density(11, 2.0).unwrap().density, ExactRational::new(14, 2310));
        assert!(empirical_bad_density(1, 2.0).is_err());
        assert!(empirical_bad_density(23, 2.0).is_err());
    }

    #[test]
    fn curve_rows() {
        let rows = density_curve(5, 2.0, DEFAULT_DENSITY_MAX_R).unwrap();
        let d: Vec<ExactRational> = rows.iter().map(|e| e.density.clone()).collect();
        assert_eq!(
            d,
            [
                ExactRational::zero(),
                ExactRational::new(1, 6),
                ExactRational::zero(),
                ExactRational::new(1, 15)
            ]
        );
        assert!(rows.iter().all(|e| e.bound_chain_ok));
        let rows = density_curve(2, 2.0, DEFAULT_DENSITY_MAX_R).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].density.is_zero());
        assert!(density_curve(20, 2.0, DEFAULT_DENSITY_MAX_R).is_err());
    }

    #[test]
    fn euler_ratio_examples() {
        assert_eq!(euler_ratio(2).unwrap(), ExactRational::new(2, 1));
        assert_eq!(euler_ratio(4).unwrap(), ExactRational::new(3, 1));
        assert_eq!(euler_ratio(10).unwrap(), ExactRational::new(35, 8));
        assert!(euler_ratio(1).is_err());
        for n in 2..=200 {
            assert!(euler_ratio_bound_holds(n).unwrap(), "n={n}");
            let direct = primes_up_to(n)
                .into_iter()
                .fold(ExactRational::one(), |acc, p| acc * ExactRational::new(p, p - 1));
            assert_eq!(euler_ratio(n).unwrap(), direct);
        }
    }

    #[test]
    fn real_alpha_bound_chain() {
        let p = gap_profile(30030).unwrap();
        for alpha in [1.0, 1.5, 2.0, 2.5, 3.0] {
            for r in 2..20 {
                assert!(p.bound_chain_ok(r, alpha).unwrap());
            }
        }
    }
}
