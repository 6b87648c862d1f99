//! Exact evaluation of the binomial sums.
//!
//! `S_r(n) = Σ_{k=0}^{n} k/(k+r)·C(n,k)` and its cofactor `S(r,n) = Σ_{k=0}^{n} r/(k+r)·C(n,k)`
//! add up to `2^n`, so one is integral exactly when the other is. The cofactor has the
//! alternating closed form
//!
//! ```text
//! S(r,n) = Σ_{j=1}^{r} (−1)^{r−j} · r · C(r−1, j−1) · (2^{n+j} − 1)/(n+j)
//! ```
//!
//! which has `r` terms regardless of `n`; it is the production path; the defining sums
//! are kept as oracles.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{binomial, is_prime_u64, stirling_first_row};
use crate::{Error, ExactRational, Result};

/// Trial division bound for denominator factorisation.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// An exact value together with its integrality verdict and the factored denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumEvaluation {
    pub r: u64,
    pub n: u64,
    pub value: ExactRational,
    pub integral: bool,
    /// Prime factorisation of the reduced denominator.
    pub denominator_primes: Vec<(BigUint, u32)>,
    /// A cofactor left over after trial division that could not be certified prime.
    pub unfactored: Option<BigUint>,
}

impl SumEvaluation {
    fn from_value(r: u64, n: u64, value: ExactRational) -> Self {
        let (denominator_primes, unfactored) = factor_denominator(&value.denom_magnitude());
        Self {
            r,
            n,
            integral: value.is_integer(),
            value,
            denominator_primes,
            unfactored,
        }
    }
}

fn check_r(r: u64) -> Result<()> {
    if r == 0 {
        return Err(Error::RTooSmall { r, min: 1 });
    }
    Ok(())
}

/// `S_r(n)` straight from its definition.
pub fn s_r_direct(r: u64, n: u64) -> Result<SumEvaluation> {
    check_r(r)?;
    let value = weighted_binomial_sum(r, n, |k| k);
    Ok(SumEvaluation::from_value(r, n, value))
}

/// `S(r,n)` straight from its definition.
pub fn s_cofactor_direct(r: u64, n: u64) -> Result<SumEvaluation> {
    check_r(r)?;
    let value = weighted_binomial_sum(r, n, |_| r);
    Ok(SumEvaluation::from_value(r, n, value))
}

/// `S(r,n)` from the alternating closed form.
pub fn s_cofactor_closed(r: u64, n: u64) -> Result<SumEvaluation> {
    check_r(r)?;
    let (numer, denom) = closed_form_parts(r, n);
    Ok(SumEvaluation::from_value(r, n, ExactRational::new(numer, denom)))
}

/// `S_r(n) = 2^n − S(r,n)` with the cofactor taken from the closed form.
pub fn s_r(r: u64, n: u64) -> Result<SumEvaluation> {
    check_r(r)?;
    let (numer, denom) = closed_form_parts(r, n);
    let value = ExactRational::from_integer(BigInt::one() << n) - ExactRational::new(numer, denom);
    Ok(SumEvaluation::from_value(r, n, value))
}

/// Integrality of `S_r(n)` (equivalently `S(r,n)`) without reducing or factoring.
pub fn is_integral(r: u64, n: u64) -> Result<bool> {
    check_r(r)?;
    let (numer, denom) = closed_form_parts(r, n);
    Ok(numer.is_multiple_of(&denom))
}

/// All `n` in `[1, n_max]` with `S_r(n)` integral.
pub fn nonintegral_scan(r: u64, n_max: u64) -> Result<Vec<u64>> {
    nonintegral_scan_range(r, 1, n_max)
}

/// As [`nonintegral_scan`] over `[lo, hi]`, for callers that partition the range.
pub fn nonintegral_scan_range(r: u64, lo: u64, hi: u64) -> Result<Vec<u64>> {
    check_r(r)?;
    let mut hits = Vec::new();
    for n in lo..=hi {
        if is_integral(r, n)? {
            hits.push(n);
        }
    }
    Ok(hits)
}

/// `F_r(n) = Σ_{i=0}^{r−1} s(r, i+1) · Σ_{k=0}^{n+r} k^i · C(n+r, k)`.
pub fn f_r(r: u64, n: u64) -> Result<BigInt> {
    check_r(r)?;
    let big_n = n + r;
    let stirling = stirling_first_row(r as usize);
    // power sums P_i = Σ_k k^i C(N,k), shared by every Stirling coefficient
    let mut power_sums = alloc::vec![BigUint::zero(); r as usize];
    let mut binom = BigUint::one();
    for k in 0..=big_n {
        let mut term = binom.clone();
        for sum in power_sums.iter_mut() {
            *sum += &term;
            term *= k;
        }
        binom = binom * (big_n - k) / (k + 1);
    }
    Ok(power_sums
        .into_iter()
        .enumerate()
        .map(|(i, p)| &stirling[i + 1] * BigInt::from(p))
        .sum())
}

/// Checks `r·(F_r(n) − (−1)^{r−1}(r−1)!) = (n+1)⋯(n+r)·S(r,n)` and, for every
/// `i ∈ 1..=r`, that the left side is `±r!·(2^{n+i} − 1)` modulo `n+i`.
pub fn check_falling_product_identity(r: u64, n: u64) -> Result<bool> {
    check_r(r)?;
    let fact = |m: u64| (1..=m).fold(BigInt::one(), |acc, k| acc * k);
    let sign = if (r - 1).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let lhs = BigInt::from(r) * (f_r(r, n)? - sign * fact(r - 1));

    let rising: BigInt = (1..=r).map(|i| BigInt::from(n + i)).product();
    let rhs = ExactRational::from_integer(rising) * s_cofactor_closed(r, n)?.value;
    if rhs != ExactRational::from_integer(lhs.clone()) {
        return Ok(false);
    }

    let r_fact = fact(r);
    for i in 1..=r {
        let modulus = BigInt::from(n + i);
        let mersenne: BigInt = (BigInt::one() << (n + i)) - 1;
        let target: BigInt = (&r_fact * mersenne).mod_floor(&modulus);
        let got = lhs.mod_floor(&modulus);
        let neg_target = (-&target).mod_floor(&modulus);
        if got != target && got != neg_target {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Σ_k weight(k)/(k+r)·C(n,k), accumulated over a running lcm of the denominators.
fn weighted_binomial_sum(r: u64, n: u64, weight: impl Fn(u64) -> u64) -> ExactRational {
    let mut numer = BigInt::zero();
    let mut denom = BigUint::one();
    let mut binom = BigUint::one();
    for k in 0..=n {
        let d = k + r;
        let g = (&denom % d).to_u64().unwrap_or(0).gcd(&d);
        // lcm(denom, d) = denom·(d/g); the term contributes weight·C(n,k)·(denom/g)
        let scale = d / g;
        let cofactor = &denom / g;
        numer *= scale;
        denom *= scale;
        numer += BigInt::from(&binom * weight(k) * cofactor);
        binom = binom * (n - k) / (k + 1);
    }
    ExactRational::new(numer, BigInt::from(denom))
}

/// Unreduced numerator and denominator `(T, (n+1)⋯(n+r))` of the closed form.
fn closed_form_parts(r: u64, n: u64) -> (BigInt, BigInt) {
    let denom: BigInt = (1..=r).map(|i| BigInt::from(n + i)).product();
    let mut numer = BigInt::zero();
    for j in 1..=r {
        let coeff = BigInt::from(r) * BigInt::from(binomial(r as i64 - 1, j as i64 - 1).unwrap_or_default());
        let mersenne = (BigInt::one() << (n + j)) - 1;
        let others = &denom / (n + j);
        let term = coeff * mersenne * others;
        if (r - j).is_multiple_of(2) {
            numer += term;
        } else {
            numer -= term;
        }
    }
    (numer, denom)
}

fn factor_denominator(denom: &BigUint) -> (Vec<(BigUint, u32)>, Option<BigUint>) {
    let mut rest = denom.clone();
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_LIMIT && BigUint::from(d) * d <= rest {
        let mut e = 0;
        while (&rest % d).is_zero() {
            rest /= d;
            e += 1;
        }
        if e > 0 {
            primes.push((BigUint::from(d), e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return (primes, None);
    }
    let limit_sq = BigUint::from(TRIAL_DIVISION_LIMIT) * TRIAL_DIVISION_LIMIT;
    let certified = rest < limit_sq || rest.to_u64().is_some_and(is_prime_u64);
    if certified {
        // merge with a repeated small prime if the loop stopped early on sqrt
        match primes.iter_mut().find(|(p, _)| *p == rest) {
            Some((_, e)) => *e += 1,
            None => primes.push((rest, 1)),
        }
        primes.sort();
        (primes, None)
    } else {
        (primes, Some(rest))
    }
}

/// Renders a factorisation like `[2^2, 3]`.
pub fn format_factorisation(primes: &[(BigUint, u32)]) -> alloc::string::String {
    use core::fmt::Write;
    let mut out = alloc::string::String::from("[");
    for (i, (p, e)) in primes.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        if *e == 1 {
            let _ = write!(out, "{p}");
        } else {
            let _ = write!(out, "{p}^{e}");
        }
    }
    out.push(']');
    out
}

impl SumEvaluation {
    /// The factorisation multiplies back to the reduced denominator.
    pub fn denominator_consistent(&self) -> bool {
        let mut product = self.unfactored.clone().unwrap_or_else(BigUint::one);
        for (p, e) in &self.denominator_primes {
            product *= p.pow(*e);
        }
        product == self.value.denom_magnitude() && self.value.denom().is_positive()
    }
}
