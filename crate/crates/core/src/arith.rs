//! Integer primitives shared by the rest of the crate.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Default cap on `a` for Mersenne smoothness tests.
pub const DEFAULT_A_MAX: u64 = 64;

/// All primes in `[2, limit]`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// `r`, the primes up to `r` and their product `m_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimorialContext {
    r: u64,
    primes: Vec<u64>,
    modulus: BigUint,
    // bit a-1 is set when 2^a - 1 is r-smooth, a in 1..=64
    mersenne_smooth: u64,
}

impl PrimorialContext {
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes in `[3, r]`.
    pub fn odd_primes(&self) -> &[u64] {
        self.primes.get(1..).unwrap_or(&[])
    }

    /// `m_r` as an arbitrary-precision integer.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// `m_r` when it fits in 64 bits (r ≤ 52).
    pub fn modulus_u64(&self) -> Result<u64> {
        self.modulus.to_u64().ok_or(Error::ModulusOverflow(self.r))
    }

    /// Smooth split of `x` against this context's primes.
    pub fn smooth_split(&self, x: u64) -> Result<SmoothSplit> {
        split_with(x, &self.primes)
    }

    /// Cached Mersenne smoothness for `a ≤ 64`; larger `a` falls back to the big-integer test.
    pub fn mersenne_smooth(&self, a: u64) -> bool {
        match a {
            1..=64 => self.mersenne_smooth >> (a - 1) & 1 == 1,
            _ => strip_mersenne(a, &self.primes),
        }
    }

    /// True when `gcd(x, m_r) = 1`.
    pub fn is_coprime(&self, x: u64) -> bool {
        self.primes.iter().all(|&p| !x.is_multiple_of(p))
    }
}

/// Builds the primorial context for `r ≥ 1`. `m_1` is the empty product 1.
pub fn primorial(r: u64) -> Result<PrimorialContext> {
    if r < 1 {
        return Err(Error::RTooSmall { r, min: 1 });
    }
    let primes = primes_up_to(r);
    let modulus = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
    let mut mersenne_smooth = 0u64;
    for a in 1..=64u64 {
        if strip_mersenne(a, &primes) {
            mersenne_smooth |= 1 << (a - 1);
        }
    }
    Ok(PrimorialContext {
        r,
        primes,
        modulus,
        mersenne_smooth,
    })
}

/// `C(n, k)`, zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> Result<BigUint> {
    if n < 0 {
        return Err(Error::NegativeN(n));
    }
    if k < 0 || k > n {
        return Ok(BigUint::zero());
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        // exact at every step: acc = C(n, i) before the update
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc)
}

/// Row `n` of the signed Stirling numbers of the first kind, `s(n, 0..=n)`.
///
/// These are the coefficients of the falling factorial `x(x−1)…(x−n+1)`.
pub fn stirling_first_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 0..n {
        // s(m+1, k) = s(m, k−1) − m·s(m, k)
        let mut next = vec![BigInt::zero(); m + 2];
        for (k, value) in row.iter().enumerate() {
            next[k + 1] += value;
            next[k] -= value * m;
        }
        row = next;
    }
    row
}

/// Signed Stirling number of the first kind `s(n, k)`; zero for `k > n`.
pub fn stirling_first_signed(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    stirling_first_row(n).swap_remove(k)
}

/// Largest `e` with `p^e | x`.
pub fn padic_valuation(x: u64, p: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::Zero("padic_valuation(x)"));
    }
    if p < 2 {
        return Err(Error::Zero("padic_valuation(p)"));
    }
    let mut x = x;
    let mut e = 0;
    while x.is_multiple_of(p) {
        x /= p;
        e += 1;
    }
    Ok(e)
}

/// `x = a·b` with `a` the `r`-smooth part and `b` the `r`-rough cofactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SmoothSplit {
    pub a: u64,
    pub b: u64,
}

pub fn smooth_split(x: u64, r: u64) -> Result<SmoothSplit> {
    split_with(x, &primes_up_to(r))
}

fn split_with(x: u64, primes: &[u64]) -> Result<SmoothSplit> {
    if x == 0 {
        return Err(Error::Zero("smooth_split(x)"));
    }
    let mut b = x;
    let mut a = 1;
    for &p in primes {
        while b.is_multiple_of(p) {
            b /= p;
            a *= p;
        }
    }
    Ok(SmoothSplit { a, b })
}

/// Whether every prime factor of `2^a − 1` is at most `r`.
///
/// Decided by dividing out the primes up to `r` and checking that the cofactor is 1;
/// `a > a_max` is refused.
pub fn is_mersenne_r_smooth(a: u64, r: u64, a_max: u64) -> Result<bool> {
    if a == 0 {
        return Err(Error::Zero("is_mersenne_r_smooth(a)"));
    }
    if a > a_max {
        return Err(Error::MersenneCap { a, a_max });
    }
    Ok(strip_mersenne(a, &primes_up_to(r)))
}

fn strip_mersenne(a: u64, primes: &[u64]) -> bool {
    let mut m = (BigUint::one() << a) - 1u32;
    for &p in primes {
        if p == 2 {
            continue;
        }
        loop {
            let (q, rem) = m.div_rem(&BigUint::from(p));
            if !rem.is_zero() {
                break;
            }
            m = q;
        }
    }
    m.is_one()
}

/// `2^e mod m` by square-and-multiply.
pub fn pow2_mod(e: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Zero("pow2_mod(m)"));
    }
    Ok(pow_mod(2, e, m))
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub(crate) fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    let mut base = base % m;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    result
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime factor of `x ≥ 2` by trial division.
pub fn least_prime_factor(x: u64) -> Option<u64> {
    if x < 2 {
        return None;
    }
    if x.is_multiple_of(2) {
        return Some(2);
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= x {
        if x.is_multiple_of(d) {
            return Some(d);
        }
        d += 2;
    }
    Some(x)
}

/// Full factorisation of a 64-bit integer by trial division, ascending.
pub fn factor_u64(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    while let Some(p) = least_prime_factor(x) {
        let mut e = 0;
        while x.is_multiple_of(p) {
            x /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}
