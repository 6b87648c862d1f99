//! Divisibility witnesses and residue-class certificates.
//!
//! A window `{s, …, s+r−1}` stands for the sum index `n = s − 1`. If some member `x`
//! factors as `x = a·b` with `b > 1`, every prime of `b` above `r`, and every prime of
//! `2^a − 1` at most `r`, then the least prime of `b` survives in the denominator of
//! `S(r,n)` and `S_r(n)` is not an integer. The interval conditions below are ways of
//! guaranteeing such a member for a whole residue class of windows modulo `m_r`.
//!
//! Residue-class certificates are checked on a *base* window: the class representative
//! itself when its start exceeds `r`, otherwise the representative shifted by `4·m_r`.
//! Since `m_r ≡ 2 (mod 4)`, the translates `base + j·m_r` for `j = 0..4` meet every
//! residue modulo 8, so rules that depend on the 2-adic valuation of members (a ∈ {2,4}
//! and condition 3) are checked on all four translates.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::arith::{least_prime_factor, DEFAULT_A_MAX};
use crate::{sums, Error, PrimorialContext, Result};

/// Largest `n` for which a certificate may rest on exact evaluation alone.
pub const EXACT_EVALUATION_LIMIT: u64 = 10_000;

/// Number of translates `j·m_r` needed to cover every residue mod 8.
pub const TRANSLATES: u32 = 4;

/// The `r` consecutive integers `{start, …, start+length−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalWindow {
    start: u64,
    length: u64,
}

impl IntervalWindow {
    pub fn new(start: u64, length: u64) -> Result<Self> {
        if start == 0 {
            return Err(Error::Zero("window start"));
        }
        if length == 0 {
            return Err(Error::Zero("window length"));
        }
        Ok(Self { start, length })
    }

    /// The window `{n+1, …, n+r}` attached to the sum index `n`.
    pub fn for_index(n: u64, r: u64) -> Result<Self> {
        Self::new(n + 1, r)
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    /// Sum index `n = start − 1`.
    pub fn index(&self) -> u64 {
        self.start - 1
    }

    pub fn members(&self) -> impl Iterator<Item = u64> {
        self.start..self.start + self.length
    }

    /// Member at 1-based offset `i`.
    pub fn member(&self, offset: u32) -> Option<u64> {
        (1..=self.length)
            .contains(&u64::from(offset))
            .then(|| self.start + u64::from(offset) - 1)
    }

    /// 1-based offset of `x`, if it lies in the window.
    pub fn offset_of(&self, x: u64) -> Option<u32> {
        (self.start..self.start + self.length)
            .contains(&x)
            .then(|| (x - self.start + 1) as u32)
    }

    pub fn translated(&self, by: u64) -> Self {
        Self {
            start: self.start + by,
            length: self.length,
        }
    }
}

/// `x = a·b` with `b > 1` rough, `2^a − 1` smooth, and `p` the least prime of `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WitnessTriple {
    pub x: u64,
    pub a: u64,
    pub b: u64,
    pub p: u64,
}

/// Which smooth parts `a` a witness search accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum APolicy {
    /// `a ∈ {2, 4}`: even members with 2-adic valuation 1 or 2 and a rough odd part.
    A24,
    /// `a | 12`.
    ADiv12,
    /// Any `a ≤ a_max` whose Mersenne number is smooth.
    General { a_max: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Cond1,
    Cond2,
    Cond2P,
    Cond3,
    TranslateA24,
    ExplicitSingle,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::Cond1 => "COND1",
            Rule::Cond2 => "COND2",
            Rule::Cond2P => "COND2P",
            Rule::Cond3 => "COND3",
            Rule::TranslateA24 => "TRANSLATE_A24",
            Rule::ExplicitSingle => "EXPLICIT_SINGLE",
        }
    }

    fn is_pair_rule(&self) -> bool {
        matches!(self, Rule::Cond2 | Rule::Cond2P | Rule::Cond3)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "COND1" => Rule::Cond1,
            "COND2" => Rule::Cond2,
            "COND2P" => Rule::Cond2P,
            "COND3" => Rule::Cond3,
            "TRANSLATE_A24" => Rule::TranslateA24,
            "EXPLICIT_SINGLE" => Rule::ExplicitSingle,
            _ => return Err(Error::InvalidCertificate("unknown rule")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    ResidueClass,
    SingleN,
}

impl Scope {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scope::ResidueClass => "residue-class",
            Scope::SingleN => "single-n",
        }
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residue-class" => Ok(Scope::ResidueClass),
            "single-n" => Ok(Scope::SingleN),
            _ => Err(Error::InvalidCertificate("unknown scope")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WitnessEntry {
    /// `j` in `base + j·m_r`.
    pub translate: u32,
    pub triple: WitnessTriple,
    /// 1-based offsets `(i, j)` of the two members for pair rules.
    pub offsets: Option<(u32, u32)>,
}

/// Evidence that `S_r(n)` is nonintegral for every `n = s − 1` with window start
/// `s ≡ residue_start (mod m_r)` and `s > r`, or for the single window starting at
/// `residue_start` when the scope is [`Scope::SingleN`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub r: u64,
    pub residue_start: u64,
    pub modulus: u64,
    pub rule: Rule,
    pub witnesses: Vec<WitnessEntry>,
    pub scope: Scope,
}

impl Certificate {
    /// First window start the certificate examines.
    pub fn base_start(&self) -> u64 {
        match self.scope {
            Scope::SingleN => self.residue_start,
            Scope::ResidueClass if self.rule == Rule::Cond1 => coprime_base(self.residue_start, self.modulus),
            Scope::ResidueClass => base_start(self.residue_start, self.r, self.modulus),
        }
    }

    /// Window examined for translate `j`.
    pub fn window(&self, translate: u32) -> IntervalWindow {
        IntervalWindow {
            start: self.base_start() + u64::from(translate) * self.modulus,
            length: self.r,
        }
    }
}

// coprimality is m_r-periodic, so only the degenerate member 1 needs moving
fn coprime_base(residue_start: u64, modulus: u64) -> u64 {
    if residue_start >= 2 {
        residue_start
    } else {
        residue_start + modulus
    }
}

fn base_start(residue_start: u64, r: u64, modulus: u64) -> u64 {
    if residue_start > r {
        residue_start
    } else {
        residue_start + u64::from(TRANSLATES) * modulus
    }
}

/// Knobs for certificate search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofOptions {
    /// Translates examined for the 2-adic rules; fewer than 4 disables them.
    pub translates: u32,
    pub a_max: u64,
}

impl Default for ProofOptions {
    fn default() -> Self {
        Self {
            translates: TRANSLATES,
            a_max: DEFAULT_A_MAX,
        }
    }
}

/// A member coprime to `m_r`.
pub fn cond1(window: &IntervalWindow, ctx: &PrimorialContext) -> Option<u64> {
    window.members().find(|&x| ctx.is_coprime(x))
}

/// Members with `gcd(x, m_r) = 2`: even, with no odd prime factor up to `r`.
fn even_odd_smooth_free(x: u64, ctx: &PrimorialContext) -> bool {
    x.is_multiple_of(2) && ctx.odd_primes().iter().all(|&p| !x.is_multiple_of(p))
}

/// Multiples of 3 free of primes in `[5, r]` and not divisible by 8.
fn div3_smooth_free(x: u64, ctx: &PrimorialContext) -> bool {
    x.is_multiple_of(3) && !x.is_multiple_of(8) && ctx.primes().iter().filter(|&&p| p >= 5).all(|&p| !x.is_multiple_of(p))
}

fn first_pair(
    window: &IntervalWindow,
    candidate: impl Fn(u64) -> bool,
    accept: impl Fn(u64) -> bool,
) -> Option<(u64, u64)> {
    let members: Vec<u64> = window.members().filter(|&x| candidate(x)).collect();
    for (k, &x) in members.iter().enumerate() {
        for &y in &members[k + 1..] {
            if accept(y - x) {
                return Some((x, y));
            }
        }
    }
    None
}

/// Two members with `gcd = 2` against `m_r`, fewer than 8 apart.
pub fn cond2(window: &IntervalWindow, ctx: &PrimorialContext) -> Option<(u64, u64)> {
    first_pair(window, |x| even_odd_smooth_free(x, ctx), |d| d < 8)
}

/// As [`cond2`] with distance below 16; needs `r ≥ 17` so that `2^8 − 1 = 3·5·17` is smooth.
pub fn cond2p(window: &IntervalWindow, ctx: &PrimorialContext) -> Result<Option<(u64, u64)>> {
    if ctx.r() < 17 {
        return Err(Error::RTooSmall { r: ctx.r(), min: 17 });
    }
    Ok(first_pair(window, |x| even_odd_smooth_free(x, ctx), |d| d < 16))
}

/// Two multiples of 3 free of primes in `[5, r]`, neither divisible by 8, with offsets
/// not congruent mod 9. Needs `r ≥ 13` (`2^12 − 1 = 3^2·5·7·13`).
pub fn cond3(window: &IntervalWindow, ctx: &PrimorialContext) -> Result<Option<(u64, u64)>> {
    if ctx.r() < 13 {
        return Err(Error::RTooSmall { r: ctx.r(), min: 13 });
    }
    Ok(first_pair(window, |x| div3_smooth_free(x, ctx), |d| d % 9 != 0))
}

/// Canonical witness for `x` if it qualifies under `policy`.
pub fn witness_for(x: u64, ctx: &PrimorialContext, policy: APolicy) -> Option<WitnessTriple> {
    let split = ctx.smooth_split(x).ok()?;
    if split.b <= 1 {
        return None;
    }
    let allowed = match policy {
        APolicy::A24 => split.a == 2 || split.a == 4,
        APolicy::ADiv12 => 12 % split.a == 0,
        APolicy::General { a_max } => split.a <= a_max,
    };
    if !allowed || !ctx.mersenne_smooth(split.a) {
        return None;
    }
    Some(WitnessTriple {
        x,
        a: split.a,
        b: split.b,
        p: least_prime_factor(split.b)?,
    })
}

/// First member, in ascending order, with a witness under `policy`.
pub fn find_witness(
    window: &IntervalWindow,
    ctx: &PrimorialContext,
    policy: APolicy,
) -> Option<WitnessTriple> {
    window.members().find_map(|x| witness_for(x, ctx, policy))
}

fn pair_entry(
    window: &IntervalWindow,
    translate: u32,
    pair: (u64, u64),
    ctx: &PrimorialContext,
    a_max: u64,
) -> Option<WitnessEntry> {
    let policy = APolicy::General { a_max };
    let triple = witness_for(pair.0, ctx, policy).or_else(|| witness_for(pair.1, ctx, policy))?;
    Some(WitnessEntry {
        translate,
        triple,
        offsets: Some((window.offset_of(pair.0)?, window.offset_of(pair.1)?)),
    })
}

fn coprime_entry(x: u64, translate: u32) -> Option<WitnessEntry> {
    Some(WitnessEntry {
        translate,
        triple: WitnessTriple {
            x,
            a: 1,
            b: x,
            p: least_prime_factor(x)?,
        },
        offsets: None,
    })
}

/// Searches for a certificate covering the residue class of `residue_start` modulo `m_r`.
///
/// Rules are tried in the order COND1, TRANSLATE_A24, COND2P, COND3, COND2.
pub fn prove_residue_class(
    residue_start: u64,
    ctx: &PrimorialContext,
    opts: &ProofOptions,
) -> Result<Option<Certificate>> {
    let modulus = ctx.modulus_u64()?;
    if residue_start == 0 || residue_start > modulus {
        return Err(Error::InvalidCertificate("residue_start outside [1, m_r]"));
    }
    let r = ctx.r();
    let base = IntervalWindow {
        start: base_start(residue_start, r, modulus),
        length: r,
    };
    let translate = |j: u32| base.translated(u64::from(j) * modulus);
    let cert = |rule, witnesses| Certificate {
        r,
        residue_start,
        modulus,
        rule,
        witnesses,
        scope: Scope::ResidueClass,
    };
    let two_adic = opts.translates >= TRANSLATES && r >= 2;

    let coprime_window = IntervalWindow {
        start: coprime_base(residue_start, modulus),
        length: r,
    };
    if let Some(entry) = cond1(&coprime_window, ctx).and_then(|x| coprime_entry(x, 0)) {
        return Ok(Some(cert(Rule::Cond1, alloc::vec![entry])));
    }
    if two_adic {
        let entries: Option<Vec<WitnessEntry>> = (0..TRANSLATES)
            .map(|j| {
                find_witness(&translate(j), ctx, APolicy::A24).map(|triple| WitnessEntry {
                    translate: j,
                    triple,
                    offsets: None,
                })
            })
            .collect();
        if let Some(entries) = entries {
            return Ok(Some(cert(Rule::TranslateA24, entries)));
        }
    }
    if r >= 17 {
        if let Some(entry) = cond2p(&base, ctx)?.and_then(|p| pair_entry(&base, 0, p, ctx, opts.a_max)) {
            return Ok(Some(cert(Rule::Cond2P, alloc::vec![entry])));
        }
    }
    if r >= 13 && two_adic {
        let entries: Option<Vec<WitnessEntry>> = (0..TRANSLATES)
            .map(|j| {
                let w = translate(j);
                cond3(&w, ctx).ok().flatten().and_then(|p| pair_entry(&w, j, p, ctx, opts.a_max))
            })
            .collect();
        if let Some(entries) = entries {
            return Ok(Some(cert(Rule::Cond3, entries)));
        }
    }
    if r >= 5 {
        if let Some(entry) = cond2(&base, ctx).and_then(|p| pair_entry(&base, 0, p, ctx, opts.a_max)) {
            return Ok(Some(cert(Rule::Cond2, alloc::vec![entry])));
        }
    }
    Ok(None)
}

/// Certificate for the single window `{n+1, …, n+r}`.
///
/// Tries COND1, then the pair rules COND2P, COND3, COND2 on this window alone, then any
/// witness with `a ≤ a_max`, and finally exact evaluation when `n` is small.
pub fn prove_single(n: u64, ctx: &PrimorialContext, opts: &ProofOptions) -> Result<Option<Certificate>> {
    if n == 0 {
        return Err(Error::Zero("n"));
    }
    let r = ctx.r();
    let window = IntervalWindow::for_index(n, r)?;
    let cert = |rule, witnesses| Certificate {
        r,
        residue_start: window.start(),
        modulus: ctx.modulus_u64().unwrap_or(0),
        rule,
        witnesses,
        scope: Scope::SingleN,
    };
    ctx.modulus_u64()?;

    if let Some(entry) = cond1(&window, ctx).and_then(|x| coprime_entry(x, 0)) {
        return Ok(Some(cert(Rule::Cond1, alloc::vec![entry])));
    }
    let mut pairs: Vec<(Rule, Option<(u64, u64)>)> = Vec::new();
    if r >= 17 {
        pairs.push((Rule::Cond2P, cond2p(&window, ctx)?));
    }
    if r >= 13 {
        pairs.push((Rule::Cond3, cond3(&window, ctx)?));
    }
    if r >= 5 {
        pairs.push((Rule::Cond2, cond2(&window, ctx)));
    }
    for (rule, pair) in pairs {
        if let Some(entry) = pair.and_then(|p| pair_entry(&window, 0, p, ctx, opts.a_max)) {
            return Ok(Some(cert(rule, alloc::vec![entry])));
        }
    }
    if let Some(triple) = find_witness(&window, ctx, APolicy::General { a_max: opts.a_max }) {
        let entry = WitnessEntry {
            translate: 0,
            triple,
            offsets: None,
        };
        return Ok(Some(cert(Rule::ExplicitSingle, alloc::vec![entry])));
    }
    if n <= EXACT_EVALUATION_LIMIT && !sums::is_integral(r, n)? {
        return Ok(Some(cert(Rule::ExplicitSingle, Vec::new())));
    }
    Ok(None)
}

/// Re-checks a certificate from scratch.
///
/// Returns `Err(Error::InvalidCertificate)` when the certificate is malformed (wrong
/// shape for its rule, rule unavailable for this `r`, mismatched modulus, offsets out of
/// range) and `Ok(false)` when it is well formed but a claimed property does not hold.
pub fn verify_certificate(cert: &Certificate, ctx: &PrimorialContext) -> Result<bool> {
    check_structure(cert, ctx)?;
    let r = cert.r;
    let m = cert.modulus;
    for entry in &cert.witnesses {
        let window = cert.window(entry.translate);
        if !window.members().any(|x| x == entry.triple.x) {
            return Ok(false);
        }
        if !triple_holds(&entry.triple, r, m, ctx.primes()) {
            return Ok(false);
        }
        let holds = match cert.rule {
            Rule::Cond1 => entry.triple.a == 1 && entry.triple.x.gcd(&m) == 1,
            Rule::TranslateA24 => matches!(entry.triple.a, 2 | 4),
            Rule::ExplicitSingle => true,
            Rule::Cond2 | Rule::Cond2P | Rule::Cond3 => {
                let Some((i, j)) = entry.offsets else {
                    return Err(Error::InvalidCertificate("pair rule without offsets"));
                };
                let (Some(x), Some(y)) = (window.member(i), window.member(j)) else {
                    return Ok(false);
                };
                (entry.triple.x == x || entry.triple.x == y) && pair_holds(cert.rule, x, y, j - i, m)
            }
        };
        if !holds {
            return Ok(false);
        }
    }
    if cert.rule == Rule::ExplicitSingle && cert.witnesses.is_empty() {
        // exact evaluation from the defining sum
        let n = cert.residue_start - 1;
        return Ok(!sums::s_r_direct(r, n)?.integral);
    }
    Ok(true)
}

fn check_structure(cert: &Certificate, ctx: &PrimorialContext) -> Result<()> {
    let invalid = |msg| Err(Error::InvalidCertificate(msg));
    if cert.r != ctx.r() {
        return invalid("r does not match the context");
    }
    if ctx.modulus_u64()? != cert.modulus {
        return invalid("modulus is not the primorial of r");
    }
    match cert.scope {
        Scope::ResidueClass => {
            if cert.residue_start == 0 || cert.residue_start > cert.modulus {
                return invalid("residue_start outside [1, m_r]");
            }
            if cert.rule == Rule::ExplicitSingle {
                return invalid("EXPLICIT_SINGLE cannot cover a residue class");
            }
        }
        Scope::SingleN => {
            if cert.residue_start < 2 {
                return invalid("single window must start at n+1 with n >= 1");
            }
            if cert.witnesses.iter().any(|w| w.translate != 0) {
                return invalid("single-n certificate with translates");
            }
        }
    }
    let min_r = match cert.rule {
        Rule::Cond2P => 17,
        Rule::Cond3 => 13,
        Rule::Cond2 => 5,
        Rule::TranslateA24 => 2,
        _ => 1,
    };
    if cert.r < min_r {
        return invalid("rule unavailable for this r");
    }
    if cert.rule.is_pair_rule() && cert.witnesses.iter().any(|w| w.offsets.is_none()) {
        return invalid("pair rule without offsets");
    }
    for w in &cert.witnesses {
        if let Some((i, j)) = w.offsets {
            if i == 0 || i >= j || u64::from(j) > cert.r {
                return invalid("offsets must satisfy 1 <= i < j <= r");
            }
        }
    }
    let per_translate = cert.scope == Scope::ResidueClass && matches!(cert.rule, Rule::TranslateA24 | Rule::Cond3);
    if per_translate {
        let mut seen: Vec<u32> = cert.witnesses.iter().map(|w| w.translate).collect();
        seen.sort_unstable();
        if seen != [0, 1, 2, 3] {
            return invalid("2-adic rule needs one witness per translate 0..3");
        }
        if cert.modulus % 4 != 2 {
            return invalid("translate coverage needs m_r = 2 mod 4");
        }
    } else {
        let expected = usize::from(!(cert.rule == Rule::ExplicitSingle && cert.witnesses.is_empty()));
        if cert.witnesses.len() != expected || cert.witnesses.iter().any(|w| w.translate != 0) {
            return invalid("rule expects exactly one witness at translate 0");
        }
        if cert.rule == Rule::ExplicitSingle
            && cert.witnesses.is_empty()
            && cert.residue_start - 1 > EXACT_EVALUATION_LIMIT
        {
            return invalid("exact-evaluation certificate beyond the evaluation limit");
        }
    }
    Ok(())
}

/// Divide out every common factor with `m` until none is left.
fn strip_by_gcd(mut value: BigUint, m: &BigUint) -> BigUint {
    loop {
        let g = value.gcd(m);
        if g.is_one() {
            return value;
        }
        value /= g;
    }
}

fn triple_holds(t: &WitnessTriple, r: u64, m: u64, primes: &[u64]) -> bool {
    if t.a == 0 || t.b <= 1 || t.a.checked_mul(t.b) != Some(t.x) {
        return false;
    }
    if t.a.gcd(&t.b) != 1 || !(t.a == 1 || t.a < r) {
        return false;
    }
    // rough b: no prime up to r; smooth a: only primes up to r
    let big_m = BigUint::from(m);
    if t.b.gcd(&m) != 1 || !strip_by_gcd(BigUint::from(t.a), &big_m).is_one() {
        return false;
    }
    let mersenne = (BigUint::one() << t.a) - 1u32;
    if !strip_by_gcd(mersenne, &big_m).is_one() {
        return false;
    }
    if t.p <= r || !t.b.is_multiple_of(t.p) {
        return false;
    }
    // p is the least prime of b: no divisor of b in [2, p) and p itself prime
    let no_smaller = (2..t.p).take_while(|d| d * d <= t.b).all(|d| !t.b.is_multiple_of(d));
    let p_prime = (2..).take_while(|d: &u64| d * d <= t.p).all(|d| !t.p.is_multiple_of(d));
    debug_assert!(primes.iter().all(|&q| q <= r));
    no_smaller && p_prime
}

fn pair_holds(rule: Rule, x: u64, y: u64, distance: u32, m: u64) -> bool {
    match rule {
        Rule::Cond2 => x.gcd(&m) == 2 && y.gcd(&m) == 2 && distance < 8,
        Rule::Cond2P => x.gcd(&m) == 2 && y.gcd(&m) == 2 && distance < 16,
        Rule::Cond3 => {
            let ok = |v: u64| v.is_multiple_of(3) && !v.is_multiple_of(8) && v.gcd(&(m / 6)) == 1;
            ok(x) && ok(y) && !distance.is_multiple_of(9)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primorial;

    fn w(start: u64, r: u64) -> IntervalWindow {
        IntervalWindow::new(start, r).unwrap()
    }

    #[test]
    fn window_offsets() {
        let win = IntervalWindow::for_index(60461, 17).unwrap();
        assert_eq!(win.start(), 60462);
        assert_eq!(win.member(3), Some(60464));
        assert_eq!(win.member(11), Some(60472));
        assert_eq!(win.member(18), None);
        assert_eq!(win.member(0), None);
        assert_eq!(win.offset_of(60478), Some(17));
        assert_eq!(win.offset_of(60479), None);
        assert!(IntervalWindow::new(0, 3).is_err());
        assert!(IntervalWindow::new(3, 0).is_err());
    }

    #[test]
    fn cond1_examples() {
        let ctx = primorial(11).unwrap();
        assert_eq!(cond1(&w(3, 11), &ctx), Some(13));
        assert_eq!(cond1(&w(2, 11), &ctx), None);
        assert_eq!(cond1(&w(114, 11), &ctx), None);
    }

    #[test]
    fn cond2_examples() {
        let ctx = primorial(11).unwrap();
        assert_eq!(cond2(&w(2, 11), &ctx), Some((2, 4)));
        assert_eq!(cond2(&w(3, 11), &ctx), Some((4, 8)));
        let ctx17 = primorial(17).unwrap();
        assert_eq!(cond2(&w(60462, 17), &ctx17), None);
    }

    #[test]
    fn cond2p_examples() {
        let ctx = primorial(17).unwrap();
        assert_eq!(cond2p(&w(60462, 17), &ctx).unwrap(), Some((60464, 60472)));
        assert_eq!(cond2p(&w(2, 17), &ctx).unwrap(), Some((2, 4)));
        assert!(cond2p(&w(2, 13), &primorial(13).unwrap()).is_err());
        let lonely = (1..200_000u64).map(|s| w(s, 17)).find(|win| {
            win.members().filter(|&x| even_odd_smooth_free(x, &ctx)).count() == 1
        });
        assert_eq!(cond2p(&lonely.unwrap(), &ctx).unwrap(), None);
    }

    #[test]
    fn cond3_examples() {
        let ctx = primorial(13).unwrap();
        assert_eq!(cond3(&w(3, 13), &ctx).unwrap(), Some((3, 6)));
        assert!(cond3(&w(3, 11), &primorial(11).unwrap()).is_err());
        // 6 and 12 qualify and sit 6 apart
        assert!(div3_smooth_free(6, &ctx) && div3_smooth_free(12, &ctx));
        // offsets 9 apart are rejected
        assert_eq!(first_pair(&w(3, 13), |x| x == 3 || x == 12, |d| d % 9 != 0), None);
        assert_eq!(first_pair(&w(3, 13), |x| x == 6 || x == 12, |d| d % 9 != 0), Some((6, 12)));
    }

    #[test]
    fn find_witness_examples() {
        let ctx = primorial(11).unwrap();
        let t = find_witness(&w(3, 11), &ctx, APolicy::General { a_max: 64 }).unwrap();
        assert_eq!(t, WitnessTriple { x: 13, a: 1, b: 13, p: 13 });
        let t = find_witness(&w(2312, 11), &ctx, APolicy::A24).unwrap();
        assert_eq!(t, WitnessTriple { x: 2314, a: 2, b: 1157, p: 13 });
        let ctx17 = primorial(17).unwrap();
        assert_eq!(find_witness(&w(60462, 17), &ctx17, APolicy::A24), None);
        let t = find_witness(&w(60462, 17), &ctx17, APolicy::ADiv12).unwrap();
        assert_eq!((t.x, t.a), (60468, 12));
    }

    #[test]
    fn a24_respects_mersenne_smoothness() {
        // a = 4 needs 5 | 2^4 - 1 to be allowed, so r = 3 only takes a = 2
        let ctx = primorial(3).unwrap();
        assert_eq!(witness_for(20, &ctx, APolicy::A24), None);
        assert_eq!(witness_for(10, &ctx, APolicy::A24).map(|t| t.a), Some(2));
    }

    #[test]
    fn residue_class_examples() {
        let ctx = primorial(11).unwrap();
        let opts = ProofOptions::default();
        let c = prove_residue_class(3, &ctx, &opts).unwrap().unwrap();
        assert_eq!(c.rule, Rule::Cond1);
        assert_eq!(c.witnesses[0].triple.x, 13);
        assert!(verify_certificate(&c, &ctx).unwrap());

        let c = prove_residue_class(2, &ctx, &opts).unwrap().unwrap();
        assert!(matches!(c.rule, Rule::TranslateA24 | Rule::Cond2));
        assert_eq!(c.base_start(), 2 + 4 * 2310);
        assert!(verify_certificate(&c, &ctx).unwrap());

        let ctx17 = primorial(17).unwrap();
        let c = prove_residue_class(60462, &ctx17, &opts).unwrap().unwrap();
        assert_eq!(c.rule, Rule::Cond2P);
        assert_eq!(c.witnesses[0].offsets, Some((3, 11)));
        assert!(verify_certificate(&c, &ctx17).unwrap());

        assert!(prove_residue_class(0, &ctx, &opts).is_err());
        assert!(prove_residue_class(2311, &ctx, &opts).is_err());
    }

    #[test]
    fn fewer_translates_disable_two_adic_rules() {
        let ctx = primorial(11).unwrap();
        let opts = ProofOptions { translates: 3, a_max: 64 };
        let c = prove_residue_class(114, &ctx, &opts).unwrap().unwrap();
        assert_eq!(c.rule, Rule::Cond2);
        assert!(verify_certificate(&c, &ctx).unwrap());
    }

    #[test]
    fn single_window_examples() {
        let opts = ProofOptions::default();
        let ctx17 = primorial(17).unwrap();
        let c = prove_single(60461, &ctx17, &opts).unwrap().unwrap();
        assert_eq!(c.rule, Rule::Cond2P);
        assert_eq!(c.witnesses[0].offsets, Some((3, 11)));
        assert!(verify_certificate(&c, &ctx17).unwrap());

        let ctx11 = primorial(11).unwrap();
        let c = prove_single(2, &ctx11, &opts).unwrap().unwrap();
        assert_eq!((c.rule, c.witnesses[0].triple.x), (Rule::Cond1, 13));

        let ctx3 = primorial(3).unwrap();
        let c = prove_single(1, &ctx3, &opts).unwrap().unwrap();
        assert_eq!(c.rule, Rule::ExplicitSingle);
        assert!(c.witnesses.is_empty());
        assert!(verify_certificate(&c, &ctx3).unwrap());
    }

    #[test]
    fn tampered_certificates() {
        let ctx = primorial(13).unwrap();
        let opts = ProofOptions::default();
        let good = prove_residue_class(2, &ctx, &opts).unwrap().unwrap();
        assert_eq!(good.rule, Rule::TranslateA24);

        // b = 1
        let mut bad = good.clone();
        let t = &mut bad.witnesses[0].triple;
        *t = WitnessTriple { x: t.x, a: t.x, b: 1, p: 1 };
        assert!(!verify_certificate(&bad, &ctx).unwrap());

        // a = 8 with r = 13: 2^8 - 1 carries 17
        let mut bad = good.clone();
        bad.rule = Rule::ExplicitSingle;
        bad.scope = Scope::SingleN;
        let x = 8 * 1009;
        bad.residue_start = x;
        bad.witnesses = alloc::vec![WitnessEntry {
            translate: 0,
            triple: WitnessTriple { x, a: 8, b: 1009, p: 1009 },
            offsets: None,
        }];
        assert!(!verify_certificate(&bad, &ctx).unwrap());

        // dropping a translate is a structural error
        let mut bad = good.clone();
        bad.witnesses.pop();
        assert!(matches!(verify_certificate(&bad, &ctx), Err(Error::InvalidCertificate(_))));

        // COND2P below 17 is structural
        let mut bad = good.clone();
        bad.rule = Rule::Cond2P;
        assert!(matches!(verify_certificate(&bad, &ctx), Err(Error::InvalidCertificate(_))));

        // witness moved outside its window
        let mut bad = good;
        bad.witnesses[1].translate = 2;
        bad.witnesses[2].translate = 1;
        assert!(!verify_certificate(&bad, &ctx).unwrap());
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in [
            Rule::Cond1,
            Rule::Cond2,
            Rule::Cond2P,
            Rule::Cond3,
            Rule::TranslateA24,
            Rule::ExplicitSingle,
        ] {
            assert_eq!(rule.as_str().parse::<Rule>().unwrap(), rule);
        }
        assert!("COND9".parse::<Rule>().is_err());
    }
}
