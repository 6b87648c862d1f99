//! Certification of nonintegral binomial sums
//! `S_r(n) = Σ_{k=0}^{n} k/(k+r) · C(n,k)`.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised as:
//!
//! - [`arith`]: primes, primorials, binomials, Stirling numbers, smooth splits and
//!   Mersenne-number smoothness.
//! - [`rational`]: the [`ExactRational`] value type.
//! - [`sums`]: exact evaluation of `S_r(n)`, its cofactor `S(r,n) = 2^n − S_r(n)`,
//!   the integer `F_r(n)` and the identities tying them together.
//! - [`witness`]: interval conditions, divisibility witnesses and residue-class
//!   certificates with an independent verifier.
//! - [`search`]: the primorial-periodic sieve and the per-`r` verification pipeline.
//! - [`density`]: totative gap profiles and density statistics.
//!
//! Everything here is sequential and deterministic. Parallel drivers, file formats and
//! the command line live in the companion `binsum` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
pub mod density;
mod error;
pub mod rational;
pub mod search;
pub mod sums;
pub mod witness;

pub use arith::{PrimorialContext, SmoothSplit};
pub use error::Error;
pub use rational::ExactRational;

pub type Result<T, E = Error> = core::result::Result<T, E>;
