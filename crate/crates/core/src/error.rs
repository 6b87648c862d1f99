use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("r must be at least {min}, got {r}")]
    RTooSmall { r: u64, min: u64 },
    #[error("r = {r} exceeds the configured maximum {max}")]
    RTooLarge { r: u64, max: u64 },
    #[error("n must be non-negative, got {0}")]
    NegativeN(i64),
    #[error("zero is not a valid argument for {0}")]
    Zero(&'static str),
    #[error("exponent a = {a} exceeds the Mersenne cap a_max = {a_max}")]
    MersenneCap { a: u64, a_max: u64 },
    #[error("alpha must be at least 1, got {0}")]
    AlphaBelowOne(f64),
    #[error("primorial of r = {0} does not fit in 64 bits")]
    ModulusOverflow(u64),
    #[error("invalid certificate structure: {0}")]
    InvalidCertificate(&'static str),
}
