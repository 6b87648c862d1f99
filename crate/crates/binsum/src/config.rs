use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use binsum_core::search::{RangeMode, VerifyConfig};
use binsum_core::witness::ProofOptions;

use crate::CliError;

/// Overrides the worker count when `--workers` is absent.
pub const WORKERS_ENV: &str = "BINSUM_WORKERS";

/// Half-period failure counts checked by `verify --repro`.
pub const REPRO_TABLE: [(u64, usize); 4] = [(11, 7), (13, 76), (17, 498), (19, 8439)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(CliError::Malformed(format!("output format {s:?}"))),
        }
    }
}

pub fn parse_range_mode(s: &str) -> Result<RangeMode, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "half" => Ok(RangeMode::Half),
        "full" => Ok(RangeMode::Full),
        _ => Err(CliError::Malformed(format!("range {s:?}, expected half or full"))),
    }
}

/// `7` or `2..22` (inclusive).
pub fn parse_r_range(s: &str) -> Result<RangeInclusive<u64>, CliError> {
    let bad = || CliError::Malformed(format!("r range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let r = s.trim().parse().map_err(|_| bad())?;
            (r, r)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

/// `--workers` wins, then the environment, then rayon's default.
pub fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        return nonzero(n);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            let n = v.trim().parse().map_err(|_| CliError::Malformed(format!("{WORKERS_ENV}={v:?}")))?;
            nonzero(n)
        }
        _ => Ok(None),
    }
}

fn nonzero(n: usize) -> Result<Option<usize>, CliError> {
    if n == 0 {
        return Err(CliError::Malformed("worker count must be positive".into()));
    }
    Ok(Some(n))
}

/// Everything a `verify` run depends on besides the worker count.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub r: RangeInclusive<u64>,
    pub verify: VerifyConfig,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub workers: Option<usize>,
    pub verbose: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r: 1..=binsum_core::search::DEFAULT_MAX_R,
            verify: VerifyConfig::default(),
            format: OutputFormat::Text,
            output: None,
            csv: None,
            workers: None,
            verbose: 0,
        }
    }
}

impl RunConfig {
    /// Settings behind the published half-period counts.
    pub fn repro(r: RangeInclusive<u64>) -> Self {
        let mut cfg = Self {
            r,
            ..Self::default()
        };
        cfg.verify.range_mode = RangeMode::Half;
        cfg.verify.proof = ProofOptions::default();
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_r_range("11").unwrap(), 11..=11);
        assert_eq!(parse_r_range("2..22").unwrap(), 2..=22);
        assert!(parse_r_range("5..2").is_err());
        assert!(parse_r_range("x").is_err());
        assert!(parse_r_range("-3").is_err());
    }

    #[test]
    fn workers_flag_wins() {
        assert_eq!(resolve_workers(Some(3)).unwrap(), Some(3));
        assert!(resolve_workers(Some(0)).is_err());
    }
}
