//! Certificate and report serialization.
//!
//! Big integers (starts, moduli, witness components) are written as decimal strings.
//! Wall time is kept out of JSON so equal inputs give byte-identical files.

use std::fmt::Write as _;
use std::str::FromStr;

use binsum_core::density::DensityEstimate;
use binsum_core::search::{RangeMode, Status, VerificationReport};
use binsum_core::sums::{format_factorisation, SumEvaluation};
use binsum_core::witness::{Certificate, Rule, Scope, WitnessEntry, WitnessTriple};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub translate: u32,
    pub x: String,
    pub a: String,
    pub b: String,
    pub p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<[u32; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub r: u64,
    pub residue_start: String,
    pub modulus: String,
    pub rule: String,
    pub witnesses: Vec<WitnessJson>,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub r: u64,
    pub modulus: String,
    pub search_range: String,
    pub cond1_failure_starts: Vec<String>,
    pub cond1_failure_count: usize,
    pub half_period_failure_count: usize,
    pub full_period_failure_count: usize,
    pub certificates: Vec<CertificateJson>,
    pub small_n_checked_up_to: u64,
    pub small_n_violations: Vec<String>,
    pub status: String,
    pub uncertified: Vec<String>,
}

fn parse_u64(field: &str, s: &str) -> Result<u64> {
    u64::from_str(s).map_err(|_| CliError::Malformed(format!("{field}: expected decimal integer, got {s:?}")))
}

fn strings(xs: &[u64]) -> Vec<String> {
    xs.iter().map(u64::to_string).collect()
}

fn parse_all(field: &str, xs: &[String]) -> Result<Vec<u64>> {
    xs.iter().map(|s| parse_u64(field, s)).collect()
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        Self {
            r: c.r,
            residue_start: c.residue_start.to_string(),
            modulus: c.modulus.to_string(),
            rule: c.rule.as_str().to_owned(),
            witnesses: c
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    translate: w.translate,
                    x: w.triple.x.to_string(),
                    a: w.triple.a.to_string(),
                    b: w.triple.b.to_string(),
                    p: w.triple.p.to_string(),
                    offsets: w.offsets.map(|(i, j)| [i, j]),
                })
                .collect(),
            scope: c.scope.as_str().to_owned(),
        }
    }
}

impl TryFrom<&CertificateJson> for Certificate {
    type Error = CliError;

    fn try_from(c: &CertificateJson) -> Result<Self> {
        let witnesses = c
            .witnesses
            .iter()
            .map(|w| {
                Ok(WitnessEntry {
                    translate: w.translate,
                    triple: WitnessTriple {
                        x: parse_u64("x", &w.x)?,
                        a: parse_u64("a", &w.a)?,
                        b: parse_u64("b", &w.b)?,
                        p: parse_u64("p", &w.p)?,
                    },
                    offsets: w.offsets.map(|[i, j]| (i, j)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Certificate {
            r: c.r,
            residue_start: parse_u64("residue_start", &c.residue_start)?,
            modulus: parse_u64("modulus", &c.modulus)?,
            rule: Rule::from_str(&c.rule)?,
            witnesses,
            scope: Scope::from_str(&c.scope)?,
        })
    }
}

impl From<&VerificationReport> for ReportJson {
    fn from(rep: &VerificationReport) -> Self {
        let uncertified = match &rep.status {
            Status::Verified => Vec::new(),
            Status::Inconclusive(v) => strings(v),
        };
        Self {
            r: rep.r,
            modulus: rep.modulus.to_string(),
            search_range: rep.search_range.as_str().to_owned(),
            cond1_failure_starts: strings(&rep.cond1_failure_starts),
            cond1_failure_count: rep.cond1_failure_count,
            half_period_failure_count: rep.half_period_failure_count,
            full_period_failure_count: rep.full_period_failure_count,
            certificates: rep.certificates.iter().map(CertificateJson::from).collect(),
            small_n_checked_up_to: rep.small_n_checked_up_to,
            small_n_violations: strings(&rep.small_n_violations),
            status: rep.status.as_str().to_owned(),
            uncertified,
        }
    }
}

impl TryFrom<&ReportJson> for VerificationReport {
    type Error = CliError;

    fn try_from(j: &ReportJson) -> Result<Self> {
        let search_range = match j.search_range.as_str() {
            "half" => RangeMode::Half,
            "full" => RangeMode::Full,
            other => return Err(CliError::Malformed(format!("search_range: {other:?}"))),
        };
        let status = match j.status.as_str() {
            "VERIFIED" if j.uncertified.is_empty() => Status::Verified,
            "INCONCLUSIVE" => Status::Inconclusive(parse_all("uncertified", &j.uncertified)?),
            other => return Err(CliError::Malformed(format!("status: {other:?}"))),
        };
        let cond1_failure_starts = parse_all("cond1_failure_starts", &j.cond1_failure_starts)?;
        if cond1_failure_starts.len() != j.cond1_failure_count {
            return Err(CliError::Malformed("cond1_failure_count disagrees with list".into()));
        }
        Ok(VerificationReport {
            r: j.r,
            modulus: parse_u64("modulus", &j.modulus)?,
            search_range,
            cond1_failure_starts,
            cond1_failure_count: j.cond1_failure_count,
            half_period_failure_count: j.half_period_failure_count,
            full_period_failure_count: j.full_period_failure_count,
            certificates: j.certificates.iter().map(Certificate::try_from).collect::<Result<_>>()?,
            small_n_checked_up_to: j.small_n_checked_up_to,
            small_n_violations: parse_all("small_n_violations", &j.small_n_violations)?,
            status,
            wall_time: None,
        })
    }
}

pub fn certificate_to_json(cert: &Certificate) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CertificateJson::from(cert))?)
}

pub fn certificate_from_json(s: &str) -> Result<Certificate> {
    Certificate::try_from(&serde_json::from_str::<CertificateJson>(s)?)
}

/// A JSON array of reports.
pub fn reports_to_json(reports: &[VerificationReport]) -> Result<String> {
    let list: Vec<ReportJson> = reports.iter().map(ReportJson::from).collect();
    Ok(serde_json::to_string_pretty(&list)?)
}

/// Accepts a single report object or an array of them.
pub fn reports_from_json(s: &str) -> Result<Vec<VerificationReport>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        Many(Vec<ReportJson>),
        One(Box<ReportJson>),
    }
    let parsed: OneOrMany = serde_json::from_str(s)?;
    let list = match parsed {
        OneOrMany::Many(v) => v,
        OneOrMany::One(r) => vec![*r],
    };
    list.iter().map(VerificationReport::try_from).collect()
}

pub const SUMMARY_CSV_HEADER: &str = "r,m_r,range,cond1_failures,certified,status,seconds";

pub fn summary_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for rep in reports {
        let seconds = rep.wall_time.map(|d| format!("{:.3}", d.as_secs_f64())).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            rep.r,
            rep.modulus,
            rep.search_range.as_str(),
            rep.cond1_failure_count,
            rep.certificates.len(),
            rep.status.as_str(),
            seconds
        );
    }
    out
}

pub fn report_text(rep: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "r = {}  m_r = {}  {}", rep.r, rep.modulus, rep.status.as_str());
    let _ = writeln!(
        out,
        "  cond1 failures: {} in {} range (half period {}, full period {})",
        rep.cond1_failure_count,
        rep.search_range.as_str(),
        rep.half_period_failure_count,
        rep.full_period_failure_count
    );
    const SHOWN: usize = 20;
    if !rep.cond1_failure_starts.is_empty() {
        let head: Vec<String> = rep.cond1_failure_starts.iter().take(SHOWN).map(u64::to_string).collect();
        let more = rep.cond1_failure_starts.len().saturating_sub(SHOWN);
        let tail = if more > 0 { format!(", ... ({more} more)") } else { String::new() };
        let _ = writeln!(out, "  starts: {}{}", head.join(", "), tail);
    }
    let mut by_rule: Vec<(Rule, usize)> = Vec::new();
    for c in &rep.certificates {
        match by_rule.iter_mut().find(|(r, _)| *r == c.rule) {
            Some((_, n)) => *n += 1,
            None => by_rule.push((c.rule, 1)),
        }
    }
    by_rule.sort();
    let rules: Vec<String> = by_rule.iter().map(|(r, n)| format!("{r} {n}")).collect();
    let _ = writeln!(out, "  certificates: {} [{}]", rep.certificates.len(), rules.join(", "));
    let _ = writeln!(
        out,
        "  exact scan n <= {}: {} violations",
        rep.small_n_checked_up_to,
        rep.small_n_violations.len()
    );
    if let Status::Inconclusive(left) = &rep.status {
        if !left.is_empty() {
            let _ = writeln!(out, "  uncertified residues: {}", strings(left).join(", "));
        }
    }
    if let Some(t) = rep.wall_time {
        let _ = writeln!(out, "  time: {:.3} s", t.as_secs_f64());
    }
    out
}

/// `17/4, nonintegral, denominator primes: [2^2]`
pub fn evaluation_text(ev: &SumEvaluation) -> String {
    if ev.integral {
        return format!("{}, integral", ev.value);
    }
    let mut primes = format_factorisation(&ev.denominator_primes);
    if let Some(rest) = &ev.unfactored {
        primes = format!("{primes} x unfactored {rest}");
    }
    format!("{}, nonintegral, denominator primes: {}", ev.value, primes)
}

pub fn witness_text(cert: &Certificate) -> String {
    let mut out = format!("rule {} ({}), start {}", cert.rule, cert.scope.as_str(), cert.residue_start);
    if cert.witnesses.is_empty() {
        out.push_str("\n  exact evaluation: S_r(n) nonintegral");
    }
    for w in &cert.witnesses {
        let window = cert.window(w.translate);
        let t = &w.triple;
        let _ = write!(out, "\n  translate {} window start {}: x = {} = {}*{}, p = {}", w.translate, window.start(), t.x, t.a, t.b, t.p);
        if let Some((i, j)) = w.offsets {
            let (xi, xj) = (window.member(i), window.member(j));
            if let (Some(xi), Some(xj)) = (xi, xj) {
                let _ = write!(out, "; members {xi} and {xj} (offsets {i}, {j})");
            }
        }
    }
    out
}

pub const DENSITY_CSV_HEADER: &str = "r,m_r,phi,bad_count,density,v_alpha,mv_ratio,density_decimal,bound_chain_ok";

pub fn density_csv(rows: &[DensityEstimate]) -> String {
    let mut out = String::from(DENSITY_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.9},{}",
            row.r,
            row.q,
            row.phi_q,
            row.bad_start_count,
            row.density,
            row.v_alpha,
            row.mv_ratio,
            row.density.to_f64(),
            row.bound_chain_ok
        );
    }
    out
}

/// Whitespace-separated columns for gnuplot: r, density, mv_ratio.
pub fn density_plot_data(rows: &[DensityEstimate]) -> String {
    let mut out = String::from("# r density mv_ratio\n");
    for row in rows {
        let _ = writeln!(out, "{} {:.9} {:.6}", row.r, row.density.to_f64(), row.mv_ratio);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use binsum_core::arith::primorial;
    use binsum_core::witness::{prove_residue_class, ProofOptions};

    #[test]
    fn certificate_round_trip() {
        let ctx = primorial(17).unwrap();
        let cert = prove_residue_class(60462, &ctx, &ProofOptions::default()).unwrap().unwrap();
        let json = certificate_to_json(&cert).unwrap();
        assert!(json.contains("\"rule\": \"COND2P\""));
        assert_eq!(certificate_from_json(&json).unwrap(), cert);
    }

    #[test]
    fn malformed_certificate_rejected() {
        let good = r#"{"r":11,"residue_start":"3","modulus":"2310","rule":"COND1","witnesses":[{"translate":0,"x":"13","a":"1","b":"13","p":"13"}],"scope":"residue-class"}"#;
        assert!(certificate_from_json(good).is_ok());
        for bad in [
            good.replace("\"13\",\"a\"", "13,\"a\""),
            good.replace("COND1", "COND9"),
            good.replace("residue-class", "everything"),
            good.replace("\"3\"", "\"-3\""),
            good.replace("\"scope\"", "\"extra\":1,\"scope\""),
            good.replace(",\"scope\":\"residue-class\"", ""),
        ] {
            assert!(certificate_from_json(&bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn csv_header_and_evaluation_text() {
        assert!(summary_csv(&[]).starts_with("r,m_r,range,cond1_failures,certified,status,seconds\n"));
        let ev = binsum_core::sums::s_r_direct(1, 3).unwrap();
        assert_eq!(evaluation_text(&ev), "17/4, nonintegral, denominator primes: [2^2]");
        let ev = binsum_core::sums::s_r(5, 0).unwrap();
        assert_eq!(evaluation_text(&ev), "0, integral");
    }
}
