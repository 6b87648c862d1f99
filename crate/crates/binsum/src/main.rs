use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use binsum::config::{self, OutputFormat, RunConfig, REPRO_TABLE};
use binsum::format;
use binsum::parallel;
use binsum::{CliError, Result};
use binsum_core::arith::{primorial, DEFAULT_A_MAX};
use binsum_core::density::{self, VAlpha};
use binsum_core::search::{RangeMode, DEFAULT_MAX_R};
use binsum_core::sums;
use binsum_core::witness::{prove_single, verify_certificate, ProofOptions, TRANSLATES};
use clap::{Args, Parser, Subcommand};

const EXIT_VERIFIED: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;

#[derive(Parser)]
#[command(name = "binsum", version, about = "Nonintegrality certificates for weighted binomial sums")]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = config::WORKERS_ENV)]
    workers: Option<usize>,
    /// More detail on stderr
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate S_r(n) exactly
    Eval {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        n: u64,
        /// Show the companion value 2^n - S_r(n) as well
        #[arg(long)]
        cofactor: bool,
        #[arg(long, default_value = "text")]
        format: OutputFormat,
    },
    /// Certify every residue class of window starts for each r in a range
    Verify(VerifyArgs),
    /// Certificate for a single n
    Witness {
        #[arg(long)]
        r: u64,
        /// Sum index; the window is n+1..n+r
        #[arg(long, conflicts_with = "start", required_unless_present = "start")]
        n: Option<u64>,
        /// Window start (n = start - 1)
        #[arg(long)]
        start: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_A_MAX)]
        a_max: u64,
        #[arg(long, default_value = "text")]
        format: OutputFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Density of windows with no member coprime to m_r
    Density {
        #[arg(long, default_value_t = 13)]
        rmax: u64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = density::DEFAULT_DENSITY_MAX_R)]
        max_r: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write whitespace-separated plot data
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Gap profile of the totatives of q (or of m_r)
    Gaps {
        #[arg(long, conflicts_with = "r", required_unless_present = "r")]
        q: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
    },
    /// Re-verify certificate or report JSON files
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Single r or inclusive range a..b
    #[arg(long, default_value = "1..22")]
    r: String,
    /// Which cond1 failures the report lists
    #[arg(long, default_value = "full")]
    range: String,
    #[arg(long, default_value_t = TRANSLATES)]
    translates: u32,
    #[arg(long, default_value_t = DEFAULT_A_MAX)]
    a_max: u64,
    /// Exact-evaluation bound for small n (default max(2r, 50))
    #[arg(long)]
    small_n: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_R)]
    max_r: u64,
    /// Half-period pipeline, compared against the embedded count table
    #[arg(long)]
    repro: bool,
    #[arg(long, default_value = "text")]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the CSV summary here
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_VERIFIED });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let workers = config::resolve_workers(cli.workers)?;
    let verbose = cli.verbose;
    parallel::with_workers(workers, move || dispatch(cli.command, workers, verbose))?
}

fn dispatch(command: Command, workers: Option<usize>, verbose: u8) -> Result<u8> {
    match command {
        Command::Eval { r, n, cofactor, format } => cmd_eval(r, n, cofactor, format),
        Command::Verify(args) => {
            let cfg = verify_config(args, workers, verbose)?;
            cmd_verify(&cfg)
        }
        Command::Witness { r, n, start, a_max, format, output } => {
            let n = match (n, start) {
                (Some(n), _) => n,
                (None, Some(s)) if s >= 1 => s - 1,
                _ => return Err(CliError::Malformed("--start must be at least 1".into())),
            };
            cmd_witness(r, n, a_max, format, output.as_deref())
        }
        Command::Density { rmax, alpha, max_r, output, plot_data } => {
            cmd_density(rmax, alpha, max_r, output.as_deref(), plot_data.as_deref())
        }
        Command::Gaps { q, r, alpha } => cmd_gaps(q, r, alpha),
        Command::Check { files } => cmd_check(&files),
    }
}

fn verify_config(args: VerifyArgs, workers: Option<usize>, verbose: u8) -> Result<RunConfig> {
    let r = config::parse_r_range(&args.r)?;
    let mut cfg = if args.repro { RunConfig::repro(r) } else { RunConfig { r, ..RunConfig::default() } };
    if !args.repro {
        cfg.verify.range_mode = config::parse_range_mode(&args.range)?;
        cfg.verify.proof = ProofOptions { translates: args.translates, a_max: args.a_max };
    }
    cfg.verify.max_r = args.max_r;
    cfg.verify.small_n_bound = args.small_n;
    cfg.format = args.format;
    cfg.output = args.output;
    cfg.csv = args.csv;
    cfg.workers = workers;
    cfg.verbose = verbose;
    Ok(cfg)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn cmd_eval(r: u64, n: u64, cofactor: bool, fmt: OutputFormat) -> Result<u8> {
    let ev = sums::s_r(r, n)?;
    let co = if cofactor { Some(sums::s_cofactor_closed(r, n)?) } else { None };
    let text = match fmt {
        OutputFormat::Json => {
            let mut v = serde_json::json!({
                "r": r,
                "n": n.to_string(),
                "value": ev.value.to_string(),
                "integral": ev.integral,
                "denominator_primes": sums::format_factorisation(&ev.denominator_primes),
            });
            if let Some(c) = &co {
                v["cofactor"] = serde_json::Value::String(c.value.to_string());
            }
            serde_json::to_string_pretty(&v)?
        }
        _ => {
            let mut s = format::evaluation_text(&ev);
            if let Some(c) = &co {
                s.push_str(&format!("\nS({r},{n}) = 2^n - S_r(n) = {}", c.value));
            }
            s
        }
    };
    emit(&text, None)?;
    Ok(EXIT_VERIFIED)
}

fn cmd_verify(cfg: &RunConfig) -> Result<u8> {
    let mut reports = Vec::new();
    for r in cfg.r.clone() {
        if cfg.verbose > 0 {
            eprintln!("verifying r = {r}");
        }
        let rep = parallel::verify_r(r, &cfg.verify)?;
        if cfg.verbose > 0 {
            eprint!("{}", format::report_text(&rep));
        }
        reports.push(rep);
    }
    let text = match cfg.format {
        OutputFormat::Json => format::reports_to_json(&reports)?,
        OutputFormat::Csv => format::summary_csv(&reports),
        OutputFormat::Text => reports.iter().map(format::report_text).collect::<String>(),
    };
    emit(&text, cfg.output.as_deref())?;
    if let Some(path) = &cfg.csv {
        write_file(path, &format::summary_csv(&reports))?;
    }
    let mut code = if reports.iter().all(|r| r.is_verified()) { EXIT_VERIFIED } else { EXIT_INCONCLUSIVE };
    let repro = cfg.verify.range_mode == RangeMode::Half && cfg.verify.proof == ProofOptions::default();
    if repro {
        for (r, expected) in REPRO_TABLE {
            if let Some(rep) = reports.iter().find(|rep| rep.r == r) {
                let got = rep.half_period_failure_count;
                let verdict = if got == expected { "match" } else { "MISMATCH" };
                eprintln!("repro r = {r}: half-period failures {got}, expected {expected}: {verdict}");
                if got != expected {
                    code = EXIT_INCONCLUSIVE;
                }
            }
        }
    }
    Ok(code)
}

fn cmd_witness(r: u64, n: u64, a_max: u64, fmt: OutputFormat, output: Option<&Path>) -> Result<u8> {
    let ctx = primorial(r)?;
    let opts = ProofOptions { a_max, ..ProofOptions::default() };
    match prove_single(n, &ctx, &opts)? {
        Some(cert) => {
            let text = match fmt {
                OutputFormat::Json => format::certificate_to_json(&cert)?,
                _ => format!("n = {n}, r = {r}: {}", format::witness_text(&cert)),
            };
            emit(&text, output)?;
            Ok(EXIT_VERIFIED)
        }
        None => {
            emit(&format!("n = {n}, r = {r}: INCONCLUSIVE, no witness found"), output)?;
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

fn cmd_density(rmax: u64, alpha: f64, max_r: u64, output: Option<&Path>, plot: Option<&Path>) -> Result<u8> {
    let rows = parallel::density_curve(rmax, alpha, max_r)?;
    emit(&format::density_csv(&rows), output)?;
    if let Some(path) = plot {
        write_file(path, &format::density_plot_data(&rows))?;
    }
    Ok(EXIT_VERIFIED)
}

fn cmd_gaps(q: Option<u64>, r: Option<u64>, alpha: f64) -> Result<u8> {
    let q = match (q, r) {
        (Some(q), _) => q,
        (None, Some(r)) => primorial(r)?.modulus_u64()?,
        (None, None) => return Err(CliError::Malformed("need --q or --r".into())),
    };
    let profile = parallel::gap_profile(q)?;
    let v = profile.v_alpha(alpha)?;
    let v = match v {
        VAlpha::Exact(x) => x.to_string(),
        VAlpha::Approx(x) => format!("{x:.6e}"),
    };
    let mut text = format!(
        "q = {q}  phi = {}  max gap = {}  V_{alpha} = {v}  mv ratio = {:.6}\ngap,count\n",
        profile.phi_q,
        profile.max_gap(),
        profile.mv_ratio(alpha)?
    );
    for (g, c) in profile.histogram() {
        text.push_str(&format!("{g},{c}\n"));
    }
    emit(&text, None)?;
    Ok(EXIT_VERIFIED)
}

fn cmd_check(files: &[PathBuf]) -> Result<u8> {
    let mut all_ok = true;
    for path in files {
        let text = read_file(path)?;
        let certs = match format::certificate_from_json(&text) {
            Ok(c) => vec![c],
            Err(_) => format::reports_from_json(&text)?.into_iter().flat_map(|r| r.certificates).collect(),
        };
        let mut bad = 0usize;
        for cert in &certs {
            let ctx = primorial(cert.r)?;
            if !verify_certificate(cert, &ctx)? {
                bad += 1;
            }
        }
        all_ok &= bad == 0;
        println!("{}: {} certificates, {} failed", path.display(), certs.len(), bad);
    }
    Ok(if all_ok { EXIT_VERIFIED } else { EXIT_INCONCLUSIVE })
}
