//! Command-line front end.
//!
//! Exit codes: 0 success, 2 iteration did not converge, 64 usage error,
//! 65 invalid data.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gw_majority::{bounds, budan, fixed_point, mc, poly, simplex};
use gw_majority::{Error, OffspringDistribution, ProbabilityVector};

const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const SEED_ENV: &str = "GW_MAJORITY_SEED";

#[derive(Parser)]
#[command(
    name = "gw-majority",
    about = "Majority-rule opinion propagation on Galton-Watson trees",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Significant digits in numeric output (default: full precision).
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: Option<u8>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the one-generation map H and emit the trajectory as CSV.
    Iterate(IterateArgs),
    /// Fixed-point summary table for even arities (CSV).
    Table(TableArgs),
    /// Monte Carlo estimate of the root distribution (JSON).
    Simulate(SimulateArgs),
    /// Monotonicity and basin certificates (JSON).
    Certify(CertifyArgs),
    /// Central-binomial/Wallis bounds, fixed-point envelope, threshold
    /// sequence (JSON).
    Bounds(BoundsArgs),
    /// Exact binomial identity suite (JSON).
    Identities(IdentitiesArgs),
    /// Curve data for the f_n / geometric / three-opinion families (CSV).
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct IterateArgs {
    /// Offspring law: nary:N | geom:P | pmf:N=Q,N=Q,...
    #[arg(long)]
    dist: String,
    /// Initial state p_0,p_1,...,p_k (comma separated).
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
}

#[derive(Args)]
struct TableArgs {
    /// Inclusive range of even arities, e.g. 4..26.
    #[arg(long)]
    even: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    dist: String,
    /// Leaf law p_0,...,p_k.
    #[arg(long)]
    p: String,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Defaults to $GW_MAJORITY_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    batches: usize,
    /// Also report the exact iterate and per-coordinate differences.
    #[arg(long)]
    diff: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Inclusive arity range, e.g. 3..30.
    #[arg(long)]
    n: Option<String>,
    /// Offspring law for a Galton-Watson mixture certificate.
    #[arg(long)]
    dist: Option<String>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Range for the xi/Wallis inequalities, e.g. 1..1000.
    #[arg(long)]
    n: Option<String>,
    /// Range for the fixed-point envelope checks.
    #[arg(long)]
    estim: Option<String>,
    /// Even range for the threshold sequence w_n.
    #[arg(long)]
    dpa: Option<String>,
}

#[derive(Args)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 60)]
    n_max: usize,
    #[arg(long, default_value_t = 5)]
    ell_max: usize,
}

#[derive(Args)]
struct PlotdataArgs {
    /// Arities for f_n curves, comma separated.
    #[arg(long = "fn")]
    fn_list: Option<String>,
    /// Geometric parameters for the mixture closed form.
    #[arg(long)]
    geom: Option<String>,
    /// Arities for the three-opinion curves.
    #[arg(long)]
    f3: Option<String>,
    /// Number of grid intervals on [0, 1].
    #[arg(long, default_value_t = 200)]
    grid: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output exits successfully
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let digits = cli.digits.map(usize::from).unwrap_or(17);
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot open {}: {e}", path.display());
                return ExitCode::from(EXIT_DATA);
            }
        },
        None => Box::new(std::io::stdout()),
    };
    match run(cli.command, digits, &mut sink) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn run(cmd: Command, digits: usize, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    match cmd {
        Command::Iterate(a) => cmd_iterate(a, digits, out),
        Command::Table(a) => cmd_table(a, digits, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Identities(a) => cmd_identities(a, out),
        Command::Plotdata(a) => cmd_plotdata(a, digits, out),
    }
}

fn fmt(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits - 1, x)
}

fn parse_vector(text: &str) -> gw_majority::Result<ProbabilityVector> {
    let entries = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}"))))
        .collect::<gw_majority::Result<Vec<f64>>>()?;
    ProbabilityVector::new(entries)
}

fn parse_range(text: &str) -> gw_majority::Result<(usize, usize)> {
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi),
        None => (text, text),
    };
    let lo = lo.trim().parse().map_err(|e| Error::Parse(format!("range start: {e}")))?;
    let hi = hi.trim().parse().map_err(|e| Error::Parse(format!("range end: {e}")))?;
    if lo > hi {
        return Err(Error::Parse(format!("empty range {text}")));
    }
    Ok((lo, hi))
}

fn parse_list<T: std::str::FromStr>(text: &str) -> gw_majority::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| Error::Parse(format!("'{s}': {e}"))))
        .collect()
}

fn emit_json<T: serde::Serialize>(value: &T, out: &mut dyn Write) -> gw_majority::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)
        .map_err(|e| Error::Parse(format!("serialization: {e}")))?;
    writeln!(out).map_err(|e| Error::Parse(format!("write: {e}")))?;
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("write: {e}"))
}

fn cmd_iterate(a: IterateArgs, digits: usize, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    let dist = OffspringDistribution::parse(&a.dist)?;
    let p = parse_vector(&a.p)?;
    let traj = simplex::iterate(&p, &dist, a.max_steps, a.tol)?;
    let k = p.opinion_count();
    write!(out, "m").map_err(io_err)?;
    for i in 0..=k {
        write!(out, ",p_{i}").map_err(io_err)?;
    }
    writeln!(out).map_err(io_err)?;
    for (m, state) in traj.states.iter().enumerate() {
        write!(out, "{m}").map_err(io_err)?;
        for &x in state.entries() {
            write!(out, ",{}", fmt(x, digits)).map_err(io_err)?;
        }
        writeln!(out).map_err(io_err)?;
    }
    Ok(if traj.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NO_CONVERGENCE)
    })
}

fn cmd_table(a: TableArgs, digits: usize, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    let (lo, hi) = parse_range(&a.even)?;
    let ns: Vec<usize> = (lo..=hi).filter(|n| n % 2 == 0).collect();
    let rows = fixed_point::table_rows(&ns)?;
    writeln!(out, "n,xhat,f_at_xhat,alpha,deriv_alpha,a,b,deriv_a,deriv_b").map_err(io_err)?;
    let cell = |v: Option<f64>| v.map(|x| fmt(x, digits)).unwrap_or_default();
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            fmt(r.xhat, digits),
            fmt(r.f_at_xhat, digits),
            fmt(r.alpha, digits),
            fmt(r.deriv_alpha, digits),
            cell(r.a),
            cell(r.b),
            cell(r.deriv_a),
            cell(r.deriv_b),
        )
        .map_err(io_err)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    let seed = match a.seed {
        Some(s) => s,
        None => std::env::var(SEED_ENV)
            .ok()
            .map(|v| v.parse().map_err(|e| Error::Parse(format!("{SEED_ENV}: {e}"))))
            .transpose()?
            .unwrap_or(0),
    };
    let config = mc::SimConfig {
        dist: OffspringDistribution::parse(&a.dist)?,
        height: a.height,
        leaf_probs: parse_vector(&a.p)?,
        samples: a.samples,
        seed,
        parallel_batches: a.batches,
    };
    let result = mc::estimate(&config)?;
    let mut report = serde_json::json!({ "config": config, "result": result });
    if a.diff {
        let mut exact = config.leaf_probs.clone();
        for _ in 0..a.height {
            exact = simplex::step_h(&exact, &config.dist)?;
        }
        let diffs: Vec<f64> = result
            .estimates
            .iter()
            .zip(exact.entries())
            .map(|(e, x)| e - x)
            .collect();
        report["exact"] = serde_json::json!(exact.entries());
        report["diff"] = serde_json::json!(diffs);
        report["within_radius"] = serde_json::json!(diffs
            .iter()
            .zip(&result.radii)
            .all(|(d, r)| d.abs() <= *r));
    }
    emit_json(&report, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    if a.n.is_none() && a.dist.is_none() {
        return Err(Error::Parse("certify needs --n and/or --dist".into()));
    }
    let mut entries = Vec::new();
    if let Some(range) = &a.n {
        let (lo, hi) = parse_range(range)?;
        if lo < 2 {
            return Err(Error::Domain("certificates start at n = 2".into()));
        }
        for n in lo..=hi {
            let budan_cert = budan::gamma_monotone_certificate(n);
            let fp = fixed_point::report_for_n(n)?;
            entries.push(serde_json::json!({
                "monotone": budan_cert,
                "fixed_point": fp,
            }));
        }
    }
    if let Some(spec) = &a.dist {
        let dist = OffspringDistribution::parse(spec)?;
        entries.push(serde_json::json!({
            "fixed_point": fixed_point::report_for_dist(&dist)?,
        }));
    }
    emit_json(&entries, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    if a.n.is_none() && a.estim.is_none() && a.dpa.is_none() {
        return Err(Error::Parse("bounds needs --n, --estim, or --dpa".into()));
    }
    let mut report = serde_json::Map::new();
    if let Some(range) = &a.n {
        let (lo, hi) = parse_range(range)?;
        let mut checks = Vec::new();
        for n in lo.max(1)..=hi {
            checks.extend(bounds::check_xi_bounds(n)?);
        }
        report.insert("xi_bounds".into(), serde_json::json!(checks));
    }
    if let Some(range) = &a.estim {
        let (lo, hi) = parse_range(range)?;
        let mut envelopes = Vec::new();
        for n in lo.max(3)..=hi {
            let alpha = fixed_point::report_for_n(n)?.alpha;
            envelopes.push(bounds::check_alpha_envelope(n, alpha)?);
        }
        report.insert("envelope".into(), serde_json::json!(envelopes));
    }
    if let Some(range) = &a.dpa {
        let (lo, hi) = parse_range(range)?;
        let mut thresholds = Vec::new();
        for n in (lo..=hi).filter(|n| n % 2 == 0 && *n >= 4) {
            thresholds.push(bounds::check_dpa_threshold(n)?);
        }
        report.insert("dpa".into(), serde_json::json!(thresholds));
    }
    emit_json(&report, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_identities(a: IdentitiesArgs, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    let report = bounds::identity_suite(a.n_max, a.ell_max)?;
    emit_json(&report, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plotdata(a: PlotdataArgs, digits: usize, out: &mut dyn Write) -> gw_majority::Result<ExitCode> {
    if a.fn_list.is_none() && a.geom.is_none() && a.f3.is_none() {
        return Err(Error::Parse("plotdata needs --fn, --geom, or --f3".into()));
    }
    if a.grid == 0 {
        return Err(Error::Parse("--grid must be positive".into()));
    }
    struct Curve {
        label: String,
        f: Box<dyn Fn(f64) -> gw_majority::Result<f64>>,
    }
    let mut curves: Vec<Curve> = Vec::new();
    if let Some(list) = &a.fn_list {
        for n in parse_list::<usize>(list)? {
            curves.push(Curve {
                label: format!("f_{n}"),
                f: Box::new(move |t| poly::eval_fn(n, t)),
            });
        }
    }
    if let Some(list) = &a.geom {
        for p in parse_list::<f64>(list)? {
            curves.push(Curve {
                label: format!("geom_{p}"),
                f: Box::new(move |t| poly::geometric_f_closed(p, t)),
            });
        }
    }
    if let Some(list) = &a.f3 {
        for n in parse_list::<usize>(list)? {
            curves.push(Curve {
                label: format!("f3_{n}"),
                f: Box::new(move |t| poly::eval_f3(n, t)),
            });
        }
    }
    let labels: Vec<&str> = curves.iter().map(|c| c.label.as_str()).collect();
    writeln!(out, "t,{}", labels.join(",")).map_err(io_err)?;
    for i in 0..=a.grid {
        let t = i as f64 / a.grid as f64;
        write!(out, "{}", fmt(t, digits)).map_err(io_err)?;
        for c in &curves {
            write!(out, ",{}", fmt((c.f)(t)?, digits)).map_err(io_err)?;
        }
        writeln!(out).map_err(io_err)?;
    }
    Ok(ExitCode::SUCCESS)
}
