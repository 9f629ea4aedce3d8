//! `orbitfib`: analyze, transport, verify and plot Lefschetz fibrations on
//! adjoint orbits of sl(n,C) from the command line.
//!
//! Exit codes: 0 when every check passes, 1 on input errors, 2 when a check
//! fails.

mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use orbitfib::plot::value_plane_svg;
use orbitfib::report::{analyze, run_transport, AnalysisRequest, FlowOverrides, CHECK_NAMES, DEFAULT_SAMPLES};
use orbitfib::serial::{parse_complex, parse_complex_list, parse_real_list};
use orbitfib::transport::TrajectoryRecord;
use orbitfib::verify::run_suites;
use orbitfib::{Error, Result};

use crate::config::Config;

const SEED_ENV: &str = "ORBITFIB_SEED";

#[derive(Parser, Debug)]
#[command(name = "orbitfib", version, about = "Lefschetz fibrations on adjoint orbits of sl(n,C)")]
struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Singularities, Hessians, symplectic checks and Betti predictions.
    Analyze {
        #[command(flatten)]
        req: RequestArgs,
        /// `json` (report) or `svg` (value-plane picture).
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Carry fibre samples from f = FROM to f = TO; writes JSON lines.
    Transport {
        #[command(flatten)]
        req: RequestArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        /// Trajectory file; the summary then goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites.
    Verify {
        /// Comma-separated suite names (default: all).
        #[arg(long)]
        suite: Vec<String>,
        /// Override for every upper-bound tolerance.
        #[arg(long)]
        tol: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        /// `text` or `json`.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of critical values, matching paths and optional trajectories.
    Plot {
        #[command(flatten)]
        req: RequestArgs,
        /// Base regular value of the matching paths (default 0).
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        /// JSON-lines file written by `transport`.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RequestArgs {
    #[arg(long)]
    n: Option<String>,
    /// Diagonal of H0, comma-separated complex numbers (`a+bi`).
    #[arg(long, allow_hyphen_values = true)]
    h0: Option<String>,
    /// Diagonal of H, comma-separated reals.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    /// Trace form constant c in <X,Y> = c tr(XY).
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    step: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Comma-separated check names (default: all).
    #[arg(long)]
    checks: Option<String>,
}

enum Outcome {
    Pass,
    CheckFailed,
}

fn lookup(flag: &Option<String>, cfg: &Config, key: &str) -> Option<String> {
    flag.clone().or_else(|| cfg.get(key).map(str::to_string))
}

fn parse_num<T: std::str::FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {what} from {text:?}")))
}

fn parse_real(text: &str, what: &str) -> Result<f64> {
    let v: f64 = parse_num(text, what)?;
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("{what} must be finite, got {text:?}")));
    }
    Ok(v)
}

fn resolve_seed(flag: &Option<String>, cfg: &Config) -> Result<u64> {
    match lookup(flag, cfg, "seed").or_else(|| std::env::var(SEED_ENV).ok()) {
        Some(s) => parse_num(&s, "seed"),
        None => Ok(0),
    }
}

fn build_request(args: &RequestArgs, cfg: &Config) -> Result<AnalysisRequest> {
    let h0 = lookup(&args.h0, cfg, "h0").ok_or_else(|| Error::InvalidInput("missing --h0 (see --help for usage)".into()))?;
    let h = lookup(&args.h, cfg, "h").ok_or_else(|| Error::InvalidInput("missing --h (see --help for usage)".into()))?;
    let h0_diag = parse_complex_list(&h0)?;
    let h_diag = parse_real_list(&h)?;
    let mut req = AnalysisRequest::new(h0_diag, h_diag);
    if let Some(n) = lookup(&args.n, cfg, "n") {
        req.n = parse_num(&n, "n")?;
    }
    if let Some(c) = lookup(&args.c, cfg, "c") {
        req.form_constant = parse_real(&c, "c")?;
    }
    req.seed = resolve_seed(&args.seed, cfg)?;
    req.samples = match lookup(&args.samples, cfg, "samples") {
        Some(s) => parse_num(&s, "samples")?,
        None => DEFAULT_SAMPLES,
    };
    req.flow = FlowOverrides {
        step: lookup(&args.step, cfg, "step").map(|s| parse_real(&s, "step")).transpose()?,
        epsilon: lookup(&args.epsilon, cfg, "epsilon").map(|s| parse_real(&s, "epsilon")).transpose()?,
    };
    if let Some(checks) = lookup(&args.checks, cfg, "checks") {
        req.checks = split_list(&checks);
    } else {
        req.checks = CHECK_NAMES.iter().map(|s| s.to_string()).collect();
    }
    req.validate()?;
    Ok(req)
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}")))
        }
    }
}

fn critical_values_of(req: &AnalysisRequest) -> Result<Vec<Complex64>> {
    let v = req.validate()?;
    let orbit = orbitfib::weyl::weyl_orbit(&v.h0, orbitfib::weyl::DEDUP_TOL)?;
    Ok(orbitfib::weyl::critical_values(&v.h, &orbit, v.cfg)?.values())
}

fn cmd_analyze(req: &RequestArgs, format: &Option<String>, out: Option<&Path>, cfg: &Config) -> Result<Outcome> {
    let req = build_request(req, cfg)?;
    let format = lookup(format, cfg, "format").unwrap_or_else(|| "json".into());
    match format.as_str() {
        "json" => {
            let report = analyze(&req)?;
            let mut text = report.to_json();
            text.push('\n');
            write_output(out, &text)?;
            for f in &report.failures {
                eprintln!("FAILED {f}");
            }
            eprintln!(
                "analyze: k = {}, {} critical values, {}",
                report.orbit.orbit_size,
                report.critical_values.len(),
                if report.passed() { "all checks passed" } else { "checks failed" }
            );
            Ok(if report.passed() { Outcome::Pass } else { Outcome::CheckFailed })
        }
        "svg" => {
            write_output(out, &value_plane_svg(&critical_values_of(&req)?, Complex64::new(0.0, 0.0), &[]))?;
            Ok(Outcome::Pass)
        }
        other => Err(Error::InvalidInput(format!("unknown format {other:?}; expected json or svg"))),
    }
}

fn cmd_transport(
    req: &RequestArgs,
    from: &Option<String>,
    to: &Option<String>,
    out: Option<&Path>,
    cfg: &Config,
) -> Result<Outcome> {
    let request = build_request(req, cfg)?;
    let from = parse_complex(&lookup(from, cfg, "from").unwrap_or_else(|| "0".into()))?;
    let to = parse_complex(&lookup(to, cfg, "to").ok_or_else(|| Error::InvalidInput("missing --to (see --help for usage)".into()))?)?;
    let (records, summary) = run_transport(&request, from, to, request.samples)?;
    let mut lines = String::new();
    for r in &records {
        lines.push_str(&serde_json::to_string(r).expect("trajectory records serialize"));
        lines.push('\n');
    }
    let summary_json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    match out {
        Some(path) => {
            write_output(Some(path), &lines)?;
            write_output(None, &summary_json)?;
        }
        None => {
            write_output(None, &lines)?;
            eprint!("{summary_json}");
        }
    }
    for a in &summary.aborted {
        eprintln!("ABORTED {a}");
    }
    Ok(if summary.pass { Outcome::Pass } else { Outcome::CheckFailed })
}

fn cmd_verify(
    suite: &[String],
    tol: &Option<String>,
    seed: &Option<String>,
    format: &Option<String>,
    out: Option<&Path>,
    cfg: &Config,
) -> Result<Outcome> {
    let mut suites: Vec<String> = suite.iter().flat_map(|s| split_list(s)).collect();
    if suites.is_empty() {
        if let Some(s) = cfg.get("suite") {
            suites = split_list(s);
        }
    }
    let tol = lookup(tol, cfg, "tol").map(|t| parse_real(&t, "tol")).transpose()?;
    let seed = resolve_seed(seed, cfg)?;
    let format = lookup(format, cfg, "format").unwrap_or_else(|| "text".into());
    if format != "text" && format != "json" {
        return Err(Error::InvalidInput(format!("unknown format {format:?}; expected text or json")));
    }
    let report = run_suites(&suites, tol, seed)?;
    let text = if format == "json" {
        serde_json::to_string_pretty(&report).expect("verify report serializes") + "\n"
    } else {
        let mut s = String::new();
        for c in &report.checks {
            let relation = match c.bound {
                orbitfib::verify::Bound::Below => "<",
                orbitfib::verify::Bound::Above => ">",
            };
            s.push_str(&format!(
                "{} [{}] {}: {:.3e} {} {:.3e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.measured,
                relation,
                c.tolerance
            ));
        }
        let failed = report.checks.iter().filter(|c| !c.pass).count();
        s.push_str(&format!("{} checks, {} failed\n", report.checks.len(), failed));
        s
    };
    write_output(out, &text)?;
    Ok(if report.pass { Outcome::Pass } else { Outcome::CheckFailed })
}

fn read_trajectories(path: &Path) -> Result<Vec<Vec<Complex64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut by_sample: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let r: TrajectoryRecord = serde_json::from_str(line).map_err(|e| {
            Error::InvalidInput(format!("{}:{}: bad trajectory record: {e}", path.display(), lineno + 1))
        })?;
        by_sample.entry(r.sample).or_default().push(Complex64::new(r.f_re, r.f_im));
    }
    Ok(by_sample.into_values().collect())
}

fn cmd_plot(
    req: &RequestArgs,
    base: &Option<String>,
    trajectories: &Option<PathBuf>,
    out: Option<&Path>,
    cfg: &Config,
) -> Result<Outcome> {
    let request = build_request(req, cfg)?;
    let base = parse_complex(&lookup(base, cfg, "base").unwrap_or_else(|| "0".into()))?;
    let traj_path = trajectories.clone().or_else(|| cfg.get("trajectories").map(PathBuf::from));
    let trajs = match traj_path {
        Some(p) => read_trajectories(&p)?,
        None => Vec::new(),
    };
    write_output(out, &value_plane_svg(&critical_values_of(&request)?, base, &trajs))?;
    Ok(Outcome::Pass)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Analyze { req, format, out } => cmd_analyze(req, format, out.as_deref(), &cfg),
        Command::Transport { req, from, to, out } => cmd_transport(req, from, to, out.as_deref(), &cfg),
        Command::Verify { suite, tol, seed, format, out } => {
            cmd_verify(suite, tol, seed, format, out.as_deref(), &cfg)
        }
        Command::Plot { req, base, trajectories, out } => {
            cmd_plot(req, base, trajectories, out.as_deref(), &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(Outcome::Pass)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::CheckFailed)) => ExitCode::from(2),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(1)
        }
    }
}
