//! Argument parsing, command dispatch and the exit-code contract:
//! 0 pass, 1 mathematical-check failure, 2 usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use cone_lab_core::wallach::predicted_member;

use crate::config::{parse_grid, ConfigError, ScanConfig};
use crate::report::Report;
use crate::{mcverify, merge, par, scan, suites};

#[derive(Parser, Debug)]
#[command(name = "cone-lab", version, about = "Wallach-set and Riesz-measure numerics on symmetric cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deterministic algebraic and special-function identity suites.
    VerifyIdentities(RunArgs),
    /// Positivity margins, Gram tests and witness searches over a μ grid.
    ScanWallach(RunArgs),
    /// Monte Carlo and quadrature checks of the integral identities.
    McVerify(RunArgs),
    /// Witness search only, with refinement, at every grid point.
    KernelWitness(RunArgs),
    /// Merge reports into one JSON report, a CSV summary and a text table.
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Algebras, comma-separated (`symr:3`, `hermc:2`, `spin:5`).
    #[arg(long, value_delimiter = ',')]
    algebra: Vec<String>,
    /// Explicit μ values, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    mu: Vec<f64>,
    /// Uniform grid `start:stop:step`, added to --mu.
    #[arg(long)]
    grid: Option<String>,
    /// Add the lattice points kd/2.
    #[arg(long)]
    lattice: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV summary path (scan-wallach).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Overrides the command's primary tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Reports to merge.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Verify,
    Scan,
    Mc,
    Witness,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Verify => "verify-identities",
            Kind::Scan => "scan-wallach",
            Kind::Mc => "mc-verify",
            Kind::Witness => "kernel-witness",
        }
    }
}

const DEFAULT_MC_ALGEBRAS: [&str; 5] = ["symr:2", "symr:3", "symr:4", "hermc:2", "spin:3"];
const DEFAULT_MC_GRID: [f64; 3] = [2.0, 2.5, 4.0];

fn build_config(kind: Kind, a: &RunArgs) -> anyhow::Result<ScanConfig> {
    let mut cfg = match &a.config {
        Some(p) => ScanConfig::load(p)?,
        None => ScanConfig::default(),
    };
    if !a.algebra.is_empty() {
        cfg.algebras = a.algebra.iter().map(|s| s.trim().to_string()).collect();
    }
    if !a.mu.is_empty() {
        cfg.mu = a.mu.clone();
    }
    if let Some(g) = &a.grid {
        cfg.mu.extend(parse_grid(g)?);
    }
    cfg.lattice |= a.lattice;
    if let Some(v) = a.samples {
        cfg.samples = v;
    }
    if let Some(v) = a.budget {
        cfg.budget = v;
    }
    if a.seed.is_some() {
        cfg.seed = a.seed;
    }
    if let Some(p) = &a.out {
        cfg.out = Some(p.display().to_string());
    }
    if let Some(p) = &a.csv {
        cfg.csv = Some(p.display().to_string());
    }
    if cfg.algebras.is_empty() {
        cfg.algebras = match kind {
            Kind::Verify => suites::DEFAULT_ALGEBRAS.iter().map(|s| s.to_string()).collect(),
            Kind::Mc => DEFAULT_MC_ALGEBRAS.iter().map(|s| s.to_string()).collect(),
            Kind::Scan | Kind::Witness => vec!["symr:3".to_string()],
        };
    }
    if cfg.mu.is_empty() && !cfg.lattice {
        match kind {
            Kind::Scan | Kind::Witness => cfg.lattice = true,
            Kind::Mc => cfg.mu = DEFAULT_MC_GRID.to_vec(),
            Kind::Verify => {}
        }
    }
    if let Some(t) = a.tol {
        match kind {
            Kind::Verify => {
                cfg.tol.identity = t;
                cfg.tol.gamma = t;
                cfg.tol.kernel = t;
            }
            Kind::Scan | Kind::Witness => cfg.tol.gram_psd = t,
            Kind::Mc => cfg.tol.mc_frobenius = t,
        }
    }
    cfg.validate()?;
    if kind != Kind::Verify {
        for alg in cfg.parsed_algebras()? {
            cfg.grid_for(&alg)?;
        }
    }
    Ok(cfg)
}

fn fmt_err(v: f64) -> String {
    format!("{v:.3e}")
}

/// Runs one computational command and fills the report summary.
fn execute(kind: Kind, cfg: ScanConfig) -> anyhow::Result<Report> {
    let started = Instant::now();
    let mut echo = cfg.clone();
    // output paths are not part of the provenance
    echo.out = None;
    echo.csv = None;
    let mut report = Report::new(kind.name(), echo);
    let mut failures = Vec::new();
    let mut mismatches = Vec::new();
    let mut notes = Vec::new();
    let pool = par::thread_pool()?;
    let step = Instant::now();
    match kind {
        Kind::Verify => {
            report.identities = pool.install(|| suites::run(&cfg))?;
            for c in report.identities.iter().filter(|c| !c.pass) {
                failures.push(format!(
                    "{} {}: max error {} exceeds {}",
                    c.algebra,
                    c.name,
                    fmt_err(c.max_error),
                    fmt_err(c.tol)
                ));
            }
        }
        Kind::Scan => {
            report.scan = pool.install(|| scan::run_scan(&cfg))?;
            failures.extend(scan::hard_failures(
                report.scan.iter().map(|r| (r.algebra.as_str(), r.mu, r.predicted, r.observed)),
            ));
            for r in &report.scan {
                let alg: cone_lab_core::Algebra = r.algebra.parse()?;
                let continuous = r.mu >= alg.rank() as f64 * alg.half_d();
                if continuous && r.margin.min_scaled < -cfg.tol.margin {
                    failures.push(format!(
                        "{} mu={}: positivity margin {} below -{}",
                        r.algebra,
                        r.mu,
                        fmt_err(r.margin.min_scaled),
                        fmt_err(cfg.tol.margin)
                    ));
                }
                if r.mismatch {
                    mismatches.push(format!(
                        "{} mu={}: predicted {}, observed {:?}",
                        r.algebra,
                        r.mu,
                        if r.predicted { "member" } else { "non-member" },
                        r.observed
                    ));
                }
            }
            if !mismatches.is_empty() {
                notes.push("a PSD verdict outside the predicted set means no witness was found within budget".into());
            }
        }
        Kind::Mc => {
            report.mc = pool.install(|| mcverify::run(&cfg))?;
            for m in report.mc.iter().filter(|m| !m.pass) {
                let what = match (m.mu, m.k) {
                    (_, Some(k)) if m.kind != "obstruction" => format!("k={k}"),
                    (Some(mu), _) => format!("mu={mu}"),
                    _ => String::new(),
                };
                failures.push(format!("{} {} {what}: check failed", m.kind, m.algebra));
            }
            notes.extend(report.mc.iter().filter_map(|m| m.note.clone()));
            notes.sort();
            notes.dedup();
        }
        Kind::Witness => {
            report.witnesses = pool.install(|| scan::run_witness(&cfg))?;
            failures.extend(scan::hard_failures(
                report.witnesses.iter().map(|w| (w.algebra.as_str(), w.mu, w.predicted, w.certificate.verdict)),
            ));
            for w in &report.witnesses {
                let alg: cone_lab_core::Algebra = w.algebra.parse()?;
                debug_assert_eq!(w.predicted, predicted_member(&alg, w.mu));
            }
        }
    }
    report.timestamp.steps.insert(kind.name().to_string(), step.elapsed().as_secs_f64());
    report.summary.checks = report.identities.len() + report.scan.len() + report.mc.len() + report.witnesses.len();
    report.summary.pass = failures.is_empty();
    report.summary.failures = failures;
    report.summary.mismatches = mismatches;
    report.summary.notes = notes;
    report.timestamp.generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    report.timestamp.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

fn write_json(report: &Report, out: Option<&str>) -> anyhow::Result<()> {
    let text = report.to_json()?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_csv(report: &Report, path: Option<&str>) -> anyhow::Result<()> {
    if let Some(p) = path {
        merge::write_csv(std::fs::File::create(p)?, &report.scan)?;
    }
    Ok(())
}

fn print_summary(report: &Report) {
    let s = &report.summary;
    eprintln!(
        "{}: {} ({} checks, {} failures, {} mismatches)",
        report.command,
        if s.pass { "PASS" } else { "FAIL" },
        s.checks,
        s.failures.len(),
        s.mismatches.len()
    );
    for f in &s.failures {
        eprintln!("  failure: {f}");
    }
    for m in &s.mismatches {
        eprintln!("  mismatch: {m}");
    }
}

fn run_command(kind: Kind, args: &RunArgs) -> anyhow::Result<bool> {
    let cfg = build_config(kind, args)?;
    let report = execute(kind, cfg.clone())?;
    write_json(&report, cfg.out.as_deref())?;
    write_csv(&report, cfg.csv.as_deref())?;
    if kind == Kind::Scan {
        eprint!("{}", merge::text_table(&report.scan));
    }
    print_summary(&report);
    Ok(report.summary.pass)
}

fn run_report(args: &ReportArgs) -> anyhow::Result<bool> {
    let reports = args.paths.iter().map(|p| merge::load_report(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let (merged, warnings) = merge::merge(reports)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let out = args.out.as_ref().map(|p| p.display().to_string());
    write_json(&merged, out.as_deref())?;
    let csv = args.csv.as_ref().map(|p| p.display().to_string());
    write_csv(&merged, csv.as_deref())?;
    let table = merge::text_table(&merged.scan);
    if out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(true)
}

fn exit_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        2
    } else {
        1
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::VerifyIdentities(a) => run_command(Kind::Verify, a),
        Command::ScanWallach(a) => run_command(Kind::Scan, a),
        Command::McVerify(a) => run_command(Kind::Mc, a),
        Command::KernelWitness(a) => run_command(Kind::Witness, a),
        Command::Report(a) => run_report(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_for(&e))
        }
    }
}

/// Builds the effective configuration and runs a command in-process, returning the report.
pub fn run_in_process(command: &str, cfg: ScanConfig) -> anyhow::Result<Report> {
    let kind = match command {
        "verify-identities" => Kind::Verify,
        "scan-wallach" => Kind::Scan,
        "mc-verify" => Kind::Mc,
        "kernel-witness" => Kind::Witness,
        other => return Err(ConfigError(format!("unknown command '{other}'")).into()),
    };
    cfg.validate()?;
    execute(kind, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_defaults_to_symr3_lattice() {
        let a = RunArgs { seed: Some(1), ..Default::default() };
        let cfg = build_config(Kind::Scan, &a).unwrap();
        assert_eq!(cfg.algebras, vec!["symr:3"]);
        assert!(cfg.lattice);
    }

    #[test]
    fn tol_targets_primary_tolerance() {
        let a = RunArgs { seed: Some(1), tol: Some(1e-30), ..Default::default() };
        let cfg = build_config(Kind::Verify, &a).unwrap();
        assert_eq!(cfg.tol.identity, 1e-30);
        assert_eq!(cfg.tol.gram_psd, 1e-9);
        let cfg = build_config(Kind::Mc, &a).unwrap();
        assert_eq!(cfg.tol.mc_frobenius, 1e-30);
    }

    #[test]
    fn missing_seed_is_config_error() {
        let err = build_config(Kind::Verify, &RunArgs::default()).unwrap_err();
        assert_eq!(exit_for(&err), 2);
    }
}
