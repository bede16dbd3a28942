//! `trimod` — classify Gaussian weight families on window truncations of the
//! upper unitriangular group, verify the operator identities behind their
//! modular theory, and merge the resulting reports.
//!
//! Exit codes: 0 pass, 1 usage or config error, 2 undecided verdicts,
//! 3 verification failure.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use trimod::classify::{classify, ClassificationReport};
use trimod::measure::suite::{run_suite, RunConfig, SuiteCheck, SuiteReport, ALL_CHECKS};
use trimod::series::{TruncationBudget, Verdict};
use trimod::weights::WeightConfig;
use trimod::IndexWindow;

#[derive(Parser)]
#[command(name = "trimod", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the convergence series of a weight family and report which
    /// measure-theoretic properties hold.
    Classify(ClassifyArgs),
    /// Run the symbolic identity sweeps and the numeric operator checks.
    Verify(VerifyArgs),
    /// Merge previously written JSON reports into one text table.
    Report(ReportArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Weight family JSON, e.g. {"family":"geometric","s":2.0}.
    #[arg(long)]
    config: PathBuf,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Window radius R, for the symmetric window [-R, R].
    #[arg(long, default_value_t = 3)]
    window: u32,
    /// Target tail size for the series estimates.
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    /// Print the JSON report to stdout instead of the text summary.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run configuration JSON; defaults to the geometric family with s = 2
    /// when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Window radius R, for the symmetric window [-R, R].
    #[arg(long)]
    window: Option<u32>,
    /// Root seed for sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of checks to run.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Pointwise tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of sample points for pointwise checks.
    #[arg(long)]
    points: Option<usize>,
    /// Sample count for the Monte Carlo checks.
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Swap in the rejected right-generator spelling; the generator check
    /// must then fail, demonstrating the control.
    #[arg(long)]
    negative_control: bool,
    /// Print the JSON report to stdout instead of the text summary.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON reports produced by `classify` or `verify`.
    inputs: Vec<PathBuf>,
    /// Write the merged table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // Dying quietly on a closed pipe beats a panic from println.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("TRIMOD_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: TRIMOD_THREADS must be a positive integer");
                return ExitCode::from(1);
            }
        }
    }
    let outcome = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn write_or_print(
    json: &serde_json::Value,
    out: &Option<PathBuf>,
    print: bool,
) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(json)?;
    if let Some(path) = out {
        std::fs::write(path, text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if print {
        println!("{text}");
    }
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> anyhow::Result<u8> {
    let raw = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg =
        WeightConfig::from_json_str(&raw).map_err(|e| anyhow!("{}: {e}", args.config.display()))?;
    let window = IndexWindow::symmetric(args.window);
    let budget = TruncationBudget {
        target_tail: args.tol,
        ..TruncationBudget::default()
    };
    let report = classify(&cfg, window, &budget)?;
    let json = serde_json::to_value(&report)?;
    write_or_print(&json, &args.out, args.json)?;
    if !args.json {
        print_classification(&report);
    }
    let undecided = report
        .conditions
        .iter()
        .any(|c| c.verdict == Verdict::Undecided && c.condition_met.is_none());
    Ok(if undecided { 2 } else { 0 })
}

fn print_classification(report: &ClassificationReport) {
    println!("classification on window {}", report.window);
    println!("{:-<72}", "");
    for line in &report.summary {
        println!("  {line}");
    }
    println!("{:-<72}", "");
    println!(
        "  {:<34} {:<12} {:>10} {:>12}",
        "condition", "verdict", "pairs", "met"
    );
    for c in &report.conditions {
        println!(
            "  {:<34} {:<12} {:>10} {:>12}",
            c.name,
            format!("{:?}", c.verdict).to_lowercase(),
            format!(
                "{}c/{}d/{}u",
                c.tally.convergent, c.tally.divergent, c.tally.undecided
            ),
            c.condition_met
                .map(|m| if m { "yes" } else { "no" })
                .unwrap_or("undecided"),
        );
    }
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<u8> {
    let mut config = match &args.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<RunConfig>(&raw)
                .with_context(|| format!("parsing {}", path.display()))?
        }
        None => RunConfig::geometric_default(IndexWindow::symmetric(3)),
    };
    if let Some(radius) = args.window {
        config.window = IndexWindow::symmetric(radius);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(points) = args.points {
        config.points = points;
    }
    if let Some(samples) = args.mc_samples {
        config.mc_samples = samples;
    }
    if let Some(tol) = args.tol {
        config.tolerances.pointwise = tol;
    }
    if !args.checks.is_empty() {
        for name in &args.checks {
            if !ALL_CHECKS.contains(&name.as_str()) {
                return Err(anyhow!(
                    "unknown check '{name}'; available: {}",
                    ALL_CHECKS.join(", ")
                ));
            }
        }
        config.checks = args.checks.clone();
    }
    if args.negative_control {
        config.negative_control = true;
    }
    let report = run_suite(&config)?;
    let json = serde_json::to_value(&report)?;
    write_or_print(&json, &args.out, args.json)?;
    if !args.json {
        print_suite(&report);
    }
    Ok(if report.pass { 0 } else { 3 })
}

fn print_suite(report: &SuiteReport) {
    println!(
        "verification on window {} (seed {})",
        report.config.window, report.config.seed
    );
    println!("{:-<72}", "");
    for check in &report.checks {
        let status = if check.passed() { "pass" } else { "FAIL" };
        match check {
            SuiteCheck::Symbolic {
                name,
                checked,
                residuals,
                ..
            } => println!(
                "  {status}  {name:<28} exact sweep: {checked} checks, {residuals} residuals"
            ),
            SuiteCheck::Numeric { name, report, .. } => {
                if let Some(why) = &report.skipped {
                    println!("  skip  {name:<28} {why}");
                } else {
                    println!(
                        "  {status}  {name:<28} max rel err {:.3e} (tol {:.1e}, {} points)",
                        report.max_rel_err, report.tolerance, report.points
                    );
                }
            }
            SuiteCheck::Statistical {
                name,
                estimate,
                target,
                sigmas,
                ..
            } => println!(
                "  {status}  {name:<28} mean {:+.6e} vs {:+.6e} ({:.1} sigma window, se {:.2e})",
                estimate.mean_re, target, sigmas, estimate.std_error
            ),
        }
    }
    println!("{:-<72}", "");
    println!("suite: {}", if report.pass { "pass" } else { "FAIL" });
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<u8> {
    let mut rows: Vec<(String, String, String)> = Vec::new();
    for path in &args.inputs {
        let raw =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&raw).map_err(|e| {
            anyhow!(
                "{}:{}:{}: malformed JSON: {e}",
                path.display(),
                e.line(),
                e.column()
            )
        })?;
        collect_rows(path, &value, &mut rows)?;
    }
    let mut table = String::new();
    table.push_str(&format!("{:<28} {:<36} {}\n", "source", "item", "result"));
    for (src, item, result) in &rows {
        table.push_str(&format!("{src:<28} {item:<36} {result}\n"));
    }
    match &args.out {
        Some(path) => std::fs::write(path, table.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{table}"),
    }
    Ok(0)
}

fn collect_rows(
    path: &Path,
    value: &serde_json::Value,
    rows: &mut Vec<(String, String, String)>,
) -> anyhow::Result<()> {
    let src = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    if let Some(conditions) = value.get("conditions").and_then(|v| v.as_array()) {
        for c in conditions {
            let name = c["name"].as_str().unwrap_or("?").to_string();
            let verdict = c["verdict"].as_str().unwrap_or("?").to_string();
            let met = match &c["condition_met"] {
                serde_json::Value::Bool(true) => "met",
                serde_json::Value::Bool(false) => "unmet",
                _ => "undecided",
            };
            rows.push((src.clone(), name, format!("{verdict} ({met})")));
        }
        return Ok(());
    }
    if let Some(checks) = value.get("checks").and_then(|v| v.as_array()) {
        for c in checks {
            let name = c["name"].as_str().unwrap_or("?").to_string();
            let pass = c["pass"].as_bool().unwrap_or(false);
            rows.push((
                src.clone(),
                name,
                if pass { "pass".into() } else { "FAIL".into() },
            ));
        }
        return Ok(());
    }
    Err(anyhow!(
        "{}: unrecognized report shape (expected 'conditions' or 'checks')",
        path.display()
    ))
}
