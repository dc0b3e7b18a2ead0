use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use specdet::dets::{det_report, eps_limit_comparison, proposition_ene_f_scenario, DetError, DetInput, EpsLimit};
use specdet::matmodel::parse_matrix;
use specdet::spaces::{Psi, ProfileSpec, SpectralProfile, SymmetricSpace};
use specdet::traces::{TraceError, TraceFunctional};
use specdet::verify::{run_suite, to_json, write_csv, CheckKind, Execution, SuiteConfig, SuiteStatus, VerifyError};

const EXAMPLES: [&str; 3] = ["ex-3-4-invertible", "ex-3-4-projection", "prop-3-2"];

#[derive(Parser)]
#[command(name = "specdet", version, about = "Singular value calculus, traces and determinants with a verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded inequality checks and write a report.
    Verify(VerifyArgs),
    /// Evaluate a determinant and print a JSON report.
    Det(DetArgs),
    /// Reproduce a named worked example.
    Example(ExampleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// `all` or a comma-separated list of suite names.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Replace every tolerance by this value.
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(clap::Args)]
struct DetArgs {
    /// Matrix file, or a profile line such as `kind=psi-prime`.
    #[arg(long)]
    input: String,
    /// `integral:<c>` or `singular:psi-log`.
    #[arg(long, default_value = "integral:1")]
    trace: String,
    /// l1, l2, lp:<p>, linf, llog or marcinkiewicz:psi-log.
    #[arg(long, default_value = "l1")]
    space: String,
    /// Also report the limit of det(|X| + ε) as ε ↓ 0.
    #[arg(long)]
    eps_compare: bool,
}

#[derive(clap::Args)]
struct ExampleArgs {
    #[arg(long)]
    name: String,
}

/// Exit codes: 0 success, 1 failed or non-convergent, 2 usage.
enum Failure {
    Usage(String),
    Run(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            Failure::Run(msg) => {
                eprintln!("{msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Det(args) => cmd_det(args),
        Command::Example(args) => cmd_example(args),
    };
    match result {
        Ok(code) => code,
        Err(f) => f.report(),
    }
}

fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("SPECDET_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Failure::Usage(format!("SPECDET_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let res = match out {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| Failure::Run(format!("cannot write report: {e}")))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Failure> {
    let checks = CheckKind::parse_list(&args.suite).map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg = SuiteConfig {
        checks,
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
        threads: thread_cap()?,
        ..SuiteConfig::default()
    };
    let outcome = match run_suite(&cfg) {
        Ok(o) => o,
        Err(e @ VerifyError::Config(_)) => return Err(Failure::Usage(e.to_string())),
        Err(e) => return Err(Failure::Run(e.to_string())),
    };
    let bytes = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&outcome.rows, &mut buf).map_err(|e| Failure::Run(e.to_string()))?;
            buf
        }
        Format::Json => {
            let mut s = to_json(&outcome).map_err(|e| Failure::Run(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
    };
    emit(args.out.as_deref(), &bytes)?;
    for r in &outcome.reports {
        let margin = r.worst_margin.map_or("-".to_string(), |m| format!("{m:.3e}"));
        let verdict = match (outcome.status, r.pass) {
            (SuiteStatus::NoData, _) => "no-data",
            (_, true) => "pass",
            (_, false) => "FAIL",
        };
        eprintln!("{:<22} {verdict:<7} violations={} worst_margin={margin}", r.check_name, r.violations);
        for e in r.errors.iter().take(3) {
            eprintln!("    {e}");
        }
    }
    eprintln!("status: {}", serde_json::to_value(outcome.status).unwrap_or_default().as_str().unwrap_or("?"));
    Ok(if outcome.status.success() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_input(input: &str) -> Result<DetInput, Failure> {
    let path = Path::new(input);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{input}: {e}")))?;
        return parse_matrix(&text).map(DetInput::Matrix).map_err(|e| Failure::Usage(format!("{input}: {e}")));
    }
    let line = if input.contains('=') { input.to_string() } else { format!("kind={input}") };
    let spec: ProfileSpec = line
        .parse()
        .map_err(|e| Failure::Usage(format!("`{input}` is neither a matrix file nor a profile line: {e}")))?;
    spec.build().map(DetInput::Profile).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_det(args: DetArgs) -> Result<ExitCode, Failure> {
    let x = parse_input(&args.input)?;
    let phi: TraceFunctional = args.trace.parse().map_err(|e: TraceError| Failure::Usage(e.to_string()))?;
    let space: SymmetricSpace = args.space.parse().map_err(|e: specdet::spaces::SpaceError| Failure::Usage(e.to_string()))?;
    let report = det_report(&x, &phi, space, args.eps_compare).map_err(|e| Failure::Run(e.to_string()))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Run(e.to_string()))?;
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Comparison {
    quantity: &'static str,
    expected: f64,
    computed: Option<f64>,
    tolerance: f64,
    pass: bool,
}

impl Comparison {
    /// `tolerance` is relative when `expected ≠ 0`.
    fn new(quantity: &'static str, expected: f64, computed: Option<f64>, tolerance: f64) -> Self {
        let pass = computed.is_some_and(|c| (c - expected).abs() <= tolerance * expected.abs().max(f64::MIN_POSITIVE));
        Comparison { quantity, expected, computed, tolerance, pass }
    }
}

#[derive(Serialize)]
struct ExampleReport {
    name: String,
    comparisons: Vec<Comparison>,
    pass: bool,
}

fn converged(limit: EpsLimit) -> Option<f64> {
    match limit {
        EpsLimit::Converged(v) => Some(v),
        EpsLimit::Diverges => None,
    }
}

fn run_example(name: &str) -> Result<Vec<Comparison>, DetError> {
    let singular = TraceFunctional::singular(Psi::Log);
    let marc = SymmetricSpace::Marcinkiewicz(Psi::Log);
    let e1 = (-1f64).exp();
    Ok(match name {
        "ex-3-4-invertible" => {
            let x = DetInput::Profile(SpectralProfile::exp_neg_psi_prime_flip());
            let c = eps_limit_comparison(&x, &singular, marc)?;
            vec![
                Comparison::new("det", e1, Some(c.det.value), 1e-9),
                Comparison::new("branch", 1.0, Some(u8::from(c.det.branch) as f64), 0.0),
                Comparison::new("eps-limit", 1.0, converged(c.eps_limit), 1e-6),
            ]
        }
        "ex-3-4-projection" => {
            let x = DetInput::Profile(SpectralProfile::projection(0.5)?);
            let c = eps_limit_comparison(&x, &singular, marc)?;
            vec![
                Comparison::new("det", 0.0, Some(c.det.value), 0.0),
                Comparison::new("branch", 3.0, Some(u8::from(c.det.branch) as f64), 0.0),
                Comparison::new("eps-limit", 1.0, converged(c.eps_limit), 1e-6),
            ]
        }
        "prop-3-2" => {
            let t = SpectralProfile::power(0.75)?;
            let tau = TraceFunctional::integral(1.0)?;
            let v = proposition_ene_f_scenario(SymmetricSpace::Lp(2.0), SymmetricSpace::Lp(1.0), &t, &tau, &tau)?;
            vec![
                Comparison::new("det-psi", (-4f64).exp(), Some(v.det_psi.value), 1e-9),
                Comparison::new("det-phi", 0.0, Some(v.det_phi.value), 0.0),
            ]
        }
        _ => unreachable!("names are validated by the caller"),
    })
}

fn cmd_example(args: ExampleArgs) -> Result<ExitCode, Failure> {
    if !EXAMPLES.contains(&args.name.as_str()) {
        return Err(Failure::Usage(format!("unknown example `{}`; available: {}", args.name, EXAMPLES.join(", "))));
    }
    let comparisons = run_example(&args.name).map_err(|e| Failure::Run(e.to_string()))?;
    let pass = comparisons.iter().all(|c| c.pass);
    let report = ExampleReport { name: args.name, comparisons, pass };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Run(e.to_string()))?;
    println!("{json}");
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
