use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kerr_bounds::dephasing::NoiseOrder;
use kerr_bounds::report::{self, DephasingCurveRequest, DephasingMethod, Grid, LossCurveRequest, LossMethodSpec, OutputFormat, SummaryParams};
use kerr_bounds::verify::{self, Hooks, Suite};
use kerr_bounds::{lossbounds, Error};

#[derive(Parser)]
#[command(name = "kerr-bounds", version, about = "Precision bounds for Kerr (n̂²) phase estimation under loss and phase diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Photon-loss bounds against N.
    LossCurve(LossArgs),
    /// Phase-diffusion bounds against N.
    DephasingCurve(DephasingArgs),
    /// Noise × scheme summary evaluated at one parameter point.
    SummaryTable(SummaryArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1.0)]
    n_min: f64,
    #[arg(long, default_value_t = 20.0)]
    n_max: f64,
    /// Log-spaced points (Fock grids use every integer in range).
    #[arg(long, default_value_t = report::DEFAULT_GRID_POINTS)]
    n_steps: usize,
}

#[derive(Args)]
struct OutputArgs {
    /// Cramér–Rao repetitions m.
    #[arg(long, default_value_t = 1)]
    reps: u32,
    /// csv, json or gnuplot (data CSV plus a plot script; needs --out).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LossArgs {
    #[arg(long, default_value = "squeezed_vacuum")]
    family: String,
    #[arg(long, default_value_t = 0.9)]
    eta: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated method tags; `analytic` picks the family's closed form.
    #[arg(long, default_value = "analytic,asymptotic,averaged,weak_value,before_loss,lossless")]
    methods: String,
    /// Loss-count cutoff for averaged and weak_value, or `full`.
    #[arg(long, default_value = "full")]
    kmax: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DephasingArgs {
    #[arg(long, default_value = "coherent")]
    family: String,
    /// Linear diffusion strength-spread product βΔ.
    #[arg(long, conflicts_with = "gamma_delta", required_unless_present = "gamma_delta")]
    beta_delta: Option<f64>,
    /// Second-order diffusion strength-spread product γΔ.
    #[arg(long)]
    gamma_delta: Option<f64>,
    /// Mean excitations of the squeezed environment.
    #[arg(long, default_value_t = 0.0)]
    n_env: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "exact_bound,asymptotic,noiseless")]
    methods: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SummaryArgs {
    #[arg(long, default_value_t = 0.9)]
    eta: f64,
    /// β, taken at an unsqueezed spread Δ = 1.
    #[arg(long, default_value_t = 1.0)]
    beta_delta: f64,
    /// γ, taken at an unsqueezed spread Δ = 1.
    #[arg(long, default_value_t = 1.0)]
    gamma_delta: f64,
    /// Mean photon number N.
    #[arg(long, default_value_t = 10.0)]
    n: f64,
    #[arg(long, default_value_t = 0.0)]
    n_env: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

enum Failure {
    Usage(String),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::LossCurve(a) => loss_curve(a),
        Command::DephasingCurve(a) => dephasing_curve(a),
        Command::SummaryTable(a) => summary_table(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("kerr-bounds: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("kerr-bounds: {msg}");
            ExitCode::from(3)
        }
    }
}

fn format_of(out: &OutputArgs) -> Result<OutputFormat, Failure> {
    let format = OutputFormat::from_tag(&out.format)
        .ok_or_else(|| Failure::Usage(format!("unknown format {:?} (expected csv, json or gnuplot)", out.format)))?;
    if format == OutputFormat::Gnuplot && out.out.is_none() {
        return Err(Failure::Usage("--format gnuplot needs --out".into()));
    }
    if out.reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    Ok(format)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}"))),
    }
}

/// Writes the CSV next to the script path and the script itself.
fn write_gnuplot(out: &Path, csv: &str, script: impl FnOnce(&str) -> String) -> Result<(), Failure> {
    let csv_path = out.with_extension("csv");
    let script_path = if csv_path == out { out.with_extension("gp") } else { out.to_path_buf() };
    let csv_name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Failure::Usage(format!("cannot derive a CSV name from {}", out.display())))?;
    write_text(Some(&csv_path), csv)?;
    write_text(Some(&script_path), &script(csv_name))
}

fn loss_curve(a: LossArgs) -> Result<(), Failure> {
    let format = format_of(&a.output)?;
    let family = report::parse_family(&a.family)?;
    let grid = Grid::for_family(family, a.grid.n_min, a.grid.n_max, a.grid.n_steps)?;
    let mut req = LossCurveRequest::new(family, a.eta, grid);
    req.methods = report::parse_methods(&a.methods, LossMethodSpec::parse)?;
    req.k_max = match a.kmax.as_str() {
        "full" => None,
        s => Some(s.parse().map_err(|_| Failure::Usage(format!("--kmax must be an integer or `full`, got {s:?}")))?),
    };
    req.repetitions = a.output.reps;
    let rows = report::loss_curve(&req)?;
    let out = a.output.out.as_deref();
    match format {
        OutputFormat::Csv => write_text(out, &report::loss_csv(&rows)),
        OutputFormat::Json => write_text(out, &report::loss_json(&rows)),
        OutputFormat::Gnuplot => write_gnuplot(out.expect("checked"), &report::loss_csv(&rows), |name| {
            report::loss_gnuplot(&rows, name)
        }),
    }
}

fn dephasing_curve(a: DephasingArgs) -> Result<(), Failure> {
    let format = format_of(&a.output)?;
    let family = report::parse_family(&a.family)?;
    let (order, spread) = match (a.beta_delta, a.gamma_delta) {
        (Some(b), None) => (NoiseOrder::Linear, b),
        (None, Some(g)) => (NoiseOrder::SecondOrder, g),
        _ => return Err(Failure::Usage("give exactly one of --beta-delta or --gamma-delta".into())),
    };
    let grid = Grid::for_family(family, a.grid.n_min, a.grid.n_max, a.grid.n_steps)?;
    let mut req = DephasingCurveRequest::new(family, order, spread, grid);
    req.n_env = a.n_env;
    req.methods = report::parse_methods(&a.methods, DephasingMethod::parse)?;
    req.repetitions = a.output.reps;
    let rows = report::dephasing_curve(&req)?;
    let out = a.output.out.as_deref();
    match format {
        OutputFormat::Csv => write_text(out, &report::dephasing_csv(&rows)),
        OutputFormat::Json => write_text(out, &report::dephasing_json(&rows)),
        OutputFormat::Gnuplot => write_gnuplot(out.expect("checked"), &report::dephasing_csv(&rows), |name| {
            report::dephasing_gnuplot(&rows, name)
        }),
    }
}

fn summary_table(a: SummaryArgs) -> Result<(), Failure> {
    let text = report::summary_table(&SummaryParams {
        eta: a.eta,
        beta: a.beta_delta,
        gamma: a.gamma_delta,
        n_mean: a.n,
        n_env: a.n_env,
    })?;
    write_text(a.out.as_deref(), &text)
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let suite = Suite::from_tag(&a.suite)?;
    let hooks = match a.inject_fault.as_deref() {
        None => Hooks::default(),
        Some("appendix") => Hooks {
            fmin_general: lossbounds::fmin_analytic_general_mutant,
        },
        Some(other) => return Err(Failure::Usage(format!("unknown fault {other:?}"))),
    };
    let outcomes = verify::run(suite, &hooks);
    let mut failed = 0;
    for o in &outcomes {
        println!("{o}");
        failed += usize::from(!o.passed);
    }
    println!("{} checks, {failed} failed", outcomes.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
