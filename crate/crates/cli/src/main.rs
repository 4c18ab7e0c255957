use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_warp::modes::SpinStructure;
use dirac_warp_cli::commands::{cmd_charfn, cmd_eta, cmd_flow, cmd_heun, cmd_spectrum, cmd_wronskian, Outcome};
use dirac_warp_cli::config::{Format, Overrides, Preset, RunConfig};
use dirac_warp_cli::CliError;

#[derive(Parser)]
#[command(name = "dirac-warp", version, about = "Modewise Dirac spectra on a warped cylinder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the characteristic function of one mode.
    Charfn(Flags),
    /// Eigenvalues of each mode in a window.
    Spectrum(Flags),
    /// Crossings, spectral flow and tracked branches along a gauge path.
    Flow(Flags),
    /// Boundary eta and xi invariants and the index.
    Eta(Flags),
    /// Drift of the conserved Wronskian.
    Wronskian(Flags),
    /// Singular points and exponents of the scalar equation.
    Heun(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// TOML file with the same keys as the flags (underscored).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Cylinder length T.
    #[arg(long, allow_negative_numbers = true)]
    length: Option<f64>,
    #[arg(long, value_parser = parse_spin)]
    spin: Option<SpinStructure>,
    /// Constant gauge value A.
    #[arg(long, allow_negative_numbers = true)]
    gauge: Option<f64>,
    /// Built-in path (example1, example2, example3) or knot file.
    #[arg(long)]
    path: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda_max: Option<f64>,
    #[arg(long)]
    scan_points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    s_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    scale: Option<f64>,
    #[arg(long)]
    exclude_touching: bool,
    #[arg(long, allow_negative_numbers = true)]
    rel_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    abs_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    max_step: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_spin(s: &str) -> Result<SpinStructure, String> {
    match s {
        "periodic" => Ok(SpinStructure::Periodic),
        "anti-periodic" | "antiperiodic" => Ok(SpinStructure::AntiPeriodic),
        _ => Err(format!("unknown spin structure {s:?}; use periodic or anti-periodic")),
    }
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            preset: self.preset,
            alpha: self.alpha,
            length: self.length,
            spin: self.spin,
            gauge: self.gauge,
            path: self.path.clone(),
            delta: self.delta,
            k: self.k,
            k_min: self.k_min,
            k_max: self.k_max,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            scan_points: self.scan_points,
            s_step: self.s_step,
            lambda: self.lambda,
            scale: self.scale,
            exclude_touching: self.exclude_touching.then_some(true),
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            grid_points: self.grid_points,
            formats: self.format.clone(),
            out_dir: self.out.clone(),
        }
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = self.config.as_deref().map(Overrides::load).transpose()?;
        Ok(RunConfig::resolve(file.as_ref(), &self.overrides()))
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("DIRAC_WARP_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(vec![format!("DIRAC_WARP_THREADS must be a positive integer, got {v:?}")]))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(vec![e.to_string()]))?;
    }
    Ok(())
}

type Runner = fn(&RunConfig) -> Result<Outcome, CliError>;

fn run(cli: Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    let (flags, cmd): (&Flags, Runner) = match &cli.command {
        Command::Charfn(f) => (f, cmd_charfn),
        Command::Spectrum(f) => (f, cmd_spectrum),
        Command::Flow(f) => (f, cmd_flow),
        Command::Eta(f) => (f, cmd_eta),
        Command::Wronskian(f) => (f, cmd_wronskian),
        Command::Heun(f) => (f, cmd_heun),
    };
    cmd(&flags.resolve()?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => {
            println!("{}", o.report);
            for p in &o.written {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
