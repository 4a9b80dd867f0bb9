use std::path::PathBuf;
use std::process::ExitCode;

use altquant::cli::{self, Command, ConfigError, RunConfig, System};
use altquant::io::TableSpec;
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, ValueEnum)]
enum Sub {
    OneLevel,
    Decompose,
    Invariance,
    Alternatives,
    KdeformVerify,
    Pictures,
    Recurrence,
    Foscillator,
    AltHamiltonian,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::OneLevel => Command::OneLevel,
            Sub::Decompose => Command::Decompose,
            Sub::Invariance => Command::Invariance,
            Sub::Alternatives => Command::Alternatives,
            Sub::KdeformVerify => Command::KdeformVerify,
            Sub::Pictures => Command::Pictures,
            Sub::Recurrence => Command::Recurrence,
            Sub::Foscillator => Command::Foscillator,
            Sub::AltHamiltonian => Command::AltHamiltonian,
        }
    }
}

/// Verify alternative Hamiltonian and Hermitean structures of linear quantum
/// dynamics.
#[derive(Parser)]
#[command(name = "altquant", version)]
struct Args {
    #[arg(value_enum)]
    command: Sub,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Comma-separated evaluation times.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    times: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    q0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// oscillator or matrix.
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    max_power: Option<u32>,
    /// Also transport along a basis of the commutant of A.
    #[arg(long)]
    commutant: bool,
    /// f table: identity, sinh, affine, or a JSON file.
    #[arg(long)]
    f: Option<String>,
    /// H~ table: identity, sinh, affine, or a JSON file.
    #[arg(long)]
    htilde: Option<String>,
}

fn config(args: &Args) -> Result<RunConfig, ConfigError> {
    let command = Command::from(args.command);
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(c) = cfg.command {
        if c != command {
            return Err(ConfigError(format!(
                "config is for \"{c}\" but the command is \"{command}\""
            )));
        }
    }
    cfg.command = Some(command);
    macro_rules! overlay {
        ($($field:ident),*) => {$(
            if let Some(v) = args.$field.clone() {
                cfg.$field = Some(v);
            }
        )*};
    }
    overlay!(seed, instances, modes, dim, omega, t, times, q0, p0, epsilon, lambda, max_power);
    if let Some(s) = &args.system {
        cfg.system = Some(s.parse::<System>()?);
    }
    if args.commutant {
        cfg.commutant = Some(true);
    }
    // flag tables resolve against the working directory
    let cwd_table = |s: &String| TableSpec::Text(s.clone());
    if let Some(f) = &args.f {
        cfg.f = Some(cwd_table(f));
    }
    if let Some(h) = &args.htilde {
        cfg.htilde = Some(cwd_table(h));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let report = match config(&args).and_then(|cfg| cli::run(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("altquant: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.to_text());
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("altquant: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
