use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

mod commands;
mod config;

use config::{ConfigError, DeltaSpec, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "thinsieve", version, about = "Sieve workbench for Pythagorean triple orbits on the cone x² + y² = z²")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in group: full-orbit or schottky-demo.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Node budget for orbit searches.
    #[arg(long, global = true)]
    budget_nodes: Option<usize>,
    /// Recorded in outputs; every pipeline is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MuArg {
    Derived,
    Printed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit points with ∥x∥ < T, as CSV.
    Orbit {
        #[arg(long)]
        radius: Option<f64>,
    },
    /// N(T) at several radii and the fitted growth exponent.
    Count {
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        /// Largest radius when --radii is absent (4 radii per decade from 10).
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Exact local densities g(q), optionally against brute-force oracles.
    LocalDensity {
        #[arg(long = "function")]
        function: Option<thinsieve::SievePolynomial>,
        /// `a..b` (inclusive, primes only) or a comma list of square-free moduli.
        #[arg(long, default_value = "3..50")]
        primes: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Primes where the orbit misses part of its spinor class.
    Ramified {
        #[arg(long)]
        p_max: Option<u64>,
    },
    /// First modulus dividing F on the whole orbit, if any.
    Primitivity {
        #[arg(long = "function")]
        function: Option<thinsieve::SievePolynomial>,
        #[arg(long, default_value_t = 100)]
        q_max: u64,
    },
    /// The 21-row R table.
    SieveTable {
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "derived")]
        mu: MuArg,
    },
    /// R for one (δ, θ, κ, mode).
    SieveR {
        /// A number or "fit".
        #[arg(long)]
        delta: Option<DeltaSpec>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        mode: Option<thinsieve::dhr::HorocycleMode>,
        #[arg(long = "function")]
        function: Option<thinsieve::SievePolynomial>,
        #[arg(long)]
        kappa: Option<u32>,
    },
    /// Smallest δ that reaches each R target.
    DeltaThreshold {
        #[arg(long = "r", value_delimiter = ',')]
        r: Option<Vec<u64>>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        mode: Option<thinsieve::dhr::HorocycleMode>,
        #[arg(long = "function")]
        function: Option<thinsieve::SievePolynomial>,
        #[arg(long)]
        kappa: Option<u32>,
    },
    /// Ω(F(x)) over the orbit and P(R) summaries.
    Census {
        #[arg(long = "function")]
        function: Option<thinsieve::SievePolynomial>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long = "r", value_delimiter = ',')]
        r: Option<Vec<u32>>,
    },
    /// Figure dataset (CSV, optional SVG) of the census categories.
    Figure {
        #[arg(long = "function")]
        function: Option<thinsieve::SievePolynomial>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(thinsieve::Error),
    Config(ConfigError),
    Usage(String),
}

impl From<thinsieve::Error> for CliError {
    fn from(e: thinsieve::Error) -> Self {
        Self::Core(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Core(e) | Self::Config(ConfigError::Group(e)) => {
                if e.is_validation() {
                    2
                } else {
                    3
                }
            }
            Self::Config(_) | Self::Usage(_) => 2,
        }
    }

    fn report(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Self::Core(e) | Self::Config(ConfigError::Group(e)) => (e.kind(), e.to_string()),
            Self::Config(e) => ("Config", e.to_string()),
            Self::Usage(m) => ("Usage", m.clone()),
        };
        json!({ "error": kind, "message": message, "exit_code": self.exit_code() })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("THINSIEVE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = commands::Context {
        out_dir: cli.out_dir.clone().or_else(|| cfg.outputs.dir.clone()),
        preset: cli.preset.clone(),
        budget: cli.budget_nodes,
        seed: cli.seed,
        cfg,
    };
    log::info!("running {:?}", cli.command);
    use Command::*;
    match cli.command {
        Orbit { radius } => commands::orbit(&ctx, radius),
        Count { radii, radius } => commands::count(&ctx, radii, radius),
        LocalDensity { function, primes, oracle } => commands::local_density(&ctx, function, &primes, oracle),
        Ramified { p_max } => commands::ramified(&ctx, p_max),
        Primitivity { function, q_max } => commands::primitivity(&ctx, function, q_max),
        SieveTable { json, mu } => commands::sieve_table(
            &ctx,
            json,
            match mu {
                MuArg::Derived => thinsieve::dhr::MuSource::Derived,
                MuArg::Printed => thinsieve::dhr::MuSource::Printed,
            },
        ),
        SieveR { delta, theta, mode, function, kappa } => commands::sieve_r(&ctx, delta, theta, mode, function, kappa),
        DeltaThreshold { r, theta, mode, function, kappa } => {
            commands::delta_threshold(&ctx, r, theta, mode, function, kappa)
        }
        Census { function, radius, r } => commands::census(&ctx, function, radius, r),
        Figure { function, radius, svg } => commands::figure(&ctx, function, radius, svg),
    }
}
