mod commands;
mod formats;
mod selftest;
mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use table::Format;

#[derive(Debug, Parser)]
#[command(name = "cascadix", version, about = "Grading, index and cascade bookkeeping for split Floer complexes")]
struct Cli {
    /// Output format for tables.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Bounds {
    /// Largest orbit multiplicity k.
    #[arg(long, default_value_t = 3)]
    kmax: u32,
    /// Coefficient bound for homology classes.
    #[arg(long, default_value_t = 3)]
    classbound: i64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a setup descriptor.
    Validate {
        #[arg(long)]
        setup: String,
    },
    /// Generators and their gradings.
    Grade {
        #[arg(long)]
        setup: String,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        /// Grade a single generator such as `m.check_2` or `x0`.
        #[arg(long)]
        generator: Option<String>,
    },
    /// Spectrum of an asymptotic operator in a window.
    Spectrum {
        /// The constant C of the vertical operator.
        #[arg(long = "C", conflicts_with = "rank")]
        c: Option<f64>,
        /// Use -i d/dt on C^rank instead.
        #[arg(long)]
        rank: Option<u32>,
        /// Window `min,max`.
        #[arg(long, allow_hyphen_values = true, default_value = "-7,7")]
        window: String,
        /// Also diagonalize a Fourier truncation with this cutoff.
        #[arg(long)]
        discretize: Option<u32>,
    },
    /// Fredholm index of a punctured Cauchy-Riemann problem.
    Index {
        /// Problem file; see docs/formats.md.
        #[arg(long, conflicts_with = "vertical")]
        file: Option<String>,
        /// Vertical cylinder shortcut: `ham,ham`, `reeb,ham`, ...
        #[arg(long)]
        vertical: Option<String>,
        /// Number of augmentation punctures for the shortcut.
        #[arg(long, default_value_t = 0)]
        augs: usize,
        /// Constant C at Hamiltonian ends for the shortcut.
        #[arg(long = "C", default_value_t = 5.0)]
        c: f64,
    },
    /// Dimension of a pearl or cascade moduli space.
    Dim {
        #[arg(long)]
        setup: String,
        #[arg(long)]
        spec: String,
    },
    /// Cascade types contributing to the differential.
    Enumerate {
        #[arg(long)]
        setup: String,
        #[arg(long, conflicts_with_all = ["all_targets", "evaluate"])]
        target: Option<String>,
        #[arg(long)]
        all_targets: bool,
        /// Evaluate one cascade configuration from a file instead.
        #[arg(long)]
        evaluate: Option<String>,
        #[command(flatten)]
        bounds: Bounds,
        /// Disable budget pruning.
        #[arg(long)]
        exhaustive: bool,
        /// Run the classification certificate as well.
        #[arg(long)]
        certify: bool,
    },
    /// Fibre-sum or quotient orientation.
    Orient {
        #[arg(long)]
        data: String,
    },
    /// Morse complex, the d^2 check and homology.
    Morse {
        #[arg(long)]
        data: String,
    },
    /// Combined document for a setup.
    Report {
        #[arg(long)]
        setup: String,
        #[command(flatten)]
        bounds: Bounds,
        /// `quadratic`, `power:<p>` or `expr:<h>;<h'>;<h''>`.
        #[arg(long, default_value = "quadratic")]
        profile: String,
    },
    /// Randomized property checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

pub enum CliError {
    Usage(String),
    Failure(String),
}

impl From<cascadix::Error> for CliError {
    fn from(e: cascadix::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("CASCADIX_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("CASCADIX_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn run(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    let f = cli.format;
    match cli.command {
        Command::Validate { setup } => commands::validate(&setup),
        Command::Grade { setup, kmax, generator } => commands::grade(&setup, kmax, generator.as_deref(), f),
        Command::Spectrum {
            c,
            rank,
            window,
            discretize,
        } => commands::spectrum(c, rank, &window, discretize, f),
        Command::Index { file, vertical, augs, c } => commands::index(file.as_deref(), vertical.as_deref(), augs, c, f),
        Command::Dim { setup, spec } => commands::dim(&setup, &spec, f),
        Command::Enumerate {
            setup,
            target,
            all_targets,
            evaluate,
            bounds,
            exhaustive,
            certify,
        } => commands::enumerate(commands::EnumerateArgs {
            setup: &setup,
            target: target.as_deref(),
            all_targets,
            evaluate: evaluate.as_deref(),
            k_max: bounds.kmax,
            class_bound: bounds.classbound,
            exhaustive,
            certify,
            format: f,
        }),
        Command::Orient { data } => commands::orient(&data, f),
        Command::Morse { data } => commands::morse(&data, f),
        Command::Report { setup, bounds, profile } => commands::report(&setup, bounds.kmax, bounds.classbound, &profile, f),
        Command::Selftest { seed, count } => commands::selftest(seed, count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
