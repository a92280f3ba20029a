use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use skgeom::catalog::{self, PrepotentialSource};
use skgeom::config::{self, RunConfig, Suite};
use skgeom::scan::Sampling;
use skgeom::{report, suite, verify, Format};

/// Exit status when the run completed but an asserted check failed.
const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for usage, configuration and runtime errors.
const EXIT_ERROR: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "skgeom", version, about = "Verify special Kähler geometry of horizontal slices")]
struct Cli {
    /// Jet order of the prepotential expansion.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Seed for random sampling and random directions.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance for identity checks.
    #[arg(long, global = true)]
    tol_identity: Option<f64>,
    /// Tolerance for inequality checks.
    #[arg(long = "tol-ineq", global = true)]
    tol_inequality: Option<f64>,
    /// Directory for report files; without it the report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in prepotentials.
    List,
    /// Run every suite on a catalog entry with default sampling.
    Check {
        entry: String,
        /// Dimension of the slice.
        #[arg(long)]
        n: Option<usize>,
        /// Cubic coefficient of the `cubic` entry.
        #[arg(long)]
        c: Option<f64>,
        /// Number of random sample points.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Run the suites described by a JSON config file.
    Run { config: PathBuf },
    /// Evaluate max(1, ((c2 + c3)/c1)^(1/alpha)).
    Bound {
        c1: f64,
        c2: f64,
        c3: f64,
        alpha: f64,
    },
}

fn apply_overrides(cli: &Cli, config: &mut RunConfig) {
    if let Some(o) = cli.order {
        config.order = o;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(t) = cli.tol_identity {
        config.tolerances.identity = t;
    }
    if let Some(t) = cli.tol_inequality {
        config.tolerances.inequality = t;
    }
    if let Some(out) = &cli.out {
        config.output.dir = Some(out.clone());
    }
    if let Some(f) = cli.format {
        config.output.format = f.into();
    }
}

fn execute(mut config: RunConfig, cli: &Cli) -> Result<bool> {
    apply_overrides(cli, &mut config);
    config.validate()?;
    let report = suite::run_suite(&config)?;
    let format = config.output.format;
    match &config.output.dir {
        Some(dir) => {
            let paths = report::write_reports(&report, dir, format)
                .with_context(|| format!("writing reports to {}", dir.display()))?;
            print!("{}", report::summary_text(&report));
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        None => {
            print!("{}", report::render(&report, format)?);
            eprint!("{}", report::summary_text(&report));
        }
    }
    Ok(report.all_pass())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::List => {
            for (name, description) in catalog::catalog_listing() {
                println!("{name:<18} {description}");
            }
            Ok(true)
        }
        Command::Check { entry, n, c, count } => {
            let source = PrepotentialSource::Catalog {
                name: entry.clone(),
                n: *n,
                c: *c,
                extra: None,
            };
            let config = RunConfig {
                sampling: Sampling::Random {
                    count: *count,
                    radius: None,
                    seed: None,
                },
                suites: Suite::ALL.to_vec(),
                ..RunConfig::for_source(source)
            };
            execute(config, cli)
        }
        Command::Run { config: path } => execute(config::load_config(path)?, cli),
        Command::Bound { c1, c2, c3, alpha } => {
            println!("{}", verify::max_principle_bound(*c1, *c2, *c3, *alpha)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
