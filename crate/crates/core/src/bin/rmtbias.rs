use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rmtbias::config::{ExperimentConfig, OutputFormat};
use rmtbias::contour::SpectralFn;
use rmtbias::experiment::{self, BiasSelection, Figure, Report, Status, Table};
use rmtbias::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_PARTIAL: u8 = 4;

#[derive(Parser)]
#[command(name = "rmtbias", version, about = "Bias and modified CLT for MIMO mutual information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Spectral point as "a+bi"; defaults to −σ².
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Fixed damping in (0, 1]; automatic when absent.
    #[arg(long)]
    damping: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write here instead of the configured path or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the fixed point at z.
    Solve(Common),
    /// Dump every scalar deterministic quantity at z.
    Quantities(Common),
    /// Resolvent-trace bias at z.
    Bias {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "both")]
        method: String,
        /// Finite-difference step; defaults to 1e-4·|z|.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Mean of a linear spectral statistic by contour integration.
    Lss {
        #[command(flatten)]
        common: Common,
        /// "mi" or "poly:c0,c1,...".
        #[arg(long, default_value = "mi")]
        f: String,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Modified CLT statistics of the mutual information.
    Clt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        bits: bool,
    },
    /// Outage probability at the configured rate or an R sweep.
    Outage {
        #[command(flatten)]
        common: Common,
        /// Rate thresholds in nats.
        #[arg(long, value_delimiter = ',')]
        rate: Vec<f64>,
    },
    /// Monte-Carlo summary of the mutual information.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<u64>,
        /// Write one MI sample per line.
        #[arg(long)]
        dump_samples: Option<PathBuf>,
    },
    /// Run the pipeline behind a figure.
    Reproduce {
        #[command(flatten)]
        common: Common,
        /// bias_vs_N, clt_pdf, cdf_comparison, outage_vs_snr or cv_vs_variance.
        figure: String,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Check a configuration.
    Validate(Common),
}

enum Failure {
    Error(Error),
    Partial,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

struct Run {
    cfg: ExperimentConfig,
    out: Option<PathBuf>,
    format: OutputFormat,
}

fn load(common: &Common) -> Result<Run, Error> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(z) = &common.z {
        rmtbias::config::parse_complex(z)?;
        cfg.z = Some(z.clone());
    }
    if let Some(t) = common.tol {
        cfg.solver.tol = t;
    }
    if let Some(m) = common.max_iter {
        cfg.solver.max_iter = m;
    }
    if common.damping.is_some() {
        cfg.solver.damping = common.damping;
    }
    cfg.solver.validate()?;
    if let Some(s) = common.seed {
        cfg.mc.seed = s;
    }
    let format = match common.format.as_deref() {
        Some("json") => OutputFormat::Json,
        Some(_) => OutputFormat::Csv,
        None => cfg.output.format,
    };
    let out = common.out.clone().or_else(|| cfg.output.path.clone());
    Ok(Run { cfg, out, format })
}

fn workers() -> Result<Option<usize>, Error> {
    match std::env::var("RMTBIAS_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("RMTBIAS_THREADS={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn emit(run: &Run, table: &Table) -> Result<(), Error> {
    let text = table.render(run.format);
    match &run.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn emit_report(run: &Run, report: Report) -> Result<(), Failure> {
    match report.error {
        None => Ok(emit(run, &report.table)?),
        Some(e) if report.table.rows.is_empty() => Err(Failure::Error(e)),
        Some(e) => {
            emit(run, &report.table)?;
            eprintln!("error: {e}");
            Err(Failure::Partial)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Solve(c) => {
            let run = load(&c)?;
            emit(&run, &experiment::solve_report(&run.cfg)?)?;
        }
        Command::Quantities(c) => {
            let run = load(&c)?;
            emit(&run, &experiment::quantities_report(&run.cfg)?)?;
        }
        Command::Bias { common, method, step } => {
            let run = load(&common)?;
            let method: BiasSelection = method.parse()?;
            emit(&run, &experiment::bias_report(&run.cfg, method, step)?)?;
        }
        Command::Lss { common, f, nodes, margin } => {
            let run = load(&common)?;
            let f = SpectralFn::parse(&f, run.cfg.sigma2)?;
            emit(&run, &experiment::lss_report(&run.cfg, &f, nodes, margin)?)?;
        }
        Command::Clt { common, bits } => {
            let run = load(&common)?;
            emit(&run, &experiment::clt_report(&run.cfg, bits)?)?;
        }
        Command::Outage { common, rate } => {
            let run = load(&common)?;
            let rates = if !rate.is_empty() {
                rate
            } else if let Some(s) = run.cfg.sweep.as_ref().filter(|s| s.variable == rmtbias::config::SweepVariable::R) {
                s.values.clone()
            } else if let Some(r) = run.cfg.rate {
                vec![r]
            } else {
                return Err(Error::Config("no rate given: use --rate, `rate` or an R sweep".into()).into());
            };
            emit(&run, &experiment::outage_report(&run.cfg, &rates)?)?;
        }
        Command::Mc { common, trials, dump_samples } => {
            let mut run = load(&common)?;
            if let Some(t) = trials {
                run.cfg.mc.trials = t;
            }
            let (table, samples) = experiment::mc_report(&run.cfg, workers()?)?;
            emit(&run, &table)?;
            if let Some(path) = dump_samples {
                let text: String = samples.iter().map(|x| format!("{x}\n")).collect();
                write_file(&path, &text)?;
            }
        }
        Command::Reproduce { common, figure, trials } => {
            let mut run = load(&common)?;
            if let Some(t) = trials {
                run.cfg.mc.trials = t;
            }
            let figure: Figure = figure.parse()?;
            let report = experiment::reproduce(figure, &run.cfg, workers()?)?;
            emit_report(&run, report)?;
        }
        Command::Validate(c) => {
            let run = load(&c)?;
            let diags = experiment::validate(&run.cfg);
            emit(&run, &experiment::diagnostics_table(&diags))?;
            if diags.iter().any(|d| d.status == Status::Fail) {
                return Err(Error::Config("configuration failed validation".into()).into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial) => ExitCode::from(EXIT_PARTIAL),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_NUMERIC })
        }
    }
}
