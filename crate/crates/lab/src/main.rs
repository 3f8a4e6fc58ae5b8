use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use equilibria_lab::{run, ConfigError, ExperimentConfig, Pipeline};

/// Infinite-time moments, concentration and recurrences of quenched quantum
/// systems.
///
/// Exit status: 0 on success, 1 if a rigorous bound is violated, 2 on a
/// configuration or input error.
#[derive(Parser)]
#[command(name = "equilibria", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// JSON configuration; built-in defaults are used without one.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory [default: results/<pipeline>].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Root seed, overriding the configuration.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,

    /// Recurrence closeness radius.
    #[arg(long, global = true)]
    u: Option<f64>,

    /// Recurrence minimum duration.
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Recurrence grid step.
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Recurrence scan horizon.
    #[arg(long, global = true)]
    tmax: Option<f64>,

    /// Print the configuration schema and exit.
    #[arg(long)]
    print_schema: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Diagonalize a Hamiltonian and write its spectrum.
    Model,
    /// Diagonal ensemble and short-time series of one quench.
    Quench,
    /// Exact and sampled moments against their bounds.
    Moments,
    /// Check a spectrum for coinciding sums of levels.
    Genericity,
    /// Empirical tail probabilities against the exponential bound.
    Tails,
    /// Scan for recurrences and compare their spacing to the lower bound.
    Recur,
    /// Free-fermion correlators and propagators.
    Fermion,
    /// Distributions of <A(t)> at growing horizons.
    Fig1,
    /// Purity of the diagonal ensemble against system size.
    Fig2,
    /// Moment and trace-power bounds over random setups.
    Bounds,
}

impl From<Command> for Pipeline {
    fn from(c: Command) -> Self {
        match c {
            Command::Model => Pipeline::Model,
            Command::Quench => Pipeline::Quench,
            Command::Moments => Pipeline::Moments,
            Command::Genericity => Pipeline::Genericity,
            Command::Tails => Pipeline::Tails,
            Command::Recur => Pipeline::Recur,
            Command::Fermion => Pipeline::Fermion,
            Command::Fig1 => Pipeline::Fig1,
            Command::Fig2 => Pipeline::Fig2,
            Command::Bounds => Pipeline::Bounds,
        }
    }
}

fn configure(cli: &Cli, pipeline: Pipeline) -> anyhow::Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::builtin(pipeline),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let r = &mut cfg.recurrence;
    r.u = cli.u.unwrap_or(r.u);
    r.delta = cli.delta.unwrap_or(r.delta);
    r.dt = cli.dt.or(r.dt);
    r.t_max = cli.tmax.unwrap_or(r.t_max);
    if let Some(f) = cfg.fermion.as_mut() {
        if let Some(r) = f.recurrence.as_mut() {
            r.u = cli.u.unwrap_or(r.u);
            r.delta = cli.delta.unwrap_or(r.delta);
            r.dt = cli.dt.or(r.dt);
            r.t_max = cli.tmax.unwrap_or(r.t_max);
        }
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("results").join(pipeline.name()));
    Ok((cfg, out))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if cli.print_schema {
        println!("{}", serde_json::to_string_pretty(&equilibria_lab::schema::schema()).expect("schema serializes"));
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(2);
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let pipeline = Pipeline::from(command);
    let result = configure(&cli, pipeline).and_then(|(cfg, out)| run(pipeline, &cfg, &out));
    match result {
        Ok(outcome) if outcome.violations > 0 => {
            log::error!("{} bound violations", outcome.violations);
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<ConfigError>().is_some() {
                eprintln!("{e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}
