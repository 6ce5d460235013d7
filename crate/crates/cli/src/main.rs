use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levyfp_cli::{load, run, sweep, CliError};

#[derive(Parser)]
#[command(name = "levyfp", version, about = "Run Lévy Fokker-Planck experiments from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in the config.
    Run(Common),
    /// Run the cross product of the sweep axes.
    Sweep(Common),
    /// Parse and validate only.
    Validate {
        config: PathBuf,
        /// Validate the sweep cells instead of the single experiment.
        #[arg(long)]
        sweep: bool,
    },
}

#[derive(Args)]
struct Common {
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn setup(c: &Common) -> Result<(levyfp_cli::ExperimentConfig, PathBuf), CliError> {
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?;
    }
    let mut cfg = load(&c.config)?;
    if let Some(out) = &c.out {
        cfg.output.dir = out.display().to_string();
    }
    let out = PathBuf::from(&cfg.output.dir);
    Ok((cfg, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => setup(c).and_then(|(cfg, out)| {
            let o = run(&cfg, &out)?;
            println!("ok {} -> {}", o.config_hash, out.display());
            Ok(())
        }),
        Command::Sweep(c) => setup(c).and_then(|(cfg, out)| {
            let rows = sweep(&cfg, &out)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            println!("{} cells, {} failed -> {}", rows.len(), failed, out.join("sweep.csv").display());
            Ok(())
        }),
        Command::Validate { config, sweep } => load(config).and_then(|cfg| {
            if *sweep {
                cfg.validate_sweep()?;
            } else {
                cfg.validate()?;
            }
            println!("valid {}", cfg.hash());
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("levyfp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
