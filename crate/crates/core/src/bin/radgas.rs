use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radgas::cli;

#[derive(Parser)]
#[command(name = "radgas", version, about = "Viscous radiative reactive gas in Lagrangian coordinates")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write diagnostics, snapshots and a checkpoint.
    Run {
        config: PathBuf,
        /// Debug: force this CFL number, even an unstable one.
        #[arg(long, value_name = "CFL")]
        unstable_cfl: Option<f64>,
    },
    /// Run the acceptance suite, optionally on the parameters and grid of a config.
    Verify { config: Option<PathBuf> },
    /// Refinement study: rerun a configuration on successively halved grids.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        levels: usize,
    },
    /// Continue a run from its checkpoint.
    Resume {
        checkpoint: PathBuf,
        #[arg(long = "t-end", value_name = "T")]
        t_end: f64,
    },
}

fn load(path: &Path) -> Result<radgas::Config, i32> {
    cli::load_config(path).map_err(|e| {
        eprintln!("radgas: error: {}: {e}", path.display());
        cli::exit_code(&e)
    })
}

fn dispatch(args: Args) -> i32 {
    let loaded = |p: &Path, f: &dyn Fn(radgas::Config) -> i32| load(p).map_or_else(|code| code, f);
    match args.command {
        Command::Run { config, unstable_cfl } => loaded(&config, &|mut cfg| {
            if let Some(cfl) = unstable_cfl {
                cfg.stepping.cfl = cfl;
                cfg.stepping.unchecked_cfl = true;
            }
            cli::cmd_run(&cfg)
        }),
        Command::Verify { config: None } => cli::cmd_verify(None),
        Command::Verify { config: Some(p) } => loaded(&p, &|cfg| cli::cmd_verify(Some(&cfg))),
        Command::Sweep { config, levels } => loaded(&config, &|cfg| cli::cmd_sweep(&cfg, levels)),
        Command::Resume { checkpoint, t_end } => cli::cmd_resume(&checkpoint, t_end),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    ExitCode::from(dispatch(args) as u8)
}
