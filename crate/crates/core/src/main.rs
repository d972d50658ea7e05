use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mcflow::config::{LoadedConfig, RunConfig};
use mcflow::runner::{self, ExitStatus};

/// Mean-curvature-type flows of graphs over flat tori.
#[derive(Parser)]
#[command(name = "mcflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the convergence hypotheses; exit 0 iff all hold.
    Check(Common),
    /// Run the flow and write trace, field dumps and reports.
    ///
    /// Exit codes: 0 converged, 1 config error, 2 max time, 3 diverged,
    /// 4 monitor failure, 5 hypotheses fail.
    Run {
        #[command(flatten)]
        common: Common,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run even when the hypotheses fail.
        #[arg(long)]
        skip_check: bool,
    },
    /// Integrate the ODE of a totally geodesic slice.
    SliceOde {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run file.
    config: PathBuf,
    /// Override a key, e.g. `--set integrator.tol=1e-6`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<LoadedConfig, mcflow::Error> {
        Ok(RunConfig::load(&self.config, &self.overrides)?)
    }
}

fn out_dir(flag: Option<PathBuf>, loaded: &LoadedConfig) -> PathBuf {
    flag.or_else(|| loaded.config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("mcflow-out"))
}

fn execute(command: Command) -> Result<i32, mcflow::Error> {
    match command {
        Command::Check(common) => {
            let report = runner::check(&common.load()?)?;
            print!("{report}");
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Run {
            common,
            out,
            skip_check,
        } => {
            let loaded = common.load()?;
            let dir = out_dir(out, &loaded);
            let outcome = runner::run(&loaded, &dir, skip_check)?;
            print!("{}", runner::render_report(&outcome.summary));
            Ok(outcome.status().code())
        }
        Command::SliceOde { common, out } => {
            let loaded = common.load()?;
            let dir = out_dir(out, &loaded);
            let traj = runner::slice(&loaded, &dir)?;
            println!("final height: {}", traj.final_height());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ExitStatus::ConfigError.code() as u8 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::ConfigError.code() as u8)
        }
    }
}
