use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jcloss::cli::{
    compare_pair, run_compare, run_evolve, run_spectrum, run_steady, write_atomic, Config, Scenario,
};
use jcloss::verify::run_criteria;
use jcloss::{Error, Result};

#[derive(Parser)]
#[command(
    name = "jcloss",
    version,
    about = "Jaynes-Cummings model with a lossy cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time evolution of the configured observables.
    Evolve(Common),
    /// Runs two models on the same scenario and reports their difference.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Second configuration; must differ from the first only in `model`.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Stationary state and distances to the thermal states.
    Steady(Common),
    /// Eigenvalues of the generator.
    Spectrum(Common),
    /// Runs the acceptance criteria.
    Verify {
        #[arg(long, default_value_t = 1.0, hide = true)]
        tolerance_scale: f64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// `spectral` or `ode`.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
}

impl Common {
    fn config(&self) -> Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        self.apply(&mut c)?;
        Ok(c)
    }

    fn apply(&self, c: &mut Config) -> Result<()> {
        if let Some(v) = &self.model {
            c.set("model", v.as_str())?;
        }
        if let Some(v) = self.nmax {
            c.set("n_max", v.to_string())?;
        }
        if let Some(v) = self.tau_max {
            c.set("time.tau_max", v.to_string())?;
        }
        if let Some(v) = self.steps {
            c.set("time.steps", v.to_string())?;
        }
        if let Some(v) = &self.solver {
            c.set("solver", v.as_str())?;
        }
        if let Some(v) = self.dt {
            c.set("solver.dt", v.to_string())?;
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => write_atomic(p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Evolve(c) => c.emit(&run_evolve(&Scenario::from_config(&c.config()?)?)?)?,
        Command::Steady(c) => c.emit(&run_steady(&Scenario::from_config(&c.config()?)?)?)?,
        Command::Spectrum(c) => c.emit(&run_spectrum(&Scenario::from_config(&c.config()?)?)?)?,
        Command::Compare { common, against } => {
            let first = common.config()?;
            let second = match &against {
                Some(p) => {
                    let mut c = Config::load(p)?;
                    common.apply(&mut c)?;
                    if common.model.is_some() {
                        return Err(Error::Config(
                            "--model cannot be combined with --against".into(),
                        ));
                    }
                    Some(c)
                }
                None => None,
            };
            let (a, b) = compare_pair(&first, second.as_ref())?;
            let (csv, summary) = run_compare(&a, &b)?;
            common.emit(&csv)?;
            eprint!("{summary}");
        }
        Command::Verify { tolerance_scale } => {
            if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
                return Err(Error::Config("--tolerance-scale must be positive".into()));
            }
            let reports = run_criteria(tolerance_scale);
            for r in &reports {
                println!("{r}");
            }
            if let Some(failed) = reports.iter().find(|r| !r.passed) {
                eprintln!(
                    "verification failed: criterion {} ({})",
                    failed.id, failed.title
                );
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
