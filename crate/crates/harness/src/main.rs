use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use decentral_harness::pep_sweep::{self, SweepSettings};
use decentral_harness::synth::{generate_text, SynthSpec};
use decentral_harness::{estimate, train, Config, HarnessError, Output};

#[derive(Parser)]
#[command(name = "decentral", version, about = "PEP sweeps and decentralized training runs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides `[run] seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Worst-case ratios or curves from the PEP.
    PepSweep(Common),
    /// Run the configured methods on a dataset.
    Train(Common),
    /// Exact and gradient-difference smoothness constants.
    EstimateL(Common),
    /// Write the sweep's SDPs in SDPA sparse format.
    ExportSdpa(Common),
    /// Regenerate the synthetic sparse dataset.
    #[command(hide = true)]
    GenerateSynthetic {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 8)]
        seed: u64,
    },
}

enum Failure {
    Partial(usize),
    Fatal(HarnessError),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Fatal(e)
    }
}

fn setup(c: &Common) -> Result<(Config, Output), HarnessError> {
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::Config(format!("--threads: {e}")))?;
    }
    let cfg = Config::load(&c.config)?;
    let seed = match c.seed {
        Some(s) => s,
        None => cfg.number_or("run", "seed", 0.0)? as u64,
    };
    let out = Output::new(Some(&c.out), &cfg, seed)?;
    Ok((cfg, out))
}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::PepSweep(c) => {
            let (cfg, out) = setup(&c)?;
            let report = pep_sweep::run(&SweepSettings::from_config(&cfg)?, &out)?;
            match report.failures() {
                0 => Ok(()),
                n => Err(Failure::Partial(n)),
            }
        }
        Cmd::Train(c) => {
            let (cfg, out) = setup(&c)?;
            train::run_train(&cfg, &out)?;
            Ok(())
        }
        Cmd::EstimateL(c) => {
            let (cfg, out) = setup(&c)?;
            estimate::run_estimate(&cfg, &out)?;
            Ok(())
        }
        Cmd::ExportSdpa(c) => {
            let (cfg, out) = setup(&c)?;
            pep_sweep::export(&SweepSettings::from_config(&cfg)?, &out)?;
            Ok(())
        }
        Cmd::GenerateSynthetic { out, seed } => {
            let text = generate_text(&SynthSpec { seed, ..SynthSpec::default() });
            std::fs::write(&out, text).map_err(HarnessError::io(&out))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(n)) => {
            eprintln!("decentral: {n} sweep point(s) failed, see the status columns");
            ExitCode::from(2)
        }
        Err(Failure::Fatal(e)) => {
            eprintln!("decentral: {e}");
            ExitCode::from(1)
        }
    }
}
