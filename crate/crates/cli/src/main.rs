use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nonint_cli::{cmd_analyze, cmd_reproduce, cmd_vp, load_config, CliError};

const CONFIG_HELP: &str = "\
Configuration is one JSON document; unknown fields are rejected.
Defaults for absent fields:
  index_window  {\"min\": 1, \"max\": 1000}
  a_grid        {\"min\": 1, \"max\": 1e6, \"points\": 61, \"spacing\": \"log\"}
  k_grid        {\"min\": 1, \"max\": 1000, \"points\": 31, \"spacing\": \"log\"}
  m_max         1000
  mc            {\"seed\": 1592598561, \"samples\": 100000}
  tolerances    {\"quad_abs\": 1e-12, \"quad_rel\": 1e-10, \"invert_rel\": 1e-12}
  vp            {\"count\": 2, \"budget\": 10000000}
`family` has no default and is required by analyze and vp.

Exit codes: 0 ok, 1 internal, 2 config, 3 budget exhausted, 4 tolerance.";

#[derive(Parser)]
#[command(name = "nonint", version, about = "Nonintegrability diagnostics", after_help = CONFIG_HELP)]
struct Cli {
    /// Worker threads (default: number of processors).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides mc.seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate all criterion curves and write a JSON report.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// JSON report path.
        #[arg(long)]
        out: PathBuf,
        /// Optional curves CSV path.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Build breakpoints and φ; writes <out>, <stem>.phi.csv, <stem>.verify.json.
    Vp {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-run a worked example: example-2.1, example-2.2, counterexample, remark-4.3, all.
    Reproduce {
        which: String,
        /// Output directory; one subdirectory per experiment.
        #[arg(long)]
        out: PathBuf,
        /// Optional config supplying grids, window, MC and tolerances.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    match cli.command {
        Command::Analyze {
            config,
            out,
            curves,
        } => {
            let cfg = load_config(Some(&config), cli.seed)?;
            let report = cmd_analyze(&cfg, &out, curves.as_deref())?;
            for v in &report.verdicts {
                println!(
                    "{}: {:?}",
                    serde_json::to_value(v.criterion)
                        .unwrap_or_default()
                        .as_str()
                        .unwrap_or("?"),
                    v.status
                );
            }
        }
        Command::Vp { config, out } => {
            let cfg = load_config(Some(&config), cli.seed)?;
            let s = cmd_vp(&cfg, &out)?;
            println!("breakpoints: {:?}", s.breakpoints);
            println!(
                "verification passed; window inf sums {:?}",
                s.verification.inf_sums
            );
        }
        Command::Reproduce { which, out, config } => {
            let cfg = load_config(config.as_deref(), cli.seed)?;
            for r in cmd_reproduce(&cfg, &which, &out)? {
                println!("{}: pass ({} checks)", r.name, r.checks.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nonint: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
