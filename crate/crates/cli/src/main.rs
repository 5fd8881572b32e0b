//! `ttkit` command line entry point.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use ttkit_cli::config::{read_config, BlindIdentConfig, SeparationConfig, SolverTaskConfig};
use ttkit_cli::{blind_exp, sinusoid_exp, tasks};

#[derive(Parser)]
#[command(name = "ttkit", about = "Tensor-train toolkit: TT file tooling and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and transform TT1F files.
    Tt {
        #[command(subcommand)]
        action: TtAction,
    },
    /// Damped-sinusoid separation experiment.
    SeparateSinusoids {
        #[arg(long)]
        config: PathBuf,
        /// Replaces the configured seed list with a single seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Blind identification of a 2×R mixing matrix.
    BlindIdentify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Linear system / ridge solve in TT format.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Extremal eigenpairs of a symmetric TT operator.
    Eig {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Tensor completion from sampled entries.
    Complete {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Multilinear regression fits.
    Regress {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TtAction {
    /// Print order, mode sizes, ranks and storage.
    Info {
        #[arg(long)]
        input: PathBuf,
    },
    /// Round a train and write the result.
    Round {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value_t = usize::MAX)]
        max_rank: usize,
    },
    /// Densify a train to CSV (one value per line, column-major).
    Contract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Compress a dense CSV vector into a TT1F train.
    Convert {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated mode sizes, e.g. 2,2,2.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> ttkit_cli::Result<i32> {
    match cli.command {
        Command::Tt { action } => match action {
            TtAction::Info { input } => {
                print!("{}", tasks::ttfile::info(&input)?);
                Ok(0)
            }
            TtAction::Round { input, output, tol, max_rank } => {
                tasks::ttfile::round(&input, &output, tol, max_rank)?;
                Ok(0)
            }
            TtAction::Contract { input, output } => {
                tasks::ttfile::contract(&input, &output)?;
                Ok(0)
            }
            TtAction::Convert { input, sizes, tol, output } => {
                let sizes: Vec<usize> = sizes
                    .split(',')
                    .map(|t| {
                        t.trim().parse::<usize>().map_err(|e| {
                            ttkit_cli::CliError::Config(format!("bad size {t:?}: {e}"))
                        })
                    })
                    .collect::<ttkit_cli::Result<_>>()?;
                tasks::ttfile::convert(&input, &sizes, tol, &output)?;
                Ok(0)
            }
        },
        Command::SeparateSinusoids { config, seed, out } => {
            let mut cfg: SeparationConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.seeds = vec![s];
            }
            std::fs::create_dir_all(&out)?;
            let (result, baseline) = sinusoid_exp::run(&cfg)?;
            sinusoid_exp::result_table(&result).write(&out.join("separation_sae.csv"))?;
            if let Some(b) = baseline {
                sinusoid_exp::result_table(&b).write(&out.join("separation_sae_folded.csv"))?;
            }
            println!("mean MSAE: {:.3} dB", result.mean_msae_db);
            Ok(0)
        }
        Command::BlindIdentify { config, seed, out } => {
            let mut cfg: BlindIdentConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.seeds = vec![s];
            }
            std::fs::create_dir_all(&out)?;
            let result = blind_exp::run(&cfg)?;
            blind_exp::result_table(&result).write(&out.join("blind_identify_msae.csv"))?;
            for (o, v) in result.orders.iter().zip(result.mean_msae_db.iter()) {
                println!("order {o}: mean MSAE {v:.3} dB");
            }
            Ok(0)
        }
        Command::Solve { config, seed, out } => run_task("solve", config, seed, out),
        Command::Eig { config, seed, out } => run_task("eig", config, seed, out),
        Command::Complete { config, seed, out } => run_task("complete", config, seed, out),
        Command::Regress { config, seed, out } => run_task("regress", config, seed, out),
    }
}

fn run_task(
    task: &str,
    config: PathBuf,
    seed: Option<u64>,
    out: PathBuf,
) -> ttkit_cli::Result<i32> {
    let mut cfg: SolverTaskConfig = read_config(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let outcome = tasks::run_task(task, &cfg, &out)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&outcome.report)
            .unwrap_or_else(|_| "<unserializable report>".into())
    );
    Ok(outcome.exit_code())
}
