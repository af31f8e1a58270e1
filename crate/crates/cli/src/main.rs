use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eqnn_cli::commands::{
    cmd_generate, cmd_plot, cmd_sweep, cmd_table1, cmd_train, cmd_verify, GenerateArgs, PlotArgs,
    PlotKind, Table1Args, VerifyArgs,
};
use eqnn_cli::config::{parse_seed_list, RunFile, SweepFile};
use eqnn_cli::{CliError, CliResult};
use eqnn_core::{DatasetKind, Stream};

/// Equivariant quantum and classical classifiers on Z2×Z2 toy datasets.
#[derive(Parser)]
#[command(name = "eqnn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a dataset and write it as `x1,x2,label` CSV.
    Generate {
        /// symmetric, anti-symmetric or fully-anti-symmetric.
        #[arg(long)]
        dataset: DatasetKind,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which of the seed's streams to draw: train or test.
        #[arg(long, default_value = "train")]
        stream: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model per seed from a TOML run file.
    Train {
        config: PathBuf,
        /// Overrides `output_dir` from the file.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Train a grid from a TOML sweep file; finished cells are reused.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// DNN accuracy grid on the fully anti-symmetric dataset.
    Table1 {
        #[arg(long, default_value = "table1.csv")]
        out: PathBuf,
        /// Seeds as `0,1,2` or `0..5`.
        #[arg(long, default_value = "0..5")]
        seeds: String,
        #[arg(long, default_value = "table1_cells")]
        cache_dir: PathBuf,
        /// Comma-separated parameter budgets (default: the full grid).
        #[arg(long, value_delimiter = ',')]
        budgets: Vec<usize>,
        /// Comma-separated training-set sizes (default: the full grid).
        #[arg(long, value_delimiter = ',')]
        train_sizes: Vec<usize>,
    },
    /// Render CSV outputs as an SVG line plot.
    Plot {
        /// roc, acc-epoch or auc-sweep.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        title: Option<String>,
        /// Series name per input (repeatable).
        #[arg(long = "label")]
        labels: Vec<String>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Run the symmetry, gradient and AUC self-checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        gradient_configs: usize,
        #[arg(long, default_value_t = 100)]
        auc_instances: usize,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate {
            dataset,
            n,
            seed,
            stream,
            out,
        } => {
            let stream = match stream.as_str() {
                "train" => Stream::Train,
                "test" => Stream::Test,
                other => return Err(CliError::Config(format!("unknown stream '{other}'"))),
            };
            println!(
                "{}",
                cmd_generate(&GenerateArgs {
                    dataset,
                    n,
                    seed,
                    stream,
                    out
                })?
            );
        }
        Command::Train { config, out_dir } => {
            let mut plan = RunFile::load(&config)?.into_plan()?;
            if let Some(d) = out_dir {
                plan.output_dir = d;
            }
            println!("{}", cmd_train(&plan)?.text);
        }
        Command::Sweep { config, out_dir } => {
            let mut spec = SweepFile::load(&config)?.into_spec()?;
            if let Some(d) = out_dir {
                spec.output_dir = d;
            }
            println!("{}", cmd_sweep(&spec)?.1);
        }
        Command::Table1 {
            out,
            seeds,
            cache_dir,
            budgets,
            train_sizes,
        } => {
            let mut args = Table1Args::full_grid(out, cache_dir, parse_seed_list(&seeds)?);
            if !budgets.is_empty() {
                args.budgets = budgets;
            }
            if !train_sizes.is_empty() {
                args.train_sizes = train_sizes;
            }
            print!("{}", cmd_table1(&args)?.1);
        }
        Command::Plot {
            kind,
            out,
            title,
            labels,
            inputs,
        } => {
            let kind: PlotKind = kind.parse()?;
            println!(
                "{}",
                cmd_plot(&PlotArgs {
                    kind,
                    inputs,
                    labels,
                    title,
                    out
                })?
            );
        }
        Command::Verify {
            seed,
            gradient_configs,
            auc_instances,
        } => {
            let args = VerifyArgs {
                seed,
                gradient_configs,
                auc_instances,
            };
            cmd_verify(&args, &mut |s| println!("{s}"))?;
        }
    }
    Ok(())
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
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
