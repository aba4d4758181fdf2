use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use order_thresh::config::{SimulateConfig, Study};
use order_thresh::io;
use order_thresh::tables;

use order_thresh_core::calibration::CalibrationTable;
use order_thresh_core::hanova;
use order_thresh_core::single::{self, ObservationVector, TestOutcome};
use order_thresh_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "order-thresh",
    version,
    about = "Order-thresholding tests for sparse signals, HANOVA extensions, \
             and a deterministic Monte Carlo harness"
)]
struct Cli {
    /// Default RNG seed for simulations (env: ORDER_THRESH_SEED).
    #[arg(long, global = true, env = "ORDER_THRESH_SEED")]
    seed: Option<u64>,
    /// Worker-thread cap for Monte Carlo studies (default: all cores).
    /// Has no effect on output bytes.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatKind {
    Order,
    OrderChisq,
    Hard,
    Simes,
    Chisq,
    ExpOrder,
}

#[derive(Subcommand)]
enum Command {
    /// Print the calibration constants for one (n, k) as CSV.
    Calibrate {
        /// Sequence length.
        #[arg(long)]
        n: usize,
        /// Order threshold.
        #[arg(long)]
        k: usize,
        /// Write to a file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run one test on observations read from a file or stdin
    /// (one value per line); emits a single JSON record.
    Test {
        #[arg(long, value_enum)]
        stat: StatKind,
        /// Order threshold (order statistics) or k_opt (simes).
        #[arg(long)]
        k: Option<usize>,
        /// Hard threshold cutoff.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Estimate k from the data with the Storey rule.
        #[arg(long)]
        k_data_driven: bool,
        /// Input path; defaults to stdin ("-" also reads stdin).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run the HANOVA order-threshold test on CSV input
    /// (one group per row); emits a single JSON record.
    Hanova {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        k_data_driven: bool,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a Monte Carlo study described by a JSON config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regenerate a bundled reference table (table1..table11, fig1, fig2)
    /// next to a copy of its published values.
    Reproduce {
        /// Target name, e.g. table3.
        name: String,
        /// Override the table's default replicate count.
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for <name>.csv and <name>_published.csv.
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Run(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Run(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn default_threads() -> usize {
    thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = cli.threads.unwrap_or_else(default_threads).max(1);
    let seed = cli.seed.unwrap_or(17);
    match cli.command {
        Command::Calibrate { n, k, output } => {
            let table = CalibrationTable::new(n, k)?;
            let mut out = String::from("n,k,mu,sigma2\n");
            out.push_str(&format!(
                "{},{},{},{}\n",
                table.n(),
                table.k(),
                io::fmt6(table.mu()),
                io::fmt6(table.sigma2())
            ));
            out.push_str("i,nu_tilde,alpha\n");
            for (i, (nu, alpha)) in table.nu_tilde().iter().zip(table.alpha()).enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    i + 1,
                    io::fmt6(*nu),
                    io::fmt6(*alpha)
                ));
            }
            write_output(output.as_deref(), &out)
        }
        Command::Test {
            stat,
            k,
            delta,
            alpha,
            k_data_driven,
            input,
        } => {
            let values = io::read_values(input.as_deref()).map_err(CliError::Run)?;
            let record = run_single_test(stat, k, delta, alpha, k_data_driven, values)?;
            println!("{record}");
            Ok(())
        }
        Command::Hanova {
            k,
            k_data_driven,
            alpha,
            input,
        } => {
            let rows = io::read_csv_rows(input.as_deref()).map_err(CliError::Run)?;
            let g = hanova::summarize(&rows)?;
            let k_used = if k_data_driven {
                if k.is_some() {
                    return Err(CliError::Usage(
                        "--k and --k-data-driven are mutually exclusive".into(),
                    ));
                }
                hanova::hanova_storey_k(&g)?
            } else {
                k.ok_or_else(|| CliError::Usage("hanova needs --k or --k-data-driven".into()))?
            };
            let out = hanova::hanova_order_test(&g, k_used, alpha)?;
            println!(
                "{}",
                json!({
                    "f_stat": g.f_stat(),
                    "statistic": out.statistic,
                    "standardized": out.standardized,
                    "null_variance": out.null_variance,
                    "p_value": out.p_value.get(),
                    "reject": out.reject,
                    "k_used": out.k_used,
                })
            );
            Ok(())
        }
        Command::Simulate { config } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?;
            let parsed: SimulateConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?;
            let output = parsed.output.clone();
            let result = match parsed.into_study(threads).map_err(CliError::Usage)? {
                Study::Single(study) => study.run()?,
                Study::Hanova(study) => study.run()?,
            };
            let csv = io::study_csv(&result);
            let path = if output == "-" {
                None
            } else {
                Some(PathBuf::from(output))
            };
            write_output(path.as_deref(), &csv)
        }
        Command::Reproduce {
            name,
            replicates,
            seed: cmd_seed,
            output_dir,
        } => {
            let seed = cmd_seed.unwrap_or(seed);
            let rep =
                tables::reproduce(&name, replicates, seed, threads).map_err(CliError::Usage)?;
            fs::create_dir_all(&output_dir)
                .map_err(|e| CliError::Run(format!("{}: {e}", output_dir.display())))?;
            let ours = output_dir.join(format!("{name}.csv"));
            fs::write(&ours, rep.ours_csv)
                .map_err(|e| CliError::Run(format!("{}: {e}", ours.display())))?;
            println!("{}", ours.display());
            if let Some(published) = rep.published_csv {
                let path = output_dir.join(format!("{name}_published.csv"));
                fs::write(&path, published)
                    .map_err(|e| CliError::Run(format!("{}: {e}", path.display())))?;
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn write_output(path: Option<&std::path::Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, contents).map_err(|e| CliError::Run(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn outcome_json(out: &TestOutcome, k_used: Option<usize>) -> String {
    json!({
        "statistic": out.statistic,
        "standardized": out.standardized,
        "p_value": out.p_value.get(),
        "reject": out.reject,
        "k_used": k_used,
    })
    .to_string()
}

fn run_single_test(
    stat: StatKind,
    k: Option<usize>,
    delta: Option<f64>,
    alpha: f64,
    k_data_driven: bool,
    values: Vec<f64>,
) -> Result<String, CliError> {
    let need_k = |k: Option<usize>| {
        k.ok_or_else(|| CliError::Usage("this statistic needs --k or --k-data-driven".into()))
    };
    if k.is_some() && k_data_driven {
        return Err(CliError::Usage(
            "--k and --k-data-driven are mutually exclusive".into(),
        ));
    }
    match stat {
        StatKind::ExpOrder => {
            if k_data_driven {
                return Err(CliError::Usage(
                    "--k-data-driven does not apply to exp-order; pass --k".into(),
                ));
            }
            let k = need_k(k)?;
            let out = single::exp_order_threshold_test(&values, k, alpha)?;
            Ok(outcome_json(&out, Some(k)))
        }
        StatKind::Order | StatKind::OrderChisq => {
            let x = ObservationVector::new(values)?;
            let k_used = if k_data_driven {
                single::data_driven_k(&x)?
            } else {
                need_k(k)?
            };
            let out = if stat == StatKind::Order {
                single::order_threshold_test(&x, k_used, alpha)?
            } else {
                single::order_threshold_test_chisq(&x, k_used, alpha)?
            };
            Ok(outcome_json(&out, Some(k_used)))
        }
        StatKind::Hard => {
            let delta =
                delta.ok_or_else(|| CliError::Usage("hard thresholding needs --delta".into()))?;
            let x = ObservationVector::new(values)?;
            let out = single::hard_threshold_test(&x, delta, alpha)?;
            Ok(outcome_json(&out, None))
        }
        StatKind::Simes => {
            let x = ObservationVector::new(values)?;
            let pvalues = single::pvalues_from_normals(&x);
            let k_opt = if k_data_driven {
                Some(single::storey_k_hat(&pvalues)?)
            } else {
                k
            };
            let out = single::simes_test(&pvalues, alpha, k_opt)?;
            Ok(outcome_json(&out, k_opt))
        }
        StatKind::Chisq => {
            let x = ObservationVector::new(values)?;
            let out = single::chisq_omnibus_test(&x, alpha)?;
            Ok(outcome_json(&out, None))
        }
    }
}
