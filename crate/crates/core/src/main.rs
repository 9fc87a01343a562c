#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wdvf::bellman::Method;
use wdvf::ergodicity::{beta, ergodic_coefficient_m1};
use wdvf::generator::{random_mdp, GeneratorConfig};
use wdvf::harness::bench::{run_bench, BenchConfig};
use wdvf::harness::format::{read_mdp, trace_to_csv, write_mdp, write_text};
use wdvf::harness::report::{analyze_mixing, bounds_table, bounds_to_csv, solve, SolveOptions};
use wdvf::harness::{exit_code, HarnessError};

#[derive(Parser)]
#[command(name = "wdvf", version, about = "Weighted-difference value iteration for discounted MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random MDP with a certified ergodic coefficient.
    Generate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve one MDP and write its convergence trace.
    Solve {
        mdp: PathBuf,
        #[arg(long, default_value = "wdvf")]
        method: Method,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Reference state for the bias normalisation.
        #[arg(long, default_value_t = 0)]
        target: usize,
        /// Trace CSV; the result JSON goes beside it with a `.json` extension.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Monte Carlo comparison over generated instances.
    Bench {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Base seed; run `i` uses `seed + i`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, value_delimiter = ',', default_value = "vi,gs,wdvf")]
        method: Vec<Method>,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Worker threads (default: one per logical core).
        #[arg(long)]
        workers: Option<usize>,
        /// Summary JSON; `<stem>.runs.csv` and `<stem>.curve.csv` are written beside it.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Empirical mixing time and the average-reward deviation check.
    Mixing {
        mdp: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Search horizon (default: 10 ceil(1 / (epsilon (1 - beta)))).
        #[arg(long)]
        n_max: Option<usize>,
        /// Error target for the iteration predictor.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tabulate every error bound for `k = 0..=max-k`.
    Bounds {
        mdp: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_k: usize,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, default_value_t = 100)]
    states: usize,
    #[arg(long, default_value_t = 6)]
    actions: usize,
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    #[arg(long, default_value_t = 0.995)]
    discount: f64,
    #[arg(long, default_value_t = 1.0)]
    rmax: f64,
    /// Random successors per row; equal to `--states` for a full simplex row.
    #[arg(long, default_value_t = 1)]
    support: usize,
    /// State every row reaches with probability at least `rho`.
    #[arg(long, default_value_t = 0)]
    target: usize,
}

impl InstanceArgs {
    fn generator(&self, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            num_states: self.states,
            num_actions: self.actions,
            discount: self.discount,
            rho: self.rho,
            r_max: self.rmax,
            seed,
            target_state: self.target,
            support: self.support,
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report is serialisable");
    s.push('\n');
    s
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match output {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Generate { instance, seed, output } => {
            let mdp = random_mdp(&instance.generator(seed))?;
            write_mdp(&output, &mdp)?;
            let cert = ergodic_coefficient_m1(&mdp);
            println!("rho = {}", cert.rho);
            println!("y_hat = {}", cert.target_state);
            println!("beta = {}", beta(cert.rho, cert.m)?);
        }
        Command::Solve { mdp, method, tol, max_iter, target, output } => {
            if !(tol > 0.0) {
                return Err(wdvf::Error::InvalidArgument(format!("tolerance must be positive, got {tol}")).into());
            }
            let mdp = read_mdp(&mdp)?;
            let options = SolveOptions { method, tol, max_iter, reference_state: target };
            let (trace, result) = solve(&mdp, &options)?;
            write_text(&output, &trace_to_csv(&trace))?;
            write_text(&output.with_extension("json"), &json(&result))?;
            let status = if result.converged { "converged" } else { "did not converge" };
            println!("{method}: {status} after {} iterations", result.iterations);
        }
        Command::Bench { instance, seed, runs, method, tol, max_iter, workers, output } => {
            let g = instance.generator(seed);
            let config = BenchConfig {
                num_states: g.num_states,
                num_actions: g.num_actions,
                discount: g.discount,
                rho: g.rho,
                r_max: g.r_max,
                support: g.support,
                target_state: g.target_state,
                base_seed: seed,
                runs,
                tol,
                max_iter,
                methods: method,
            };
            let out = run_bench(&config, workers)?;
            write_text(&output, &out.summary.to_json())?;
            write_text(&sibling(&output, ".runs.csv"), &out.summary.runs_csv())?;
            write_text(&sibling(&output, ".curve.csv"), &out.curve_csv())?;
            for s in &out.summary.methods {
                println!(
                    "{:>5}: mean {:.1} sd {:.1} min {} max {} ({}/{} converged)",
                    s.method.as_str(),
                    s.mean,
                    s.std_dev,
                    s.min,
                    s.max,
                    s.converged_runs,
                    runs
                );
            }
        }
        Command::Mixing { mdp, epsilon, n_max, theta, target, output } => {
            let mdp = read_mdp(&mdp)?;
            let analysis = analyze_mixing(&mdp, epsilon, n_max, theta, target)?;
            emit(output.as_deref(), &json(&analysis))?;
        }
        Command::Bounds { mdp, max_k, target, output } => {
            let mdp = read_mdp(&mdp)?;
            let (profile, rows) = bounds_table(&mdp, max_k, target)?;
            eprintln!("rho = {}, beta = {}, C_d = {}", profile.rho, profile.beta, profile.c_d);
            emit(output.as_deref(), &bounds_to_csv(&rows))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit_code::USAGE as u8 } else { exit_code::SUCCESS as u8 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
