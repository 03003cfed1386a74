use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plumb_cli::report::AnalyzeOptions;
use plumb_cli::*;

#[derive(Parser)]
#[command(name = "plumb", version, about = "Invariants of plumbed 3-manifolds \
given by negative-definite weighted forests: H1, spin structures, mubar, \
Laufer rationality, correction terms d, and rational-ball obstructions.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a single plumb file and print the full report.
    Analyze {
        file: PathBuf,
        /// Emit the JSON report (schema: report.schema.json).
        #[arg(long)]
        json: bool,
        /// Include reduction, Laufer, and discharge traces.
        #[arg(long)]
        trace: bool,
        /// On non-rational graphs, emit formula values for d, labeled
        /// uncertified.
        #[arg(long = "uncertified-d")]
        uncertified_d: bool,
        /// Skip the per-class table above this many spin-c classes.
        #[arg(long, default_value_t = 4096)]
        class_cap: usize,
    },
    /// Generate rational graphs and machine-check mubar = -4d on each.
    Verify {
        /// Number of graphs to verify.
        #[arg(long)]
        random: usize,
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
        #[arg(long, default_value_t = -9, allow_hyphen_values = true)]
        weight_min: i64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Where to write a counterexample, should one appear.
        #[arg(long, default_value = ".")]
        report_dir: PathBuf,
    },
    /// Analyze every file (or directory of .plumb files) and aggregate.
    Batch {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 4096)]
        class_cap: usize,
    },
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    apply_iter_cap_env();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze {
            file,
            json,
            trace,
            uncertified_d,
            class_cap,
        } => {
            let opts = AnalyzeOptions {
                trace,
                uncertified_d,
                class_cap,
            };
            match analyze_path(&file, &opts) {
                Ok(report) => {
                    if json {
                        print!("{}", report_to_json(&report));
                    } else {
                        print!("{}", render::render_text(&report));
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("plumb: {}", e.message);
                    e.exit_code
                }
            }
        }
        Command::Verify {
            random,
            max_vertices,
            weight_min,
            seed,
            jobs,
            report_dir,
        } => {
            configure_jobs(jobs);
            let opts = VerifyOptions {
                random,
                max_vertices,
                weight_min,
                seed,
                report_dir,
            };
            match run_verify(&opts, |msg| eprintln!("plumb: {msg}")) {
                Ok(out) => {
                    print!("{}", out.stdout);
                    out.exit_code
                }
                Err(e) => {
                    eprintln!("plumb: {}", e.message);
                    e.exit_code
                }
            }
        }
        Command::Batch {
            paths,
            json,
            jobs,
            class_cap,
        } => {
            configure_jobs(jobs);
            let opts = BatchOptions { json, class_cap };
            match run_batch(&paths, &opts) {
                Ok(out) => {
                    print!("{}", out.stdout);
                    out.exit_code
                }
                Err(e) => {
                    eprintln!("plumb: {}", e.message);
                    e.exit_code
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
