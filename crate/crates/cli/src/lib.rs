//! Library entry points behind the `plumb` binary: analyze one graph, run
//! corpus verification, and batch over files. Kept callable in-process so
//! the test suites can exercise the exact code paths the binary runs.

pub mod render;
pub mod report;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use plumb_core::*;
use std::result::Result;
use report::{build_report, AnalysisRefusal, AnalysisReport, AnalyzeOptions};

/// Exit codes: 0 success, 1 verification failure, 2 input error,
/// 3 precondition refusal.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug)]
pub struct CliFailure {
    pub exit_code: i32,
    pub message: String,
}

impl CliFailure {
    fn input(message: String) -> Self {
        CliFailure {
            exit_code: EXIT_INPUT,
            message,
        }
    }

    fn precondition(message: String) -> Self {
        CliFailure {
            exit_code: EXIT_PRECONDITION,
            message,
        }
    }
}

pub fn analyze_path(path: &Path, opts: &AnalyzeOptions) -> Result<AnalysisReport, CliFailure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliFailure::input(format!("{}: {e}", path.display())))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    analyze_source(&text, &name, opts)
}

pub fn analyze_source(
    text: &str,
    input_name: &str,
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, CliFailure> {
    let graph = PlumbingGraph::parse(text)
        .map_err(|e| CliFailure::input(format!("{input_name}: {e}")))?;
    build_report(&graph, input_name, opts).map_err(|e| match e {
        AnalysisRefusal::Precondition(msg) => {
            CliFailure::precondition(format!("{input_name}: {msg}"))
        }
        AnalysisRefusal::Input(msg) => CliFailure::input(format!("{input_name}: {msg}")),
    })
}

pub fn report_to_json(report: &AnalysisReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("reports serialize");
    out.push('\n');
    out
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub random: usize,
    pub max_vertices: usize,
    pub weight_min: i64,
    pub seed: u64,
    pub report_dir: PathBuf,
}

pub struct VerifyOutcome {
    pub stdout: String,
    pub exit_code: i32,
    pub counterexample_path: Option<PathBuf>,
}

/// Generate `random` rational graphs and check mubar = -4d on each, both d
/// methods. The stdout summary is byte-stable for fixed flags; progress
/// goes to the diagnostics sink.
pub fn run_verify(
    opts: &VerifyOptions,
    mut diag: impl FnMut(String),
) -> Result<VerifyOutcome, CliFailure> {
    let mut stdout = format!(
        "plumb verify: random={} max-vertices={} weight-min={} seed={}\n",
        opts.random, opts.max_vertices, opts.weight_min, opts.seed
    );
    if opts.random == 0 {
        stdout.push_str("0/0 verified\n");
        return Ok(VerifyOutcome {
            stdout,
            exit_code: EXIT_OK,
            counterexample_path: None,
        });
    }
    let params = GeneratorParams {
        max_vertices: opts.max_vertices,
        weight_min: opts.weight_min,
        seed: opts.seed,
        count: opts.random,
        require_rational: true,
    };
    let mut stream =
        generate_candidates(&params).map_err(|e| CliFailure::input(e.to_string()))?;
    let mut graphs = Vec::with_capacity(opts.random);
    while graphs.len() < opts.random {
        match stream.next() {
            Some(g) => {
                graphs.push(g);
                if graphs.len() % 50 == 0 {
                    diag(format!(
                        "generated {}/{} graphs ({} draws)",
                        graphs.len(),
                        opts.random,
                        stream.attempts()
                    ));
                }
            }
            None => break,
        }
    }
    let results: Vec<(usize, Result<TheoremReport, Error>)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| (i, verify_theorem(g)))
        .collect();
    let mut verified = 0usize;
    let mut first_failure: Option<(usize, String)> = None;
    for (i, res) in &results {
        match res {
            Ok(rep) if rep.pass => verified += 1,
            Ok(_) => {
                if first_failure.is_none() {
                    first_failure = Some((*i, "identity failed".to_string()));
                }
            }
            Err(e) => {
                if first_failure.is_none() {
                    first_failure = Some((*i, e.to_string()));
                }
            }
        }
    }
    match first_failure {
        None => {
            stdout.push_str(&format!("{verified}/{} verified\n", graphs.len()));
            Ok(VerifyOutcome {
                stdout,
                exit_code: EXIT_OK,
                counterexample_path: None,
            })
        }
        Some((index, why)) => {
            let path = opts
                .report_dir
                .join(format!("plumb-counterexample-{index}.plumb"));
            std::fs::write(&path, graphs[index].to_plumb())
                .map_err(|e| CliFailure::input(format!("{}: {e}", path.display())))?;
            stdout.push_str(&format!(
                "{verified}/{} verified\nFAIL graph #{index}: {why}\ncounterexample written to {}\n",
                graphs.len(),
                path.display()
            ));
            Ok(VerifyOutcome {
                stdout,
                exit_code: EXIT_VERIFY_FAIL,
                counterexample_path: Some(path),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub json: bool,
    pub class_cap: usize,
}

pub struct BatchOutcome {
    pub stdout: String,
    pub exit_code: i32,
}

/// Expand directory arguments to their .plumb files, sorted by name.
pub fn collect_batch_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliFailure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliFailure::input(format!("{}: {e}", p.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|f| f.extension().map(|x| x == "plumb").unwrap_or(false))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

pub fn run_batch(paths: &[PathBuf], opts: &BatchOptions) -> Result<BatchOutcome, CliFailure> {
    let files = collect_batch_inputs(paths)?;
    let analyze_opts = AnalyzeOptions {
        trace: false,
        uncertified_d: false,
        class_cap: opts.class_cap,
    };
    let results: Vec<(PathBuf, Result<AnalysisReport, CliFailure>)> = files
        .par_iter()
        .map(|f| (f.clone(), analyze_path(f, &analyze_opts)))
        .collect();
    let ok = results.iter().filter(|(_, r)| r.is_ok()).count();
    let failed = results.len() - ok;
    let mut stdout = String::new();
    if opts.json {
        let entries: Vec<serde_json::Value> = results
            .iter()
            .map(|(f, r)| match r {
                Ok(rep) => serde_json::json!({
                    "input": f.display().to_string(),
                    "report": serde_json::to_value(rep).expect("reports serialize"),
                    "error": null,
                }),
                Err(e) => serde_json::json!({
                    "input": f.display().to_string(),
                    "report": null,
                    "error": e.message,
                }),
            })
            .collect();
        let doc = serde_json::json!({
            "results": entries,
            "aggregate": {"ok": ok, "failed": failed},
        });
        stdout.push_str(&serde_json::to_string_pretty(&doc).expect("batch serializes"));
        stdout.push('\n');
    } else {
        for (f, r) in &results {
            match r {
                Ok(rep) => {
                    let verdict = &rep.rationality.verdict;
                    stdout.push_str(&format!(
                        "{}: ok ({} spin, {}, theorem {})\n",
                        f.display(),
                        rep.spin_structures.count,
                        verdict,
                        rep.theorem_check
                    ));
                }
                Err(e) => {
                    stdout.push_str(&format!("{}: error: {}\n", f.display(), e.message));
                }
            }
        }
        stdout.push_str(&format!("{ok} ok, {failed} failed\n"));
    }
    Ok(BatchOutcome {
        stdout,
        exit_code: if failed > 0 { EXIT_VERIFY_FAIL } else { EXIT_OK },
    })
}

/// Apply the PLUMB_ITER_CAP override when present and well-formed.
pub fn apply_iter_cap_env() {
    if let Ok(v) = std::env::var("PLUMB_ITER_CAP") {
        if let Ok(cap) = v.parse::<u64>() {
            plumb_core::rationality::set_iter_cap(cap);
        }
    }
}
