// negated comparisons are deliberate where NaN must fail validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `mrules`: first-order optimality certificates from the command line.
//!
//! Subcommands:
//!
//! * `check <file>` — full analysis; prints the certificate document and
//!   exits 0 (FJ/KKT), 3 (NOT_OPTIMAL), 4 (DEGENERATE), 1 (input error) or
//!   2 (numerical failure);
//! * `ascend <file>` — refuses FJ-stationary candidates, otherwise emits
//!   the non-optimality certificate;
//! * `diffcheck <file> [--function F]` — differentiability verdicts at the
//!   candidate;
//! * `corpus <dir>` — runs every problem in a directory against its
//!   `.expected` sidecar.
//!
//! `MRULES_SEED` fixes the seed of the randomized linearity audit;
//! `MRULES_TIMESTAMP`, when set, is embedded verbatim in certificates.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use mrules_core::certificate::CertificateDoc;
use mrules_core::pipeline::{
    ascend_problem, check_problem, diffcheck_problem, AscendOutcome, PipelineError, RunConfig,
};
use mrules_core::problem::{load_problem, Candidate, Problem};

const EXIT_INPUT: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mrules",
    version,
    about = "Certificates for first-order necessary optimality conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ToleranceArgs {
    /// Activity tolerance for the active-set decision (overrides the file)
    #[arg(long)]
    act_tol: Option<f64>,
    /// Stationarity residual tolerance
    #[arg(long)]
    stat_tol: Option<f64>,
    /// Base step of the derivative ladder
    #[arg(long)]
    diff_t0: Option<f64>,
    /// Richardson depth of the derivative ladder
    #[arg(long)]
    diff_depth: Option<usize>,
    /// Agreement tolerance of the derivative estimators
    #[arg(long)]
    diff_tol: Option<f64>,
    /// Equality residual tolerance for restored points
    #[arg(long)]
    restore_tol: Option<f64>,
    /// Fixed-point convergence tolerance
    #[arg(long)]
    fp_tol: Option<f64>,
    /// Damping factor of the fixed-point iteration, in (0, 1]
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a problem file and emit a multiplier or ascent certificate
    Check {
        file: PathBuf,
        /// Also write the certificate document to this path
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Produce an improving feasible point, or refuse if the candidate is
    /// FJ-stationary
    Ascend {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Report differentiability verdicts at the candidate
    Diffcheck {
        file: PathBuf,
        /// Function selector: objective|f0, g<k>/f<k>, h<k>, or a flat index
        #[arg(long)]
        function: Option<String>,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Run all problems in a directory against their .expected sidecars
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
}

fn run_config(tolerances: &ToleranceArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Ok(seed) = std::env::var("MRULES_SEED") {
        if let Ok(seed) = seed.trim().parse::<u64>() {
            cfg.engine.diff.seed = seed;
        }
    }
    cfg.generated_at = std::env::var("MRULES_TIMESTAMP").ok();
    let positive = |name: &str, v: f64| -> Result<f64, String> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(format!("--{} must be positive", name))
        }
    };
    if let Some(v) = tolerances.stat_tol {
        cfg.engine.stat_tol = positive("stat-tol", v)?;
    }
    if let Some(v) = tolerances.diff_t0 {
        cfg.engine.diff.base_step = positive("diff-t0", v)?;
    }
    if let Some(v) = tolerances.diff_depth {
        if v < 2 {
            return Err("--diff-depth must be at least 2".into());
        }
        cfg.engine.diff.depth = v;
    }
    if let Some(v) = tolerances.diff_tol {
        cfg.engine.diff.tol = positive("diff-tol", v)?;
    }
    if let Some(v) = tolerances.restore_tol {
        cfg.restore.restore_tol = positive("restore-tol", v)?;
    }
    if let Some(v) = tolerances.fp_tol {
        cfg.restore.fp_tol = positive("fp-tol", v)?;
    }
    if let Some(v) = tolerances.damping {
        if !(v > 0.0 && v <= 1.0) {
            return Err("--damping must be in (0, 1]".into());
        }
        cfg.restore.damping = v;
    }
    Ok(cfg)
}

fn run_config_or_exit(tolerances: &ToleranceArgs) -> Result<RunConfig, ExitCode> {
    run_config(tolerances).map_err(|message| {
        eprintln!("error: {}", message);
        ExitCode::from(EXIT_INPUT)
    })
}

fn load_input(file: &Path, tolerances: &ToleranceArgs) -> Result<(Problem, Candidate), ExitCode> {
    match load_problem(file) {
        Ok((problem, mut candidate)) => {
            if let Some(tol) = tolerances.act_tol {
                if !(tol > 0.0) {
                    eprintln!("error: --act-tol must be positive");
                    return Err(ExitCode::from(EXIT_INPUT));
                }
                candidate.act_tol = tol;
            }
            Ok((problem, candidate))
        }
        Err(e) => {
            eprintln!("error: {}: {}", file.display(), e);
            Err(ExitCode::from(EXIT_INPUT))
        }
    }
}

fn pipeline_exit(err: &PipelineError) -> ExitCode {
    match err {
        PipelineError::Input(_) => ExitCode::from(EXIT_INPUT),
        PipelineError::Hypothesis(_) | PipelineError::Numerical(_) => {
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

fn emit_certificate(doc: &CertificateDoc, out: Option<&Path>) -> Result<(), ExitCode> {
    let json = doc.to_json();
    print!("{}", json);
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return Err(ExitCode::from(EXIT_INPUT));
        }
    }
    Ok(())
}

fn cmd_check(file: &Path, out: Option<&Path>, tolerances: &ToleranceArgs) -> ExitCode {
    let (problem, candidate) = match load_input(file, tolerances) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cfg = match run_config_or_exit(tolerances) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    match check_problem(&problem, &candidate, &cfg) {
        Ok(doc) => {
            if let Err(code) = emit_certificate(&doc, out) {
                return code;
            }
            ExitCode::from(doc.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            pipeline_exit(&e)
        }
    }
}

fn cmd_ascend(file: &Path, out: Option<&Path>, tolerances: &ToleranceArgs) -> ExitCode {
    let (problem, candidate) = match load_input(file, tolerances) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cfg = match run_config_or_exit(tolerances) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    match ascend_problem(&problem, &candidate, &cfg) {
        Ok(AscendOutcome::Stationary(doc)) => {
            println!(
                "candidate is FJ-stationary (verdict {}); no ascent certificate",
                doc.verdict.name()
            );
            ExitCode::SUCCESS
        }
        Ok(AscendOutcome::Improved(doc)) => {
            if let Err(code) = emit_certificate(&doc, out) {
                return code;
            }
            ExitCode::from(doc.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            pipeline_exit(&e)
        }
    }
}

fn cmd_diffcheck(file: &Path, function: Option<&str>, tolerances: &ToleranceArgs) -> ExitCode {
    let (problem, candidate) = match load_input(file, tolerances) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cfg = match run_config_or_exit(tolerances) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    match diffcheck_problem(&problem, &candidate, function, &cfg) {
        Ok(reports) => {
            let mut json = serde_json::to_string_pretty(&reports).expect("reports serialize");
            json.push('\n');
            print!("{}", json);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e);
            pipeline_exit(&e)
        }
    }
}

/// Sidecar format: expected verdict plus optional multiplier vectors, which
/// are compared entrywise within 1e-6 against the emitted certificate.
#[derive(Debug, Deserialize)]
struct ExpectedCertificate {
    verdict: String,
    #[serde(default)]
    lambda: Option<Vec<f64>>,
    #[serde(default)]
    mu: Option<Vec<f64>>,
}

const CORPUS_MULTIPLIER_TOL: f64 = 1e-6;

fn compare_vectors(label: &str, expected: &[f64], got: &[f64]) -> Result<(), String> {
    if expected.len() != got.len() {
        return Err(format!(
            "{}: expected {} entries, got {}",
            label,
            expected.len(),
            got.len()
        ));
    }
    for (i, (e, g)) in expected.iter().zip(got).enumerate() {
        if (e - g).abs() > CORPUS_MULTIPLIER_TOL {
            return Err(format!("{}[{}]: expected {}, got {}", label, i, e, g));
        }
    }
    Ok(())
}

fn corpus_entry(problem_file: &Path, cfg: &RunConfig) -> Result<(), String> {
    let expected_path = problem_file.with_extension("expected");
    let expected_text = std::fs::read_to_string(&expected_path)
        .map_err(|e| format!("cannot read {}: {}", expected_path.display(), e))?;
    let expected: ExpectedCertificate = serde_json::from_str(&expected_text)
        .map_err(|e| format!("bad sidecar {}: {}", expected_path.display(), e))?;
    let (problem, candidate) =
        load_problem(problem_file).map_err(|e| format!("load failed: {}", e))?;
    let doc =
        check_problem(&problem, &candidate, cfg).map_err(|e| format!("analysis failed: {}", e))?;
    if doc.verdict.name() != expected.verdict {
        return Err(format!(
            "verdict: expected {}, got {}",
            expected.verdict,
            doc.verdict.name()
        ));
    }
    if let Some(lambda) = &expected.lambda {
        compare_vectors("lambda", lambda, &doc.lambda)?;
    }
    if let Some(mu) = &expected.mu {
        compare_vectors("mu", mu, &doc.mu)?;
    }
    Ok(())
}

fn cmd_corpus(dir: &Path, tolerances: &ToleranceArgs) -> ExitCode {
    let cfg = match run_config_or_exit(tolerances) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", dir.display(), e);
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    files.sort();
    if files.is_empty() {
        eprintln!("error: no problem files in {}", dir.display());
        return ExitCode::from(EXIT_INPUT);
    }
    let mut failures = 0usize;
    let name_width = files
        .iter()
        .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().len()))
        .max()
        .unwrap_or(0);
    for file in &files {
        let name = file.file_name().unwrap_or_default().to_string_lossy();
        match corpus_entry(file, &cfg) {
            Ok(()) => println!("{:<width$}  pass", name, width = name_width),
            Err(reason) => {
                failures += 1;
                println!("{:<width$}  FAIL  {}", name, reason, width = name_width);
            }
        }
    }
    println!(
        "{} of {} problems match their expectations",
        files.len() - failures,
        files.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INPUT)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage problems are input errors; help/version exit cleanly
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    match &cli.command {
        Command::Check {
            file,
            out,
            tolerances,
        } => cmd_check(file, out.as_deref(), tolerances),
        Command::Ascend {
            file,
            out,
            tolerances,
        } => cmd_ascend(file, out.as_deref(), tolerances),
        Command::Diffcheck {
            file,
            function,
            tolerances,
        } => cmd_diffcheck(file, function.as_deref(), tolerances),
        Command::Corpus { dir, tolerances } => cmd_corpus(dir, tolerances),
    }
}
