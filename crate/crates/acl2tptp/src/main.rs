//! Command-line entry point tying the pipeline together.
//!
//! Exit codes: 0 success, 1 input/usage error, 2 internal invariant
//! violation. Every subcommand prints a machine-readable JSON summary line
//! to stdout.

use acl2tptp::bench::{
    check_executables, load_prover_configs, ml_metrics, run_batch, scoreboard, write_results,
};
use acl2tptp::config::RunConfig;
use acl2tptp::corpus::{corpus_stats, load_deps, load_world, read_manifest, Corpus, DepGraph};
use acl2tptp::forge::write_problems;
use acl2tptp::pipeline::{
    build_arity_table, features_all, gen_all_advice, gen_all_reprove, predict_all,
    read_predictions, write_fof_corpus, write_predictions,
};
use acl2tptp::translate::ArityTable;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "acl2tptp",
    about = "Translate ACL2 world dumps to TPTP, learn premise selection, benchmark ATPs",
    version
)]
struct Cli {
    /// Config file (TOML); defaults to $ACL2TPTP_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Default)]
struct CommonOpts {
    /// Directory the manifest's dump paths are relative to.
    #[arg(long)]
    corpus_root: Option<PathBuf>,
    /// Manifest listing dump files in chronological order.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Deps file with (DEPS <name> (<supporters>)) entries.
    #[arg(long)]
    deps: Option<PathBuf>,
    /// Run directory for outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict to one book category.
    #[arg(long)]
    category: Option<String>,
    /// k-NN neighbor count.
    #[arg(long)]
    k: Option<usize>,
    /// Advice length (premises per problem).
    #[arg(long)]
    n: Option<usize>,
    /// Prover stanza file.
    #[arg(long)]
    provers: Option<PathBuf>,
    /// Concurrent prover runs.
    #[arg(long)]
    workers: Option<usize>,
}

impl CommonOpts {
    fn into_config(self) -> RunConfig {
        RunConfig {
            corpus_root: self.corpus_root,
            manifest: self.manifest,
            deps: self.deps,
            out: self.out,
            k: self.k,
            n: self.n,
            provers: self.provers,
            workers: self.workers,
            category: self.category,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Translate the corpus to FOF axiom files plus an index.
    Translate(CommonOpts),
    /// Generate reproving problems from recorded dependencies.
    GenReprove(CommonOpts),
    /// Generate advice problems from k-NN predictions.
    GenAdvice {
        #[command(flatten)]
        common: CommonOpts,
        /// Use an existing predictions file instead of recomputing.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Write k-NN predictions for every theorem.
    Predict(CommonOpts),
    /// Run configured provers over a problem directory.
    Bench {
        #[command(flatten)]
        common: CommonOpts,
        /// Problem directory (defaults to <out>/problems/reprove).
        #[arg(long)]
        problems: Option<PathBuf>,
        /// Override every prover's timeout, in seconds.
        #[arg(long)]
        timeout: Option<u64>,
        /// Results log to write (defaults to <out>/results.tsv).
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Compute Cover/Precision tables from predictions and deps.
    Metrics {
        #[command(flatten)]
        common: CommonOpts,
        /// Predictions file (defaults to <out>/predictions.txt).
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Print corpus statistics.
    Stats(CommonOpts),
}

#[derive(Debug)]
enum AppError {
    Input(String),
    Internal(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Input(_) => 1,
            AppError::Internal(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Input(m) | AppError::Internal(m) => m,
        }
    }
}

trait Ctx<T> {
    fn input(self) -> Result<T, AppError>;
}

impl<T, E: std::fmt::Display> Ctx<T> for Result<T, E> {
    fn input(self) -> Result<T, AppError> {
        self.map_err(|e| AppError::Input(e.to_string()))
    }
}

fn internal<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Internal(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn load_config(explicit: Option<&Path>, flags: RunConfig) -> Result<RunConfig, AppError> {
    let base = RunConfig::load_default(explicit).input()?;
    let cfg = base.merged_with(flags);
    cfg.validate().input()?;
    Ok(cfg)
}

fn load_corpus(cfg: &RunConfig) -> Result<Corpus, AppError> {
    let root = cfg.effective_corpus_root().input()?;
    let files = read_manifest(cfg.manifest_required().input()?, &root).input()?;
    load_world(&files).input()
}

fn load_corpus_and_deps(cfg: &RunConfig) -> Result<(Corpus, DepGraph, String), AppError> {
    let corpus = load_corpus(cfg)?;
    let (deps, report) = load_deps(cfg.deps_required().input()?, &corpus).input()?;
    let mut report_text = String::new();
    for (thm, sup) in &report.dangling {
        report_text.push_str(&format!("dangling\t{thm}\t{sup}\n"));
    }
    for name in &report.unknown_theorems {
        report_text.push_str(&format!("unknown-theorem\t{name}\t\n"));
    }
    for (thm, sup) in &report.chronology_violations {
        report_text.push_str(&format!("chronology\t{thm}\t{sup}\n"));
    }
    Ok((corpus, deps, report_text))
}

fn write_manifest_file(out: &Path, command: &str, artifacts: &[PathBuf]) -> Result<(), AppError> {
    fs::create_dir_all(out).input()?;
    let mut text = String::new();
    for a in artifacts {
        text.push_str(&format!("{}\n", a.display()));
    }
    fs::write(out.join(format!("manifest-{command}.txt")), text).input()?;
    Ok(())
}

fn summary(value: serde_json::Value) {
    println!("{value}");
}

fn table_for(corpus: &Corpus) -> ArityTable {
    build_arity_table(corpus)
}

fn run(cli: Cli) -> Result<(), AppError> {
    let config_path = cli.config.clone();
    match cli.command {
        Cmd::Translate(common) => {
            let cfg = load_config(config_path.as_deref(), common.into_config())?;
            let corpus = load_corpus(&cfg)?;
            let table = table_for(&corpus);
            let out = cfg.out_dir();
            fs::create_dir_all(&out).input()?;
            let written = write_fof_corpus(&corpus, &table, &out).map_err(internal)?;
            write_manifest_file(&out, "translate", &written)?;
            summary(json!({
                "cmd": "translate",
                "formulas": corpus.len(),
                "categories": corpus.categories().len(),
                "out": out,
                "files": written.len(),
            }));
            Ok(())
        }
        Cmd::GenReprove(common) => {
            let cfg = load_config(config_path.as_deref(), common.into_config())?;
            let (corpus, deps, report) = load_corpus_and_deps(&cfg)?;
            let table = table_for(&corpus);
            let out = cfg.out_dir();
            let (problems, skipped) =
                gen_all_reprove(&corpus, &deps, &table, cfg.category.as_deref())
                    .map_err(internal)?;
            let root = out.join("problems").join("reprove");
            let mut written = write_problems(&problems, &root).input()?;
            written.iter_mut().for_each(|p| *p = Path::new("problems/reprove").join(&p));
            fs::create_dir_all(&out).input()?;
            let mut skip_log = report;
            for s in &skipped {
                skip_log.push_str(&format!("skipped\t{}\t{}\n", s.name, s.reason));
            }
            fs::write(out.join("reprove-report.tsv"), skip_log).input()?;
            written.push(PathBuf::from("reprove-report.tsv"));
            write_manifest_file(&out, "gen-reprove", &written)?;
            summary(json!({
                "cmd": "gen-reprove",
                "problems": problems.len(),
                "skipped": skipped.len(),
                "out": root,
            }));
            Ok(())
        }
        Cmd::GenAdvice { common, predictions } => {
            let cfg = load_config(config_path.as_deref(), common.into_config())?;
            let (corpus, deps, _) = load_corpus_and_deps(&cfg)?;
            let table = table_for(&corpus);
            let out = cfg.out_dir();
            let preds = match &predictions {
                Some(path) => read_predictions(path).input()?,
                None => predict_all(&corpus, &deps, &cfg.knn(), cfg.category.as_deref()),
            };
            let n = cfg.knn().n;
            let (problems, skipped) =
                gen_all_advice(&corpus, &preds, n, &table).map_err(internal)?;
            let root = out.join("problems").join("advice");
            let mut written = write_problems(&problems, &root).input()?;
            written.iter_mut().for_each(|p| *p = Path::new("problems/advice").join(&p));
            write_manifest_file(&out, "gen-advice", &written)?;
            summary(json!({
                "cmd": "gen-advice",
                "problems": problems.len(),
                "skipped": skipped.len(),
                "n": n,
                "out": root,
            }));
            Ok(())
        }
        Cmd::Predict(common) => {
            let cfg = load_config(config_path.as_deref(), common.into_config())?;
            let (corpus, deps, _) = load_corpus_and_deps(&cfg)?;
            let out = cfg.out_dir();
            fs::create_dir_all(&out).input()?;
            let preds = predict_all(&corpus, &deps, &cfg.knn(), cfg.category.as_deref());
            let path = out.join("predictions.txt");
            write_predictions(&preds, &path).input()?;
            write_manifest_file(&out, "predict", &[PathBuf::from("predictions.txt")])?;
            summary(json!({
                "cmd": "predict",
                "predictions": preds.len(),
                "k": cfg.knn().k,
                "n": cfg.knn().n,
                "out": path,
            }));
            Ok(())
        }
        Cmd::Bench { common, problems, timeout, results } => {
            let cfg = load_config(config_path.as_deref(), common.into_config())?;
            let out = cfg.out_dir();
            let mut provers = load_prover_configs(cfg.provers_required().input()?).input()?;
            if let Some(t) = timeout {
                if t == 0 {
                    return Err(AppError::Input("timeout must be positive".into()));
                }
                provers.iter_mut().for_each(|p| p.timeout = t);
            }
            check_executables(&provers).input()?;
            let problems_dir = problems.unwrap_or_else(|| out.join("problems").join("reprove"));
            let problem_files = collect_problems(&problems_dir)?;
            if problem_files.is_empty() {
                return Err(AppError::Input(format!(
                    "no .p files under {}",
                    problems_dir.display()
                )));
            }
            let results_path = results.unwrap_or_else(|| out.join("results.tsv"));
            let batch = run_batch(&provers, &problem_files, cfg.workers_or_default());
            fs::create_dir_all(results_path.parent().unwrap_or(Path::new("."))).input()?;
            write_results(&batch, &results_path).input()?;
            let board = scoreboard(&batch);
            fs::write(out.join("scoreboard.txt"), board.format_text()).input()?;
            fs::write(out.join("scoreboard.tsv"), board.format_tsv()).input()?;
            print!("{}", board.format_text());
            write_manifest_file(
                &out,
                "bench",
                &[
                    results_path.clone(),
                    PathBuf::from("scoreboard.txt"),
                    PathBuf::from("scoreboard.tsv"),
                ],
            )?;
            summary(json!({
                "cmd": "bench",
                "problems": problem_files.len(),
                "provers": provers.len(),
                "runs": batch.len(),
                "any_proved": board.any_proved,
                "any_disproved": board.any_disproved,
                "alarms": board.alarms.len(),
                "results": results_path,
            }));
            Ok(())
        }
        Cmd::Metrics { common, predictions } => {
            let cfg = load_config(config_path.as_deref(), common.into_config())?;
            let (corpus, deps, _) = load_corpus_and_deps(&cfg)?;
            let out = cfg.out_dir();
            let preds = match &predictions {
                Some(p) => read_predictions(p).input()?,
                None => {
                    let default = out.join("predictions.txt");
                    if default.is_file() {
                        read_predictions(&default).input()?
                    } else {
                        predict_all(&corpus, &deps, &cfg.knn(), cfg.category.as_deref())
                    }
                }
            };
            let categories: BTreeMap<String, String> = corpus
                .formulas
                .iter()
                .map(|f| (f.name.clone(), f.category.clone()))
                .collect();
            let metrics = ml_metrics(&preds, &deps, &categories, cfg.knn().n);
            fs::create_dir_all(&out).input()?;
            fs::write(out.join("mlmetrics.txt"), metrics.format_text()).input()?;
            print!("{}", metrics.format_text());
            write_manifest_file(&out, "metrics", &[PathBuf::from("mlmetrics.txt")])?;
            summary(json!({
                "cmd": "metrics",
                "n": metrics.n,
                "conjectures": metrics.counted,
                "cover": metrics.overall_cover,
                "precision": metrics.overall_precision,
            }));
            Ok(())
        }
        Cmd::Stats(common) => {
            let cfg = load_config(config_path.as_deref(), common.into_config())?;
            let (corpus, deps, _) = load_corpus_and_deps(&cfg)?;
            let features = features_all(&corpus);
            let stats = corpus_stats(&corpus, &deps, &features);
            summary(json!({ "cmd": "stats", "stats": stats }));
            Ok(())
        }
    }
}

/// All `.p` files under `dir`, identified by their path relative to it.
fn collect_problems(dir: &Path) -> Result<Vec<(PathBuf, String)>, AppError> {
    fn walk(dir: &Path, base: &Path, out: &mut Vec<(PathBuf, String)>) -> std::io::Result<()> {
        let mut entries: Vec<_> =
            fs::read_dir(dir)?.collect::<Result<Vec<_>, _>>()?.into_iter().collect();
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            let path = entry.path();
            if path.is_dir() {
                walk(&path, base, out)?;
            } else if path.extension().is_some_and(|e| e == "p") {
                let rel = path.strip_prefix(base).unwrap_or(&path).display().to_string();
                out.push((path, rel));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out).input()?;
    Ok(out)
}
