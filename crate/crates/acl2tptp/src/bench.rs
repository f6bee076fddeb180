//! External prover harness: run provers with a wall-clock limit, parse SZS
//! statuses, and compute the reproving scoreboard and the Cover/Precision
//! machine-learning metrics.

use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Extra wall-clock seconds past the configured timeout before the process
/// group is killed.
const GRACE_SECS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SzsStatus {
    Theorem,
    CounterSatisfiable,
    Satisfiable,
    Timeout,
    GaveUp,
    Error,
}

impl SzsStatus {
    /// Map one SZS word to a status.
    fn from_szs_word(word: &str) -> SzsStatus {
        match word {
            "Theorem" => SzsStatus::Theorem,
            "CounterSatisfiable" => SzsStatus::CounterSatisfiable,
            "Satisfiable" => SzsStatus::Satisfiable,
            "Timeout" | "TimeOut" | "ResourceOut" => SzsStatus::Timeout,
            "GaveUp" | "Unknown" | "Incomplete" => SzsStatus::GaveUp,
            _ => SzsStatus::Error,
        }
    }
}

impl fmt::Display for SzsStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SzsStatus::Theorem => "Theorem",
            SzsStatus::CounterSatisfiable => "CounterSatisfiable",
            SzsStatus::Satisfiable => "Satisfiable",
            SzsStatus::Timeout => "Timeout",
            SzsStatus::GaveUp => "GaveUp",
            SzsStatus::Error => "Error",
        };
        f.write_str(s)
    }
}

impl FromStr for SzsStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Theorem" => Ok(SzsStatus::Theorem),
            "CounterSatisfiable" => Ok(SzsStatus::CounterSatisfiable),
            "Satisfiable" => Ok(SzsStatus::Satisfiable),
            "Timeout" => Ok(SzsStatus::Timeout),
            "GaveUp" => Ok(SzsStatus::GaveUp),
            "Error" => Ok(SzsStatus::Error),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

/// First `SZS status <word>` occurrence in prover output, if any.
pub fn parse_szs_output(output: &str) -> Option<SzsStatus> {
    for line in output.lines() {
        if let Some(idx) = line.find("SZS status") {
            let rest = &line[idx + "SZS status".len()..];
            if let Some(word) = rest.split_whitespace().next() {
                return Some(SzsStatus::from_szs_word(word));
            }
        }
    }
    None
}

/// One prover stanza: id, command template and timeout.
///
/// The template must contain the problem-path placeholder `{problem}`
/// exactly once; `{timeout}` is substituted with the timeout in seconds
/// wherever it appears.
#[derive(Debug, Clone, Deserialize)]
pub struct ProverConfig {
    pub id: String,
    pub command: String,
    pub timeout: u64,
}

#[derive(Debug, Deserialize)]
struct ProverFile {
    #[serde(default)]
    prover: Vec<ProverConfig>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("prover `{id}`: {message}")]
    Prover { id: String, message: String },
    #[error("{path}:{line}: bad results line: {message}")]
    Results { path: String, line: usize, message: String },
}

impl ProverConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let err = |message: String| BenchError::Prover { id: self.id.clone(), message };
        if self.id.is_empty() || self.id.contains(char::is_whitespace) {
            return Err(err("id must be a single nonempty word".into()));
        }
        if self.timeout == 0 {
            return Err(err("timeout must be positive".into()));
        }
        if self.command.matches("{problem}").count() != 1 {
            return Err(err("command must contain `{problem}` exactly once".into()));
        }
        Ok(())
    }

    /// First word of the command, for the pre-batch executable check.
    pub fn executable(&self) -> Option<&str> {
        self.command.split_whitespace().next()
    }

    fn shell_command(&self, problem: &Path) -> String {
        // single-quote the path for sh, escaping embedded quotes
        let quoted = format!("'{}'", problem.display().to_string().replace('\'', r"'\''"));
        self.command.replace("{problem}", &quoted).replace("{timeout}", &self.timeout.to_string())
    }
}

/// Load prover stanzas from a TOML file (`[[prover]]` tables).
pub fn load_prover_configs(path: &Path) -> Result<Vec<ProverConfig>, BenchError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BenchError::Io { path: path.display().to_string(), source: e })?;
    let file: ProverFile = toml::from_str(&text)
        .map_err(|e| BenchError::Config { path: path.display().to_string(), message: e.to_string() })?;
    if file.prover.is_empty() {
        return Err(BenchError::Config {
            path: path.display().to_string(),
            message: "no [[prover]] stanzas".into(),
        });
    }
    let mut ids = BTreeSet::new();
    for p in &file.prover {
        p.validate()?;
        if !ids.insert(p.id.clone()) {
            return Err(BenchError::Config {
                path: path.display().to_string(),
                message: format!("duplicate prover id `{}`", p.id),
            });
        }
    }
    Ok(file.prover)
}

/// Fail before the batch starts when a prover executable cannot be found.
pub fn check_executables(provers: &[ProverConfig]) -> Result<(), BenchError> {
    for p in provers {
        let exe = p.executable().ok_or_else(|| BenchError::Prover {
            id: p.id.clone(),
            message: "empty command".into(),
        })?;
        let found = if exe.contains('/') {
            Path::new(exe).is_file()
        } else {
            std::env::var_os("PATH")
                .map(|paths| {
                    std::env::split_paths(&paths).any(|dir| dir.join(exe).is_file())
                })
                .unwrap_or(false)
        };
        if !found {
            return Err(BenchError::Prover {
                id: p.id.clone(),
                message: format!("executable `{exe}` not found"),
            });
        }
    }
    Ok(())
}

/// Outcome of one prover run.
#[derive(Debug, Clone, PartialEq)]
pub struct AtpResult {
    /// Problem identifier: path relative to the problems root.
    pub problem: String,
    pub prover: String,
    pub status: SzsStatus,
    pub seconds: f64,
}

fn drain<R: Read + Send + 'static>(reader: R) -> std::thread::JoinHandle<Vec<u8>> {
    std::thread::spawn(move || {
        let mut reader = reader;
        let mut buf = Vec::new();
        let _ = reader.read_to_end(&mut buf);
        buf
    })
}

/// Run one prover on one problem with an enforced wall-clock kill at
/// timeout + grace. The whole process group is killed so shell children do
/// not outlive the run.
pub fn run_prover(cfg: &ProverConfig, problem: &Path, problem_id: &str) -> AtpResult {
    use std::os::unix::process::CommandExt;
    let start = Instant::now();
    let shell = cfg.shell_command(problem);
    let mut cmd = Command::new("sh");
    cmd.arg("-c").arg(&shell).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.process_group(0);
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(_) => {
            return AtpResult {
                problem: problem_id.to_string(),
                prover: cfg.id.clone(),
                status: SzsStatus::Error,
                seconds: start.elapsed().as_secs_f64(),
            };
        }
    };
    let stdout = drain(child.stdout.take().expect("piped"));
    let stderr = drain(child.stderr.take().expect("piped"));

    let deadline = Duration::from_secs_f64(cfg.timeout as f64 + GRACE_SECS);
    let mut killed = false;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if start.elapsed() >= deadline {
                    let pgid = child.id() as i32;
                    unsafe {
                        libc::kill(-pgid, libc::SIGKILL);
                    }
                    killed = true;
                    let _ = child.wait();
                    break;
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            Err(_) => break,
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    let mut output = String::from_utf8_lossy(&stdout.join().unwrap_or_default()).into_owned();
    output.push('\n');
    output.push_str(&String::from_utf8_lossy(&stderr.join().unwrap_or_default()));

    let status = match parse_szs_output(&output) {
        Some(s) => s,
        None if killed => SzsStatus::Timeout,
        None => SzsStatus::Error,
    };
    AtpResult { problem: problem_id.to_string(), prover: cfg.id.clone(), status, seconds }
}

/// Run every prover on every problem with up to `workers` concurrent runs.
/// Results are folded from a channel and sorted by (problem, prover).
pub fn run_batch(
    provers: &[ProverConfig],
    problems: &[(PathBuf, String)],
    workers: usize,
) -> Vec<AtpResult> {
    let jobs: Vec<(ProverConfig, PathBuf, String)> = problems
        .iter()
        .flat_map(|(path, id)| {
            provers.iter().map(move |p| (p.clone(), path.clone(), id.clone()))
        })
        .collect();
    let queue = Arc::new(Mutex::new(jobs.into_iter().collect::<std::collections::VecDeque<_>>()));
    let (tx, rx) = mpsc::channel::<AtpResult>();
    let workers = workers.max(1);
    let mut handles = Vec::new();
    for _ in 0..workers {
        let queue = Arc::clone(&queue);
        let tx = tx.clone();
        handles.push(std::thread::spawn(move || loop {
            let job = queue.lock().expect("queue lock").pop_front();
            match job {
                Some((cfg, path, id)) => {
                    let result = run_prover(&cfg, &path, &id);
                    if tx.send(result).is_err() {
                        break;
                    }
                }
                None => break,
            }
        }));
    }
    drop(tx);
    let mut results: Vec<AtpResult> = rx.into_iter().collect();
    for h in handles {
        let _ = h.join();
    }
    results.sort_by(|a, b| a.problem.cmp(&b.problem).then(a.prover.cmp(&b.prover)));
    results
}

/// `problem<TAB>prover<TAB>status<TAB>seconds` per line.
pub fn write_results(results: &[AtpResult], path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!("{}\t{}\t{}\t{:.3}\n", r.problem, r.prover, r.status, r.seconds));
    }
    std::fs::write(path, out)
}

pub fn read_results(path: &Path) -> Result<Vec<AtpResult>, BenchError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BenchError::Io { path: path.display().to_string(), source: e })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| BenchError::Results {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        let status = fields[2].parse::<SzsStatus>().map_err(err)?;
        let seconds = fields[3].parse::<f64>().map_err(|e| err(e.to_string()))?;
        out.push(AtpResult {
            problem: fields[0].to_string(),
            prover: fields[1].to_string(),
            status,
            seconds,
        });
    }
    Ok(out)
}

/// One scoreboard row.
#[derive(Debug, Clone, PartialEq)]
pub struct ProverRow {
    pub id: String,
    pub proved: usize,
    pub disproved: usize,
    pub unique: usize,
    /// Mean over proved problems of 1/(number of provers proving it);
    /// absent when the prover proved nothing.
    pub sotac: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CategoryRow {
    pub proved: usize,
    pub disproved: usize,
    pub size: usize,
}

/// The reproving/advice evaluation table plus the union row and the
/// per-category breakdown.
#[derive(Debug, Clone)]
pub struct Scoreboard {
    pub total_problems: usize,
    pub rows: Vec<ProverRow>,
    pub any_proved: usize,
    pub any_disproved: usize,
    /// Problems reported both Theorem and CounterSatisfiable — a soundness
    /// alarm for the translation.
    pub alarms: Vec<String>,
    pub by_category: BTreeMap<String, CategoryRow>,
}

fn category_of_problem(problem: &str) -> String {
    match problem.split('/').next() {
        Some(first) if problem.contains('/') => first.to_string(),
        _ => "root".to_string(),
    }
}

/// Aggregate results over a single problem set.
pub fn scoreboard(results: &[AtpResult]) -> Scoreboard {
    let mut problems: BTreeSet<&str> = BTreeSet::new();
    let mut provers: Vec<&str> = Vec::new();
    let mut proved: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut disproved: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in results {
        problems.insert(&r.problem);
        if !provers.contains(&r.prover.as_str()) {
            provers.push(&r.prover);
        }
        match r.status {
            SzsStatus::Theorem => {
                proved.entry(&r.prover).or_default().insert(&r.problem);
            }
            SzsStatus::CounterSatisfiable => {
                disproved.entry(&r.prover).or_default().insert(&r.problem);
            }
            _ => {}
        }
    }
    provers.sort();

    let mut solvers_per_problem: BTreeMap<&str, usize> = BTreeMap::new();
    for set in proved.values() {
        for p in set {
            *solvers_per_problem.entry(p).or_insert(0) += 1;
        }
    }

    let any_proved_set: BTreeSet<&str> = proved.values().flatten().copied().collect();
    let any_disproved_set: BTreeSet<&str> = disproved.values().flatten().copied().collect();
    let alarms: Vec<String> =
        any_proved_set.intersection(&any_disproved_set).map(|s| s.to_string()).collect();

    let rows = provers
        .iter()
        .map(|&id| {
            let mine = proved.get(id).cloned().unwrap_or_default();
            let unique = mine
                .iter()
                .filter(|p| solvers_per_problem.get(*p).copied().unwrap_or(0) == 1)
                .count();
            let sotac = (!mine.is_empty()).then(|| {
                mine.iter().map(|p| 1.0 / solvers_per_problem[p] as f64).sum::<f64>()
                    / mine.len() as f64
            });
            ProverRow {
                id: id.to_string(),
                proved: mine.len(),
                disproved: disproved.get(id).map(BTreeSet::len).unwrap_or(0),
                unique,
                sotac,
            }
        })
        .collect();

    let mut by_category: BTreeMap<String, CategoryRow> = BTreeMap::new();
    for p in &problems {
        let row = by_category.entry(category_of_problem(p)).or_default();
        row.size += 1;
        if any_proved_set.contains(p) {
            row.proved += 1;
        }
        if any_disproved_set.contains(p) {
            row.disproved += 1;
        }
    }

    Scoreboard {
        total_problems: problems.len(),
        rows,
        any_proved: any_proved_set.len(),
        any_disproved: any_disproved_set.len(),
        alarms,
        by_category,
    }
}

fn pct(n: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * n as f64 / total as f64
    }
}

impl Scoreboard {
    /// Plain-text table in the published layout: one row per prover with
    /// Proved (%), Disproved (%), Unique and SotAC, then the union row.
    pub fn format_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Problems: {}\n", self.total_problems));
        out.push_str(&format!(
            "{:<12} {:>14} {:>17} {:>7} {:>6}\n",
            "Prover", "Proved (%)", "Disproved (%)", "Unique", "SotAC"
        ));
        for r in &self.rows {
            let sotac = r.sotac.map(|s| format!("{s:.2}")).unwrap_or_default();
            out.push_str(&format!(
                "{:<12} {:>8} ({:>4.1}) {:>11} ({:>4.1}) {:>7} {:>6}\n",
                r.id,
                r.proved,
                pct(r.proved, self.total_problems),
                r.disproved,
                pct(r.disproved, self.total_problems),
                r.unique,
                sotac,
            ));
        }
        out.push_str(&format!(
            "{:<12} {:>8} ({:>4.1}) {:>11} ({:>4.1})\n",
            "any",
            self.any_proved,
            pct(self.any_proved, self.total_problems),
            self.any_disproved,
            pct(self.any_disproved, self.total_problems),
        ));
        if !self.by_category.is_empty() {
            out.push_str(&format!(
                "\n{:<20} {:>10} {:>13} {:>6}\n",
                "Category", "Proved %", "Disproved %", "Size"
            ));
            for (cat, row) in &self.by_category {
                out.push_str(&format!(
                    "{:<20} {:>10.2} {:>13.2} {:>6}\n",
                    cat,
                    pct(row.proved, row.size),
                    pct(row.disproved, row.size),
                    row.size,
                ));
            }
        }
        if !self.alarms.is_empty() {
            out.push_str("\nSOUNDNESS ALARM: proved and disproved overlap on:\n");
            for p in &self.alarms {
                out.push_str(&format!("  {p}\n"));
            }
        }
        out
    }

    /// Machine-readable rows: `prover<TAB>proved<TAB>pct<TAB>disproved<TAB>pct<TAB>unique<TAB>sotac`.
    pub fn format_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{:.4}\t{}\t{:.4}\t{}\t{}\n",
                r.id,
                r.proved,
                pct(r.proved, self.total_problems),
                r.disproved,
                pct(r.disproved, self.total_problems),
                r.unique,
                r.sotac.map(|s| format!("{s:.4}")).unwrap_or_default(),
            ));
        }
        out.push_str(&format!(
            "any\t{}\t{:.4}\t{}\t{:.4}\t\t\n",
            self.any_proved,
            pct(self.any_proved, self.total_problems),
            self.any_disproved,
            pct(self.any_disproved, self.total_problems),
        ));
        out
    }
}

// ---------------------------------------------------------------------------
// Machine-learning metrics

/// Fraction of the true dependencies covered by the first `n` predictions.
/// Callers exclude theorems with empty deps from averages.
pub fn cover(prediction: &[&str], true_deps: &BTreeSet<&str>, n: usize) -> f64 {
    debug_assert!(!true_deps.is_empty());
    precision_count(prediction, true_deps, n) as f64 / true_deps.len() as f64
}

/// How many of the first `n` predictions are true dependencies.
pub fn precision_count(prediction: &[&str], true_deps: &BTreeSet<&str>, n: usize) -> usize {
    prediction.iter().take(n).filter(|p| true_deps.contains(*p)).count()
}

/// Mean n-Cover and n-Precision per category and overall, over theorems
/// with non-empty recorded dependencies.
#[derive(Debug, Clone, PartialEq)]
pub struct MlMetrics {
    pub n: usize,
    /// category -> (mean cover, mean precision, conjectures counted)
    pub per_category: BTreeMap<String, (f64, f64, usize)>,
    pub overall_cover: f64,
    pub overall_precision: f64,
    pub counted: usize,
}

pub fn ml_metrics(
    predictions: &[crate::learn::Prediction],
    deps: &crate::corpus::DepGraph,
    categories: &BTreeMap<String, String>,
    n: usize,
) -> MlMetrics {
    let mut per_category: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
    let mut cover_sum = 0.0;
    let mut precision_sum = 0.0;
    let mut counted = 0usize;
    for pred in predictions {
        let Some(sups) = deps.get(&pred.conjecture) else { continue };
        let true_deps: BTreeSet<&str> = sups.iter().map(String::as_str).collect();
        if true_deps.is_empty() {
            continue;
        }
        let names: Vec<&str> = pred.names().collect();
        let c = cover(&names, &true_deps, n);
        let p = precision_count(&names, &true_deps, n) as f64;
        cover_sum += c;
        precision_sum += p;
        counted += 1;
        let cat = categories.get(&pred.conjecture).cloned().unwrap_or_else(|| "root".into());
        let entry = per_category.entry(cat).or_insert((0.0, 0.0, 0));
        entry.0 += c;
        entry.1 += p;
        entry.2 += 1;
    }
    for (_, entry) in per_category.iter_mut() {
        if entry.2 > 0 {
            entry.0 /= entry.2 as f64;
            entry.1 /= entry.2 as f64;
        }
    }
    MlMetrics {
        n,
        per_category,
        overall_cover: if counted > 0 { cover_sum / counted as f64 } else { 0.0 },
        overall_precision: if counted > 0 { precision_sum / counted as f64 } else { 0.0 },
        counted,
    }
}

impl MlMetrics {
    pub fn format_text(&self) -> String {
        let n = self.n;
        let mut out = String::new();
        out.push_str(&format!(
            "{:<20} {:>12} {:>14}\n",
            "Category",
            format!("{n}-Cover (%)"),
            format!("{n}-Precision")
        ));
        for (cat, (c, p, _)) in &self.per_category {
            out.push_str(&format!("{:<20} {:>12.0} {:>14.2}\n", cat, 100.0 * c, p));
        }
        out.push_str(&format!(
            "{:<20} {:>12.0} {:>14.2}\n",
            "all",
            100.0 * self.overall_cover,
            self.overall_precision
        ));
        out
    }
}
