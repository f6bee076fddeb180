//! Assembly of TPTP problem files for the reproving and advice experiments.
//!
//! Every problem starts with the fixed axiom block, followed by the premise
//! statements in chronological order and exactly one conjecture.

use crate::corpus::{Corpus, DepGraph, Kind, NamedFormula};
use crate::fof::{print_fof, FofFormula, Role};
use crate::learn::Prediction;
use crate::translate::{mangle_formula_name, special_axioms, translate, ArityTable, TranslateError, SPECIAL_AXIOMS_TEXT};
use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    #[error("`{name}` is a {kind}, not a theorem")]
    NotATheorem { name: String, kind: Kind },
    #[error("`{name}` has no recorded dependencies")]
    NoDependencies { name: String },
    #[error("`{name}` not in the corpus")]
    UnknownName { name: String },
    #[error("supporter `{supporter}` of `{name}` is not in the corpus")]
    DanglingSupporter { name: String, supporter: String },
    #[error("supporter `{supporter}` of `{name}` does not precede it chronologically")]
    ChronologyViolation { name: String, supporter: String },
    #[error("premise `{premise}` advised for `{name}` is not in the corpus")]
    UnknownPremise { name: String, premise: String },
    #[error("formulas `{a}` and `{b}` both print as `{atom}` in one problem")]
    NameClash { a: String, b: String, atom: String },
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// One generated problem: the 13 special axioms, the premises in
/// chronological order, and a single conjecture.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub conjecture_name: String,
    pub category: String,
    /// Special axioms first, then premises.
    pub axioms: Vec<FofFormula>,
    pub conjecture: FofFormula,
    /// `<category>/<mangled-name>.p`
    pub rel_path: PathBuf,
}

impl ProblemFile {
    /// Premise count excluding the special axiom block.
    pub fn premise_count(&self) -> usize {
        self.axioms.len() - special_axioms().len()
    }

    /// Full problem text; the special axiom block keeps its published
    /// spelling, everything else is printed canonically.
    pub fn render(&self) -> String {
        let special = special_axioms().len();
        let mut out = String::new();
        out.push_str(SPECIAL_AXIOMS_TEXT);
        for f in &self.axioms[special..] {
            out.push_str(&print_fof(f));
            out.push('\n');
        }
        out.push_str(&print_fof(&self.conjecture));
        out.push('\n');
        out
    }
}

/// File-system-safe name for a problem file.
fn problem_filename(mangled: &str) -> String {
    let safe: String = mangled
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    format!("{safe}.p")
}

fn assemble(
    target: &NamedFormula,
    premises: &[&NamedFormula],
    table: &ArityTable,
) -> Result<ProblemFile, ForgeError> {
    let mut axioms = special_axioms();
    let conjecture = translate(&target.name, Role::Conjecture, &target.term, table)?;
    let mut names_seen: BTreeSet<String> = axioms.iter().map(|a| a.name.clone()).collect();
    names_seen.insert(conjecture.name.clone());
    for p in premises {
        let role = match p.kind {
            Kind::Theorem => Role::Axiom,
            Kind::Definition => Role::DefinitionAsAxiom,
        };
        let f = translate(&p.name, role, &p.term, table)?;
        if !names_seen.insert(f.name.clone()) {
            return Err(ForgeError::NameClash {
                a: p.name.clone(),
                b: target.name.clone(),
                atom: f.name.clone(),
            });
        }
        axioms.push(f);
    }
    Ok(ProblemFile {
        conjecture_name: target.name.clone(),
        category: target.category.clone(),
        rel_path: PathBuf::from(&target.category)
            .join(problem_filename(&mangle_formula_name(&target.name))),
        axioms,
        conjecture,
    })
}

/// Reproving problem: the statements of exactly the supporters ACL2
/// recorded for the theorem's proof, plus the conjecture.
pub fn gen_reprove_problem(
    name: &str,
    corpus: &Corpus,
    deps: &DepGraph,
    table: &ArityTable,
) -> Result<ProblemFile, ForgeError> {
    let target = corpus.get(name).ok_or_else(|| ForgeError::UnknownName { name: name.into() })?;
    if target.kind != Kind::Theorem {
        return Err(ForgeError::NotATheorem { name: name.into(), kind: target.kind });
    }
    let supporters =
        deps.get(name).ok_or_else(|| ForgeError::NoDependencies { name: name.into() })?;
    let mut premises: Vec<&NamedFormula> = Vec::with_capacity(supporters.len());
    let mut seen = BTreeSet::new();
    for s in supporters {
        let sup = corpus.get(s).ok_or_else(|| ForgeError::DanglingSupporter {
            name: name.into(),
            supporter: s.clone(),
        })?;
        if sup.seq >= target.seq {
            return Err(ForgeError::ChronologyViolation {
                name: name.into(),
                supporter: s.clone(),
            });
        }
        if seen.insert(sup.seq) {
            premises.push(sup);
        }
    }
    premises.sort_by_key(|p| p.seq);
    assemble(target, &premises, table)
}

/// Advice problem: the top `n` premises of the prediction, plus the
/// conjecture. An empty prediction yields a problem with only the special
/// axioms.
pub fn gen_advice_problem(
    name: &str,
    corpus: &Corpus,
    prediction: &Prediction,
    n: usize,
    table: &ArityTable,
) -> Result<ProblemFile, ForgeError> {
    let target = corpus.get(name).ok_or_else(|| ForgeError::UnknownName { name: name.into() })?;
    if target.kind != Kind::Theorem {
        return Err(ForgeError::NotATheorem { name: name.into(), kind: target.kind });
    }
    let mut premises: Vec<&NamedFormula> = Vec::new();
    for p in prediction.top_n(n) {
        let f = corpus.get(p).ok_or_else(|| ForgeError::UnknownPremise {
            name: name.into(),
            premise: p.to_string(),
        })?;
        premises.push(f);
    }
    premises.sort_by_key(|p| p.seq);
    assemble(target, &premises, table)
}

/// A problem that could not be generated, and why.
#[derive(Debug, Clone)]
pub struct SkippedProblem {
    pub name: String,
    pub reason: String,
}

/// Write problems under `root`, one file per problem, plus an `index.tsv`
/// listing file, conjecture, category, axiom count and source book.
pub fn write_problems(problems: &[ProblemFile], root: &Path) -> Result<Vec<PathBuf>, ForgeError> {
    let io_err = |path: &Path, source: std::io::Error| ForgeError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut written = Vec::new();
    let mut index = String::new();
    let mut used: BTreeSet<PathBuf> = BTreeSet::new();
    for p in problems {
        let mut rel = p.rel_path.clone();
        // disambiguate filename collisions after sanitization
        let mut bump = 0usize;
        while !used.insert(rel.clone()) {
            bump += 1;
            let stem = p.rel_path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem");
            rel = p.rel_path.with_file_name(format!("{stem}_{bump}.p"));
        }
        let path = root.join(&rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let mut f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        f.write_all(p.render().as_bytes()).map_err(|e| io_err(&path, e))?;
        index.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            rel.display(),
            p.conjecture_name,
            p.category,
            p.axioms.len(),
        ));
        written.push(rel);
    }
    let index_path = root.join("index.tsv");
    fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
    fs::write(&index_path, index).map_err(|e| io_err(&index_path, e))?;
    written.push(PathBuf::from("index.tsv"));
    Ok(written)
}
