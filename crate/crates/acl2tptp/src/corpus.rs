//! The world-dump and dependency file formats, and the loaded corpus.
//!
//! A world dump is a sequence of `(EVENT <THEOREM|DEFINITION> <name> <formula>)`
//! entries in logical-world order (oldest to newest); a manifest file lists
//! the dump files in chronological order. A deps file holds
//! `(DEPS <name> (<supporter> ...))` entries exported from the proof
//! supporters of each theorem.

use crate::learn::FeatureVector;
use crate::sexpr::{parse_sexprs, ParseError, Sexpr};
use crate::term::{remove_lambdas, symbol_text, to_term, AclTerm, TermError};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Theorem,
    Definition,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Theorem => f.write_str("theorem"),
            Kind::Definition => f.write_str("definition"),
        }
    }
}

/// One formula of the corpus. `term` is lambda-free.
#[derive(Debug, Clone)]
pub struct NamedFormula {
    pub name: String,
    pub kind: Kind,
    pub term: AclTerm,
    /// Dense chronological index, 0-based, oldest first.
    pub seq: usize,
    /// Dump file the entry came from, as listed in the manifest.
    pub book: String,
    /// First path component of the book, or `root` for top-level files.
    pub category: String,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub formulas: Vec<NamedFormula>,
    by_name: HashMap<String, usize>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&NamedFormula> {
        self.by_name.get(name).map(|&i| &self.formulas[i])
    }

    pub fn seq_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn categories(&self) -> Vec<String> {
        let mut cats: Vec<String> = self.formulas.iter().map(|f| f.category.clone()).collect();
        cats.sort();
        cats.dedup();
        cats
    }
}

/// Proof supporters per theorem, stored verbatim in entry order.
#[derive(Debug, Clone, Default)]
pub struct DepGraph {
    map: BTreeMap<String, Vec<String>>,
}

impl DepGraph {
    pub fn get(&self, name: &str) -> Option<&[String]> {
        self.map.get(name).map(Vec::as_slice)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn insert(&mut self, name: String, supporters: Vec<String>) {
        self.map.insert(name, supporters);
    }

    /// Cycle check over the edges between loaded names. With clean
    /// chronology this cannot fire; it is asserted directly in tests.
    pub fn is_acyclic(&self, corpus: &Corpus) -> bool {
        // DFS with tricolor marking over names present in the corpus.
        let mut state: HashMap<&str, u8> = HashMap::new();
        fn visit<'a>(
            g: &'a DepGraph,
            corpus: &Corpus,
            node: &'a str,
            state: &mut HashMap<&'a str, u8>,
        ) -> bool {
            match state.get(node) {
                Some(1) => return false,
                Some(2) => return true,
                _ => {}
            }
            state.insert(node, 1);
            if let Some(sups) = g.get(node) {
                for s in sups {
                    if corpus.get(s).is_some() && !visit(g, corpus, s, state) {
                        return false;
                    }
                }
            }
            state.insert(node, 2);
            true
        }
        self.map
            .keys()
            .filter(|n| corpus.get(n).is_some())
            .all(|n| visit(self, corpus, n, &mut state))
    }
}

/// Everything suspicious found while loading a deps file. Nothing here is
/// silently dropped; problem generation consults the corpus directly.
#[derive(Debug, Clone, Default)]
pub struct DepReport {
    /// (theorem, supporter) pairs where the supporter is not in the corpus.
    pub dangling: Vec<(String, String)>,
    /// Deps entries whose theorem name is not in the corpus.
    pub unknown_theorems: Vec<String>,
    /// (theorem, supporter) pairs where the supporter does not precede the
    /// theorem chronologically.
    pub chronology_violations: Vec<(String, String)>,
}

impl DepReport {
    pub fn is_clean(&self) -> bool {
        self.dangling.is_empty()
            && self.unknown_theorems.is_empty()
            && self.chronology_violations.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{file}: {source}")]
    Io { file: String, source: std::io::Error },
    #[error("{file}:{source}")]
    Parse { file: String, source: ParseError },
    #[error("{file}: entry {index}: {source}")]
    Term { file: String, index: usize, source: TermError },
    #[error("{file}: entry {index}: expected (EVENT <kind> <name> <formula>), got {got}")]
    MalformedEntry { file: String, index: usize, got: String },
    #[error("{file}: entry {index}: unknown event kind `{kind}`")]
    UnknownKind { file: String, index: usize, kind: String },
    #[error("duplicate formula name `{name}` (first in {first}, again in {second})")]
    DuplicateName { name: String, first: String, second: String },
    #[error("{file}: entry {index}: duplicate deps entry for `{name}`")]
    DuplicateDeps { file: String, index: usize, name: String },
    #[error("{file}: manifest entry `{entry}` does not exist")]
    MissingDump { file: String, entry: String },
}

/// A dump file to load: where to read it and how the manifest names it.
#[derive(Debug, Clone)]
pub struct WorldFile {
    pub path: PathBuf,
    /// Path as written in the manifest; determines book and category.
    pub rel: String,
}

/// Read a manifest: one dump path per line, `#` comments and blanks skipped,
/// resolved relative to `corpus_root`.
pub fn read_manifest(manifest: &Path, corpus_root: &Path) -> Result<Vec<WorldFile>, LoadError> {
    let text = fs::read_to_string(manifest)
        .map_err(|e| LoadError::Io { file: manifest.display().to_string(), source: e })?;
    let mut files = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let path = corpus_root.join(line);
        if !path.is_file() {
            return Err(LoadError::MissingDump {
                file: manifest.display().to_string(),
                entry: line.to_string(),
            });
        }
        files.push(WorldFile { path, rel: line.to_string() });
    }
    Ok(files)
}

fn category_of(rel: &str) -> String {
    let rel = rel.trim_start_matches("./");
    match rel.split('/').next() {
        Some(first) if rel.contains('/') => first.to_string(),
        _ => "root".to_string(),
    }
}

fn entry_symbol(datum: &Sexpr) -> Option<String> {
    match datum {
        Sexpr::Symbol { package, name } => Some(symbol_text(package, name)),
        _ => None,
    }
}

/// Load dump files in manifest order; `seq` is assigned globally by file
/// order then entry order.
pub fn load_world(files: &[WorldFile]) -> Result<Corpus, LoadError> {
    let mut corpus = Corpus::default();
    let mut origin: HashMap<String, String> = HashMap::new();
    for wf in files {
        let text = fs::read_to_string(&wf.path)
            .map_err(|e| LoadError::Io { file: wf.path.display().to_string(), source: e })?;
        let data = parse_sexprs(&text)
            .map_err(|e| LoadError::Parse { file: wf.rel.clone(), source: e })?;
        for (index, entry) in data.into_iter().enumerate() {
            let file = wf.rel.clone();
            let items = match &entry {
                Sexpr::List { items, tail: None } if items.len() == 4 => items,
                _ => {
                    return Err(LoadError::MalformedEntry { file, index, got: entry.to_string() })
                }
            };
            if !items[0].is_symbol(crate::sexpr::DEFAULT_PACKAGE, "EVENT") {
                return Err(LoadError::MalformedEntry { file, index, got: entry.to_string() });
            }
            let kind = match entry_symbol(&items[1]).as_deref() {
                Some("THEOREM") => Kind::Theorem,
                Some("DEFINITION") => Kind::Definition,
                Some(other) => {
                    return Err(LoadError::UnknownKind { file, index, kind: other.to_string() })
                }
                None => {
                    return Err(LoadError::MalformedEntry { file, index, got: entry.to_string() })
                }
            };
            let name = entry_symbol(&items[2]).ok_or_else(|| LoadError::MalformedEntry {
                file: file.clone(),
                index,
                got: entry.to_string(),
            })?;
            if let Some(first) = origin.get(&name) {
                return Err(LoadError::DuplicateName {
                    name,
                    first: first.clone(),
                    second: file,
                });
            }
            let term = to_term(&items[3])
                .and_then(|t| remove_lambdas(&t))
                .map_err(|e| LoadError::Term { file: file.clone(), index, source: e })?;
            let seq = corpus.formulas.len();
            origin.insert(name.clone(), file.clone());
            corpus.by_name.insert(name.clone(), seq);
            corpus.formulas.push(NamedFormula {
                name,
                kind,
                term,
                seq,
                book: file.clone(),
                category: category_of(&file),
            });
        }
    }
    Ok(corpus)
}

/// Load a deps file against a loaded corpus. Suspicious entries are kept in
/// the graph verbatim and collected into the report.
pub fn load_deps(path: &Path, corpus: &Corpus) -> Result<(DepGraph, DepReport), LoadError> {
    let file = path.display().to_string();
    let text =
        fs::read_to_string(path).map_err(|e| LoadError::Io { file: file.clone(), source: e })?;
    let data =
        parse_sexprs(&text).map_err(|e| LoadError::Parse { file: file.clone(), source: e })?;
    let mut graph = DepGraph::default();
    let mut report = DepReport::default();
    for (index, entry) in data.into_iter().enumerate() {
        let file = file.clone();
        let items = match &entry {
            Sexpr::List { items, tail: None } if items.len() == 3 => items,
            _ => return Err(LoadError::MalformedEntry { file, index, got: entry.to_string() }),
        };
        if !items[0].is_symbol(crate::sexpr::DEFAULT_PACKAGE, "DEPS") {
            return Err(LoadError::MalformedEntry { file, index, got: entry.to_string() });
        }
        let name = entry_symbol(&items[1]).ok_or_else(|| LoadError::MalformedEntry {
            file: file.clone(),
            index,
            got: entry.to_string(),
        })?;
        if graph.contains(&name) {
            return Err(LoadError::DuplicateDeps { file, index, name });
        }
        let supporters: Vec<String> = if items[2].is_nil() {
            Vec::new()
        } else {
            match &items[2] {
                Sexpr::List { items: sups, tail: None } => sups
                    .iter()
                    .map(|s| {
                        entry_symbol(s).ok_or_else(|| LoadError::MalformedEntry {
                            file: file.clone(),
                            index,
                            got: entry.to_string(),
                        })
                    })
                    .collect::<Result<_, _>>()?,
                _ => {
                    return Err(LoadError::MalformedEntry { file, index, got: entry.to_string() })
                }
            }
        };
        match corpus.seq_of(&name) {
            None => report.unknown_theorems.push(name.clone()),
            Some(seq) => {
                for s in &supporters {
                    match corpus.seq_of(s) {
                        None => report.dangling.push((name.clone(), s.clone())),
                        Some(sup_seq) if sup_seq >= seq => {
                            report.chronology_violations.push((name.clone(), s.clone()))
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        graph.insert(name, supporters);
    }
    Ok((graph, report))
}

/// Corpus-level aggregates; means are absent over empty denominators.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CorpusStats {
    pub files: usize,
    pub formulas: usize,
    pub theorems: usize,
    pub definitions: usize,
    /// Theorems with complete in-corpus, chronology-respecting deps —
    /// exactly the reprove problems — per category.
    pub problems_per_category: BTreeMap<String, usize>,
    pub distinct_features: usize,
    pub mean_features_per_formula: Option<f64>,
    pub mean_dependencies: Option<f64>,
}

/// True when `name` has recorded deps that all resolve inside the corpus
/// strictly earlier — the problem-generation criterion.
pub fn has_complete_deps(name: &str, corpus: &Corpus, deps: &DepGraph) -> bool {
    let Some(seq) = corpus.seq_of(name) else { return false };
    match deps.get(name) {
        None => false,
        Some(sups) => sups.iter().all(|s| corpus.seq_of(s).is_some_and(|ss| ss < seq)),
    }
}

pub fn corpus_stats(
    corpus: &Corpus,
    deps: &DepGraph,
    features: &BTreeMap<String, FeatureVector>,
) -> CorpusStats {
    let files: HashSet<&str> = corpus.formulas.iter().map(|f| f.book.as_str()).collect();
    let theorems = corpus.formulas.iter().filter(|f| f.kind == Kind::Theorem).count();

    let mut problems_per_category: BTreeMap<String, usize> = BTreeMap::new();
    for f in &corpus.formulas {
        if f.kind == Kind::Theorem && has_complete_deps(&f.name, corpus, deps) {
            *problems_per_category.entry(f.category.clone()).or_insert(0) += 1;
        }
    }

    let mut distinct: HashSet<&str> = HashSet::new();
    let mut feature_total = 0usize;
    let mut feature_docs = 0usize;
    for f in &corpus.formulas {
        if let Some(fv) = features.get(&f.name) {
            feature_docs += 1;
            feature_total += fv.distinct_count();
            distinct.extend(fv.keys());
        }
    }

    let mut dep_total = 0usize;
    let mut dep_docs = 0usize;
    for f in &corpus.formulas {
        if let Some(sups) = deps.get(&f.name) {
            dep_docs += 1;
            dep_total += sups.len();
        }
    }

    CorpusStats {
        files: files.len(),
        formulas: corpus.len(),
        theorems,
        definitions: corpus.len() - theorems,
        problems_per_category,
        distinct_features: distinct.len(),
        mean_features_per_formula: (feature_docs > 0)
            .then(|| feature_total as f64 / feature_docs as f64),
        mean_dependencies: (dep_docs > 0).then(|| dep_total as f64 / dep_docs as f64),
    }
}
