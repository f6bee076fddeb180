//! Corpus-level orchestration shared by the CLI and the Python bindings.

use crate::corpus::{Corpus, DepGraph, Kind};
use crate::fof::print_fof;
use crate::forge::{
    gen_advice_problem, gen_reprove_problem, ForgeError, ProblemFile, SkippedProblem,
};
use crate::learn::{
    extract_features, idf_weights, rank_premises, FeatureVector, HistoryEntry, KnnConfig,
    Prediction,
};
use crate::translate::{translate, ArityTable, TranslateError, SPECIAL_AXIOMS_TEXT};
use crate::fof::Role;
use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// One corpus pass in chronological order.
pub fn build_arity_table(corpus: &Corpus) -> ArityTable {
    ArityTable::build(corpus.formulas.iter().map(|f| &f.term))
}

/// Features of every formula, keyed by name.
pub fn features_all(corpus: &Corpus) -> BTreeMap<String, FeatureVector> {
    corpus.formulas.iter().map(|f| (f.name.clone(), extract_features(&f.term))).collect()
}

/// Translate the whole corpus in seq order; definitions keep their role tag
/// but print as axioms.
pub fn translate_corpus(
    corpus: &Corpus,
    table: &ArityTable,
) -> Result<Vec<crate::fof::FofFormula>, TranslateError> {
    corpus
        .formulas
        .iter()
        .map(|f| {
            let role = match f.kind {
                Kind::Theorem => Role::Axiom,
                Kind::Definition => Role::DefinitionAsAxiom,
            };
            translate(&f.name, role, &f.term, table)
        })
        .collect()
}

/// Persist the translated corpus: `fof/00axioms.ax`, one `fof/<category>.ax`
/// per category, and `index.tsv` (seq, name, kind, category, book).
pub fn write_fof_corpus(
    corpus: &Corpus,
    table: &ArityTable,
    out: &Path,
) -> Result<Vec<PathBuf>, WriteCorpusError> {
    let formulas = translate_corpus(corpus, table)?;
    let fof_dir = out.join("fof");
    fs::create_dir_all(&fof_dir)?;
    let mut written = vec![PathBuf::from("fof/00axioms.ax")];
    fs::write(fof_dir.join("00axioms.ax"), SPECIAL_AXIOMS_TEXT)?;

    let mut per_category: BTreeMap<&str, String> = BTreeMap::new();
    let mut index = String::new();
    for (f, fof) in corpus.formulas.iter().zip(&formulas) {
        let text = per_category.entry(f.category.as_str()).or_default();
        text.push_str(&print_fof(fof));
        text.push('\n');
        index.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            f.seq, f.name, f.kind, f.category, f.book
        ));
    }
    for (category, text) in per_category {
        let rel = PathBuf::from("fof").join(format!("{category}.ax"));
        fs::write(out.join(&rel), text)?;
        written.push(rel);
    }
    fs::write(out.join("index.tsv"), index)?;
    written.push(PathBuf::from("index.tsv"));
    Ok(written)
}

#[derive(Debug, thiserror::Error)]
pub enum WriteCorpusError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Predictions for every theorem, computed per book category.
///
/// Within a category the experiment replays library growth: for each
/// theorem only earlier formulas of the same category are known, features
/// and IDF weights are taken over exactly that prefix, and the conjecture's
/// own features never enter the weighting.
pub fn predict_all(
    corpus: &Corpus,
    deps: &DepGraph,
    cfg: &KnnConfig,
    category_filter: Option<&str>,
) -> Vec<Prediction> {
    let features = features_all(corpus);
    let mut predictions = Vec::new();
    for category in corpus.categories() {
        if let Some(filter) = category_filter {
            if filter != category {
                continue;
            }
        }
        let members: Vec<_> =
            corpus.formulas.iter().filter(|f| f.category == category).collect();
        for (i, target) in members.iter().enumerate() {
            if target.kind != Kind::Theorem {
                continue;
            }
            let history: Vec<HistoryEntry> = members[..i]
                .iter()
                .map(|f| HistoryEntry {
                    name: f.name.as_str(),
                    seq: f.seq,
                    features: &features[&f.name],
                    has_deps: f.kind == Kind::Theorem && deps.contains(&f.name),
                })
                .collect();
            let weights = idf_weights(history.iter().map(|h| h.features));
            predictions.push(rank_premises(
                &target.name,
                &features[&target.name],
                target.seq,
                &history,
                deps,
                &weights,
                cfg,
            ));
        }
    }
    predictions
}

/// `name : premise1 premise2 ...` per line, in rank order.
pub fn write_predictions(predictions: &[Prediction], path: &Path) -> io::Result<()> {
    let mut out = String::new();
    for p in predictions {
        out.push_str(&p.conjecture);
        out.push_str(" :");
        for name in p.names() {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
    }
    fs::write(path, out)
}

/// Read a predictions file back; scores are not stored in the format, so
/// ranks are recovered with placeholder descending scores.
pub fn read_predictions(path: &Path) -> io::Result<Vec<Prediction>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (name, rest) = line.split_once(" :").ok_or_else(|| {
            io::Error::new(io::ErrorKind::InvalidData, format!("bad prediction line: {line}"))
        })?;
        let names: Vec<&str> = rest.split_whitespace().collect();
        let total = names.len();
        let ranked = names
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), (total - i) as f64))
            .collect();
        out.push(Prediction { conjecture: name.to_string(), ranked });
    }
    Ok(out)
}

/// Reproving problems for every theorem with complete recorded deps;
/// everything else with a deps entry is reported as skipped. Supporters may
/// come from any category, so the filter only restricts the conjectures.
pub fn gen_all_reprove(
    corpus: &Corpus,
    deps: &DepGraph,
    table: &ArityTable,
    category_filter: Option<&str>,
) -> Result<(Vec<ProblemFile>, Vec<SkippedProblem>), ForgeError> {
    let mut problems = Vec::new();
    let mut skipped = Vec::new();
    for f in &corpus.formulas {
        if f.kind != Kind::Theorem || !deps.contains(&f.name) {
            continue;
        }
        if category_filter.is_some_and(|c| c != f.category) {
            continue;
        }
        match gen_reprove_problem(&f.name, corpus, deps, table) {
            Ok(p) => problems.push(p),
            Err(
                e @ (ForgeError::DanglingSupporter { .. } | ForgeError::ChronologyViolation { .. }),
            ) => skipped.push(SkippedProblem { name: f.name.clone(), reason: e.to_string() }),
            Err(e) => return Err(e),
        }
    }
    Ok((problems, skipped))
}

/// Advice problems for every prediction (one per theorem).
pub fn gen_all_advice(
    corpus: &Corpus,
    predictions: &[Prediction],
    n: usize,
    table: &ArityTable,
) -> Result<(Vec<ProblemFile>, Vec<SkippedProblem>), ForgeError> {
    let mut problems = Vec::new();
    let mut skipped = Vec::new();
    for pred in predictions {
        match gen_advice_problem(&pred.conjecture, corpus, pred, n, table) {
            Ok(p) => problems.push(p),
            Err(e) => {
                skipped.push(SkippedProblem { name: pred.conjecture.clone(), reason: e.to_string() })
            }
        }
    }
    Ok((problems, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_deps, load_world, WorldFile};

    fn corpus_two_categories() -> (Corpus, DepGraph, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        for (rel, text) in [
            (
                "alpha/a.world",
                "(EVENT DEFINITION F-DEF (EQUAL (F X) X))\n\
                 (EVENT THEOREM F-IDEM (EQUAL (F (F X)) (F X)))\n\
                 (EVENT THEOREM F-IDEM2 (EQUAL (F (F (F X))) (F X)))\n",
            ),
            (
                "beta/b.world",
                "(EVENT DEFINITION G-DEF (EQUAL (G X) X))\n\
                 (EVENT THEOREM G-IDEM (EQUAL (G (G X)) (G X)))\n",
            ),
        ] {
            let path = dir.path().join(rel);
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, text).unwrap();
        }
        let files = vec![
            WorldFile { path: dir.path().join("alpha/a.world"), rel: "alpha/a.world".into() },
            WorldFile { path: dir.path().join("beta/b.world"), rel: "beta/b.world".into() },
        ];
        let corpus = load_world(&files).unwrap();
        let deps_path = dir.path().join("p.deps");
        fs::write(&deps_path, "(DEPS F-IDEM (F-DEF))\n(DEPS G-IDEM (G-DEF))\n").unwrap();
        let (deps, _) = load_deps(&deps_path, &corpus).unwrap();
        (corpus, deps, dir)
    }

    #[test]
    fn predictions_stay_inside_category_and_past() {
        let (corpus, deps, _dir) = corpus_two_categories();
        let preds = predict_all(&corpus, &deps, &KnnConfig::default(), None);
        // one prediction per theorem
        assert_eq!(preds.len(), 3);
        for p in &preds {
            let conj = corpus.get(&p.conjecture).unwrap();
            for name in p.names() {
                let premise = corpus.get(name).unwrap();
                assert!(premise.seq < conj.seq);
                assert_eq!(premise.category, conj.category);
            }
        }
        // F-IDEM2 should be advised its sibling theorem and the definition
        let p = preds.iter().find(|p| p.conjecture == "F-IDEM2").unwrap();
        let names: Vec<&str> = p.names().collect();
        assert!(names.contains(&"F-IDEM"));
        assert!(names.contains(&"F-DEF"));
    }

    #[test]
    fn predictions_roundtrip_through_file() {
        let (corpus, deps, dir) = corpus_two_categories();
        let preds = predict_all(&corpus, &deps, &KnnConfig::default(), None);
        let path = dir.path().join("predictions.txt");
        write_predictions(&preds, &path).unwrap();
        let back = read_predictions(&path).unwrap();
        assert_eq!(back.len(), preds.len());
        for (a, b) in preds.iter().zip(&back) {
            assert_eq!(a.conjecture, b.conjecture);
            assert_eq!(a.names().collect::<Vec<_>>(), b.names().collect::<Vec<_>>());
        }
    }

    #[test]
    fn category_filter() {
        let (corpus, deps, _dir) = corpus_two_categories();
        let preds = predict_all(&corpus, &deps, &KnnConfig::default(), Some("beta"));
        assert_eq!(preds.len(), 1);
        assert_eq!(preds[0].conjecture, "G-IDEM");
    }

    #[test]
    fn fof_corpus_written_deterministically() {
        let (corpus, _deps, dir) = corpus_two_categories();
        let table = build_arity_table(&corpus);
        let out1 = dir.path().join("out1");
        let out2 = dir.path().join("out2");
        write_fof_corpus(&corpus, &table, &out1).unwrap();
        write_fof_corpus(&corpus, &table, &out2).unwrap();
        for rel in ["fof/00axioms.ax", "fof/alpha.ax", "fof/beta.ax", "index.tsv"] {
            let a = fs::read_to_string(out1.join(rel)).unwrap();
            let b = fs::read_to_string(out2.join(rel)).unwrap();
            assert_eq!(a, b, "{rel} differs between runs");
        }
        let index = fs::read_to_string(out1.join("index.tsv")).unwrap();
        assert_eq!(index.lines().count(), corpus.len());
        assert!(index.starts_with("0\tF-DEF\tdefinition\talpha\talpha/a.world"));
    }

    #[test]
    fn reprove_and_advice_batches() {
        let (corpus, deps, _dir) = corpus_two_categories();
        let table = build_arity_table(&corpus);
        let (problems, skipped) = gen_all_reprove(&corpus, &deps, &table, None).unwrap();
        assert_eq!(problems.len(), 2);
        assert!(skipped.is_empty());
        let preds = predict_all(&corpus, &deps, &KnnConfig::default(), None);
        let (advice, skipped) = gen_all_advice(&corpus, &preds, 100, &table).unwrap();
        assert_eq!(advice.len(), 3);
        assert!(skipped.is_empty());
    }
}
