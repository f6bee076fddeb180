//! Feature extraction, TF-IDF weighting and k-NN premise ranking.
//!
//! A formula is characterized by every subterm with all variables unified
//! into the placeholder `_`, plus every function symbol it applies. Premises
//! are ranked by neighbors voting for their recorded dependencies, each vote
//! weighted by the neighbor's similarity to the conjecture.

use crate::corpus::DepGraph;
use crate::term::{AclTerm, FnHead};
use crate::translate::base_atom;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

/// Sparse feature multiset; counts are always at least 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector(BTreeMap<String, u32>);

impl FeatureVector {
    pub fn add(&mut self, feature: &str, count: u32) {
        if count == 0 {
            return;
        }
        match self.0.entry(feature.to_string()) {
            Entry::Vacant(e) => {
                e.insert(count);
            }
            Entry::Occupied(mut e) => *e.get_mut() += count,
        }
    }

    pub fn count(&self, feature: &str) -> u32 {
        self.0.get(feature).copied().unwrap_or(0)
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.0.contains_key(feature)
    }

    pub fn distinct_count(&self) -> usize {
        self.0.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u32)>) -> FeatureVector {
        let mut fv = FeatureVector::default();
        for (k, v) in pairs {
            fv.add(k, v);
        }
        fv
    }
}

/// Canonical print of a subterm with every variable replaced by `_`.
/// Function symbols use their base TPTP spelling so features line up with
/// the translated corpus.
fn subterm_print(term: &AclTerm, out: &mut String) {
    match term {
        AclTerm::Var(_) => out.push('_'),
        AclTerm::ConstSym(s) => out.push_str(&base_atom(s)),
        AclTerm::ConstNum(n) => out.push_str(&n.atom_text()),
        AclTerm::ConstStr(s) => {
            out.push('"');
            out.push_str(s);
            out.push('"');
        }
        AclTerm::ConstQuoted(d) => {
            out.push_str("quote(");
            out.push_str(&d.to_string());
            out.push(')');
        }
        AclTerm::App { head, args } => {
            match head {
                FnHead::Name(f) => out.push_str(&base_atom(f)),
                FnHead::Lambda { params, body } => {
                    out.push_str("lambda([");
                    out.push_str(&params.join(","));
                    out.push_str("],");
                    subterm_print(body, out);
                    out.push(')');
                }
            }
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    subterm_print(a, out);
                }
                out.push(')');
            }
        }
    }
}

/// Features of one formula: the variable-unified print of every subterm
/// occurrence, plus the head symbol of every application.
pub fn extract_features(term: &AclTerm) -> FeatureVector {
    fn go(term: &AclTerm, fv: &mut FeatureVector) {
        let mut s = String::new();
        subterm_print(term, &mut s);
        fv.add(&s, 1);
        if let AclTerm::App { head, args } = term {
            if let FnHead::Name(f) = head {
                fv.add(&base_atom(f), 1);
            }
            for a in args {
                go(a, fv);
            }
        }
    }
    let mut fv = FeatureVector::default();
    go(term, &mut fv);
    fv
}

/// IDF weights over a document set: `weight(f) = ln(N / df(f))`.
///
/// Features absent from the map (not seen in any document) are treated as
/// maximally informative, `ln(N)`.
#[derive(Debug, Clone, Default)]
pub struct WeightMap {
    weights: BTreeMap<String, f64>,
    pub n_docs: usize,
}

impl WeightMap {
    pub fn weight(&self, feature: &str) -> f64 {
        match self.weights.get(feature) {
            Some(&w) => w,
            None => (self.n_docs.max(1) as f64).ln(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Every weight multiplied by `c`; ranking must be invariant under this.
    pub fn scaled(&self, c: f64) -> WeightMap {
        WeightMap {
            weights: self.weights.iter().map(|(k, w)| (k.clone(), w * c)).collect(),
            n_docs: self.n_docs,
        }
    }

    pub fn from_weights(weights: BTreeMap<String, f64>, n_docs: usize) -> WeightMap {
        WeightMap { weights, n_docs }
    }
}

/// Document-frequency weights over a corpus prefix.
pub fn idf_weights<'a>(documents: impl IntoIterator<Item = &'a FeatureVector>) -> WeightMap {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    let mut n = 0usize;
    for doc in documents {
        n += 1;
        for f in doc.keys() {
            *df.entry(f.to_string()).or_insert(0) += 1;
        }
    }
    let n_f = n as f64;
    let weights = df.into_iter().map(|(f, d)| (f, (n_f / d as f64).ln())).collect();
    WeightMap { weights, n_docs: n }
}

/// IDF-weighted overlap: the sum of weights of features present in both
/// vectors, accumulated in lexicographic feature order.
pub fn similarity(a: &FeatureVector, b: &FeatureVector, w: &WeightMap) -> f64 {
    let mut sum = 0.0;
    for f in a.keys() {
        if b.contains(f) {
            sum += w.weight(f);
        }
    }
    sum
}

/// How score ties are resolved after sorting by score descending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Larger seq first, then name ascending.
    #[default]
    LaterSeqFirst,
    /// Name ascending, then larger seq first.
    NameFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnConfig {
    /// Neighbor count.
    pub k: usize,
    /// Advice length: how many premises a prediction keeps.
    pub n: usize,
    pub tie_break: TieBreak,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig { k: 40, n: 100, tie_break: TieBreak::default() }
    }
}

/// Ranked premise advice for one conjecture. Every premise is strictly
/// earlier in chronology and scores are non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub conjecture: String,
    pub ranked: Vec<(String, f64)>,
}

impl Prediction {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ranked.iter().map(|(n, _)| n.as_str())
    }

    pub fn top_n(&self, n: usize) -> impl Iterator<Item = &str> {
        self.ranked.iter().take(n).map(|(n, _)| n.as_str())
    }
}

/// One known formula visible to the ranker: strictly earlier in chronology
/// than the conjecture being advised.
#[derive(Debug, Clone, Copy)]
pub struct HistoryEntry<'a> {
    pub name: &'a str,
    pub seq: usize,
    pub features: &'a FeatureVector,
    /// Only theorems with recorded dependencies can be neighbors.
    pub has_deps: bool,
}

/// Distance-weighted k-NN premise ranking.
///
/// The k most similar earlier theorems with recorded dependencies vote for
/// their dependencies with weight `sim(conjecture, neighbor)`, and each
/// neighbor is itself a candidate premise with the same weight. Positive
/// scores are sorted descending, ties broken per the config, and the list
/// truncated to `cfg.n`.
pub fn rank_premises(
    conjecture_name: &str,
    conjecture: &FeatureVector,
    conjecture_seq: usize,
    history: &[HistoryEntry],
    deps: &DepGraph,
    weights: &WeightMap,
    cfg: &KnnConfig,
) -> Prediction {
    debug_assert!(cfg.k >= 1 && cfg.n >= 1);
    let seq_of: HashMap<&str, usize> =
        history.iter().filter(|e| e.seq < conjecture_seq).map(|e| (e.name, e.seq)).collect();

    // Neighbor selection: similarity descending, later seq first on ties.
    let mut neighbors: Vec<(&HistoryEntry, f64)> = history
        .iter()
        .filter(|e| e.has_deps && e.seq < conjecture_seq)
        .map(|e| (e, similarity(conjecture, e.features, weights)))
        .collect();
    neighbors.sort_by(|(ea, sa), (eb, sb)| {
        sb.partial_cmp(sa).unwrap_or(std::cmp::Ordering::Equal).then(eb.seq.cmp(&ea.seq))
    });
    neighbors.truncate(cfg.k);

    // Each neighbor votes for its dependencies and for itself, in rank order.
    let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
    for (entry, sim) in &neighbors {
        if let Some(sups) = deps.get(entry.name) {
            for p in sups {
                if seq_of.contains_key(p.as_str()) {
                    *scores.entry(p.as_str()).or_insert(0.0) += sim;
                }
            }
        }
        *scores.entry(entry.name).or_insert(0.0) += sim;
    }

    let mut ranked: Vec<(String, f64)> = scores
        .into_iter()
        .filter(|&(_, s)| s > 0.0)
        .map(|(name, s)| (name.to_string(), s))
        .collect();
    ranked.sort_by(|(na, sa), (nb, sb)| {
        let by_score = sb.partial_cmp(sa).unwrap_or(std::cmp::Ordering::Equal);
        let tie = match cfg.tie_break {
            TieBreak::LaterSeqFirst => {
                seq_of[nb.as_str()].cmp(&seq_of[na.as_str()]).then(na.cmp(nb))
            }
            TieBreak::NameFirst => na.cmp(nb).then(seq_of[nb.as_str()].cmp(&seq_of[na.as_str()])),
        };
        by_score.then(tie)
    });
    ranked.truncate(cfg.n);
    Prediction { conjecture: conjecture_name.to_string(), ranked }
}
