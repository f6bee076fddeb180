//! Independent reference implementations and generators shared by the
//! integration tests. Everything here is deliberately written the naive way
//! and kept apart from the library's own code paths.

use acl2tptp::corpus::DepGraph;
use acl2tptp::learn::{FeatureVector, HistoryEntry, KnnConfig, Prediction, TieBreak, WeightMap};
use acl2tptp::term::{AclTerm, FnHead, Number};
use num_bigint::BigInt;
use rand::prelude::*;
use rand::rngs::StdRng;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Lambda-removal oracle: substitute into the raw body first (respecting
// shadowing), then keep reducing the result.

fn oracle_subst(term: &AclTerm, subst: &BTreeMap<String, AclTerm>) -> AclTerm {
    match term {
        AclTerm::Var(v) => subst.get(v).cloned().unwrap_or_else(|| term.clone()),
        AclTerm::App { head, args } => {
            let head = match head {
                FnHead::Name(f) => FnHead::Name(f.clone()),
                FnHead::Lambda { params, body } => {
                    // inner parameters shadow the outer substitution
                    let mut narrowed = subst.clone();
                    for p in params {
                        narrowed.remove(p);
                    }
                    FnHead::Lambda {
                        params: params.clone(),
                        body: Box::new(oracle_subst(body, &narrowed)),
                    }
                }
            };
            AclTerm::App { head, args: args.iter().map(|a| oracle_subst(a, subst)).collect() }
        }
        _ => term.clone(),
    }
}

pub fn oracle_remove_lambdas(term: &AclTerm) -> AclTerm {
    match term {
        AclTerm::App { head: FnHead::Lambda { params, body }, args } => {
            let args: Vec<AclTerm> = args.iter().map(oracle_remove_lambdas).collect();
            assert_eq!(params.len(), args.len(), "oracle only handles well-formed terms");
            let subst: BTreeMap<String, AclTerm> =
                params.iter().cloned().zip(args.into_iter()).collect();
            oracle_remove_lambdas(&oracle_subst(body, &subst))
        }
        AclTerm::App { head: FnHead::Name(f), args } => AclTerm::App {
            head: FnHead::Name(f.clone()),
            args: args.iter().map(oracle_remove_lambdas).collect(),
        },
        _ => term.clone(),
    }
}

// ---------------------------------------------------------------------------
// Feature oracle: enumerate every subterm position into a flat list, then
// count prints and head symbols.

fn all_positions<'a>(term: &'a AclTerm, out: &mut Vec<&'a AclTerm>) {
    out.push(term);
    if let AclTerm::App { args, .. } = term {
        for a in args {
            all_positions(a, out);
        }
    }
}

fn oracle_base(symbol: &str) -> String {
    if symbol == "EQUAL" {
        "acleq".to_string()
    } else {
        symbol.to_lowercase().replace('-', "_")
    }
}

fn oracle_subterm_print(term: &AclTerm) -> String {
    match term {
        AclTerm::Var(_) => "_".to_string(),
        AclTerm::ConstSym(s) => oracle_base(s),
        AclTerm::ConstNum(n) => n.atom_text(),
        AclTerm::ConstStr(s) => format!("\"{s}\""),
        AclTerm::ConstQuoted(d) => format!("quote({d})"),
        AclTerm::App { head, args } => {
            let head = match head {
                FnHead::Name(f) => oracle_base(f),
                FnHead::Lambda { params, body } => {
                    format!("lambda([{}],{})", params.join(","), oracle_subterm_print(body))
                }
            };
            if args.is_empty() {
                head
            } else {
                let args: Vec<String> = args.iter().map(oracle_subterm_print).collect();
                format!("{head}({})", args.join(","))
            }
        }
    }
}

pub fn oracle_features(term: &AclTerm) -> FeatureVector {
    let mut positions = Vec::new();
    all_positions(term, &mut positions);
    let mut fv = FeatureVector::default();
    for t in &positions {
        fv.add(&oracle_subterm_print(t), 1);
        if let AclTerm::App { head: FnHead::Name(f), .. } = t {
            fv.add(&oracle_base(f), 1);
        }
    }
    fv
}

// ---------------------------------------------------------------------------
// Quadratic-time k-NN reference scorer: recompute every similarity, select
// neighbors by full sort, and score each candidate by scanning the whole
// neighbor list.

fn oracle_similarity(a: &FeatureVector, b: &FeatureVector, w: &WeightMap) -> f64 {
    let mut shared: Vec<&str> = Vec::new();
    for f in a.keys() {
        let mut found = false;
        for g in b.keys() {
            if f == g {
                found = true;
                break;
            }
        }
        if found {
            shared.push(f);
        }
    }
    shared.sort_unstable();
    let mut sum = 0.0;
    for f in shared {
        sum += w.weight(f);
    }
    sum
}

pub fn oracle_rank_premises(
    conjecture_name: &str,
    conjecture: &FeatureVector,
    conjecture_seq: usize,
    history: &[HistoryEntry],
    deps: &DepGraph,
    weights: &WeightMap,
    cfg: &KnnConfig,
) -> Prediction {
    let past: Vec<&HistoryEntry> =
        history.iter().filter(|e| e.seq < conjecture_seq).collect();

    let mut neighbors: Vec<(&HistoryEntry, f64)> = past
        .iter()
        .filter(|e| e.has_deps)
        .map(|e| (*e, oracle_similarity(conjecture, e.features, weights)))
        .collect();
    neighbors.sort_by(|(ea, sa), (eb, sb)| {
        sb.partial_cmp(sa).unwrap_or(std::cmp::Ordering::Equal).then(eb.seq.cmp(&ea.seq))
    });
    if neighbors.len() > cfg.k {
        neighbors.truncate(cfg.k);
    }

    let mut ranked: Vec<(String, f64, usize)> = Vec::new();
    for candidate in &past {
        let mut score = 0.0;
        for (t, sim) in &neighbors {
            let votes = deps
                .get(t.name)
                .map(|sups| sups.iter().any(|s| s == candidate.name))
                .unwrap_or(false);
            if votes {
                score += sim;
            }
            if t.name == candidate.name {
                score += sim;
            }
        }
        if score > 0.0 {
            ranked.push((candidate.name.to_string(), score, candidate.seq));
        }
    }
    ranked.sort_by(|(na, sa, qa), (nb, sb, qb)| {
        let by_score = sb.partial_cmp(sa).unwrap_or(std::cmp::Ordering::Equal);
        let tie = match cfg.tie_break {
            TieBreak::LaterSeqFirst => qb.cmp(qa).then(na.cmp(nb)),
            TieBreak::NameFirst => na.cmp(nb).then(qb.cmp(qa)),
        };
        by_score.then(tie)
    });
    ranked.truncate(cfg.n);
    Prediction {
        conjecture: conjecture_name.to_string(),
        ranked: ranked.into_iter().map(|(n, s, _)| (n, s)).collect(),
    }
}

// ---------------------------------------------------------------------------
// Random term generators.

const FN_POOL: &[&str] = &[
    "F", "G", "BAR-BAZ", "E0-ORD-<", "<", "BINARY-+", "CONS", "CAR", "EQUAL", "IF", "my fn",
    "P::H", "F_2",
];
const VAR_POOL: &[&str] = &["X", "Y", "Z", "A-B", "my var", "x", "ACL2-VAR", "W9"];

/// Random lambda-free term with the given depth budget, drawing from up to
/// eight distinct variables and a pool of symbols that stresses mangling.
pub fn random_term(rng: &mut StdRng, depth: usize) -> AclTerm {
    if depth == 0 || rng.gen_bool(0.3) {
        match rng.gen_range(0..6) {
            0 => AclTerm::Var(VAR_POOL[rng.gen_range(0..VAR_POOL.len())].to_string()),
            1 => AclTerm::ConstSym(
                ["T", "NIL", "FOO", "CONS"][rng.gen_range(0..4)].to_string(),
            ),
            2 => AclTerm::ConstNum(Number::Int(BigInt::from(rng.gen_range(-30i64..30)))),
            3 => AclTerm::ConstNum(Number::Ratio {
                num: BigInt::from(rng.gen_range(1i64..9) * 2 + 1),
                den: BigInt::from(2),
            }),
            4 => AclTerm::ConstStr(["hi", "a b", "don't"][rng.gen_range(0..3)].to_string()),
            _ => AclTerm::ConstQuoted(acl2tptp::sexpr::Sexpr::list(vec![
                acl2tptp::sexpr::Sexpr::symbol("A"),
                acl2tptp::sexpr::Sexpr::int(rng.gen_range(0..5)),
            ])),
        }
    } else {
        let f = FN_POOL[rng.gen_range(0..FN_POOL.len())];
        let arity = rng.gen_range(1..=3);
        let args = (0..arity).map(|_| random_term(rng, depth - 1)).collect();
        AclTerm::App { head: FnHead::Name(f.to_string()), args }
    }
}

/// Random term that may contain (nested) closed lambda applications: every
/// lambda body draws its variables from that lambda's own parameters, and
/// each parameter occurs in its body at least once.
pub fn random_lambda_term(rng: &mut StdRng, env: &[String], depth: usize) -> AclTerm {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        if !env.is_empty() && rng.gen_bool(0.7) {
            AclTerm::Var(env[rng.gen_range(0..env.len())].clone())
        } else {
            AclTerm::ConstNum(Number::Int(BigInt::from(rng.gen_range(0i64..10))))
        }
    } else if rng.gen_bool(0.45) {
        // lambda application, parameters drawn from a small pool so
        // shadowing of outer names happens regularly
        let n_params = rng.gen_range(1..=3);
        let mut params: Vec<String> = Vec::new();
        while params.len() < n_params {
            let p = ["X", "Y", "Z"][rng.gen_range(0..3)].to_string();
            if !params.contains(&p) {
                params.push(p);
            }
        }
        let mut body = random_lambda_term(rng, &params, depth - 1);
        // close over every formal: append unused parameters
        let used = body.free_vars();
        let missing: Vec<&String> = params.iter().filter(|p| !used.contains(*p)).collect();
        if !missing.is_empty() {
            let mut args = vec![body];
            args.extend(missing.into_iter().map(|p| AclTerm::Var(p.clone())));
            body = AclTerm::App { head: FnHead::Name("LST".to_string()), args };
        }
        let args = (0..params.len()).map(|_| random_lambda_term(rng, env, depth - 1)).collect();
        AclTerm::App { head: FnHead::Lambda { params, body: Box::new(body) }, args }
    } else {
        let f = ["F", "G", "CONS"][rng.gen_range(0..3)];
        let arity = rng.gen_range(1..=2);
        let args = (0..arity).map(|_| random_lambda_term(rng, env, depth - 1)).collect();
        AclTerm::App { head: FnHead::Name(f.to_string()), args }
    }
}

/// A synthetic corpus for k-NN testing: names, feature vectors, and random
/// dependencies on strictly earlier formulas.
pub struct SyntheticCorpus {
    pub names: Vec<String>,
    pub features: Vec<FeatureVector>,
    pub deps: DepGraph,
    pub has_deps: Vec<bool>,
}

pub fn random_corpus(rng: &mut StdRng, size: usize) -> SyntheticCorpus {
    let names: Vec<String> = (0..size).map(|i| format!("TH{i:03}")).collect();
    let features: Vec<FeatureVector> = (0..size)
        .map(|_| {
            let n_features = rng.gen_range(1..=6);
            let mut fv = FeatureVector::default();
            for _ in 0..n_features {
                let f = format!("f{}", rng.gen_range(0..20));
                fv.add(&f, rng.gen_range(1..=3));
            }
            fv
        })
        .collect();
    let mut deps = DepGraph::default();
    let mut has_deps = vec![false; size];
    for i in 0..size {
        if i > 0 && rng.gen_bool(0.6) {
            let n_deps = rng.gen_range(0..=i.min(5));
            let mut sups: Vec<String> = Vec::new();
            for _ in 0..n_deps {
                let s = names[rng.gen_range(0..i)].clone();
                if !sups.contains(&s) {
                    sups.push(s);
                }
            }
            deps.insert(names[i].clone(), sups);
            has_deps[i] = true;
        }
    }
    SyntheticCorpus { names, features, deps, has_deps }
}
