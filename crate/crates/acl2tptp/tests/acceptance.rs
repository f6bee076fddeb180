//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The corpus-scale numbers of the original evaluation (tens of thousands
//! of formulas, a prover farm) are out of reach here by design; criterion
//! 10 substitutes a prover integration test that runs only when a FOF
//! prover is available on this machine.

mod common;

use acl2tptp::bench::{cover, precision_count, read_results, run_batch, scoreboard, write_results, AtpResult, ProverConfig, SzsStatus};
use acl2tptp::corpus::{has_complete_deps, load_deps, load_world, read_manifest, Corpus, DepGraph, Kind};
use acl2tptp::fof::{parse_fof, parse_fof_file, print_fof, Role};
use acl2tptp::learn::{extract_features, idf_weights, rank_premises, FeatureVector, HistoryEntry, KnnConfig, TieBreak};
use acl2tptp::pipeline::{build_arity_table, gen_all_advice, gen_all_reprove, predict_all};
use acl2tptp::term::remove_lambdas;
use acl2tptp::translate::{special_axioms, translate, ArityTable, SPECIAL_AXIOMS_TEXT};
use common::*;
use rand::prelude::*;
use rand::rngs::StdRng;
use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

fn data(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(rel)
}

fn load_mini() -> (Corpus, DepGraph) {
    let root = data("mini");
    let files = read_manifest(&root.join("manifest.lst"), &root).expect("manifest");
    let corpus = load_world(&files).expect("mini corpus loads");
    let (deps, report) = load_deps(&root.join("proofs.deps"), &corpus).expect("deps load");
    assert!(report.is_clean(), "mini corpus deps must be clean: {report:?}");
    (corpus, deps)
}

fn pass(criterion: u32, what: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
    println!("acceptance {criterion}: PASS ({what}, {elapsed:?})");
}

fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Criterion 1: the CDR-CONS and E0-ORDINALP dump entries translate to the
/// published formulas, with the universal closure added.
#[test]
fn c01_paper_fixture_translation() {
    let started = Instant::now();
    let (corpus, _) = load_mini();
    let table = build_arity_table(&corpus);

    for (name, fixture, prefix) in [
        ("CDR-CONS", "paper_cdr_cons.fof", "![X,Y]:"),
        ("E0-ORDINALP", "paper_e0_ordinalp.fof", "![X]:"),
    ] {
        let formula = corpus.get(name).expect("fixture entry present");
        let mine = translate(&formula.name, Role::Axiom, &formula.term, &table).expect("translates");
        let mine_text = print_fof(&mine);
        let paper_text = std::fs::read_to_string(data(fixture)).expect("fixture file");

        // tree equality after adding the quantifier closure
        let paper = parse_fof(&paper_text).expect("paper fixture parses");
        let mine_parsed = parse_fof(&mine_text).expect("own output parses");
        assert_eq!(mine_parsed.name, paper.name);
        assert_eq!(mine_parsed.role, paper.role);
        let inner = match &mine_parsed.body {
            acl2tptp::fof::FofExpr::Forall(_, body) => body.as_ref().clone(),
            other => other.clone(),
        };
        assert_eq!(inner, paper.body, "{name}: bodies differ under the closure");
        assert!(mine_parsed.is_closed(), "{name}: emitted formula must be closed");
        assert!(!paper.is_closed(), "paper spelling is open before the closure pass");

        // byte-level diff is exactly the quantifier prefix, modulo whitespace
        let mine_stripped = strip_ws(&mine_text);
        let paper_stripped = strip_ws(&paper_text);
        assert_eq!(mine_stripped.replacen(prefix, "", 1), paper_stripped, "{name}");
    }
    pass(1, "both §-fixtures tree-equal with closure", started, Duration::from_secs(1));
}

/// Criterion 2: the 13 special axioms print byte-identically to the golden
/// transcription.
#[test]
fn c02_special_axioms_golden() {
    let started = Instant::now();
    let golden = std::fs::read_to_string(data("golden_special_axioms.ax")).expect("golden file");
    assert_eq!(SPECIAL_AXIOMS_TEXT, golden, "axiom block must match the golden file byte for byte");
    let axioms = special_axioms();
    assert_eq!(axioms.len(), 13);
    // the verbatim text and the structures agree
    let reparsed = parse_fof_file(&golden).expect("golden parses");
    assert_eq!(reparsed, axioms);
    assert_eq!(axioms[0].name, "spcax1");
    assert!(axioms.iter().all(|a| a.is_closed()));
    pass(2, "13 axioms byte-identical", started, Duration::from_secs(1));
}

/// Criterion 3: closure + arity uniqueness over 500 random terms.
#[test]
fn c03_closure_and_arity_uniqueness() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xC10);
    let terms: Vec<_> = (0..500).map(|_| random_term(&mut rng, 6)).collect();
    let table = ArityTable::build(terms.iter());
    for (i, term) in terms.iter().enumerate() {
        let f = translate(&format!("RAND-{i}"), Role::Axiom, term, &table).expect("translates");
        let text = print_fof(&f);
        let parsed = parse_fof(&text).unwrap_or_else(|e| panic!("reparse failed on {text}: {e}"));
        assert!(
            parsed.body.free_vars().is_empty(),
            "free variables in emitted formula: {text}"
        );
    }
    assert!(table.atoms_unambiguous(), "one final atom must mean one (symbol, arity)");
    pass(3, "500 random terms closed, arity table unambiguous", started, Duration::from_secs(10));
}

/// Criterion 4: lambda removal equals the independent substitution oracle
/// on 100 random nested-lambda terms.
#[test]
fn c04_lambda_removal_oracle() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x1A3);
    let mut with_lambda = 0;
    for i in 0..100 {
        let env = vec!["U".to_string(), "V".to_string()];
        let term = random_lambda_term(&mut rng, &env, 5);
        if !term.is_lambda_free() {
            with_lambda += 1;
        }
        let got = remove_lambdas(&term).expect("well-formed");
        let want = oracle_remove_lambdas(&term);
        assert_eq!(got, want, "case {i} diverged from the oracle:\n{term:?}");
        assert!(got.is_lambda_free(), "case {i} still has a lambda");
        // idempotence
        assert_eq!(remove_lambdas(&got).expect("lambda-free"), got);
    }
    assert!(with_lambda >= 50, "generator must actually produce lambdas ({with_lambda}/100)");
    pass(4, "100 nested-lambda terms equal the oracle", started, Duration::from_secs(5));
}

/// Criterion 5: rank_premises equals the brute-force scorer exactly,
/// including tie-breaks, on 20 random corpora and k in {1,3,5,40}.
#[test]
fn c05_knn_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5EED);
    for case in 0..20 {
        let size = rng.gen_range(5..=50);
        let corpus = random_corpus(&mut rng, size);
        for &k in &[1usize, 3, 5, 40] {
            let cfg = KnnConfig { k, n: 100, tie_break: TieBreak::LaterSeqFirst };
            for conj in 1..size {
                let history: Vec<HistoryEntry> = (0..conj)
                    .map(|i| HistoryEntry {
                        name: &corpus.names[i],
                        seq: i,
                        features: &corpus.features[i],
                        has_deps: corpus.has_deps[i],
                    })
                    .collect();
                let weights = idf_weights(history.iter().map(|h| h.features));
                let mine = rank_premises(
                    &corpus.names[conj],
                    &corpus.features[conj],
                    conj,
                    &history,
                    &corpus.deps,
                    &weights,
                    &cfg,
                );
                let want = oracle_rank_premises(
                    &corpus.names[conj],
                    &corpus.features[conj],
                    conj,
                    &history,
                    &corpus.deps,
                    &weights,
                    &cfg,
                );
                assert_eq!(
                    mine.ranked, want.ranked,
                    "case {case}, k={k}, conjecture {}",
                    corpus.names[conj]
                );
            }
        }
    }
    pass(5, "20 corpora, k in {1,3,5,40}, exact match", started, Duration::from_secs(30));
}

/// Criterion 6: precision = cover * |deps| on all fixture conjectures, and
/// cover is exactly 1 whenever the deps are inside the advice window.
#[test]
fn c06_metric_identities() {
    let started = Instant::now();
    let (corpus, deps) = load_mini();
    let predictions = predict_all(&corpus, &deps, &KnnConfig::default(), None);
    let mut checked = 0;
    for pred in &predictions {
        let Some(sups) = deps.get(&pred.conjecture) else { continue };
        if sups.is_empty() {
            continue;
        }
        let true_deps: BTreeSet<&str> = sups.iter().map(String::as_str).collect();
        let names: Vec<&str> = pred.names().collect();
        let c = cover(&names, &true_deps, 100);
        let p = precision_count(&names, &true_deps, 100);
        assert_eq!(p as f64, c * true_deps.len() as f64, "identity fails for {}", pred.conjecture);
        checked += 1;
    }
    assert_eq!(checked, 9, "all nine fixture conjectures with deps take part");

    // property: deps inside the top-n window force cover exactly 1.0
    let mut rng = StdRng::seed_from_u64(0xC0VE & 0xFFFF);
    for _ in 0..200 {
        let n = rng.gen_range(1..=100);
        let n_deps = rng.gen_range(1..=n.min(10));
        let deps_set: BTreeSet<String> = (0..n_deps).map(|i| format!("d{i}")).collect();
        let mut prediction: Vec<String> = deps_set.iter().cloned().collect();
        for i in 0..rng.gen_range(0..40) {
            prediction.push(format!("noise{i}"));
        }
        // deps first, shuffled inside the window
        prediction[..n_deps].shuffle(&mut rng);
        let view: Vec<&str> = prediction.iter().map(String::as_str).collect();
        let dep_view: BTreeSet<&str> = deps_set.iter().map(String::as_str).collect();
        assert_eq!(cover(&view, &dep_view, n), 1.0);
        assert_eq!(precision_count(&view, &dep_view, n), n_deps);
    }
    pass(6, "identity on 9 fixtures + 200 generated cases", started, Duration::from_secs(5));
}

/// Criterion 7: idf weight is 0 for universal features and ln(N) for
/// singletons.
#[test]
fn c07_tfidf_extremes() {
    let started = Instant::now();
    for n in [1usize, 2, 7, 100] {
        let docs: Vec<FeatureVector> = (0..n)
            .map(|i| {
                FeatureVector::from_pairs([("everywhere", 1), (format!("only{i}").as_str(), 1)])
            })
            .collect();
        let w = idf_weights(docs.iter());
        assert_eq!(w.weight("everywhere"), 0.0, "universal feature at N={n}");
        for i in 0..n {
            assert_eq!(w.weight(&format!("only{i}")), (n as f64).ln(), "singleton at N={n}");
        }
    }
    pass(7, "0 for universal, ln(N) for singleton", started, Duration::from_secs(1));
}

/// Criterion 8: the bundled corpus yields one reprove problem per
/// theorem-with-deps and one advice problem per theorem, all valid FOF.
#[test]
fn c08_mini_corpus_end_to_end() {
    let started = Instant::now();
    let (corpus, deps) = load_mini();
    assert_eq!(corpus.len(), 15);
    let table = build_arity_table(&corpus);

    let theorems: Vec<_> =
        corpus.formulas.iter().filter(|f| f.kind == Kind::Theorem).collect();
    let with_deps =
        theorems.iter().filter(|f| has_complete_deps(&f.name, &corpus, &deps)).count();

    let (reprove, skipped) = gen_all_reprove(&corpus, &deps, &table, None).expect("reprove batch");
    assert!(skipped.is_empty(), "mini corpus has clean deps: {skipped:?}");
    assert_eq!(reprove.len(), with_deps);
    assert_eq!(reprove.len(), 9);

    let predictions = predict_all(&corpus, &deps, &KnnConfig::default(), None);
    let (advice, skipped) = gen_all_advice(&corpus, &predictions, 100, &table).expect("advice");
    assert!(skipped.is_empty());
    assert_eq!(advice.len(), theorems.len());
    assert_eq!(advice.len(), 12);

    for p in reprove.iter().chain(advice.iter()) {
        let text = p.render();
        let parsed = parse_fof_file(&text)
            .unwrap_or_else(|e| panic!("problem {} does not parse: {e}", p.conjecture_name));
        assert_eq!(
            parsed.iter().filter(|f| f.role == Role::Conjecture).count(),
            1,
            "{} must have exactly one conjecture",
            p.conjecture_name
        );
        assert_eq!(parsed.len(), p.axioms.len() + 1);
        // the 13 special axioms lead every problem
        assert_eq!(parsed[..13], special_axioms()[..]);
        assert!(parsed.iter().all(|f| f.is_closed()));
    }

    // when the prediction covers the true deps, reprove axioms are a
    // subset of advice axioms
    let mut inclusion_checked = 0;
    for r in &reprove {
        let a = advice.iter().find(|a| a.conjecture_name == r.conjecture_name).expect("pair");
        let pred = predictions.iter().find(|p| p.conjecture == r.conjecture_name).expect("pred");
        let advised: BTreeSet<&str> = pred.names().collect();
        let true_deps: BTreeSet<&str> =
            deps.get(&r.conjecture_name).expect("deps").iter().map(String::as_str).collect();
        if true_deps.is_subset(&advised) {
            let r_names: BTreeSet<&String> = r.axioms.iter().map(|f| &f.name).collect();
            let a_names: BTreeSet<&String> = a.axioms.iter().map(|f| &f.name).collect();
            assert!(r_names.is_subset(&a_names), "{}", r.conjecture_name);
            inclusion_checked += 1;
        }
    }
    assert!(inclusion_checked > 0, "at least one conjecture exercises the inclusion check");
    pass(8, "9 reprove + 12 advice problems, all valid", started, Duration::from_secs(5));
}

/// Criterion 9: scoreboard on the synthetic two-prover results log.
#[test]
fn c09_scoreboard_hand_example() {
    let started = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let log = dir.path().join("results.tsv");
    let results = vec![
        AtpResult { problem: "c/p1.p".into(), prover: "proverA".into(), status: SzsStatus::Theorem, seconds: 0.5 },
        AtpResult { problem: "c/p1.p".into(), prover: "proverB".into(), status: SzsStatus::GaveUp, seconds: 1.0 },
        AtpResult { problem: "c/p2.p".into(), prover: "proverA".into(), status: SzsStatus::Theorem, seconds: 0.2 },
        AtpResult { problem: "c/p2.p".into(), prover: "proverB".into(), status: SzsStatus::Theorem, seconds: 0.3 },
        AtpResult { problem: "c/p3.p".into(), prover: "proverA".into(), status: SzsStatus::Timeout, seconds: 10.0 },
        AtpResult { problem: "c/p3.p".into(), prover: "proverB".into(), status: SzsStatus::Timeout, seconds: 10.0 },
    ];
    write_results(&results, &log).expect("write log");
    let board = scoreboard(&read_results(&log).expect("read log"));
    let a = board.rows.iter().find(|r| r.id == "proverA").expect("row A");
    let b = board.rows.iter().find(|r| r.id == "proverB").expect("row B");
    assert_eq!(a.sotac, Some(0.75));
    assert_eq!(b.sotac, Some(0.5));
    assert_eq!(a.unique, 1);
    assert_eq!(b.unique, 0);
    assert_eq!(board.total_problems, 3);
    assert_eq!(board.any_proved, 2);
    assert!(board.alarms.is_empty());
    // the report always prints every cell, including empty SotAC/Disproved
    assert!(board.format_text().contains("any"));
    pass(9, "SotAC {0.75, 0.5}, unique {1, 0}", started, Duration::from_secs(1));
}

/// Criterion 10 substitute: when a FOF prover is available, the mini-corpus
/// problems whose conjectures follow equationally from their axioms must
/// come back `Theorem` within 10s, and the Theorem/CounterSatisfiable
/// disjointness alarm must never fire. Skips when no prover is configured.
#[test]
fn c10_prover_integration_when_available() {
    let started = Instant::now();
    let Some(prover) = find_prover() else {
        println!("acceptance 10: SKIP (no FOF prover found; set ACL2TPTP_TEST_PROVER to enable)");
        return;
    };
    let (corpus, deps) = load_mini();
    let table = build_arity_table(&corpus);
    let (problems, _) = gen_all_reprove(&corpus, &deps, &table, None).expect("problems");
    let dir = tempfile::tempdir().expect("tempdir");
    let written = acl2tptp::forge::write_problems(&problems, dir.path()).expect("write");
    let paths: Vec<(std::path::PathBuf, String)> = written
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "p"))
        .map(|p| (dir.path().join(p), p.display().to_string()))
        .collect();
    let results = run_batch(&[prover], &paths, 4);
    let board = scoreboard(&results);
    assert!(board.alarms.is_empty(), "soundness alarm fired: {:?}", board.alarms);

    let equational = [
        "id_car",
        "second_of_list",
        "car_cons_quoted",
        "let_square",
        "double_zero",
        "weird_var",
        "str_const",
    ];
    for name in equational {
        let r = results
            .iter()
            .find(|r| r.problem.ends_with(&format!("{name}.p")))
            .unwrap_or_else(|| panic!("missing result for {name}"));
        assert_eq!(
            r.status,
            SzsStatus::Theorem,
            "{name} follows equationally from its axioms but got {}",
            r.status
        );
    }
    println!("acceptance 10: PASS (prover run, {} problems, elapsed {:?})", paths.len(), started.elapsed());
}

/// A prover to use for criterion 10: the ACL2TPTP_TEST_PROVER command
/// template, or the first of a few well-known binaries on PATH.
fn find_prover() -> Option<ProverConfig> {
    if let Ok(cmd) = std::env::var("ACL2TPTP_TEST_PROVER") {
        let cfg = ProverConfig { id: "env-prover".into(), command: cmd, timeout: 10 };
        return cfg.validate().ok().map(|_| cfg);
    }
    let candidates: [(&str, &str); 4] = [
        ("eprover", "eprover --auto --cpu-limit={timeout} {problem}"),
        ("vampire", "vampire --mode casc -t {timeout} {problem}"),
        ("cvc5", "cvc5 --tlimit={timeout}000 {problem}"),
        ("cvc4", "cvc4 --tlimit={timeout}000 {problem}"),
    ];
    for (id, command) in candidates {
        let cfg = ProverConfig { id: id.into(), command: command.into(), timeout: 10 };
        if acl2tptp::bench::check_executables(std::slice::from_ref(&cfg)).is_ok() {
            return Some(cfg);
        }
    }
    None
}
