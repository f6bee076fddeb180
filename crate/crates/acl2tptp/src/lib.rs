//! Translates ACL2 world exports into TPTP first-order problems, learns
//! premise selection from proof dependencies (distance-weighted k-NN over
//! TF-IDF features), and benchmarks external first-order provers on the
//! generated problem sets.
//!
//! The pipeline stages map onto the modules below:
//!
//! * [`sexpr`] reads the S-expression dump files,
//! * [`term`] classifies data into logical terms and removes lambdas,
//! * [`fof`] is the FOF subset used for output (AST, printer, parser),
//! * [`translate`] turns terms into `term != nil` FOF axioms,
//! * [`corpus`] holds the chronologically ordered formula corpus,
//! * [`learn`] extracts features and ranks premises,
//! * [`forge`] assembles `.p` problem files,
//! * [`bench`] runs provers and computes the evaluation tables.

pub mod bench;
pub mod config;
pub mod corpus;
pub mod fof;
pub mod forge;
pub mod learn;
pub mod pipeline;
pub mod sexpr;
pub mod term;
pub mod translate;
