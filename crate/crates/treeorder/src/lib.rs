//! Rule-driven reordering of constituency parse trees.
//!
//! The crate parses Penn Treebank style bracketed trees, matches each
//! constituent against declarative transformation rules written in a small
//! pattern language, and rewrites matched nodes into a new child order. It
//! ships a rule set that moves English clauses toward the head-final order
//! of Hindi, and bundles the corpus tooling used to measure the effect:
//! n-gram translation metrics and alignment-consistent phrase statistics.
//!
//! Entry points: [`treebank::parse_tree`] for trees, [`ruleset::RuleSet`]
//! for rules, [`engine::reorder_sentence`] to run one over the other.

pub mod cli;
pub mod dsl;
pub mod engine;
pub mod matcher;
pub mod metrics;
pub mod phrases;
pub mod ruleset;
pub mod tags;
pub mod treebank;

pub use dsl::{parse_rule, parse_ruleset, ReorderRule};
pub use engine::{
    apply_rules, reorder_sentence, replay_trace, run_corpus, run_corpus_parallel, CorpusSummary,
    EngineConfig, EngineError, RuleTrace, TraceStep,
};
pub use matcher::{match_children, rewrite, Binding};
pub use metrics::{
    bag_distance, bleu, evaluate, levenshtein, mper, mwer, nist, EvalCorpus, EvalReport, Segment,
};
pub use phrases::{
    compare_reports, extract_phrase_pairs, parse_alignment_line, phrase_report, ExtractionMode,
    PhrasePair, PhraseReport, SentenceAlignment,
};
pub use ruleset::{fixtures, FixtureCase, RuleSet};
pub use tags::{TagClass, TagRegistry};
pub use treebank::{parse_tree, ParseNode, TreeError};
