//! Applies a rule set over whole trees and corpora.
//!
//! Traversal is pre-order: a node is rewritten before its children are
//! visited, so a rule that lifts material out of a nested phrase runs
//! before any rule that would fire inside it. At each internal node the
//! rules are tried in priority order and the first one whose category
//! and pattern match fires. By default one firing per node; with
//! [`EngineConfig::fixpoint`] matching repeats at the node until nothing
//! fires or the iteration limit trips.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::{match_children, rewrite};
use crate::ruleset::RuleSet;
use crate::treebank::{extract_tokens_lenient, parse_tree, ParseNode, TreeError};

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Re-match at each node until no rule fires there.
    pub fixpoint: bool,
    /// Cap on firings per node in fixpoint mode. Hitting the cap while a
    /// rule still matches is an error, not silent truncation.
    pub max_iterations: usize,
    /// When set, only rules with these ids may fire.
    pub enabled: Option<BTreeSet<String>>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { fixpoint: false, max_iterations: 10, enabled: None }
    }
}

impl EngineConfig {
    /// Restrict to the named rules, e.g. to watch a single rule in isolation.
    pub fn only<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        EngineConfig {
            enabled: Some(ids.into_iter().map(Into::into).collect()),
            ..EngineConfig::default()
        }
    }

    fn allows(&self, id: &str) -> bool {
        self.enabled.as_ref().is_none_or(|set| set.contains(id))
    }
}

/// One rule firing: where it happened and what the child sequence
/// looked like on either side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Child indices from the root down to the rewritten node.
    pub path: Vec<usize>,
    pub rule_id: String,
    pub before: Vec<String>,
    pub after: Vec<String>,
}

/// Everything that happened while reordering one tree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTrace {
    pub steps: Vec<TraceStep>,
    pub input_tokens: Vec<String>,
    pub output_tokens: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("node at path {path:?} still matches after {limit} firings")]
    IterationLimitExceeded { path: Vec<usize>, limit: usize },
}

#[derive(Debug, Error)]
pub enum ReorderError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Rewrites `tree` under `config`, returning the result and its trace.
pub fn apply_rules(
    tree: &ParseNode,
    rules: &RuleSet,
    config: &EngineConfig,
) -> Result<(ParseNode, RuleTrace), EngineError> {
    let mut out = tree.clone();
    let mut steps = Vec::new();
    let mut path = Vec::new();
    visit(&mut out, rules, config, &mut path, &mut steps)?;
    let trace = RuleTrace {
        steps,
        input_tokens: tree.tokens(),
        output_tokens: out.tokens(),
    };
    Ok((out, trace))
}

fn visit(
    node: &mut ParseNode,
    rules: &RuleSet,
    config: &EngineConfig,
    path: &mut Vec<usize>,
    steps: &mut Vec<TraceStep>,
) -> Result<(), EngineError> {
    if node.is_leaf() {
        return Ok(());
    }
    let mut firings = 0usize;
    loop {
        let found = rules
            .rules()
            .iter()
            .filter(|r| config.allows(&r.id) && r.category == node.label())
            .find_map(|r| {
                match_children(r, node, rules.tags())
                    .expect("category pre-filtered")
                    .map(|binding| (r, binding))
            });
        let Some((rule, binding)) = found else { break };
        if config.fixpoint && firings >= config.max_iterations {
            return Err(EngineError::IterationLimitExceeded {
                path: path.clone(),
                limit: config.max_iterations,
            });
        }
        let before = child_labels(node);
        let children = rewrite(rule, &binding);
        steps.push(TraceStep {
            path: path.clone(),
            rule_id: rule.id.clone(),
            before,
            after: children.iter().map(|c| c.label().to_string()).collect(),
        });
        *node = ParseNode::node(node.label(), children);
        firings += 1;
        if !config.fixpoint {
            break;
        }
    }
    if let ParseNode::Node { children, .. } = node {
        for (i, child) in children.iter_mut().enumerate() {
            path.push(i);
            visit(child, rules, config, path, steps)?;
            path.pop();
        }
    }
    Ok(())
}

fn child_labels(node: &ParseNode) -> Vec<String> {
    node.children().iter().map(|c| c.label().to_string()).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {step}: no node at path {path:?}")]
    BadPath { step: usize, path: Vec<usize> },
    #[error("step {step}: rule `{id}` is not in the rule set")]
    UnknownRule { step: usize, id: String },
    #[error("step {step}: tree at path {path:?} does not match the recorded firing")]
    StateMismatch { step: usize, path: Vec<usize> },
}

/// Re-runs a recorded trace against `input`, checking each firing as it
/// goes. Lets a consumer verify that a trace honestly describes how an
/// output was produced.
pub fn replay_trace(
    input: &ParseNode,
    trace: &RuleTrace,
    rules: &RuleSet,
) -> Result<ParseNode, ReplayError> {
    let mut tree = input.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        let mismatch = ReplayError::StateMismatch { step: i, path: step.path.clone() };
        let node = node_at_mut(&mut tree, &step.path)
            .ok_or(ReplayError::BadPath { step: i, path: step.path.clone() })?;
        let rule = rules
            .get(&step.rule_id)
            .ok_or(ReplayError::UnknownRule { step: i, id: step.rule_id.clone() })?;
        if node.is_leaf() || rule.category != node.label() || child_labels(node) != step.before {
            return Err(mismatch);
        }
        let Ok(Some(binding)) = match_children(rule, node, rules.tags()) else {
            return Err(mismatch);
        };
        let children = rewrite(rule, &binding);
        let after: Vec<String> = children.iter().map(|c| c.label().to_string()).collect();
        if after != step.after {
            return Err(mismatch);
        }
        *node = ParseNode::node(node.label(), children);
    }
    Ok(tree)
}

fn node_at_mut<'a>(tree: &'a mut ParseNode, path: &[usize]) -> Option<&'a mut ParseNode> {
    let mut cur = tree;
    for &i in path {
        cur = match cur {
            ParseNode::Node { children, .. } => children.get_mut(i)?,
            ParseNode::Leaf { .. } => return None,
        };
    }
    Some(cur)
}

/// Parses one bracketed line and returns the reordered tokens.
pub fn reorder_sentence(
    line: &str,
    rules: &RuleSet,
    config: &EngineConfig,
) -> Result<String, ReorderError> {
    let tree = parse_tree(line)?;
    let (out, _) = apply_rules(&tree, rules, config)?;
    Ok(out.tokens().join(" "))
}

/// Counters for one corpus run. Failed lines fall back to a token dump
/// of the input rather than being dropped, so output stays line-aligned
/// with input.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub lines: u64,
    pub blank_lines: u64,
    pub parse_failures: u64,
    pub engine_failures: u64,
    /// Firing count per rule id.
    pub firings: BTreeMap<String, u64>,
}

enum LineOutcome {
    Blank,
    Reordered(BTreeMap<String, u64>),
    ParseFailed(String),
    EngineFailed(String),
}

fn process_line(line: &str, rules: &RuleSet, config: &EngineConfig) -> (String, LineOutcome) {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return (String::new(), LineOutcome::Blank);
    }
    match parse_tree(trimmed) {
        Err(e) => (
            extract_tokens_lenient(trimmed).join(" "),
            LineOutcome::ParseFailed(e.to_string()),
        ),
        Ok(tree) => match apply_rules(&tree, rules, config) {
            Err(e) => (tree.tokens().join(" "), LineOutcome::EngineFailed(e.to_string())),
            Ok((out, trace)) => {
                let mut counts = BTreeMap::new();
                for step in &trace.steps {
                    *counts.entry(step.rule_id.clone()).or_insert(0) += 1;
                }
                (out.tokens().join(" "), LineOutcome::Reordered(counts))
            }
        },
    }
}

fn record(summary: &mut CorpusSummary, lineno: usize, outcome: LineOutcome) {
    summary.lines += 1;
    match outcome {
        LineOutcome::Blank => summary.blank_lines += 1,
        LineOutcome::Reordered(counts) => {
            for (id, n) in counts {
                *summary.firings.entry(id).or_insert(0) += n;
            }
        }
        LineOutcome::ParseFailed(msg) => {
            summary.parse_failures += 1;
            log::warn!("line {lineno}: {msg}; passing tokens through");
        }
        LineOutcome::EngineFailed(msg) => {
            summary.engine_failures += 1;
            log::warn!("line {lineno}: {msg}; passing tokens through");
        }
    }
}

/// Reorders a corpus line by line: one bracketed tree per input line,
/// one token line out. Blank lines stay blank; unparseable lines pass
/// their tokens through unreordered and are counted, not fatal.
pub fn run_corpus<R: BufRead, W: Write>(
    input: R,
    rules: &RuleSet,
    config: &EngineConfig,
    output: &mut W,
) -> io::Result<CorpusSummary> {
    let mut summary = CorpusSummary::default();
    for (i, line) in input.lines().enumerate() {
        let (out, outcome) = process_line(&line?, rules, config);
        record(&mut summary, i + 1, outcome);
        writeln!(output, "{out}")?;
    }
    Ok(summary)
}

/// Same contract as [`run_corpus`] but fans lines out over a thread
/// pool. Output order is preserved. `threads == 0` sizes the pool to
/// the machine.
pub fn run_corpus_parallel<R: BufRead, W: Write>(
    input: R,
    rules: &RuleSet,
    config: &EngineConfig,
    output: &mut W,
    threads: usize,
) -> io::Result<CorpusSummary> {
    let lines: Vec<String> = input.lines().collect::<Result<_, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(io::Error::other)?;
    let results: Vec<(String, LineOutcome)> =
        pool.install(|| lines.par_iter().map(|l| process_line(l, rules, config)).collect());
    let mut summary = CorpusSummary::default();
    for (i, (out, outcome)) in results.into_iter().enumerate() {
        record(&mut summary, i + 1, outcome);
        writeln!(output, "{out}")?;
    }
    Ok(summary)
}
