//! Push a whole corpus through the reorderer: one tree per line in,
//! one token line out, line numbers preserved no matter what.
//!
//!     cargo run --example corpus_pipeline

use treeorder::{fixtures, run_corpus, run_corpus_parallel, EngineConfig, RuleSet};

fn main() {
    let rules = RuleSet::builtin();
    let config = EngineConfig { fixpoint: true, ..EngineConfig::default() };

    // Corpus files are rarely clean. Mix in a blank line and a truncated
    // parse; neither may shift the remaining lines out of alignment.
    let mut corpus = String::new();
    for case in fixtures() {
        corpus.push_str(&case.tree);
        corpus.push('\n');
    }
    corpus.push('\n');
    corpus.push_str("(S (NP (DT the) (NN experiment)\n");

    let mut out = Vec::new();
    let summary = run_corpus(corpus.as_bytes(), &rules, &config, &mut out).unwrap();

    println!(
        "{} lines: {} blank, {} parse failures, {} engine failures",
        summary.lines, summary.blank_lines, summary.parse_failures, summary.engine_failures
    );
    println!("firings: {:?}", summary.firings);

    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), summary.lines as usize);
    println!("\nfirst line:  {}", lines[0]);
    // The broken line fell back to its recoverable tokens.
    println!("last line:   {}", lines[lines.len() - 1]);

    // Same corpus, four worker threads. Output is byte-identical because
    // results are written back in input order.
    let mut par = Vec::new();
    run_corpus_parallel(corpus.as_bytes(), &rules, &config, &mut par, 4).unwrap();
    assert_eq!(par, text.as_bytes());
    println!("\nparallel run matched the sequential output");
}
