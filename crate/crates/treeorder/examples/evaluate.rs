//! Score translation output with BLEU, NIST, mWER and mPER.
//!
//!     cargo run --example evaluate
//!
//! The hypotheses here are the reorderer's own output over the bundled
//! sentences, scored against the expected orders, and then against a
//! deliberately damaged copy to show the metrics reacting.

use treeorder::{
    apply_rules, evaluate, fixtures, parse_tree, EngineConfig, EvalCorpus, RuleSet,
};

fn score(label: &str, hyp: &[String], refs: &[Vec<String>]) {
    let corpus = EvalCorpus::from_lines(hyp, refs).unwrap();
    let r = evaluate(&corpus, 4, 5, false).unwrap();
    println!(
        "{label:10} BLEU {:.4}  NIST {:.4}  mWER {:5.2}  mPER {:5.2}",
        r.bleu, r.nist, r.mwer, r.mper
    );
}

fn main() {
    let rules = RuleSet::builtin();
    let config = EngineConfig { fixpoint: true, ..EngineConfig::default() };

    let mut hyp = Vec::new();
    let mut reference = Vec::new();
    for case in fixtures() {
        let tree = parse_tree(&case.tree).unwrap();
        let (out, _) = apply_rules(&tree, &rules, &config).unwrap();
        hyp.push(out.tokens().join(" "));
        reference.push(case.full);
    }
    let refs = vec![reference];

    score("system", &hyp, &refs);

    // Drop the first word of every line: unigram precision dips, word
    // error rates jump, and the brevity penalty starts to bite.
    let damaged: Vec<String> = hyp
        .iter()
        .map(|line| line.split_once(' ').map_or("", |(_, rest)| rest).to_string())
        .collect();
    score("damaged", &damaged, &refs);

    // Scoring is case-insensitive and whitespace-tokenized, nothing more.
    let shouted: Vec<String> = hyp.iter().map(|line| line.to_uppercase()).collect();
    score("uppercased", &shouted, &refs);
}
