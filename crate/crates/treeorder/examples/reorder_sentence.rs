//! Reorder one parsed English sentence into Hindi-like word order.
//!
//!     cargo run --example reorder_sentence
//!     cargo run --example reorder_sentence -- '(S (NP (PRP I)) (VP (VBP like) (NP (NN tea))))'
//!
//! Pass your own bracketed tree as the first argument, otherwise a
//! bundled sentence is used.

use treeorder::{apply_rules, fixtures, parse_tree, EngineConfig, RuleSet};

fn main() {
    let rules = RuleSet::builtin();
    let config = EngineConfig { fixpoint: true, ..EngineConfig::default() };

    if let Some(arg) = std::env::args().nth(1) {
        let tree = parse_tree(&arg).expect("bracketed parse tree");
        let (out, trace) = apply_rules(&tree, &rules, &config).unwrap();
        println!("in:  {}", tree.tokens().join(" "));
        println!("out: {}", out.tokens().join(" "));
        println!("     ({} rule firings)", trace.steps.len());
        return;
    }

    // No argument: run a few bundled sentences, with the reference Hindi
    // alongside so the reordering is easy to judge.
    for case in fixtures().into_iter().take(4) {
        let tree = parse_tree(&case.tree).unwrap();
        let (out, _) = apply_rules(&tree, &rules, &config).unwrap();
        println!("english:   {}", case.english);
        println!("reordered: {}", out.tokens().join(" "));
        println!("hindi:     {}\n", case.hindi);
    }
}
