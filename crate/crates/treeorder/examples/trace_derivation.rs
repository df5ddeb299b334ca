//! Watch every rule firing on the way from English order to the
//! reordered output, then replay the recorded trace to prove it
//! reproduces the same tree.
//!
//!     cargo run --example trace_derivation

use treeorder::{apply_rules, parse_tree, replay_trace, EngineConfig, RuleSet};

fn main() {
    let rules = RuleSet::builtin();
    let config = EngineConfig { fixpoint: true, ..EngineConfig::default() };

    let tree = parse_tree(
        "(S (NP (DT The) (NN wall)) (VP (VBD was) (VP (VBN built) \
         (S (VP (TO to) (VP (VB protect) (NP (PRP it))))))) (. .))",
    )
    .unwrap();

    let (out, trace) = apply_rules(&tree, &rules, &config).unwrap();
    println!("input:  {}", trace.input_tokens.join(" "));
    for step in &trace.steps {
        // path is the child-index route from the root to the rewritten node
        println!(
            "  {:6} at {:?}: {} -> {}",
            step.rule_id,
            step.path,
            step.before.join(" "),
            step.after.join(" ")
        );
    }
    println!("output: {}", trace.output_tokens.join(" "));

    // A trace is a certificate. Replaying it against the original input
    // must land on the identical tree; a stale or edited trace is rejected.
    let replayed = replay_trace(&tree, &trace, &rules).unwrap();
    assert_eq!(replayed, out);
    println!("replay: ok ({} steps)", trace.steps.len());

    let mut broken = trace.clone();
    broken.steps.reverse();
    match replay_trace(&tree, &broken, &rules) {
        Ok(_) => println!("replay of reversed trace unexpectedly passed"),
        Err(e) => println!("reversed trace rejected: {e}"),
    }
}
