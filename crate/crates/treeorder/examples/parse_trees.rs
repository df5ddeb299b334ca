//! Read bracketed constituency trees and look at what came out.
//!
//!     cargo run --example parse_trees

use treeorder::{parse_tree, ParseNode};

fn show(node: &ParseNode, depth: usize) {
    let pad = "  ".repeat(depth);
    match node {
        ParseNode::Leaf { label, token } => println!("{pad}{label} \"{token}\""),
        ParseNode::Node { label, children } => {
            println!("{pad}{label}");
            for child in children {
                show(child, depth + 1);
            }
        }
    }
}

fn main() {
    let line = "(ROOT (S (NP (PRP It)) (VP (VBZ rains) (PP (IN in) (NP (NNP Cherrapunji)))) (. .)))";
    let tree = parse_tree(line).unwrap();

    // The ROOT wrapper is dropped during parsing, so the tree starts at S.
    println!("tokens: {}", tree.tokens().join(" "));
    show(&tree, 0);

    // Round trip: a tree prints back in the same bracketed form it came from.
    println!("\nprinted: {tree}");

    // Malformed input gives a positioned error rather than a panic.
    for bad in ["(S (NP (DT the) (NN cat))", "", "(S ((NN cat)))"] {
        match parse_tree(bad) {
            Ok(t) => println!("parsed: {t}"),
            Err(e) => println!("rejected {bad:?}: {e}"),
        }
    }
}
