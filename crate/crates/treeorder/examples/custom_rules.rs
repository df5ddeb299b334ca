//! Write your own tag classes and reordering rules from scratch.
//!
//!     cargo run --example custom_rules
//!
//! A rule is `CATEGORY(lhs : rhs)`. Names on the left bind children by
//! tag class, or by literal label when written in uppercase; the right
//! side is a permutation of those names. `?`, `*`, `+` quantify, and
//! square brackets match one level deeper.

use treeorder::{apply_rules, parse_tree, EngineConfig, RuleSet, TagRegistry};

const TAGS: &str = "
# verbs that can head a final cluster, and bare noun heads
finite = VBZ VBD VBP
nn = NN NNS
";

const RULES: &str = "
# verb last inside VP; np here is the builtin class for NP nodes
@id: verb-final
VP(finite np : np finite)

# article after its noun, DT matched as a literal label
@id: det-swap
NP(DT nn : nn DT)
";

fn main() {
    let mut tags = TagRegistry::builtin();
    tags.load_definitions(TAGS, false).unwrap();
    let rules = RuleSet::from_text(RULES, tags).unwrap();
    for rule in rules.rules() {
        println!("loaded {} (priority {})", rule.id, rule.priority);
    }

    let tree = parse_tree("(S (NP (DT the) (NN dog)) (VP (VBZ chases) (NP (DT a) (NN cat))))")
        .unwrap();
    let (out, trace) = apply_rules(&tree, &rules, &EngineConfig::default()).unwrap();
    println!("\nin:  {}", tree.tokens().join(" "));
    println!("out: {}", out.tokens().join(" "));
    for step in &trace.steps {
        println!("  fired {} at {:?}", step.rule_id, step.path);
    }

    // Rules are validated on load: every bound child must reappear on
    // the right side exactly once, so nothing can be dropped silently.
    let registry = TagRegistry::builtin();
    match RuleSet::from_text("VP(vpw np : vpw)", registry) {
        Ok(_) => unreachable!(),
        Err(e) => println!("\nbad rule rejected: {e}"),
    }
}
