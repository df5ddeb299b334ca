//! Matching one rule against a node's children and rewriting the match.
//!
//! A rule's left side must tile the complete child sequence, anchored at
//! both ends. Elements are tried left to right; anything that can bind a
//! variable number of children (quantified elements and run-binding
//! classes) is greedy, trying its longest candidate first and backtracking
//! on failure. The first tiling found therefore carries the
//! lexicographically largest slot-length vector in left-side order.

use thiserror::Error;

use crate::dsl::{PatternElement, Quantifier, ReorderRule};
use crate::tags::TagRegistry;
use crate::treebank::ParseNode;

pub type SlotKey = (String, Option<u32>);

/// The result of a successful match: what each left-side slot bound,
/// in left-side order, plus the labels of dissolved wrapper nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub slots: Vec<(SlotKey, Vec<ParseNode>)>,
    pub wrappers: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("rule for `{expected}` nodes applied at a `{found}` node")]
    CategoryMismatch { expected: String, found: String },
}

impl Binding {
    pub fn get(&self, class: &str, index: Option<u32>) -> Option<&[ParseNode]> {
        self.slots
            .iter()
            .find(|((c, i), _)| c == class && *i == index)
            .map(|(_, nodes)| nodes.as_slice())
    }
}

fn label_matches(name: &str, label: &str, tags: &TagRegistry) -> bool {
    match tags.get(name) {
        Some(class) => class.matches(label),
        None => name == label,
    }
}

// how many children an element may bind: (min, max), max None = unbounded
fn effective_range(el: &PatternElement, tags: &TagRegistry) -> (usize, Option<usize>) {
    match el.quantifier {
        Quantifier::One => {
            if tags.get(&el.class).is_some_and(|c| c.sequence) {
                (1, None)
            } else {
                (1, Some(1))
            }
        }
        Quantifier::Optional => (0, Some(1)),
        Quantifier::Star => (0, None),
        Quantifier::Plus => (1, None),
    }
}

/// Matches `rule`'s left side against the children of `node`. Returns the
/// binding for the first complete tiling, or None.
pub fn match_children(
    rule: &ReorderRule,
    node: &ParseNode,
    tags: &TagRegistry,
) -> Result<Option<Binding>, MatchError> {
    if node.label() != rule.category {
        return Err(MatchError::CategoryMismatch {
            expected: rule.category.clone(),
            found: node.label().to_string(),
        });
    }
    let mut slots = Vec::new();
    let mut wrappers = Vec::new();
    if match_seq(&rule.lhs, node.children(), tags, &mut slots, &mut wrappers) {
        Ok(Some(Binding { slots, wrappers }))
    } else {
        Ok(None)
    }
}

fn match_seq(
    els: &[PatternElement],
    children: &[ParseNode],
    tags: &TagRegistry,
    slots: &mut Vec<(SlotKey, Vec<ParseNode>)>,
    wrappers: &mut Vec<String>,
) -> bool {
    let Some((el, rest)) = els.split_first() else {
        return children.is_empty();
    };

    if let Some(sub) = &el.nested {
        // one internal child of the right label whose children match `sub`
        let Some((first, rest_children)) = children.split_first() else {
            return false;
        };
        if first.is_leaf() || !label_matches(&el.class, first.label(), tags) {
            return false;
        }
        let (ns, nw) = (slots.len(), wrappers.len());
        wrappers.push(first.label().to_string());
        if match_seq(sub, first.children(), tags, slots, wrappers)
            && match_seq(rest, rest_children, tags, slots, wrappers)
        {
            return true;
        }
        slots.truncate(ns);
        wrappers.truncate(nw);
        return false;
    }

    let (min, max) = effective_range(el, tags);
    let hi = max.map_or(children.len(), |m| m.min(children.len()));
    if hi < min {
        return false;
    }
    let mut k = hi;
    loop {
        if children[..k].iter().all(|c| label_matches(&el.class, c.label(), tags)) {
            let (ns, nw) = (slots.len(), wrappers.len());
            slots.push(((el.class.clone(), el.index), children[..k].to_vec()));
            if match_seq(rest, &children[k..], tags, slots, wrappers) {
                return true;
            }
            slots.truncate(ns);
            wrappers.truncate(nw);
        }
        if k == min {
            return false;
        }
        k -= 1;
    }
}

/// Produces the rewritten child sequence: slots concatenated in right-side
/// order. Multi-node slots keep their original internal order; unfilled
/// optional slots contribute nothing; dissolved wrappers are gone.
pub fn rewrite(rule: &ReorderRule, binding: &Binding) -> Vec<ParseNode> {
    let mut out = Vec::new();
    for r in &rule.rhs {
        let nodes = binding
            .get(&r.class, r.index)
            .expect("rhs references are validated against lhs slots");
        out.extend(nodes.iter().cloned());
    }
    out
}
