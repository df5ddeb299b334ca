//! Shared generators and reference implementations for the integration
//! suites. Everything here is deliberately naive: exhaustive search and
//! brute-force enumeration that the real code must agree with.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use treeorder::dsl::{parse_rule, PatternElement, Quantifier, ReorderRule};
use treeorder::matcher::Binding;
use treeorder::metrics::{tokenize, EvalCorpus, Segment};
use treeorder::phrases::{PhrasePair, SentenceAlignment};
use treeorder::tags::TagRegistry;
use treeorder::treebank::ParseNode;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const PHRASE_LABELS: &[&str] = &[
    "S", "NP", "VP", "PP", "ADJP", "ADVP", "SBAR", "WHNP", "WHADVP", "QP", "PRT",
];

pub const POS_LABELS: &[&str] = &[
    "NN", "NNS", "NNP", "DT", "JJ", "JJR", "RB", "IN", "TO", "VB", "VBD", "VBZ", "VBN",
    "VBG", "MD", "CD", "PRP", ",", ".",
];

fn random_label(rng: &mut ChaCha8Rng) -> &'static str {
    if rng.gen_bool(0.5) {
        PHRASE_LABELS.choose(rng).unwrap()
    } else {
        POS_LABELS.choose(rng).unwrap()
    }
}

/// A random sentence-shaped tree with distinct leaf tokens.
pub fn random_sentence_tree(rng: &mut ChaCha8Rng) -> ParseNode {
    fn gen(rng: &mut ChaCha8Rng, counter: &mut usize, depth: usize) -> ParseNode {
        if depth == 0 || rng.gen_bool(0.45) {
            *counter += 1;
            ParseNode::leaf(*POS_LABELS.choose(rng).unwrap(), format!("w{counter}"))
        } else {
            let n = rng.gen_range(1..=4);
            let children = (0..n).map(|_| gen(rng, counter, depth - 1)).collect();
            ParseNode::node(*PHRASE_LABELS.choose(rng).unwrap(), children)
        }
    }
    let mut counter = 0;
    let n = rng.gen_range(1..=4);
    ParseNode::node("S", (0..n).map(|_| gen(rng, &mut counter, 4)).collect())
}

fn class_allows(name: &str, label: &str, tags: &TagRegistry) -> bool {
    match tags.get(name) {
        Some(c) => c.matches(label),
        None => name == label,
    }
}

fn span_range(el: &PatternElement, tags: &TagRegistry) -> (usize, Option<usize>) {
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

/// Every complete tiling of `children` by `elements`, each tiling given
/// as its leaf slot sizes in pattern order.
pub fn all_tilings(
    elements: &[PatternElement],
    children: &[ParseNode],
    tags: &TagRegistry,
) -> Vec<Vec<usize>> {
    fn go(
        elements: &[PatternElement],
        children: &[ParseNode],
        pos: usize,
        tags: &TagRegistry,
    ) -> Vec<Vec<usize>> {
        let Some((el, rest)) = elements.split_first() else {
            return if pos == children.len() { vec![Vec::new()] } else { Vec::new() };
        };
        let mut out = Vec::new();
        if let Some(sub) = &el.nested {
            if pos < children.len() {
                let child = &children[pos];
                if !child.is_leaf() && class_allows(&el.class, child.label(), tags) {
                    let subs = go(sub, child.children(), 0, tags);
                    if !subs.is_empty() {
                        let rests = go(rest, children, pos + 1, tags);
                        for sv in &subs {
                            for rv in &rests {
                                let mut v = sv.clone();
                                v.extend(rv.iter().copied());
                                out.push(v);
                            }
                        }
                    }
                }
            }
        } else {
            let (lo, hi) = span_range(el, tags);
            let hi = hi.map_or(children.len() - pos, |m| m.min(children.len() - pos));
            for k in lo..=hi {
                if children[pos..pos + k]
                    .iter()
                    .all(|c| class_allows(&el.class, c.label(), tags))
                {
                    for rv in go(rest, children, pos + k, tags) {
                        let mut v = Vec::with_capacity(rv.len() + 1);
                        v.push(k);
                        v.extend(rv);
                        out.push(v);
                    }
                }
            }
        }
        out
    }
    go(elements, children, 0, tags)
}

/// The tiling the matcher is specified to pick: the lexicographically
/// largest slot-size vector among all complete tilings.
pub fn oracle_best(
    rule: &ReorderRule,
    node: &ParseNode,
    tags: &TagRegistry,
) -> Option<Vec<usize>> {
    all_tilings(&rule.lhs, node.children(), tags).into_iter().max()
}

/// Reads the matched slot sizes out of a binding, in pattern order.
pub fn binding_leaf_lengths(rule: &ReorderRule, binding: &Binding) -> Vec<usize> {
    fn walk(els: &[PatternElement], b: &Binding, out: &mut Vec<usize>) {
        for el in els {
            match &el.nested {
                Some(sub) => walk(sub, b, out),
                None => out.push(b.get(&el.class, el.index).map_or(0, <[ParseNode]>::len)),
            }
        }
    }
    let mut out = Vec::new();
    walk(&rule.lhs, binding, &mut out);
    out
}

const CLASS_POOL: &[&str] = &[
    "np", "pp", "vp", "sbar", "vpw", "prep", "adv", "adj", "advP", "adjP", "whP", "punct",
    "dcP", "OP",
];

const LITERAL_POOL: &[&str] = &[
    "NP", "PP", "VP", "SBAR", "S", "IN", "TO", "NN", "JJ", "RB", "VBD", "ADVP",
];

fn gen_element(
    rng: &mut ChaCha8Rng,
    counter: &mut u32,
    rhs: &mut Vec<String>,
    allow_nested: bool,
) -> String {
    *counter += 1;
    let idx = *counter;
    if allow_nested && rng.gen_bool(0.2) {
        let name = *["PP", "NP", "SBAR", "S", "VP", "np", "pp"].choose(rng).unwrap();
        let k = rng.gen_range(1..=2);
        let subs: Vec<String> = (0..k)
            .map(|_| {
                let deeper = rng.gen_bool(0.3);
                gen_element(rng, counter, rhs, deeper)
            })
            .collect();
        format!("{name}{idx}[{}]", subs.join(" "))
    } else {
        let name = if rng.gen_bool(0.7) {
            *CLASS_POOL.choose(rng).unwrap()
        } else {
            *LITERAL_POOL.choose(rng).unwrap()
        };
        let quant = match rng.gen_range(0..10) {
            0 => "?",
            1 => "*",
            2 => "+",
            _ => "",
        };
        rhs.push(format!("{name}{idx}"));
        format!("{name}{idx}{quant}")
    }
}

/// A random well-formed rule: up to four elements, occasional nesting
/// and quantifiers, right side a shuffled permutation of the leaves.
pub fn random_rule(rng: &mut ChaCha8Rng, tags: &TagRegistry) -> ReorderRule {
    let category = *["VP", "NP", "PP", "ADJP", "X"].choose(rng).unwrap();
    let mut counter = 0;
    let mut rhs = Vec::new();
    let n = rng.gen_range(1..=4);
    let lhs: Vec<String> = (0..n).map(|_| gen_element(rng, &mut counter, &mut rhs, true)).collect();
    rhs.shuffle(rng);
    let text = format!("{category}({} : {})", lhs.join(" "), rhs.join(" "));
    parse_rule(&text, tags).unwrap_or_else(|e| panic!("generated `{text}`: {e}"))
}

fn matching_label(rng: &mut ChaCha8Rng, name: &str, tags: &TagRegistry) -> String {
    match tags.get(name) {
        Some(c) if c.members.is_empty() => random_label(rng).to_string(),
        Some(c) => c.members.iter().choose(rng).unwrap().clone(),
        None => name.to_string(),
    }
}

fn make_child(rng: &mut ChaCha8Rng, label: String) -> ParseNode {
    if rng.gen_bool(0.3) {
        let n = rng.gen_range(1..=2);
        let grand = (0..n)
            .map(|i| ParseNode::leaf(*POS_LABELS.choose(rng).unwrap(), format!("g{i}")))
            .collect();
        ParseNode::node(label, grand)
    } else {
        ParseNode::leaf(label, "w")
    }
}

fn random_child(rng: &mut ChaCha8Rng) -> ParseNode {
    let label = random_label(rng).to_string();
    make_child(rng, label)
}

/// Children sampled with no knowledge of any pattern.
pub fn random_children(rng: &mut ChaCha8Rng) -> Vec<ParseNode> {
    let n = rng.gen_range(0..=6);
    (0..n).map(|_| random_child(rng)).collect()
}

fn slot_size(rng: &mut ChaCha8Rng, el: &PatternElement, tags: &TagRegistry) -> usize {
    let seq = tags.get(&el.class).is_some_and(|c| c.sequence);
    match el.quantifier {
        Quantifier::One if seq => rng.gen_range(0..=3),
        Quantifier::One => *[0, 1, 1, 1, 1, 2].choose(rng).unwrap(),
        Quantifier::Optional => rng.gen_range(0..=1),
        Quantifier::Star => rng.gen_range(0..=2),
        Quantifier::Plus => rng.gen_range(0..=3),
    }
}

/// Children sampled to mostly satisfy `elements`, with deliberate
/// mistakes mixed in so near-misses get exercised too.
pub fn guided_children(
    rng: &mut ChaCha8Rng,
    elements: &[PatternElement],
    tags: &TagRegistry,
) -> Vec<ParseNode> {
    let mut out = Vec::new();
    for el in elements {
        if rng.gen_bool(0.08) {
            out.push(random_child(rng));
        }
        if let Some(sub) = &el.nested {
            let label = matching_label(rng, &el.class, tags);
            let mut grand = guided_children(rng, sub, tags);
            if grand.is_empty() {
                grand.push(random_child(rng));
            }
            out.push(ParseNode::node(label, grand));
        } else {
            for _ in 0..slot_size(rng, el, tags) {
                let label = if rng.gen_bool(0.9) {
                    matching_label(rng, &el.class, tags)
                } else {
                    random_label(rng).to_string()
                };
                out.push(make_child(rng, label));
            }
        }
    }
    out
}

/// A random sentence pair with a random word alignment, small enough
/// for quartic brute force.
pub fn random_alignment(rng: &mut ChaCha8Rng) -> SentenceAlignment {
    let slen = rng.gen_range(1..=8);
    let tlen = rng.gen_range(1..=8);
    let n = rng.gen_range(0..=(slen * tlen).min(12));
    let mut links = BTreeSet::new();
    for _ in 0..n {
        links.insert((rng.gen_range(0..slen), rng.gen_range(0..tlen)));
    }
    SentenceAlignment::new(
        (0..slen).map(|i| format!("s{i}")).collect(),
        (0..tlen).map(|j| format!("t{j}")).collect(),
        links,
    )
    .unwrap()
}

/// All consistent span pairs by direct enumeration: at least one link
/// inside, no link crossing either boundary, source capped at
/// `max_len`. With `minimal_target` only the tightest target span per
/// source span survives.
pub fn brute_force_pairs(
    sa: &SentenceAlignment,
    max_len: usize,
    minimal_target: bool,
) -> BTreeSet<PhrasePair> {
    let mut out = BTreeSet::new();
    let (slen, tlen) = (sa.source.len(), sa.target.len());
    for i1 in 0..slen {
        for i2 in i1..slen {
            if i2 - i1 + 1 > max_len {
                continue;
            }
            for j1 in 0..tlen {
                for j2 in j1..tlen {
                    let mut any = false;
                    let mut ok = true;
                    for &(s, t) in &sa.links {
                        let s_in = i1 <= s && s <= i2;
                        let t_in = j1 <= t && t <= j2;
                        any |= s_in && t_in;
                        if s_in != t_in {
                            ok = false;
                            break;
                        }
                    }
                    if !(any && ok) {
                        continue;
                    }
                    if minimal_target {
                        let ts = sa
                            .links
                            .iter()
                            .filter(|&&(s, _)| i1 <= s && s <= i2)
                            .map(|&(_, t)| t);
                        let (lo, hi) = ts.fold((usize::MAX, 0), |(lo, hi), t| {
                            (lo.min(t), hi.max(t))
                        });
                        if (lo, hi) != (j1, j2) {
                            continue;
                        }
                    }
                    out.insert(PhrasePair { source: (i1, i2), target: (j1, j2) });
                }
            }
        }
    }
    out
}

const WORDS: &[&str] = &[
    "the", "a", "cat", "dog", "sat", "ran", "on", "mat", "tree", "big", "small", "and",
    "fast", "slow", "bird", "flew", "over", "river", "stone", "red",
];

pub fn random_tokens(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Vec<String> {
    (0..rng.gen_range(lo..=hi)).map(|_| WORDS.choose(rng).unwrap().to_string()).collect()
}

/// A corpus whose first reference equals the hypothesis exactly; every
/// sensible metric must report a perfect score on it.
pub fn identity_corpus(rng: &mut ChaCha8Rng) -> EvalCorpus {
    let n = rng.gen_range(1..=5);
    let segments = (0..n)
        .map(|_| {
            let hyp = random_tokens(rng, 4, 12);
            let mut references = vec![hyp.clone()];
            for _ in 0..rng.gen_range(0..=2) {
                references.push(random_tokens(rng, 4, 12));
            }
            Segment { hypothesis: hyp, references }
        })
        .collect();
    EvalCorpus::new(segments).unwrap()
}

/// A corpus where every reference of a segment has the same length, so
/// the error-rate denominators agree no matter which reference wins.
pub fn clustered_corpus(rng: &mut ChaCha8Rng) -> EvalCorpus {
    let n = rng.gen_range(1..=5);
    let segments = (0..n)
        .map(|_| {
            let base = random_tokens(rng, 3, 10);
            let references = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let mut r = base.clone();
                    match rng.gen_range(0..3) {
                        0 => {}
                        1 => r.shuffle(rng),
                        _ => {
                            for _ in 0..rng.gen_range(1..=2) {
                                let i = rng.gen_range(0..r.len());
                                r[i] = WORDS.choose(rng).unwrap().to_string();
                            }
                        }
                    }
                    r
                })
                .collect();
            let hypothesis = match rng.gen_range(0..3) {
                0 => base.clone(),
                1 => {
                    let mut h = base.clone();
                    h.shuffle(rng);
                    h
                }
                _ => random_tokens(rng, 1, 12),
            };
            Segment { hypothesis, references }
        })
        .collect();
    EvalCorpus::new(segments).unwrap()
}

pub fn corpus_from(pairs: &[(&str, &[&str])]) -> EvalCorpus {
    EvalCorpus::new(
        pairs
            .iter()
            .map(|(h, rs)| Segment {
                hypothesis: tokenize(h),
                references: rs.iter().map(|r| tokenize(r)).collect(),
            })
            .collect(),
    )
    .unwrap()
}
