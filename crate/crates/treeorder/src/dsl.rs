//! The rule notation.
//!
//! A rule is written `CATEGORY(lhs : rhs)`. The left side is a sequence of
//! pattern elements matched against a node's children; the right side
//! lists the same elements in their output order. An element is a tag
//! class or an uppercase literal label, optionally followed by a numeric
//! discriminator (`np1`, `pp2`) and a quantifier (`?`, `*`, `+`), or by a
//! bracketed sub-pattern (`PP[prep np]`) that matches one child of that
//! label whose own children match the bracketed sequence. `#` starts a
//! comment; a line `@id: name` names the rule that follows it.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::tags::TagRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    One,
    Optional,
    Star,
    Plus,
}

impl Quantifier {
    pub fn mark(self) -> &'static str {
        match self {
            Quantifier::One => "",
            Quantifier::Optional => "?",
            Quantifier::Star => "*",
            Quantifier::Plus => "+",
        }
    }
}

/// One element of a rule's left side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternElement {
    pub class: String,
    pub index: Option<u32>,
    pub quantifier: Quantifier,
    /// Present iff written `class[ ... ]`; such an element matches a
    /// single child and its children, and is dissolved on rewrite.
    pub nested: Option<Vec<PatternElement>>,
}

/// One reference on a rule's right side, resolved against the left side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhsRef {
    pub class: String,
    pub index: Option<u32>,
    pub quantifier: Quantifier,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorderRule {
    pub id: String,
    /// Node label this rule applies at.
    pub category: String,
    pub lhs: Vec<PatternElement>,
    pub rhs: Vec<RhsRef>,
    /// Rank among the rules of a set; lower is tried first.
    pub priority: u32,
    pub source_text: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DslError {
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("unknown tag class or label `{0}`")]
    UnknownClass(String),
    #[error("rhs reference `{0}` does not match any lhs element")]
    UnresolvedRhsReference(String),
    #[error("lhs element `{0}` never appears in rhs")]
    DroppedLhsElement(String),
    #[error("rhs references `{0}` more than once")]
    DuplicateRhsReference(String),
    #[error("lhs binds `{0}` more than once")]
    DuplicateLhsElement(String),
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),
    #[error("line {line}: {source}")]
    Ruleset { line: usize, source: Box<DslError> },
}

impl PatternElement {
    pub fn key(&self) -> (&str, Option<u32>) {
        (&self.class, self.index)
    }

    pub fn is_leaf(&self) -> bool {
        self.nested.is_none()
    }
}

impl ReorderRule {
    /// Left-side elements without sub-patterns, in left-to-right order,
    /// descending into sub-patterns. These are the bindable slots.
    pub fn lhs_leaves(&self) -> Vec<&PatternElement> {
        let mut out = Vec::new();
        collect_leaves(&self.lhs, &mut out);
        out
    }
}

fn collect_leaves<'a>(els: &'a [PatternElement], out: &mut Vec<&'a PatternElement>) {
    for el in els {
        match &el.nested {
            Some(sub) => collect_leaves(sub, out),
            None => out.push(el),
        }
    }
}

fn fmt_key(class: &str, index: Option<u32>) -> String {
    match index {
        Some(i) => format!("{class}{i}"),
        None => class.to_string(),
    }
}

impl fmt::Display for PatternElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_key(&self.class, self.index))?;
        match &self.nested {
            Some(sub) => {
                write!(f, "[")?;
                for (i, el) in sub.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{el}")?;
                }
                write!(f, "]")
            }
            None => write!(f, "{}", self.quantifier.mark()),
        }
    }
}

impl fmt::Display for RhsRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", fmt_key(&self.class, self.index), self.quantifier.mark())
    }
}

impl fmt::Display for ReorderRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.category)?;
        for el in &self.lhs {
            write!(f, "{el} ")?;
        }
        write!(f, ":")?;
        for r in &self.rhs {
            write!(f, " {r}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Colon,
    Quant(Quantifier),
}

fn is_ident_byte(c: u8) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, b'_' | b'-' | b'$' | b'.')
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, DslError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let tok = match c {
            b'#' => break,
            _ if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b':' => Tok::Colon,
            b'?' => Tok::Quant(Quantifier::Optional),
            b'*' => Tok::Quant(Quantifier::Star),
            b'+' => Tok::Quant(Quantifier::Plus),
            _ if is_ident_byte(c) => {
                let start = i;
                while i < b.len() && is_ident_byte(b[i]) {
                    i += 1;
                }
                out.push((
                    Tok::Ident(String::from_utf8_lossy(&b[start..i]).into_owned()),
                    start,
                ));
                continue;
            }
            _ => {
                return Err(DslError::SyntaxError {
                    pos: i,
                    msg: format!("unexpected character `{}`", c as char),
                })
            }
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

// "np2" -> ("np", Some(2)); trailing digits are the discriminator
fn split_name(raw: &str) -> (String, Option<u32>) {
    let stem = raw.trim_end_matches(|c: char| c.is_ascii_digit());
    if stem.is_empty() || stem.len() == raw.len() {
        return (raw.to_string(), None);
    }
    match raw[stem.len()..].parse() {
        Ok(n) => (stem.to_string(), Some(n)),
        Err(_) => (raw.to_string(), None),
    }
}

fn is_literal_label(name: &str) -> bool {
    name.chars().any(|c| c.is_ascii_uppercase())
        && name
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || matches!(c, '-' | '$' | '.'))
}

fn check_name(name: &str, tags: &TagRegistry) -> Result<(), DslError> {
    if tags.contains(name) || is_literal_label(name) {
        Ok(())
    } else {
        Err(DslError::UnknownClass(name.to_string()))
    }
}

struct TokParser<'a> {
    toks: &'a [(Tok, usize)],
    end: usize,
    cur: usize,
}

impl TokParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.cur).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.cur).map_or(self.end, |(_, p)| *p)
    }

    fn err(&self, msg: impl Into<String>) -> DslError {
        DslError::SyntaxError { pos: self.pos(), msg: msg.into() }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), DslError> {
        if self.peek() == Some(want) {
            self.cur += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, DslError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.cur += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    // elements up to (not consuming) the closing token
    fn elements(&mut self, stop: &Tok) -> Result<Vec<PatternElement>, DslError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(t) if t == stop => break,
                Some(Tok::Ident(_)) => {
                    let raw = self.ident("pattern element")?;
                    let (class, index) = split_name(&raw);
                    if self.peek() == Some(&Tok::LBrack) {
                        self.cur += 1;
                        let sub = self.elements(&Tok::RBrack)?;
                        if sub.is_empty() {
                            return Err(self.err("empty bracketed sub-pattern"));
                        }
                        self.expect(&Tok::RBrack, "`]`")?;
                        if matches!(self.peek(), Some(Tok::Quant(_))) {
                            return Err(
                                self.err("quantifier cannot follow a bracketed sub-pattern")
                            );
                        }
                        out.push(PatternElement {
                            class,
                            index,
                            quantifier: Quantifier::One,
                            nested: Some(sub),
                        });
                    } else {
                        let quantifier = match self.peek() {
                            Some(Tok::Quant(q)) => {
                                let q = *q;
                                self.cur += 1;
                                q
                            }
                            _ => Quantifier::One,
                        };
                        out.push(PatternElement { class, index, quantifier, nested: None });
                    }
                }
                _ => return Err(self.err("expected pattern element")),
            }
        }
        Ok(out)
    }
}

/// Parses a single rule line. Id and priority default to `r1`/1; parsing
/// a whole document assigns them from file order.
pub fn parse_rule(text: &str, tags: &TagRegistry) -> Result<ReorderRule, DslError> {
    let toks = tokenize(text)?;
    let mut p = TokParser { toks: &toks, end: text.len(), cur: 0 };

    let category = p.ident("rule category")?;
    p.expect(&Tok::LParen, "`(`")?;
    let lhs = p.elements(&Tok::Colon)?;
    if lhs.is_empty() {
        return Err(p.err("empty rule left side"));
    }
    p.expect(&Tok::Colon, "`:`")?;

    let mut written_rhs: Vec<(String, Option<u32>, Option<Quantifier>)> = Vec::new();
    loop {
        match p.peek() {
            Some(Tok::RParen) => break,
            Some(Tok::Ident(_)) => {
                let raw = p.ident("rhs reference")?;
                let (class, index) = split_name(&raw);
                let quant = match p.peek() {
                    Some(Tok::Quant(q)) => {
                        let q = *q;
                        p.cur += 1;
                        Some(q)
                    }
                    _ => None,
                };
                written_rhs.push((class, index, quant));
            }
            _ => return Err(p.err("expected rhs reference")),
        }
    }
    if written_rhs.is_empty() {
        return Err(p.err("empty rule right side"));
    }
    p.expect(&Tok::RParen, "`)`")?;
    if p.cur < toks.len() {
        return Err(p.err("unexpected input after rule"));
    }

    check_element_names(&lhs, tags)?;

    let rule = ReorderRule {
        id: "r1".to_string(),
        category,
        lhs,
        rhs: Vec::new(),
        priority: 1,
        source_text: text.trim().to_string(),
    };
    let leaves = rule.lhs_leaves();

    let mut seen = BTreeSet::new();
    for leaf in &leaves {
        if !seen.insert(leaf.key()) {
            return Err(DslError::DuplicateLhsElement(fmt_key(&leaf.class, leaf.index)));
        }
    }

    let mut rhs = Vec::new();
    let mut used = BTreeSet::new();
    for (class, index, written_quant) in written_rhs {
        check_name(&class, tags)?;
        let written = format!(
            "{}{}",
            fmt_key(&class, index),
            written_quant.map_or("", Quantifier::mark)
        );
        let Some(leaf) = leaves.iter().find(|l| l.key() == (class.as_str(), index)) else {
            return Err(DslError::UnresolvedRhsReference(written));
        };
        if written_quant.is_some_and(|q| q != leaf.quantifier) {
            return Err(DslError::UnresolvedRhsReference(written));
        }
        if !used.insert((class.clone(), index)) {
            return Err(DslError::DuplicateRhsReference(fmt_key(&class, index)));
        }
        rhs.push(RhsRef { class, index, quantifier: leaf.quantifier });
    }
    for leaf in &leaves {
        if !used.contains(&(leaf.class.clone(), leaf.index)) {
            return Err(DslError::DroppedLhsElement(fmt_key(&leaf.class, leaf.index)));
        }
    }

    Ok(ReorderRule { rhs, ..rule })
}

fn check_element_names(els: &[PatternElement], tags: &TagRegistry) -> Result<(), DslError> {
    for el in els {
        check_name(&el.class, tags)?;
        if let Some(sub) = &el.nested {
            check_element_names(sub, tags)?;
        }
    }
    Ok(())
}

/// Parses a whole rule document: one rule per line, `#` comments, blank
/// lines, and `@id: name` annotations naming the next rule. Unannotated
/// rules get ids `r1`, `r2`, ... by position; priority is file order.
pub fn parse_ruleset(text: &str, tags: &TagRegistry) -> Result<Vec<ReorderRule>, DslError> {
    let wrap = |line: usize, e: DslError| DslError::Ruleset { line, source: Box::new(e) };
    let mut rules: Vec<ReorderRule> = Vec::new();
    let mut ids = BTreeSet::new();
    let mut pending: Option<(String, usize)> = None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@id:") {
            if let Some((_, prev)) = pending {
                return Err(wrap(
                    prev,
                    DslError::SyntaxError { pos: 0, msg: "rule id annotation without a rule".into() },
                ));
            }
            let id = rest.trim();
            let valid = !id.is_empty()
                && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if !valid {
                return Err(wrap(
                    lineno,
                    DslError::SyntaxError { pos: 0, msg: format!("malformed rule id `{id}`") },
                ));
            }
            pending = Some((id.to_string(), lineno));
            continue;
        }
        let mut rule = parse_rule(line, tags).map_err(|e| wrap(lineno, e))?;
        let ordinal = rules.len() + 1;
        rule.id = match pending.take() {
            Some((id, _)) => id,
            None => format!("r{ordinal}"),
        };
        rule.priority = ordinal as u32;
        if !ids.insert(rule.id.clone()) {
            return Err(wrap(lineno, DslError::DuplicateRuleId(rule.id)));
        }
        rules.push(rule);
    }
    if let Some((_, line)) = pending {
        return Err(wrap(
            line,
            DslError::SyntaxError { pos: 0, msg: "rule id annotation without a rule".into() },
        ));
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags() -> TagRegistry {
        TagRegistry::builtin()
    }

    #[test]
    fn nested_rule_structure() {
        let r = parse_rule("NP(np1 PP[prep NP[np2 sbar]] : np2 prep np1 sbar)", &tags()).unwrap();
        assert_eq!(r.category, "NP");
        assert_eq!(r.lhs.len(), 2);
        assert_eq!(r.lhs[0].key(), ("np", Some(1)));
        let pp = &r.lhs[1];
        assert_eq!(pp.class, "PP");
        let sub = pp.nested.as_ref().unwrap();
        assert_eq!(sub[0].key(), ("prep", None));
        assert_eq!(sub[1].class, "NP");
        let leaves: Vec<_> = r.lhs_leaves().iter().map(|l| fmt_key(&l.class, l.index)).collect();
        assert_eq!(leaves, ["np1", "prep", "np2", "sbar"]);
        let rhs: Vec<_> = r.rhs.iter().map(ToString::to_string).collect();
        assert_eq!(rhs, ["np2", "prep", "np1", "sbar"]);
    }

    #[test]
    fn quantifiers_parse_and_inherit() {
        let r = parse_rule("VP(vpw pp1 pp2* : pp2* pp1 vpw)", &tags()).unwrap();
        assert_eq!(r.lhs[2].quantifier, Quantifier::Star);
        assert_eq!(r.rhs[0].quantifier, Quantifier::Star);
        // rhs may omit the quantifier; it is taken from the lhs element
        let r = parse_rule("VP(vpw pp1 pp2* : pp2 pp1 vpw)", &tags()).unwrap();
        assert_eq!(r.rhs[0].quantifier, Quantifier::Star);
        let r = parse_rule("VP(vpw adv? adjP? dcP : dcP adjP? adv? vpw)", &tags()).unwrap();
        assert_eq!(r.lhs[1].quantifier, Quantifier::Optional);
        assert_eq!(r.rhs[1].quantifier, Quantifier::Optional);
    }

    #[test]
    fn uppercase_names_are_literal_labels() {
        let r = parse_rule("SQ(VBZ np : np VBZ)", &tags()).unwrap();
        assert_eq!(r.lhs[0].class, "VBZ");
        assert!(parse_rule("SQ(qqz np : np qqz)", &tags()).is_err());
    }

    #[test]
    fn index_split() {
        assert_eq!(split_name("np2"), ("np".into(), Some(2)));
        assert_eq!(split_name("pp"), ("pp".into(), None));
        assert_eq!(split_name("123"), ("123".into(), None));
    }

    #[test]
    fn dropped_element_is_rejected() {
        assert_eq!(
            parse_rule("VP(vpw np : np)", &tags()),
            Err(DslError::DroppedLhsElement("vpw".into()))
        );
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert_eq!(
            parse_rule("VP(foo np : np foo)", &tags()),
            Err(DslError::UnknownClass("foo".into()))
        );
        assert_eq!(
            parse_rule("VP(vpw np : np zz)", &tags()),
            Err(DslError::UnknownClass("zz".into()))
        );
    }

    #[test]
    fn duplicate_references_are_rejected() {
        assert_eq!(
            parse_rule("VP(vpw np : np vpw vpw)", &tags()),
            Err(DslError::DuplicateRhsReference("vpw".into()))
        );
        assert_eq!(
            parse_rule("VP(np np : np np)", &tags()),
            Err(DslError::DuplicateLhsElement("np".into()))
        );
    }

    #[test]
    fn rhs_quantifier_must_agree() {
        assert_eq!(
            parse_rule("VP(vpw pp2* : pp2? vpw)", &tags()),
            Err(DslError::UnresolvedRhsReference("pp2?".into()))
        );
        assert_eq!(
            parse_rule("VP(vpw np : np1 vpw)", &tags()),
            Err(DslError::UnresolvedRhsReference("np1".into()))
        );
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_rule("VP(vpw np np vpw)", &tags()),
            Err(DslError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_rule("VP(vpw PP[prep np]? : ...)", &tags()),
            Err(DslError::SyntaxError { .. })
        ));
        assert!(matches!(parse_rule("", &tags()), Err(DslError::SyntaxError { .. })));
        assert!(matches!(
            parse_rule("VP(vpw np : np vpw) extra", &tags()),
            Err(DslError::SyntaxError { .. })
        ));
    }

    #[test]
    fn comments_are_ignored() {
        let r = parse_rule("VP(prep dcP : dcP prep)  # flip to postposition", &tags()).unwrap();
        assert_eq!(r.rhs.len(), 2);
    }

    #[test]
    fn canonical_render_round_trips() {
        for text in [
            "NP(np1 PP[prep NP[np2 sbar]] : np2 prep np1 sbar)",
            "VP(vpw pp1 pp2* : pp2* pp1 vpw)",
            "VP(vpw adv? adjP? dcP : dcP adjP? adv? vpw)",
            "PP(adv prep? dcP : dcP prep? adv)",
        ] {
            let a = parse_rule(text, &tags()).unwrap();
            let b = parse_rule(&a.to_string(), &tags()).unwrap();
            assert_eq!(a.category, b.category);
            assert_eq!(a.lhs, b.lhs);
            assert_eq!(a.rhs, b.rhs);
        }
    }

    #[test]
    fn ruleset_ids_and_priorities() {
        let doc = "\n# two rules\n@id: flip\nPP(prep dcP : dcP prep)\n\nNP(np vp : vp np)\n";
        let rules = parse_ruleset(doc, &tags()).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].id, "flip");
        assert_eq!(rules[0].priority, 1);
        assert_eq!(rules[1].id, "r2");
        assert_eq!(rules[1].priority, 2);
    }

    #[test]
    fn ruleset_errors_carry_line_numbers() {
        let doc = "PP(prep dcP : dcP prep)\nVP(vpw np : np)\n";
        match parse_ruleset(doc, &tags()) {
            Err(DslError::Ruleset { line, source }) => {
                assert_eq!(line, 2);
                assert_eq!(*source, DslError::DroppedLhsElement("vpw".into()));
            }
            other => panic!("unexpected: {other:?}"),
        }
        let doc = "@id: x\nPP(prep dcP : dcP prep)\n@id: x\nNP(np vp : vp np)\n";
        assert!(matches!(parse_ruleset(doc, &tags()), Err(DslError::Ruleset { line: 4, .. })));
        assert!(matches!(
            parse_ruleset("@id: dangling\n", &tags()),
            Err(DslError::Ruleset { line: 1, .. })
        ));
    }

    #[test]
    fn empty_document_is_empty() {
        assert_eq!(parse_ruleset("# nothing\n\n", &tags()), Ok(vec![]));
    }
}
