//! Tag classes: named sets of Penn Treebank labels used by rule patterns.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// A named set of labels. An empty member set matches every label.
///
/// `sequence` marks classes that, written bare in a pattern, bind a
/// non-empty run of children instead of exactly one (the catch-all class
/// and the adverb/noun/preposition-phrase run class behave this way).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagClass {
    pub name: String,
    pub members: BTreeSet<String>,
    pub sequence: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TagError {
    #[error("unknown tag class `{0}`")]
    UnknownClass(String),
    #[error("tag class `{0}` is already defined")]
    DuplicateClass(String),
    #[error("malformed tag class definition on line {line}")]
    MalformedClassLine { line: usize },
}

impl TagClass {
    /// A class that matches exactly the given labels; with no labels it
    /// matches anything and binds as a sequence.
    pub fn new<I, S>(name: impl Into<String>, members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let members: BTreeSet<String> = members.into_iter().map(Into::into).collect();
        let sequence = members.is_empty();
        TagClass { name: name.into(), members, sequence }
    }

    pub fn with_sequence(mut self, sequence: bool) -> Self {
        self.sequence = sequence;
        self
    }

    pub fn matches(&self, label: &str) -> bool {
        self.members.is_empty() || self.members.contains(label)
    }
}

/// Lookup table from class name to class definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagRegistry {
    classes: BTreeMap<String, TagClass>,
}

impl TagRegistry {
    pub fn empty() -> Self {
        TagRegistry { classes: BTreeMap::new() }
    }

    /// The fourteen classes the shipped rules are written against.
    pub fn builtin() -> Self {
        let mut r = TagRegistry::empty();
        let classes = vec![
            TagClass::new("dcP", Vec::<&str>::new()),
            TagClass::new("pp", ["PP"]),
            TagClass::new("whP", ["WHNP", "WHADVP", "WHADJP", "WHPP"]),
            TagClass::new("vp", ["VP"]),
            TagClass::new("sbar", ["SBAR"]),
            TagClass::new("np", ["NP"]),
            TagClass::new("vpw", ["VBN", "VBP", "VB", "VBG", "MD", "VBZ", "VBD"]),
            TagClass::new("prep", ["IN", "TO", "VBN", "VBG"]),
            TagClass::new("adv", ["RB", "RBR", "RBS"]),
            TagClass::new("adj", ["JJ", "JJR", "JJS"]),
            TagClass::new("advP", ["ADVP"]),
            TagClass::new("punct", [","]),
            TagClass::new("adjP", ["ADJP"]),
            TagClass::new("OP", ["ADVP", "NP", "PP"]).with_sequence(true),
        ];
        for c in classes {
            r.register(c, false).expect("builtin classes are distinct");
        }
        r
    }

    pub fn get(&self, name: &str) -> Option<&TagClass> {
        self.classes.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    pub fn register(&mut self, class: TagClass, allow_override: bool) -> Result<(), TagError> {
        if !allow_override && self.classes.contains_key(&class.name) {
            return Err(TagError::DuplicateClass(class.name));
        }
        self.classes.insert(class.name.clone(), class);
        Ok(())
    }

    pub fn class_matches(&self, class: &str, label: &str) -> Result<bool, TagError> {
        self.get(class)
            .map(|c| c.matches(label))
            .ok_or_else(|| TagError::UnknownClass(class.to_string()))
    }

    /// Loads class definitions from text, one per line:
    /// `name = LABEL1 LABEL2 ...`. A bare `name =` defines a match-any
    /// sequence class. Blank lines and `#` comments are skipped.
    pub fn load_definitions(&mut self, text: &str, allow_override: bool) -> Result<usize, TagError> {
        let mut added = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let Some((name, rest)) = line.split_once('=') else {
                return Err(TagError::MalformedClassLine { line: lineno });
            };
            let name = name.trim();
            if name.is_empty() || !is_class_name(name) {
                return Err(TagError::MalformedClassLine { line: lineno });
            }
            let members: Vec<&str> = rest.split_whitespace().collect();
            self.register(TagClass::new(name, members), allow_override)?;
            added += 1;
        }
        Ok(added)
    }
}

fn is_class_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}
