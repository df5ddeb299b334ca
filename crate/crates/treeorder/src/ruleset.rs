//! The shipped English to Hindi rule set and its worked examples.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{parse_ruleset, DslError, ReorderRule};
use crate::tags::{TagError, TagRegistry};

/// Source text of the shipped rules, embedded from `data/en_hi.rules`.
pub const BUILTIN_RULES_TEXT: &str = include_str!("../data/en_hi.rules");

const FIXTURES_JSON: &str = include_str!("../data/fixtures.json");

/// A validated, ordered rule list together with the tag registry its
/// class names resolve against.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<ReorderRule>,
    tags: TagRegistry,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleSetError {
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Tags(#[from] TagError),
}

impl RuleSet {
    /// The shipped rules over the builtin tag classes.
    pub fn builtin() -> Self {
        RuleSet::from_text(BUILTIN_RULES_TEXT, TagRegistry::builtin())
            .expect("embedded rule file validates")
    }

    pub fn from_text(text: &str, tags: TagRegistry) -> Result<Self, RuleSetError> {
        let rules = parse_ruleset(text, &tags)?;
        Ok(RuleSet { rules, tags })
    }

    pub fn rules(&self) -> &[ReorderRule] {
        &self.rules
    }

    pub fn tags(&self) -> &TagRegistry {
        &self.tags
    }

    pub fn get(&self, id: &str) -> Option<&ReorderRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// One worked example: an English sentence, its reconstructed parse, and
/// the expected token order after applying just the named rule
/// (`partial`) or the whole shipped set (`full`). The Hindi line is
/// reference metadata only. `notes` documents spans where the shipped
/// rules deliberately stop short of the reference rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureCase {
    pub id: String,
    pub english: String,
    pub tree: String,
    pub partial: String,
    pub full: String,
    pub hindi: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// The embedded worked-example table, one case per shipped rule.
pub fn fixtures() -> Vec<FixtureCase> {
    serde_json::from_str(FIXTURES_JSON).expect("embedded fixture table parses")
}
