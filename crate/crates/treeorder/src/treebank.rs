//! Bracketed constituency trees: parsing, traversal, canonical rendering.

use std::fmt;

use thiserror::Error;

/// A node in a constituency parse. Leaves carry a part-of-speech label and
/// the surface token; internal nodes carry a phrase label and children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseNode {
    Leaf { label: String, token: String },
    Node { label: String, children: Vec<ParseNode> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("unbalanced brackets at byte {pos}")]
    UnbalancedBrackets { pos: usize },
    #[error("empty node")]
    EmptyTree,
    #[error("node without a label at byte {pos}")]
    LabelMissing { pos: usize },
}

impl ParseNode {
    pub fn leaf(label: impl Into<String>, token: impl Into<String>) -> Self {
        ParseNode::Leaf { label: label.into(), token: token.into() }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseNode>) -> Self {
        ParseNode::Node { label: label.into(), children }
    }

    pub fn label(&self) -> &str {
        match self {
            ParseNode::Leaf { label, .. } | ParseNode::Node { label, .. } => label,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ParseNode::Leaf { .. })
    }

    /// Children of an internal node; empty slice for leaves.
    pub fn children(&self) -> &[ParseNode] {
        match self {
            ParseNode::Leaf { .. } => &[],
            ParseNode::Node { children, .. } => children,
        }
    }

    /// Surface tokens in left-to-right order.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens(&self, out: &mut Vec<String>) {
        match self {
            ParseNode::Leaf { token, .. } => out.push(token.clone()),
            ParseNode::Node { children, .. } => {
                for c in children {
                    c.collect_tokens(out);
                }
            }
        }
    }
}

impl fmt::Display for ParseNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseNode::Leaf { label, token } => write!(f, "({label} {token})"),
            ParseNode::Node { label, children } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses one bracketed tree. A top-level `ROOT` wrapper or an unlabeled
/// `( ... )` wrapper around a single node is stripped.
pub fn parse_tree(input: &str) -> Result<ParseNode, TreeError> {
    let mut p = Parser { src: input.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(TreeError::EmptyTree);
    }
    if p.peek() != Some(b'(') {
        return Err(TreeError::UnbalancedBrackets { pos: p.pos });
    }
    let node = p.node(true)?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(TreeError::UnbalancedBrackets { pos: p.pos });
    }
    Ok(unwrap_root(node))
}

fn unwrap_root(node: ParseNode) -> ParseNode {
    match node {
        ParseNode::Node { label, mut children } if label == "ROOT" && children.len() == 1 => {
            unwrap_root(children.pop().unwrap())
        }
        other => other,
    }
}

/// Best-effort token recovery from a malformed line: every atom written
/// directly against a closing bracket is taken to be a leaf token.
pub fn extract_tokens_lenient(line: &str) -> Vec<String> {
    let b = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'(' || b[i] == b')' || b[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < b.len() && b[i] != b'(' && b[i] != b')' && !b[i].is_ascii_whitespace() {
            i += 1;
        }
        if i < b.len() && b[i] == b')' {
            out.push(String::from_utf8_lossy(&b[start..i]).into_owned());
        }
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == b'(' || c == b')' || c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    // Called with pos on '('. `top` permits the unlabeled outer wrapper
    // some parsers emit around the whole sentence.
    fn node(&mut self, top: bool) -> Result<ParseNode, TreeError> {
        self.pos += 1;
        self.skip_ws();
        match self.peek() {
            None => Err(TreeError::UnbalancedBrackets { pos: self.pos }),
            Some(b')') => Err(TreeError::EmptyTree),
            Some(b'(') => {
                if !top {
                    return Err(TreeError::LabelMissing { pos: self.pos });
                }
                let start = self.pos;
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(TreeError::UnbalancedBrackets { pos: self.pos }),
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(b'(') => children.push(self.node(false)?),
                        Some(_) => return Err(TreeError::LabelMissing { pos: self.pos }),
                    }
                }
                match children.len() {
                    0 => Err(TreeError::EmptyTree),
                    1 => Ok(children.pop().unwrap()),
                    _ => Err(TreeError::LabelMissing { pos: start }),
                }
            }
            Some(_) => {
                let label = self.atom();
                let mut atoms: Vec<(String, usize)> = Vec::new();
                let mut exprs: Vec<ParseNode> = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(TreeError::UnbalancedBrackets { pos: self.pos }),
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(b'(') => exprs.push(self.node(false)?),
                        Some(_) => {
                            let at = self.pos;
                            atoms.push((self.atom(), at));
                        }
                    }
                }
                match (atoms.len(), exprs.len()) {
                    (0, 0) => Err(TreeError::EmptyTree),
                    (1, 0) => {
                        let (token, _) = atoms.pop().unwrap();
                        Ok(ParseNode::Leaf { label, token })
                    }
                    (0, _) => Ok(ParseNode::Node { label, children: exprs }),
                    // bare atoms mixed in with bracketed children have no
                    // part-of-speech label of their own
                    _ => Err(TreeError::LabelMissing { pos: atoms[0].1 }),
                }
            }
        }
    }
}
