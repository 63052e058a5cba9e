//! Dependency trees.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Universal POS tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Upos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Upos {
    pub fn is_nominal(self) -> bool {
        matches!(self, Upos::Noun | Upos::Propn)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ADJ" => Upos::Adj,
            "ADP" => Upos::Adp,
            "ADV" => Upos::Adv,
            "AUX" => Upos::Aux,
            "CCONJ" => Upos::Cconj,
            "DET" => Upos::Det,
            "INTJ" => Upos::Intj,
            "NOUN" => Upos::Noun,
            "NUM" => Upos::Num,
            "PART" => Upos::Part,
            "PRON" => Upos::Pron,
            "PROPN" => Upos::Propn,
            "PUNCT" => Upos::Punct,
            "SCONJ" => Upos::Sconj,
            "SYM" => Upos::Sym,
            "VERB" => Upos::Verb,
            "X" | "_" => Upos::X,
            other => return Err(format!("unknown UPOS tag `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepToken {
    /// 0-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: Upos,
    /// Parent token index; `None` for the root.
    pub head: Option<usize>,
    pub deprel: String,
    /// Raw CoNLL-U FEATS column, `_` when empty.
    #[serde(default)]
    pub feats: String,
}

impl DepToken {
    pub fn new(
        index: usize,
        surface: &str,
        lemma: &str,
        upos: Upos,
        head: Option<usize>,
        deprel: &str,
    ) -> Self {
        DepToken {
            index,
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            upos,
            head,
            deprel: deprel.to_string(),
            feats: "_".to_string(),
        }
    }

    /// Looks up a morphological feature such as `PronType`.
    pub fn feat(&self, name: &str) -> Option<&str> {
        self.feats
            .split('|')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("empty sentence")]
    Empty,
    #[error("token at position {position} has index {index}")]
    IndexGap { position: usize, index: usize },
    #[error("token {0} is its own head")]
    SelfHead(usize),
    #[error("token {token} has head {head} outside the sentence")]
    HeadOutOfRange { token: usize, head: usize },
    #[error("no root token")]
    NoRoot,
    #[error("multiple roots: {0} and {1}")]
    MultipleRoots(usize, usize),
    #[error("cycle through token {0}")]
    Cycle(usize),
}

/// A validated dependency tree: contiguous indices, a single root, no cycles.
///
/// Tokens can be relabelled through [`DepSentence::retag`] but the head links
/// are fixed at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepSentence {
    tokens: Vec<DepToken>,
    #[serde(skip)]
    children: Vec<Vec<usize>>,
    #[serde(skip)]
    root: usize,
}

impl DepSentence {
    pub fn new(tokens: Vec<DepToken>) -> Result<Self, TreeError> {
        if tokens.is_empty() {
            return Err(TreeError::Empty);
        }
        let n = tokens.len();
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (position, tok) in tokens.iter().enumerate() {
            if tok.index != position {
                return Err(TreeError::IndexGap {
                    position,
                    index: tok.index,
                });
            }
            match tok.head {
                None => match root {
                    None => root = Some(position),
                    Some(first) => return Err(TreeError::MultipleRoots(first, position)),
                },
                Some(h) if h == position => return Err(TreeError::SelfHead(position)),
                Some(h) if h >= n => {
                    return Err(TreeError::HeadOutOfRange {
                        token: position,
                        head: h,
                    })
                }
                Some(h) => children[h].push(position),
            }
        }
        let root = root.ok_or(TreeError::NoRoot)?;

        // Every token must reach the root; anything unreached sits on a cycle.
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        while let Some(t) = stack.pop() {
            seen[t] = true;
            stack.extend(&children[t]);
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return Err(TreeError::Cycle(t));
        }

        Ok(DepSentence {
            tokens,
            children,
            root,
        })
    }

    pub fn tokens(&self) -> &[DepToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn head(&self, index: usize) -> Option<usize> {
        self.tokens[index].head
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    /// Token indices with every child listed before its parent.
    pub fn post_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                order.push(t);
            } else {
                stack.push((t, true));
                for &c in self.children[t].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// Replaces the lemma and POS of one token, leaving the tree untouched.
    pub fn retag(&mut self, index: usize, lemma: &str, upos: Upos) {
        let tok = &mut self.tokens[index];
        tok.lemma = lemma.to_string();
        tok.upos = upos;
    }

    /// Whitespace-joined surface forms.
    pub fn text(&self) -> String {
        let words: Vec<&str> = self.tokens.iter().map(|t| t.surface.as_str()).collect();
        words.join(" ")
    }
}

impl<'de> Deserialize<'de> for DepSentence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            tokens: Vec<DepToken>,
        }
        let raw = Raw::deserialize(d)?;
        DepSentence::new(raw.tokens).map_err(serde::de::Error::custom)
    }
}
