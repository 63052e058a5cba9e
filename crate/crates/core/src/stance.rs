//! Valence lexicon and per-noun stance aggregation.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::refres::DescriptorMap;

/// Lemma → valence in [-1, 1].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValenceLexicon {
    entries: HashMap<String, f64>,
}

const DEFAULT_LEXICON: &str = include_str!("../data/valence.tsv");

impl ValenceLexicon {
    /// The bundled English lexicon (TextBlob adjective polarities, with
    /// VADER valences scaled into [-1, 1] for words TextBlob lacks).
    pub fn english() -> Self {
        Self::parse(DEFAULT_LEXICON.as_bytes()).expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file))
    }

    /// `lemma<TAB>score` per line. Blank lines and `#` comments are skipped;
    /// a repeated lemma overrides the earlier line.
    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (lemma, score) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(lineno, "expected lemma<TAB>score"))?;
            let score: f64 = score.trim().parse().map_err(|_| {
                Error::parse(lineno, format!("non-numeric score `{}`", score.trim()))
            })?;
            if !(-1.0..=1.0).contains(&score) {
                return Err(Error::parse(
                    lineno,
                    format!("score {score} outside [-1, 1]"),
                ));
            }
            entries.insert(lemma.trim().to_lowercase(), score);
        }
        Ok(ValenceLexicon { entries })
    }

    pub fn get(&self, lemma: &str) -> Option<f64> {
        self.entries.get(lemma).copied()
    }

    pub fn insert(&mut self, lemma: &str, score: f64) {
        assert!(
            (-1.0..=1.0).contains(&score),
            "valence {score} outside [-1, 1]"
        );
        self.entries.insert(lemma.to_lowercase(), score);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(String, f64)> for ValenceLexicon {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        let mut lex = ValenceLexicon::default();
        for (k, v) in iter {
            lex.insert(&k, v);
        }
        lex
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StanceEntry {
    pub mean: f64,
    pub count: usize,
}

/// Noun key → mean descriptor valence and the number of descriptors behind
/// it. Keys keep first-insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StanceMap {
    pub entries: IndexMap<String, StanceEntry>,
}

impl StanceMap {
    pub fn get(&self, noun: &str) -> Option<&StanceEntry> {
        self.entries.get(noun)
    }

    pub fn mean(&self, noun: &str) -> Option<f64> {
        self.entries.get(noun).map(|e| e.mean)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &StanceEntry)> {
        self.entries.iter()
    }

    /// Builds a map from `(noun, mean)` pairs, one mention each.
    pub fn from_means<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        StanceMap {
            entries: pairs
                .into_iter()
                .map(|(n, mean)| (n.to_string(), StanceEntry { mean, count: 1 }))
                .collect(),
        }
    }

    /// Drops nouns backed by fewer than `min_mentions` descriptors.
    pub fn with_min_mentions(&self, min_mentions: usize) -> StanceMap {
        StanceMap {
            entries: self
                .entries
                .iter()
                .filter(|(_, e)| e.count >= min_mentions)
                .map(|(k, e)| (k.clone(), *e))
                .collect(),
        }
    }
}

/// Averages lexicon valences per noun. Descriptors missing from the lexicon
/// are skipped, and nouns left with none are dropped.
pub fn article_stance(descriptors: &DescriptorMap, lexicon: &ValenceLexicon) -> StanceMap {
    let mut entries = IndexMap::new();
    for (noun, descs) in descriptors {
        let scores: Vec<f64> = descs.iter().filter_map(|d| lexicon.get(&d.lemma)).collect();
        if !scores.is_empty() {
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            entries.insert(
                noun.clone(),
                StanceEntry {
                    mean,
                    count: scores.len(),
                },
            );
        }
    }
    StanceMap { entries }
}

/// Mention-weighted merge: each noun's mean is the average over all of its
/// descriptors across the inputs.
pub fn corpus_stance<'a>(maps: impl IntoIterator<Item = &'a StanceMap>) -> StanceMap {
    struct Acc {
        sum: f64,
        count: usize,
        only: Option<f64>,
        sources: usize,
    }
    let mut totals: IndexMap<String, Acc> = IndexMap::new();
    for map in maps {
        for (noun, e) in &map.entries {
            let t = totals.entry(noun.clone()).or_insert(Acc {
                sum: 0.0,
                count: 0,
                only: Some(e.mean),
                sources: 0,
            });
            t.sum += e.mean * e.count as f64;
            t.count += e.count;
            t.sources += 1;
        }
    }
    StanceMap {
        entries: totals
            .into_iter()
            .filter(|(_, t)| t.count > 0)
            .map(|(noun, t)| {
                // A single contributor passes through untouched.
                let mean = match (t.sources, t.only) {
                    (1, Some(m)) => m,
                    _ => (t.sum / t.count as f64).clamp(-1.0, 1.0),
                };
                (
                    noun,
                    StanceEntry {
                        mean,
                        count: t.count,
                    },
                )
            })
            .collect(),
    }
}
