//! Shared noun index and the per-class leaning vectors.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Leaning;
use crate::error::{Error, Result};
use crate::stance::StanceMap;

pub const FORMAT_VERSION: u32 = 1;

/// Order in which class stance maps contribute nouns to the index.
const INDEX_ORDER: [Leaning; 3] = [Leaning::Left, Leaning::Right, Leaning::Center];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NounIndex {
    nouns: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl NounIndex {
    pub fn from_nouns(nouns: Vec<String>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(nouns.len());
        for (i, n) in nouns.iter().enumerate() {
            if lookup.insert(n.clone(), i).is_some() {
                return Err(Error::Model(format!("noun `{n}` listed twice")));
            }
        }
        Ok(NounIndex { nouns, lookup })
    }

    pub fn get(&self, noun: &str) -> Option<usize> {
        self.lookup.get(noun).copied()
    }

    pub fn noun(&self, index: usize) -> &str {
        &self.nouns[index]
    }

    pub fn nouns(&self) -> &[String] {
        &self.nouns
    }

    pub fn len(&self) -> usize {
        self.nouns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nouns.is_empty()
    }
}

/// Indexes the union of nouns over all classes, in first-appearance order
/// over Left, Right, Center.
pub fn build_index(stances: &BTreeMap<Leaning, StanceMap>) -> Result<NounIndex> {
    let mut nouns = Vec::new();
    let mut lookup = HashMap::new();
    for class in INDEX_ORDER {
        let Some(map) = stances.get(&class) else {
            continue;
        };
        for noun in map.entries.keys() {
            if !lookup.contains_key(noun) {
                lookup.insert(noun.clone(), nouns.len());
                nouns.push(noun.clone());
            }
        }
    }
    if nouns.is_empty() {
        return Err(Error::EmptySpace);
    }
    Ok(NounIndex { nouns, lookup })
}

/// The trained model: a noun index plus one stance vector per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaningSpace {
    pub index: NounIndex,
    vectors: BTreeMap<Leaning, Vec<f64>>,
}

impl LeaningSpace {
    pub fn new(index: NounIndex, vectors: BTreeMap<Leaning, Vec<f64>>) -> Result<Self> {
        for class in Leaning::ALL {
            match vectors.get(&class) {
                None => return Err(Error::Model(format!("missing {class} vector"))),
                Some(v) if v.len() != index.len() => {
                    return Err(Error::Model(format!(
                        "{class} vector has length {}, expected {}",
                        v.len(),
                        index.len()
                    )))
                }
                Some(v) if v.iter().any(|x| !(-1.0..=1.0).contains(x)) => {
                    return Err(Error::Model(format!(
                        "{class} vector has values outside [-1, 1]"
                    )))
                }
                _ => {}
            }
        }
        Ok(LeaningSpace { index, vectors })
    }

    pub fn vector(&self, class: Leaning) -> &[f64] {
        &self.vectors[&class]
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Places an article's stance values on the index; unknown nouns are
    /// dropped and missing ones are 0.
    pub fn project(&self, stance: &StanceMap) -> Vec<f64> {
        project(stance, &self.index)
    }

    pub fn to_json(&self) -> Result<String> {
        self.to_json_with(None)
    }

    /// Serializes with an optional provenance object embedded alongside the
    /// vectors.
    pub fn to_json_with(&self, provenance: Option<serde_json::Value>) -> Result<String> {
        let file = ModelFile {
            version: FORMAT_VERSION,
            nouns: self.index.nouns.clone(),
            vectors: self.vectors.clone(),
            provenance,
        };
        Ok(serde_json::to_string_pretty(&file)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_with_provenance(s).map(|(space, _)| space)
    }

    pub fn from_json_with_provenance(s: &str) -> Result<(Self, Option<serde_json::Value>)> {
        let file: ModelFile = serde_json::from_str(s)?;
        if file.version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: file.version,
                expected: FORMAT_VERSION,
            });
        }
        let index = NounIndex::from_nouns(file.nouns)?;
        Ok((LeaningSpace::new(index, file.vectors)?, file.provenance))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    nouns: Vec<String>,
    vectors: BTreeMap<Leaning, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<serde_json::Value>,
}

pub fn build_space(stances: &BTreeMap<Leaning, StanceMap>) -> Result<LeaningSpace> {
    build_space_with(stances, 1)
}

/// As [`build_space`], first dropping nouns with fewer than `min_mentions`
/// descriptors in a class.
pub fn build_space_with(
    stances: &BTreeMap<Leaning, StanceMap>,
    min_mentions: usize,
) -> Result<LeaningSpace> {
    let filtered: BTreeMap<Leaning, StanceMap> = stances
        .iter()
        .map(|(c, m)| (*c, m.with_min_mentions(min_mentions)))
        .collect();
    let index = build_index(&filtered)?;
    let vectors = Leaning::ALL
        .into_iter()
        .map(|c| {
            let v = filtered
                .get(&c)
                .map_or_else(|| vec![0.0; index.len()], |m| project(m, &index));
            (c, v)
        })
        .collect();
    LeaningSpace::new(index, vectors)
}

pub fn project(stance: &StanceMap, index: &NounIndex) -> Vec<f64> {
    let mut v = vec![0.0; index.len()];
    for (noun, e) in stance.iter() {
        if let Some(k) = index.get(noun) {
            v[k] = e.mean;
        }
    }
    v
}

pub fn save_space(space: &LeaningSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, space.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_space(path: impl AsRef<Path>) -> Result<LeaningSpace> {
    let path = path.as_ref();
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LeaningSpace::from_json(&s)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The three worked-example class stance tables.
    pub fn class_stances() -> BTreeMap<Leaning, StanceMap> {
        BTreeMap::from([
            (
                Leaning::Left,
                StanceMap::from_means([
                    ("trump", -0.7),
                    ("ira", 0.5),
                    ("israel", 0.1),
                    ("immigrant", 0.3),
                ]),
            ),
            (
                Leaning::Right,
                StanceMap::from_means([
                    ("trump", 0.8),
                    ("ira", -0.1),
                    ("israel", 0.8),
                    ("vaccine", -0.5),
                ]),
            ),
            (
                Leaning::Center,
                StanceMap::from_means([
                    ("trump", -0.2),
                    ("ira", 0.1),
                    ("israel", 0.3),
                    ("china", -0.1),
                ]),
            ),
        ])
    }
}
