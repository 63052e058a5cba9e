use std::collections::HashSet;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RefAssignment, SourceKind};
use crate::error::{Error, Result};

/// A human-annotated descriptor → noun link.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoldRelation {
    pub sentence_id: String,
    pub source_index: usize,
    pub noun_index: usize,
    pub kind: SourceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Prf {
    pub fn from_counts(true_positives: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(true_positives, predicted);
        let recall = ratio(true_positives, gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            true_positives,
            predicted,
            gold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefresScores {
    pub adjective: Prf,
    pub verb: Prf,
}

/// Scores predicted links against gold. A prediction counts only when
/// sentence, source, noun and kind all match.
pub fn eval_refres(
    predicted: &[(String, Vec<RefAssignment>)],
    gold: &[GoldRelation],
) -> RefresScores {
    let gold_set: HashSet<&GoldRelation> = gold.iter().collect();
    let predicted: HashSet<GoldRelation> = predicted
        .iter()
        .flat_map(|(sid, links)| {
            links.iter().map(move |a| GoldRelation {
                sentence_id: sid.clone(),
                source_index: a.source_index,
                noun_index: a.noun_index,
                kind: a.source_kind,
            })
        })
        .collect();

    let score = |kind: SourceKind| {
        let p = predicted.iter().filter(|r| r.kind == kind).count();
        let tp = predicted
            .iter()
            .filter(|r| r.kind == kind && gold_set.contains(r))
            .count();
        let g = gold_set.iter().filter(|r| r.kind == kind).count();
        Prf::from_counts(tp, p, g)
    };
    RefresScores {
        adjective: score(SourceKind::Adjective),
        verb: score(SourceKind::Verb),
    }
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<GoldRelation>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_gold(BufReader::new(file))
}

pub fn read_gold(reader: impl BufRead) -> Result<Vec<GoldRelation>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.to_string()))?);
    }
    Ok(out)
}
