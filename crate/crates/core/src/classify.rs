//! Cosine-distance classification against the leaning vectors.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Article, Leaning};
use crate::error::{Error, Result};
use crate::refres::resolve_article;
use crate::space::LeaningSpace;
use crate::stance::{article_stance, ValenceLexicon};

/// Distances closer than this are treated as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// `1 - a·b / (|a| |b|)`, clamped to [0, 2].
///
/// Fails with [`Error::ZeroVector`] when either side is all zero, which for
/// an article means it shares no scored noun with the training corpus.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    // sqrt(na * nb) keeps the result symmetric in its arguments and exact
    // for a == b.
    Ok((1.0 - dot / (na * nb).sqrt()).clamp(0.0, 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub noun: String,
    pub article_stance: f64,
    /// `article_stance * class_stance` for each class.
    pub per_class: BTreeMap<Leaning, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub article_id: String,
    pub distances: BTreeMap<Leaning, f64>,
    pub predicted: Leaning,
    pub tie_flag: bool,
    pub contributions: Vec<Contribution>,
}

/// Picks the class with the smallest distance. Classes within
/// [`TIE_TOLERANCE`] of the minimum are tied and the first of them in
/// Left, Center, Right order wins.
pub fn argmin(distances: &BTreeMap<Leaning, f64>) -> (Leaning, bool) {
    let min = distances.values().copied().fold(f64::INFINITY, f64::min);
    let tied: Vec<Leaning> = Leaning::ALL
        .into_iter()
        .filter(|c| {
            distances
                .get(c)
                .is_some_and(|d| (d - min).abs() <= TIE_TOLERANCE)
        })
        .collect();
    (tied[0], tied.len() > 1)
}

/// Classifies a projected article vector.
pub fn classify_vector(
    article_id: &str,
    vector: &[f64],
    space: &LeaningSpace,
) -> Result<ClassificationResult> {
    if vector.iter().all(|x| *x == 0.0) {
        return Err(Error::ZeroVector);
    }
    let mut distances = BTreeMap::new();
    for class in Leaning::ALL {
        distances.insert(class, cosine_distance(vector, space.vector(class))?);
    }
    let (predicted, tie_flag) = argmin(&distances);
    let contributions = vector
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != 0.0)
        .map(|(k, &x)| Contribution {
            noun: space.index.noun(k).to_string(),
            article_stance: x,
            per_class: Leaning::ALL
                .into_iter()
                .map(|c| (c, x * space.vector(c)[k]))
                .collect(),
        })
        .collect();
    Ok(ClassificationResult {
        article_id: article_id.to_string(),
        distances,
        predicted,
        tie_flag,
        contributions,
    })
}

/// A trained space together with the lexicon used to score articles.
pub struct Classifier<'a> {
    pub space: &'a LeaningSpace,
    pub lexicon: &'a ValenceLexicon,
}

impl Classifier<'_> {
    /// Expects an article that is already parsed and coref-substituted.
    pub fn classify(&self, article: &Article) -> Result<ClassificationResult> {
        let stance = article_stance(&resolve_article(article), self.lexicon);
        classify_vector(&article.id, &self.space.project(&stance), self.space)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainRow {
    pub noun: String,
    pub article_stance: f64,
    pub class_stance: f64,
    /// Positive values pull the article toward the predicted class.
    pub pull: f64,
}

/// The `top_k` nouns with the largest `|article stance × predicted-class
/// stance|`. Nouns the predicted class has no stance on are left out.
pub fn explain(result: &ClassificationResult, top_k: usize) -> Vec<ExplainRow> {
    let mut rows: Vec<ExplainRow> = result
        .contributions
        .iter()
        .filter_map(|c| {
            let pull = c.per_class[&result.predicted];
            (pull != 0.0).then(|| ExplainRow {
                noun: c.noun.clone(),
                article_stance: c.article_stance,
                class_stance: pull / c.article_stance,
                pull,
            })
        })
        .collect();
    rows.sort_by(|a, b| b.pull.abs().total_cmp(&a.pull.abs()));
    rows.truncate(top_k);
    rows
}

/// Predicted outcome as written to prediction files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Left,
    Center,
    Right,
    Unclassifiable,
}

impl From<Leaning> for Outcome {
    fn from(l: Leaning) -> Self {
        match l {
            Leaning::Left => Outcome::Left,
            Leaning::Center => Outcome::Center,
            Leaning::Right => Outcome::Right,
        }
    }
}

impl Outcome {
    pub fn leaning(self) -> Option<Leaning> {
        match self {
            Outcome::Left => Some(Leaning::Left),
            Outcome::Center => Some(Leaning::Center),
            Outcome::Right => Some(Leaning::Right),
            Outcome::Unclassifiable => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.leaning() {
            Some(l) => l.fmt(f),
            None => f.write_str("unclassifiable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Rule,
    Conv,
}

/// One line of a prediction JSONL file. Rule-based predictions carry
/// distances; the convolutional baseline writes probabilities instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub article_id: String,
    pub model: ModelKind,
    pub predicted: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<BTreeMap<Leaning, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<BTreeMap<Leaning, f64>>,
    #[serde(default)]
    pub tie_flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
}

impl PredictionRecord {
    pub fn rule(result: &Result<ClassificationResult>, article_id: &str) -> Self {
        match result {
            Ok(r) => PredictionRecord {
                article_id: r.article_id.clone(),
                model: ModelKind::Rule,
                predicted: r.predicted.into(),
                distances: Some(r.distances.clone()),
                probabilities: None,
                tie_flag: r.tie_flag,
                config_digest: None,
            },
            Err(_) => PredictionRecord {
                article_id: article_id.to_string(),
                model: ModelKind::Rule,
                predicted: Outcome::Unclassifiable,
                distances: None,
                probabilities: None,
                tie_flag: false,
                config_digest: None,
            },
        }
    }
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions(BufReader::new(file))
}

pub fn read_predictions(reader: impl BufRead) -> Result<Vec<PredictionRecord>> {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_space, fixtures::class_stances};
    use crate::stance::StanceMap;

    const ARTICLE: [f64; 6] = [-0.3, 0.0, 0.0, 0.1, 0.0, 0.0];

    /// Direct evaluation written out term by term, independent of
    /// `cosine_distance`.
    fn oracle(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = (0..a.len()).map(|i| a[i] * b[i]).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        1.0 - dot / (na * nb)
    }

    #[test]
    fn worked_example_distances() {
        let s = build_space(&class_stances()).unwrap();
        let left = cosine_distance(&ARTICLE, s.vector(Leaning::Left)).unwrap();
        let center = cosine_distance(&ARTICLE, s.vector(Leaning::Center)).unwrap();
        let right = cosine_distance(&ARTICLE, s.vector(Leaning::Right)).unwrap();
        assert!((left - 0.17).abs() <= 0.005, "{left}");
        assert!((center - 0.51).abs() <= 0.005, "{center}");
        // The published table prints 1.51 here; the formula gives 1.6116.
        assert!((right - 1.61).abs() <= 0.005, "{right}");
        assert!((right - oracle(&ARTICLE, s.vector(Leaning::Right))).abs() < 1e-12);
    }

    #[test]
    fn self_distance_and_errors() {
        assert_eq!(cosine_distance(&ARTICLE, &ARTICLE).unwrap(), 0.0);
        assert!(matches!(
            cosine_distance(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            cosine_distance(&[1.0], &[1.0, 0.0]),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert_eq!(cosine_distance(&[1.0, 0.0], &[-2.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn worked_example_predicts_left() {
        let s = build_space(&class_stances()).unwrap();
        let r = classify_vector("ex", &ARTICLE, &s).unwrap();
        assert_eq!(r.predicted, Leaning::Left);
        assert!(!r.tie_flag);
        let rows = explain(&r, 2);
        let nouns: Vec<_> = rows.iter().map(|r| r.noun.as_str()).collect();
        assert_eq!(nouns, ["trump", "immigrant"]);
        assert!((rows[0].pull - 0.21).abs() < 1e-12);
        assert_eq!(explain(&r, 10).len(), 2);
    }

    #[test]
    fn class_restricted_article_sits_on_its_class() {
        let s = build_space(&class_stances()).unwrap();
        let art = StanceMap::from_means([
            ("trump", 0.8),
            ("ira", -0.1),
            ("israel", 0.8),
            ("vaccine", -0.5),
        ]);
        let r = classify_vector("r", &s.project(&art), &s).unwrap();
        assert_eq!(r.predicted, Leaning::Right);
        assert!(r.distances[&Leaning::Right].abs() < 1e-12);
    }

    #[test]
    fn zero_vector_is_unclassifiable() {
        let s = build_space(&class_stances()).unwrap();
        let art = StanceMap::from_means([("canada", 0.4)]);
        assert!(matches!(
            classify_vector("c", &s.project(&art), &s),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn ties_resolve_in_fixed_order() {
        let d = BTreeMap::from([
            (Leaning::Left, 0.5),
            (Leaning::Center, 0.3),
            (Leaning::Right, 0.3),
        ]);
        assert_eq!(argmin(&d), (Leaning::Center, true));
        let d = BTreeMap::from([
            (Leaning::Left, 0.3),
            (Leaning::Center, 0.3 + 1e-10),
            (Leaning::Right, 0.1 + 0.2),
        ]);
        assert_eq!(argmin(&d), (Leaning::Left, true));
        let d = BTreeMap::from([
            (Leaning::Left, 0.9),
            (Leaning::Center, 0.3),
            (Leaning::Right, 0.2),
        ]);
        assert_eq!(argmin(&d), (Leaning::Right, false));
    }

    #[test]
    fn prediction_schema() {
        let rec = PredictionRecord {
            article_id: "a".into(),
            model: ModelKind::Conv,
            predicted: Outcome::Left,
            distances: None,
            probabilities: Some(BTreeMap::from([
                (Leaning::Left, 0.7),
                (Leaning::Center, 0.2),
                (Leaning::Right, 0.1),
            ])),
            tie_flag: false,
            config_digest: None,
        };
        let line = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            line,
            r#"{"article_id":"a","model":"conv","predicted":"left","probabilities":{"left":0.7,"center":0.2,"right":0.1},"tie_flag":false}"#
        );
        let minimal = r#"{"article_id":"b","model":"conv","predicted":"right","probabilities":{"left":0.1,"center":0.1,"right":0.8}}"#;
        let parsed = read_predictions(minimal.as_bytes()).unwrap();
        assert_eq!(parsed[0].predicted, Outcome::Right);
    }
}
