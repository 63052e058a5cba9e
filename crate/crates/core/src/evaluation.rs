//! Scoring predictions against labels and tabulating predicted leanings by
//! quarter.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::{Outcome, PredictionRecord};
use crate::corpus::{Article, Leaning, QuarterKey};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold articles of this class that received a prediction.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub classes: BTreeMap<Leaning, ClassScore>,
    pub accuracy: f64,
    pub unclassifiable_count: usize,
    /// Whether unclassifiable articles were left out of the denominators.
    pub strict: bool,
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// One-vs-rest precision, recall and F1 per class.
///
/// Unclassifiable predictions never count as a positive for any class. By
/// default they still count as misses against their gold class (lowering
/// recall and accuracy); with `strict` they are dropped from every
/// denominator.
pub fn score(
    predictions: &[PredictionRecord],
    gold: &[(String, Leaning)],
    strict: bool,
) -> Result<ClassMetrics> {
    let by_id: HashMap<&str, Outcome> = predictions
        .iter()
        .map(|p| (p.article_id.as_str(), p.predicted))
        .collect();
    let missing: Vec<String> = gold
        .iter()
        .filter(|(id, _)| !by_id.contains_key(id.as_str()))
        .map(|(id, _)| id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }

    let mut tp: BTreeMap<Leaning, usize> = BTreeMap::new();
    let mut predicted: BTreeMap<Leaning, usize> = BTreeMap::new();
    let mut support: BTreeMap<Leaning, usize> = BTreeMap::new();
    let mut unclassified: BTreeMap<Leaning, usize> = BTreeMap::new();
    for (id, truth) in gold {
        match by_id[id.as_str()].leaning() {
            None => *unclassified.entry(*truth).or_default() += 1,
            Some(p) => {
                *support.entry(*truth).or_default() += 1;
                *predicted.entry(p).or_default() += 1;
                if p == *truth {
                    *tp.entry(p).or_default() += 1;
                }
            }
        }
    }

    let get = |m: &BTreeMap<Leaning, usize>, c: Leaning| m.get(&c).copied().unwrap_or(0);
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let mut classes = BTreeMap::new();
    for c in Leaning::ALL {
        let recall_base = get(&support, c) + if strict { 0 } else { get(&unclassified, c) };
        let precision = ratio(get(&tp, c), get(&predicted, c));
        let recall = ratio(get(&tp, c), recall_base);
        classes.insert(
            c,
            ClassScore {
                precision,
                recall,
                f1: f1(precision, recall),
                support: get(&support, c),
            },
        );
    }
    let unclassifiable_count: usize = unclassified.values().sum();
    let correct: usize = tp.values().sum();
    let base = if strict {
        gold.len() - unclassifiable_count
    } else {
        gold.len()
    };
    Ok(ClassMetrics {
        classes,
        accuracy: ratio(correct, base),
        unclassifiable_count,
        strict,
    })
}

impl ClassMetrics {
    /// Two-decimal table, one row per class.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("class\tprecision\trecall\tf1\tsupport\n");
        for (c, s) in &self.classes {
            let _ = writeln!(
                out,
                "{}\t{:.2}\t{:.2}\t{:.2}\t{}",
                capitalized(*c),
                s.precision,
                s.recall,
                s.f1,
                s.support
            );
        }
        let _ = writeln!(out, "accuracy\t{:.2}", self.accuracy);
        let _ = writeln!(out, "unclassifiable\t{}", self.unclassifiable_count);
        out
    }
}

fn capitalized(c: Leaning) -> &'static str {
    match c {
        Leaning::Left => "Left",
        Leaning::Center => "Center",
        Leaning::Right => "Right",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarterRow {
    pub quarter: QuarterKey,
    /// Share of classified articles predicted as each class.
    pub fractions: BTreeMap<Leaning, f64>,
    pub n: usize,
    pub unclassifiable: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuarterDistribution {
    pub rows: Vec<QuarterRow>,
}

/// Tabulates predicted leanings per calendar quarter of publication.
pub fn temporal_apply(
    predictions: &[PredictionRecord],
    articles: &[Article],
) -> Result<QuarterDistribution> {
    let dates: HashMap<&str, QuarterKey> = articles
        .iter()
        .map(|a| (a.id.as_str(), a.quarter()))
        .collect();
    let mut counts: BTreeMap<QuarterKey, (BTreeMap<Leaning, usize>, usize)> = BTreeMap::new();
    for p in predictions {
        let q = *dates
            .get(p.article_id.as_str())
            .ok_or_else(|| Error::UnknownArticle(p.article_id.clone()))?;
        let cell = counts.entry(q).or_default();
        match p.predicted.leaning() {
            Some(l) => *cell.0.entry(l).or_default() += 1,
            None => cell.1 += 1,
        }
    }
    let rows = counts
        .into_iter()
        .map(|(quarter, (by_class, unclassifiable))| {
            let classified: usize = by_class.values().sum();
            let fractions = Leaning::ALL
                .into_iter()
                .map(|c| {
                    let k = by_class.get(&c).copied().unwrap_or(0);
                    let f = if classified == 0 {
                        0.0
                    } else {
                        k as f64 / classified as f64
                    };
                    (c, f)
                })
                .collect();
            QuarterRow {
                quarter,
                fractions,
                n: classified + unclassifiable,
                unclassifiable,
            }
        })
        .collect();
    Ok(QuarterDistribution { rows })
}

/// Shade level 0 (lightest) to 4 (darkest) for a fraction.
pub fn shade(fraction: f64) -> u8 {
    ((fraction * 5.0).floor() as i64).clamp(0, 4) as u8
}

impl QuarterDistribution {
    /// CSV: `quarter,left,center,right,n` followed by the unclassifiable
    /// count and one shade band per class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "quarter,left,center,right,n,unclassifiable,left_band,center_band,right_band\n",
        );
        for r in &self.rows {
            let f = |c| r.fractions[&c];
            let _ = writeln!(
                out,
                "{},{:.2},{:.2},{:.2},{},{},{},{},{}",
                r.quarter,
                f(Leaning::Left),
                f(Leaning::Center),
                f(Leaning::Right),
                r.n,
                r.unclassifiable,
                shade(f(Leaning::Left)),
                shade(f(Leaning::Center)),
                shade(f(Leaning::Right)),
            );
        }
        out
    }

    /// Classes as rows and quarters as columns, cells shaded by magnitude.
    pub fn to_table(&self) -> String {
        const SHADES: [char; 5] = [' ', '░', '▒', '▓', '█'];
        let mut out = String::from("      ");
        for r in &self.rows {
            let _ = write!(out, " {:>6}", r.quarter.to_string());
        }
        out.push('\n');
        for c in Leaning::ALL {
            let _ = write!(out, "{:<6}", capitalized(c));
            for r in &self.rows {
                let f = r.fractions[&c];
                let _ = write!(out, " {}{:>5.2}", SHADES[shade(f) as usize], f);
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<6}", "n");
        for r in &self.rows {
            let _ = write!(out, " {:>6}", r.n);
        }
        out.push('\n');
        out
    }
}
