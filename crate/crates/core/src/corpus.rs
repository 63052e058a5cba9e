//! Article corpora: JSONL ingestion, distribution statistics, class
//! balancing and the stratified train/test split.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::DepSentence;

/// Political leaning of an outlet. The declaration order (Left, Center,
/// Right) is also the tie-break order used by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leaning {
    Left,
    Center,
    Right,
}

impl Leaning {
    pub const ALL: [Leaning; 3] = [Leaning::Left, Leaning::Center, Leaning::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            Leaning::Left => "left",
            Leaning::Center => "center",
            Leaning::Right => "right",
        }
    }

    /// Maps "left" / "center" / "right" (any case); anything else is unlabeled.
    pub fn parse_label(s: &str) -> Option<Leaning> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Some(Leaning::Left),
            "center" => Some(Leaning::Center),
            "right" => Some(Leaning::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Leaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Calendar quarter, rendered `YYQn` (e.g. `21Q2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuarterKey {
    pub year: i32,
    pub quarter: u8,
}

impl QuarterKey {
    pub fn of(date: NaiveDate) -> Self {
        QuarterKey {
            year: date.year(),
            quarter: ((date.month() - 1) / 3 + 1) as u8,
        }
    }
}

impl fmt::Display for QuarterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}Q{}", self.year.rem_euclid(100), self.quarter)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Article {
    pub id: String,
    pub outlet: String,
    pub leaning: Option<Leaning>,
    pub published_at: NaiveDate,
    pub title: String,
    pub text: String,
    pub sentences: Vec<DepSentence>,
}

impl Article {
    pub fn quarter(&self) -> QuarterKey {
        QuarterKey::of(self.published_at)
    }
}

/// One line of the article JSONL format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: String,
    pub outlet: String,
    pub leaning: String,
    pub published_at: String,
    pub title: String,
    pub text: String,
}

impl From<&Article> for ArticleRecord {
    fn from(a: &Article) -> Self {
        ArticleRecord {
            id: a.id.clone(),
            outlet: a.outlet.clone(),
            leaning: a.leaning.map_or("unlabeled", Leaning::as_str).to_string(),
            published_at: a.published_at.format("%Y-%m-%d").to_string(),
            title: a.title.clone(),
            text: a.text.clone(),
        }
    }
}

/// Accepts a plain date or an RFC 3339 timestamp (the date part is kept).
fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .or_else(|| {
            chrono::DateTime::parse_from_rfc3339(s)
                .ok()
                .map(|dt| dt.with_timezone(&chrono::Utc).date_naive())
        })
        .or_else(|| {
            s.get(..10)
                .and_then(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").ok())
        })
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Article>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus(reader: impl BufRead) -> Result<Vec<Article>> {
    let mut seen = HashSet::new();
    let mut articles = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ArticleRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let published_at = parse_date(&rec.published_at)
            .ok_or_else(|| Error::parse(lineno, format!("bad date `{}`", rec.published_at)))?;
        if !seen.insert(rec.id.clone()) {
            return Err(Error::DuplicateId(rec.id));
        }
        articles.push(Article {
            leaning: Leaning::parse_label(&rec.leaning),
            id: rec.id,
            outlet: rec.outlet,
            published_at,
            title: rec.title,
            text: rec.text,
            sentences: Vec::new(),
        });
    }
    Ok(articles)
}

pub fn write_corpus(mut out: impl Write, articles: &[Article]) -> Result<()> {
    for a in articles {
        serde_json::to_writer(&mut out, &ArticleRecord::from(a))?;
        writeln!(out).map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

/// Inclusive publication-date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    /// 2021-01-01 through 2023-12-31.
    pub fn study_period() -> Self {
        DateWindow {
            start: NaiveDate::from_ymd_opt(2021, 1, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2023, 12, 31).unwrap(),
        }
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

impl std::str::FromStr for DateWindow {
    type Err = String;

    /// `YYYY-MM-DD..YYYY-MM-DD`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected START..END, got `{s}`"))?;
        let start = parse_date(a).ok_or_else(|| format!("bad date `{a}`"))?;
        let end = parse_date(b).ok_or_else(|| format!("bad date `{b}`"))?;
        if start > end {
            return Err(format!("window start {start} is after end {end}"));
        }
        Ok(DateWindow { start, end })
    }
}

pub fn enforce_window(articles: &[Article], window: DateWindow) -> Result<()> {
    match articles.iter().find(|a| !window.contains(a.published_at)) {
        Some(a) => Err(Error::OutsideWindow {
            id: a.id.clone(),
            date: a.published_at,
            start: window.start,
            end: window.end,
        }),
        None => Ok(()),
    }
}

fn require_labels(corpus: &[Article]) -> Result<()> {
    match corpus.iter().find(|a| a.leaning.is_none()) {
        Some(a) => Err(Error::Unlabeled(a.id.clone())),
        None => Ok(()),
    }
}

/// Truncates each class to at most `cap` articles.
///
/// Removals are taken one at a time from the (outlet, quarter) cell that
/// currently holds the most articles of the class, so the temporal
/// distribution flattens as the class shrinks. Ties between equally large
/// cells and the choice of article within a cell are seeded. Surviving
/// articles keep their input order.
pub fn balance(corpus: &[Article], cap: usize, seed: u64) -> Result<Vec<Article>> {
    if cap == 0 {
        return Err(Error::InvalidParameter("cap must be at least 1".into()));
    }
    require_labels(corpus)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut removed = vec![false; corpus.len()];
    for class in Leaning::ALL {
        let mut cells: BTreeMap<(&str, QuarterKey), Vec<usize>> = BTreeMap::new();
        let mut size = 0;
        for (i, a) in corpus.iter().enumerate() {
            if a.leaning == Some(class) {
                cells
                    .entry((a.outlet.as_str(), a.quarter()))
                    .or_default()
                    .push(i);
                size += 1;
            }
        }
        if size == 0 {
            return Err(Error::EmptyClass(class));
        }
        let mut cells: Vec<Vec<usize>> = cells.into_values().collect();
        for _ in cap..size {
            let largest = cells.iter().map(Vec::len).max().unwrap_or(0);
            let tied: Vec<usize> = (0..cells.len())
                .filter(|&c| cells[c].len() == largest)
                .collect();
            let cell = &mut cells[tied[rng.gen_range(0..tied.len())]];
            let victim = cell.swap_remove(rng.gen_range(0..cell.len()));
            removed[victim] = true;
        }
    }

    Ok(corpus
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(a, _)| a.clone())
        .collect())
}

/// Stratified split over (leaning, quarter) cells. Each cell sends
/// `round(train_fraction * size)` articles to train; both halves keep the
/// input order.
pub fn split(
    corpus: &[Article],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<Article>, Vec<Article>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    require_labels(corpus)?;

    let mut cells: BTreeMap<(Leaning, QuarterKey), Vec<usize>> = BTreeMap::new();
    for (i, a) in corpus.iter().enumerate() {
        cells
            .entry((a.leaning.unwrap(), a.quarter()))
            .or_default()
            .push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; corpus.len()];
    for mut members in cells.into_values() {
        let take = (train_fraction * members.len() as f64).round() as usize;
        members.shuffle(&mut rng);
        for &i in &members[..take] {
            in_train[i] = true;
        }
    }

    let (train, test): (Vec<_>, Vec<_>) = corpus.iter().zip(&in_train).partition(|(_, &t)| t);
    Ok((
        train.into_iter().map(|(a, _)| a.clone()).collect(),
        test.into_iter().map(|(a, _)| a.clone()).collect(),
    ))
}

/// Article counts per (leaning, outlet, quarter). Unlabeled articles are
/// counted under `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub counts: BTreeMap<(Option<Leaning>, String, QuarterKey), usize>,
}

impl CorpusStats {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn class_total(&self, leaning: Option<Leaning>) -> usize {
        self.counts
            .iter()
            .filter(|((l, _, _), _)| *l == leaning)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn outlet_total(&self, outlet: &str) -> usize {
        self.counts
            .iter()
            .filter(|((_, o, _), _)| o == outlet)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn quarter_total(&self, quarter: QuarterKey) -> usize {
        self.counts
            .iter()
            .filter(|((_, _, q), _)| *q == quarter)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn get(&self, leaning: Option<Leaning>, outlet: &str, quarter: QuarterKey) -> usize {
        self.counts
            .get(&(leaning, outlet.to_string(), quarter))
            .copied()
            .unwrap_or(0)
    }

    /// Tab-separated, with header `leaning, outlet, quarter, count`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("leaning\toutlet\tquarter\tcount\n");
        for ((l, o, q), c) in &self.counts {
            let l = l.map_or("unlabeled", Leaning::as_str);
            out.push_str(&format!("{l}\t{o}\t{q}\t{c}\n"));
        }
        out
    }
}

pub fn stats(corpus: &[Article]) -> CorpusStats {
    let mut s = CorpusStats::default();
    for a in corpus {
        *s.counts
            .entry((a.leaning, a.outlet.clone(), a.quarter()))
            .or_default() += 1;
    }
    s
}
