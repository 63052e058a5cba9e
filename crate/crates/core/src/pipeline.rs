//! End-to-end training and classification over article batches.
//!
//! Per-article work runs on the current rayon pool; results are collected in
//! input order so outputs do not depend on scheduling.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{ClassificationResult, Classifier};
use crate::coref::{self, CorefMode, Substitution};
use crate::corpus::{self, Article, Leaning};
use crate::error::{Error, Result};
use crate::refres::resolve_article;
use crate::space::{build_space_with, LeaningSpace};
use crate::stance::{article_stance, corpus_stance, StanceMap, ValenceLexicon};

/// Sentences of look-back for the baseline pronoun heuristic.
pub const COREF_WINDOW: usize = 2;

/// How pronouns are rewritten before reference resolution.
#[derive(Debug, Clone, Default)]
pub enum Coref {
    None,
    #[default]
    Baseline,
    /// Substitutions keyed by article id; articles without an entry are
    /// left unchanged.
    External(HashMap<String, Vec<Substitution>>),
}

impl Coref {
    pub fn mode(&self) -> CorefMode {
        match self {
            Coref::None => CorefMode::None,
            Coref::Baseline => CorefMode::Baseline,
            Coref::External(_) => CorefMode::External,
        }
    }

    pub fn apply(&self, article: &Article) -> Result<Article> {
        match self {
            Coref::None => Ok(article.clone()),
            Coref::Baseline => coref::apply_substitutions(
                article,
                &coref::heuristic_resolve(article, COREF_WINDOW),
            ),
            Coref::External(subs) => match subs.get(&article.id) {
                Some(s) => coref::apply_substitutions(article, s).map_err(|e| match e {
                    Error::SubstitutionRange { sentence, token } => Error::Substitution {
                        sentence,
                        token,
                        reason: format!("out of range in article `{}`", article.id),
                    },
                    other => other,
                }),
                None => Ok(article.clone()),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub cap: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub min_mentions: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            cap: 10_000,
            train_fraction: 0.8,
            seed: 0,
            min_mentions: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub space: LeaningSpace,
    pub class_stances: BTreeMap<Leaning, StanceMap>,
    pub train: Vec<Article>,
    pub test: Vec<Article>,
}

/// Stance map of one article after coref substitution.
pub fn article_stance_map(
    article: &Article,
    coref: &Coref,
    lexicon: &ValenceLexicon,
) -> Result<StanceMap> {
    let article = coref.apply(article)?;
    Ok(article_stance(&resolve_article(&article), lexicon))
}

/// Corpus stance per class over labeled articles.
pub fn class_stances(
    articles: &[Article],
    coref: &Coref,
    lexicon: &ValenceLexicon,
) -> Result<BTreeMap<Leaning, StanceMap>> {
    let maps: Vec<(Leaning, StanceMap)> = articles
        .par_iter()
        .map(|a| {
            let class = a.leaning.ok_or_else(|| Error::Unlabeled(a.id.clone()))?;
            Ok((class, article_stance_map(a, coref, lexicon)?))
        })
        .collect::<Result<_>>()?;
    Ok(Leaning::ALL
        .into_iter()
        .map(|c| {
            let merged = corpus_stance(maps.iter().filter(|(l, _)| *l == c).map(|(_, m)| m));
            (c, merged)
        })
        .collect())
}

/// balance → split → coref → resolution → stance → leaning space.
pub fn train(
    corpus: &[Article],
    config: &TrainConfig,
    coref: &Coref,
    lexicon: &ValenceLexicon,
) -> Result<TrainOutput> {
    let balanced = corpus::balance(corpus, config.cap, config.seed)?;
    let (train, test) = corpus::split(&balanced, config.train_fraction, config.seed)?;
    let class_stances = class_stances(&train, coref, lexicon)?;
    let space = build_space_with(&class_stances, config.min_mentions)?;
    Ok(TrainOutput {
        space,
        class_stances,
        train,
        test,
    })
}

/// Classifies each article; unclassifiable ones come back as `Err`.
pub fn classify_all(
    articles: &[Article],
    space: &LeaningSpace,
    coref: &Coref,
    lexicon: &ValenceLexicon,
) -> Result<Vec<Result<ClassificationResult>>> {
    let classifier = Classifier { space, lexicon };
    articles
        .par_iter()
        .map(|a| {
            let a = coref.apply(a)?;
            Ok(classifier.classify(&a))
        })
        .collect()
}
