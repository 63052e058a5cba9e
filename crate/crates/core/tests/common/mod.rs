#![allow(dead_code)]

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::Rng;
use stancevec_core::conllu::{write_conllu, ParsedSentence};
use stancevec_core::corpus::{Article, Leaning};
use stancevec_core::tree::{DepSentence, DepToken, Upos};

const TAGS: [Upos; 8] = [
    Upos::Noun,
    Upos::Propn,
    Upos::Verb,
    Upos::Adj,
    Upos::Aux,
    Upos::Det,
    Upos::Adv,
    Upos::Adp,
];

/// Uniform random tree over `n` tokens with shuffled token indices and
/// random POS tags.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> DepSentence {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut heads = vec![None; n];
    for pos in 1..n {
        let parent = labels[rng.gen_range(0..pos)];
        heads[labels[pos]] = Some(parent);
    }
    let tokens = (0..n)
        .map(|i| {
            let upos = TAGS[rng.gen_range(0..TAGS.len())];
            DepToken::new(i, "w", "w", upos, heads[i], "dep")
        })
        .collect();
    DepSentence::new(tokens).unwrap()
}

/// Brute force over every path that climbs zero or more edges from
/// `source` and then descends into the reached ancestor's subtree.
/// Returns the smallest (distance, noun index).
pub fn oracle_nearest(s: &DepSentence, source: usize) -> Option<(usize, usize)> {
    let n = s.len();
    let parent = |t: usize| s.tokens()[t].head;
    let mut best: Option<(usize, usize)> = None;
    let mut ancestor = Some(source);
    let mut up = 0;
    while let Some(a) = ancestor {
        for target in 0..n {
            if !s.tokens()[target].upos.is_nominal() {
                continue;
            }
            // depth of target below a, if a is an ancestor-or-self of target
            let mut down = 0;
            let mut cur = Some(target);
            while let Some(c) = cur {
                if c == a {
                    let cand = (up + down, target);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                    break;
                }
                cur = parent(c);
                down += 1;
            }
        }
        ancestor = parent(a);
        up += 1;
    }
    best
}

/// A degenerate chain: token i hangs off token i-1. Only the root is a
/// noun and every other token is a verb, so each verb has to climb all
/// the way up.
pub fn chain(n: usize) -> DepSentence {
    let tokens = (0..n)
        .map(|i| {
            let (upos, head) = if i == 0 {
                (Upos::Noun, None)
            } else {
                (Upos::Verb, Some(i - 1))
            };
            DepToken::new(i, "w", "w", upos, head, "dep")
        })
        .collect();
    DepSentence::new(tokens).unwrap()
}

// Planted-stance corpora -----------------------------------------------------

pub const SHARED_NOUNS: [&str; 4] = ["tax", "border", "union", "pipeline"];
pub const POSITIVE_ADJ: [&str; 5] = ["good", "great", "excellent", "wonderful", "brilliant"];
pub const NEGATIVE_ADJ: [&str; 5] = ["bad", "terrible", "awful", "horrible", "corrupt"];
pub const POSITIVE_VERB: [&str; 4] = ["win", "succeed", "celebrate", "praise"];
pub const NEGATIVE_VERB: [&str; 4] = ["fail", "collapse", "ruin", "threaten"];

/// Valence sign each class gives the shared nouns, plus a class-specific
/// proper noun it always praises.
pub fn plan(class: Leaning) -> ([i8; 4], &'static str) {
    match class {
        Leaning::Left => ([1, -1, 1, -1], "Alderon"),
        Leaning::Right => ([-1, 1, -1, 1], "Brevik"),
        Leaning::Center => ([1, 1, -1, -1], "Castellan"),
    }
}

fn adj_sentence(noun: &str, upos: Upos, adj: &str) -> DepSentence {
    // "The <noun> is <adj> ."
    DepSentence::new(vec![
        DepToken::new(0, "The", "the", Upos::Det, Some(1), "det"),
        DepToken::new(1, noun, noun, upos, Some(2), "nsubj"),
        DepToken::new(2, "is", "be", Upos::Aux, None, "ROOT"),
        DepToken::new(3, adj, adj, Upos::Adj, Some(2), "acomp"),
        DepToken::new(4, ".", ".", Upos::Punct, Some(2), "punct"),
    ])
    .unwrap()
}

fn verb_sentence(noun: &str, upos: Upos, verb: &str) -> DepSentence {
    // "<noun> <verb>s ."
    DepSentence::new(vec![
        DepToken::new(0, noun, noun, upos, Some(1), "nsubj"),
        DepToken::new(1, &format!("{verb}s"), verb, Upos::Verb, None, "ROOT"),
        DepToken::new(2, ".", ".", Upos::Punct, Some(1), "punct"),
    ])
    .unwrap()
}

fn pronoun_sentence(adj: &str) -> DepSentence {
    // "He is <adj> ."
    let mut he = DepToken::new(0, "He", "he", Upos::Pron, Some(1), "nsubj");
    he.feats = "Case=Nom|Gender=Masc|Number=Sing|Person=3|PronType=Prs".into();
    DepSentence::new(vec![
        he,
        DepToken::new(1, "is", "be", Upos::Aux, None, "ROOT"),
        DepToken::new(2, adj, adj, Upos::Adj, Some(1), "acomp"),
        DepToken::new(3, ".", ".", Upos::Punct, Some(1), "punct"),
    ])
    .unwrap()
}

fn pick<'a>(rng: &mut impl Rng, positive: bool, pos: &[&'a str], neg: &[&'a str]) -> &'a str {
    let pool = if positive { pos } else { neg };
    pool[rng.gen_range(0..pool.len())]
}

/// One synthetic article for `class`: three of the four shared nouns with
/// the class's valence signs, and the class marker mentioned by name and
/// then through a pronoun.
pub fn planted_article(rng: &mut impl Rng, class: Leaning, id: String, outlet: &str) -> Article {
    let (signs, marker) = plan(class);
    let mut nouns: Vec<usize> = (0..4).collect();
    nouns.shuffle(rng);
    let mut sentences = Vec::new();
    for &k in &nouns[..3] {
        let positive = signs[k] > 0;
        if rng.gen_bool(0.5) {
            sentences.push(adj_sentence(
                SHARED_NOUNS[k],
                Upos::Noun,
                pick(rng, positive, &POSITIVE_ADJ, &NEGATIVE_ADJ),
            ));
        } else {
            sentences.push(verb_sentence(
                SHARED_NOUNS[k],
                Upos::Noun,
                pick(rng, positive, &POSITIVE_VERB, &NEGATIVE_VERB),
            ));
        }
    }
    sentences.push(verb_sentence(
        marker,
        Upos::Propn,
        pick(rng, true, &POSITIVE_VERB, &NEGATIVE_VERB),
    ));
    sentences.push(pronoun_sentence(pick(
        rng,
        true,
        &POSITIVE_ADJ,
        &NEGATIVE_ADJ,
    )));

    let year = rng.gen_range(2021..=2023);
    let month = rng.gen_range(1..=12);
    let text = sentences
        .iter()
        .map(|s| s.text())
        .collect::<Vec<_>>()
        .join(" ");
    Article {
        id,
        outlet: outlet.to_string(),
        leaning: Some(class),
        published_at: NaiveDate::from_ymd_opt(year, month, 15).unwrap(),
        title: String::new(),
        text,
        sentences,
    }
}

pub fn outlet_for(class: Leaning, i: usize) -> &'static str {
    let outlets: [&str; 2] = match class {
        Leaning::Left => ["CNN", "MSNBC"],
        Leaning::Center => ["PBS", "Reuters"],
        Leaning::Right => ["FOX", "Breitbart"],
    };
    outlets[i % 2]
}

pub fn planted_corpus(rng: &mut impl Rng, per_class: usize, prefix: &str) -> Vec<Article> {
    let mut out = Vec::new();
    for class in Leaning::ALL {
        for i in 0..per_class {
            out.push(planted_article(
                rng,
                class,
                format!("{prefix}-{class}-{i}"),
                outlet_for(class, i),
            ));
        }
    }
    out
}

/// Article JSONL and CoNLL-U renderings of a corpus.
pub fn to_files(articles: &[Article]) -> (String, String) {
    let mut jsonl = Vec::new();
    stancevec_core::corpus::write_corpus(&mut jsonl, articles).unwrap();
    let sentences: Vec<ParsedSentence> = articles
        .iter()
        .flat_map(|a| {
            a.sentences.iter().enumerate().map(|(i, s)| ParsedSentence {
                article_id: Some(a.id.clone()),
                sent_id: Some(format!("{}-{i}", a.id)),
                sentence: s.clone(),
            })
        })
        .collect();
    (String::from_utf8(jsonl).unwrap(), write_conllu(&sentences))
}
