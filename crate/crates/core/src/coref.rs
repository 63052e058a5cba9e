//! Pronoun substitution ahead of reference resolution.
//!
//! Substitutions rewrite a token's lemma and POS in place; the dependency
//! tree keeps its shape. They come either from an external resolver's JSONL
//! output or from [`heuristic_resolve`], a nearest-preceding-proper-noun
//! baseline with no gender or number agreement.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::tree::Upos;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub sentence_index: usize,
    pub token_index: usize,
    pub replacement_lemma: String,
    pub replacement_pos: Upos,
}

/// One line of the substitution JSONL format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubstitutionRecord {
    pub article_id: String,
    #[serde(flatten)]
    pub substitution: Substitution,
}

/// Where an article's substitutions came from. Recorded in model provenance
/// so reports can flag the heuristic baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorefMode {
    None,
    Baseline,
    External,
}

pub fn apply_substitutions(article: &Article, subs: &[Substitution]) -> Result<Article> {
    let mut out = article.clone();
    let mut seen = HashSet::new();
    for s in subs {
        let sentence = out
            .sentences
            .get_mut(s.sentence_index)
            .filter(|sent| s.token_index < sent.len())
            .ok_or(Error::SubstitutionRange {
                sentence: s.sentence_index,
                token: s.token_index,
            })?;
        if !s.replacement_pos.is_nominal() {
            return Err(Error::Substitution {
                sentence: s.sentence_index,
                token: s.token_index,
                reason: format!("replacement POS {} is not nominal", s.replacement_pos),
            });
        }
        if !seen.insert((s.sentence_index, s.token_index)) {
            return Err(Error::Substitution {
                sentence: s.sentence_index,
                token: s.token_index,
                reason: "token substituted twice".into(),
            });
        }
        sentence.retag(s.token_index, &s.replacement_lemma, s.replacement_pos);
    }
    Ok(out)
}

const THIRD_PERSON: &[&str] = &[
    "he",
    "him",
    "his",
    "himself",
    "she",
    "her",
    "hers",
    "herself",
    "it",
    "its",
    "itself",
    "they",
    "them",
    "their",
    "theirs",
    "themselves",
];

fn is_personal_pronoun(tok: &crate::tree::DepToken) -> bool {
    if tok.upos != Upos::Pron {
        return false;
    }
    // First and second person refer to the speaker or reader, not a named entity.
    if matches!(tok.feat("Person"), Some("1") | Some("2")) {
        return false;
    }
    tok.feat("PronType") == Some("Prs")
        || THIRD_PERSON.contains(&tok.lemma.to_lowercase().as_str())
        || THIRD_PERSON.contains(&tok.surface.to_lowercase().as_str())
}

/// Links each third-person personal pronoun to the closest preceding proper
/// noun, looking back through the current sentence and then up to `window`
/// earlier sentences.
pub fn heuristic_resolve(article: &Article, window: usize) -> Vec<Substitution> {
    let mut out = Vec::new();
    for (si, sentence) in article.sentences.iter().enumerate() {
        for tok in sentence.tokens().iter().filter(|t| is_personal_pronoun(t)) {
            let earliest = si.saturating_sub(window);
            let antecedent = (earliest..=si).rev().find_map(|sj| {
                let tokens = article.sentences[sj].tokens();
                let limit = if sj == si { tok.index } else { tokens.len() };
                tokens[..limit].iter().rev().find(|t| t.upos == Upos::Propn)
            });
            if let Some(a) = antecedent {
                out.push(Substitution {
                    sentence_index: si,
                    token_index: tok.index,
                    replacement_lemma: a.lemma.to_lowercase(),
                    replacement_pos: Upos::Propn,
                });
            }
        }
    }
    out
}

pub fn load_substitutions(path: impl AsRef<Path>) -> Result<HashMap<String, Vec<Substitution>>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_substitutions(BufReader::new(file))
}

pub fn read_substitutions(reader: impl BufRead) -> Result<HashMap<String, Vec<Substitution>>> {
    let mut out: HashMap<String, Vec<Substitution>> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SubstitutionRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        out.entry(rec.article_id)
            .or_default()
            .push(rec.substitution);
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::fixtures::john_gifted;
    use super::*;
    use crate::corpus::Leaning;
    use crate::refres::fixtures::sentence;
    use crate::refres::{resolve_article, SourceKind};
    use crate::tree::Upos::*;

    #[test]
    fn heuristic_links_he_to_john() {
        let subs = heuristic_resolve(&john_gifted(), 2);
        assert_eq!(
            subs,
            vec![Substitution {
                sentence_index: 1,
                token_index: 0,
                replacement_lemma: "john".into(),
                replacement_pos: Propn,
            }]
        );
    }

    #[test]
    fn apply_rewrites_only_the_addressed_token() {
        let a = john_gifted();
        let subs = heuristic_resolve(&a, 2);
        let b = apply_substitutions(&a, &subs).unwrap();
        let t = &b.sentences[1].tokens()[0];
        assert_eq!((t.lemma.as_str(), t.upos), ("john", Propn));
        assert_eq!(t.head, Some(1));
        let changed: usize = a
            .sentences
            .iter()
            .zip(&b.sentences)
            .map(|(x, y)| {
                x.tokens()
                    .iter()
                    .zip(y.tokens())
                    .filter(|(p, q)| p != q)
                    .count()
            })
            .sum();
        assert_eq!(changed, subs.len());
    }

    #[test]
    fn descriptors_of_pronoun_attach_to_antecedent() {
        let a = john_gifted();
        let b = apply_substitutions(&a, &heuristic_resolve(&a, 2)).unwrap();
        let map = resolve_article(&b);
        let john: Vec<_> = map["john"]
            .iter()
            .map(|d| (d.lemma.as_str(), d.kind))
            .collect();
        assert_eq!(
            john,
            vec![
                ("gifted", SourceKind::Adjective),
                ("good", SourceKind::Adjective)
            ]
        );
        assert!(!map.contains_key("he"));
    }

    #[test]
    fn empty_substitutions_are_identity() {
        let a = john_gifted();
        assert_eq!(apply_substitutions(&a, &[]).unwrap(), a);
    }

    #[test]
    fn out_of_range_substitution() {
        let a = john_gifted();
        let bad = Substitution {
            sentence_index: 1,
            token_index: 99,
            replacement_lemma: "x".into(),
            replacement_pos: Propn,
        };
        assert!(matches!(
            apply_substitutions(&a, &[bad]),
            Err(Error::SubstitutionRange {
                sentence: 1,
                token: 99
            })
        ));
        let bad_sentence = Substitution {
            sentence_index: 5,
            token_index: 0,
            replacement_lemma: "x".into(),
            replacement_pos: Propn,
        };
        assert!(apply_substitutions(&a, &[bad_sentence]).is_err());
    }

    #[test]
    fn non_nominal_replacement_rejected() {
        let a = john_gifted();
        let bad = Substitution {
            sentence_index: 1,
            token_index: 0,
            replacement_lemma: "x".into(),
            replacement_pos: Verb,
        };
        assert!(matches!(
            apply_substitutions(&a, &[bad]),
            Err(Error::Substitution { .. })
        ));
    }

    fn article(sentences: Vec<crate::tree::DepSentence>) -> Article {
        Article {
            id: "a".into(),
            outlet: "o".into(),
            leaning: Some(Leaning::Left),
            published_at: chrono::NaiveDate::from_ymd_opt(2022, 1, 1).unwrap(),
            title: String::new(),
            text: String::new(),
            sentences,
        }
    }

    #[test]
    fn no_pronouns_no_substitutions() {
        let a = article(vec![sentence(&[
            ("Biden", "Biden", Propn, Some(1), "nsubj"),
            ("spoke", "speak", Verb, None, "ROOT"),
        ])]);
        assert!(heuristic_resolve(&a, 2).is_empty());
    }

    #[test]
    fn nearest_preceding_without_gender_agreement() {
        // "Mary met John. She smiled." -> She resolves to John.
        let a = article(vec![
            sentence(&[
                ("Mary", "Mary", Propn, Some(1), "nsubj"),
                ("met", "meet", Verb, None, "ROOT"),
                ("John", "John", Propn, Some(1), "dobj"),
                (".", ".", Punct, Some(1), "punct"),
            ]),
            sentence(&[
                ("She", "she", Pron, Some(1), "nsubj"),
                ("smiled", "smile", Verb, None, "ROOT"),
                (".", ".", Punct, Some(1), "punct"),
            ]),
        ]);
        let subs = heuristic_resolve(&a, 2);
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].replacement_lemma, "john");
    }

    #[test]
    fn window_limits_lookback() {
        let named = sentence(&[("Obama", "Obama", Propn, None, "ROOT")]);
        let filler = || sentence(&[("Rain", "rain", Noun, None, "ROOT")]);
        let pron = sentence(&[
            ("He", "he", Pron, Some(1), "nsubj"),
            ("left", "leave", Verb, None, "ROOT"),
        ]);
        let a = article(vec![named, filler(), filler(), pron]);
        assert!(heuristic_resolve(&a, 2).is_empty());
        assert_eq!(heuristic_resolve(&a, 3).len(), 1);
    }

    #[test]
    fn first_person_is_not_resolved() {
        let mut s = sentence(&[
            ("Biden", "Biden", Propn, Some(2), "nsubj"),
            ("I", "I", Pron, Some(2), "nsubj"),
            ("think", "think", Verb, None, "ROOT"),
        ]);
        let mut tokens = s.tokens().to_vec();
        tokens[1].feats = "Person=1|PronType=Prs".into();
        s = crate::tree::DepSentence::new(tokens).unwrap();
        assert!(heuristic_resolve(&article(vec![s]), 2).is_empty());
    }

    #[test]
    fn substitution_jsonl() {
        let line = r#"{"article_id":"a1","sentence_index":1,"token_index":0,"replacement_lemma":"john","replacement_pos":"PROPN"}"#;
        let m = read_substitutions(line.as_bytes()).unwrap();
        assert_eq!(m["a1"][0].replacement_pos, Propn);
        assert_eq!(m["a1"][0].token_index, 0);
    }
}
