//! Part-of-speech reference resolution.
//!
//! Every verb and adjective in a dependency tree is linked to the nearest
//! noun, measured in tree edges. A bottom-up pass records, for each token,
//! the closest noun inside its own subtree ([`build_memo`]). Resolution
//! ([`resolve`]) starts from a descriptor's own entry and climbs through its
//! ancestors, combining the climb length with each ancestor's entry, until
//! no ancestor further up could produce a shorter path.
//!
//! Ties between equally near nouns go to the smaller token index.

mod eval;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::corpus::Article;
use crate::tree::{DepSentence, Upos};

pub use eval::{eval_refres, load_gold, read_gold, GoldRelation, Prf, RefresScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Verb,
    Adjective,
}

impl SourceKind {
    /// Verbs and adjectives are descriptors. Auxiliaries are not: copulas
    /// only serve as waypoints between a predicate and its subject.
    pub fn of(upos: Upos) -> Option<SourceKind> {
        match upos {
            Upos::Verb => Some(SourceKind::Verb),
            Upos::Adj => Some(SourceKind::Adjective),
            _ => None,
        }
    }
}

/// Nearest noun within a token's subtree. `distance` is -1 (and `noun_index`
/// is `None`) when the subtree holds no noun; 0 means the token is a noun.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoEntry {
    pub distance: i32,
    pub noun_index: Option<usize>,
}

impl MemoEntry {
    pub const NONE: MemoEntry = MemoEntry {
        distance: -1,
        noun_index: None,
    };

    fn found(distance: usize, noun: usize) -> Self {
        MemoEntry {
            distance: distance as i32,
            noun_index: Some(noun),
        }
    }

    /// `(distance, noun_index)` when a noun was found.
    pub fn nearest(&self) -> Option<(usize, usize)> {
        self.noun_index.map(|n| (self.distance as usize, n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefAssignment {
    pub source_index: usize,
    pub noun_index: usize,
    pub distance: usize,
    pub source_kind: SourceKind,
}

/// Counts elementary steps: one per child inspected while building the memo
/// and one per ancestor visited while resolving.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCount(pub u64);

fn closer(candidate: (usize, usize), best: Option<(usize, usize)>) -> bool {
    best.is_none_or(|b| candidate < b)
}

pub fn build_memo(sentence: &DepSentence) -> Vec<MemoEntry> {
    build_memo_counted(sentence, &mut OpCount::default())
}

pub fn build_memo_counted(sentence: &DepSentence, ops: &mut OpCount) -> Vec<MemoEntry> {
    let mut memo = vec![MemoEntry::NONE; sentence.len()];
    for t in sentence.post_order() {
        if sentence.tokens()[t].upos.is_nominal() {
            memo[t] = MemoEntry::found(0, t);
            continue;
        }
        let mut best = None;
        for &c in sentence.children(t) {
            ops.0 += 1;
            if let Some((d, n)) = memo[c].nearest() {
                if closer((d + 1, n), best) {
                    best = Some((d + 1, n));
                }
            }
        }
        if let Some((d, n)) = best {
            memo[t] = MemoEntry::found(d, n);
        }
    }
    memo
}

pub fn resolve(sentence: &DepSentence, memo: &[MemoEntry]) -> Vec<RefAssignment> {
    resolve_counted(sentence, memo, &mut OpCount::default())
}

pub fn resolve_counted(
    sentence: &DepSentence,
    memo: &[MemoEntry],
    ops: &mut OpCount,
) -> Vec<RefAssignment> {
    let mut out = Vec::new();
    for tok in sentence.tokens() {
        let Some(kind) = SourceKind::of(tok.upos) else {
            continue;
        };
        if let Some((distance, noun_index)) = nearest_from(sentence, memo, tok.index, ops) {
            out.push(RefAssignment {
                source_index: tok.index,
                noun_index,
                distance,
                source_kind: kind,
            });
        }
    }
    out
}

/// Climbs from `source` while an ancestor could still match or beat the best
/// distance so far. An ancestor `k` edges up contributes `k + d` for its own
/// entry `d`; once `k` exceeds the best total nothing above can compete.
fn nearest_from(
    sentence: &DepSentence,
    memo: &[MemoEntry],
    source: usize,
    ops: &mut OpCount,
) -> Option<(usize, usize)> {
    let mut best = memo[source].nearest();
    let mut climbed = 0;
    let mut current = source;
    while let Some(parent) = sentence.head(current) {
        climbed += 1;
        if best.is_some_and(|(d, _)| climbed > d) {
            break;
        }
        ops.0 += 1;
        if let Some((d, n)) = memo[parent].nearest() {
            if closer((climbed + d, n), best) {
                best = Some((climbed + d, n));
            }
        }
        current = parent;
    }
    best
}

/// Memo and resolution for one sentence.
pub fn resolve_sentence(sentence: &DepSentence) -> Vec<RefAssignment> {
    let memo = build_memo(sentence);
    resolve(sentence, &memo)
}

/// A verb or adjective lemma attached to a noun.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descriptor {
    pub lemma: String,
    pub kind: SourceKind,
}

/// Noun key (lowercased lemma) to its descriptors, in first-mention order.
pub type DescriptorMap = IndexMap<String, Vec<Descriptor>>;

pub fn resolve_article(article: &Article) -> DescriptorMap {
    let mut map = DescriptorMap::new();
    for sentence in &article.sentences {
        let tokens = sentence.tokens();
        for a in resolve_sentence(sentence) {
            map.entry(tokens[a.noun_index].lemma.to_lowercase())
                .or_default()
                .push(Descriptor {
                    lemma: tokens[a.source_index].lemma.to_lowercase(),
                    kind: a.source_kind,
                });
        }
    }
    map
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::tree::{DepSentence, DepToken, Upos};

    pub fn sentence(rows: &[(&str, &str, Upos, Option<usize>, &str)]) -> DepSentence {
        DepSentence::new(
            rows.iter()
                .enumerate()
                .map(|(i, (form, lemma, upos, head, rel))| {
                    DepToken::new(i, form, lemma, *upos, *head, rel)
                })
                .collect(),
        )
        .unwrap()
    }

    /// "John is very healthy because John often jogs", with "is" as root and
    /// the "because" clause hanging off it.
    pub fn walkthrough() -> DepSentence {
        use Upos::*;
        sentence(&[
            ("John", "John", Propn, Some(1), "nsubj"),
            ("is", "be", Aux, None, "ROOT"),
            ("very", "very", Adv, Some(3), "advmod"),
            ("healthy", "healthy", Adj, Some(1), "acomp"),
            ("because", "because", Sconj, Some(7), "mark"),
            ("John", "John", Propn, Some(7), "nsubj"),
            ("often", "often", Adv, Some(7), "advmod"),
            ("jogs", "jog", Verb, Some(1), "advcl"),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::tree::Upos::*;

    fn entries(memo: &[MemoEntry]) -> Vec<(i32, Option<usize>)> {
        memo.iter().map(|m| (m.distance, m.noun_index)).collect()
    }

    #[test]
    fn walkthrough_memo_table() {
        let memo = build_memo(&walkthrough());
        assert_eq!(
            entries(&memo),
            vec![
                (0, Some(0)),
                (1, Some(0)),
                (-1, None),
                (-1, None),
                (-1, None),
                (0, Some(5)),
                (-1, None),
                (1, Some(5)),
            ]
        );
    }

    #[test]
    fn walkthrough_resolution() {
        let s = walkthrough();
        let memo = build_memo(&s);
        let mut ops = OpCount::default();
        let got = resolve_counted(&s, &memo, &mut ops);
        assert_eq!(
            got,
            vec![
                RefAssignment {
                    source_index: 3,
                    noun_index: 0,
                    distance: 2,
                    source_kind: SourceKind::Adjective
                },
                RefAssignment {
                    source_index: 7,
                    noun_index: 5,
                    distance: 1,
                    source_kind: SourceKind::Verb
                },
            ]
        );
    }

    #[test]
    fn single_noun_sentence() {
        let s = sentence(&[("Biden", "Biden", Propn, None, "ROOT")]);
        assert_eq!(entries(&build_memo(&s)), vec![(0, Some(0))]);
        assert!(resolve_sentence(&s).is_empty());
    }

    #[test]
    fn no_noun_sentence() {
        let s = sentence(&[
            ("Go", "go", Verb, None, "ROOT"),
            ("quickly", "quickly", Adv, Some(0), "advmod"),
        ]);
        assert!(build_memo(&s).iter().all(|m| *m == MemoEntry::NONE));
        assert!(resolve_sentence(&s).is_empty());
    }

    #[test]
    fn coordinated_subjects_link_to_the_nearer_noun() {
        // "John and Peter are happy": Peter hangs off John, so John is nearer.
        let s = sentence(&[
            ("John", "John", Propn, Some(3), "nsubj"),
            ("and", "and", Cconj, Some(0), "cc"),
            ("Peter", "Peter", Propn, Some(0), "conj"),
            ("are", "be", Aux, None, "ROOT"),
            ("happy", "happy", Adj, Some(3), "acomp"),
        ]);
        let got = resolve_sentence(&s);
        assert_eq!(got.len(), 1);
        assert_eq!((got[0].noun_index, got[0].distance), (0, 2));
    }

    #[test]
    fn equal_distance_prefers_smaller_index() {
        // verb with two noun children
        let s = sentence(&[
            ("dogs", "dog", Noun, Some(1), "nsubj"),
            ("chase", "chase", Verb, None, "ROOT"),
            ("cats", "cat", Noun, Some(1), "dobj"),
        ]);
        let got = resolve_sentence(&s);
        assert_eq!((got[0].noun_index, got[0].distance), (0, 1));
    }

    #[test]
    fn ancestor_noun_beats_deeper_subtree_noun() {
        // report(0) <- released(1) -> by(2) -> agency(3)
        let s = sentence(&[
            ("report", "report", Noun, None, "ROOT"),
            ("released", "release", Verb, Some(0), "acl"),
            ("by", "by", Adp, Some(1), "agent"),
            ("agency", "agency", Noun, Some(2), "pobj"),
        ]);
        let got = resolve_sentence(&s);
        assert_eq!((got[0].noun_index, got[0].distance), (0, 1));
    }

    #[test]
    fn ancestor_noun_at_equal_distance_wins_on_index() {
        // plan(0) <- approved(1) -> senators(2): both one edge away. The
        // climb has to look one level past D-1 to see the tie.
        let s = sentence(&[
            ("plan", "plan", Noun, None, "ROOT"),
            ("approved", "approve", Verb, Some(0), "acl"),
            ("senators", "senator", Noun, Some(1), "agent"),
        ]);
        let got = resolve_sentence(&s);
        assert_eq!((got[0].noun_index, got[0].distance), (0, 1));
    }

    #[test]
    fn same_noun_in_two_sentences_merges() {
        use crate::corpus::{Article, Leaning};
        let s1 = sentence(&[
            ("Biden", "Biden", Propn, Some(1), "nsubj"),
            ("spoke", "speak", Verb, None, "ROOT"),
        ]);
        let s2 = sentence(&[
            ("Biden", "Biden", Propn, Some(1), "nsubj"),
            ("is", "be", Aux, None, "ROOT"),
            ("tired", "tired", Adj, Some(1), "acomp"),
        ]);
        let a = Article {
            id: "x".into(),
            outlet: "o".into(),
            leaning: Some(Leaning::Left),
            published_at: chrono::NaiveDate::from_ymd_opt(2022, 1, 1).unwrap(),
            title: String::new(),
            text: String::new(),
            sentences: vec![s1, s2],
        };
        let map = resolve_article(&a);
        assert_eq!(map.len(), 1);
        let lemmas: Vec<_> = map["biden"]
            .iter()
            .map(|d| (d.lemma.as_str(), d.kind))
            .collect();
        assert_eq!(
            lemmas,
            vec![
                ("speak", SourceKind::Verb),
                ("tired", SourceKind::Adjective)
            ]
        );
    }

    #[test]
    fn article_without_descriptors_is_empty() {
        use crate::corpus::Article;
        let a = Article {
            id: "x".into(),
            outlet: "o".into(),
            leaning: None,
            published_at: chrono::NaiveDate::from_ymd_opt(2022, 1, 1).unwrap(),
            title: String::new(),
            text: String::new(),
            sentences: vec![sentence(&[
                ("the", "the", Det, Some(1), "det"),
                ("senate", "senate", Noun, None, "ROOT"),
            ])],
        };
        assert!(resolve_article(&a).is_empty());
    }

    #[test]
    fn memo_never_exceeds_one_plus_best_child() {
        let s = walkthrough();
        let memo = build_memo(&s);
        for t in 0..s.len() {
            let best_child = s
                .children(t)
                .iter()
                .filter_map(|&c| memo[c].nearest().map(|(d, _)| d))
                .min();
            if let Some(c) = best_child {
                assert!(memo[t].distance as usize <= c + 1);
            }
            assert_eq!(memo[t].distance == 0, s.tokens()[t].upos.is_nominal());
        }
    }
}
