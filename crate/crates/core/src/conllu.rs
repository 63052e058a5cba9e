//! CoNLL-U reading and writing.
//!
//! Only ID, FORM, LEMMA, UPOS, FEATS, HEAD and DEPREL are used. Multiword
//! token ranges (`3-4`) and empty nodes (`5.1`) are skipped. Sentences are
//! linked to articles through `# article_id = ...` comments, which stay in
//! effect until the next one; `# sent_id = ...` names a single sentence.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::tree::{DepSentence, DepToken, Upos};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSentence {
    pub article_id: Option<String>,
    pub sent_id: Option<String>,
    pub sentence: DepSentence,
}

pub fn load_conllu(path: impl AsRef<Path>) -> Result<Vec<ParsedSentence>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_conllu(BufReader::new(file))
}

pub fn read_conllu(reader: impl BufRead) -> Result<Vec<ParsedSentence>> {
    let mut out = Vec::new();
    let mut article_id: Option<String> = None;
    let mut sent_id: Option<String> = None;
    let mut tokens: Vec<DepToken> = Vec::new();
    let mut start_line = 1;

    let mut flush = |tokens: &mut Vec<DepToken>,
                     sent_id: &mut Option<String>,
                     article_id: &Option<String>,
                     start_line: usize|
     -> Result<()> {
        if tokens.is_empty() {
            *sent_id = None;
            return Ok(());
        }
        let sentence = DepSentence::new(std::mem::take(tokens))
            .map_err(|e| Error::parse(start_line, format!("sentence starting here: {e}")))?;
        out.push(ParsedSentence {
            article_id: article_id.clone(),
            sent_id: sent_id.take(),
            sentence,
        });
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut tokens, &mut sent_id, &article_id, start_line)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "article_id" => article_id = Some(value.trim().to_string()),
                    "sent_id" => sent_id = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            continue;
        }
        if tokens.is_empty() {
            start_line = lineno;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                lineno,
                format!("expected 10 columns, found {}", cols.len()),
            ));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad token id `{}`", cols[0])))?;
        if id == 0 {
            return Err(Error::parse(lineno, "token ids start at 1"));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad head `{}`", cols[6])))?;
        let upos: Upos = cols[3]
            .parse()
            .map_err(|e: String| Error::parse(lineno, e))?;
        tokens.push(DepToken {
            index: id - 1,
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos,
            head: head.checked_sub(1),
            deprel: cols[7].to_string(),
            feats: cols[5].to_string(),
        });
    }
    flush(&mut tokens, &mut sent_id, &article_id, start_line)?;
    Ok(out)
}

/// Serializes sentences back to CoNLL-U, emitting an `# article_id` comment
/// whenever the article changes.
pub fn write_conllu(sentences: &[ParsedSentence]) -> String {
    let mut out = String::new();
    let mut current: Option<&str> = None;
    for s in sentences {
        if let Some(id) = s.article_id.as_deref() {
            if current != Some(id) {
                let _ = writeln!(out, "# article_id = {id}");
                current = Some(id);
            }
        }
        if let Some(id) = &s.sent_id {
            let _ = writeln!(out, "# sent_id = {id}");
        }
        let _ = writeln!(out, "# text = {}", s.sentence.text());
        for t in s.sentence.tokens() {
            let feats = if t.feats.is_empty() {
                "_"
            } else {
                t.feats.as_str()
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t{}\t{}\t{}\t_\t_",
                t.index + 1,
                t.surface,
                t.lemma,
                t.upos,
                feats,
                t.head.map_or(0, |h| h + 1),
                t.deprel
            );
        }
        out.push('\n');
    }
    out
}

/// Groups sentences by article id, keeping first-appearance order of the
/// articles and file order within each. Sentences without an article id
/// are dropped.
pub fn group_by_article(sentences: Vec<ParsedSentence>) -> Vec<(String, Vec<DepSentence>)> {
    let mut order: Vec<(String, Vec<DepSentence>)> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for s in sentences {
        let Some(id) = s.article_id else { continue };
        let i = *slot.entry(id.clone()).or_insert_with(|| {
            order.push((id, Vec::new()));
            order.len() - 1
        });
        order[i].1.push(s.sentence);
    }
    order
}

/// Attaches parsed sentences to the matching articles. Sentences for ids not
/// in `articles` are ignored; returns how many articles received sentences.
pub fn attach(articles: &mut [Article], sentences: Vec<ParsedSentence>) -> usize {
    let mut grouped: HashMap<String, Vec<DepSentence>> =
        group_by_article(sentences).into_iter().collect();
    let mut hits = 0;
    for a in articles.iter_mut() {
        if let Some(s) = grouped.remove(&a.id) {
            a.sentences = s;
            hits += 1;
        }
    }
    hits
}
