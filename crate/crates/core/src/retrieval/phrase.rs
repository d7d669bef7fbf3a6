//! TF-IDF where every attribute phrase of a profile is a single token.

use std::collections::HashMap;

use super::{top_k, Hit, RetrievalRun};
use crate::error::{Error, Result};
use crate::limit::text::{parse_doc, parse_query};
use crate::limit::{BeirDocument, BeirQuery};

fn phrase_key(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

#[derive(Debug, Clone)]
pub struct PhraseIndex {
    doc_ids: Vec<String>,
    postings: HashMap<String, Vec<(usize, u32)>>,
}

impl PhraseIndex {
    /// Parses every document into its phrase list. All documents of a
    /// generated corpus list the same number of phrases, so a document
    /// whose count differs from the first one is reported as corrupt.
    pub fn build(corpus: &[BeirDocument]) -> Result<Self> {
        let mut postings: HashMap<String, Vec<(usize, u32)>> = HashMap::new();
        let mut expected = None;
        for (ord, doc) in corpus.iter().enumerate() {
            let phrases = parse_doc(&doc.text).map_err(|e| Error::parse(ord + 1, format!("document {}: {e}", doc.id)))?;
            match expected {
                None => expected = Some(phrases.len()),
                Some(n) if n != phrases.len() => {
                    return Err(Error::parse(
                        ord + 1,
                        format!("document {} lists {} attributes, expected {n}", doc.id, phrases.len()),
                    ))
                }
                Some(_) => {}
            }
            let mut tf: HashMap<String, u32> = HashMap::new();
            for p in phrases {
                *tf.entry(phrase_key(&p)).or_insert(0) += 1;
            }
            for (p, c) in tf {
                postings.entry(p).or_default().push((ord, c));
            }
        }
        Ok(Self { doc_ids: corpus.iter().map(|d| d.id.clone()).collect(), postings })
    }

    /// Scores `tf · ln(1 + N/df)` for the query's attribute phrase.
    pub fn search(&self, query_text: &str, top: usize) -> Result<Vec<Hit>> {
        let attr = parse_query(query_text).ok_or_else(|| Error::parse(0, format!("not an attribute query: '{query_text}'")))?;
        let Some(list) = self.postings.get(&phrase_key(attr)) else { return Ok(Vec::new()) };
        let idf = (1.0 + self.doc_ids.len() as f64 / list.len() as f64).ln();
        let hits = list.iter().map(|&(ord, tf)| Hit { doc_id: self.doc_ids[ord].clone(), score: tf as f64 * idf }).collect();
        Ok(top_k(hits, top))
    }

    pub fn search_all(&self, queries: &[BeirQuery], top: usize, tag: &str) -> Result<RetrievalRun> {
        let mut run = RetrievalRun::new(tag, top.min(self.doc_ids.len()));
        for q in queries {
            run.results.insert(q.id.clone(), self.search(&q.text, top)?);
        }
        Ok(run)
    }
}

/// One-shot search of a single query of a dataset.
pub fn phrase_tfidf_search(corpus: &[BeirDocument], query: &BeirQuery, top: usize) -> Result<Vec<Hit>> {
    PhraseIndex::build(corpus)?.search(&query.text, top)
}
