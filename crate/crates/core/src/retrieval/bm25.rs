//! Okapi BM25 over an in-memory inverted index.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::{top_k, Hit, RetrievalRun};
use crate::error::{Error, Result};
use crate::limit::BeirQuery;

/// Lowercased maximal alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.5, b: 0.75 }
    }
}

#[derive(Debug, Clone)]
pub struct InvertedIndex {
    doc_ids: Vec<String>,
    /// term -> (doc ordinal, term frequency), ordinals ascending.
    postings: HashMap<String, Vec<(u32, u32)>>,
    doc_lengths: Vec<u32>,
    avg_doc_length: f64,
}

impl InvertedIndex {
    /// Indexes `(doc_id, text)` pairs. Title and body should be joined by the
    /// caller if both are to be searched.
    pub fn build<'a>(docs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut doc_ids = Vec::new();
        let mut postings: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
        let mut doc_lengths = Vec::new();
        for (ord, (id, text)) in docs.into_iter().enumerate() {
            let tokens = tokenize(text);
            let mut tf: HashMap<String, u32> = HashMap::new();
            for t in &tokens {
                *tf.entry(t.clone()).or_insert(0) += 1;
            }
            for (t, c) in tf {
                postings.entry(t).or_default().push((ord as u32, c));
            }
            doc_ids.push(id.to_string());
            doc_lengths.push(tokens.len() as u32);
        }
        let total: u64 = doc_lengths.iter().map(|&l| l as u64).sum();
        let avg_doc_length = if doc_lengths.is_empty() { 0.0 } else { total as f64 / doc_lengths.len() as f64 };
        Self { doc_ids, postings, doc_lengths, avg_doc_length }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn doc_length(&self, ord: usize) -> usize {
        self.doc_lengths[ord] as usize
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    /// `ln(1 + (N − df + 0.5) / (df + 0.5))`.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.doc_count() as f64;
        let df = self.doc_freq(term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Documents matching at least one query term, best first.
    pub fn search(&self, query: &str, top: usize, p: Bm25Params) -> Result<Vec<Hit>> {
        let mut seen = HashSet::new();
        let terms: Vec<String> = tokenize(query).into_iter().filter(|t| seen.insert(t.clone())).collect();
        if terms.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for t in &terms {
            let Some(list) = self.postings.get(t) else { continue };
            let idf = self.idf(t);
            for &(ord, tf) in list {
                let tf = tf as f64;
                let len = self.doc_lengths[ord as usize] as f64;
                let norm = p.k1 * (1.0 - p.b + p.b * len / self.avg_doc_length);
                *acc.entry(ord).or_insert(0.0) += idf * tf * (p.k1 + 1.0) / (tf + norm);
            }
        }
        let hits = acc.into_iter().map(|(ord, score)| Hit { doc_id: self.doc_ids[ord as usize].clone(), score }).collect();
        Ok(top_k(hits, top))
    }

    /// Searches every query in parallel.
    pub fn search_all(&self, queries: &[BeirQuery], top: usize, p: Bm25Params, tag: &str) -> Result<RetrievalRun> {
        let lists: Vec<(String, Vec<Hit>)> = queries
            .par_iter()
            .map(|q| Ok((q.id.clone(), self.search(&q.text, top, p)?)))
            .collect::<Result<_>>()?;
        let mut run = RetrievalRun::new(tag, top.min(self.doc_count()));
        run.results.extend(lists);
        Ok(run)
    }
}
