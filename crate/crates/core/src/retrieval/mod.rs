//! Retrieval baselines and recall scoring over BEIR-style datasets.

mod bm25;
mod dense;
mod phrase;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

pub use bm25::{tokenize, Bm25Params, InvertedIndex};
pub use dense::{dense_search, DenseVectorStore, Truncation};
pub use phrase::{phrase_tfidf_search, PhraseIndex};

use crate::error::{Error, Result};
use crate::qrel::QrelMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub doc_id: String,
    pub score: f64,
}

/// Descending score, then ascending doc id.
pub(crate) fn rank_order(a: &Hit, b: &Hit) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.doc_id.cmp(&b.doc_id))
}

/// Keeps the best `top_k` hits in rank order.
pub(crate) fn top_k(mut hits: Vec<Hit>, top_k: usize) -> Vec<Hit> {
    if hits.len() > top_k {
        hits.select_nth_unstable_by(top_k, rank_order);
        hits.truncate(top_k);
    }
    hits.sort_by(rank_order);
    hits
}

/// Ranked lists per query. A list may be shorter than `depth` when fewer
/// documents match.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalRun {
    pub tag: String,
    pub depth: usize,
    pub results: BTreeMap<String, Vec<Hit>>,
}

impl RetrievalRun {
    pub fn new(tag: impl Into<String>, depth: usize) -> Self {
        Self { tag: tag.into(), depth, results: BTreeMap::new() }
    }

    /// `query-id Q0 doc-id rank score tag`, ranks from 1.
    pub fn write_trec<W: Write>(&self, mut w: W) -> Result<()> {
        for (qid, hits) in &self.results {
            for (r, h) in hits.iter().enumerate() {
                writeln!(w, "{qid} Q0 {} {} {} {}", h.doc_id, r + 1, h.score, self.tag)?;
            }
        }
        Ok(())
    }

    /// Reads a TREC run. Lists are re-sorted by rank; `depth` becomes the
    /// longest list.
    pub fn read_trec<R: BufRead>(reader: R) -> Result<Self> {
        let mut ranked: BTreeMap<String, Vec<(usize, Hit)>> = BTreeMap::new();
        let mut tag = String::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(Error::parse(lineno + 1, format!("expected 6 fields, got {}", f.len())));
            }
            let rank: usize = f[3].parse().map_err(|_| Error::parse(lineno + 1, format!("bad rank '{}'", f[3])))?;
            let score: f64 = f[4].parse().map_err(|_| Error::parse(lineno + 1, format!("bad score '{}'", f[4])))?;
            tag = f[5].to_string();
            ranked.entry(f[0].to_string()).or_default().push((rank, Hit { doc_id: f[2].to_string(), score }));
        }
        let mut run = RetrievalRun::new(tag, 0);
        for (qid, mut hits) in ranked {
            hits.sort_by_key(|(r, _)| *r);
            let hits: Vec<Hit> = hits.into_iter().map(|(_, h)| h).collect();
            let mut seen = HashSet::new();
            if let Some(h) = hits.iter().find(|h| !seen.insert(h.doc_id.as_str())) {
                return Err(Error::InvalidArgument(format!("query {qid} lists {} twice", h.doc_id)));
            }
            run.depth = run.depth.max(hits.len());
            run.results.insert(qid, hits);
        }
        Ok(run)
    }
}

/// Mean over judged queries of `|top-k ∩ relevant| / |relevant|`. Queries
/// with no relevant document are skipped.
pub fn recall_at_k(run: &RetrievalRun, qrels: &QrelMatrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if run.depth < k {
        return Err(Error::InvalidArgument(format!("run depth {} is below k = {k}", run.depth)));
    }
    let mut total = 0.0;
    let mut judged = 0usize;
    for i in 0..qrels.num_queries() {
        let relevant: HashSet<&str> = qrels.relevant(i).into_iter().map(|j| qrels.doc_ids()[j].as_str()).collect();
        if relevant.is_empty() {
            continue;
        }
        let qid = &qrels.query_ids()[i];
        let hits = run.results.get(qid).ok_or_else(|| Error::MissingQuery(qid.clone()))?;
        let found = hits.iter().take(k).filter(|h| relevant.contains(h.doc_id.as_str())).count();
        total += found as f64 / relevant.len() as f64;
        judged += 1;
    }
    Ok(if judged == 0 { 0.0 } else { total / judged as f64 })
}
