//! LIMIT-style synthetic retrieval datasets: a qrel pattern instantiated
//! with "who likes X" queries over short person profiles.
//!
//! Each query owns one attribute. That attribute is written into exactly
//! the query's relevant documents; every document is then padded with
//! attributes no query uses until all documents list the same number.

mod beir;
pub mod text;
mod vocab;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use beir::{BeirDataset, BeirDocument, BeirQuery};
pub use vocab::{AttributeVocabulary, NameLists, BUILTIN_VOCAB_SIZE};

use crate::error::{Error, Result};
use crate::qrel::QrelMatrix;
use crate::sweep::{binomial, dense_qrels, min_docs_for_queries};

/// Documents are profiles, so they may list fewer than this many attributes.
pub const MAX_ATTRS_PER_DOC: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// As many pairs as possible over the fewest documents.
    Dense,
    /// Pairs sampled uniformly from the whole corpus.
    Random,
    /// Query `i` is relevant to documents `i` and `i + 1`, wrapping to
    /// document 0 when the corpus has no document `i + 1`.
    Cycle,
    /// Query `i` is relevant to documents `2i` and `2i + 1`.
    Disjoint,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [Pattern::Dense, Pattern::Random, Pattern::Cycle, Pattern::Disjoint];

    /// Documents the pattern needs for `n_queries` queries of size `k`.
    pub fn docs_needed(self, n_queries: usize, k: usize) -> usize {
        match self {
            Pattern::Dense => min_docs_for_queries(n_queries as u64, k as u64) as usize,
            Pattern::Random => (min_docs_for_queries(n_queries as u64, k as u64) as usize).max(k),
            Pattern::Cycle => n_queries.max(2),
            Pattern::Disjoint => 2 * n_queries,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Dense => "dense",
            Pattern::Random => "random",
            Pattern::Cycle => "cycle",
            Pattern::Disjoint => "disjoint",
        })
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Pattern::Dense),
            "random" => Ok(Pattern::Random),
            "cycle" => Ok(Pattern::Cycle),
            "disjoint" => Ok(Pattern::Disjoint),
            other => Err(Error::InvalidArgument(format!("unknown pattern '{other}'"))),
        }
    }
}

/// Qrels over `n_docs` columns for the given pattern.
pub fn pattern_qrels(pattern: Pattern, n_docs: usize, n_queries: usize, k: usize, seed: u64) -> Result<QrelMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if matches!(pattern, Pattern::Cycle | Pattern::Disjoint) && k != 2 {
        return Err(Error::InvalidArgument(format!("the {pattern} pattern is defined for k = 2")));
    }
    let needed = pattern.docs_needed(n_queries, k);
    if n_docs < needed {
        return Err(Error::Capacity(format!(
            "the {pattern} pattern needs {needed} documents for {n_queries} queries, got {n_docs}"
        )));
    }
    let rows: Vec<Vec<usize>> = match pattern {
        Pattern::Dense => {
            if n_queries == 0 {
                Vec::new()
            } else {
                let pool = dense_qrels(needed, k, Some(n_queries), seed)?;
                (0..n_queries).map(|i| pool.relevant(i)).collect()
            }
        }
        Pattern::Random => {
            let total = binomial(n_docs as u64, k as u64)
                .and_then(|t| usize::try_from(t).ok())
                .ok_or_else(|| Error::Capacity(format!("C({n_docs}, {k}) too large to sample from")))?;
            if n_queries > total {
                return Err(Error::Capacity(format!("{n_queries} queries exceed C({n_docs}, {k})")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if k == 2 {
                // rank r <-> pair (i, j), i < j, in lexicographic order
                let mut ranks = index::sample(&mut rng, total, n_queries).into_vec();
                ranks.sort_unstable();
                ranks.into_iter().map(|r| unrank_pair(n_docs, r)).collect()
            } else {
                let mut seen = HashSet::new();
                let mut rows = Vec::with_capacity(n_queries);
                while rows.len() < n_queries {
                    let mut set = index::sample(&mut rng, n_docs, k).into_vec();
                    set.sort_unstable();
                    if seen.insert(set.clone()) {
                        rows.push(set);
                    }
                }
                rows.sort();
                rows
            }
        }
        Pattern::Cycle => (0..n_queries)
            .map(|i| {
                let next = (i + 1) % n_docs;
                vec![i.min(next), i.max(next)]
            })
            .collect(),
        Pattern::Disjoint => (0..n_queries).map(|i| vec![2 * i, 2 * i + 1]).collect(),
    };
    QrelMatrix::from_relevant_sets(n_docs, &rows)
}

fn unrank_pair(n: usize, mut rank: usize) -> Vec<usize> {
    let mut i = 0;
    loop {
        let block = n - i - 1;
        if rank < block {
            return vec![i, i + 1 + rank];
        }
        rank -= block;
        i += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// Person name.
    pub title: String,
    pub text: String,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub text: String,
    pub attribute: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitParams {
    pub n_docs: usize,
    pub n_queries: usize,
    pub k: usize,
    pub attrs_per_doc: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitDataset {
    pub corpus: Vec<Document>,
    pub queries: Vec<Query>,
    /// Rows follow `queries`, columns follow `corpus`.
    pub qrels: QrelMatrix,
    pub pattern: Pattern,
    pub seed: u64,
    pub params: LimitParams,
}

fn padded_ids(prefix: &str, count: usize) -> Vec<String> {
    let width = count.saturating_sub(1).to_string().len();
    (0..count).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// Turns a qrel pattern into text. Query `i` gets a distinct random
/// attribute; document columns are shuffled into corpus order so that
/// relevance is unrelated to document ids.
pub fn instantiate(
    qrels: &QrelMatrix,
    vocab: &AttributeVocabulary,
    names: &NameLists,
    attrs_per_doc: usize,
    pattern: Pattern,
    seed: u64,
) -> Result<LimitDataset> {
    let (n_queries, n_docs) = qrels.shape();
    if attrs_per_doc == 0 || attrs_per_doc >= MAX_ATTRS_PER_DOC {
        return Err(Error::Capacity(format!(
            "attrs_per_doc must be in 1..{MAX_ATTRS_PER_DOC}, got {attrs_per_doc}"
        )));
    }
    if let Some(i) = (0..n_queries).find(|&i| qrels.relevant_count(i) == 0) {
        return Err(Error::DegenerateQuery(i));
    }
    let col_counts = qrels.column_counts();
    let max_count = col_counts.iter().copied().max().unwrap_or(0);
    if max_count > attrs_per_doc {
        return Err(Error::Capacity(format!(
            "a document is relevant to {max_count} queries but attrs_per_doc is {attrs_per_doc}"
        )));
    }
    let padding_needed = col_counts.iter().any(|&c| c < attrs_per_doc);
    let pool_needed = if padding_needed { attrs_per_doc } else { 0 };
    if vocab.len() < n_queries + pool_needed {
        return Err(Error::Vocab(format!(
            "{} attributes cannot cover {n_queries} queries plus {pool_needed} padding attributes",
            vocab.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let query_attr_idx = index::sample(&mut rng, vocab.len(), n_queries).into_vec();
    let used: HashSet<usize> = query_attr_idx.iter().copied().collect();
    let pool: Vec<usize> = (0..vocab.len()).filter(|i| !used.contains(i)).collect();

    let query_ids = padded_ids("q", n_queries);
    let queries: Vec<Query> = query_attr_idx
        .iter()
        .zip(&query_ids)
        .map(|(&a, id)| {
            let attribute = vocab.get(a).to_string();
            Query { id: id.clone(), text: text::query_text(&attribute), attribute }
        })
        .collect();

    // column j of the pattern lands at corpus position position_of[j]
    let mut position_of: Vec<usize> = (0..n_docs).collect();
    position_of.shuffle(&mut rng);
    let mut column_at = vec![0; n_docs];
    for (col, &pos) in position_of.iter().enumerate() {
        column_at[pos] = col;
    }

    let mut relevant_queries: Vec<Vec<usize>> = vec![Vec::new(); n_docs];
    for i in 0..n_queries {
        for j in qrels.relevant(i) {
            relevant_queries[j].push(i);
        }
    }

    let doc_ids = padded_ids("d", n_docs);
    let mut name_counts: HashMap<(usize, usize), usize> = HashMap::new();
    let mut corpus = Vec::with_capacity(n_docs);
    for (pos, id) in doc_ids.iter().enumerate() {
        let col = column_at[pos];
        let mut attributes: Vec<String> =
            relevant_queries[col].iter().map(|&i| queries[i].attribute.clone()).collect();
        let need = attrs_per_doc - attributes.len();
        attributes.extend(index::sample(&mut rng, pool.len(), need).into_iter().map(|p| vocab.get(pool[p]).to_string()));
        attributes.shuffle(&mut rng);

        let first = rng.random_range(0..names.first.len());
        let last = rng.random_range(0..names.last.len());
        let seen = name_counts.entry((first, last)).or_insert(0);
        *seen += 1;
        let title = match *seen {
            1 => format!("{} {}", names.first[first], names.last[last]),
            c => format!("{} {} {c}", names.first[first], names.last[last]),
        };
        let text = text::doc_text(&title, &attributes);
        corpus.push(Document { id: id.clone(), title, text, attributes });
    }

    let qrels = qrels.select_columns(&column_at)?.with_ids(query_ids, doc_ids)?;
    let k = max_relevant(&qrels_row_sizes(&qrels));
    Ok(LimitDataset {
        corpus,
        queries,
        qrels,
        pattern,
        seed,
        params: LimitParams { n_docs, n_queries, k, attrs_per_doc },
    })
}

fn qrels_row_sizes(a: &QrelMatrix) -> Vec<usize> {
    (0..a.num_queries()).map(|i| a.relevant_count(i)).collect()
}

fn max_relevant(sizes: &[usize]) -> usize {
    sizes.iter().copied().max().unwrap_or(0)
}

/// Knobs for [`generate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub pattern: Pattern,
    pub n_docs: usize,
    pub n_queries: usize,
    pub k: usize,
    pub attrs_per_doc: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self { pattern: Pattern::Dense, n_docs: 50_000, n_queries: 1000, k: 2, attrs_per_doc: 45, seed: 0 }
    }
}

/// Pattern qrels followed by instantiation, both driven by `cfg.seed`.
pub fn generate(cfg: &GenConfig, vocab: &AttributeVocabulary, names: &NameLists) -> Result<LimitDataset> {
    let qrels = pattern_qrels(cfg.pattern, cfg.n_docs, cfg.n_queries, cfg.k, cfg.seed)?;
    let mut ds = instantiate(&qrels, vocab, names, cfg.attrs_per_doc, cfg.pattern, cfg.seed)?;
    ds.params.k = cfg.k;
    Ok(ds)
}

impl LimitDataset {
    /// Attributes owned by queries.
    pub fn query_attributes(&self) -> HashSet<String> {
        self.queries.iter().map(|q| q.attribute.clone()).collect()
    }

    pub fn to_beir(&self) -> BeirDataset {
        BeirDataset {
            corpus: self
                .corpus
                .iter()
                .map(|d| BeirDocument { id: d.id.clone(), title: d.title.clone(), text: d.text.clone() })
                .collect(),
            queries: self.queries.iter().map(|q| BeirQuery { id: q.id.clone(), text: q.text.clone() }).collect(),
            qrels: self.qrels.clone(),
        }
    }
}

/// Keeps only documents relevant to at least one query.
pub fn small_split(ds: &LimitDataset) -> Result<LimitDataset> {
    let keep: Vec<usize> =
        ds.qrels.column_counts().iter().enumerate().filter(|(_, &c)| c > 0).map(|(j, _)| j).collect();
    let qrels = ds.qrels.select_columns(&keep)?;
    let corpus = keep.iter().map(|&j| ds.corpus[j].clone()).collect();
    Ok(LimitDataset {
        corpus,
        queries: ds.queries.clone(),
        qrels,
        pattern: ds.pattern,
        seed: ds.seed,
        params: LimitParams { n_docs: keep.len(), ..ds.params.clone() },
    })
}

/// Shape of a training split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainParams {
    /// Corpus size; raised to the documents the dense blocks need.
    pub n_docs: usize,
    pub k: usize,
    pub attrs_per_doc: usize,
    /// Queries per dense block; each block gets its own documents.
    pub block_queries: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self { n_docs: 0, k: 2, attrs_per_doc: 45, block_queries: 1000 }
    }
}

/// A fresh dense-pattern dataset of `size` queries that only uses
/// attributes outside `used_attrs`. Queries are split into dense blocks of
/// at most `block_queries`, each over its own documents, so that no document
/// is relevant to more than `attrs_per_doc` queries.
pub fn train_split(
    vocab: &AttributeVocabulary,
    used_attrs: &HashSet<String>,
    size: usize,
    seed: u64,
    params: &TrainParams,
    names: &NameLists,
) -> Result<LimitDataset> {
    let vocab = vocab.without(used_attrs);
    if params.block_queries == 0 {
        return Err(Error::InvalidArgument("block_queries must be >= 1".into()));
    }
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(size);
    let mut offset = 0;
    let mut remaining = size;
    let mut block = 0u64;
    while remaining > 0 {
        let take = remaining.min(params.block_queries);
        let docs = min_docs_for_queries(take as u64, params.k as u64) as usize;
        let q = dense_qrels(docs, params.k, Some(take), seed.wrapping_add(block))?;
        sets.extend((0..take).map(|i| q.relevant(i).into_iter().map(|j| j + offset).collect::<Vec<_>>()));
        offset += docs;
        remaining -= take;
        block += 1;
    }
    let n_docs = params.n_docs.max(offset);
    let qrels = QrelMatrix::from_relevant_sets(n_docs, &sets)?;
    let mut ds = instantiate(&qrels, &vocab, names, params.attrs_per_doc, Pattern::Dense, seed)?;
    ds.params.k = params.k;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> AttributeVocabulary {
        AttributeVocabulary::builtin(400)
    }

    #[test]
    fn disjoint_and_cycle_rows() {
        let d = pattern_qrels(Pattern::Disjoint, 6, 3, 2, 0).unwrap();
        assert_eq!((0..3).map(|i| d.relevant(i)).collect::<Vec<_>>(), [vec![0, 1], vec![2, 3], vec![4, 5]]);
        let c = pattern_qrels(Pattern::Cycle, 4, 3, 2, 0).unwrap();
        assert_eq!((0..3).map(|i| c.relevant(i)).collect::<Vec<_>>(), [vec![0, 1], vec![1, 2], vec![2, 3]]);
        let w = pattern_qrels(Pattern::Cycle, 3, 3, 2, 0).unwrap();
        assert_eq!(w.relevant(2), vec![0, 2]);
    }

    #[test]
    fn patterns_reject_insufficient_docs() {
        assert!(matches!(pattern_qrels(Pattern::Disjoint, 5, 3, 2, 0), Err(Error::Capacity(_))));
        assert!(matches!(pattern_qrels(Pattern::Cycle, 2, 3, 2, 0), Err(Error::Capacity(_))));
        assert!(matches!(pattern_qrels(Pattern::Dense, 45, 1000, 2, 0), Err(Error::Capacity(_))));
        assert!(pattern_qrels(Pattern::Cycle, 10, 3, 3, 0).is_err());
    }

    #[test]
    fn dense_pattern_uses_the_smallest_pool() {
        let q = pattern_qrels(Pattern::Dense, 50_000, 1000, 2, 3).unwrap();
        assert_eq!(q.num_queries(), 1000);
        let counts = q.column_counts();
        assert!(counts[46..].iter().all(|&c| c == 0));
        assert!(counts[..46].iter().all(|&c| c > 0));
        let distinct: HashSet<Vec<usize>> = (0..1000).map(|i| q.relevant(i)).collect();
        assert_eq!(distinct.len(), 1000);
    }

    #[test]
    fn random_pattern_rows_are_distinct_pairs() {
        let q = pattern_qrels(Pattern::Random, 50_000, 500, 2, 1).unwrap();
        let distinct: HashSet<Vec<usize>> = (0..500).map(|i| q.relevant(i)).collect();
        assert_eq!(distinct.len(), 500);
        assert!((0..500).all(|i| q.relevant_count(i) == 2));
        let q3 = pattern_qrels(Pattern::Random, 30, 20, 3, 1).unwrap();
        assert!((0..20).all(|i| q3.relevant_count(i) == 3));
    }

    #[test]
    fn unrank_pair_enumerates_lexicographically() {
        let pairs: Vec<Vec<usize>> = (0..6).map(|r| unrank_pair(4, r)).collect();
        assert_eq!(pairs, [vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn smallest_instance() {
        let q = QrelMatrix::from_relevant_sets(3, &[vec![0, 1]]).unwrap();
        let ds = instantiate(&q, &vocab(), &NameLists::builtin(), 2, Pattern::Dense, 9).unwrap();
        let attr = &ds.queries[0].attribute;
        let holders: Vec<usize> =
            ds.corpus.iter().enumerate().filter(|(_, d)| d.attributes.contains(attr)).map(|(j, _)| j).collect();
        assert_eq!(holders, ds.qrels.relevant(0));
        assert!(ds.corpus.iter().all(|d| d.attributes.len() == 2));
        assert_eq!(ds.queries[0].text, format!("Who likes {attr}?"));
    }

    #[test]
    fn capacity_and_vocab_errors() {
        let q = QrelMatrix::from_relevant_sets(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert!(matches!(
            instantiate(&q, &vocab(), &NameLists::builtin(), 1, Pattern::Cycle, 0),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            instantiate(&q, &vocab(), &NameLists::builtin(), 50, Pattern::Cycle, 0),
            Err(Error::Capacity(_))
        ));
        let tiny = AttributeVocabulary::new(vec!["a b".into(), "c d".into(), "e f".into()]).unwrap();
        assert!(matches!(
            instantiate(&q, &tiny, &NameLists::builtin(), 3, Pattern::Cycle, 0),
            Err(Error::Vocab(_))
        ));
    }

    #[test]
    fn duplicate_names_get_suffixes() {
        let names = NameLists::new(vec!["Ann".into()], vec!["Lee".into()]).unwrap();
        let q = QrelMatrix::from_relevant_sets(4, &[vec![0, 1]]).unwrap();
        let ds = instantiate(&q, &vocab(), &names, 3, Pattern::Dense, 0).unwrap();
        let titles: HashSet<&str> = ds.corpus.iter().map(|d| d.title.as_str()).collect();
        assert_eq!(titles.len(), 4);
        assert!(titles.contains("Ann Lee"));
        assert!(titles.contains("Ann Lee 4"));
    }

    #[test]
    fn small_split_keeps_judged_documents() {
        let cfg = GenConfig { pattern: Pattern::Disjoint, n_docs: 40, n_queries: 10, attrs_per_doc: 5, ..Default::default() };
        let ds = generate(&cfg, &vocab(), &NameLists::builtin()).unwrap();
        let small = small_split(&ds).unwrap();
        assert_eq!(small.corpus.len(), 20);
        assert_eq!(small.qrels.shape(), (10, 20));
        assert_eq!(small.queries, ds.queries);

        let all = GenConfig { pattern: Pattern::Cycle, n_docs: 11, n_queries: 10, attrs_per_doc: 5, ..Default::default() };
        let ds = generate(&all, &vocab(), &NameLists::builtin()).unwrap();
        assert_eq!(small_split(&ds).unwrap(), ds);
    }

    #[test]
    fn train_split_avoids_test_attributes() {
        let v = AttributeVocabulary::builtin(6000);
        let cfg = GenConfig { n_docs: 100, n_queries: 50, attrs_per_doc: 12, ..Default::default() };
        let test = generate(&cfg, &v, &NameLists::builtin()).unwrap();
        let used = test.query_attributes();
        let params = TrainParams { n_docs: 0, attrs_per_doc: 45, ..Default::default() };
        let train = train_split(&v, &used, 2000, 5, &params, &NameLists::builtin()).unwrap();
        assert_eq!(train.queries.len(), 2000);
        let train_attrs: HashSet<String> =
            train.corpus.iter().flat_map(|d| d.attributes.iter().cloned()).collect();
        assert!(train_attrs.is_disjoint(&used));
        assert!(train.qrels.column_counts().iter().all(|&c| c <= 45));

        let empty = train_split(&v, &used, 0, 5, &params, &NameLists::builtin()).unwrap();
        assert!(empty.queries.is_empty());
    }

    #[test]
    fn pattern_names_round_trip() {
        for p in Pattern::ALL {
            assert_eq!(p.to_string().parse::<Pattern>().unwrap(), p);
        }
        assert!("zigzag".parse::<Pattern>().is_err());
    }
}
