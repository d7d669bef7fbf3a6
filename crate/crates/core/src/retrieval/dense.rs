//! Exhaustive dot-product search over stored vectors, with prefix
//! truncation of the embedding dimension.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{top_k, Hit, RetrievalRun};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Full,
    To(usize),
}

#[derive(Serialize, Deserialize)]
struct VectorLine {
    id: String,
    vector: Vec<f64>,
}

/// Vectors of one uniform dimension, keyed by id, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVectorStore {
    ids: Vec<String>,
    dim: usize,
    data: Vec<f64>,
}

impl DenseVectorStore {
    pub fn new(entries: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let dim = entries.first().map_or(0, |(_, v)| v.len());
        let mut ids = Vec::with_capacity(entries.len());
        let mut data = Vec::with_capacity(entries.len() * dim);
        for (id, v) in entries {
            if v.len() != dim {
                return Err(Error::shape(format!("vector {id} has dimension {}, expected {dim}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("vector {id} has non-finite entries")));
            }
            ids.push(id);
            data.extend(v);
        }
        Ok(Self { ids, dim, data })
    }

    /// One vector per column of `m` (d×len).
    pub fn from_columns(ids: &[String], m: &Array2<f64>) -> Result<Self> {
        if ids.len() != m.ncols() {
            return Err(Error::shape(format!("{} ids for {} vectors", ids.len(), m.ncols())));
        }
        Self::new(ids.iter().zip(m.columns()).map(|(id, c)| (id.clone(), c.to_vec())).collect())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Each vector cut to its first coordinates and rescaled to unit length.
    pub fn truncated(&self, t: Truncation) -> Result<Self> {
        let keep = match t {
            Truncation::Full => self.dim,
            Truncation::To(k) if k == 0 || k > self.dim => {
                return Err(Error::InvalidArgument(format!("cannot truncate dimension {} to {k}", self.dim)))
            }
            Truncation::To(k) => k,
        };
        let mut data = Vec::with_capacity(self.len() * keep);
        for (i, id) in self.ids.iter().enumerate() {
            let v = &self.vector(i)[..keep];
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroVector(id.clone()));
            }
            data.extend(v.iter().map(|x| x / norm));
        }
        Ok(Self { ids: self.ids.clone(), dim: keep, data })
    }

    /// JSON lines of `{"id": ..., "vector": [...]}`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, id) in self.ids.iter().enumerate() {
            serde_json::to_writer(&mut w, &VectorLine { id: id.clone(), vector: self.vector(i).to_vec() })?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: VectorLine = serde_json::from_str(&line).map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
            entries.push((v.id, v.vector));
        }
        Self::new(entries)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_jsonl(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_jsonl(BufReader::new(File::open(path)?))
    }
}

/// Top-`top` documents by dot product for every query, after truncating
/// and renormalizing both stores.
pub fn dense_search(
    docs: &DenseVectorStore,
    queries: &DenseVectorStore,
    truncate: Truncation,
    top: usize,
    tag: &str,
) -> Result<RetrievalRun> {
    if docs.dim() != queries.dim() {
        return Err(Error::shape(format!("doc dimension {} != query dimension {}", docs.dim(), queries.dim())));
    }
    let docs = docs.truncated(truncate)?;
    let queries = queries.truncated(truncate)?;
    let lists: Vec<(String, Vec<Hit>)> = (0..queries.len())
        .into_par_iter()
        .map(|i| {
            let q = queries.vector(i);
            let hits = (0..docs.len())
                .map(|j| Hit {
                    doc_id: docs.ids[j].clone(),
                    score: q.iter().zip(docs.vector(j)).map(|(a, b)| a * b).sum(),
                })
                .collect();
            (queries.ids[i].clone(), top_k(hits, top))
        })
        .collect();
    let mut run = RetrievalRun::new(tag, top.min(docs.len()));
    run.results.extend(lists);
    Ok(run)
}
