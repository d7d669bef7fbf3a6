//! BEIR-style dataset directories: `corpus.jsonl`, `queries.jsonl` and
//! `qrels/{split}.tsv`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qrel::QrelMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeirDocument {
    #[serde(rename = "_id")]
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeirQuery {
    #[serde(rename = "_id")]
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeirDataset {
    pub corpus: Vec<BeirDocument>,
    pub queries: Vec<BeirQuery>,
    /// Columns follow `corpus`.
    pub qrels: QrelMatrix,
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::parse(lineno + 1, format!("{}: {e}", path.display())))?);
    }
    Ok(out)
}

impl BeirDataset {
    /// Writes the corpus, queries and `qrels/{split}.tsv` under `dir`.
    pub fn write_dir(&self, dir: &Path, split: &str) -> Result<()> {
        fs::create_dir_all(dir.join("qrels"))?;
        write_jsonl(&dir.join("corpus.jsonl"), &self.corpus)?;
        write_jsonl(&dir.join("queries.jsonl"), &self.queries)?;
        let mut w = BufWriter::new(File::create(dir.join("qrels").join(format!("{split}.tsv")))?);
        self.qrels.write_tsv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Reads a directory written by [`BeirDataset::write_dir`]. Qrel rows
    /// follow `queries`; queries without judgments get empty rows.
    pub fn read_dir(dir: &Path, split: &str) -> Result<Self> {
        let corpus: Vec<BeirDocument> = read_jsonl(&dir.join("corpus.jsonl"))?;
        let queries: Vec<BeirQuery> = read_jsonl(&dir.join("queries.jsonl"))?;
        let doc_ids: Vec<String> = corpus.iter().map(|d| d.id.clone()).collect();
        let judged = QrelMatrix::read_tsv(
            BufReader::new(File::open(dir.join("qrels").join(format!("{split}.tsv")))?),
            Some(&doc_ids),
        )?;
        let query_ids: Vec<String> = queries.iter().map(|q| q.id.clone()).collect();
        let mut sets = vec![Vec::new(); queries.len()];
        let index: std::collections::HashMap<&str, usize> =
            query_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        for (r, qid) in judged.query_ids().iter().enumerate() {
            let &i = index.get(qid.as_str()).ok_or_else(|| Error::MissingQuery(qid.clone()))?;
            sets[i] = judged.relevant(r);
        }
        let qrels = QrelMatrix::from_relevant_sets(doc_ids.len(), &sets)?.with_ids(query_ids, doc_ids)?;
        Ok(Self { corpus, queries, qrels })
    }
}
