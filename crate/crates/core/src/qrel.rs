//! Qrel and score matrices, plus executable checkers for the row-wise
//! order-preserving (rop), row-wise thresholdable (rt) and globally
//! thresholdable (gt) realizations of a binary relevance matrix.
//!
//! All checks use strict inequalities with zero tolerance: a tie between a
//! relevant and an irrelevant score is a violation. Rows that are entirely
//! relevant or entirely irrelevant are vacuously satisfied by the rop/rt
//! checkers; the gt checker still requires every entry to sit on the correct
//! side of the global threshold.

use std::collections::HashMap;
use std::collections::HashSet;
use std::io::{BufRead, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary relevance matrix `A` (rows are queries, columns documents).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QrelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<bool>,
    query_ids: Vec<String>,
    doc_ids: Vec<String>,
}

fn check_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidArgument(format!("duplicate {what} id '{id}'")));
        }
    }
    Ok(())
}

impl QrelMatrix {
    /// Builds a matrix from row-major entries and explicit ids.
    pub fn new(query_ids: Vec<String>, doc_ids: Vec<String>, entries: Vec<bool>) -> Result<Self> {
        let (rows, cols) = (query_ids.len(), doc_ids.len());
        if entries.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries for a {rows}x{cols} qrel matrix",
                entries.len()
            )));
        }
        check_unique(&query_ids, "query")?;
        check_unique(&doc_ids, "doc")?;
        Ok(Self { rows, cols, entries, query_ids, doc_ids })
    }

    /// Builds a matrix from 0/1 rows, with ids `q0..` and `d0..`.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::shape(format!("row {i} has {} columns, expected {cols}", row.len())));
            }
            for &x in row {
                match x {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    other => {
                        return Err(Error::InvalidArgument(format!("qrel entry {other} is not 0/1")))
                    }
                }
            }
        }
        Self::new(default_ids("q", rows.len()), default_ids("d", cols), entries)
    }

    /// Builds a matrix over `n_docs` columns where row `i` is relevant to
    /// exactly the documents in `sets[i]`.
    pub fn from_relevant_sets(n_docs: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let mut entries = vec![false; sets.len() * n_docs];
        for (i, set) in sets.iter().enumerate() {
            for &j in set {
                if j >= n_docs {
                    return Err(Error::shape(format!("doc index {j} out of range for {n_docs} docs")));
                }
                entries[i * n_docs + j] = true;
            }
        }
        Self::new(default_ids("q", sets.len()), default_ids("d", n_docs), entries)
    }

    pub fn num_queries(&self) -> usize {
        self.rows
    }

    pub fn num_docs(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn query_ids(&self) -> &[String] {
        &self.query_ids
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Column indices of the documents relevant to query `i`.
    pub fn relevant(&self, i: usize) -> Vec<usize> {
        self.row(i).iter().enumerate().filter(|(_, &r)| r).map(|(j, _)| j).collect()
    }

    pub fn relevant_count(&self, i: usize) -> usize {
        self.row(i).iter().filter(|&&r| r).count()
    }

    /// Number of queries each document is relevant to.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for i in 0..self.rows {
            for (c, &r) in counts.iter_mut().zip(self.row(i)) {
                *c += usize::from(r);
            }
        }
        counts
    }

    /// Returns a copy with new ids; lengths must match.
    pub fn with_ids(self, query_ids: Vec<String>, doc_ids: Vec<String>) -> Result<Self> {
        if query_ids.len() != self.rows || doc_ids.len() != self.cols {
            return Err(Error::shape("id list lengths do not match the qrel shape"));
        }
        Self::new(query_ids, doc_ids, self.entries)
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            for &j in cols {
                entries.push(*row.get(j).ok_or_else(|| Error::shape(format!("column {j} out of range")))?);
            }
        }
        let doc_ids = cols.iter().map(|&j| self.doc_ids[j].clone()).collect();
        Self::new(self.query_ids.clone(), doc_ids, entries)
    }

    /// Reads TREC/BEIR qrels: a `query-id<TAB>corpus-id<TAB>score` header
    /// followed by one judged pair per line. Pairs that are absent or scored
    /// 0 are irrelevant. When `doc_universe` is given, the columns are exactly
    /// those ids (in that order); otherwise columns are the judged documents
    /// in order of first appearance.
    pub fn read_tsv<R: BufRead>(reader: R, doc_universe: Option<&[String]>) -> Result<Self> {
        let mut query_ids: Vec<String> = Vec::new();
        let mut query_index: HashMap<String, usize> = HashMap::new();
        let mut doc_ids: Vec<String> = doc_universe.map(<[String]>::to_vec).unwrap_or_default();
        let mut doc_index: HashMap<String, usize> =
            doc_ids.iter().enumerate().map(|(j, id)| (id.clone(), j)).collect();
        let mut pairs: Vec<(usize, usize)> = Vec::new();

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if lineno == 1 && fields.first().is_some_and(|f| *f == "query-id") {
                continue;
            }
            if fields.len() != 3 {
                return Err(Error::parse(lineno, format!("expected 3 tab-separated fields, got {}", fields.len())));
            }
            let score: i64 = fields[2]
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("score '{}' is not an integer", fields[2])))?;
            if score != 0 && score != 1 {
                return Err(Error::parse(lineno, format!("score {score} is not 0/1")));
            }
            let q = *query_index.entry(fields[0].to_string()).or_insert_with(|| {
                query_ids.push(fields[0].to_string());
                query_ids.len() - 1
            });
            let d = match doc_index.get(fields[1]) {
                Some(&d) => d,
                None if doc_universe.is_some() => {
                    return Err(Error::parse(lineno, format!("unknown corpus id '{}'", fields[1])))
                }
                None => {
                    doc_ids.push(fields[1].to_string());
                    doc_index.insert(fields[1].to_string(), doc_ids.len() - 1);
                    doc_ids.len() - 1
                }
            };
            if score == 1 {
                pairs.push((q, d));
            }
        }

        let cols = doc_ids.len();
        let mut entries = vec![false; query_ids.len() * cols];
        for (q, d) in pairs {
            entries[q * cols + d] = true;
        }
        Self::new(query_ids, doc_ids, entries)
    }

    /// Writes the relevant pairs in TREC/BEIR qrels format.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "query-id\tcorpus-id\tscore")?;
        for i in 0..self.rows {
            for j in self.relevant(i) {
                writeln!(w, "{}\t{}\t1", self.query_ids[i], self.doc_ids[j])?;
            }
        }
        Ok(())
    }
}

pub(crate) fn default_ids(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

/// Matrix with entries exactly ±1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix(Array2<i8>);

impl SignMatrix {
    pub fn new(entries: Array2<i8>) -> Result<Self> {
        if entries.iter().any(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidArgument("sign matrix entries must be +1 or -1".into()));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &Array2<i8> {
        &self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.dim()
    }

    /// Inverse of [`sign_matrix`]: `(M + 1) / 2`.
    pub fn to_qrels(&self) -> QrelMatrix {
        let (m, n) = self.shape();
        let entries = self.0.iter().map(|&x| x == 1).collect();
        QrelMatrix::new(default_ids("q", m), default_ids("d", n), entries).expect("default ids are unique")
    }
}

/// Real-valued score matrix `B`, typically `UᵀV`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix(Array2<f64>);

impl ScoreMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("score matrix entries must be finite".into()));
        }
        Ok(Self(entries))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("ragged score rows"));
        }
        let flat = rows.iter().flatten().copied().collect();
        Self::new(Array2::from_shape_vec((rows.len(), cols), flat).expect("checked shape"))
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[[i, j]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Rop,
    Rt,
    Gt,
}

/// Witness that a score matrix realizes a qrel matrix under one of the
/// three semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub kind: CertificateKind,
    pub row_thresholds: Option<Vec<f64>>,
    pub global_threshold: Option<f64>,
    /// Upper bound on the rank of the witnessing score matrix: the embedding
    /// dimension when known, `min(m, n)` otherwise.
    pub realized_rank_upper_bound: usize,
}

impl RankCertificate {
    /// Tightens the rank bound to the dimension of the embedding that produced `B`.
    pub fn with_dimension(mut self, d: usize) -> Self {
        self.realized_rank_upper_bound = self.realized_rank_upper_bound.min(d);
        self
    }

    /// Re-checks the certificate against `(A, B)`.
    pub fn verify(&self, a: &QrelMatrix, b: &ScoreMatrix) -> Result<bool> {
        ensure_same_shape(a, b)?;
        Ok(match self.kind {
            CertificateKind::Rop => check_rop(a, b)?,
            CertificateKind::Rt => match &self.row_thresholds {
                Some(tau) if tau.len() == a.num_queries() => rows_separated_by(a, b, tau),
                _ => false,
            },
            CertificateKind::Gt => match self.global_threshold {
                Some(tau) => check_gt(a, b, tau)?,
                None => false,
            },
        })
    }
}

fn ensure_same_shape(a: &QrelMatrix, b: &ScoreMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!("qrels are {:?} but scores are {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

/// `2A − 1`.
pub fn sign_matrix(a: &QrelMatrix) -> SignMatrix {
    let entries = Array2::from_shape_fn(a.shape(), |(i, j)| if a.get(i, j) { 1 } else { -1 });
    SignMatrix(entries)
}

/// (max irrelevant score, min relevant score) of row `i`; `None` on either
/// side when the row has no entries of that kind.
fn row_extremes(a: &QrelMatrix, b: &ScoreMatrix, i: usize) -> (Option<f64>, Option<f64>) {
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    for (&rel, &s) in a.row(i).iter().zip(b.0.row(i)) {
        if rel {
            hi = Some(hi.map_or(s, |h: f64| h.min(s)));
        } else {
            lo = Some(lo.map_or(s, |l: f64| l.max(s)));
        }
    }
    (lo, hi)
}

pub(crate) fn row_separated(a: &QrelMatrix, b: &ScoreMatrix, i: usize) -> bool {
    match row_extremes(a, b, i) {
        (Some(lo), Some(hi)) => hi > lo,
        _ => true,
    }
}

fn rows_separated_by(a: &QrelMatrix, b: &ScoreMatrix, tau: &[f64]) -> bool {
    (0..a.num_queries()).all(|i| {
        a.row(i)
            .iter()
            .zip(b.0.row(i))
            .all(|(&rel, &s)| if rel { s > tau[i] } else { s < tau[i] })
    })
}

/// Every relevant score in each row strictly exceeds every irrelevant one.
pub fn check_rop(a: &QrelMatrix, b: &ScoreMatrix) -> Result<bool> {
    ensure_same_shape(a, b)?;
    Ok((0..a.num_queries()).all(|i| row_separated(a, b, i)))
}

/// Builds per-row midpoint thresholds when `B` is row-wise order preserving
/// for `A`; returns `None` otherwise. Vacuous rows get a threshold just past
/// their extreme score (or 0 for empty rows).
pub fn make_rt_certificate(a: &QrelMatrix, b: &ScoreMatrix) -> Result<Option<RankCertificate>> {
    ensure_same_shape(a, b)?;
    let mut tau = Vec::with_capacity(a.num_queries());
    for i in 0..a.num_queries() {
        let t = match row_extremes(a, b, i) {
            (Some(lo), Some(hi)) if hi > lo => 0.5 * (lo + hi),
            (Some(_), Some(_)) => return Ok(None),
            (Some(lo), None) => lo + 1.0,
            (None, Some(hi)) => hi - 1.0,
            (None, None) => 0.0,
        };
        tau.push(t);
    }
    let (m, n) = a.shape();
    let cert = RankCertificate {
        kind: CertificateKind::Rt,
        row_thresholds: Some(tau),
        global_threshold: None,
        realized_rank_upper_bound: m.min(n),
    };
    debug_assert!(rows_separated_by(a, b, cert.row_thresholds.as_deref().unwrap()));
    Ok(Some(cert))
}

/// `B[i][j] > τ` exactly where `A[i][j] = 1`, and `< τ` elsewhere.
pub fn check_gt(a: &QrelMatrix, b: &ScoreMatrix, tau: f64) -> Result<bool> {
    ensure_same_shape(a, b)?;
    if !tau.is_finite() {
        return Err(Error::InvalidArgument("global threshold must be finite".into()));
    }
    Ok((0..a.num_queries()).all(|i| {
        a.row(i)
            .iter()
            .zip(b.0.row(i))
            .all(|(&rel, &s)| if rel { s > tau } else { s < tau })
    }))
}

/// Wraps a verified global threshold into a certificate.
pub fn make_gt_certificate(a: &QrelMatrix, b: &ScoreMatrix, tau: f64) -> Result<Option<RankCertificate>> {
    if !check_gt(a, b, tau)? {
        return Ok(None);
    }
    let (m, n) = a.shape();
    Ok(Some(RankCertificate {
        kind: CertificateKind::Gt,
        row_thresholds: None,
        global_threshold: Some(tau),
        realized_rank_upper_bound: m.min(n),
    }))
}

/// `B − τ 1ᵀ`: subtracts `tau[i]` from every entry of row `i`. The result
/// has rank at most `rank(B) + 1`.
pub fn shift_rows(b: &ScoreMatrix, tau: &[f64]) -> Result<ScoreMatrix> {
    let (m, _) = b.shape();
    if tau.len() != m {
        return Err(Error::shape(format!("{} thresholds for {m} rows", tau.len())));
    }
    let mut out = b.0.clone();
    for (mut row, &t) in out.rows_mut().into_iter().zip(tau) {
        row.mapv_inplace(|x| x - t);
    }
    ScoreMatrix::new(out)
}

/// Entrywise `sign(B) == M`; a zero score has no sign and fails.
pub fn sign_agrees(m: &SignMatrix, b: &ScoreMatrix) -> Result<bool> {
    if m.shape() != b.shape() {
        return Err(Error::shape(format!("signs are {:?} but scores are {:?}", m.shape(), b.shape())));
    }
    Ok(m.0.iter().zip(b.0.iter()).all(|(&s, &x)| match s {
        1 => x > 0.0,
        _ => x < 0.0,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn qrels(rows: &[&[u8]]) -> QrelMatrix {
        QrelMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn scores(rows: &[&[f64]]) -> ScoreMatrix {
        ScoreMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn sign_matrix_examples() {
        assert_eq!(sign_matrix(&qrels(&[&[1, 0]])).entries(), &array![[1i8, -1]]);
        assert_eq!(sign_matrix(&qrels(&[&[1, 1], &[0, 0]])).entries(), &array![[1i8, 1], [-1, -1]]);
        let eye = qrels(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let s = sign_matrix(&eye);
        for ((i, j), &x) in s.entries().indexed_iter() {
            assert_eq!(x, if i == j { 1 } else { -1 });
        }
        assert_eq!(s.to_qrels(), eye);
    }

    #[test]
    fn rop_examples() {
        assert!(check_rop(&qrels(&[&[1, 0]]), &scores(&[&[0.9, 0.1]])).unwrap());
        assert!(!check_rop(&qrels(&[&[1, 0], &[0, 1]]), &scores(&[&[1.0, 2.0], &[1.0, 2.0]])).unwrap());
        // ties fail
        assert!(!check_rop(&qrels(&[&[1, 0]]), &scores(&[&[0.5, 0.5]])).unwrap());
        // vacuous rows pass
        assert!(check_rop(&qrels(&[&[1, 1], &[0, 0]]), &scores(&[&[0.0, 5.0], &[3.0, -1.0]])).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = qrels(&[&[1, 0]]);
        let b = scores(&[&[1.0, 0.0, 0.0]]);
        assert!(matches!(check_rop(&a, &b), Err(Error::Shape(_))));
        assert!(matches!(make_rt_certificate(&a, &b), Err(Error::Shape(_))));
        assert!(matches!(check_gt(&a, &b, 0.0), Err(Error::Shape(_))));
        assert!(matches!(shift_rows(&b, &[1.0, 2.0]), Err(Error::Shape(_))));
        assert!(matches!(sign_agrees(&sign_matrix(&a), &b), Err(Error::Shape(_))));
    }

    #[test]
    fn rt_certificate_midpoints() {
        let c = make_rt_certificate(&qrels(&[&[1, 0]]), &scores(&[&[0.9, 0.1]])).unwrap().unwrap();
        assert_eq!(c.kind, CertificateKind::Rt);
        assert!((c.row_thresholds.as_ref().unwrap()[0] - 0.5).abs() < 1e-15);

        let a = qrels(&[&[1, 0], &[0, 1]]);
        let b = scores(&[&[3.0, 1.0], &[0.0, 2.0]]);
        let c = make_rt_certificate(&a, &b).unwrap().unwrap();
        assert_eq!(c.row_thresholds.as_deref().unwrap(), &[2.0, 1.0]);
        assert!(c.verify(&a, &b).unwrap());

        let bad = scores(&[&[1.0, 2.0], &[1.0, 2.0]]);
        assert!(make_rt_certificate(&a, &bad).unwrap().is_none());
    }

    #[test]
    fn rt_certificate_handles_vacuous_rows() {
        let a = qrels(&[&[1, 1], &[0, 0]]);
        let b = scores(&[&[0.0, 5.0], &[3.0, -1.0]]);
        let c = make_rt_certificate(&a, &b).unwrap().unwrap();
        assert!(c.verify(&a, &b).unwrap());
        assert!(c.row_thresholds.unwrap().iter().all(|t| t.is_finite()));
    }

    #[test]
    fn gt_examples() {
        let a = qrels(&[&[1, 0]]);
        let b = scores(&[&[1.0, -1.0]]);
        assert!(check_gt(&a, &b, 0.0).unwrap());
        assert!(!check_gt(&a, &b, 2.0).unwrap());
        // a threshold equal to a score is rejected
        assert!(!check_gt(&a, &b, 1.0).unwrap());
        assert!(check_gt(&a, &b, f64::NAN).is_err());
        let c = make_gt_certificate(&a, &b, 0.0).unwrap().unwrap();
        assert!(c.verify(&a, &b).unwrap());
        assert!(make_gt_certificate(&a, &b, 2.0).unwrap().is_none());
    }

    #[test]
    fn shift_and_sign_agreement() {
        let b = scores(&[&[3.0, 1.0]]);
        assert_eq!(shift_rows(&b, &[2.0]).unwrap(), scores(&[&[1.0, -1.0]]));
        assert_eq!(shift_rows(&b, &[0.0]).unwrap(), b);

        let m = sign_matrix(&qrels(&[&[1, 0]]));
        assert!(sign_agrees(&m, &scores(&[&[0.3, -7.0]])).unwrap());
        assert!(!sign_agrees(&m, &scores(&[&[0.3, 0.0]])).unwrap());
    }

    #[test]
    fn chain_on_rt_solution() {
        let a = qrels(&[&[1, 0], &[0, 1]]);
        let b = scores(&[&[3.0, 1.0], &[0.0, 2.0]]);
        let c = make_rt_certificate(&a, &b).unwrap().unwrap();
        let shifted = shift_rows(&b, c.row_thresholds.as_deref().unwrap()).unwrap();
        assert!(sign_agrees(&sign_matrix(&a), &shifted).unwrap());
        assert!(check_gt(&a, &shifted, 0.0).unwrap());
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(QrelMatrix::from_rows(&[vec![1, 2]]).is_err());
        assert!(QrelMatrix::from_rows(&[vec![1, 0], vec![1]]).is_err());
        assert!(QrelMatrix::new(vec!["a".into(), "a".into()], vec!["x".into()], vec![true, false]).is_err());
        assert!(ScoreMatrix::from_rows(&[vec![f64::NAN]]).is_err());
        assert!(SignMatrix::new(array![[0i8]]).is_err());
    }

    #[test]
    fn tsv_round_trip_keeps_absent_pairs_zero() {
        let a = qrels(&[&[1, 0, 1], &[0, 1, 0]]);
        let mut buf = Vec::new();
        a.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("query-id\tcorpus-id\tscore\n"));
        let back = QrelMatrix::read_tsv(buf.as_slice(), Some(a.doc_ids())).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn tsv_errors_carry_line_numbers() {
        let input = "query-id\tcorpus-id\tscore\nq0\td0\t1\nq1\td1\n";
        match QrelMatrix::read_tsv(input.as_bytes(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let input = "query-id\tcorpus-id\tscore\nq0\td0\t7\n";
        assert!(matches!(QrelMatrix::read_tsv(input.as_bytes(), None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn tsv_zero_scores_register_ids() {
        let input = "query-id\tcorpus-id\tscore\nq0\td0\t1\nq0\td1\t0\n";
        let a = QrelMatrix::read_tsv(input.as_bytes(), None).unwrap();
        assert_eq!(a.shape(), (1, 2));
        assert_eq!(a.row(0), &[true, false]);
    }
}
