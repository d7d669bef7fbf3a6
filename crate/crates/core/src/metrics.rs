//! Density statistics of a qrel matrix viewed as a graph: a document graph
//! (edge when two documents are relevant to a common query) and a weighted
//! query graph (edge when relevant sets intersect, Jaccard weight).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qrel::QrelMatrix;

/// Which documents become nodes of the document graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocNodeSet {
    /// Documents relevant to at least one query.
    JudgedOnly,
    AllDocs,
}

fn density(nodes: usize, edges: usize) -> f64 {
    if nodes <= 1 {
        return 0.0;
    }
    2.0 * edges as f64 / (nodes as f64 * (nodes as f64 - 1.0))
}

/// Co-relevance edges between documents, as (lower, higher) column pairs.
fn doc_edges(a: &QrelMatrix) -> HashSet<(usize, usize)> {
    let mut edges = HashSet::new();
    for i in 0..a.num_queries() {
        let rel = a.relevant(i);
        for (x, &p) in rel.iter().enumerate() {
            for &q in &rel[x + 1..] {
                edges.insert((p, q));
            }
        }
    }
    edges
}

fn doc_node_count(a: &QrelMatrix, nodes: DocNodeSet) -> usize {
    match nodes {
        DocNodeSet::AllDocs => a.num_docs(),
        DocNodeSet::JudgedOnly => a.column_counts().iter().filter(|&&c| c > 0).count(),
    }
}

/// `2|E| / (|V|(|V|−1))` of the document co-relevance graph; 0 when the
/// graph has at most one node.
pub fn doc_graph_density(a: &QrelMatrix, nodes: DocNodeSet) -> f64 {
    density(doc_node_count(a, nodes), doc_edges(a).len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryEdge {
    pub a: usize,
    pub b: usize,
    /// `|R_a ∩ R_b| / |R_a ∪ R_b|`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryGraph {
    pub nodes: usize,
    /// Sorted by `(a, b)` with `a < b`.
    pub edges: Vec<QueryEdge>,
}

impl QueryGraph {
    /// Sum of incident edge weights for every query.
    pub fn strengths(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.nodes];
        for e in &self.edges {
            s[e.a] += e.weight;
            s[e.b] += e.weight;
        }
        s
    }

    pub fn density(&self) -> f64 {
        density(self.nodes, self.edges.len())
    }

    pub fn average_strength(&self) -> f64 {
        if self.nodes == 0 {
            return 0.0;
        }
        self.strengths().iter().sum::<f64>() / self.nodes as f64
    }
}

/// Builds the Jaccard-weighted query graph.
pub fn query_graph(a: &QrelMatrix) -> Result<QueryGraph> {
    let sizes: Vec<usize> = (0..a.num_queries()).map(|i| a.relevant_count(i)).collect();
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::DegenerateQuery(i));
    }
    let mut by_doc: Vec<Vec<usize>> = vec![Vec::new(); a.num_docs()];
    for i in 0..a.num_queries() {
        for j in a.relevant(i) {
            by_doc[j].push(i);
        }
    }
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for queries in &by_doc {
        for (x, &p) in queries.iter().enumerate() {
            for &q in &queries[x + 1..] {
                *shared.entry((p, q)).or_insert(0) += 1;
            }
        }
    }
    let mut edges: Vec<QueryEdge> = shared
        .into_iter()
        .map(|((p, q), inter)| QueryEdge { a: p, b: q, weight: inter as f64 / (sizes[p] + sizes[q] - inter) as f64 })
        .collect();
    edges.sort_by_key(|e| (e.a, e.b));
    Ok(QueryGraph { nodes: a.num_queries(), edges })
}

/// Mean over queries of the summed Jaccard weights of their edges.
pub fn average_query_strength(a: &QrelMatrix) -> Result<f64> {
    Ok(query_graph(a)?.average_strength())
}

/// `2|E| / (m(m−1))` of the query graph.
pub fn query_graph_density(a: &QrelMatrix) -> Result<f64> {
    Ok(query_graph(a)?.density())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMetricsReport {
    /// Document graph over judged documents.
    pub doc_graph_density: f64,
    pub doc_graph_nodes: usize,
    pub doc_graph_edges: usize,
    pub query_graph_density: f64,
    pub query_graph_nodes: usize,
    pub query_graph_edges: usize,
    pub average_query_strength: f64,
}

impl GraphMetricsReport {
    pub fn compute(a: &QrelMatrix) -> Result<Self> {
        let qg = query_graph(a)?;
        let doc_graph_nodes = doc_node_count(a, DocNodeSet::JudgedOnly);
        let doc_graph_edges = doc_edges(a).len();
        Ok(Self {
            doc_graph_density: density(doc_graph_nodes, doc_graph_edges),
            doc_graph_nodes,
            doc_graph_edges,
            query_graph_density: qg.density(),
            query_graph_nodes: qg.nodes,
            query_graph_edges: qg.edges.len(),
            average_query_strength: qg.average_strength(),
        })
    }

    /// One row in the layout `name | graph density | average query strength`,
    /// followed by the document-graph density for comparison.
    pub fn table_row(&self, name: &str) -> String {
        format!(
            "{name}\t{:.6}\t{:.4}\t(doc graph density {:.6})",
            self.query_graph_density, self.average_query_strength, self.doc_graph_density
        )
    }
}
