//! Author and country co-occurrence networks, plus the term network of a
//! topic model.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use thiserror::Error;

use crate::ingest::{extract_countries, CountryTable, YearSlice};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("contribution threshold must lie in [0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error("total document count must be positive")]
    ZeroTotal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Author,
    Country,
    /// Words linked by shared membership in topic word lists.
    Term,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Author => "author",
            EntityKind::Country => "country",
            EntityKind::Term => "term",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub label: String,
    /// Number of documents the entity appears in.
    pub weight: u64,
}

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Number of documents in which both endpoints appear.
    pub weight: u64,
}

/// Nodes carry ids assigned in order of first appearance; after filtering
/// the surviving ids are kept, so they need not be contiguous. Edges are
/// sorted by `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoOccurrenceGraph {
    pub kind: EntityKind,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl CoOccurrenceGraph {
    pub fn node(&self, id: usize) -> Option<&Node> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok().map(|i| &self.nodes[i])
    }

    /// Node weights keyed by label, independent of id assignment.
    pub fn node_weights(&self) -> BTreeMap<String, u64> {
        self.nodes.iter().map(|n| (n.label.clone(), n.weight)).collect()
    }

    /// Edge weights keyed by the label pair in sorted order.
    pub fn edge_weights(&self) -> BTreeMap<(String, String), u64> {
        let label: HashMap<usize, &str> = self.nodes.iter().map(|n| (n.id, n.label.as_str())).collect();
        self.edges
            .iter()
            .map(|e| {
                let (x, y) = (label[&e.a].to_owned(), label[&e.b].to_owned());
                (if x <= y { (x, y) } else { (y, x) }, e.weight)
            })
            .collect()
    }

    /// `id,label,weight`, the id-to-name table that accompanies a drawing.
    pub fn nodes_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "label", "weight"]).expect("in-memory write");
        for n in &self.nodes {
            w.write_record([n.id.to_string(), n.label.clone(), n.weight.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_graphml(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
        out.push_str("  <key id=\"nweight\" for=\"node\" attr.name=\"weight\" attr.type=\"long\"/>\n");
        out.push_str("  <key id=\"eweight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
        let _ = writeln!(out, "  <graph id=\"{}\" edgedefault=\"undirected\">", self.kind);
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "    <node id=\"n{}\"><data key=\"label\">{}</data><data key=\"nweight\">{}</data></node>",
                n.id,
                xml_escape(&n.label),
                n.weight
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "    <edge source=\"n{}\" target=\"n{}\"><data key=\"eweight\">{}</data></edge>",
                e.a, e.b, e.weight
            );
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph {} {{\n", self.kind);
        for n in &self.nodes {
            let _ = writeln!(out, "  n{} [label=\"{}\", weight={}];", n.id, dot_escape(&n.label), n.weight);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  n{} -- n{} [weight={}];", e.a, e.b, e.weight);
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Builds a graph from per-document entity lists. Repeats inside one
/// document count once.
pub fn build_from_entities<S: AsRef<str>>(kind: EntityKind, docs: &[Vec<S>]) -> CoOccurrenceGraph {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut pairs: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for doc in docs {
        let mut present: Vec<usize> = Vec::new();
        for entity in doc {
            let entity = entity.as_ref();
            let id = *ids.entry(entity.to_owned()).or_insert_with(|| {
                nodes.push(Node {
                    id: nodes.len(),
                    label: entity.to_owned(),
                    weight: 0,
                });
                nodes.len() - 1
            });
            if !present.contains(&id) {
                present.push(id);
            }
        }
        for &id in &present {
            nodes[id].weight += 1;
        }
        present.sort_unstable();
        for (i, &a) in present.iter().enumerate() {
            for &b in &present[i + 1..] {
                *pairs.entry((a, b)).or_default() += 1;
            }
        }
    }
    CoOccurrenceGraph {
        kind,
        nodes,
        edges: pairs.into_iter().map(|((a, b), weight)| Edge { a, b, weight }).collect(),
    }
}

/// Co-authorship graph over normalized author names.
pub fn author_graph(slice: &YearSlice) -> CoOccurrenceGraph {
    let docs: Vec<Vec<&str>> = slice
        .records
        .iter()
        .map(|r| r.authors.iter().map(|a| a.normalized.as_str()).collect())
        .collect();
    build_from_entities(EntityKind::Author, &docs)
}

/// Country collaboration graph. Returns the affiliation segments no table
/// entry matched, per record key.
pub fn country_graph(slice: &YearSlice, table: &CountryTable) -> (CoOccurrenceGraph, Vec<(String, String)>) {
    let mut unmatched = Vec::new();
    let docs: Vec<Vec<String>> = slice
        .records
        .iter()
        .map(|r| {
            let ex = extract_countries(r, table);
            unmatched.extend(ex.unmatched.into_iter().map(|u| (r.key.clone(), u)));
            ex.countries
        })
        .collect();
    (build_from_entities(EntityKind::Country, &docs), unmatched)
}

/// Keeps nodes whose share `weight / total_docs` strictly exceeds
/// `threshold`, with the edges among them.
pub fn filter_by_contribution(
    graph: &CoOccurrenceGraph,
    threshold: f64,
    total_docs: usize,
) -> Result<CoOccurrenceGraph, GraphError> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(GraphError::InvalidThreshold(threshold));
    }
    if total_docs == 0 {
        return Err(GraphError::ZeroTotal);
    }
    let nodes: Vec<Node> = graph
        .nodes
        .iter()
        .filter(|n| n.weight as f64 / total_docs as f64 > threshold)
        .cloned()
        .collect();
    let kept = |id: usize| nodes.binary_search_by_key(&id, |n| n.id).is_ok();
    let edges = graph.edges.iter().filter(|e| kept(e.a) && kept(e.b)).copied().collect();
    Ok(CoOccurrenceGraph {
        kind: graph.kind,
        nodes,
        edges,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Centrality {
    pub id: usize,
    pub label: String,
    pub degree: usize,
    pub weighted_degree: u64,
}

/// Degree and weighted degree of every node, ranked by weighted degree
/// descending, ties to the lower id.
pub fn degree_centrality(graph: &CoOccurrenceGraph) -> Vec<Centrality> {
    let mut deg: HashMap<usize, (usize, u64)> = HashMap::new();
    for e in &graph.edges {
        for end in [e.a, e.b] {
            let slot = deg.entry(end).or_default();
            slot.0 += 1;
            slot.1 += e.weight;
        }
    }
    let mut out: Vec<Centrality> = graph
        .nodes
        .iter()
        .map(|n| {
            let (degree, weighted_degree) = deg.get(&n.id).copied().unwrap_or_default();
            Centrality {
                id: n.id,
                label: n.label.clone(),
                degree,
                weighted_degree,
            }
        })
        .collect();
    out.sort_by(|x, y| y.weighted_degree.cmp(&x.weighted_degree).then(x.id.cmp(&y.id)));
    out
}

/// `rank,id,label,degree,weighted_degree`.
pub fn centrality_csv(ranking: &[Centrality]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "id", "label", "degree", "weighted_degree"])
        .expect("in-memory write");
    for (i, c) in ranking.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            c.id.to_string(),
            c.label.clone(),
            c.degree.to_string(),
            c.weighted_degree.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
