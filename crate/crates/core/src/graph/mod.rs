//! Weighted networks over opaque string node ids, the two base networks built
//! from a corpus, and structural statistics.

mod export;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorTable, Corpus};
use crate::error::{Error, Result};

pub use export::{read_edge_csv, to_dot, to_edge_csv, to_graphml};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl AttrValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Int(i) => Some(*i as f64),
            AttrValue::Float(f) => Some(*f),
            AttrValue::Text(_) => None,
        }
    }
}

impl std::fmt::Display for AttrValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Float(x) => write!(f, "{x}"),
            AttrValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for AttrValue {
    fn from(v: i64) -> Self {
        AttrValue::Int(v)
    }
}
impl From<usize> for AttrValue {
    fn from(v: usize) -> Self {
        AttrValue::Int(v as i64)
    }
}
impl From<f64> for AttrValue {
    fn from(v: f64) -> Self {
        AttrValue::Float(v)
    }
}
impl From<&str> for AttrValue {
    fn from(v: &str) -> Self {
        AttrValue::Text(v.to_string())
    }
}
impl From<String> for AttrValue {
    fn from(v: String) -> Self {
        AttrValue::Text(v)
    }
}

pub type Attrs = BTreeMap<String, AttrValue>;

/// Immutable weighted graph. Nodes are kept in ascending id order and
/// addressed internally by their position in that order. Undirected edges are
/// stored once under `(min, max)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "NetworkData", into = "NetworkData")]
pub struct Network {
    directed: bool,
    nodes: Vec<String>,
    attrs: Vec<Attrs>,
    edges: BTreeMap<(usize, usize), f64>,
    index: HashMap<String, usize>,
    out_adj: Vec<Vec<(usize, f64)>>,
    in_adj: Vec<Vec<(usize, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct NetworkData {
    directed: bool,
    nodes: Vec<(String, Attrs)>,
    edges: Vec<(String, String, f64)>,
}

impl From<NetworkData> for Network {
    fn from(d: NetworkData) -> Self {
        let mut b = NetworkBuilder::new(d.directed);
        for (id, attrs) in d.nodes {
            b.add_node(&id);
            for (k, v) in attrs {
                b.set_attr(&id, &k, v);
            }
        }
        for (u, v, w) in d.edges {
            b.add_edge(&u, &v, w);
        }
        b.build()
    }
}

impl From<Network> for NetworkData {
    fn from(n: Network) -> Self {
        NetworkData {
            directed: n.directed,
            edges: n
                .edges()
                .map(|(u, v, w)| (u.to_string(), v.to_string(), w))
                .collect(),
            nodes: n.nodes.into_iter().zip(n.attrs).collect(),
        }
    }
}

impl Network {
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ids in ascending order.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn node_attrs(&self, id: &str) -> Option<&Attrs> {
        self.node_index(id).map(|i| &self.attrs[i])
    }

    pub fn attrs_at(&self, i: usize) -> &Attrs {
        &self.attrs[i]
    }

    /// `(u, v, weight)` in key order; undirected edges have `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        self.edges
            .iter()
            .map(|(&(u, v), &w)| (self.nodes[u].as_str(), self.nodes[v].as_str(), w))
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn weight(&self, u: &str, v: &str) -> Option<f64> {
        let (a, b) = (self.node_index(u)?, self.node_index(v)?);
        let key = if self.directed || a < b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().sum()
    }

    /// Outgoing neighbours (all neighbours when undirected).
    pub fn out_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.out_adj[i]
    }

    /// Incoming neighbours (all neighbours when undirected).
    pub fn in_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.in_adj[i]
    }

    /// Distinct neighbours regardless of direction, ascending.
    pub fn neighbor_set(&self, i: usize) -> BTreeSet<usize> {
        self.out_adj[i]
            .iter()
            .chain(self.in_adj[i].iter())
            .map(|&(j, _)| j)
            .collect()
    }

    pub fn in_degree(&self, id: &str) -> usize {
        self.node_index(id).map_or(0, |i| self.in_adj[i].len())
    }

    /// Subgraph on `keep` (ids not in the graph are ignored).
    pub fn induced_subgraph<'a, I: IntoIterator<Item = &'a str>>(&self, keep: I) -> Network {
        let keep: BTreeSet<usize> = keep.into_iter().filter_map(|id| self.node_index(id)).collect();
        let mut b = NetworkBuilder::new(self.directed);
        for &i in &keep {
            b.add_node(&self.nodes[i]);
            for (k, v) in &self.attrs[i] {
                b.set_attr(&self.nodes[i], k, v.clone());
            }
        }
        for (&(u, v), &w) in &self.edges {
            if keep.contains(&u) && keep.contains(&v) {
                b.add_edge(&self.nodes[u], &self.nodes[v], w);
            }
        }
        b.build()
    }

    /// Copy with extra node attributes merged in.
    pub fn with_node_attrs(&self, extra: &BTreeMap<String, Attrs>) -> Network {
        let mut n = self.clone();
        for (id, attrs) in extra {
            if let Some(i) = n.node_index(id) {
                n.attrs[i].extend(attrs.clone());
            }
        }
        n
    }

    /// Weakly connected components, each sorted ascending, largest first
    /// (ties by smallest member).
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in self.out_adj[u].iter().chain(self.in_adj[u].iter()) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    /// Node ids of the largest weak component.
    pub fn giant_component(&self) -> Vec<&str> {
        self.weak_components()
            .into_iter()
            .next()
            .map(|c| c.into_iter().map(|i| self.nodes[i].as_str()).collect())
            .unwrap_or_default()
    }
}

/// Accumulating builder; repeated edges add their weights.
#[derive(Clone, Debug)]
pub struct NetworkBuilder {
    directed: bool,
    nodes: BTreeMap<String, Attrs>,
    edges: BTreeMap<(String, String), f64>,
}

impl NetworkBuilder {
    pub fn new(directed: bool) -> NetworkBuilder {
        NetworkBuilder {
            directed,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn add_node(&mut self, id: &str) -> &mut Self {
        self.nodes.entry(id.to_string()).or_default();
        self
    }

    pub fn set_attr(&mut self, id: &str, key: &str, value: impl Into<AttrValue>) -> &mut Self {
        self.nodes
            .entry(id.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
        self
    }

    /// Self-loops and non-positive weights are ignored.
    pub fn add_edge(&mut self, u: &str, v: &str, weight: f64) -> &mut Self {
        if u == v || weight <= 0.0 || !weight.is_finite() {
            return self;
        }
        self.add_node(u);
        self.add_node(v);
        let key = if self.directed || u < v {
            (u.to_string(), v.to_string())
        } else {
            (v.to_string(), u.to_string())
        };
        *self.edges.entry(key).or_insert(0.0) += weight;
        self
    }

    pub fn build(self) -> Network {
        let nodes: Vec<String> = self.nodes.keys().cloned().collect();
        let attrs: Vec<Attrs> = self.nodes.into_values().collect();
        let index: HashMap<String, usize> =
            nodes.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut edges = BTreeMap::new();
        let mut out_adj = vec![Vec::new(); nodes.len()];
        let mut in_adj = vec![Vec::new(); nodes.len()];
        for ((u, v), w) in self.edges {
            let (a, b) = (index[&u], index[&v]);
            edges.insert((a, b), w);
            out_adj[a].push((b, w));
            in_adj[b].push((a, w));
            if !self.directed {
                out_adj[b].push((a, w));
                in_adj[a].push((b, w));
            }
        }
        for adj in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            adj.sort_by_key(|&(j, _)| j);
        }
        Network {
            directed: self.directed,
            nodes,
            attrs,
            edges,
            index,
            out_adj,
            in_adj,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CoauthorOptions {
    /// Records with more authors than this are skipped; `None` keeps all.
    pub max_authors: Option<usize>,
}

/// Undirected co-author network over the authors in `table`; edge weight is the
/// number of co-authored records, node attribute `pub_count`.
pub fn build_coauthor_graph(corpus: &Corpus, table: &AuthorTable, opts: &CoauthorOptions) -> Network {
    let mut b = NetworkBuilder::new(false);
    for (id, e) in table.iter() {
        b.set_attr(id.as_str(), "pub_count", e.publication_count);
        b.set_attr(id.as_str(), "last_name", e.last_name.as_str());
    }
    for rec in corpus.iter() {
        let ids = rec.author_ids();
        if opts.max_authors.is_some_and(|cap| ids.len() > cap) {
            continue;
        }
        let members: Vec<&str> = ids
            .iter()
            .filter(|id| table.contains(id))
            .map(|id| id.as_str())
            .collect();
        for (i, u) in members.iter().enumerate() {
            for v in &members[i + 1..] {
                b.add_edge(u, v, 1.0);
            }
        }
    }
    b.build()
}

/// Directed document citation network with unit weights; records without any
/// in-corpus citation link are excluded.
pub fn build_citation_graph(corpus: &Corpus) -> Network {
    let mut b = NetworkBuilder::new(true);
    for rec in corpus.iter() {
        let targets: BTreeSet<&str> = rec.cited_record_ids().collect();
        for t in targets {
            b.add_edge(&rec.record_id, t, 1.0);
        }
    }
    let mut net = b.build();
    for (i, id) in net.nodes.clone().iter().enumerate() {
        if let Some(rec) = corpus.get(id) {
            net.attrs[i].insert("year".into(), AttrValue::Int(rec.year as i64));
        }
    }
    net
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub giant_size: usize,
    pub giant_fraction: f64,
    pub component_count: usize,
}

pub fn component_stats(net: &Network) -> Result<ComponentStats> {
    if net.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let comps = net.weak_components();
    let giant_size = comps[0].len();
    Ok(ComponentStats {
        giant_size,
        giant_fraction: giant_size as f64 / net.node_count() as f64,
        component_count: comps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{
        build_author_table, normalize_corpus, AuthorName, BiblioRecord, CitedRef, NormalizeOptions,
    };

    fn paper(id: &str, authors: &[&str], refs: &[&str]) -> BiblioRecord {
        let mut r = BiblioRecord::new(
            id,
            2000,
            authors.iter().map(|a| AuthorName::new(a, "X")).collect(),
        );
        r.cited_refs = refs.iter().map(|s| CitedRef::new(s)).collect();
        r
    }

    fn corpus(recs: Vec<BiblioRecord>) -> Corpus {
        normalize_corpus(recs, &NormalizeOptions::default()).corpus
    }

    #[test]
    fn coauthor_triangle_and_weights() {
        let c = corpus(vec![
            paper("p1", &["A", "B", "C"], &[]),
            paper("p2", &["A", "B"], &[]),
        ]);
        let g = build_coauthor_graph(&c, &build_author_table(&c, 1), &CoauthorOptions::default());
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.weight("A, X", "B, X"), Some(2.0));
        assert_eq!(g.weight("B, X", "A, X"), Some(2.0));
        assert_eq!(g.weight("A, X", "C, X"), Some(1.0));
        assert_eq!(
            g.node_attrs("A, X").unwrap().get("pub_count"),
            Some(&AttrValue::Int(2))
        );
    }

    #[test]
    fn filtered_author_absent() {
        let c = corpus(vec![
            paper("p1", &["A", "B", "C"], &[]),
            paper("p2", &["A", "B"], &[]),
        ]);
        let g = build_coauthor_graph(&c, &build_author_table(&c, 2), &CoauthorOptions::default());
        assert_eq!(g.node_count(), 2);
        assert!(!g.contains_node("C, X"));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn author_cap_skips_large_bylines() {
        let c = corpus(vec![paper("p1", &["A", "B", "C"], &[]), paper("p2", &["A", "B"], &[])]);
        let opts = CoauthorOptions { max_authors: Some(2) };
        let g = build_coauthor_graph(&c, &build_author_table(&c, 1), &opts);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight("A, X", "B, X"), Some(1.0));
    }

    #[test]
    fn citation_graph_excludes_singletons() {
        let c = corpus(vec![
            paper("A", &["x"], &["B"]),
            paper("B", &["y"], &[]),
            paper("C", &["z"], &[]),
        ]);
        let g = build_citation_graph(&c);
        assert_eq!(g.nodes(), &["A".to_string(), "B".to_string()]);
        assert_eq!(g.weight("A", "B"), Some(1.0));
        assert_eq!(g.weight("B", "A"), None);
    }

    #[test]
    fn mutual_citation_two_edges() {
        let c = corpus(vec![paper("A", &["x"], &["B", "B"]), paper("B", &["y"], &["A"])]);
        let g = build_citation_graph(&c);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight("A", "B"), Some(1.0));
        assert_eq!(g.in_degree("A"), 1);
    }

    #[test]
    fn components() {
        let mut b = NetworkBuilder::new(false);
        b.add_edge("a", "b", 1.0).add_edge("b", "c", 1.0).add_node("d");
        let s = component_stats(&b.build()).unwrap();
        assert_eq!(s.giant_size, 3);
        assert_eq!(s.component_count, 2);
        assert!((s.giant_fraction - 0.75).abs() < 1e-15);
        assert!(matches!(
            component_stats(&NetworkBuilder::new(true).build()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn serde_roundtrip() {
        let mut b = NetworkBuilder::new(true);
        b.add_edge("a", "b", 2.5).set_attr("a", "size", 3usize).add_node("z");
        let n = b.build();
        let json = serde_json::to_string(&n).unwrap();
        let back: Network = serde_json::from_str(&json).unwrap();
        assert_eq!(back, n);
    }
}
