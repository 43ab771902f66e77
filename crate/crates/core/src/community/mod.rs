//! Map-equation community detection and the operations built on it.

mod flow;
mod mapeq;
mod optimizer;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Network, NetworkBuilder};

pub use flow::{compute_flow, visit_rates, Flow, DEFAULT_TELEPORT};
pub use mapeq::{map_equation, map_equation_with, CodelengthReport};
pub use optimizer::{detect_communities, detect_with, DetectOptions, Detection, DEFAULT_TRIALS};

/// Assignment of node ids to cluster ids.
///
/// A partition is canonical when its clusters are numbered `0..k` in order of
/// first appearance over ascending node ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: BTreeMap<String, usize>,
    canonical: bool,
}

impl Partition {
    pub fn new(assignment: BTreeMap<String, usize>) -> Partition {
        let canonical = is_canonical(assignment.values().copied());
        Partition {
            assignment,
            canonical,
        }
    }

    /// Canonical partition from labels aligned with `nodes`.
    pub fn from_labels(nodes: &[String], labels: &[usize]) -> Partition {
        Partition::new(nodes.iter().cloned().zip(labels.iter().copied()).collect()).canonicalize()
    }

    /// Every node of `net` in cluster 0.
    pub fn single(net: &Network) -> Partition {
        Partition::from_labels(net.nodes(), &vec![0; net.node_count()])
    }

    pub fn singletons(net: &Network) -> Partition {
        let labels: Vec<usize> = (0..net.node_count()).collect();
        Partition::from_labels(net.nodes(), &labels)
    }

    pub fn canonicalize(&self) -> Partition {
        if self.canonical {
            return self.clone();
        }
        let labels = optimizer::canonical_labels(&self.assignment.values().copied().collect::<Vec<_>>());
        Partition {
            assignment: self.assignment.keys().cloned().zip(labels).collect(),
            canonical: true,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_of(&self, node: &str) -> Option<usize> {
        self.assignment.get(node).copied()
    }

    pub fn cluster_count(&self) -> usize {
        self.assignment.values().collect::<BTreeSet<_>>().len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignment.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn node_set(&self) -> BTreeSet<&str> {
        self.assignment.keys().map(String::as_str).collect()
    }

    /// Members per cluster, each list ascending.
    pub fn clusters(&self) -> BTreeMap<usize, Vec<String>> {
        let mut out: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (n, &c) in &self.assignment {
            out.entry(c).or_default().push(n.clone());
        }
        out
    }

    /// Canonical label vector over ascending node ids.
    pub fn encoding(&self) -> Vec<usize> {
        self.canonicalize().assignment.values().copied().collect()
    }

    /// Labels aligned with `net.nodes()`; errors if a node is unassigned.
    pub fn labels_for(&self, net: &Network) -> Result<Vec<usize>> {
        net.nodes()
            .iter()
            .map(|n| {
                self.assignment
                    .get(n)
                    .copied()
                    .ok_or_else(|| Error::PartitionCoverage(n.clone()))
            })
            .collect()
    }

    /// Restriction to the given nodes (ids not present are ignored).
    pub fn restrict<'a, I: IntoIterator<Item = &'a str>>(&self, nodes: I) -> Partition {
        Partition::new(
            nodes
                .into_iter()
                .filter_map(|n| self.assignment.get(n).map(|&c| (n.to_string(), c)))
                .collect(),
        )
    }

    /// `node_id,cluster_id` rows with a header.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = crate::csvutil::writer();
        w.write_record(["node_id", "cluster_id"])?;
        for (n, c) in &self.assignment {
            w.write_record([n.as_str(), &c.to_string()])?;
        }
        crate::csvutil::finish(w)
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Partition> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut assignment = BTreeMap::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let c: usize = row.get(1).and_then(|s| s.trim().parse().ok()).ok_or(Error::Parse {
                line: i + 2,
                message: "cluster_id must be a non-negative integer".into(),
            })?;
            assignment.insert(row[0].to_string(), c);
        }
        Ok(Partition::new(assignment))
    }
}

fn is_canonical(labels: impl Iterator<Item = usize>) -> bool {
    let mut next = 0;
    for l in labels {
        if l == next {
            next += 1;
        } else if l > next {
            return false;
        }
    }
    true
}

/// Zero-padded cluster node id so that string order equals numeric order.
pub fn cluster_node_id(cluster: usize, count: usize) -> String {
    let width = count.saturating_sub(1).max(1).to_string().len();
    format!("c{cluster:0width$}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregated {
    /// One node per cluster (see [`cluster_node_id`]) with attribute `size`.
    pub network: Network,
    /// Weight of edges inside each cluster, dropped from `network`.
    pub intra_weight: BTreeMap<usize, f64>,
}

/// Collapses clusters into nodes; inter-cluster edge weights are summed.
pub fn aggregate(net: &Network, part: &Partition) -> Result<Aggregated> {
    let part = part.restrict(net.nodes().iter().map(String::as_str)).canonicalize();
    let labels = part.labels_for(net)?;
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let ids: Vec<String> = (0..k).map(|c| cluster_node_id(c, k)).collect();
    let mut b = NetworkBuilder::new(net.is_directed());
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    for (c, id) in ids.iter().enumerate() {
        b.set_attr(id, "size", sizes[c]);
    }
    let mut intra_weight: BTreeMap<usize, f64> = (0..k).map(|c| (c, 0.0)).collect();
    for (u, v, w) in net.edge_indices() {
        let (a, c) = (labels[u], labels[v]);
        if a == c {
            *intra_weight.get_mut(&a).expect("cluster") += w;
        } else {
            b.add_edge(&ids[a], &ids[c], w);
        }
    }
    Ok(Aggregated {
        network: b.build(),
        intra_weight,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleClustering {
    /// Document-level clusters.
    pub level1: Partition,
    pub level1_report: CodelengthReport,
    /// Clusters of the aggregated level-1 network (node ids from [`cluster_node_id`]).
    pub level2: Partition,
    pub level2_report: CodelengthReport,
    pub aggregated: Network,
    /// Document -> level-2 cluster.
    pub docmap: BTreeMap<String, usize>,
}

/// Clusters the citation network, then clusters the network of its clusters.
pub fn double_cluster(net: &Network, opts: &DetectOptions) -> Result<DoubleClustering> {
    let level1 = detect_with(net, opts)?;
    let agg = aggregate(net, &level1.partition)?;
    let level2 = detect_with(&agg.network, opts)?;
    let k1 = level1.partition.cluster_count();
    let mut docmap = BTreeMap::new();
    for (doc, c1) in level1.partition.iter() {
        let c2 = level2
            .partition
            .cluster_of(&cluster_node_id(c1, k1))
            .expect("aggregated node for every level-1 cluster");
        docmap.insert(doc.to_string(), c2);
    }
    Ok(DoubleClustering {
        level1: level1.partition,
        level1_report: level1.report,
        level2: level2.partition,
        level2_report: level2.report,
        aggregated: agg.network,
        docmap,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedParams {
    pub n: usize,
    pub k: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct PlantedGraph {
    pub network: Network,
    pub truth: Partition,
    pub params: PlantedParams,
}

/// Undirected graph with `k` equal blocks; intra-block pairs are linked with
/// probability `p_in`, inter-block pairs with `p_out`.
pub fn planted_partition(n: usize, k: usize, p_in: f64, p_out: f64, seed: u64) -> Result<PlantedGraph> {
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(Error::invalid(format!("n={n} must be a positive multiple of k={k}")));
    }
    if !(0.0 <= p_out && p_out < p_in && p_in <= 1.0) {
        return Err(Error::invalid(format!(
            "need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )));
    }
    let width = (n - 1).max(1).to_string().len();
    let ids: Vec<String> = (0..n).map(|i| format!("v{i:0width$}")).collect();
    let block = n / k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetworkBuilder::new(false);
    for id in &ids {
        b.add_node(id);
    }
    for i in 0..n {
        for j in i + 1..n {
            let p = if i / block == j / block { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                b.add_edge(&ids[i], &ids[j], 1.0);
            }
        }
    }
    let truth: Vec<usize> = (0..n).map(|i| i / block).collect();
    Ok(PlantedGraph {
        network: b.build(),
        truth: Partition::from_labels(&ids, &truth),
        params: PlantedParams {
            n,
            k,
            p_in,
            p_out,
            seed,
        },
    })
}

/// Normalized mutual information with arithmetic-mean normalization,
/// `2 I(A;B) / (H(A) + H(B))`; two single-cluster partitions score 1.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.node_set() != b.node_set() {
        return Err(Error::NodeSetMismatch);
    }
    let n = a.len() as f64;
    if a.is_empty() {
        return Ok(1.0);
    }
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut ca: BTreeMap<usize, f64> = BTreeMap::new();
    let mut cb: BTreeMap<usize, f64> = BTreeMap::new();
    for (node, la) in a.iter() {
        let lb = b.cluster_of(node).expect("same node set");
        *joint.entry((la, lb)).or_default() += 1.0;
        *ca.entry(la).or_default() += 1.0;
        *cb.entry(lb).or_default() += 1.0;
    }
    let entropy = |m: &BTreeMap<usize, f64>| -> f64 {
        m.values().map(|&c| -(c / n) * (c / n).ln()).sum()
    };
    let (ha, hb) = (entropy(&ca), entropy(&cb));
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| (c / n) * ((c * n) / (ca[&x] * cb[&y])).ln())
        .sum();
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(pairs: &[(&str, usize)]) -> Partition {
        Partition::new(pairs.iter().map(|(n, c)| (n.to_string(), *c)).collect())
    }

    #[test]
    fn canonical_relabeling() {
        let p = part(&[("a", 5), ("b", 2), ("c", 5)]);
        assert!(!p.is_canonical());
        let c = p.canonicalize();
        assert!(c.is_canonical());
        assert_eq!(c.encoding(), vec![0, 1, 0]);
    }

    #[test]
    fn nmi_cases() {
        let a = part(&[("a", 0), ("b", 0), ("c", 1), ("d", 1)]);
        assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let relabeled = part(&[("a", 7), ("b", 7), ("c", 3), ("d", 3)]);
        assert!((nmi(&a, &relabeled).unwrap() - 1.0).abs() < 1e-12);
        let one = part(&[("a", 0), ("b", 0), ("c", 0), ("d", 0)]);
        let singles = part(&[("a", 0), ("b", 1), ("c", 2), ("d", 3)]);
        assert_eq!(nmi(&one, &singles).unwrap(), 0.0);
        assert!(matches!(
            nmi(&a, &part(&[("x", 0)])),
            Err(Error::NodeSetMismatch)
        ));
    }

    #[test]
    fn aggregate_sums_cross_weights() {
        let mut b = NetworkBuilder::new(false);
        b.add_edge("a", "b", 1.0).add_edge("a", "c", 2.0).add_edge("b", "d", 3.0);
        let net = b.build();
        let p = part(&[("a", 0), ("b", 0), ("c", 1), ("d", 1)]);
        let agg = aggregate(&net, &p).unwrap();
        assert_eq!(agg.network.edge_count(), 1);
        assert_eq!(agg.network.weight("c0", "c1"), Some(5.0));
        assert_eq!(agg.intra_weight[&0], 1.0);

        let one = aggregate(&net, &Partition::single(&net)).unwrap();
        assert_eq!(one.network.edge_count(), 0);
        assert_eq!(one.intra_weight[&0], 6.0);
    }

    #[test]
    fn planted_extremes() {
        let g = planted_partition(8, 2, 1.0, 0.0, 9).unwrap();
        assert_eq!(g.network.edge_count(), 2 * 6);
        for (u, v, _) in g.network.edges() {
            assert_eq!(g.truth.cluster_of(u), g.truth.cluster_of(v));
        }
        assert!(planted_partition(8, 2, 0.3, 0.3, 1).is_err());
        assert!(planted_partition(9, 2, 0.5, 0.1, 1).is_err());
    }

    #[test]
    fn partition_csv_roundtrip() {
        let p = part(&[("a", 0), ("b,c", 1)]);
        let back = Partition::from_csv(p.to_csv().unwrap().as_bytes()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn cluster_ids_sort_numerically() {
        let ids: Vec<String> = (0..12).map(|c| cluster_node_id(c, 12)).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }
}
