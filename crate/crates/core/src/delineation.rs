//! Checks on how well a query-defined corpus delineates a field: recall via
//! researchers' self-citation clusters, precision via author activity
//! across the largest topic areas.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::affinity::{affinity_components, association_matrix, AssociationMatrix, AssociationMode, ResidualTable};
use crate::community::{detect_with, double_cluster, DetectOptions};
use crate::corpus::{normalize_corpus, BiblioRecord, Corpus, NormalizeOptions};
use crate::error::{Error, Result};
use crate::graph::{build_citation_graph, Network, NetworkBuilder};
use crate::topics::{extract_topic_areas, TopicArea};

pub const DEFAULT_TOP_K: usize = 4;
pub const DEFAULT_SAMPLE_TITLES: usize = 3;

/// Directed, unweighted citations among one researcher's publications. Every
/// publication is a node, cited or not.
pub fn self_citation_network(pubs: &[BiblioRecord]) -> Result<Network> {
    if pubs.is_empty() {
        return Err(Error::invalid("researcher publication list is empty"));
    }
    let corpus = normalize_corpus(pubs.to_vec(), &NormalizeOptions { year_range: None }).corpus;
    let mut b = NetworkBuilder::new(true);
    for r in corpus.iter() {
        b.add_node(&r.record_id);
        b.set_attr(&r.record_id, "year", r.year as i64);
        for cited in r.cited_record_ids() {
            b.add_edge(&r.record_id, cited, 1.0);
        }
    }
    Ok(b.build())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecallCluster {
    pub cluster_id: usize,
    pub doc_count: usize,
    pub in_field: usize,
    pub overlap: f64,
    /// Titles to inspect, publications missing from the field corpus first.
    pub sample_titles: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    pub researcher_id: String,
    /// Ascending overlap, then cluster id.
    pub clusters: Vec<RecallCluster>,
}

/// Clusters a researcher's self-citation network and measures how much of
/// each cluster the field corpus contains.
pub fn recall_report(
    researcher_id: &str,
    pubs: &[BiblioRecord],
    field: &Corpus,
    opts: &DetectOptions,
) -> Result<RecallReport> {
    let net = self_citation_network(pubs)?;
    let part = detect_with(&net, opts)?.partition;
    let by_id: std::collections::HashMap<&str, &BiblioRecord> =
        pubs.iter().map(|r| (r.record_id.as_str(), r)).collect();
    let mut clusters: Vec<RecallCluster> = part
        .clusters()
        .into_iter()
        .map(|(cluster_id, docs)| {
            let (inside, outside): (Vec<&String>, Vec<&String>) = docs.iter().partition(|d| field.contains(d));
            let sample_titles = outside
                .iter()
                .chain(inside.iter())
                .filter_map(|d| by_id.get(d.as_str()))
                .map(|r| r.title.clone())
                .filter(|t| !t.is_empty())
                .take(DEFAULT_SAMPLE_TITLES)
                .collect();
            RecallCluster {
                cluster_id,
                doc_count: docs.len(),
                in_field: inside.len(),
                overlap: inside.len() as f64 / docs.len() as f64,
                sample_titles,
            }
        })
        .collect();
    clusters.sort_by(|a, b| a.overlap.total_cmp(&b.overlap).then(a.cluster_id.cmp(&b.cluster_id)));
    Ok(RecallReport {
        researcher_id: researcher_id.to_string(),
        clusters,
    })
}

impl RecallReport {
    /// `cluster,docs,in_field,overlap,sample_titles` (titles joined by ` | `).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = crate::csvutil::writer();
        w.write_record(["researcher", "cluster", "docs", "in_field", "overlap", "sample_titles"])?;
        for c in &self.clusters {
            w.write_record([
                self.researcher_id.clone(),
                c.cluster_id.to_string(),
                c.doc_count.to_string(),
                c.in_field.to_string(),
                format!("{:.3}", c.overlap),
                c.sample_titles.join(" | "),
            ])?;
        }
        crate::csvutil::finish(w)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("researcher {}\n", self.researcher_id);
        for c in &self.clusters {
            s.push_str(&format!(
                "  cluster {}: {}/{} in field ({:.1}%)\n",
                c.cluster_id,
                c.in_field,
                c.doc_count,
                100.0 * c.overlap
            ));
            for t in &c.sample_titles {
                s.push_str(&format!("    - {t}\n"));
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    /// Area ids compared, largest first.
    pub areas: Vec<usize>,
    pub matrix: AssociationMatrix,
    pub heatmap: ResidualTable,
    pub affinity: Network,
    /// Weakly connected groups of area node ids in the affinity network.
    pub components: Vec<BTreeSet<String>>,
    /// More than one component: the areas split into unconnected camps.
    pub disjoint: bool,
}

/// Author-activity affinity among the `top_k` largest of `areas` (or all of
/// them when fewer exist).
pub fn precision_from_areas(areas: &[TopicArea], corpus: &Corpus, top_k: usize) -> Result<PrecisionReport> {
    let k = top_k.min(areas.len());
    if k < 2 {
        return Err(Error::TooFewAreas {
            needed: 2,
            found: k,
        });
    }
    let mut sorted: Vec<&TopicArea> = areas.iter().collect();
    sorted.sort_by(|a, b| b.size().cmp(&a.size()).then(a.area_id.cmp(&b.area_id)));
    let chosen: Vec<TopicArea> = sorted[..k].iter().map(|a| (*a).clone()).collect();
    let matrix = association_matrix(&chosen, corpus, AssociationMode::AuthorActivity)?;
    let affinity = matrix.affinity_network(0.0);
    let components = affinity_components(&affinity);
    Ok(PrecisionReport {
        areas: chosen.iter().map(|a| a.area_id).collect(),
        heatmap: matrix.residual_table(),
        disjoint: components.len() > 1,
        components,
        affinity,
        matrix,
    })
}

/// Derives topic areas from the corpus's citation network, then runs
/// [`precision_from_areas`].
pub fn precision_report(
    corpus: &Corpus,
    top_k: usize,
    min_fraction: f64,
    opts: &DetectOptions,
) -> Result<PrecisionReport> {
    let cites = build_citation_graph(corpus);
    if cites.node_count() == 0 {
        return Err(Error::TooFewAreas { needed: 2, found: 0 });
    }
    let dc = double_cluster(&cites, opts)?;
    let ex = extract_topic_areas(&dc.docmap, cites.node_count(), min_fraction)?;
    precision_from_areas(&ex.areas, corpus, top_k)
}

impl PrecisionReport {
    pub fn summary(&self) -> String {
        let comps: Vec<String> = self
            .components
            .iter()
            .map(|c| format!("{{{}}}", c.iter().cloned().collect::<Vec<_>>().join(", ")))
            .collect();
        format!(
            "areas compared: {}\naffinity components: {}\ndisjoint: {}\n",
            self.areas.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "),
            comps.join(" "),
            if self.disjoint { "yes" } else { "no" }
        )
    }
}
