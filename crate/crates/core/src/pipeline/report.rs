use serde::{Deserialize, Serialize};

use super::artifacts::*;
use super::stages::{ClusterSummary, GraphStats, IngestSummary};
use super::Workspace;
use crate::collab::GroupCollabNetwork;
use crate::corpus::AuthorTable;
use crate::topics::AreaExtraction;

pub const NOT_COMPUTED: &str = "not computed";

/// Corpus and network line items. Only counts are stored; every proportion
/// and average is derived when rendering.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub publications: Option<u64>,
    pub authors: Option<u64>,
    pub one_time_authors: Option<u64>,
    /// Counts on raw name keys, shown when identities were disambiguated.
    pub name_key_authors: Option<u64>,
    pub name_key_one_time: Option<u64>,
    pub documents: Option<u64>,
    pub doc_clusters: Option<u64>,
    pub clusters_of_clusters: Option<u64>,
    pub topic_areas: Option<u64>,
    pub area_documents: Option<u64>,
    pub authors_after_filter: Option<u64>,
    pub coauthor_clusters: Option<u64>,
    pub giant_nodes: Option<u64>,
    pub clusters_in_giant: Option<u64>,
    /// Sizes of the clusters in the giant component.
    pub giant_cluster_sizes: Option<Vec<u64>>,
    pub linked_clusters: Option<u64>,
}

/// `1234567` -> `1,234,567`.
pub fn format_count(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// One-decimal percentage of `part` in `whole`; `None` for an empty whole.
pub fn format_percent(part: u64, whole: u64) -> Option<String> {
    (whole > 0).then(|| format!("{:.1}%", 100.0 * part as f64 / whole as f64))
}

fn with_share(part: Option<u64>, whole: Option<u64>) -> Option<String> {
    let p = part?;
    match whole.and_then(|w| format_percent(p, w)) {
        Some(pct) => Some(format!("{} ({pct})", format_count(p))),
        None => Some(format_count(p)),
    }
}

fn median(sorted: &[u64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

fn trim_decimal(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.1}")
    }
}

impl SummaryReport {
    pub fn from_workspace(ws: &Workspace) -> SummaryReport {
        let mut r = SummaryReport::default();
        let some = |n: usize| Some(n as u64);
        if let Ok(i) = ws.read_json::<IngestSummary>(INGEST) {
            r.publications = some(i.publications);
            if i.disambiguated {
                r.name_key_authors = some(i.name_key_authors);
                r.name_key_one_time = some(i.name_key_one_time);
            }
        }
        if let Ok(t) = ws.read_json::<AuthorTable>(AUTHORS) {
            r.authors = some(t.total_authors);
            r.one_time_authors = some(t.one_time_authors);
            r.authors_after_filter = some(t.len());
        }
        if let Ok(g) = ws.read_json::<GraphStats>(GRAPH_STATS) {
            r.documents = some(g.citation_nodes);
            r.giant_nodes = g.coauthor_components.map(|c| c.giant_size as u64).or(Some(0));
        }
        if let Ok(c) = ws.read_json::<ClusterSummary>(CLUSTERS) {
            r.coauthor_clusters = some(c.coauthor_clusters);
            r.doc_clusters = c.doc_clusters.map(|n| n as u64);
            r.clusters_of_clusters = c.clusters_of_clusters.map(|n| n as u64);
        }
        if let Ok(a) = ws.read_json::<AreaExtraction>(AREA_SUMMARY) {
            r.topic_areas = some(a.areas.len());
            r.area_documents = some(a.covered_docs);
        }
        if let Ok(bytes) = ws.read_bytes(GIANT_PARTITION) {
            if let Ok(p) = crate::community::Partition::from_csv(&bytes[..]) {
                r.clusters_in_giant = some(p.cluster_count());
                r.giant_cluster_sizes = Some(p.clusters().values().map(|m| m.len() as u64).collect());
            }
        }
        if let Ok(c) = ws.read_json::<GroupCollabNetwork>(COLLAB) {
            r.linked_clusters = some(c.linked_clusters);
        }
        r
    }

    pub fn mean_giant_cluster_size(&self) -> Option<f64> {
        let sizes = self.giant_cluster_sizes.as_ref().filter(|s| !s.is_empty())?;
        Some(sizes.iter().sum::<u64>() as f64 / sizes.len() as f64)
    }

    pub fn median_giant_cluster_size(&self) -> Option<f64> {
        let mut sizes = self.giant_cluster_sizes.clone().filter(|s| !s.is_empty())?;
        sizes.sort_unstable();
        Some(median(&sizes))
    }

    /// `(label, value)` pairs; `None` values are items not computed.
    pub fn lines(&self) -> Vec<(&'static str, Option<String>)> {
        let count = |v: Option<u64>| v.map(format_count);
        let mut out = vec![
            ("publications", count(self.publications)),
            ("authors", count(self.authors)),
            ("# of 1-time authors", count(self.one_time_authors)),
        ];
        if self.name_key_authors.is_some() {
            out.push(("authors (name keys)", count(self.name_key_authors)));
            out.push(("# of 1-time authors (name keys)", count(self.name_key_one_time)));
        }
        out.extend([
            ("documents excl. singletons", count(self.documents)),
            ("document clusters", count(self.doc_clusters)),
            ("clusters of clusters", count(self.clusters_of_clusters)),
            ("topic areas", count(self.topic_areas)),
            ("documents in topic areas (proportion)", with_share(self.area_documents, self.documents)),
            ("authors after filtering", count(self.authors_after_filter)),
            ("co-author clusters", count(self.coauthor_clusters)),
            ("# of nodes in giant (proportion)", with_share(self.giant_nodes, self.authors_after_filter)),
            ("# of clusters in giant (proportion)", with_share(self.clusters_in_giant, self.coauthor_clusters)),
            (
                "average cluster size in giant (median)",
                self.mean_giant_cluster_size()
                    .zip(self.median_giant_cluster_size())
                    .map(|(m, md)| format!("{m:.1} ({})", trim_decimal(md))),
            ),
            ("linked clusters (proportion)", with_share(self.linked_clusters, self.clusters_in_giant)),
        ]);
        out
    }

    pub fn render(&self) -> String {
        let lines = self.lines();
        let width = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (label, value) in lines {
            let v = value.unwrap_or_else(|| NOT_COMPUTED.to_string());
            s.push_str(&format!("{label:<width$}  {v}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_get_separators() {
        assert_eq!(format_count(0), "0");
        assert_eq!(format_count(999), "999");
        assert_eq!(format_count(1000), "1,000");
        assert_eq!(format_count(131285), "131,285");
        assert_eq!(format_count(1234567), "1,234,567");
    }

    #[test]
    fn missing_items_are_marked() {
        let r = SummaryReport {
            publications: Some(14599),
            ..Default::default()
        };
        let text = r.render();
        assert!(text.contains("14,599"));
        assert!(text.contains("co-author clusters"));
        assert!(text.lines().filter(|l| l.ends_with(NOT_COMPUTED)).count() >= 8);
    }

    #[test]
    fn median_of_even_count() {
        let r = SummaryReport {
            giant_cluster_sizes: Some(vec![4, 1, 3, 10]),
            ..Default::default()
        };
        assert_eq!(r.median_giant_cluster_size(), Some(3.5));
        assert_eq!(r.mean_giant_cluster_size(), Some(4.5));
    }
}
