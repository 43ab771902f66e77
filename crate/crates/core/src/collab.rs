//! Group collaboration network over co-author clusters, with geographic and
//! topical overlays and geographic collaboration propensities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::community::{cluster_node_id, Partition};
use crate::corpus::{AuthorTable, BiblioRecord, Corpus};
use crate::country::{Continent, CountryTable};
use crate::error::{Error, Result};
use crate::graph::{AttrValue, Attrs, Network, NetworkBuilder};
use crate::roles::{NodeRoleProfile, Role};
use crate::topics::{area_node_id, TopicArea};

/// Clustered co-author network together with node roles and the author
/// publication lists the overlays draw on.
#[derive(Clone, Copy)]
pub struct GroupContext<'a> {
    pub net: &'a Network,
    pub part: &'a Partition,
    pub roles: &'a BTreeMap<String, Role>,
    pub table: &'a AuthorTable,
}

pub fn role_map(profiles: &[NodeRoleProfile]) -> BTreeMap<String, Role> {
    profiles.iter().map(|p| (p.node.clone(), p.role)).collect()
}

impl GroupContext<'_> {
    /// Cluster -> members, restricted to nodes of the network.
    pub fn members(&self) -> BTreeMap<usize, Vec<String>> {
        let mut out: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for id in self.net.nodes() {
            if let Some(c) = self.part.cluster_of(id) {
                out.entry(c).or_default().push(id.clone());
            }
        }
        out
    }

    fn is_hub(&self, node: &str) -> bool {
        self.roles.get(node).is_some_and(|r| r.is_hub())
    }

    fn records_of(&self, node: &str) -> Option<&BTreeSet<String>> {
        self.table.entries.get(node).map(|e| &e.record_ids)
    }

    fn cluster_count(&self) -> usize {
        self.part.cluster_count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Collaboration,
    Transfer,
}

/// What the classifier sees about one pair of clusters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkEvidence {
    /// Distinct records co-authored across the pair.
    pub joint_pubs: usize,
    /// Distinct cross-cluster co-author pairs.
    pub distinct_pairs: usize,
    /// A hub of each cluster co-authored a record together.
    pub hub_hub: bool,
}

pub trait LinkClassifier {
    fn classify(&self, evidence: &LinkEvidence) -> LinkKind;
}

/// Collaboration when at least `min_pairs` distinct author pairs share at
/// least `min_joint_pubs` records, or when hubs of both clusters co-publish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DefaultLinkClassifier {
    pub min_pairs: usize,
    pub min_joint_pubs: usize,
}

impl Default for DefaultLinkClassifier {
    fn default() -> Self {
        DefaultLinkClassifier {
            min_pairs: 2,
            min_joint_pubs: 2,
        }
    }
}

impl LinkClassifier for DefaultLinkClassifier {
    fn classify(&self, e: &LinkEvidence) -> LinkKind {
        if (e.distinct_pairs >= self.min_pairs && e.joint_pubs >= self.min_joint_pubs) || e.hub_hub {
            LinkKind::Collaboration
        } else {
            LinkKind::Transfer
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterClusterLink {
    /// Smaller cluster id first.
    pub clusters: (usize, usize),
    pub kind: LinkKind,
    pub joint_pubs: usize,
    pub distinct_pairs: usize,
    pub hub_hub: bool,
}

#[derive(Default)]
struct PairAccumulator {
    pairs: usize,
    records: BTreeSet<String>,
    hub_hub: bool,
}

/// Every cluster pair joined by at least one co-author edge, classified.
pub fn intercluster_links(ctx: &GroupContext<'_>, classifier: &dyn LinkClassifier) -> Result<Vec<InterClusterLink>> {
    let labels = ctx.part.labels_for(ctx.net)?;
    let nodes = ctx.net.nodes();
    let mut acc: BTreeMap<(usize, usize), PairAccumulator> = BTreeMap::new();
    for (u, v, _) in ctx.net.edge_indices() {
        let (a, b) = (labels[u], labels[v]);
        if a == b {
            continue;
        }
        let e = acc.entry((a.min(b), a.max(b))).or_default();
        e.pairs += 1;
        if let (Some(ru), Some(rv)) = (ctx.records_of(&nodes[u]), ctx.records_of(&nodes[v])) {
            e.records.extend(ru.intersection(rv).cloned());
        }
        e.hub_hub |= ctx.is_hub(&nodes[u]) && ctx.is_hub(&nodes[v]);
    }
    Ok(acc
        .into_iter()
        .map(|(clusters, e)| {
            let evidence = LinkEvidence {
                joint_pubs: e.records.len(),
                distinct_pairs: e.pairs,
                hub_hub: e.hub_hub,
            };
            InterClusterLink {
                clusters,
                kind: classifier.classify(&evidence),
                joint_pubs: evidence.joint_pubs,
                distinct_pairs: evidence.distinct_pairs,
                hub_hub: evidence.hub_hub,
            }
        })
        .collect())
}

/// Classification of a single cluster pair.
pub fn classify_intercluster_link(
    ctx: &GroupContext<'_>,
    pair: (usize, usize),
    classifier: &dyn LinkClassifier,
) -> Result<InterClusterLink> {
    if pair.0 == pair.1 {
        return Err(Error::invalid("cluster pair must name two distinct clusters"));
    }
    let key = (pair.0.min(pair.1), pair.0.max(pair.1));
    intercluster_links(ctx, classifier)?
        .into_iter()
        .find(|l| l.clusters == key)
        .ok_or_else(|| Error::invalid(format!("clusters {} and {} share no co-author edge", key.0, key.1)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupCollabNetwork {
    /// Nodes are clusters (see [`cluster_node_id`]) with attributes `size`
    /// and `hubs`; edges are collaboration links weighted by the number of
    /// cross-cluster co-author pairs.
    pub network: Network,
    pub links: Vec<InterClusterLink>,
    pub cluster_count: usize,
    pub linked_clusters: usize,
}

impl GroupCollabNetwork {
    pub fn linked_proportion(&self) -> f64 {
        if self.cluster_count == 0 {
            0.0
        } else {
            self.linked_clusters as f64 / self.cluster_count as f64
        }
    }

    pub fn node_id(&self, cluster: usize) -> String {
        cluster_node_id(cluster, self.cluster_count)
    }
}

/// Group collaboration network; normally built on the giant component.
pub fn build_group_collab_network(
    ctx: &GroupContext<'_>,
    classifier: &dyn LinkClassifier,
) -> Result<GroupCollabNetwork> {
    let links = intercluster_links(ctx, classifier)?;
    let members = ctx.members();
    let k = ctx.cluster_count();
    let mut b = NetworkBuilder::new(false);
    for (&c, m) in &members {
        let id = cluster_node_id(c, k);
        b.set_attr(&id, "size", m.len());
        b.set_attr(&id, "hubs", m.iter().filter(|n| ctx.is_hub(n)).count());
    }
    let mut linked = BTreeSet::new();
    for l in links.iter().filter(|l| l.kind == LinkKind::Collaboration) {
        b.add_edge(
            &cluster_node_id(l.clusters.0, k),
            &cluster_node_id(l.clusters.1, k),
            l.distinct_pairs as f64,
        );
        linked.insert(l.clusters.0);
        linked.insert(l.clusters.1);
    }
    Ok(GroupCollabNetwork {
        network: b.build(),
        links,
        cluster_count: members.len(),
        linked_clusters: linked.len(),
    })
}

/// Continent-level affiliation of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GeoLabel {
    Single(Continent),
    /// Two continents, in alphabetical order.
    Mixed(Continent, Continent),
}

impl GeoLabel {
    pub fn mixed(a: Continent, b: Continent) -> GeoLabel {
        if a == b {
            GeoLabel::Single(a)
        } else {
            GeoLabel::Mixed(a.min(b), a.max(b))
        }
    }

    /// `AS`, `EU/NA`, ...
    pub fn abbrev(self) -> String {
        match self {
            GeoLabel::Single(c) => c.abbrev().to_string(),
            GeoLabel::Mixed(a, b) => format!("{}/{}", a.abbrev(), b.abbrev()),
        }
    }

    /// Fill colour for overlay rendering.
    pub fn color(self) -> &'static str {
        use Continent::*;
        match self {
            GeoLabel::Single(Asia) => "lightyellow",
            GeoLabel::Single(Europe) => "blue",
            GeoLabel::Single(NorthAmerica) => "red",
            GeoLabel::Single(Other) => "white",
            GeoLabel::Mixed(Asia, Europe) => "lightgreen",
            GeoLabel::Mixed(Europe, NorthAmerica) => "violet",
            GeoLabel::Mixed(Asia, NorthAmerica) => "orange",
            GeoLabel::Mixed(..) => "gray",
        }
    }

    pub fn parse(s: &str) -> Option<GeoLabel> {
        match s.split_once('/') {
            Some((a, b)) => Some(GeoLabel::mixed(Continent::parse(a)?, Continent::parse(b)?)),
            None => Continent::parse(s).map(GeoLabel::Single),
        }
    }
}

impl fmt::Display for GeoLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeoLabel::Single(c) => write!(f, "{c}"),
            GeoLabel::Mixed(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

/// Occurrences of each country code over the given records' addresses.
pub fn country_counts<'r>(records: impl IntoIterator<Item = &'r BiblioRecord>) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in records {
        for c in &r.addresses {
            *out.entry(c.clone()).or_insert(0) += 1;
        }
    }
    out
}

/// Most listed country decides the continent; a runner-up listed at least
/// half as often on another continent makes the label mixed. Equal counts
/// rank alphabetically by code; no data gives `Other`.
pub fn geographic_affiliation(counts: &BTreeMap<String, usize>, countries: &CountryTable) -> GeoLabel {
    let mut ranked: Vec<(&String, usize)> = counts.iter().filter(|(_, &n)| n > 0).map(|(c, &n)| (c, n)).collect();
    ranked.sort_by_key(|r| std::cmp::Reverse(r.1));
    let continent = |code: &str| countries.continent_of(code).unwrap_or(Continent::Other);
    match ranked.as_slice() {
        [] => GeoLabel::Single(Continent::Other),
        [(top, _)] => GeoLabel::Single(continent(top)),
        [(top, n1), (second, n2), ..] => {
            let (c1, c2) = (continent(top), continent(second));
            if 2 * n2 >= *n1 && c1 != c2 {
                GeoLabel::mixed(c1, c2)
            } else {
                GeoLabel::Single(c1)
            }
        }
    }
}

/// Records with at least one author among `members`.
pub fn cluster_publications<'c>(members: &[String], table: &AuthorTable, corpus: &'c Corpus) -> Vec<&'c BiblioRecord> {
    let ids: BTreeSet<&String> = members
        .iter()
        .filter_map(|m| table.entries.get(m.as_str()))
        .flat_map(|e| e.record_ids.iter())
        .collect();
    ids.into_iter().filter_map(|id| corpus.get(id)).collect()
}

/// Geographic label for every cluster of the context.
pub fn geographic_labels(ctx: &GroupContext<'_>, corpus: &Corpus, countries: &CountryTable) -> BTreeMap<usize, GeoLabel> {
    ctx.members()
        .into_iter()
        .map(|(c, m)| {
            let counts = country_counts(cluster_publications(&m, ctx.table, corpus));
            (c, geographic_affiliation(&counts, countries))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivityProfile {
    /// Area id -> share of the group's publications in that area.
    pub ratios: BTreeMap<usize, f64>,
    pub publication_count: usize,
    /// Whether the hub authors' publications were used.
    pub from_hubs: bool,
    /// No publications to measure.
    pub empty: bool,
}

/// Share of a group's publications in each area, using its hubs'
/// publications or, without hubs, those of all members.
pub fn topical_activity(
    members: &[String],
    hubs: &[String],
    table: &AuthorTable,
    areas: &[TopicArea],
) -> ActivityProfile {
    let from_hubs = !hubs.is_empty();
    let source = if from_hubs { hubs } else { members };
    let pubs: BTreeSet<&String> = source
        .iter()
        .filter_map(|m| table.entries.get(m.as_str()))
        .flat_map(|e| e.record_ids.iter())
        .collect();
    let n = pubs.len();
    let ratios = areas
        .iter()
        .map(|a| {
            let hit = pubs.iter().filter(|p| a.contains(p)).count();
            (a.area_id, if n == 0 { 0.0 } else { hit as f64 / n as f64 })
        })
        .collect();
    ActivityProfile {
        ratios,
        publication_count: n,
        from_hubs,
        empty: n == 0,
    }
}

pub fn topical_activities(ctx: &GroupContext<'_>, areas: &[TopicArea]) -> BTreeMap<usize, ActivityProfile> {
    ctx.members()
        .into_iter()
        .map(|(c, m)| {
            let hubs: Vec<String> = m.iter().filter(|n| ctx.is_hub(n)).cloned().collect();
            (c, topical_activity(&m, &hubs, ctx.table, areas))
        })
        .collect()
}

/// Grey level for an activity share: white at 0, black above 0.9.
pub fn activity_gray(share: f64) -> String {
    if share > 0.9 {
        return "#000000".into();
    }
    let level = (255.0 * (1.0 - share.clamp(0.0, 0.9) / 0.9)).round() as u8;
    format!("#{level:02X}{level:02X}{level:02X}")
}

/// Collaboration network with `geo`, `geo_color`, and per-area `activity_aN` /
/// `gray_aN` node attributes.
pub fn overlay_network(
    collab: &GroupCollabNetwork,
    geo: &BTreeMap<usize, GeoLabel>,
    activity: &BTreeMap<usize, ActivityProfile>,
) -> Network {
    let mut extra: BTreeMap<String, Attrs> = BTreeMap::new();
    for (&c, g) in geo {
        let a = extra.entry(collab.node_id(c)).or_default();
        a.insert("geo".into(), g.abbrev().into());
        a.insert("geo_color".into(), g.color().into());
    }
    for (&c, prof) in activity {
        let a = extra.entry(collab.node_id(c)).or_default();
        for (&area, &share) in &prof.ratios {
            a.insert(format!("activity_{}", area_node_id(area)), AttrValue::Float(share));
            a.insert(format!("gray_{}", area_node_id(area)), activity_gray(share).into());
        }
    }
    collab.network.with_node_attrs(&extra)
}

/// Overlay for a single area: `activity` and `fillcolor` (grayscale), or the
/// geographic `fillcolor` when `area` is `None`.
pub fn single_overlay(
    collab: &GroupCollabNetwork,
    geo: &BTreeMap<usize, GeoLabel>,
    activity: &BTreeMap<usize, ActivityProfile>,
    area: Option<usize>,
) -> Network {
    let mut extra: BTreeMap<String, Attrs> = BTreeMap::new();
    match area {
        None => {
            for (&c, g) in geo {
                let a = extra.entry(collab.node_id(c)).or_default();
                a.insert("geo".into(), g.abbrev().into());
                a.insert("fillcolor".into(), g.color().into());
            }
        }
        Some(area) => {
            for (&c, prof) in activity {
                let share = prof.ratios.get(&area).copied().unwrap_or(0.0);
                let a = extra.entry(collab.node_id(c)).or_default();
                a.insert("activity".into(), AttrValue::Float(share));
                a.insert("fillcolor".into(), activity_gray(share).into());
            }
        }
    }
    collab.network.with_node_attrs(&extra)
}

/// Deviation of observed collaboration shares between affiliations from a
/// null model proportional to group counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropensityTable {
    pub affiliations: Vec<GeoLabel>,
    pub group_counts: Vec<usize>,
    /// Mean number of collaboration links per group of each affiliation.
    pub average_degree: Vec<Option<f64>>,
    /// Link endpoints from row affiliation to column affiliation.
    pub links: Vec<Vec<usize>>,
    /// Percent deviation; `None` where undefined.
    pub deviation_pct: Vec<Vec<Option<f64>>>,
}

pub const PROPENSITY_NOTE: &str =
    "# expected share for the own affiliation excludes the source group itself";

fn standard_affiliations() -> Vec<GeoLabel> {
    use Continent::*;
    vec![
        GeoLabel::Single(Asia),
        GeoLabel::Single(Europe),
        GeoLabel::Single(NorthAmerica),
        GeoLabel::Mixed(Asia, Europe),
        GeoLabel::Mixed(Asia, NorthAmerica),
        GeoLabel::Mixed(Europe, NorthAmerica),
    ]
}

/// Propensity table over the nodes of `net` (unweighted links). Every node
/// needs a label in `labels`.
pub fn geographic_propensity(net: &Network, labels: &BTreeMap<String, GeoLabel>) -> Result<PropensityTable> {
    let mut affiliations = standard_affiliations();
    for l in labels.values() {
        if !affiliations.contains(l) {
            affiliations.push(*l);
        }
    }
    let pos: BTreeMap<GeoLabel, usize> = affiliations.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let node_aff: Vec<usize> = net
        .nodes()
        .iter()
        .map(|n| {
            labels
                .get(n)
                .map(|l| pos[l])
                .ok_or_else(|| Error::invalid(format!("node '{n}' has no geographic label")))
        })
        .collect::<Result<_>>()?;
    let k = affiliations.len();
    let mut group_counts = vec![0usize; k];
    for &a in &node_aff {
        group_counts[a] += 1;
    }
    let mut links = vec![vec![0usize; k]; k];
    for (u, v, _) in net.edge_indices() {
        links[node_aff[u]][node_aff[v]] += 1;
        if !net.is_directed() {
            links[node_aff[v]][node_aff[u]] += 1;
        }
    }
    let n = net.node_count();
    let mut deviation_pct = vec![vec![None; k]; k];
    let mut average_degree = vec![None; k];
    for s in 0..k {
        let out: usize = links[s].iter().sum();
        if group_counts[s] > 0 {
            average_degree[s] = Some(out as f64 / group_counts[s] as f64);
        }
        if out == 0 || n < 2 {
            continue;
        }
        for t in 0..k {
            let pool = group_counts[t] - usize::from(s == t);
            if pool == 0 {
                continue;
            }
            let expected = pool as f64 / (n - 1) as f64;
            let observed = links[s][t] as f64 / out as f64;
            deviation_pct[s][t] = Some((observed - expected) / expected * 100.0);
        }
    }
    Ok(PropensityTable {
        affiliations,
        group_counts,
        average_degree,
        links,
        deviation_pct,
    })
}

impl PropensityTable {
    /// Rows `AS (0.6)`, cells `414%` or `N.A.`, preceded by a note line.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = crate::csvutil::writer();
        let mut header = vec!["affiliation (average degree)".to_string()];
        header.extend(self.affiliations.iter().map(|a| a.abbrev()));
        w.write_record(&header)?;
        for (s, a) in self.affiliations.iter().enumerate() {
            let deg = self.average_degree[s].map_or("0".to_string(), format_degree);
            let mut row = vec![format!("{} ({deg})", a.abbrev())];
            row.extend(self.deviation_pct[s].iter().map(|c| match c {
                Some(v) => format!("{}%", v.round() as i64),
                None => crate::affinity::NOT_AVAILABLE.to_string(),
            }));
            w.write_record(&row)?;
        }
        Ok(format!("{PROPENSITY_NOTE}\n{}", crate::csvutil::finish(w)?))
    }
}

fn format_degree(d: f64) -> String {
    if d == 0.0 {
        "0".into()
    } else {
        format!("{d:.1}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_author_table, normalize_corpus, AuthorName, NormalizeOptions};
    use crate::graph::{build_coauthor_graph, CoauthorOptions};

    fn counts(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
        pairs.iter().map(|(c, n)| (c.to_string(), *n)).collect()
    }

    #[test]
    fn affiliation_examples() {
        let t = CountryTable::bundled();
        use Continent::*;
        assert_eq!(
            geographic_affiliation(&counts(&[("DE", 10), ("US", 6), ("FR", 4)]), t),
            GeoLabel::Mixed(Europe, NorthAmerica)
        );
        assert_eq!(
            geographic_affiliation(&counts(&[("US", 10), ("CA", 6)]), t),
            GeoLabel::Single(NorthAmerica)
        );
        assert_eq!(geographic_affiliation(&counts(&[("CN", 10), ("JP", 3)]), t), GeoLabel::Single(Asia));
        assert_eq!(geographic_affiliation(&counts(&[]), t), GeoLabel::Single(Other));
        assert_eq!(GeoLabel::Mixed(Europe, NorthAmerica).abbrev(), "EU/NA");
        assert_eq!(GeoLabel::parse("NA/EU"), Some(GeoLabel::Mixed(Europe, NorthAmerica)));
    }

    #[test]
    fn grayscale() {
        assert_eq!(activity_gray(0.0), "#FFFFFF");
        assert_eq!(activity_gray(0.95), "#000000");
        assert_eq!(activity_gray(0.9), "#000000");
        assert_eq!(activity_gray(0.45), "#808080");
    }

    fn fixture() -> (Corpus, AuthorTable, Network) {
        let mk = |id: &str, names: &[&str]| {
            BiblioRecord::new(id, 2000, names.iter().map(|n| AuthorName::new(n, "A")).collect())
        };
        let recs = vec![
            mk("r1", &["A1", "A2"]),
            mk("r2", &["A1", "A2"]),
            mk("r3", &["B1", "B2"]),
            mk("r4", &["B1", "B2"]),
            mk("r5", &["A1", "B1"]),
            mk("r6", &["C1", "C2"]),
            mk("r7", &["C1", "C2"]),
            mk("r8", &["A2", "C2", "A1"]),
            mk("r9", &["A2", "C1"]),
        ];
        let corpus = normalize_corpus(recs, &NormalizeOptions { year_range: None }).corpus;
        let table = build_author_table(&corpus, 1);
        let net = build_coauthor_graph(&corpus, &table, &CoauthorOptions::default());
        (corpus, table, net)
    }

    fn part_abc(net: &Network) -> Partition {
        Partition::new(
            net.nodes()
                .iter()
                .map(|n| {
                    let c = match &n[..1] {
                        "A" => 0,
                        "B" => 1,
                        _ => 2,
                    };
                    (n.clone(), c)
                })
                .collect(),
        )
    }

    #[test]
    fn link_classification() {
        let (_, table, net) = fixture();
        let part = part_abc(&net);
        let none = BTreeMap::new();
        let ctx = GroupContext {
            net: &net,
            part: &part,
            roles: &none,
            table: &table,
        };
        let c = DefaultLinkClassifier::default();
        // A-B: one pair, one paper
        let ab = classify_intercluster_link(&ctx, (0, 1), &c).unwrap();
        assert_eq!((ab.distinct_pairs, ab.joint_pubs, ab.kind), (1, 1, LinkKind::Transfer));
        // A-C: pairs A1-C2, A2-C2, A2-C1 over r8, r9
        let ac = classify_intercluster_link(&ctx, (2, 0), &c).unwrap();
        assert_eq!((ac.distinct_pairs, ac.joint_pubs, ac.kind), (3, 2, LinkKind::Collaboration));
        assert!(classify_intercluster_link(&ctx, (1, 2), &c).is_err());

        let hubs: BTreeMap<String, Role> = [("A1, A", Role::ProvincialHub), ("B1, A", Role::ConnectorHub)]
            .map(|(n, r)| (n.to_string(), r))
            .into();
        let ctx = GroupContext { roles: &hubs, ..ctx };
        assert_eq!(classify_intercluster_link(&ctx, (0, 1), &c).unwrap().kind, LinkKind::Collaboration);

        let g = build_group_collab_network(&ctx, &c).unwrap();
        assert_eq!(g.network.edge_count(), 2);
        assert_eq!(g.linked_clusters, 3);
        assert_eq!(g.network.weight("c0", "c2"), Some(3.0));
    }

    #[test]
    fn activity_uses_hubs_then_members() {
        let (_, table, _) = fixture();
        let area = TopicArea {
            area_id: 1,
            doc_ids: ["r1", "r2"].map(String::from).into(),
            label: None,
        };
        let members = vec!["A1, A".to_string(), "A2, A".to_string()];
        let p = topical_activity(&members, &[], &table, std::slice::from_ref(&area));
        assert!(!p.from_hubs);
        // A1: r1 r2 r5 r8, A2: r1 r2 r8 r9
        assert!((p.ratios[&1] - 2.0 / 5.0).abs() < 1e-12);
        let p = topical_activity(&members, &members[..1], &table, &[area]);
        assert!(p.from_hubs);
        assert_eq!(p.ratios[&1], 0.5);
    }

    #[test]
    fn propensity_own_affiliation_closed_form() {
        // two affiliations, n groups each, all links inside affiliations
        let n = 4;
        let mut b = NetworkBuilder::new(false);
        let mut labels = BTreeMap::new();
        for g in 0..2 {
            let cont = if g == 0 { Continent::Asia } else { Continent::Europe };
            for i in 0..n {
                labels.insert(format!("g{g}{i}"), GeoLabel::Single(cont));
                for j in i + 1..n {
                    b.add_edge(&format!("g{g}{i}"), &format!("g{g}{j}"), 1.0);
                }
            }
        }
        let t = geographic_propensity(&b.build(), &labels).unwrap();
        let expected = (1.0 / ((n as f64 - 1.0) / (2.0 * n as f64 - 1.0)) - 1.0) * 100.0;
        assert!((t.deviation_pct[0][0].unwrap() - expected).abs() < 1e-9);
        assert_eq!(t.deviation_pct[0][1], Some(-100.0));
        assert_eq!(t.deviation_pct[0][3], None);
        assert_eq!(t.average_degree[0], Some(3.0));
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with(PROPENSITY_NOTE));
        assert!(csv.contains("\nAS (3.0),133%,-100%,N.A.,N.A.,N.A.,N.A.\n"));
        assert!(csv.contains("\nAS/EU (0),N.A."));
    }
}
