use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::artifacts::*;
use super::{Config, Stage, SummaryReport, Workspace};
use crate::affinity::{association_matrix, AssociationMatrix, AssociationMode};
use crate::collab::{
    build_group_collab_network, geographic_labels, geographic_propensity, overlay_network, role_map,
    topical_activities, activity_gray, GroupContext,
};
use crate::community::{detect_with, double_cluster, CodelengthReport, DoubleClustering, Partition};
use crate::corpus::{
    apply_subject_filter, build_author_table, last_name_commonality, normalize_corpus, parse_wos_flatfile,
    AuthorTable, BiblioRecord, Corpus, DisambiguationMap, NormalizeOptions,
};
use crate::country::CountryTable;
use crate::error::{Error, Result};
use crate::graph::{
    build_citation_graph, build_coauthor_graph, component_stats, CoauthorOptions, ComponentStats, Network,
};
use crate::roles::{distortion_report, node_commonality, profiles_to_csv, role_profiles, DistortionOptions, NodeRoleProfile};
use crate::topics::{
    area_label_metadata, areas_from_csv, areas_to_csv, extract_topic_areas, inter_area_citation_network,
    rir_series, rir_to_csv, AreaExtraction, TopicArea,
};

type Files = Vec<(&'static str, Vec<u8>)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub input: String,
    pub records_read: usize,
    pub rejected: Vec<String>,
    pub warnings: Vec<String>,
    pub subject_filtered: usize,
    pub publications: usize,
    /// Author counts on raw name keys, before any disambiguation.
    pub name_key_authors: usize,
    pub name_key_one_time: usize,
    pub disambiguated: bool,
    pub year_span: Option<(i32, i32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub coauthor_nodes: usize,
    pub coauthor_edges: usize,
    pub coauthor_components: Option<ComponentStats>,
    pub citation_nodes: usize,
    pub citation_edges: usize,
    pub citation_components: Option<ComponentStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub coauthor_clusters: usize,
    pub coauthor_codelength: Option<CodelengthReport>,
    pub documents: usize,
    pub doc_clusters: Option<usize>,
    pub clusters_of_clusters: Option<usize>,
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub(super) fn execute(stage: Stage, ws: &Workspace, cfg: &Config) -> Result<Files> {
    match stage {
        Stage::Ingest => ingest(cfg),
        Stage::Authors => authors(ws, cfg),
        Stage::Graph => graph(ws, cfg),
        Stage::Cluster => cluster(ws, cfg),
        Stage::Roles => roles(ws, cfg),
        Stage::Topics => topics(ws, cfg),
        Stage::Affinity => affinity(ws, cfg),
        Stage::Collab => collab(ws, cfg),
        Stage::Report => report(ws),
    }
}

pub(super) fn load_corpus(ws: &Workspace) -> Result<Corpus> {
    Corpus::from_canonical(&ws.read_text(CORPUS)?)
}

pub(super) fn load_areas(ws: &Workspace) -> Result<Vec<TopicArea>> {
    areas_from_csv(&ws.read_bytes(AREAS)?[..])
}

fn load_partition(ws: &Workspace, artifact: &str) -> Result<Partition> {
    Partition::from_csv(&ws.read_bytes(artifact)?[..])
}

/// Records from a flat-file export or a canonical `.jsonl` file, plus the
/// rejected flat-file blocks.
pub fn read_records(path: &Path) -> Result<(Vec<BiblioRecord>, Vec<String>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "jsonl") {
        let text = String::from_utf8(bytes).map_err(|_| Error::invalid("canonical corpus is not UTF-8"))?;
        let mut recs = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            recs.push(serde_json::from_str(line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        return Ok((recs, Vec::new()));
    }
    let parsed = parse_wos_flatfile(&bytes[..])?;
    let rejected = parsed
        .rejected
        .iter()
        .map(|r| format!("line {}: {}", r.line, r.reason))
        .collect();
    Ok((parsed.records, rejected))
}

fn ingest(cfg: &Config) -> Result<Files> {
    let c = &cfg.corpus;
    let input = c.input.as_deref().ok_or_else(|| Error::Config("corpus.input is not set".into()))?;
    let (records, rejected) = read_records(Path::new(input))?;
    let records_read = records.len();
    let opts = NormalizeOptions {
        year_range: c.restrict_years.then_some((c.first_year, c.last_year)),
    };
    let norm = normalize_corpus(records, &opts);
    let mut corpus = norm.corpus;
    let mut subject_filtered = 0;
    if !c.subject_filter.is_empty() {
        let allowed: BTreeSet<String> = c.subject_filter.iter().cloned().collect();
        let f = apply_subject_filter(&corpus, &allowed)?;
        subject_filtered = f.removed;
        corpus = f.corpus;
    }
    let raw = build_author_table(&corpus, 1);
    if let Some(p) = &c.disambiguation {
        let file = fs::File::open(p).map_err(|e| Error::io(p, e))?;
        corpus = corpus.with_disambiguation(&DisambiguationMap::from_reader(file)?);
    }
    let summary = IngestSummary {
        input: input.to_string(),
        records_read,
        rejected,
        warnings: norm.warnings.iter().map(|w| w.to_string()).collect(),
        subject_filtered,
        publications: corpus.len(),
        name_key_authors: raw.total_authors,
        name_key_one_time: raw.one_time_authors,
        disambiguated: c.disambiguation.is_some(),
        year_span: corpus.year_span(),
    };
    Ok(vec![(CORPUS, corpus.to_canonical().into_bytes()), (INGEST, json(&summary)?)])
}

fn authors(ws: &Workspace, cfg: &Config) -> Result<Files> {
    let corpus = load_corpus(ws)?;
    let table = build_author_table(&corpus, cfg.authors.min_pubs);
    let mut w = crate::csvutil::writer();
    w.write_record(["last_name", "identities"])?;
    for (name, n) in last_name_commonality(&table) {
        w.write_record([name, n.to_string()])?;
    }
    let common = crate::csvutil::finish(w)?;
    Ok(vec![(AUTHORS, json(&table)?), (COMMONALITY, common.into_bytes())])
}

fn graph(ws: &Workspace, cfg: &Config) -> Result<Files> {
    let corpus = load_corpus(ws)?;
    let table: AuthorTable = ws.read_json(AUTHORS)?;
    let co = build_coauthor_graph(
        &corpus,
        &table,
        &CoauthorOptions {
            max_authors: cfg.graph.max_authors,
        },
    );
    let cit = build_citation_graph(&corpus);
    let stats = GraphStats {
        coauthor_nodes: co.node_count(),
        coauthor_edges: co.edge_count(),
        coauthor_components: component_stats(&co).ok(),
        citation_nodes: cit.node_count(),
        citation_edges: cit.edge_count(),
        citation_components: component_stats(&cit).ok(),
    };
    Ok(vec![(COAUTHOR, json(&co)?), (CITATION, json(&cit)?), (GRAPH_STATS, json(&stats)?)])
}

fn cluster(ws: &Workspace, cfg: &Config) -> Result<Files> {
    let opts = cfg.community.detect_options();
    let co: Network = ws.read_json(COAUTHOR)?;
    let cit: Network = ws.read_json(CITATION)?;
    let (part, report) = if co.is_empty() {
        (Partition::new(BTreeMap::new()), None)
    } else {
        let d = detect_with(&co, &opts)?;
        (d.partition, Some(d.report))
    };
    let dc = if cit.is_empty() {
        None
    } else {
        Some(double_cluster(&cit, &opts)?)
    };
    let summary = ClusterSummary {
        coauthor_clusters: part.cluster_count(),
        coauthor_codelength: report,
        documents: cit.node_count(),
        doc_clusters: dc.as_ref().map(|d| d.level1.cluster_count()),
        clusters_of_clusters: dc.as_ref().map(|d| d.level2.cluster_count()),
    };
    Ok(vec![
        (COAUTHOR_PARTITION, part.to_csv()?.into_bytes()),
        (DOC_CLUSTERS, json(&dc)?),
        (CLUSTERS, json(&summary)?),
    ])
}

fn roles(ws: &Workspace, cfg: &Config) -> Result<Files> {
    let co: Network = ws.read_json(COAUTHOR)?;
    let part = load_partition(ws, COAUTHOR_PARTITION)?;
    let table: AuthorTable = ws.read_json(AUTHORS)?;
    let profiles = if co.is_empty() {
        Vec::new()
    } else {
        role_profiles(&co, &part, &cfg.roles.thresholds)?
    };
    let giant: BTreeSet<&str> = co.giant_component().into_iter().collect();
    let in_giant: Vec<NodeRoleProfile> = profiles.iter().filter(|p| giant.contains(p.node.as_str())).cloned().collect();
    let commonality = node_commonality(&co, &last_name_commonality(&table));
    let report = distortion_report(
        &in_giant,
        &commonality,
        &DistortionOptions {
            min_population: cfg.roles.min_population,
            alpha: cfg.roles.alpha,
        },
    )?;
    Ok(vec![
        (ROLES, json(&profiles)?),
        (ROLES_CSV, profiles_to_csv(&profiles)?.into_bytes()),
        (DISTORTION, json(&report)?),
        (DISTORTION_CDF, report.cdf_csv()?.into_bytes()),
    ])
}

fn topics(ws: &Workspace, cfg: &Config) -> Result<Files> {
    let t = &cfg.topics;
    let corpus = load_corpus(ws)?;
    let cit: Network = ws.read_json(CITATION)?;
    let dc: Option<DoubleClustering> = ws.read_json(DOC_CLUSTERS)?;
    let ex = match &dc {
        Some(dc) => extract_topic_areas(&dc.docmap, cit.node_count(), t.min_fraction)?,
        None => AreaExtraction {
            areas: Vec::new(),
            total_docs: 0,
            covered_docs: 0,
            coverage: 0.0,
            min_size: 0,
        },
    };
    let series = ex
        .areas
        .iter()
        .map(|a| rir_series(a, &corpus, t.rir_start, t.rir_end, t.window))
        .collect::<Result<Vec<_>>>()?;
    let mut meta = String::new();
    for a in &ex.areas {
        meta.push_str(&area_label_metadata(a, &corpus, t.top_n).render());
        meta.push('\n');
    }
    let net = inter_area_citation_network(&ex.areas, &corpus)?;
    Ok(vec![
        (AREAS, areas_to_csv(&ex.areas)?.into_bytes()),
        (AREA_SUMMARY, json(&ex)?),
        (RIR, rir_to_csv(&series)?.into_bytes()),
        (AREA_METADATA, meta.into_bytes()),
        (AREA_NETWORK, json(&net)?),
    ])
}

fn affinity(ws: &Workspace, cfg: &Config) -> Result<Files> {
    let corpus = load_corpus(ws)?;
    let areas = load_areas(ws)?;
    let mut files = Vec::new();
    let modes = [
        (AssociationMode::Citation, ASSOC_CITATION, RESIDUALS_CITATION, HEATMAP_CITATION, AFFINITY_CITATION),
        (AssociationMode::AuthorActivity, ASSOC_ACTIVITY, RESIDUALS_ACTIVITY, HEATMAP_ACTIVITY, AFFINITY_ACTIVITY),
    ];
    for (mode, assoc, resid, heat, aff) in modes {
        let m: Option<AssociationMatrix> = if areas.len() >= 2 {
            Some(association_matrix(&areas, &corpus, mode)?)
        } else {
            log::warn!("fewer than two topic areas; {mode} affinity skipped");
            None
        };
        let table = m.as_ref().map(|m| m.residual_table());
        let resid_csv = match &table {
            Some(t) => t.to_csv(cfg.affinity.decimals)?,
            None => String::new(),
        };
        let heat_csv = match &table {
            Some(t) => t.heatmap_csv()?,
            None => String::new(),
        };
        let net = m.as_ref().map(|m| m.affinity_network(cfg.affinity.threshold));
        files.push((assoc, json(&m)?));
        files.push((resid, resid_csv.into_bytes()));
        files.push((heat, heat_csv.into_bytes()));
        files.push((aff, json(&net)?));
    }
    Ok(files)
}

fn collab(ws: &Workspace, cfg: &Config) -> Result<Files> {
    let corpus = load_corpus(ws)?;
    let table: AuthorTable = ws.read_json(AUTHORS)?;
    let co: Network = ws.read_json(COAUTHOR)?;
    let part = load_partition(ws, COAUTHOR_PARTITION)?;
    let profiles: Vec<NodeRoleProfile> = ws.read_json(ROLES)?;
    let areas = load_areas(ws)?;

    let giant = co.giant_component();
    let giant_net = co.induced_subgraph(giant.iter().copied());
    let giant_part = part.restrict(giant.iter().copied()).canonicalize();
    let roles = role_map(&profiles);
    let ctx = GroupContext {
        net: &giant_net,
        part: &giant_part,
        roles: &roles,
        table: &table,
    };
    let collab = build_group_collab_network(&ctx, &cfg.collab.classifier)?;
    let geo = geographic_labels(&ctx, &corpus, CountryTable::bundled());
    let activity = topical_activities(&ctx, &areas);
    let overlay = overlay_network(&collab, &geo, &activity);
    let labels: BTreeMap<String, _> = geo.iter().map(|(&c, &g)| (collab.node_id(c), g)).collect();
    let propensity = geographic_propensity(&collab.network, &labels)?;

    let mut w = crate::csvutil::writer();
    w.write_record(["cluster", "geo", "color"])?;
    for (&c, g) in &geo {
        w.write_record([collab.node_id(c), g.abbrev(), g.color().to_string()])?;
    }
    let geo_csv = crate::csvutil::finish(w)?;

    let mut w = crate::csvutil::writer();
    w.write_record(["cluster", "area", "share", "gray", "publications", "from_hubs"])?;
    for (&c, prof) in &activity {
        for (&area, &share) in &prof.ratios {
            w.write_record([
                collab.node_id(c),
                crate::topics::area_node_id(area),
                format!("{share:.4}"),
                activity_gray(share),
                prof.publication_count.to_string(),
                prof.from_hubs.to_string(),
            ])?;
        }
    }
    let activity_csv = crate::csvutil::finish(w)?;
    let propensity_csv = propensity.to_csv()?;

    Ok(vec![
        (GIANT_PARTITION, giant_part.to_csv()?.into_bytes()),
        (COLLAB, json(&collab)?),
        (OVERLAY, json(&overlay)?),
        (GEO, geo_csv.into_bytes()),
        (ACTIVITY, activity_csv.into_bytes()),
        (PROPENSITY, propensity_csv.into_bytes()),
        (PROPENSITY_JSON, json(&propensity)?),
    ])
}

fn report(ws: &Workspace) -> Result<Files> {
    let r = SummaryReport::from_workspace(ws);
    Ok(vec![(SUMMARY, r.render().into_bytes()), (SUMMARY_JSON, json(&r)?)])
}
