//! Staged pipeline over a workspace directory. Every stage declares the
//! artifacts it reads and writes; the manifest records the parameters and
//! input hashes behind each output so unchanged stages are skipped.

mod config;
mod export;
mod report;
mod stages;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use config::{
    AffinityConfig, AuthorsConfig, CollabConfig, CommunityConfig, Config, CorpusConfig, DelineationConfig,
    GraphConfig, RolesConfig, TopicsConfig,
};
pub use export::{export, export_formats, overlay_view, ExportFormat, EXPORTS};
pub use report::{format_count, format_percent, SummaryReport};
pub use stages::{read_records, ClusterSummary, GraphStats, IngestSummary};

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

/// Artifact file names inside a workspace.
pub mod artifacts {
    pub const CORPUS: &str = "corpus.jsonl";
    pub const INGEST: &str = "ingest.json";
    pub const AUTHORS: &str = "authors.json";
    pub const COMMONALITY: &str = "commonality.csv";
    pub const COAUTHOR: &str = "coauthor.json";
    pub const CITATION: &str = "citation.json";
    pub const GRAPH_STATS: &str = "graph_stats.json";
    pub const COAUTHOR_PARTITION: &str = "coauthor_partition.csv";
    pub const DOC_CLUSTERS: &str = "doc_clusters.json";
    pub const CLUSTERS: &str = "clusters.json";
    pub const ROLES: &str = "roles.json";
    pub const ROLES_CSV: &str = "roles.csv";
    pub const DISTORTION: &str = "distortion.json";
    pub const DISTORTION_CDF: &str = "distortion_cdf.csv";
    pub const AREAS: &str = "areas.csv";
    pub const AREA_SUMMARY: &str = "areas.json";
    pub const RIR: &str = "rir.csv";
    pub const AREA_METADATA: &str = "area_metadata.txt";
    pub const AREA_NETWORK: &str = "area_network.json";
    pub const ASSOC_CITATION: &str = "association_citation.json";
    pub const ASSOC_ACTIVITY: &str = "association_author_activity.json";
    pub const RESIDUALS_CITATION: &str = "residuals_citation.csv";
    pub const RESIDUALS_ACTIVITY: &str = "residuals_author_activity.csv";
    pub const HEATMAP_CITATION: &str = "heatmap_citation.csv";
    pub const HEATMAP_ACTIVITY: &str = "heatmap_author_activity.csv";
    pub const AFFINITY_CITATION: &str = "affinity_citation.json";
    pub const AFFINITY_ACTIVITY: &str = "affinity_author_activity.json";
    pub const GIANT_PARTITION: &str = "giant_partition.csv";
    pub const COLLAB: &str = "collab.json";
    pub const OVERLAY: &str = "overlay.json";
    pub const GEO: &str = "geo.csv";
    pub const ACTIVITY: &str = "activity.csv";
    pub const PROPENSITY: &str = "propensity.csv";
    pub const PROPENSITY_JSON: &str = "propensity.json";
    pub const SUMMARY: &str = "summary.txt";
    pub const SUMMARY_JSON: &str = "summary.json";
}

use artifacts::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Authors,
    Graph,
    Cluster,
    Roles,
    Topics,
    Affinity,
    Collab,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Ingest,
        Stage::Authors,
        Stage::Graph,
        Stage::Cluster,
        Stage::Roles,
        Stage::Topics,
        Stage::Affinity,
        Stage::Collab,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Authors => "authors",
            Stage::Graph => "graph",
            Stage::Cluster => "cluster",
            Stage::Roles => "roles",
            Stage::Topics => "topics",
            Stage::Affinity => "affinity",
            Stage::Collab => "collab",
            Stage::Report => "report",
        }
    }

    pub fn index(self) -> usize {
        Stage::ALL.iter().position(|&s| s == self).expect("listed")
    }

    /// Artifacts read. The report stage reads whatever of its inputs exist.
    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[],
            Stage::Authors => &[CORPUS],
            Stage::Graph => &[CORPUS, AUTHORS],
            Stage::Cluster => &[COAUTHOR, CITATION],
            Stage::Roles => &[COAUTHOR, COAUTHOR_PARTITION, AUTHORS],
            Stage::Topics => &[CORPUS, CITATION, DOC_CLUSTERS],
            Stage::Affinity => &[CORPUS, AREAS],
            Stage::Collab => &[CORPUS, AUTHORS, COAUTHOR, COAUTHOR_PARTITION, ROLES, AREAS],
            Stage::Report => &[INGEST, AUTHORS, GRAPH_STATS, CLUSTERS, AREA_SUMMARY, GIANT_PARTITION, COLLAB],
        }
    }

    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[CORPUS, INGEST],
            Stage::Authors => &[AUTHORS, COMMONALITY],
            Stage::Graph => &[COAUTHOR, CITATION, GRAPH_STATS],
            Stage::Cluster => &[COAUTHOR_PARTITION, DOC_CLUSTERS, CLUSTERS],
            Stage::Roles => &[ROLES, ROLES_CSV, DISTORTION, DISTORTION_CDF],
            Stage::Topics => &[AREAS, AREA_SUMMARY, RIR, AREA_METADATA, AREA_NETWORK],
            Stage::Affinity => &[
                ASSOC_CITATION,
                ASSOC_ACTIVITY,
                RESIDUALS_CITATION,
                RESIDUALS_ACTIVITY,
                HEATMAP_CITATION,
                HEATMAP_ACTIVITY,
                AFFINITY_CITATION,
                AFFINITY_ACTIVITY,
            ],
            Stage::Collab => &[GIANT_PARTITION, COLLAB, OVERLAY, GEO, ACTIVITY, PROPENSITY, PROPENSITY_JSON],
            Stage::Report => &[SUMMARY, SUMMARY_JSON],
        }
    }

    /// The stage that writes `artifact`.
    pub fn producing(artifact: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| s.outputs().contains(&artifact))
    }

    fn params(self, c: &Config) -> serde_json::Value {
        use serde_json::json;
        match self {
            Stage::Ingest => json!(c.corpus),
            Stage::Authors => json!(c.authors),
            Stage::Graph => json!(c.graph),
            Stage::Cluster => json!(c.community),
            Stage::Roles => json!(c.roles),
            Stage::Topics => json!(c.topics),
            Stage::Affinity => json!(c.affinity),
            Stage::Collab => json!(c.collab),
            Stage::Report => json!(null),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::UnknownOption {
                kind: "stage",
                given: s.to_string(),
                valid: Stage::ALL.map(|s| s.name()).join(", "),
            })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Position in the pipeline; stands in for a run time so manifests stay
    /// reproducible.
    pub order: usize,
    pub key: String,
    pub params: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub corpus_hash: Option<String>,
    pub seed: Option<u64>,
    pub stages: BTreeMap<String, StageRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageOutcome {
    Ran,
    UpToDate,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug)]
pub struct Workspace {
    root: PathBuf,
    manifest: Manifest,
}

impl Workspace {
    /// Opens (creating if needed) a workspace directory.
    pub fn open(root: impl AsRef<Path>) -> Result<Workspace> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        let mpath = root.join(MANIFEST);
        let manifest = if mpath.exists() {
            let text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
            serde_json::from_str(&text)?
        } else {
            Manifest::default()
        };
        Ok(Workspace { root, manifest })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn path(&self, artifact: &str) -> PathBuf {
        self.root.join(artifact)
    }

    pub fn has(&self, artifact: &str) -> bool {
        self.path(artifact).is_file()
    }

    /// Config saved by the last run, if any.
    pub fn saved_config(&self) -> Result<Option<Config>> {
        let p = self.path(CONFIG_FILE);
        if p.is_file() {
            Config::load(&p).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn read_bytes(&self, artifact: &str) -> Result<Vec<u8>> {
        let p = self.path(artifact);
        if !p.is_file() {
            return Err(Error::MissingArtifact {
                artifact: artifact.to_string(),
                stage: Stage::producing(artifact).map_or("unknown", |s| s.name()).to_string(),
            });
        }
        fs::read(&p).map_err(|e| Error::io(&p, e))
    }

    pub fn read_text(&self, artifact: &str) -> Result<String> {
        String::from_utf8(self.read_bytes(artifact)?)
            .map_err(|_| Error::invalid(format!("artifact {artifact} is not UTF-8")))
    }

    pub fn read_json<T: DeserializeOwned>(&self, artifact: &str) -> Result<T> {
        Ok(serde_json::from_slice(&self.read_bytes(artifact)?)?)
    }

    fn input_hashes(&self, stage: Stage, cfg: &Config) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        if stage == Stage::Ingest {
            for (label, path) in [("input", &cfg.corpus.input), ("disambiguation", &cfg.corpus.disambiguation)] {
                if let Some(p) = path {
                    let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
                    out.insert(format!("{label}:{p}"), sha256_hex(&bytes));
                }
            }
            if cfg.corpus.input.is_none() {
                return Err(Error::Config("corpus.input is not set".into()));
            }
            return Ok(out);
        }
        for a in stage.inputs() {
            if stage == Stage::Report && !self.has(a) {
                out.insert(a.to_string(), "absent".into());
                continue;
            }
            out.insert(a.to_string(), sha256_hex(&self.read_bytes(a)?));
        }
        Ok(out)
    }

    fn up_to_date(&self, stage: Stage, key: &str) -> bool {
        let Some(rec) = self.manifest.stages.get(stage.name()) else {
            return false;
        };
        rec.key == key
            && rec.outputs.iter().all(|(a, h)| {
                fs::read(self.path(a)).is_ok_and(|b| &sha256_hex(&b) == h)
            })
    }

    /// Runs one stage unless its recorded key and outputs still match.
    pub fn run_stage(&mut self, stage: Stage, cfg: &Config) -> Result<StageOutcome> {
        self.run_stage_inner(stage, cfg).map_err(|e| e.in_stage(stage.name()))
    }

    fn run_stage_inner(&mut self, stage: Stage, cfg: &Config) -> Result<StageOutcome> {
        cfg.validate()?;
        let inputs = self.input_hashes(stage, cfg)?;
        let params = stage.params(cfg);
        let key_src = serde_json::to_vec(&serde_json::json!({
            "stage": stage.name(),
            "params": params,
            "inputs": inputs,
        }))?;
        let key = sha256_hex(&key_src);
        if self.up_to_date(stage, &key) {
            log::info!("stage {stage}: up to date");
            return Ok(StageOutcome::UpToDate);
        }
        log::info!("stage {stage}: running");
        let files = stages::execute(stage, self, cfg)?;
        let mut outputs = BTreeMap::new();
        for (name, bytes) in files {
            let p = self.path(name);
            fs::write(&p, &bytes).map_err(|e| Error::io(&p, e))?;
            outputs.insert(name.to_string(), sha256_hex(&bytes));
        }
        if stage == Stage::Ingest {
            self.manifest.corpus_hash = outputs.get(CORPUS).cloned();
        }
        if stage == Stage::Cluster {
            self.manifest.seed = Some(cfg.community.seed);
        }
        self.manifest.stages.insert(
            stage.name().to_string(),
            StageRecord {
                order: stage.index(),
                key,
                params,
                inputs,
                outputs,
            },
        );
        self.save_manifest()?;
        Ok(StageOutcome::Ran)
    }

    /// Runs every stage up to and including `last`.
    pub fn run_through(&mut self, last: Stage, cfg: &Config) -> Result<Vec<(Stage, StageOutcome)>> {
        self.save_config(cfg)?;
        let mut out = Vec::new();
        for s in Stage::ALL.into_iter().take_while(|&s| s <= last) {
            out.push((s, self.run_stage(s, cfg)?));
        }
        Ok(out)
    }

    fn save_config(&self, cfg: &Config) -> Result<()> {
        let p = self.path(CONFIG_FILE);
        fs::write(&p, cfg.to_toml()).map_err(|e| Error::io(&p, e))
    }

    fn save_manifest(&self) -> Result<()> {
        let p = self.path(MANIFEST);
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fs::write(&p, text).map_err(|e| Error::io(&p, e))
    }

    pub fn corpus(&self) -> Result<crate::corpus::Corpus> {
        stages::load_corpus(self)
    }

    pub fn areas(&self) -> Result<Vec<crate::topics::TopicArea>> {
        stages::load_areas(self)
    }

    /// Summary tables from whatever stages have run.
    pub fn report(&self) -> SummaryReport {
        SummaryReport::from_workspace(self)
    }
}

/// Runs the whole pipeline into `root`.
pub fn run_pipeline(cfg: &Config, root: impl AsRef<Path>) -> Result<Workspace> {
    cfg.validate()?;
    let mut ws = Workspace::open(root)?;
    ws.run_through(Stage::Report, cfg)?;
    Ok(ws)
}
