use serde::{Deserialize, Serialize};

use crate::collab::DefaultLinkClassifier;
use crate::community::{DetectOptions, DEFAULT_TELEPORT, DEFAULT_TRIALS};
use crate::corpus::DEFAULT_YEAR_RANGE;
use crate::delineation::DEFAULT_TOP_K;
use crate::error::{Error, Result};
use crate::roles::{RoleThresholds, DEFAULT_KS_ALPHA, DEFAULT_MIN_ROLE_POPULATION};
use crate::topics::{DEFAULT_MIN_FRACTION, DEFAULT_RIR_END, DEFAULT_RIR_START, DEFAULT_TOP_N, DEFAULT_WINDOW};

/// Pipeline parameters, one TOML section per module. Missing keys take
/// their defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub corpus: CorpusConfig,
    pub authors: AuthorsConfig,
    pub graph: GraphConfig,
    pub community: CommunityConfig,
    pub roles: RolesConfig,
    pub topics: TopicsConfig,
    pub affinity: AffinityConfig,
    pub collab: CollabConfig,
    pub delineation: DelineationConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    /// Flat-file export, or a canonical `.jsonl` corpus.
    pub input: Option<String>,
    pub restrict_years: bool,
    pub first_year: i32,
    pub last_year: i32,
    /// Subject categories to keep; empty keeps everything.
    pub subject_filter: Vec<String>,
    /// CSV `record_id,position,author_id` of externally resolved authors.
    pub disambiguation: Option<String>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            input: None,
            restrict_years: true,
            first_year: DEFAULT_YEAR_RANGE.0,
            last_year: DEFAULT_YEAR_RANGE.1,
            subject_filter: Vec::new(),
            disambiguation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthorsConfig {
    pub min_pubs: usize,
}

impl Default for AuthorsConfig {
    fn default() -> Self {
        AuthorsConfig { min_pubs: 2 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub max_authors: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunityConfig {
    pub seed: u64,
    pub trials: usize,
    pub teleport: f64,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        CommunityConfig {
            seed: 1,
            trials: DEFAULT_TRIALS,
            teleport: DEFAULT_TELEPORT,
        }
    }
}

impl CommunityConfig {
    pub fn detect_options(&self) -> DetectOptions {
        DetectOptions {
            seed: self.seed,
            trials: self.trials,
            teleport: self.teleport,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RolesConfig {
    pub min_population: usize,
    pub alpha: f64,
    pub thresholds: RoleThresholds,
}

impl Default for RolesConfig {
    fn default() -> Self {
        RolesConfig {
            min_population: DEFAULT_MIN_ROLE_POPULATION,
            alpha: DEFAULT_KS_ALPHA,
            thresholds: RoleThresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicsConfig {
    pub min_fraction: f64,
    pub window: u32,
    pub rir_start: i32,
    pub rir_end: i32,
    pub top_n: usize,
}

impl Default for TopicsConfig {
    fn default() -> Self {
        TopicsConfig {
            min_fraction: DEFAULT_MIN_FRACTION,
            window: DEFAULT_WINDOW,
            rir_start: DEFAULT_RIR_START,
            rir_end: DEFAULT_RIR_END,
            top_n: DEFAULT_TOP_N,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AffinityConfig {
    /// Residuals above this become affinity edges.
    pub threshold: f64,
    pub decimals: usize,
}

impl Default for AffinityConfig {
    fn default() -> Self {
        AffinityConfig {
            threshold: 0.0,
            decimals: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollabConfig {
    pub classifier: DefaultLinkClassifier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelineationConfig {
    pub top_k: usize,
}

impl Default for DelineationConfig {
    fn default() -> Self {
        DelineationConfig { top_k: DEFAULT_TOP_K }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        let c: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn defaults_toml() -> String {
        Config::default().to_toml()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        let c = &self.corpus;
        if c.restrict_years && c.first_year > c.last_year {
            return bad("corpus.first_year is after corpus.last_year");
        }
        if self.authors.min_pubs == 0 {
            return bad("authors.min_pubs must be at least 1");
        }
        if self.community.trials == 0 {
            return bad("community.trials must be at least 1");
        }
        if !(self.community.teleport > 0.0 && self.community.teleport < 1.0) {
            return bad("community.teleport must lie in (0, 1)");
        }
        let t = &self.topics;
        if !(0.0..=1.0).contains(&t.min_fraction) {
            return bad("topics.min_fraction must lie in [0, 1]");
        }
        if t.window == 0 {
            return bad("topics.window must be at least 1");
        }
        if t.rir_start > t.rir_end {
            return bad("topics.rir_start is after topics.rir_end");
        }
        if !(self.roles.alpha > 0.0 && self.roles.alpha < 1.0) {
            return bad("roles.alpha must lie in (0, 1)");
        }
        if self.delineation.top_k < 2 {
            return bad("delineation.top_k must be at least 2");
        }
        Ok(())
    }
}
