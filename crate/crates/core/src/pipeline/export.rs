use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::artifacts::*;
use super::{Stage, Workspace};
use crate::collab::GroupCollabNetwork;
use crate::error::{Error, Result};
use crate::graph::{to_dot, to_edge_csv, to_graphml, AttrValue, Attrs, Network};
use crate::topics::area_node_id;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExportFormat {
    Graphml,
    Dot,
    Csv,
    Txt,
    Json,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 5] = [
        ExportFormat::Graphml,
        ExportFormat::Dot,
        ExportFormat::Csv,
        ExportFormat::Txt,
        ExportFormat::Json,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExportFormat::Graphml => "graphml",
            ExportFormat::Dot => "dot",
            ExportFormat::Csv => "csv",
            ExportFormat::Txt => "txt",
            ExportFormat::Json => "json",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExportFormat> {
        ExportFormat::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownOption {
                kind: "format",
                given: s.to_string(),
                valid: ExportFormat::ALL.map(|f| f.as_str()).join(", "),
            })
    }
}

#[derive(Clone, Copy, Debug)]
enum Source {
    /// A serialized `Network`, possibly `null`.
    Network,
    Collab,
    /// Written as-is.
    Verbatim(ExportFormat),
    Report,
}

/// `(artifact name, file, source)`.
const REGISTRY: [(&str, &str, Source); 21] = [
    ("coauthor", COAUTHOR, Source::Network),
    ("citation", CITATION, Source::Network),
    ("coauthor-partition", COAUTHOR_PARTITION, Source::Verbatim(ExportFormat::Csv)),
    ("roles", ROLES_CSV, Source::Verbatim(ExportFormat::Csv)),
    ("commonality-cdf", DISTORTION_CDF, Source::Verbatim(ExportFormat::Csv)),
    ("areas", AREAS, Source::Verbatim(ExportFormat::Csv)),
    ("area-labels", AREA_METADATA, Source::Verbatim(ExportFormat::Txt)),
    ("rir", RIR, Source::Verbatim(ExportFormat::Csv)),
    ("area-network", AREA_NETWORK, Source::Network),
    ("residuals-citation", RESIDUALS_CITATION, Source::Verbatim(ExportFormat::Csv)),
    ("residuals-author-activity", RESIDUALS_ACTIVITY, Source::Verbatim(ExportFormat::Csv)),
    ("heatmap-citation", HEATMAP_CITATION, Source::Verbatim(ExportFormat::Csv)),
    ("heatmap-author-activity", HEATMAP_ACTIVITY, Source::Verbatim(ExportFormat::Csv)),
    ("affinity-citation", AFFINITY_CITATION, Source::Network),
    ("affinity-author-activity", AFFINITY_ACTIVITY, Source::Network),
    ("collab", COLLAB, Source::Collab),
    ("overlay", OVERLAY, Source::Network),
    ("geo", GEO, Source::Verbatim(ExportFormat::Csv)),
    ("activity", ACTIVITY, Source::Verbatim(ExportFormat::Csv)),
    ("propensity", PROPENSITY, Source::Verbatim(ExportFormat::Csv)),
    ("report", SUMMARY, Source::Report),
];

/// Names accepted by [`export`].
pub const EXPORTS: [&str; 21] = {
    let mut out = [""; 21];
    let mut i = 0;
    while i < REGISTRY.len() {
        out[i] = REGISTRY[i].0;
        i += 1;
    }
    out
};

fn formats_of(source: Source) -> Vec<ExportFormat> {
    match source {
        Source::Network | Source::Collab => vec![ExportFormat::Graphml, ExportFormat::Dot, ExportFormat::Csv],
        Source::Verbatim(f) => vec![f],
        Source::Report => vec![ExportFormat::Txt, ExportFormat::Json],
    }
}

/// Formats available for an artifact name.
pub fn export_formats(artifact: &str) -> Result<Vec<ExportFormat>> {
    Ok(formats_of(lookup(artifact)?.2))
}

fn lookup(artifact: &str) -> Result<(&'static str, &'static str, Source)> {
    REGISTRY
        .iter()
        .find(|(n, _, _)| *n == artifact)
        .copied()
        .ok_or_else(|| Error::UnknownOption {
            kind: "artifact",
            given: artifact.to_string(),
            valid: EXPORTS.join(", "),
        })
}

fn render_network(net: &Network, name: &str, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Graphml => Ok(to_graphml(net)),
        ExportFormat::Dot => Ok(to_dot(net, name)),
        ExportFormat::Csv => to_edge_csv(net),
        _ => unreachable!("checked against the registry"),
    }
}

fn not_computed(artifact: &str, file: &str) -> Error {
    Error::MissingArtifact {
        artifact: artifact.to_string(),
        stage: Stage::producing(file).map_or("unknown", |s| s.name()).to_string(),
    }
}

/// Renders a staged artifact. Nothing is recomputed.
pub fn export(ws: &Workspace, artifact: &str, format: ExportFormat) -> Result<String> {
    let (name, file, source) = lookup(artifact)?;
    let valid = formats_of(source);
    if !valid.contains(&format) {
        return Err(Error::UnknownOption {
            kind: "format",
            given: format.to_string(),
            valid: valid.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(", "),
        });
    }
    if !ws.has(file) {
        return Err(not_computed(name, file));
    }
    match source {
        Source::Network => {
            let net: Option<Network> = ws.read_json(file)?;
            let net = net.ok_or_else(|| {
                Error::invalid(format!("artifact '{name}' was not computed for this corpus"))
            })?;
            render_network(&net, name, format)
        }
        Source::Collab => {
            let c: GroupCollabNetwork = ws.read_json(file)?;
            render_network(&c.network, name, format)
        }
        Source::Verbatim(_) => ws.read_text(file),
        Source::Report => match format {
            ExportFormat::Json => ws.read_text(SUMMARY_JSON),
            _ => ws.read_text(file),
        },
    }
}

/// Group collaboration network coloured for one view: continents when
/// `area` is `None`, otherwise the grey activity scale for that area.
pub fn overlay_view(ws: &Workspace, area: Option<usize>) -> Result<Network> {
    if !ws.has(OVERLAY) {
        return Err(not_computed("overlay", OVERLAY));
    }
    let full: Network = ws.read_json(OVERLAY)?;
    let key = match area {
        None => "geo_color".to_string(),
        Some(a) => format!("gray_{}", area_node_id(a)),
    };
    if area.is_some() && full.node_count() > 0 && !(0..full.node_count()).any(|i| full.attrs_at(i).contains_key(&key)) {
        return Err(Error::invalid(format!("no topic area {} in the overlay", area.unwrap_or_default())));
    }
    let mut extra: BTreeMap<String, Attrs> = BTreeMap::new();
    for (i, id) in full.nodes().iter().enumerate() {
        if let Some(color) = full.attrs_at(i).get(&key) {
            let a = extra.entry(id.clone()).or_default();
            a.insert("fillcolor".into(), color.clone());
            a.insert("style".into(), AttrValue::from("filled"));
        }
    }
    Ok(full.with_node_attrs(&extra))
}
