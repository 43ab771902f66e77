//! Node roles from within-module degree and participation, and the
//! name-commonality distortion check built on them.
//!
//! Degrees are unweighted neighbour counts; edge direction is ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{AttrValue, Network};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    UltraPeripheral,
    Peripheral,
    Connector,
    SatelliteConnector,
    ProvincialHub,
    ConnectorHub,
    SatelliteConnectorHub,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::UltraPeripheral,
        Role::Peripheral,
        Role::Connector,
        Role::SatelliteConnector,
        Role::ProvincialHub,
        Role::ConnectorHub,
        Role::SatelliteConnectorHub,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::UltraPeripheral => "ultra_peripheral",
            Role::Peripheral => "peripheral",
            Role::Connector => "connector",
            Role::SatelliteConnector => "satellite_connector",
            Role::ProvincialHub => "provincial_hub",
            Role::ConnectorHub => "connector_hub",
            Role::SatelliteConnectorHub => "satellite_connector_hub",
        }
    }

    pub fn is_hub(self) -> bool {
        matches!(
            self,
            Role::ProvincialHub | Role::ConnectorHub | Role::SatelliteConnectorHub
        )
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Role> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownOption {
                kind: "role",
                given: s.to_string(),
                valid: Role::ALL.map(Role::as_str).join(", "),
            })
    }
}

/// Cut-offs for [`classify_role`]. Each participation bound is inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoleThresholds {
    pub hub_z: f64,
    pub ultra_peripheral_p: f64,
    pub peripheral_p: f64,
    pub connector_p: f64,
    pub provincial_hub_p: f64,
    pub connector_hub_p: f64,
}

impl Default for RoleThresholds {
    fn default() -> Self {
        RoleThresholds {
            hub_z: 2.5,
            ultra_peripheral_p: 0.05,
            peripheral_p: 0.62,
            connector_p: 0.80,
            provincial_hub_p: 0.30,
            connector_hub_p: 0.75,
        }
    }
}

pub fn classify_role(z: f64, p: f64, t: &RoleThresholds) -> Role {
    if z >= t.hub_z {
        if p <= t.provincial_hub_p {
            Role::ProvincialHub
        } else if p <= t.connector_hub_p {
            Role::ConnectorHub
        } else {
            Role::SatelliteConnectorHub
        }
    } else if p <= t.ultra_peripheral_p {
        Role::UltraPeripheral
    } else if p <= t.peripheral_p {
        Role::Peripheral
    } else if p <= t.connector_p {
        Role::Connector
    } else {
        Role::SatelliteConnector
    }
}

/// Per node: total degree and neighbour counts per module.
fn module_degrees(net: &Network, labels: &[usize]) -> Vec<(usize, BTreeMap<usize, usize>)> {
    (0..net.node_count())
        .map(|i| {
            let nbrs = net.neighbor_set(i);
            let mut per = BTreeMap::new();
            for &j in &nbrs {
                *per.entry(labels[j]).or_insert(0) += 1;
            }
            (nbrs.len(), per)
        })
        .collect()
}

/// Within-module degree z-score using the population standard deviation;
/// modules whose members all have the same internal degree give z = 0.
pub fn within_module_z(net: &Network, part: &Partition) -> Result<BTreeMap<String, f64>> {
    let labels = part.labels_for(net)?;
    let degs = module_degrees(net, &labels);
    let kappa: Vec<f64> = degs
        .iter()
        .zip(&labels)
        .map(|((_, per), l)| per.get(l).copied().unwrap_or(0) as f64)
        .collect();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        members.entry(l).or_default().push(i);
    }
    let mut z = vec![0.0; labels.len()];
    for idx in members.values() {
        let n = idx.len() as f64;
        let mean = idx.iter().map(|&i| kappa[i]).sum::<f64>() / n;
        let var = idx.iter().map(|&i| (kappa[i] - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        if std > 0.0 {
            for &i in idx {
                z[i] = (kappa[i] - mean) / std;
            }
        }
    }
    Ok(net.nodes().iter().cloned().zip(z).collect())
}

/// `1 - sum_s (k_is / k_i)^2`; isolated nodes get 0.
pub fn participation_coefficient(net: &Network, part: &Partition) -> Result<BTreeMap<String, f64>> {
    let labels = part.labels_for(net)?;
    Ok(net
        .nodes()
        .iter()
        .zip(module_degrees(net, &labels))
        .map(|(id, (k, per))| {
            let p = if k == 0 {
                0.0
            } else {
                let k = k as f64;
                1.0 - per.values().map(|&c| (c as f64 / k).powi(2)).sum::<f64>()
            };
            (id.clone(), p)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRoleProfile {
    pub node: String,
    pub z: f64,
    pub p: f64,
    pub role: Role,
}

/// Profiles for every node of `net`, in ascending node order.
pub fn role_profiles(net: &Network, part: &Partition, t: &RoleThresholds) -> Result<Vec<NodeRoleProfile>> {
    let z = within_module_z(net, part)?;
    let p = participation_coefficient(net, part)?;
    Ok(z.into_iter()
        .map(|(node, z)| {
            let p = p[&node];
            NodeRoleProfile {
                role: classify_role(z, p, t),
                node,
                z,
                p,
            }
        })
        .collect())
}

/// `node,z,p,role`.
pub fn profiles_to_csv(profiles: &[NodeRoleProfile]) -> Result<String> {
    let mut w = crate::csvutil::writer();
    w.write_record(["node", "z", "p", "role"])?;
    for pr in profiles {
        w.write_record([
            pr.node.as_str(),
            &pr.z.to_string(),
            &pr.p.to_string(),
            pr.role.as_str(),
        ])?;
    }
    crate::csvutil::finish(w)
}

/// Commonality per node, looked up through the node's `last_name` attribute.
pub fn node_commonality(net: &Network, by_last_name: &BTreeMap<String, usize>) -> BTreeMap<String, usize> {
    net.nodes()
        .iter()
        .enumerate()
        .filter_map(|(i, id)| match net.attrs_at(i).get("last_name") {
            Some(AttrValue::Text(name)) => by_last_name.get(name).map(|&c| (id.clone(), c)),
            _ => None,
        })
        .collect()
}

pub const DEFAULT_MIN_ROLE_POPULATION: usize = 30;
pub const DEFAULT_KS_ALPHA: f64 = 0.05;

/// Asymptotic two-sample Kolmogorov-Smirnov critical distance.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// Largest vertical gap between the empirical CDFs of two samples.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsComparison {
    pub a: Role,
    pub b: Role,
    pub distance: f64,
    pub critical: f64,
}

impl KsComparison {
    pub fn exceeds(&self) -> bool {
        self.distance > self.critical
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// Step points `(commonality, cumulative share)` per populated role.
    pub per_role_cdf: BTreeMap<Role, Vec<(usize, f64)>>,
    pub role_sizes: BTreeMap<Role, usize>,
    /// Pairs among roles meeting the population minimum.
    pub comparisons: Vec<KsComparison>,
    pub max_ks: Option<f64>,
    pub flagged_pairs: Vec<(Role, Role)>,
    /// Fewer than two roles reached the population minimum.
    pub insufficient: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionOptions {
    pub min_population: usize,
    pub alpha: f64,
}

impl Default for DistortionOptions {
    fn default() -> Self {
        DistortionOptions {
            min_population: DEFAULT_MIN_ROLE_POPULATION,
            alpha: DEFAULT_KS_ALPHA,
        }
    }
}

/// Compares the distribution of last-name commonality across roles. Callers
/// normally pass only the giant component's profiles.
pub fn distortion_report(
    profiles: &[NodeRoleProfile],
    commonality: &BTreeMap<String, usize>,
    opts: &DistortionOptions,
) -> Result<DistortionReport> {
    let mut samples: BTreeMap<Role, Vec<usize>> = BTreeMap::new();
    for pr in profiles {
        let c = commonality
            .get(&pr.node)
            .ok_or_else(|| Error::invalid(format!("no commonality value for node '{}'", pr.node)))?;
        samples.entry(pr.role).or_default().push(*c);
    }
    let mut per_role_cdf = BTreeMap::new();
    for (role, vals) in &mut samples {
        vals.sort_unstable();
        let n = vals.len() as f64;
        let mut cdf: Vec<(usize, f64)> = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            let share = (i + 1) as f64 / n;
            match cdf.last_mut() {
                Some(last) if last.0 == v => last.1 = share,
                _ => cdf.push((v, share)),
            }
        }
        per_role_cdf.insert(*role, cdf);
    }
    let eligible: Vec<(Role, Vec<f64>)> = samples
        .iter()
        .filter(|(_, v)| v.len() >= opts.min_population)
        .map(|(r, v)| (*r, v.iter().map(|&x| x as f64).collect()))
        .collect();
    let mut comparisons = Vec::new();
    for (i, (ra, va)) in eligible.iter().enumerate() {
        for (rb, vb) in &eligible[i + 1..] {
            comparisons.push(KsComparison {
                a: *ra,
                b: *rb,
                distance: ks_distance(va, vb),
                critical: ks_critical_value(va.len(), vb.len(), opts.alpha),
            });
        }
    }
    let max_ks = comparisons.iter().map(|c| c.distance).reduce(f64::max);
    let flagged_pairs = comparisons
        .iter()
        .filter(|c| c.exceeds())
        .map(|c| (c.a, c.b))
        .collect();
    Ok(DistortionReport {
        role_sizes: samples.iter().map(|(r, v)| (*r, v.len())).collect(),
        per_role_cdf,
        comparisons,
        max_ks,
        flagged_pairs,
        insufficient: eligible.len() < 2,
    })
}

impl DistortionReport {
    /// True when some role pair differs beyond its critical value.
    pub fn distorted(&self) -> bool {
        !self.flagged_pairs.is_empty()
    }

    /// `role,commonality,cumulative` rows.
    pub fn cdf_csv(&self) -> Result<String> {
        let mut w = crate::csvutil::writer();
        w.write_record(["role", "commonality", "cumulative"])?;
        for (role, pts) in &self.per_role_cdf {
            for (v, s) in pts {
                w.write_record([role.as_str(), &v.to_string(), &s.to_string()])?;
            }
        }
        crate::csvutil::finish(w)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (r, n) in &self.role_sizes {
            s.push_str(&format!("{r}: {n} nodes\n"));
        }
        if self.insufficient {
            s.push_str("insufficient: fewer than two roles meet the population minimum\n");
            return s;
        }
        for c in &self.comparisons {
            s.push_str(&format!(
                "{} vs {}: D = {:.4}, critical = {:.4}{}\n",
                c.a,
                c.b,
                c.distance,
                c.critical,
                if c.exceeds() { " *" } else { "" }
            ));
        }
        if let Some(m) = self.max_ks {
            s.push_str(&format!("max D = {m:.4}\n"));
        }
        s
    }
}
