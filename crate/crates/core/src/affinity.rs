//! Association between topic areas measured against a size-proportional null
//! model, in citation or author-activity mode.
//!
//! Expected counts are kept as exact fractions `size_t * total / sum_sizes`
//! so that each row sums to its observed total without rounding.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::corpus::{AuthorId, Corpus};
use crate::error::{Error, Result};
use crate::graph::{Network, NetworkBuilder};
use crate::topics::{area_node_id, doc_index, TopicArea};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociationMode {
    Citation,
    AuthorActivity,
}

impl AssociationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AssociationMode::Citation => "citation",
            AssociationMode::AuthorActivity => "author_activity",
        }
    }
}

impl fmt::Display for AssociationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssociationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "citation" => Ok(AssociationMode::Citation),
            "author_activity" | "author-activity" | "authors" => Ok(AssociationMode::AuthorActivity),
            _ => Err(Error::UnknownOption {
                kind: "mode",
                given: s.to_string(),
                valid: "citation, author_activity".into(),
            }),
        }
    }
}

/// Out-of-area counts, `counts[s][t]` from source `s` to target `t`, rows and
/// columns aligned with the input areas. The diagonal is always zero.
pub fn out_of_area_counts(areas: &[TopicArea], corpus: &Corpus, mode: AssociationMode) -> Result<Vec<Vec<u64>>> {
    let idx = doc_index(areas)?;
    let k = areas.len();
    let mut m = vec![vec![0u64; k]; k];
    match mode {
        AssociationMode::Citation => {
            for (s, area) in areas.iter().enumerate() {
                for r in area.doc_ids.iter().filter_map(|d| corpus.get(d)) {
                    for cited in r.cited_record_ids() {
                        if let Some(&t) = idx.get(cited) {
                            if t != s {
                                m[s][t] += 1;
                            }
                        }
                    }
                }
            }
        }
        AssociationMode::AuthorActivity => {
            let mut per_author: BTreeMap<AuthorId, Vec<u64>> = BTreeMap::new();
            for (a, area) in areas.iter().enumerate() {
                for r in area.doc_ids.iter().filter_map(|d| corpus.get(d)) {
                    for id in r.author_ids() {
                        per_author.entry(id).or_insert_with(|| vec![0; k])[a] += 1;
                    }
                }
            }
            for pubs in per_author.values() {
                for s in (0..k).filter(|&s| pubs[s] > 0) {
                    for t in (0..k).filter(|&t| t != s) {
                        m[s][t] += pubs[t];
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Expected counts of one source row as exact fractions over a common
/// denominator (the summed size of all targets).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub numerators: Vec<u128>,
    pub denominator: u128,
}

impl ExpectedRow {
    pub fn value(&self, t: usize) -> f64 {
        self.numerators[t] as f64 / self.denominator as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.numerators.len()).map(|t| self.value(t)).collect()
    }
}

/// Distributes the row total over targets proportionally to their sizes.
/// `source`, when given, is excluded from the targets and expects zero.
pub fn expected_counts(actual_row: &[u64], sizes: &[u64], source: Option<usize>) -> Result<ExpectedRow> {
    if actual_row.len() != sizes.len() {
        return Err(Error::invalid("count row and size list differ in length"));
    }
    let target_size: u128 = sizes
        .iter()
        .enumerate()
        .filter(|&(t, _)| Some(t) != source)
        .map(|(_, &s)| s as u128)
        .sum();
    if target_size == 0 {
        return Err(Error::ZeroTargetSize(source.map_or("-".into(), |s| s.to_string())));
    }
    let total: u128 = actual_row
        .iter()
        .enumerate()
        .filter(|&(t, _)| Some(t) != source)
        .map(|(_, &c)| c as u128)
        .sum();
    Ok(ExpectedRow {
        numerators: sizes
            .iter()
            .enumerate()
            .map(|(t, &s)| if Some(t) == source { 0 } else { s as u128 * total })
            .collect(),
        denominator: target_size,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Upper tail of the chi-square distribution; `df = 0` gives 1.
pub fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    dist.sf(statistic).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    /// `(actual - expected) / expected`; `None` where nothing is expected.
    pub residuals: Vec<Option<f64>>,
    /// Goodness of fit over targets with positive expectation.
    pub chi_square: Option<ChiSquareResult>,
    /// Some target with zero expectation still received counts.
    pub flagged: bool,
}

pub fn residual_row(actual_row: &[u64], expected: &ExpectedRow) -> Result<ResidualRow> {
    if actual_row.len() != expected.numerators.len() {
        return Err(Error::invalid("actual and expected rows differ in length"));
    }
    let d = expected.denominator;
    let mut residuals = Vec::with_capacity(actual_row.len());
    let (mut statistic, mut cells, mut flagged) = (0.0, 0usize, false);
    for (&a, &n) in actual_row.iter().zip(&expected.numerators) {
        if n == 0 {
            flagged |= a > 0;
            residuals.push(None);
            continue;
        }
        // (a - n/d) / (n/d) = (a d - n) / n, one rounding from exact integers.
        let diff = (a as u128 * d) as i128 - n as i128;
        residuals.push(Some(diff as f64 / n as f64));
        statistic += (diff as f64).powi(2) / (n as f64 * d as f64);
        cells += 1;
    }
    let chi_square = (cells > 0).then(|| ChiSquareResult {
        statistic,
        df: cells - 1,
        p_value: chi_square_sf(statistic, cells - 1),
    });
    Ok(ResidualRow {
        residuals,
        chi_square,
        flagged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociationMatrix {
    pub mode: AssociationMode,
    /// Area ids, in the order of the rows and columns below.
    pub areas: Vec<usize>,
    pub sizes: Vec<u64>,
    pub actual: Vec<Vec<u64>>,
    pub expected: Vec<ExpectedRow>,
    pub rows: Vec<ResidualRow>,
}

impl AssociationMatrix {
    pub fn residual(&self, s: usize, t: usize) -> Option<f64> {
        self.rows[s].residuals[t]
    }

    pub fn flagged_rows(&self) -> Vec<usize> {
        (0..self.areas.len()).filter(|&s| self.rows[s].flagged).collect()
    }

    pub fn residual_table(&self) -> ResidualTable {
        ResidualTable {
            labels: self.areas.iter().map(|&a| area_node_id(a)).collect(),
            cells: self.rows.iter().map(|r| r.residuals.clone()).collect(),
        }
    }

    /// Affinity network with node attribute `size`.
    pub fn affinity_network(&self, threshold: f64) -> Network {
        let net = affinity_network(&self.residual_table(), threshold);
        let attrs = self
            .areas
            .iter()
            .zip(&self.sizes)
            .map(|(&a, &s)| (area_node_id(a), [("size".to_string(), (s as usize).into())].into()))
            .collect();
        net.with_node_attrs(&attrs)
    }
}

/// Builds the full matrix from counts. Sizes are document counts per area.
pub fn association_from_counts(
    mode: AssociationMode,
    areas: Vec<usize>,
    sizes: Vec<u64>,
    actual: Vec<Vec<u64>>,
) -> Result<AssociationMatrix> {
    let k = areas.len();
    if sizes.len() != k || actual.len() != k || actual.iter().any(|r| r.len() != k) {
        return Err(Error::invalid("association matrix shape does not match area list"));
    }
    let mut expected = Vec::with_capacity(k);
    let mut rows = Vec::with_capacity(k);
    for s in 0..k {
        let e = expected_counts(&actual[s], &sizes, Some(s))
            .map_err(|_| Error::ZeroTargetSize(area_node_id(areas[s])))?;
        rows.push(residual_row(&actual[s], &e)?);
        expected.push(e);
    }
    Ok(AssociationMatrix {
        mode,
        areas,
        sizes,
        actual,
        expected,
        rows,
    })
}

/// Counts, expectations and residuals between `areas`, which are expected in
/// size order.
pub fn association_matrix(areas: &[TopicArea], corpus: &Corpus, mode: AssociationMode) -> Result<AssociationMatrix> {
    let actual = out_of_area_counts(areas, corpus, mode)?;
    association_from_counts(
        mode,
        areas.iter().map(|a| a.area_id).collect(),
        areas.iter().map(|a| a.size() as u64).collect(),
        actual,
    )
}

/// Residuals laid out as a square table with labelled rows and columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTable {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

pub const NOT_AVAILABLE: &str = "N.A.";
const SOURCE_TITLE: &str = "Source areas";
const TARGET_TITLE: &str = "Target areas";

/// Fixed decimals; values that round to zero print without a sign.
fn format_residual(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

impl ResidualTable {
    /// Square table under a `Source areas,Target areas` title row; the
    /// diagonal prints as `0`, other undefined cells as `N.A.`.
    pub fn to_csv(&self, decimals: usize) -> Result<String> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record([SOURCE_TITLE, TARGET_TITLE])?;
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (s, row) in self.cells.iter().enumerate() {
            let mut rec = vec![self.labels[s].clone()];
            for (t, c) in row.iter().enumerate() {
                rec.push(match c {
                    _ if s == t => "0".to_string(),
                    Some(v) => format_residual(*v, decimals),
                    None => NOT_AVAILABLE.to_string(),
                });
            }
            w.write_record(&rec)?;
        }
        crate::csvutil::finish(w)
    }

    /// Reads the square layout written by [`ResidualTable::to_csv`]; comma or
    /// tab separated, title row optional. Diagonal cells read back as
    /// undefined.
    pub fn from_delimited(text: &str) -> Result<ResidualTable> {
        let (skipped, text) = match text.split_once('\n') {
            Some((first, rest)) if first.trim_start().starts_with(SOURCE_TITLE) => (1, rest),
            _ => (0, text),
        };
        let delim = if text.lines().next().is_some_and(|l| l.contains('\t')) {
            b'\t'
        } else {
            b','
        };
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(delim)
            .flexible(true)
            .from_reader(text.as_bytes());
        let labels: Vec<String> = rdr.headers()?.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let mut cells = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let s = cells.len();
            if row.get(0).map(str::trim) != labels.get(s).map(String::as_str) {
                return Err(Error::Parse {
                    line: i + 2 + skipped,
                    message: "row labels must follow the column order".into(),
                });
            }
            let vals = row
                .iter()
                .skip(1)
                .enumerate()
                .map(|(t, v)| {
                    let v = v.trim();
                    if t == s || v == NOT_AVAILABLE {
                        return Ok(None);
                    }
                    v.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                        line: i + 2 + skipped,
                        message: format!("bad residual '{v}'"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != labels.len() {
                return Err(Error::Parse {
                    line: i + 2 + skipped,
                    message: format!("expected {} values, found {}", labels.len(), vals.len()),
                });
            }
            cells.push(vals);
        }
        if cells.len() != labels.len() {
            return Err(Error::invalid("residual table is not square"));
        }
        Ok(ResidualTable { labels, cells })
    }

    /// `source,target,residual` rows for heat-map rendering, diagonal omitted.
    pub fn heatmap_csv(&self) -> Result<String> {
        let mut w = crate::csvutil::writer();
        w.write_record(["source", "target", "residual"])?;
        for (s, row) in self.cells.iter().enumerate() {
            for (t, c) in row.iter().enumerate().filter(|&(t, _)| t != s) {
                let v = c.map_or(NOT_AVAILABLE.to_string(), |v| v.to_string());
                w.write_record([self.labels[s].as_str(), self.labels[t].as_str(), &v])?;
            }
        }
        crate::csvutil::finish(w)
    }
}

/// Directed network with an edge `s -> t` weighted by the residual wherever it
/// exceeds `threshold`.
///
/// A missing edge only says that the pair is not over-represented: zero
/// affinity does not mean the absence of any links between two areas, and
/// may stand for connectivity at the size-proportional background level as
/// well as for antagonism.
pub fn affinity_network(table: &ResidualTable, threshold: f64) -> Network {
    let mut b = NetworkBuilder::new(true);
    for l in &table.labels {
        b.add_node(l);
    }
    for (s, row) in table.cells.iter().enumerate() {
        for (t, c) in row.iter().enumerate() {
            if let Some(v) = c {
                if s != t && *v > threshold {
                    b.add_edge(&table.labels[s], &table.labels[t], *v);
                }
            }
        }
    }
    b.build()
}

/// Weakly connected groups of area labels in an affinity network.
pub fn affinity_components(net: &Network) -> Vec<BTreeSet<String>> {
    net.weak_components()
        .into_iter()
        .map(|c| c.into_iter().map(|i| net.nodes()[i].clone()).collect())
        .collect()
}

/// Per-author publication counts per area, for inspection.
pub fn author_area_counts(areas: &[TopicArea], corpus: &Corpus) -> Result<BTreeMap<AuthorId, Vec<u64>>> {
    let idx: HashMap<&str, usize> = doc_index(areas)?;
    let mut out: BTreeMap<AuthorId, Vec<u64>> = BTreeMap::new();
    for r in corpus.iter() {
        if let Some(&a) = idx.get(r.record_id.as_str()) {
            for id in r.author_ids() {
                out.entry(id).or_insert_with(|| vec![0; areas.len()])[a] += 1;
            }
        }
    }
    Ok(out)
}
