//! Topic areas (large clusters of document clusters), reference inclusion
//! rates, labelling metadata and the area-level citation network.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::graph::{Network, NetworkBuilder};

pub const DEFAULT_MIN_FRACTION: f64 = 0.02;
pub const DEFAULT_WINDOW: u32 = 5;
pub const DEFAULT_RIR_START: i32 = 1996;
pub const DEFAULT_RIR_END: i32 = 2010;
pub const DEFAULT_TOP_N: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicArea {
    /// 1-based, in order of decreasing size.
    pub area_id: usize,
    pub doc_ids: BTreeSet<String>,
    pub label: Option<String>,
}

impl TopicArea {
    pub fn size(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn contains(&self, doc: &str) -> bool {
        self.doc_ids.contains(doc)
    }
}

/// Node id used for an area in area-level networks.
pub fn area_node_id(area_id: usize) -> String {
    format!("a{area_id}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaExtraction {
    pub areas: Vec<TopicArea>,
    pub total_docs: usize,
    pub covered_docs: usize,
    pub coverage: f64,
    /// Minimum size a cluster needed to become an area.
    pub min_size: usize,
}

/// Keeps the second-level clusters holding at least
/// `ceil(min_fraction * total_docs)` documents. Equal-sized clusters are
/// ordered by their cluster id.
pub fn extract_topic_areas(
    docmap: &BTreeMap<String, usize>,
    total_docs: usize,
    min_fraction: f64,
) -> Result<AreaExtraction> {
    if !(0.0..=1.0).contains(&min_fraction) {
        return Err(Error::invalid(format!("min_fraction {min_fraction} outside [0, 1]")));
    }
    if total_docs < docmap.len() {
        return Err(Error::invalid(format!(
            "total_docs {total_docs} is smaller than the {} mapped documents",
            docmap.len()
        )));
    }
    let mut clusters: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (doc, &c) in docmap {
        clusters.entry(c).or_default().insert(doc.clone());
    }
    let min_size = (min_fraction * total_docs as f64).ceil() as usize;
    let mut kept: Vec<(usize, BTreeSet<String>)> = clusters
        .into_iter()
        .filter(|(_, docs)| docs.len() >= min_size)
        .collect();
    kept.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    let areas: Vec<TopicArea> = kept
        .into_iter()
        .enumerate()
        .map(|(i, (_, doc_ids))| TopicArea {
            area_id: i + 1,
            doc_ids,
            label: None,
        })
        .collect();
    let covered_docs = areas.iter().map(TopicArea::size).sum();
    Ok(AreaExtraction {
        coverage: if total_docs == 0 {
            0.0
        } else {
            covered_docs as f64 / total_docs as f64
        },
        areas,
        total_docs,
        covered_docs,
        min_size,
    })
}

/// Document -> index into `areas`; errors if a document is in two areas.
pub(crate) fn doc_index(areas: &[TopicArea]) -> Result<HashMap<&str, usize>> {
    let mut idx = HashMap::new();
    for (i, a) in areas.iter().enumerate() {
        for d in &a.doc_ids {
            if let Some(prev) = idx.insert(d.as_str(), i) {
                return Err(Error::invalid(format!(
                    "document '{d}' is in areas {} and {}",
                    areas[prev].area_id, a.area_id
                )));
            }
        }
    }
    Ok(idx)
}

/// `area_id,record_id` rows.
pub fn areas_to_csv(areas: &[TopicArea]) -> Result<String> {
    let mut w = crate::csvutil::writer();
    w.write_record(["area_id", "record_id"])?;
    for a in areas {
        for d in &a.doc_ids {
            w.write_record([a.area_id.to_string().as_str(), d])?;
        }
    }
    crate::csvutil::finish(w)
}

pub fn areas_from_csv<R: std::io::Read>(reader: R) -> Result<Vec<TopicArea>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut by_id: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let id: usize = row[0].parse().map_err(|_| Error::Parse {
            line: i + 2,
            message: format!("bad area id '{}'", &row[0]),
        })?;
        by_id.entry(id).or_default().insert(row[1].to_string());
    }
    Ok(by_id
        .into_iter()
        .map(|(area_id, doc_ids)| TopicArea {
            area_id,
            doc_ids,
            label: None,
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RirPoint {
    pub year: i32,
    pub rate: f64,
    pub numerator: usize,
    pub denominator: usize,
}

/// Share of an area's references from `year` to works of the preceding
/// `window` years that resolve inside the corpus. References with unknown
/// cited year are left out of both counts. `None` when nothing is in window.
pub fn reference_inclusion_rate(
    area: &TopicArea,
    corpus: &Corpus,
    year: i32,
    window: u32,
) -> Result<Option<RirPoint>> {
    if window == 0 {
        return Err(Error::invalid("window must be at least 1"));
    }
    let lo = year - window as i32;
    let (mut num, mut den) = (0, 0);
    for rec in area.doc_ids.iter().filter_map(|d| corpus.get(d)).filter(|r| r.year == year) {
        for cr in &rec.cited_refs {
            match cr.year {
                Some(y) if (lo..year).contains(&y) => {
                    den += 1;
                    if cr.matched_record_id.as_deref().is_some_and(|m| corpus.contains(m)) {
                        num += 1;
                    }
                }
                _ => {}
            }
        }
    }
    Ok((den > 0).then(|| RirPoint {
        year,
        rate: num as f64 / den as f64,
        numerator: num,
        denominator: den,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RirSeries {
    pub area_id: usize,
    pub points: Vec<RirPoint>,
}

pub fn rir_series(area: &TopicArea, corpus: &Corpus, start: i32, end: i32, window: u32) -> Result<RirSeries> {
    if start > end {
        return Err(Error::invalid(format!("start year {start} after end year {end}")));
    }
    let mut points = Vec::new();
    for y in start..=end {
        points.extend(reference_inclusion_rate(area, corpus, y, window)?);
    }
    Ok(RirSeries {
        area_id: area.area_id,
        points,
    })
}

/// `area,year,rate,num,den`.
pub fn rir_to_csv(series: &[RirSeries]) -> Result<String> {
    let mut w = crate::csvutil::writer();
    w.write_record(["area", "year", "rate", "num", "den"])?;
    for s in series {
        for p in &s.points {
            w.write_record([
                s.area_id.to_string(),
                p.year.to_string(),
                format!("{:.6}", p.rate),
                p.numerator.to_string(),
                p.denominator.to_string(),
            ])?;
        }
    }
    crate::csvutil::finish(w)
}

/// Documents per publication year in each area.
pub fn area_size_by_year(areas: &[TopicArea], corpus: &Corpus) -> BTreeMap<usize, BTreeMap<i32, usize>> {
    areas
        .iter()
        .map(|a| {
            let mut by_year = BTreeMap::new();
            for r in a.doc_ids.iter().filter_map(|d| corpus.get(d)) {
                *by_year.entry(r.year).or_insert(0) += 1;
            }
            (a.area_id, by_year)
        })
        .collect()
}

fn stopwords() -> &'static BTreeSet<String> {
    static WORDS: OnceLock<BTreeSet<String>> = OnceLock::new();
    WORDS.get_or_init(|| {
        include_str!("../data/stopwords.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect()
    })
}

pub fn title_terms(title: &str) -> impl Iterator<Item = String> + '_ {
    title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !stopwords().contains(t))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaLabelMetadata {
    pub area_id: usize,
    pub journals: Vec<(String, usize)>,
    pub authors: Vec<(String, usize)>,
    pub title_terms: Vec<(String, usize)>,
}

fn top_n(counts: BTreeMap<String, usize>, n: usize) -> Vec<(String, usize)> {
    let mut v: Vec<(String, usize)> = counts.into_iter().collect();
    // BTreeMap order makes the sort's tie-break alphabetical.
    v.sort_by_key(|e| std::cmp::Reverse(e.1));
    v.truncate(n);
    v
}

/// Most frequent journals, author identities and title terms in an area.
pub fn area_label_metadata(area: &TopicArea, corpus: &Corpus, top: usize) -> AreaLabelMetadata {
    let (mut journals, mut authors, mut terms) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    for r in area.doc_ids.iter().filter_map(|d| corpus.get(d)) {
        if !r.journal.is_empty() {
            *journals.entry(r.journal.clone()).or_insert(0) += 1;
        }
        for a in r.author_ids() {
            *authors.entry(a.0).or_insert(0) += 1;
        }
        for t in title_terms(&r.title) {
            *terms.entry(t).or_insert(0) += 1;
        }
    }
    AreaLabelMetadata {
        area_id: area.area_id,
        journals: top_n(journals, top),
        authors: top_n(authors, top),
        title_terms: top_n(terms, top),
    }
}

impl AreaLabelMetadata {
    pub fn render(&self) -> String {
        let list = |v: &[(String, usize)]| {
            v.iter()
                .map(|(k, c)| format!("  {k} ({c})"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        format!(
            "area {}\njournals:\n{}\nauthors:\n{}\ntitle terms:\n{}\n",
            self.area_id,
            list(&self.journals),
            list(&self.authors),
            list(&self.title_terms)
        )
    }
}

/// Directed network over areas weighted by cross-area citations; node
/// attribute `size` holds the area size.
pub fn inter_area_citation_network(areas: &[TopicArea], corpus: &Corpus) -> Result<Network> {
    let idx = doc_index(areas)?;
    let mut b = NetworkBuilder::new(true);
    for a in areas {
        b.set_attr(&area_node_id(a.area_id), "size", a.size());
    }
    for (s, area) in areas.iter().enumerate() {
        for r in area.doc_ids.iter().filter_map(|d| corpus.get(d)) {
            for cited in r.cited_record_ids() {
                if let Some(&t) = idx.get(cited) {
                    if t != s {
                        b.add_edge(&area_node_id(area.area_id), &area_node_id(areas[t].area_id), 1.0);
                    }
                }
            }
        }
    }
    Ok(b.build())
}
