//! Bibliographic records: ingestion, normalization, canonical persistence and
//! the author-level tables derived from them.
//!
//! The canonical on-disk form is newline-delimited JSON, one record per line,
//! with fields in this fixed order:
//!
//! 1. `record_id`
//! 2. `year`
//! 3. `authors` (each `last_name`, `initials`, optional `resolved_id`)
//! 4. `title`
//! 5. `journal`
//! 6. `subject_categories` (sorted)
//! 7. `addresses` (ISO alpha-2 country codes, one per address line)
//! 8. `cited_refs` (each `raw`, `year`, `matched_record_id`)

mod authors;
mod wos;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::{char::is_combining_mark, UnicodeNormalization};

use crate::error::{Error, Result};

pub use authors::{build_author_table, last_name_commonality, AuthorEntry, AuthorTable};
pub use wos::{parse_wos_flatfile, write_wos_flatfile, Rejection, WosParse};

/// Default corpus time frame.
pub const DEFAULT_YEAR_RANGE: (i32, i32) = (1991, 2010);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AuthorId(pub String);

impl AuthorId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for AuthorId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AuthorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorName {
    pub last_name: String,
    pub initials: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_id: Option<String>,
}

impl AuthorName {
    pub fn new(last_name: &str, initials: &str) -> AuthorName {
        AuthorName {
            last_name: normalize_last_name(last_name),
            initials: normalize_initials(initials),
            resolved_id: None,
        }
    }

    /// Resolved identity when a disambiguation map was applied, otherwise the
    /// `LAST, INITIALS` name key.
    pub fn identity(&self) -> AuthorId {
        match &self.resolved_id {
            Some(id) => AuthorId(id.clone()),
            None if self.initials.is_empty() => AuthorId(self.last_name.clone()),
            None => AuthorId(format!("{}, {}", self.last_name, self.initials)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedRef {
    pub raw: String,
    pub year: Option<i32>,
    pub matched_record_id: Option<String>,
}

impl CitedRef {
    pub fn new(raw: &str) -> CitedRef {
        CitedRef {
            raw: raw.trim().to_string(),
            year: extract_ref_year(raw),
            matched_record_id: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiblioRecord {
    pub record_id: String,
    pub year: i32,
    pub authors: Vec<AuthorName>,
    pub title: String,
    pub journal: String,
    pub subject_categories: BTreeSet<String>,
    pub addresses: Vec<String>,
    pub cited_refs: Vec<CitedRef>,
}

impl BiblioRecord {
    pub fn new(record_id: &str, year: i32, authors: Vec<AuthorName>) -> BiblioRecord {
        BiblioRecord {
            record_id: record_id.to_string(),
            year,
            authors,
            title: String::new(),
            journal: String::new(),
            subject_categories: BTreeSet::new(),
            addresses: Vec::new(),
            cited_refs: Vec::new(),
        }
    }

    /// Distinct author identities in byline order.
    pub fn author_ids(&self) -> Vec<AuthorId> {
        let mut seen = BTreeSet::new();
        self.authors
            .iter()
            .map(AuthorName::identity)
            .filter(|id| seen.insert(id.clone()))
            .collect()
    }

    pub fn cited_record_ids(&self) -> impl Iterator<Item = &str> {
        self.cited_refs
            .iter()
            .filter_map(|r| r.matched_record_id.as_deref())
    }
}

/// Uppercase ASCII folding: decompose, drop combining marks, uppercase, collapse whitespace.
pub fn normalize_last_name(s: &str) -> String {
    let folded: String = s
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_uppercase)
        .collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn normalize_initials(s: &str) -> String {
    s.nfd()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_uppercase)
        .collect()
}

/// First comma-separated token after the leading one that is a bare 4-digit year.
pub fn extract_ref_year(raw: &str) -> Option<i32> {
    raw.split(',').skip(1).map(str::trim).find_map(|tok| {
        if tok.len() == 4 && tok.bytes().all(|b| b.is_ascii_digit()) {
            tok.parse().ok()
        } else {
            None
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorpusWarning {
    DuplicateRecord(String),
    YearOutOfRange { record_id: String, year: i32 },
    NoAuthors(String),
}

impl fmt::Display for CorpusWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusWarning::DuplicateRecord(id) => write!(f, "duplicate record {id} dropped"),
            CorpusWarning::YearOutOfRange { record_id, year } => {
                write!(f, "record {record_id} year {year} outside corpus range, dropped")
            }
            CorpusWarning::NoAuthors(id) => write!(f, "record {id} has no authors, dropped"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    /// Inclusive publication-year window; `None` keeps every year.
    pub year_range: Option<(i32, i32)>,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            year_range: Some(DEFAULT_YEAR_RANGE),
        }
    }
}

/// Validated, deduplicated, reference-matched set of records. Immutable once built.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    records: Vec<BiblioRecord>,
    index: HashMap<String, usize>,
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub corpus: Corpus,
    pub warnings: Vec<CorpusWarning>,
}

/// Deduplicates (first occurrence wins), normalizes names and resolves cited
/// references against record ids inside the corpus.
pub fn normalize_corpus(records: Vec<BiblioRecord>, opts: &NormalizeOptions) -> Normalized {
    let mut warnings = Vec::new();
    let mut kept: Vec<BiblioRecord> = Vec::with_capacity(records.len());
    let mut seen = BTreeSet::new();
    for mut rec in records {
        if !seen.insert(rec.record_id.clone()) {
            log::warn!("duplicate record {} dropped", rec.record_id);
            warnings.push(CorpusWarning::DuplicateRecord(rec.record_id));
            continue;
        }
        if let Some((lo, hi)) = opts.year_range {
            if rec.year < lo || rec.year > hi {
                warnings.push(CorpusWarning::YearOutOfRange {
                    record_id: rec.record_id,
                    year: rec.year,
                });
                continue;
            }
        }
        for a in &mut rec.authors {
            a.last_name = normalize_last_name(&a.last_name);
            a.initials = normalize_initials(&a.initials);
        }
        rec.authors.retain(|a| !a.last_name.is_empty());
        if rec.authors.is_empty() {
            warnings.push(CorpusWarning::NoAuthors(rec.record_id));
            continue;
        }
        kept.push(rec);
    }
    Normalized {
        corpus: Corpus::from_records_matched(kept),
        warnings,
    }
}

impl Corpus {
    /// Builds the index and re-resolves every cited reference. Matches that
    /// point outside the record set or back at the citing record are cleared.
    fn from_records_matched(mut records: Vec<BiblioRecord>) -> Corpus {
        let index: HashMap<String, usize> = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.record_id.clone(), i))
            .collect();
        let years: HashMap<String, i32> =
            records.iter().map(|r| (r.record_id.clone(), r.year)).collect();
        for rec in &mut records {
            let own = rec.record_id.clone();
            for cr in &mut rec.cited_refs {
                let matched = cr
                    .matched_record_id
                    .take()
                    .filter(|m| index.contains_key(m))
                    .or_else(|| match_reference(&cr.raw, &index));
                cr.matched_record_id = matched.filter(|m| *m != own);
                if cr.year.is_none() {
                    cr.year = cr.matched_record_id.as_ref().and_then(|m| years.get(m).copied());
                }
            }
        }
        Corpus { records, index }
    }

    pub fn records(&self) -> &[BiblioRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, record_id: &str) -> Option<&BiblioRecord> {
        self.index.get(record_id).map(|&i| &self.records[i])
    }

    pub fn contains(&self, record_id: &str) -> bool {
        self.index.contains_key(record_id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BiblioRecord> {
        self.records.iter()
    }

    /// Canonical newline-delimited form; see the module docs for field order.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        for rec in &self.records {
            out.push_str(&serde_json::to_string(rec).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_canonical(text: &str) -> Result<Corpus> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: BiblioRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            records.push(rec);
        }
        Ok(normalize_corpus(records, &NormalizeOptions { year_range: None }).corpus)
    }

    pub fn read_canonical(path: &Path) -> Result<Corpus> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Corpus::from_canonical(&text)
    }

    pub fn write_canonical(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical()).map_err(|e| Error::io(path, e))
    }

    /// Overrides author identities with externally resolved ids.
    pub fn with_disambiguation(&self, map: &DisambiguationMap) -> Corpus {
        let mut records = self.records.clone();
        for rec in &mut records {
            for (pos, author) in rec.authors.iter_mut().enumerate() {
                if let Some(id) = map.resolve(&rec.record_id, pos + 1) {
                    author.resolved_id = Some(id.to_string());
                }
            }
        }
        Corpus::from_records_matched(records)
    }

    /// Keeps only the given records (in corpus order), re-resolving references.
    pub fn restrict<F: FnMut(&BiblioRecord) -> bool>(&self, mut keep: F) -> Corpus {
        let records = self.records.iter().filter(|r| keep(r)).cloned().collect();
        Corpus::from_records_matched(records)
    }

    pub fn year_span(&self) -> Option<(i32, i32)> {
        let lo = self.records.iter().map(|r| r.year).min()?;
        let hi = self.records.iter().map(|r| r.year).max()?;
        Some((lo, hi))
    }
}

fn match_reference(raw: &str, index: &HashMap<String, usize>) -> Option<String> {
    let raw = raw.trim();
    if index.contains_key(raw) {
        return Some(raw.to_string());
    }
    raw.split(',')
        .map(str::trim)
        .find(|tok| index.contains_key(*tok))
        .map(str::to_string)
}

/// Result of [`apply_subject_filter`].
#[derive(Clone, Debug)]
pub struct Filtered {
    pub corpus: Corpus,
    pub removed: usize,
}

/// Keeps records whose subject categories intersect `allowed`.
pub fn apply_subject_filter(corpus: &Corpus, allowed: &BTreeSet<String>) -> Result<Filtered> {
    if allowed.is_empty() {
        return Err(Error::invalid("subject filter needs at least one category"));
    }
    let filtered =
        corpus.restrict(|r| r.subject_categories.iter().any(|c| allowed.contains(c)));
    let removed = corpus.len() - filtered.len();
    log::info!("subject filter removed {removed} records");
    Ok(Filtered {
        corpus: filtered,
        removed,
    })
}

/// External author disambiguation: `(record_id, 1-based author position) -> resolved id`.
#[derive(Clone, Debug, Default)]
pub struct DisambiguationMap {
    entries: BTreeMap<(String, usize), String>,
}

impl DisambiguationMap {
    pub fn insert(&mut self, record_id: &str, position: usize, resolved: &str) {
        self.entries
            .insert((record_id.to_string(), position), resolved.to_string());
    }

    pub fn resolve(&self, record_id: &str, position: usize) -> Option<&str> {
        self.entries
            .get(&(record_id.to_string(), position))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `record_id,author_position,resolved_id` rows (header required).
    pub fn from_reader<R: Read>(reader: R) -> Result<DisambiguationMap> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut map = DisambiguationMap::default();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let bad = |msg: &str| Error::Parse {
                line: i + 2,
                message: msg.to_string(),
            };
            let rec = row.get(0).ok_or_else(|| bad("missing record_id"))?;
            let pos: usize = row
                .get(1)
                .and_then(|p| p.parse().ok())
                .filter(|&p| p >= 1)
                .ok_or_else(|| bad("author_position must be a positive integer"))?;
            let id = row.get(2).filter(|s| !s.is_empty()).ok_or_else(|| bad("missing resolved_id"))?;
            map.insert(rec, pos, id);
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, year: i32, refs: &[&str]) -> BiblioRecord {
        let mut r = BiblioRecord::new(id, year, vec![AuthorName::new("Smith", "J")]);
        r.cited_refs = refs.iter().map(|s| CitedRef::new(s)).collect();
        r
    }

    #[test]
    fn duplicate_ids_first_wins() {
        let mut a = rec("A1", 1995, &[]);
        a.title = "first".into();
        let mut b = rec("A1", 1996, &[]);
        b.title = "second".into();
        let out = normalize_corpus(vec![a, b], &NormalizeOptions::default());
        assert_eq!(out.corpus.len(), 1);
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.corpus.get("A1").unwrap().title, "first");
    }

    #[test]
    fn reference_equal_to_record_id_is_matched() {
        let recs = vec![rec("A1", 1995, &["A2"]), rec("A2", 1993, &["A2", "X9"])];
        let c = normalize_corpus(recs, &NormalizeOptions::default()).corpus;
        let a1 = c.get("A1").unwrap();
        assert_eq!(a1.cited_refs[0].matched_record_id.as_deref(), Some("A2"));
        assert_eq!(a1.cited_refs[0].year, Some(1993));
        // self reference never matches
        let a2 = c.get("A2").unwrap();
        assert_eq!(a2.cited_refs[0].matched_record_id, None);
        assert_eq!(a2.cited_refs[1].matched_record_id, None);
    }

    #[test]
    fn ref_year_token() {
        assert_eq!(extract_ref_year("DOE K, 1993, J CHEM, V12, P4"), Some(1993));
        assert_eq!(extract_ref_year("DOE K, J CHEM, V12"), None);
        assert_eq!(extract_ref_year("1993"), None);
    }

    #[test]
    fn names_are_folded_to_ascii_uppercase() {
        assert_eq!(normalize_last_name("Müller-Lüdenscheidt"), "MULLER-LUDENSCHEIDT");
        assert_eq!(normalize_last_name("  de  la   Cruz "), "DE LA CRUZ");
        assert_eq!(normalize_initials("J.-A."), "JA");
    }

    #[test]
    fn year_range_enforced() {
        let out = normalize_corpus(vec![rec("A", 1980, &[])], &NormalizeOptions::default());
        assert!(out.corpus.is_empty());
        assert!(matches!(out.warnings[0], CorpusWarning::YearOutOfRange { .. }));
    }

    #[test]
    fn subject_filter() {
        let mut a = rec("A", 1995, &["B"]);
        a.subject_categories.insert("CHEM".into());
        let mut b = rec("B", 1995, &[]);
        b.subject_categories.insert("MED".into());
        let c = normalize_corpus(vec![a, b], &NormalizeOptions::default()).corpus;

        let allowed: BTreeSet<String> = ["CHEM", "PHYS"].iter().map(|s| s.to_string()).collect();
        let f = apply_subject_filter(&c, &allowed).unwrap();
        assert_eq!(f.removed, 1);
        assert!(f.corpus.contains("A"));
        // the dangling match to the removed record is cleared
        assert_eq!(f.corpus.get("A").unwrap().cited_refs[0].matched_record_id, None);

        let all: BTreeSet<String> = ["CHEM", "MED"].iter().map(|s| s.to_string()).collect();
        assert_eq!(apply_subject_filter(&c, &all).unwrap().corpus, c);
        assert!(apply_subject_filter(&c, &BTreeSet::new()).is_err());
    }

    #[test]
    fn disambiguation_overrides_name_key() {
        let recs = vec![rec("A", 1995, &[]), rec("B", 1996, &[])];
        let c = normalize_corpus(recs, &NormalizeOptions::default()).corpus;
        let map = DisambiguationMap::from_reader(
            "record_id,author_position,resolved_id\nA,1,smith-1\nB,1,smith-2\n".as_bytes(),
        )
        .unwrap();
        let d = c.with_disambiguation(&map);
        assert_eq!(d.get("A").unwrap().author_ids(), vec![AuthorId("smith-1".into())]);
        assert_eq!(d.get("B").unwrap().author_ids(), vec![AuthorId("smith-2".into())]);
        assert_eq!(c.get("A").unwrap().author_ids(), vec![AuthorId("SMITH, J".into())]);
    }
}
