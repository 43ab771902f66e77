use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorId, Corpus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorEntry {
    pub publication_count: usize,
    pub record_ids: BTreeSet<String>,
    pub last_name: String,
}

/// Authors meeting the publication threshold, plus what the threshold removed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorTable {
    pub entries: BTreeMap<AuthorId, AuthorEntry>,
    pub min_pubs: usize,
    /// Distinct identities before filtering.
    pub total_authors: usize,
    /// Identities with exactly one publication (before filtering).
    pub one_time_authors: usize,
    /// Identities dropped by `min_pubs`.
    pub removed: usize,
}

impl AuthorTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &AuthorId) -> bool {
        self.entries.contains_key(id)
    }

    pub fn get(&self, id: &AuthorId) -> Option<&AuthorEntry> {
        self.entries.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AuthorId, &AuthorEntry)> {
        self.entries.iter()
    }
}

pub fn build_author_table(corpus: &Corpus, min_pubs: usize) -> AuthorTable {
    let min_pubs = min_pubs.max(1);
    let mut all: BTreeMap<AuthorId, AuthorEntry> = BTreeMap::new();
    for rec in corpus.iter() {
        let mut seen = BTreeSet::new();
        for name in &rec.authors {
            let id = name.identity();
            if !seen.insert(id.clone()) {
                continue;
            }
            let e = all.entry(id).or_insert_with(|| AuthorEntry {
                publication_count: 0,
                record_ids: BTreeSet::new(),
                last_name: name.last_name.clone(),
            });
            e.record_ids.insert(rec.record_id.clone());
            e.publication_count = e.record_ids.len();
        }
    }
    let total_authors = all.len();
    let one_time_authors = all.values().filter(|e| e.publication_count == 1).count();
    let entries: BTreeMap<_, _> = all
        .into_iter()
        .filter(|(_, e)| e.publication_count >= min_pubs)
        .collect();
    AuthorTable {
        removed: total_authors - entries.len(),
        entries,
        min_pubs,
        total_authors,
        one_time_authors,
    }
}

/// Number of distinct author identities per last name.
pub fn last_name_commonality(table: &AuthorTable) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for e in table.entries.values() {
        *out.entry(e.last_name.clone()).or_insert(0) += 1;
    }
    out
}
