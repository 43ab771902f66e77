//! Country names, ISO codes and the continent buckets used for geographic overlays.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../data/countries.csv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Continent {
    Asia,
    Europe,
    NorthAmerica,
    Other,
}

impl Continent {
    pub fn abbrev(self) -> &'static str {
        match self {
            Continent::Asia => "AS",
            Continent::Europe => "EU",
            Continent::NorthAmerica => "NA",
            Continent::Other => "OT",
        }
    }

    pub fn parse(s: &str) -> Option<Continent> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ASIA" | "AS" => Some(Continent::Asia),
            "EUROPE" | "EU" => Some(Continent::Europe),
            "NORTH AMERICA" | "NORTH-AMERICA" | "NA" => Some(Continent::NorthAmerica),
            "OTHER" | "OT" => Some(Continent::Other),
            _ => None,
        }
    }
}

impl fmt::Display for Continent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Continent::Asia => "Asia",
            Continent::Europe => "Europe",
            Continent::NorthAmerica => "North America",
            Continent::Other => "Other",
        })
    }
}

/// Maps address country names to ISO alpha-2 codes and codes to continents.
#[derive(Clone, Debug, Default)]
pub struct CountryTable {
    by_name: BTreeMap<String, String>,
    first_name: BTreeMap<String, String>,
    continent: BTreeMap<String, Continent>,
}

impl CountryTable {
    /// The table shipped in `data/countries.csv`.
    pub fn bundled() -> &'static CountryTable {
        static TABLE: OnceLock<CountryTable> = OnceLock::new();
        TABLE.get_or_init(|| CountryTable::parse(BUNDLED).expect("bundled country table is valid"))
    }

    /// Parses `iso2,continent,name|alias|...` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<CountryTable> {
        let mut table = CountryTable::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.splitn(3, ',');
            let (Some(code), Some(cont)) = (cols.next(), cols.next()) else {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected iso2,continent[,names]".into(),
                });
            };
            let code = code.trim().to_ascii_uppercase();
            let cont = Continent::parse(cont).ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("unknown continent '{cont}'"),
            })?;
            if let Some(names) = cols.next() {
                for name in names.split('|').map(str::trim).filter(|n| !n.is_empty()) {
                    let name = name.to_ascii_uppercase();
                    table.first_name.entry(code.clone()).or_insert_with(|| name.clone());
                    table.by_name.insert(name, code.clone());
                }
            }
            table.continent.insert(code, cont);
        }
        Ok(table)
    }

    pub fn continent_of(&self, code: &str) -> Option<Continent> {
        self.continent.get(code).copied()
    }

    /// Preferred address spelling for a code.
    pub fn name_for_code(&self, code: &str) -> Option<&str> {
        self.first_name.get(code).map(String::as_str)
    }

    pub fn contains_code(&self, code: &str) -> bool {
        self.continent.contains_key(code)
    }

    /// Resolves the trailing country token of an address line.
    pub fn code_for_name(&self, token: &str) -> Option<String> {
        let token = token.trim().trim_end_matches('.').trim().to_ascii_uppercase();
        if token.is_empty() {
            return None;
        }
        if let Some(code) = self.by_name.get(&token) {
            return Some(code.clone());
        }
        // US addresses end with "<state> <zip> USA"
        if let Some(last) = token.split_whitespace().last() {
            if let Some(code) = self.by_name.get(last) {
                return Some(code.clone());
            }
        }
        if token.len() == 2 && self.continent.contains_key(&token) {
            return Some(token);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_common_address_tails() {
        let t = CountryTable::bundled();
        assert_eq!(t.code_for_name("Germany.").as_deref(), Some("DE"));
        assert_eq!(t.code_for_name("CA 94305 USA").as_deref(), Some("US"));
        assert_eq!(t.code_for_name("Peoples R China").as_deref(), Some("CN"));
        assert_eq!(t.code_for_name("JP").as_deref(), Some("JP"));
        assert_eq!(t.code_for_name("Atlantis"), None);
        assert_eq!(t.continent_of("CA"), Some(Continent::NorthAmerica));
        assert_eq!(t.continent_of("BR"), Some(Continent::Other));
        assert_eq!(t.name_for_code("US"), Some("USA"));
    }
}
