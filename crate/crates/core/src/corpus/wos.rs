//! Reader for tagged flat-file exports (two-letter field tags, `ER` record terminator,
//! continuation lines indented by three spaces).

use std::io::Read;

use crate::corpus::{AuthorName, BiblioRecord, CitedRef};
use crate::country::CountryTable;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based line number of the first line of the rejected block.
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct WosParse {
    pub records: Vec<BiblioRecord>,
    pub rejected: Vec<Rejection>,
}

#[derive(Default)]
struct Block {
    start_line: usize,
    fields: Vec<(String, Vec<String>)>,
}

impl Block {
    fn values<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a String> + 'a {
        self.fields
            .iter()
            .filter(move |(t, _)| t == tag)
            .flat_map(|(_, v)| v.iter())
    }

    fn joined(&self, tag: &str) -> Option<String> {
        let parts: Vec<&str> = self.values(tag).map(String::as_str).collect();
        (!parts.is_empty()).then(|| parts.join(" "))
    }
}

pub fn parse_wos_flatfile<R: Read>(mut input: R) -> Result<WosParse> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<input>", e))?;
    let text = String::from_utf8_lossy(&bytes);
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    let countries = CountryTable::bundled();

    let mut out = WosParse::default();
    let mut block: Option<Block> = None;

    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("   ") {
            if let Some((_, vals)) = block.as_mut().and_then(|b| b.fields.last_mut()) {
                vals.push(rest.trim().to_string());
            }
            continue;
        }
        let (tag, value) = split_tag(line);
        match tag {
            "FN" | "VR" | "EF" if block.is_none() => continue,
            "ER" => {
                if let Some(b) = block.take() {
                    match build_record(&b, countries) {
                        Ok(rec) => out.records.push(rec),
                        Err(reason) => {
                            log::warn!("rejected record at line {}: {reason}", b.start_line);
                            out.rejected.push(Rejection {
                                line: b.start_line,
                                reason,
                            });
                        }
                    }
                }
            }
            _ => {
                let b = block.get_or_insert_with(|| Block {
                    start_line: lineno,
                    fields: Vec::new(),
                });
                b.fields.push((tag.to_string(), vec![value.to_string()]));
            }
        }
    }
    if let Some(b) = block {
        out.rejected.push(Rejection {
            line: b.start_line,
            reason: "unterminated record (missing ER)".into(),
        });
    }
    Ok(out)
}

/// Writes records in the tagged flat-file layout read by [`parse_wos_flatfile`].
/// Resolved author identities are not representable and are dropped.
pub fn write_wos_flatfile(records: &[BiblioRecord]) -> String {
    let countries = CountryTable::bundled();
    let mut out = String::from("FN Thomson Reuters Web of Science\nVR 1.0\n");
    let field = |out: &mut String, tag: &str, values: &mut dyn Iterator<Item = String>| {
        for (i, v) in values.enumerate() {
            out.push_str(if i == 0 { tag } else { "  " });
            out.push(' ');
            out.push_str(&v);
            out.push('\n');
        }
    };
    for r in records {
        out.push_str("PT J\n");
        field(
            &mut out,
            "AU",
            &mut r.authors.iter().map(|a| {
                if a.initials.is_empty() {
                    a.last_name.clone()
                } else {
                    format!("{}, {}", a.last_name, a.initials)
                }
            }),
        );
        if !r.title.is_empty() {
            field(&mut out, "TI", &mut std::iter::once(r.title.clone()));
        }
        if !r.journal.is_empty() {
            field(&mut out, "SO", &mut std::iter::once(r.journal.clone()));
        }
        field(
            &mut out,
            "C1",
            &mut r.addresses.iter().map(|code| {
                let name = countries.name_for_code(code).unwrap_or(code);
                format!("Inst, {name}.")
            }),
        );
        field(&mut out, "CR", &mut r.cited_refs.iter().map(|c| c.raw.clone()));
        out.push_str(&format!("PY {}\n", r.year));
        if !r.subject_categories.is_empty() {
            let sc: Vec<&str> = r.subject_categories.iter().map(String::as_str).collect();
            out.push_str(&format!("SC {}\n", sc.join("; ")));
        }
        out.push_str(&format!("UT {}\nER\n\n", r.record_id));
    }
    out.push_str("EF\n");
    out
}

fn split_tag(line: &str) -> (&str, &str) {
    let tag_end = line.char_indices().nth(2).map(|(i, _)| i).unwrap_or(line.len());
    let (tag, rest) = line.split_at(tag_end);
    (tag, rest.trim())
}

fn build_record(b: &Block, countries: &CountryTable) -> std::result::Result<BiblioRecord, String> {
    let id = b
        .values("UT")
        .next()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .ok_or("missing UT")?;
    let year_raw = b.values("PY").next().ok_or("missing PY")?;
    let year: i32 = year_raw
        .trim()
        .parse()
        .map_err(|_| format!("unparseable PY '{year_raw}'"))?;
    let authors: Vec<AuthorName> = b.values("AU").filter_map(|s| parse_author(s)).collect();
    if authors.is_empty() {
        return Err("missing AU".into());
    }
    let mut rec = BiblioRecord::new(&id, year, authors);
    rec.title = b.joined("TI").unwrap_or_default();
    rec.journal = b.joined("SO").unwrap_or_default();
    if let Some(sc) = b.joined("SC") {
        rec.subject_categories = sc
            .split(';')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
    }
    rec.addresses = b
        .values("C1")
        .filter_map(|addr| address_country(addr, countries))
        .collect();
    rec.cited_refs = b
        .values("CR")
        .filter(|s| !s.trim().is_empty())
        .map(|s| CitedRef::new(s))
        .collect();
    Ok(rec)
}

/// `Smith, JA` / `SMITH JA` / `Smith`.
fn parse_author(s: &str) -> Option<AuthorName> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (last, initials) = match s.split_once(',') {
        Some((l, i)) => (l, i),
        None => match s.rsplit_once(' ') {
            Some((l, i)) if i.chars().all(|c| c.is_uppercase() || c == '.') => (l, i),
            _ => (s, ""),
        },
    };
    let name = AuthorName::new(last, initials);
    (!name.last_name.is_empty()).then_some(name)
}

fn address_country(addr: &str, countries: &CountryTable) -> Option<String> {
    let addr = match addr.trim().strip_prefix('[') {
        Some(rest) => rest.split_once(']').map(|(_, a)| a).unwrap_or(rest),
        None => addr,
    };
    let tail = addr.trim().trim_end_matches('.').rsplit(',').next()?;
    let code = countries.code_for_name(tail);
    if code.is_none() {
        log::debug!("unrecognized country in address '{addr}'");
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_block() {
        let out = parse_wos_flatfile("AU SMITH, J\nPY 1995\nUT A1\nER\n".as_bytes()).unwrap();
        assert!(out.rejected.is_empty());
        assert_eq!(out.records.len(), 1);
        let r = &out.records[0];
        assert_eq!(r.record_id, "A1");
        assert_eq!(r.year, 1995);
        assert_eq!(r.authors, vec![AuthorName::new("SMITH", "J")]);
    }

    #[test]
    fn missing_ut_rejected_with_line() {
        let text = "FN Export\nVR 1.0\nPT J\nAU SMITH, J\nPY 1995\nER\nPT J\nAU DOE, K\nPY 1996\nUT B\nER\nEF\n";
        let out = parse_wos_flatfile(text.as_bytes()).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.rejected.len(), 1);
        assert_eq!(out.rejected[0].line, 3);
        assert_eq!(out.rejected[0].reason, "missing UT");
    }

    #[test]
    fn writer_roundtrip() {
        let text = "PT J\nAU Smith, J\n   Doe, K\nTI A title\nSO J X\nC1 [Smith, J] U, Boston, MA 02115 USA.\n   U, Tokyo, Japan.\nCR DOE K, 1993, J CHEM, V12, P4\nPY 1997\nSC Chemistry; Physics\nUT W1\nER\n";
        let first = parse_wos_flatfile(text.as_bytes()).unwrap().records;
        let again = parse_wos_flatfile(write_wos_flatfile(&first).as_bytes()).unwrap();
        assert!(again.rejected.is_empty());
        assert_eq!(again.records, first);
    }

    #[test]
    fn empty_input() {
        let out = parse_wos_flatfile("".as_bytes()).unwrap();
        assert!(out.records.is_empty() && out.rejected.is_empty());
    }

    #[test]
    fn continuation_lines_and_fields() {
        let text = "\
PT J
AU Smith, J
   Müller, KA
AF Smith, John
   Mueller, Karl A.
TI Catalytic metathesis of
   strained olefins
SO TETRAHEDRON LETT
C1 [Smith, J] Univ Calif Berkeley, Dept Chem, Berkeley, CA 94720 USA.
   [Muller, KA] Max Planck Inst, D-45470 Mulheim, Germany.
CR DOE K, 1993, J CHEM, V12, P4
   ROE P, J ORG CHEM, V1, P2
PY 1997
SC Chemistry; Polymer Science
UT WOS:000001
ER
";
        let out = parse_wos_flatfile(text.as_bytes()).unwrap();
        let r = &out.records[0];
        assert_eq!(r.authors.len(), 2);
        assert_eq!(r.authors[1].last_name, "MULLER");
        assert_eq!(r.authors[1].initials, "KA");
        assert_eq!(r.title, "Catalytic metathesis of strained olefins");
        assert_eq!(r.addresses, vec!["US".to_string(), "DE".to_string()]);
        assert_eq!(r.cited_refs.len(), 2);
        assert_eq!(r.cited_refs[0].year, Some(1993));
        assert_eq!(r.cited_refs[0].matched_record_id, None);
        assert_eq!(r.cited_refs[1].year, None);
        assert!(r.subject_categories.contains("Polymer Science"));
    }
}
