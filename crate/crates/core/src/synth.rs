//! Seeded synthetic corpora with planted research groups, topics, countries
//! and citation habits. Used for the bundled toy corpus and for demos.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorName, BiblioRecord, CitedRef};

struct Topic {
    journals: &'static [&'static str],
    words: &'static [&'static str],
    category: &'static str,
}

const TOPICS: [Topic; 4] = [
    Topic {
        journals: &["TETRAHEDRON LETT", "ORGANIC LETT", "J ORG CHEM"],
        words: &["asymmetric", "synthesis", "ketone", "enantioselective", "alkene", "coupling", "ligand", "total"],
        category: "Chemistry",
    },
    Topic {
        journals: &["MACROMOLECULES", "POLYMER", "J POLYM SCI A"],
        words: &["polymerization", "block", "copolymer", "living", "chain", "norbornene", "ring", "opening"],
        category: "Polymer Science",
    },
    Topic {
        journals: &["ORGANOMETALLICS", "INORG CHEM", "DALTON T"],
        words: &["ruthenium", "complex", "carbene", "tungsten", "metallacycle", "crystal", "structure", "bonding"],
        category: "Chemistry",
    },
    Topic {
        journals: &["J CATAL", "APPL CATAL A-GEN", "J MOL CATAL A-CHEM"],
        words: &["supported", "catalyst", "silica", "heterogeneous", "immobilized", "activity", "surface", "grafted"],
        category: "Chemistry",
    },
];

const COUNTRIES: [&str; 12] = ["US", "DE", "JP", "CN", "GB", "FR", "CA", "KR", "IT", "CH", "ES", "IN"];

const SURNAMES: [&str; 48] = [
    "WANG", "LI", "ZHANG", "KIM", "LEE", "PARK", "SATO", "SUZUKI", "TANAKA", "MULLER", "SCHMIDT", "FISCHER",
    "MARTIN", "BERNARD", "DUBOIS", "SMITH", "JONES", "BROWN", "TAYLOR", "WILSON", "ROSSI", "RUSSO", "GARCIA",
    "LOPEZ", "PATEL", "SHARMA", "NGUYEN", "CHEN", "LIU", "YANG", "HUANG", "ZHAO", "WU", "ZHOU", "SUN", "MA",
    "HOFFMANN", "WAGNER", "BECKER", "KOCH", "RICHTER", "KLEIN", "MOORE", "CLARK", "LEWIS", "WALKER", "HALL",
    "YOUNG",
];

const INITIALS: [&str; 12] = ["A", "B", "C", "D", "E", "F", "G", "H", "J", "K", "M", "R"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub records: usize,
    pub groups: usize,
    pub members_per_group: usize,
    pub first_year: i32,
    pub last_year: i32,
    /// Chance that a paper adds an author from the partner group.
    pub partner_rate: f64,
    /// Chance that a paper adds a one-time author.
    pub guest_rate: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            records: 200,
            groups: 12,
            members_per_group: 10,
            first_year: 1991,
            last_year: 2010,
            partner_rate: 0.15,
            guest_rate: 0.1,
            seed: 42,
        }
    }
}

struct Group {
    country: &'static str,
    topic: usize,
    members: Vec<AuthorName>,
}

fn make_groups(p: &SynthParams, rng: &mut ChaCha8Rng) -> Vec<Group> {
    (0..p.groups)
        .map(|g| {
            let members = (0..p.members_per_group)
                .map(|_| {
                    let last = SURNAMES.choose(rng).expect("non-empty");
                    let init = format!("{}{}", INITIALS.choose(rng).unwrap(), INITIALS.choose(rng).unwrap());
                    AuthorName::new(last, &init)
                })
                .collect();
            Group {
                country: COUNTRIES[g % COUNTRIES.len()],
                topic: g % TOPICS.len(),
                members,
            }
        })
        .collect()
}

/// Flat-file rendering of `synth_corpus(&SynthParams::default())`.
pub const TOY_CORPUS: &str = include_str!("../data/toy_corpus.wos");

pub fn wos_id(n: usize) -> String {
    format!("WOS:{n:015}")
}

fn title(topic: &Topic, rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(4..=6);
    let mut words: Vec<&str> = topic.words.choose_multiple(rng, n).copied().collect();
    words.insert(1, "of");
    let mut t = words.join(" ");
    if let Some(first) = t.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    t
}

fn reference_to(rec: &BiblioRecord) -> String {
    let a = &rec.authors[0];
    format!("{} {}, {}, {}, {}", a.last_name, a.initials, rec.year, rec.journal, rec.record_id)
}

fn external_reference(topic: &Topic, year: i32, rng: &mut ChaCha8Rng) -> String {
    format!(
        "{} {}, {}, {}, V{}, P{}",
        SURNAMES.choose(rng).unwrap(),
        INITIALS.choose(rng).unwrap(),
        year,
        topic.journals.choose(rng).unwrap(),
        rng.gen_range(1..120),
        rng.gen_range(1..3000)
    )
}

/// Records with ids `WOS:000000000000001..`, in publication order.
pub fn synth_corpus(p: &SynthParams) -> Vec<BiblioRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let p = &SynthParams {
        groups: p.groups.max(1),
        members_per_group: p.members_per_group.max(1),
        ..*p
    };
    let groups = make_groups(p, &mut rng);
    let span = (p.last_year - p.first_year).max(0) as f64;
    let mut out: Vec<BiblioRecord> = Vec::with_capacity(p.records);
    let mut guests = 0usize;
    let mut origin: Vec<usize> = Vec::with_capacity(p.records);
    for n in 0..p.records {
        // output grows over the period
        let frac = ((n as f64 + 0.5) / p.records.max(1) as f64).sqrt();
        let year = p.first_year + (frac * span).floor() as i32;
        let g = rng.gen_range(0..groups.len());
        let group = &groups[g];
        let topic_idx = if rng.gen_bool(0.8) {
            group.topic
        } else {
            (group.topic + 1) % TOPICS.len()
        };
        let topic = &TOPICS[topic_idx];

        let mut authors = vec![group.members[0].clone()];
        let mut countries = vec![group.country];
        let extra = rng.gen_range(1..=2);
        for m in group.members[1..].choose_multiple(&mut rng, extra) {
            authors.push(m.clone());
            countries.push(group.country);
        }
        if rng.gen_bool(p.partner_rate) {
            // groups sit on a ring and collaborate with their neighbours
            let n = groups.len();
            let partner = &groups[if rng.gen_bool(0.5) { (g + 1) % n } else { (g + n - 1) % n }];
            let m = partner.members.choose(&mut rng).unwrap().clone();
            if !authors.contains(&m) {
                authors.push(m);
                countries.push(partner.country);
            }
        }
        if rng.gen_bool(p.guest_rate) {
            guests += 1;
            authors.push(AuthorName::new(&format!("GUEST{guests}"), "X"));
            countries.push(group.country);
        }

        let id = wos_id(n + 1);
        let mut rec = BiblioRecord::new(&id, year, authors);
        rec.title = title(topic, &mut rng);
        rec.journal = topic.journals.choose(&mut rng).unwrap().to_string();
        rec.subject_categories.insert(topic.category.to_string());
        if rng.gen_bool(0.1) {
            rec.subject_categories.insert("Physics".to_string());
        }
        rec.addresses = countries.iter().map(|c| c.to_string()).collect();

        let earlier = || out.iter().zip(&origin).filter(|(r, _)| r.year < year);
        let own: Vec<&BiblioRecord> = earlier().filter(|(_, &o)| o == g).map(|(r, _)| r).collect();
        let same: Vec<&BiblioRecord> = earlier()
            .filter(|(r, _)| TOPICS[topic_idx].journals.contains(&r.journal.as_str()))
            .map(|(r, _)| r)
            .collect();
        let any: Vec<&BiblioRecord> = earlier().map(|(r, _)| r).collect();
        let mut cited: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(3..=6) {
            let roll: f64 = rng.gen();
            let pool = if roll < 0.4 && !own.is_empty() {
                &own
            } else if roll < 0.9 || any.is_empty() {
                &same
            } else {
                &any
            };
            if let Some(r) = pool.choose(&mut rng) {
                let s = reference_to(r);
                if !cited.contains(&s) {
                    cited.push(s);
                }
            }
        }
        for _ in 0..rng.gen_range(2..=4) {
            let y = year - rng.gen_range(1..=8);
            cited.push(external_reference(topic, y, &mut rng));
        }
        rec.cited_refs = cited.iter().map(|s| CitedRef::new(s)).collect();
        out.push(rec);
        origin.push(g);
    }
    out
}

/// One researcher's full output over two self-citing topic strands; ids of
/// the first strand are `<prefix>A<n>`, the second `<prefix>B<n>`.
pub fn synth_researcher(prefix: &str, per_strand: usize, seed: u64) -> Vec<BiblioRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = AuthorName::new("SYNTHPI", "Q");
    let mut out = Vec::new();
    for (s, topic) in [(&"A", &TOPICS[0]), (&"B", &TOPICS[3])] {
        let ids: Vec<String> = (0..per_strand).map(|i| format!("{prefix}{s}{i}")).collect();
        for (i, id) in ids.iter().enumerate() {
            let mut r = BiblioRecord::new(id, 1995 + i as i32, vec![pi.clone()]);
            r.title = title(topic, &mut rng);
            r.journal = topic.journals[0].to_string();
            let cites: Vec<&String> = ids[..i].iter().rev().take(3).collect();
            r.cited_refs = cites.into_iter().map(|c| CitedRef::new(&format!("SYNTHPI Q, 1995, {c}"))).collect();
            out.push(r);
        }
    }
    out
}
