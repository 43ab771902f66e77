mod common;

use std::collections::{BTreeMap, BTreeSet};

use bibnet::affinity::{
    association_from_counts, expected_counts, out_of_area_counts, residual_row, AssociationMode,
};
use bibnet::collab::{geographic_propensity, GeoLabel};
use bibnet::community::{compute_flow, nmi, planted_partition, Partition, DEFAULT_TELEPORT};
use bibnet::corpus::{
    normalize_corpus, parse_wos_flatfile, write_wos_flatfile, AuthorName, BiblioRecord, CitedRef,
    Corpus, NormalizeOptions,
};
use bibnet::country::Continent;
use bibnet::graph::{build_citation_graph, build_coauthor_graph, component_stats, CoauthorOptions, NetworkBuilder};
use bibnet::pipeline::format_count;
use bibnet::roles::{participation_coefficient, within_module_z};
use bibnet::topics::{inter_area_citation_network, reference_inclusion_rate, TopicArea};
use proptest::prelude::*;

fn edge_list(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, u32)>)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 1u32..5), 1..3 * n)
                .prop_filter("needs a non-loop edge", |es| es.iter().any(|(u, v, _)| u != v)),
        )
    })
}

fn build(n: usize, edges: &[(usize, usize, u32)], directed: bool) -> bibnet::graph::Network {
    let mut b = NetworkBuilder::new(directed);
    for i in 0..n {
        b.add_node(&format!("n{i}"));
    }
    for &(u, v, w) in edges.iter().filter(|(u, v, _)| u != v) {
        b.add_edge(&format!("n{u}"), &format!("n{v}"), w as f64);
    }
    b.build()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flows_sum_to_one_and_match_oracle((n, edges) in edge_list(8), directed in any::<bool>()) {
        let net = build(n, &edges, directed);
        let flow = compute_flow(&net, DEFAULT_TELEPORT).unwrap();
        let total: f64 = flow.node.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let (p, q) = common::oracle_flows(&net, DEFAULT_TELEPORT);
        for u in 0..net.node_count() {
            prop_assert!((flow.node[u] - p[u]).abs() < 1e-9);
            let out: f64 = flow.out[u].iter().map(|(_, f)| f).sum();
            let oracle_out: f64 = q[u].iter().sum();
            prop_assert!((out - oracle_out).abs() < 1e-9);
        }
    }

    #[test]
    fn canonical_labels_are_idempotent(labels in prop::collection::vec(0usize..20, 1..30)) {
        let ids: Vec<String> = (0..labels.len()).map(|i| format!("x{i:02}")).collect();
        let part = Partition::from_labels(&ids, &labels);
        let once = part.canonicalize();
        prop_assert!(once.is_canonical());
        prop_assert_eq!(once.canonicalize(), once.clone());
        prop_assert_eq!(once.cluster_count(), labels.iter().collect::<BTreeSet<_>>().len());
        prop_assert!((nmi(&part, &once).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nmi_is_symmetric_and_bounded(
        a in prop::collection::vec(0usize..5, 2..40),
        seed in any::<u64>(),
    ) {
        let ids: Vec<String> = (0..a.len()).map(|i| format!("x{i}")).collect();
        let b: Vec<usize> = a.iter().enumerate().map(|(i, &l)| (l + (seed as usize >> (i % 60)) % 3) % 5).collect();
        let (pa, pb) = (Partition::from_labels(&ids, &a), Partition::from_labels(&ids, &b));
        let ab = nmi(&pa, &pb).unwrap();
        let ba = nmi(&pb, &pa).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        prop_assert!((nmi(&pa, &pa).unwrap() - 1.0).abs() < 1e-12);
        // relabelling is invisible
        let relabelled: Vec<usize> = a.iter().map(|&l| 7 * l + 3).collect();
        let pr = Partition::from_labels(&ids, &relabelled);
        prop_assert!((nmi(&pr, &pb).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn expected_counts_sum_to_the_row_total(
        rows in prop::collection::vec((0u64..=50, 1u64..=500), 2..=6),
        source in any::<prop::sample::Index>(),
    ) {
        let actual: Vec<u64> = rows.iter().map(|r| r.0).collect();
        let sizes: Vec<u64> = rows.iter().map(|r| r.1).collect();
        let s = source.index(rows.len());
        let e = expected_counts(&actual, &sizes, Some(s)).unwrap();
        let total: u128 = actual.iter().enumerate().filter(|&(t, _)| t != s).map(|(_, &c)| c as u128).sum();
        prop_assert_eq!(e.numerators.iter().sum::<u128>(), total * e.denominator);
        prop_assert_eq!(e.numerators[s], 0);

        let r = residual_row(&actual, &e).unwrap();
        let weighted: f64 = (0..rows.len())
            .filter_map(|t| r.residuals[t].map(|x| x * e.value(t)))
            .sum();
        prop_assert!(weighted.abs() < 1e-9, "{weighted}");
        // an empty row expects nothing anywhere, so there is no test to run
        prop_assert_eq!(r.chi_square.is_some(), total > 0);
        if let Some(chi) = r.chi_square {
            prop_assert!(chi.statistic >= 0.0);
            prop_assert!((0.0..=1.0).contains(&chi.p_value));
            prop_assert_eq!(chi.df, rows.len() - 2);
        }
    }

    #[test]
    fn raising_the_threshold_never_adds_edges(
        cells in prop::collection::vec(prop::collection::vec(0u64..30, 4), 4),
        lo in -1.0f64..1.0,
        step in 0.0f64..2.0,
    ) {
        let m = association_from_counts(AssociationMode::Citation, vec![1, 2, 3, 4], vec![40, 30, 20, 10], zero_diagonal(cells)).unwrap();
        let loose = m.affinity_network(lo);
        let strict = m.affinity_network(lo + step);
        for (u, v, _) in strict.edges() {
            prop_assert!(loose.weight(u, v).is_some());
        }
    }

    #[test]
    fn counts_format_with_separators(n in any::<u64>()) {
        let s = format_count(n);
        prop_assert_eq!(s.replace(',', ""), n.to_string());
        let groups: Vec<&str> = s.split(',').collect();
        prop_assert!(!groups[0].is_empty() && groups[0].len() <= 3);
        prop_assert!(groups[1..].iter().all(|g| g.len() == 3));
    }

    #[test]
    fn role_scores_match_definitions((n, edges) in edge_list(12), labels in prop::collection::vec(0usize..3, 12)) {
        let net = build(n, &edges, false);
        let labels = &labels[..n];
        let ids: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        let part = Partition::from_labels(&ids, labels);
        let z = within_module_z(&net, &part).unwrap();
        let p = participation_coefficient(&net, &part).unwrap();
        let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let (oz, op) = common::oracle_roles(n, &pairs, labels);
        for i in 0..n {
            prop_assert!((z[&ids[i]] - oz[i]).abs() < 1e-12);
            prop_assert!((p[&ids[i]] - op[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn giant_component_matches_union_find((n, edges) in edge_list(30)) {
        let net = build(n, &edges, true);
        let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let sizes = common::union_find_sizes(n, &pairs);
        let stats = component_stats(&net).unwrap();
        prop_assert_eq!(stats.giant_size, sizes[0]);
        prop_assert_eq!(stats.component_count, sizes.len());
        prop_assert!((stats.giant_fraction - sizes[0] as f64 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn corpus_oracles(spec in corpus_spec()) {
        let corpus = build_corpus(&spec);
        check_graph_oracles(&corpus)?;
        check_rir_bounds(&corpus)?;
        check_association_oracles(&corpus)?;
    }

    #[test]
    fn flat_file_round_trip(recs in prop::collection::vec(record_strategy(), 1..12)) {
        let mut seen = BTreeSet::new();
        let records: Vec<BiblioRecord> = recs.into_iter().filter(|r| seen.insert(r.record_id.clone())).collect();
        let text = write_wos_flatfile(&records);
        let parsed = parse_wos_flatfile(text.as_bytes()).unwrap();
        prop_assert!(parsed.rejected.is_empty());
        prop_assert_eq!(&parsed.records, &records);
        prop_assert_eq!(write_wos_flatfile(&parsed.records), text);
    }
}

fn zero_diagonal(mut cells: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    for (i, row) in cells.iter_mut().enumerate() {
        row[i] = 0;
    }
    cells
}

/// Per record: year, author indices, cited record indices, unmatched refs.
type CorpusSpec = Vec<(i32, Vec<usize>, Vec<usize>, Vec<i32>)>;

fn corpus_spec() -> impl Strategy<Value = CorpusSpec> {
    prop::collection::vec(
        (
            1995i32..2006,
            prop::collection::vec(0usize..15, 1..4),
            prop::collection::vec(0usize..40, 0..5),
            prop::collection::vec(1990i32..2006, 0..3),
        ),
        5..40,
    )
}

fn build_corpus(spec: &CorpusSpec) -> Corpus {
    let n = spec.len();
    let records = spec
        .iter()
        .enumerate()
        .map(|(i, (year, authors, cites, outside))| {
            let names = authors.iter().map(|a| AuthorName::new(&format!("AU{}", (b'A' + *a as u8) as char), "X")).collect();
            let mut r = BiblioRecord::new(&format!("R{i:02}"), *year, names);
            for &c in cites {
                let target = c % n;
                let mut cr = CitedRef::new(&format!("AU, {}, J, R{target:02}", spec[target].0));
                cr.matched_record_id = Some(format!("R{target:02}"));
                r.cited_refs.push(cr);
            }
            for (k, y) in outside.iter().enumerate() {
                r.cited_refs.push(CitedRef::new(&format!("ELSEWHERE {k}, {y}, J OTHER, V1")));
            }
            r
        })
        .collect();
    normalize_corpus(records, &NormalizeOptions::default()).corpus
}

fn areas_of(corpus: &Corpus) -> Vec<TopicArea> {
    let mut docs: Vec<BTreeSet<String>> = vec![BTreeSet::new(); 3];
    for (i, r) in corpus.iter().enumerate() {
        docs[i % 3].insert(r.record_id.clone());
    }
    docs.into_iter()
        .enumerate()
        .map(|(i, doc_ids)| TopicArea { area_id: i + 1, doc_ids, label: None })
        .collect()
}

fn check_graph_oracles(corpus: &Corpus) -> Result<(), TestCaseError> {
    let cites = build_citation_graph(corpus);
    for r in corpus.iter() {
        let citing = corpus
            .iter()
            .filter(|o| o.record_id != r.record_id && o.cited_record_ids().any(|c| c == r.record_id))
            .count();
        if cites.contains_node(&r.record_id) {
            prop_assert_eq!(cites.in_degree(&r.record_id), citing);
        } else {
            prop_assert_eq!(citing, 0);
        }
    }
    prop_assert!(cites.edges().all(|(u, v, w)| u != v && w == 1.0));

    let table = bibnet::corpus::build_author_table(corpus, 2);
    let co = build_coauthor_graph(corpus, &table, &CoauthorOptions::default());
    for (u, v, w) in co.edges() {
        let shared = corpus
            .iter()
            .filter(|r| {
                let ids: Vec<String> = r.author_ids().into_iter().map(|a| a.0).collect();
                ids.iter().any(|a| a == u) && ids.iter().any(|a| a == v)
            })
            .count();
        prop_assert_eq!(w, shared as f64);
        prop_assert_eq!(co.weight(v, u), Some(w));
    }
    Ok(())
}

fn check_rir_bounds(corpus: &Corpus) -> Result<(), TestCaseError> {
    for area in areas_of(corpus) {
        for year in 1995..2006 {
            for window in 1..6 {
                if let Some(pt) = reference_inclusion_rate(&area, corpus, year, window).unwrap() {
                    prop_assert!((0.0..=1.0).contains(&pt.rate));
                    prop_assert!(pt.numerator <= pt.denominator && pt.denominator > 0);
                }
            }
        }
    }
    Ok(())
}

fn check_association_oracles(corpus: &Corpus) -> Result<(), TestCaseError> {
    let areas = areas_of(corpus);
    let area_of: BTreeMap<&str, usize> = areas
        .iter()
        .enumerate()
        .flat_map(|(i, a)| a.doc_ids.iter().map(move |d| (d.as_str(), i)))
        .collect();

    let mut cite = vec![vec![0u64; 3]; 3];
    for r in corpus.iter() {
        for c in r.cited_refs.iter().filter_map(|c| c.matched_record_id.as_deref()) {
            let (s, t) = (area_of[r.record_id.as_str()], area_of[c]);
            if s != t {
                cite[s][t] += 1;
            }
        }
    }
    prop_assert_eq!(&out_of_area_counts(&areas, corpus, AssociationMode::Citation).unwrap(), &cite);
    let net = inter_area_citation_network(&areas, corpus).unwrap();
    prop_assert_eq!(net.total_weight(), cite.iter().flatten().sum::<u64>() as f64);

    let mut pubs: BTreeMap<String, [u64; 3]> = BTreeMap::new();
    for r in corpus.iter() {
        for a in r.author_ids() {
            pubs.entry(a.0).or_default()[area_of[r.record_id.as_str()]] += 1;
        }
    }
    let mut activity = vec![vec![0u64; 3]; 3];
    for counts in pubs.values() {
        for s in 0..3 {
            for t in 0..3 {
                if s != t && counts[s] > 0 {
                    activity[s][t] += counts[t];
                }
            }
        }
    }
    prop_assert_eq!(&out_of_area_counts(&areas, corpus, AssociationMode::AuthorActivity).unwrap(), &activity);
    Ok(())
}

fn record_strategy() -> impl Strategy<Value = BiblioRecord> {
    let name = "[A-Z]{2,8}";
    let codes = prop::sample::subsequence(vec!["US", "DE", "CN", "JP", "FR", "GB", "CA"], 0..3);
    (
        0u32..500,
        1991i32..=2010,
        prop::collection::vec((name, "[A-Z]{0,2}"), 1..4),
        "[A-Za-z]{1,8}( [A-Za-z]{1,8}){0,5}",
        "[A-Z]{2,6}( [A-Z]{2,6}){0,2}",
        prop::sample::subsequence(vec!["Chemistry", "Physics", "Polymer Science"], 0..3),
        codes,
        prop::collection::vec((name, 1950i32..2010, "[A-Z]{2,6}"), 0..4),
    )
        .prop_map(|(id, year, authors, title, journal, sc, addr, refs)| {
            let mut r = BiblioRecord::new(
                &format!("WOS:{id:015}"),
                year,
                authors.iter().map(|(l, i)| AuthorName::new(l, i)).collect(),
            );
            r.title = title;
            r.journal = journal;
            r.subject_categories = sc.into_iter().map(String::from).collect();
            r.addresses = addr.into_iter().map(String::from).collect();
            r.cited_refs = refs
                .iter()
                .map(|(a, y, j)| CitedRef::new(&format!("{a} X, {y}, {j}, V1, P2")))
                .collect();
            r
        })
}

#[test]
fn canonical_form_is_a_fixed_point() {
    let parsed = parse_wos_flatfile(bibnet::synth::TOY_CORPUS.as_bytes()).unwrap();
    assert!(parsed.rejected.is_empty());
    let corpus = normalize_corpus(parsed.records, &NormalizeOptions::default()).corpus;
    let canonical = corpus.to_canonical();
    let again = Corpus::from_canonical(&canonical).unwrap();
    assert_eq!(again, corpus);
    assert_eq!(again.to_canonical(), canonical);
}

#[test]
fn planted_intra_block_edges_match_expectation() {
    // k * C(n/k, 2) * p_in
    let (n, k, p_in) = (40usize, 4usize, 0.3);
    let block = n / k;
    let expected = k as f64 * (block * (block - 1) / 2) as f64 * p_in;
    let counts: Vec<f64> = (0..100)
        .map(|seed| {
            let g = planted_partition(n, k, p_in, 0.02, seed).unwrap();
            g.network
                .edges()
                .filter(|(u, v, _)| g.truth.cluster_of(u) == g.truth.cluster_of(v))
                .count() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    // binomial standard error of the mean over 100 seeds
    let pairs = k as f64 * (block * (block - 1) / 2) as f64;
    let se = (pairs * p_in * (1.0 - p_in) / 100.0).sqrt();
    assert!((mean - expected).abs() < 4.0 * se, "mean {mean} vs {expected} (se {se})");
}

#[test]
fn own_affiliation_deviation_closed_form() {
    let (eu, na) = (GeoLabel::Single(Continent::Europe), GeoLabel::Single(Continent::NorthAmerica));
    for n in 2..=8usize {
        let mut b = NetworkBuilder::new(false);
        let mut labels = BTreeMap::new();
        for side in 0..2 {
            for i in 0..n {
                let id = format!("s{side}g{i}");
                b.add_node(&id);
                labels.insert(id, if side == 0 { eu } else { na });
            }
            for i in 0..n {
                for j in i + 1..n {
                    if (i + j) % 2 == 1 || j == i + 1 {
                        b.add_edge(&format!("s{side}g{i}"), &format!("s{side}g{j}"), 1.0);
                    }
                }
            }
        }
        let t = geographic_propensity(&b.build(), &labels).unwrap();
        let row = t.affiliations.iter().position(|&a| a == eu).unwrap();
        let closed = (1.0 / ((n - 1) as f64 / (2 * n - 1) as f64) - 1.0) * 100.0;
        // enumeration: every link endpoint of the row stays inside its own affiliation
        let own = t.links[row][row];
        let out: usize = t.links[row].iter().sum();
        assert_eq!(own, out);
        let got = t.deviation_pct[row][row].unwrap();
        assert!((got - closed).abs() < 1e-9, "n={n}: {got} vs {closed}");
    }
}
