//! Double-cluster the citation network into topic areas, label them, and
//! track reference inclusion rates.

use bibnet::community::{double_cluster, DetectOptions};
use bibnet::corpus::{normalize_corpus, parse_wos_flatfile, NormalizeOptions};
use bibnet::graph::build_citation_graph;
use bibnet::synth::TOY_CORPUS;
use bibnet::topics::{area_label_metadata, extract_topic_areas, rir_series, rir_to_csv};

fn main() -> bibnet::Result<()> {
    let records = parse_wos_flatfile(TOY_CORPUS.as_bytes())?.records;
    let corpus = normalize_corpus(records, &NormalizeOptions::default()).corpus;
    let cites = build_citation_graph(&corpus);
    let dc = double_cluster(&cites, &DetectOptions::new(1, 20))?;
    println!(
        "{} documents -> {} clusters -> {} clusters of clusters",
        cites.node_count(),
        dc.level1.cluster_count(),
        dc.level2.cluster_count()
    );

    let ex = extract_topic_areas(&dc.docmap, cites.node_count(), 0.02)?;
    println!("{} areas of at least {} documents cover {:.1}%\n", ex.areas.len(), ex.min_size, 100.0 * ex.coverage);
    for a in ex.areas.iter().take(2) {
        println!("{}", area_label_metadata(a, &corpus, 3).render());
    }

    let series = ex
        .areas
        .iter()
        .map(|a| rir_series(a, &corpus, 1996, 2010, 5))
        .collect::<bibnet::Result<Vec<_>>>()?;
    print!("{}", rir_to_csv(&series)?);
    Ok(())
}
