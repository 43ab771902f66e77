//! Residual tables against the size-proportional null model, for a small
//! hand-made count table and for the toy corpus.

use bibnet::affinity::{association_from_counts, association_matrix, AssociationMode};
use bibnet::community::{double_cluster, DetectOptions};
use bibnet::corpus::{normalize_corpus, parse_wos_flatfile, NormalizeOptions};
use bibnet::graph::build_citation_graph;
use bibnet::synth::TOY_CORPUS;
use bibnet::topics::extract_topic_areas;

fn main() -> bibnet::Result<()> {
    // three areas; area 1 cites area 2 far more than its size warrants
    let m = association_from_counts(
        AssociationMode::Citation,
        vec![1, 2, 3],
        vec![100, 50, 50],
        vec![vec![0, 40, 10], vec![30, 0, 10], vec![25, 15, 0]],
    )?;
    print!("{}", m.residual_table().to_csv(1)?);
    for (s, row) in m.rows.iter().enumerate() {
        if let Some(chi) = &row.chi_square {
            println!("a{}: chi-square {:.3}, df {}, p {:.4}", m.areas[s], chi.statistic, chi.df, chi.p_value);
        }
    }

    let records = parse_wos_flatfile(TOY_CORPUS.as_bytes())?.records;
    let corpus = normalize_corpus(records, &NormalizeOptions::default()).corpus;
    let cites = build_citation_graph(&corpus);
    let dc = double_cluster(&cites, &DetectOptions::new(1, 20))?;
    let areas = extract_topic_areas(&dc.docmap, cites.node_count(), 0.02)?.areas;
    for mode in [AssociationMode::Citation, AssociationMode::AuthorActivity] {
        let m = association_matrix(&areas, &corpus, mode)?;
        println!("\n{mode}");
        print!("{}", m.residual_table().to_csv(1)?);
        let net = m.affinity_network(0.0);
        println!("affinity links: {}", net.edge_count());
    }
    Ok(())
}
