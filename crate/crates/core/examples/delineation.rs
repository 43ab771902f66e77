//! Recall and precision checks for a field delineation: a researcher whose
//! second topic strand is missing from the field, and the author-activity
//! affinity among the largest topic areas.

use bibnet::community::DetectOptions;
use bibnet::corpus::{normalize_corpus, parse_wos_flatfile, NormalizeOptions};
use bibnet::delineation::{precision_report, recall_report};
use bibnet::synth::{synth_researcher, TOY_CORPUS};

fn main() -> bibnet::Result<()> {
    let opts = DetectOptions::new(1, 20);
    let pubs = synth_researcher("PI", 6, 3);
    // the field query only caught the first strand
    let field = normalize_corpus(
        pubs.iter().filter(|r| r.record_id.starts_with("PIA")).cloned().collect(),
        &NormalizeOptions { year_range: None },
    )
    .corpus;
    let recall = recall_report("PI", &pubs, &field, &opts)?;
    print!("{}", recall.summary());

    let records = parse_wos_flatfile(TOY_CORPUS.as_bytes())?.records;
    let corpus = normalize_corpus(records, &NormalizeOptions::default()).corpus;
    let precision = precision_report(&corpus, 4, 0.02, &opts)?;
    print!("\n{}", precision.summary());
    print!("{}", precision.heatmap.to_csv(1)?);
    Ok(())
}
