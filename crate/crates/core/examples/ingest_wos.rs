//! Parse a flat-file export, normalize it, and count authors.
//!
//!     cargo run --example ingest_wos [path/to/export.txt]

use bibnet::corpus::{build_author_table, normalize_corpus, parse_wos_flatfile, NormalizeOptions};
use bibnet::synth::TOY_CORPUS;

fn main() -> bibnet::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(p) => std::fs::read_to_string(&p).map_err(|e| bibnet::Error::io(p, e))?,
        None => TOY_CORPUS.to_string(),
    };
    let parsed = parse_wos_flatfile(text.as_bytes())?;
    for r in &parsed.rejected {
        eprintln!("rejected block at line {}: {}", r.line, r.reason);
    }
    let norm = normalize_corpus(parsed.records, &NormalizeOptions::default());
    for w in &norm.warnings {
        eprintln!("{w}");
    }
    let corpus = norm.corpus;
    let matched: usize = corpus.iter().map(|r| r.cited_record_ids().count()).sum();
    println!("records: {}", corpus.len());
    println!("years: {:?}", corpus.year_span());
    println!("references resolved inside the corpus: {matched}");

    let table = build_author_table(&corpus, 2);
    println!("authors: {}", table.total_authors);
    println!("1-time authors: {}", table.one_time_authors);
    println!("authors with 2+ publications: {}", table.len());
    Ok(())
}
