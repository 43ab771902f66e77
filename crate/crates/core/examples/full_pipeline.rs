//! Every stage on the bundled toy corpus, then the summary tables and a
//! second run showing that nothing is recomputed.
//!
//!     RUST_LOG=info cargo run --example full_pipeline

use bibnet::pipeline::{export, run_pipeline, Config, ExportFormat, Stage};

fn main() -> bibnet::Result<()> {
    env_logger::init();
    let dir = std::env::temp_dir().join("bibnet-full-example");
    std::fs::create_dir_all(&dir).map_err(|e| bibnet::Error::io(&dir, e))?;
    let input = dir.join("toy.wos");
    std::fs::write(&input, bibnet::synth::TOY_CORPUS).map_err(|e| bibnet::Error::io(&input, e))?;

    let mut cfg = Config::default();
    cfg.corpus.input = Some(input.to_string_lossy().into_owned());
    let mut ws = run_pipeline(&cfg, dir.join("ws"))?;
    print!("{}", ws.report().render());

    let again = ws.run_through(Stage::Report, &cfg)?;
    println!("\nsecond run: {:?}", again.iter().map(|(s, o)| format!("{s}={o:?}")).collect::<Vec<_>>());
    println!("\n{}", export(&ws, "residuals-citation", ExportFormat::Csv)?);
    Ok(())
}
