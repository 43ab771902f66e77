//! Group collaboration network on the giant component, with continent and
//! topic-activity overlays written as DOT files.

use bibnet::pipeline::{overlay_view, run_pipeline, Config};
use bibnet::graph::to_dot;

fn main() -> bibnet::Result<()> {
    let dir = std::env::temp_dir().join("bibnet-collab-example");
    std::fs::create_dir_all(&dir).map_err(|e| bibnet::Error::io(&dir, e))?;
    let input = dir.join("toy.wos");
    std::fs::write(&input, bibnet::synth::TOY_CORPUS).map_err(|e| bibnet::Error::io(&input, e))?;

    let mut cfg = Config::default();
    cfg.corpus.input = Some(input.to_string_lossy().into_owned());
    let ws = run_pipeline(&cfg, dir.join("ws"))?;

    let collab: bibnet::collab::GroupCollabNetwork = ws.read_json(bibnet::pipeline::artifacts::COLLAB)?;
    println!(
        "{} groups, {} linked ({:.1}%)",
        collab.cluster_count,
        collab.linked_clusters,
        100.0 * collab.linked_proportion()
    );
    print!("{}", ws.read_text(bibnet::pipeline::artifacts::PROPENSITY)?);

    for (name, area) in [("geo", None), ("area1", Some(1))] {
        let path = dir.join(format!("overlay_{name}.dot"));
        std::fs::write(&path, to_dot(&overlay_view(&ws, area)?, name)).map_err(|e| bibnet::Error::io(&path, e))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
