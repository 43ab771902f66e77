//! Cluster the co-author network and classify node roles.

use bibnet::community::{detect_with, DetectOptions};
use bibnet::corpus::{build_author_table, last_name_commonality, normalize_corpus, parse_wos_flatfile, NormalizeOptions};
use bibnet::graph::{build_coauthor_graph, CoauthorOptions};
use bibnet::roles::{distortion_report, node_commonality, role_profiles, DistortionOptions, RoleThresholds};
use bibnet::synth::TOY_CORPUS;

fn main() -> bibnet::Result<()> {
    let records = parse_wos_flatfile(TOY_CORPUS.as_bytes())?.records;
    let corpus = normalize_corpus(records, &NormalizeOptions::default()).corpus;
    let table = build_author_table(&corpus, 2);
    let net = build_coauthor_graph(&corpus, &table, &CoauthorOptions::default());

    let det = detect_with(&net, &DetectOptions::new(1, 20))?;
    println!(
        "{} authors in {} clusters, codelength {:.3} bits",
        net.node_count(),
        det.partition.cluster_count(),
        det.report.codelength_bits
    );

    let profiles = role_profiles(&net, &det.partition, &RoleThresholds::default())?;
    for p in profiles.iter().filter(|p| p.role.is_hub()) {
        println!("{:<16} z = {:5.2}  p = {:.2}  {}", p.node, p.z, p.p, p.role);
    }

    let commonality = node_commonality(&net, &last_name_commonality(&table));
    let giant: std::collections::BTreeSet<&str> = net.giant_component().into_iter().collect();
    let in_giant: Vec<_> = profiles.into_iter().filter(|p| giant.contains(p.node.as_str())).collect();
    let report = distortion_report(&in_giant, &commonality, &DistortionOptions::default())?;
    print!("{}", report.summary());
    Ok(())
}
