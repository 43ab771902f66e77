//! Recovery of planted partitions by the map-equation optimizer.

use std::time::Instant;

use bibnet::community::{detect_with, nmi, planted_partition, DetectOptions};

fn main() -> bibnet::Result<()> {
    println!("{:>6} {:>6} {:>8} {:>6} {:>9}", "p_out", "seed", "NMI", "k", "time");
    for p_out in [0.01, 0.03, 0.05] {
        for seed in 0..3 {
            let g = planted_partition(128, 4, 0.25, p_out, seed)?;
            let t = Instant::now();
            let d = detect_with(&g.network, &DetectOptions::new(seed, 20))?;
            let score = nmi(&d.partition, &g.truth)?;
            println!(
                "{p_out:>6} {seed:>6} {score:>8.4} {:>6} {:>8.0?}",
                d.partition.cluster_count(),
                t.elapsed()
            );
        }
    }
    Ok(())
}
