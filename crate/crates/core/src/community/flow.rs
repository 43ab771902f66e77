//! Random-walk visit rates and per-edge flow.

use crate::error::{Error, Result};
use crate::graph::Network;

pub const DEFAULT_TELEPORT: f64 = 0.15;
const PAGERANK_TOLERANCE: f64 = 1e-12;
const PAGERANK_MAX_ITER: usize = 10_000;

/// Node visit rates and the flow carried by each directed edge step.
///
/// Undirected: `p = strength / 2W`, each edge carries `w / 2W` in both directions.
/// Directed: `p` is the stationary distribution of the walk that teleports
/// uniformly with probability `teleport` (and always from dangling nodes); edge
/// flow is `p_u * w_uv / w_u_out`. Teleportation steps carry no edge flow, so
/// they never enter the codelength.
#[derive(Clone, Debug)]
pub struct Flow {
    pub node: Vec<f64>,
    pub out: Vec<Vec<(usize, f64)>>,
    pub inn: Vec<Vec<(usize, f64)>>,
}

pub fn compute_flow(net: &Network, teleport: f64) -> Result<Flow> {
    let n = net.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let total = net.total_weight();
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    if !(0.0..1.0).contains(&teleport) {
        return Err(Error::invalid(format!("teleport probability {teleport} not in [0,1)")));
    }
    let mut out = vec![Vec::new(); n];
    let mut inn = vec![Vec::new(); n];
    let node = if net.is_directed() {
        let rates = pagerank(net, teleport);
        for (u, rate) in rates.iter().enumerate() {
            let w_out: f64 = net.out_neighbors(u).iter().map(|&(_, w)| w).sum();
            if w_out <= 0.0 {
                continue;
            }
            for &(v, w) in net.out_neighbors(u) {
                let q = rate * w / w_out;
                out[u].push((v, q));
                inn[v].push((u, q));
            }
        }
        rates
    } else {
        let two_w = 2.0 * total;
        let mut rates = vec![0.0; n];
        for (u, rate) in rates.iter_mut().enumerate() {
            for &(v, w) in net.out_neighbors(u) {
                let q = w / two_w;
                *rate += q;
                out[u].push((v, q));
                inn[v].push((u, q));
            }
        }
        rates
    };
    for adj in inn.iter_mut() {
        adj.sort_by_key(|&(j, _)| j);
    }
    Ok(Flow { node, out, inn })
}

/// Visit rates only; see [`Flow`].
pub fn visit_rates(net: &Network, teleport: f64) -> Result<Vec<f64>> {
    compute_flow(net, teleport).map(|f| f.node)
}

fn pagerank(net: &Network, teleport: f64) -> Vec<f64> {
    let n = net.node_count();
    let nf = n as f64;
    let out_w: Vec<f64> = (0..n)
        .map(|u| net.out_neighbors(u).iter().map(|&(_, w)| w).sum())
        .collect();
    let mut p = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..PAGERANK_MAX_ITER {
        let dangling: f64 = (0..n).filter(|&u| out_w[u] <= 0.0).map(|u| p[u]).sum();
        let base = (teleport + (1.0 - teleport) * dangling) / nf;
        next.iter_mut().for_each(|x| *x = base);
        for u in 0..n {
            if out_w[u] <= 0.0 {
                continue;
            }
            let share = (1.0 - teleport) * p[u] / out_w[u];
            for &(v, w) in net.out_neighbors(u) {
                next[v] += share * w;
            }
        }
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let diff: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        if diff < PAGERANK_TOLERANCE {
            break;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NetworkBuilder;

    #[test]
    fn undirected_rates_are_strength_shares() {
        let mut b = NetworkBuilder::new(false);
        b.add_edge("a", "b", 1.0).add_edge("b", "c", 3.0);
        let f = compute_flow(&b.build(), DEFAULT_TELEPORT).unwrap();
        assert!((f.node[0] - 1.0 / 8.0).abs() < 1e-15);
        assert!((f.node[1] - 4.0 / 8.0).abs() < 1e-15);
        assert!((f.node[2] - 3.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn directed_rates_are_fixed_point() {
        let mut b = NetworkBuilder::new(true);
        b.add_edge("a", "b", 1.0)
            .add_edge("b", "c", 1.0)
            .add_edge("c", "a", 1.0)
            .add_edge("a", "c", 2.0)
            .add_node("d");
        let net = b.build();
        let p = visit_rates(&net, 0.15).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // one explicit step of the teleporting walk reproduces p
        let n = p.len() as f64;
        let dangling = p[3];
        for v in 0..4 {
            let mut x = (0.15 + 0.85 * dangling) / n;
            for &(u, w) in net.in_neighbors(v) {
                let wo: f64 = net.out_neighbors(u).iter().map(|e| e.1).sum();
                x += 0.85 * p[u] * w / wo;
            }
            assert!((x - p[v]).abs() < 1e-11, "node {v}: {x} vs {}", p[v]);
        }
    }

    #[test]
    fn zero_weight_rejected() {
        let mut b = NetworkBuilder::new(false);
        b.add_node("a");
        assert!(matches!(compute_flow(&b.build(), 0.15), Err(Error::ZeroWeight)));
        assert!(matches!(
            compute_flow(&NetworkBuilder::new(false).build(), 0.15),
            Err(Error::EmptyGraph)
        ));
    }
}
