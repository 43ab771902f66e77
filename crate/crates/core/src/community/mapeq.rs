//! Two-level map equation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::community::flow::{compute_flow, Flow, DEFAULT_TELEPORT};
use crate::community::Partition;
use crate::error::Result;
use crate::graph::Network;

#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Codelength in bits per step, split into the index codebook term and the
/// summed module codebook terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CodelengthReport {
    pub codelength_bits: f64,
    pub index_term_bits: f64,
    pub module_term_bits: f64,
}

/// Map-equation codelength of `part` on `net` with the default teleportation.
pub fn map_equation(net: &Network, part: &Partition) -> Result<CodelengthReport> {
    map_equation_with(net, part, DEFAULT_TELEPORT)
}

pub fn map_equation_with(net: &Network, part: &Partition, teleport: f64) -> Result<CodelengthReport> {
    let labels = part.labels_for(net)?;
    let flow = compute_flow(net, teleport)?;
    Ok(codelength_of(&flow, &labels))
}

/// Per-module exit/enter/flow sums for an arbitrary labelling of the leaf nodes.
pub(crate) fn codelength_of(flow: &Flow, labels: &[usize]) -> CodelengthReport {
    let mut modules: BTreeMap<usize, (f64, f64, f64)> = BTreeMap::new();
    for (u, &m) in labels.iter().enumerate() {
        modules.entry(m).or_default().2 += flow.node[u];
        for &(v, q) in &flow.out[u] {
            let mv = labels[v];
            if mv != m {
                modules.entry(m).or_default().0 += q;
                modules.entry(mv).or_default().1 += q;
            }
        }
    }
    let node_term: f64 = flow.node.iter().map(|&p| plogp(p)).sum();
    terms(modules.values().copied(), node_term)
}

/// `(exit, enter, flow)` per module.
pub(crate) fn terms(modules: impl Iterator<Item = (f64, f64, f64)>, node_term: f64) -> CodelengthReport {
    let (mut sum_enter, mut enter_term, mut exit_term, mut exit_flow_term) = (0.0, 0.0, 0.0, 0.0);
    for (exit, enter, fl) in modules {
        sum_enter += enter;
        enter_term += plogp(enter);
        exit_term += plogp(exit);
        exit_flow_term += plogp(exit + fl);
    }
    let index = plogp(sum_enter) - enter_term;
    let module = exit_flow_term - exit_term - node_term;
    CodelengthReport {
        codelength_bits: index + module,
        index_term_bits: index,
        module_term_bits: module,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NetworkBuilder;

    fn cycle4() -> Network {
        let mut b = NetworkBuilder::new(false);
        b.add_edge("a", "b", 1.0)
            .add_edge("b", "c", 1.0)
            .add_edge("c", "d", 1.0)
            .add_edge("d", "a", 1.0);
        b.build()
    }

    #[test]
    fn one_module_is_entropy_of_visit_rates() {
        let net = cycle4();
        let r = map_equation(&net, &Partition::single(&net)).unwrap();
        assert_eq!(r.index_term_bits, 0.0);
        assert!((r.codelength_bits - 2.0).abs() < 1e-12);
        assert!((r.module_term_bits - 2.0).abs() < 1e-12);
    }

    #[test]
    fn uncovered_partition_rejected() {
        let net = cycle4();
        let part = Partition::new([("a".to_string(), 0)].into_iter().collect());
        assert!(map_equation(&net, &part).is_err());
    }
}
