//! Greedy multi-level map-equation minimization.
//!
//! One trial: every node starts in its own module; nodes move to the
//! neighbouring module (or an empty one) that lowers the codelength most,
//! sweeping in random order until no move improves it. Modules are then
//! collapsed into super-nodes and the procedure repeats on the coarser graph.
//! The leaf-level result is fine-tuned by restarting the same procedure from
//! the current modules until the codelength stops dropping.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::community::flow::{compute_flow, Flow, DEFAULT_TELEPORT};
use crate::community::mapeq::{codelength_of, plogp, CodelengthReport};
use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::Network;

const MIN_MOVE_IMPROVEMENT: f64 = 1e-12;
const MIN_TUNE_IMPROVEMENT: f64 = 1e-10;
const MAX_SWEEPS: usize = 200;
const MAX_TUNE_ROUNDS: usize = 20;
const TIE_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_TRIALS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectOptions {
    pub seed: u64,
    pub trials: usize,
    pub teleport: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            seed: 0,
            trials: DEFAULT_TRIALS,
            teleport: DEFAULT_TELEPORT,
        }
    }
}

impl DetectOptions {
    pub fn new(seed: u64, trials: usize) -> DetectOptions {
        DetectOptions {
            seed,
            trials,
            ..Default::default()
        }
    }
}

/// Best partition over all trials, plus the codelength after every optimizer
/// pass of each trial.
#[derive(Clone, Debug)]
pub struct Detection {
    pub partition: Partition,
    pub report: CodelengthReport,
    pub traces: Vec<Vec<f64>>,
}

pub fn detect_communities(net: &Network, seed: u64, trials: usize) -> Result<(Partition, CodelengthReport)> {
    let d = detect_with(net, &DetectOptions::new(seed, trials))?;
    Ok((d.partition, d.report))
}

/// Edgeless graphs yield all-singleton partitions with a zero report.
pub fn detect_with(net: &Network, opts: &DetectOptions) -> Result<Detection> {
    if net.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if opts.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if net.total_weight() <= 0.0 {
        let labels: Vec<usize> = (0..net.node_count()).collect();
        return Ok(Detection {
            partition: Partition::from_labels(net.nodes(), &labels),
            report: CodelengthReport::default(),
            traces: Vec::new(),
        });
    }
    let flow = compute_flow(net, opts.teleport)?;
    let leaf = LevelGraph::from_flow(&flow);
    let node_term: f64 = flow.node.iter().map(|&p| plogp(p)).sum();

    let results: Vec<(f64, Vec<usize>, Vec<f64>)> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(t as u64);
            let (labels, trace) = run_trial(&leaf, &flow, node_term, &mut rng);
            let canon = canonical_labels(&labels);
            (codelength_of(&flow, &canon).codelength_bits, canon, trace)
        })
        .collect();

    let best_len = results
        .iter()
        .map(|r| r.0)
        .fold(f64::INFINITY, f64::min);
    let best = results
        .iter()
        .filter(|r| r.0 <= best_len + TIE_TOLERANCE)
        .min_by(|a, b| a.1.cmp(&b.1))
        .expect("at least one trial");
    let report = codelength_of(&flow, &best.1);
    Ok(Detection {
        partition: Partition::from_labels(net.nodes(), &best.1),
        report,
        traces: results.iter().map(|r| r.2.clone()).collect(),
    })
}

/// Relabels to 0..k-1 by first appearance.
pub(crate) fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

fn run_trial(leaf: &LevelGraph, flow: &Flow, node_term: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<f64>) {
    let n = leaf.len();
    let mut trace = Vec::new();
    let singletons: Vec<usize> = (0..n).collect();
    trace.push(codelength_of(flow, &singletons).codelength_bits);

    let mut labels = optimize_from(leaf, &singletons, node_term, rng, &mut trace);
    let mut len = codelength_of(flow, &labels).codelength_bits;
    for _ in 0..MAX_TUNE_ROUNDS {
        let tuned = optimize_from(leaf, &labels, node_term, rng, &mut trace);
        let tuned_len = codelength_of(flow, &tuned).codelength_bits;
        if tuned_len < len - MIN_TUNE_IMPROVEMENT {
            labels = tuned;
            len = tuned_len;
        } else {
            break;
        }
    }
    let one_module = vec![0; n];
    let one_len = codelength_of(flow, &one_module).codelength_bits;
    if one_len < len - MIN_TUNE_IMPROVEMENT {
        labels = one_module;
        trace.push(one_len);
    }
    (labels, trace)
}

/// Local moves on the leaf graph starting from `init`, then repeated
/// aggregation + local moves until a level produces no merge.
fn optimize_from(
    leaf: &LevelGraph,
    init: &[usize],
    node_term: f64,
    rng: &mut ChaCha8Rng,
    trace: &mut Vec<f64>,
) -> Vec<usize> {
    let mut leaf_assign = compact(init);
    let mut state = ModuleState::new(leaf, &leaf_assign, node_term);
    local_moves(leaf, &mut leaf_assign, &mut state, rng);
    trace.push(state.codelength());
    leaf_assign = compact(&leaf_assign);

    let mut level_size = leaf.len();
    loop {
        let k = leaf_assign.iter().max().map_or(0, |m| m + 1);
        if k == level_size {
            break;
        }
        let coarse = leaf.aggregate(&leaf_assign, k);
        let mut assign: Vec<usize> = (0..k).collect();
        let mut st = ModuleState::new(&coarse, &assign, node_term);
        let moved = local_moves(&coarse, &mut assign, &mut st, rng);
        trace.push(st.codelength());
        if moved == 0 {
            break;
        }
        let assign = compact(&assign);
        for m in leaf_assign.iter_mut() {
            *m = assign[*m];
        }
        level_size = k;
    }
    leaf_assign
}

fn compact(labels: &[usize]) -> Vec<usize> {
    canonical_labels(labels)
}

#[derive(Clone, Debug)]
struct LevelGraph {
    flow: Vec<f64>,
    out: Vec<Vec<(usize, f64)>>,
    inn: Vec<Vec<(usize, f64)>>,
    out_total: Vec<f64>,
    in_total: Vec<f64>,
}

impl LevelGraph {
    fn from_flow(flow: &Flow) -> LevelGraph {
        LevelGraph::new(flow.node.clone(), flow.out.clone(), flow.inn.clone())
    }

    fn new(flow: Vec<f64>, out: Vec<Vec<(usize, f64)>>, inn: Vec<Vec<(usize, f64)>>) -> LevelGraph {
        let out_total = out.iter().map(|a| a.iter().map(|e| e.1).sum()).collect();
        let in_total = inn.iter().map(|a| a.iter().map(|e| e.1).sum()).collect();
        LevelGraph {
            flow,
            out,
            inn,
            out_total,
            in_total,
        }
    }

    fn len(&self) -> usize {
        self.flow.len()
    }

    /// Collapses modules `0..k` of this graph into super-nodes.
    fn aggregate(&self, assign: &[usize], k: usize) -> LevelGraph {
        let mut flow = vec![0.0; k];
        let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, &mu) in assign.iter().enumerate() {
            flow[mu] += self.flow[u];
            for &(v, q) in &self.out[u] {
                let mv = assign[v];
                if mu != mv {
                    *edges.entry((mu, mv)).or_insert(0.0) += q;
                }
            }
        }
        let mut out = vec![Vec::new(); k];
        let mut inn = vec![Vec::new(); k];
        for ((a, b), q) in edges {
            out[a].push((b, q));
            inn[b].push((a, q));
        }
        for adj in inn.iter_mut() {
            adj.sort_by_key(|e| e.0);
        }
        LevelGraph::new(flow, out, inn)
    }
}

struct ModuleState {
    flow: Vec<f64>,
    enter: Vec<f64>,
    exit: Vec<f64>,
    size: Vec<usize>,
    empty: Vec<usize>,
    node_term: f64,
}

impl ModuleState {
    fn new(g: &LevelGraph, assign: &[usize], node_term: f64) -> ModuleState {
        let n = g.len();
        let mut st = ModuleState {
            flow: vec![0.0; n],
            enter: vec![0.0; n],
            exit: vec![0.0; n],
            size: vec![0; n],
            empty: Vec::new(),
            node_term,
        };
        for (u, &m) in assign.iter().enumerate() {
            st.flow[m] += g.flow[u];
            st.size[m] += 1;
            for &(v, q) in &g.out[u] {
                let mv = assign[v];
                if mv != m {
                    st.exit[m] += q;
                    st.enter[mv] += q;
                }
            }
        }
        st.empty = (0..n).rev().filter(|&m| st.size[m] == 0).collect();
        st
    }

    fn sum_enter(&self) -> f64 {
        self.enter.iter().sum()
    }

    fn codelength(&self) -> f64 {
        let mut exit_term = 0.0;
        let mut enter_term = 0.0;
        let mut exit_flow_term = 0.0;
        for m in 0..self.flow.len() {
            enter_term += plogp(self.enter[m]);
            exit_term += plogp(self.exit[m]);
            exit_flow_term += plogp(self.exit[m] + self.flow[m]);
        }
        plogp(self.sum_enter()) - enter_term - exit_term + exit_flow_term - self.node_term
    }
}

#[derive(Default)]
struct Scratch {
    out_to: Vec<f64>,
    in_from: Vec<f64>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

impl Scratch {
    fn new(n: usize) -> Scratch {
        Scratch {
            out_to: vec![0.0; n],
            in_from: vec![0.0; n],
            touched: Vec::new(),
            mark: vec![false; n],
        }
    }

    fn touch(&mut self, m: usize) {
        if !self.mark[m] {
            self.mark[m] = true;
            self.touched.push(m);
        }
    }

    fn reset(&mut self) {
        for &m in &self.touched {
            self.out_to[m] = 0.0;
            self.in_from[m] = 0.0;
            self.mark[m] = false;
        }
        self.touched.clear();
    }
}

/// Returns the number of moves made.
fn local_moves(g: &LevelGraph, assign: &mut [usize], st: &mut ModuleState, rng: &mut ChaCha8Rng) -> usize {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut scratch = Scratch::new(n);
    let mut total_moves = 0;
    for _ in 0..MAX_SWEEPS {
        order.shuffle(rng);
        let mut sum_enter = st.sum_enter();
        let mut moves = 0;
        for &u in &order {
            let a = assign[u];
            for &(v, q) in &g.out[u] {
                let m = assign[v];
                scratch.touch(m);
                scratch.out_to[m] += q;
            }
            for &(v, q) in &g.inn[u] {
                let m = assign[v];
                scratch.touch(m);
                scratch.in_from[m] += q;
            }
            let p = g.flow[u];
            let (out_u, in_u) = (g.out_total[u], g.in_total[u]);
            let (out_a, in_a) = (scratch.out_to[a], scratch.in_from[a]);

            let exit_a_new = st.exit[a] - out_u + out_a + in_a;
            let enter_a_new = st.enter[a] - in_u + in_a + out_a;
            let flow_a_new = st.flow[a] - p;

            let old_a = plogp(st.exit[a] + st.flow[a]) - plogp(st.exit[a]) - plogp(st.enter[a]);
            let new_a = plogp(exit_a_new + flow_a_new) - plogp(exit_a_new) - plogp(enter_a_new);

            let mut best: Option<(f64, usize, f64, f64)> = None;
            let mut consider = |b: usize, out_b: f64, in_b: f64| {
                let exit_b_new = st.exit[b] + out_u - out_b - in_b;
                let enter_b_new = st.enter[b] + in_u - in_b - out_b;
                let flow_b_new = st.flow[b] + p;
                let old_b = plogp(st.exit[b] + st.flow[b]) - plogp(st.exit[b]) - plogp(st.enter[b]);
                let new_b = plogp(exit_b_new + flow_b_new) - plogp(exit_b_new) - plogp(enter_b_new);
                let sum_new = sum_enter - st.enter[a] - st.enter[b] + enter_a_new + enter_b_new;
                let delta = plogp(sum_new) - plogp(sum_enter) + (new_a - old_a) + (new_b - old_b);
                if best.is_none_or(|(d, ..)| delta < d) {
                    best = Some((delta, b, exit_b_new, enter_b_new));
                }
            };
            for &b in &scratch.touched {
                if b != a {
                    consider(b, scratch.out_to[b], scratch.in_from[b]);
                }
            }
            if st.size[a] > 1 {
                if let Some(&e) = st.empty.last() {
                    consider(e, 0.0, 0.0);
                }
            }
            scratch.reset();

            if let Some((delta, b, exit_b_new, enter_b_new)) = best {
                if delta < -MIN_MOVE_IMPROVEMENT {
                    if st.size[b] == 0 {
                        st.empty.pop();
                    }
                    sum_enter += enter_a_new + enter_b_new - st.enter[a] - st.enter[b];
                    st.exit[a] = exit_a_new;
                    st.enter[a] = enter_a_new;
                    st.flow[a] = flow_a_new;
                    st.size[a] -= 1;
                    st.exit[b] = exit_b_new;
                    st.enter[b] = enter_b_new;
                    st.flow[b] += p;
                    st.size[b] += 1;
                    if st.size[a] == 0 {
                        st.empty.push(a);
                    }
                    assign[u] = b;
                    moves += 1;
                }
            }
        }
        total_moves += moves;
        if moves == 0 {
            break;
        }
    }
    total_moves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NetworkBuilder;

    fn two_triangles() -> Network {
        let mut b = NetworkBuilder::new(false);
        for (u, v) in [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")] {
            b.add_edge(u, v, 1.0);
        }
        b.build()
    }

    #[test]
    fn disjoint_triangles_split() {
        let (p, _) = detect_communities(&two_triangles(), 1, 5).unwrap();
        assert_eq!(p.encoding(), vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn deterministic() {
        let mut b = NetworkBuilder::new(false);
        for i in 0..30 {
            b.add_edge(&format!("n{i:02}"), &format!("n{:02}", (i * 7 + 3) % 30), 1.0);
            b.add_edge(&format!("n{i:02}"), &format!("n{:02}", (i + 1) % 30), 1.0);
        }
        let net = b.build();
        let a = detect_communities(&net, 42, 4).unwrap();
        let c = detect_communities(&net, 42, 4).unwrap();
        assert_eq!(a.0, c.0);
        assert_eq!(a.1, c.1);
    }

    #[test]
    fn traces_never_increase() {
        let net = two_triangles();
        let d = detect_with(&net, &DetectOptions::new(3, 6)).unwrap();
        for t in &d.traces {
            for w in t.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "trace increased: {t:?}");
            }
        }
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let mut b = NetworkBuilder::new(true);
        b.add_node("x").add_node("y");
        let (p, r) = detect_communities(&b.build(), 0, 1).unwrap();
        assert_eq!(p.cluster_count(), 2);
        assert_eq!(r.codelength_bits, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(detect_communities(&two_triangles(), 0, 0).is_err());
    }
}
