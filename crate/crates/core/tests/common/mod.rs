//! Test-only oracles, written independently of the library's code paths.
#![allow(dead_code)]

use bibnet::graph::{Network, NetworkBuilder};

/// All set partitions of `n` elements as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            if i == 0 && l > 0 {
                break;
            }
            cur.push(l);
            rec(i + 1, n, cur, if i == 0 { 0 } else { max.max(l) }, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    rec(0, n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

/// Dense visit rates and step flows: undirected by strength, directed by
/// solving the teleporting-walk balance equations with Gaussian elimination.
pub fn oracle_flows(net: &Network, teleport: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = net.node_count();
    let mut w = vec![vec![0.0; n]; n];
    for (u, v, wt) in net.edges() {
        let (a, b) = (net.node_index(u).unwrap(), net.node_index(v).unwrap());
        w[a][b] += wt;
        if !net.is_directed() {
            w[b][a] += wt;
        }
    }
    let out: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    if !net.is_directed() {
        let total: f64 = out.iter().sum();
        let p = out.iter().map(|s| s / total).collect();
        let q = w.iter().map(|r| r.iter().map(|x| x / total).collect()).collect();
        return (p, q);
    }
    // p = T^T p with T[u][v] = (1-t) w/out + t/n, or 1/n for dangling u
    let nf = n as f64;
    let mut a = vec![vec![0.0; n + 1]; n];
    for v in 0..n {
        for u in 0..n {
            let t = if out[u] > 0.0 {
                (1.0 - teleport) * w[u][v] / out[u] + teleport / nf
            } else {
                1.0 / nf
            };
            a[v][u] -= t;
        }
        a[v][v] += 1.0;
    }
    // replace last equation with normalization
    for u in 0..n {
        a[n - 1][u] = 1.0;
    }
    a[n - 1][n] = 1.0;
    let p = gauss(a);
    let q = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| if out[u] > 0.0 { p[u] * w[u][v] / out[u] } else { 0.0 })
                .collect()
        })
        .collect();
    (p, q)
}

fn gauss(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

fn h(ps: &[f64]) -> f64 {
    let s: f64 = ps.iter().sum();
    if s <= 0.0 {
        return 0.0;
    }
    -ps.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| (x / s) * (x / s).log2())
        .sum::<f64>()
}

/// Two-level codelength from its definition `q H(Q) + sum_i p_i H(P_i)`.
pub fn oracle_codelength(p: &[f64], q: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = p.len();
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut exit = vec![0.0; k];
    let mut enter = vec![0.0; k];
    for u in 0..n {
        for v in 0..n {
            if labels[u] != labels[v] {
                exit[labels[u]] += q[u][v];
                enter[labels[v]] += q[u][v];
            }
        }
    }
    let q_total: f64 = enter.iter().sum();
    let mut len = q_total * h(&enter);
    for m in 0..k {
        let mut code = vec![exit[m]];
        code.extend((0..n).filter(|&u| labels[u] == m).map(|u| p[u]));
        let rate: f64 = code.iter().sum();
        len += rate * h(&code);
    }
    len
}

/// Minimum codelength over every set partition.
pub fn brute_force_minimum(net: &Network, teleport: f64) -> (f64, Vec<usize>) {
    let (p, q) = oracle_flows(net, teleport);
    set_partitions(net.node_count())
        .into_iter()
        .map(|l| (oracle_codelength(&p, &q, &l), l))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap()
}

pub fn undirected(edges: &[(usize, usize)]) -> Network {
    let mut b = NetworkBuilder::new(false);
    for &(u, v) in edges {
        b.add_edge(&format!("n{u}"), &format!("n{v}"), 1.0);
    }
    b.build()
}

pub fn directed(edges: &[(usize, usize)]) -> Network {
    let mut b = NetworkBuilder::new(true);
    for &(u, v) in edges {
        b.add_edge(&format!("n{u}"), &format!("n{v}"), 1.0);
    }
    b.build()
}

fn cycle(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

fn complete(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn star(leaves: usize) -> Vec<(usize, usize)> {
    (1..=leaves).map(|i| (0, i)).collect()
}

fn path(n: usize) -> Vec<(usize, usize)> {
    (0..n - 1).map(|i| (i, i + 1)).collect()
}

/// Connected graphs on at most 8 nodes used by the small-instance optimality check.
pub fn small_graph_fixtures() -> Vec<(String, Network)> {
    let mut v: Vec<(String, Network)> = Vec::new();
    let two_tri_bridge = vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)];
    v.push(("two_triangles_bridge".into(), undirected(&two_tri_bridge)));
    for n in [3, 4, 5, 6, 7, 8] {
        v.push((format!("cycle{n}"), undirected(&cycle(n))));
    }
    for n in [3, 4, 5, 6] {
        v.push((format!("complete{n}"), undirected(&complete(n))));
    }
    for l in [3, 4, 5, 7] {
        v.push((format!("star{l}"), undirected(&star(l))));
    }
    for n in [4, 6, 8] {
        v.push((format!("path{n}"), undirected(&path(n))));
    }
    // two K4 joined by one edge
    let mut barbell: Vec<_> = complete(4);
    barbell.extend(complete(4).into_iter().map(|(a, b)| (a + 4, b + 4)));
    barbell.push((3, 4));
    v.push(("barbell4".into(), undirected(&barbell)));
    // triangle-bridged squares
    let sq = vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 5), (5, 6), (6, 7), (7, 4), (4, 6), (1, 5)];
    v.push(("two_diamond_bridge".into(), undirected(&sq)));
    v.push(("wheel6".into(), undirected(&[star(5), cycle(5).iter().map(|&(a, b)| (a + 1, b + 1)).collect()].concat())));
    v.push(("lollipop".into(), undirected(&[complete(4), vec![(3, 4), (4, 5), (5, 6)]].concat())));
    v.push(("three_triangles_ring".into(), undirected(&[
        (0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7), (7, 0), (6, 0), (2, 3), (5, 6),
    ])));
    v.push(("bipartite_k33".into(), undirected(&[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)])));
    // weighted two-community graph
    let mut b = NetworkBuilder::new(false);
    for &(u, v, w) in &[(0, 1, 3.0), (1, 2, 3.0), (0, 2, 3.0), (3, 4, 2.0), (4, 5, 2.0), (3, 5, 2.0), (2, 3, 0.5), (0, 5, 0.25)] {
        b.add_edge(&format!("n{u}"), &format!("n{v}"), w);
    }
    v.push(("weighted_two_triangles".into(), b.build()));
    // directed cases
    v.push(("directed_cycle5".into(), directed(&cycle(5))));
    v.push(("directed_two_cycles".into(), directed(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3), (5, 0)])));
    v.push(("directed_star_in".into(), directed(&[(1, 0), (2, 0), (3, 0), (4, 0)])));
    v.push(("directed_mutual_pairs".into(), directed(&[(0, 1), (1, 0), (2, 3), (3, 2), (1, 2), (4, 5), (5, 4), (3, 4), (6, 0)])));
    v
}

/// Within-module z and participation coefficient from their definitions on
/// an undirected simple graph given as an edge list over `0..n`.
pub fn oracle_roles(n: usize, edges: &[(usize, usize)], labels: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut adj = vec![std::collections::BTreeSet::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    let kappa: Vec<f64> = (0..n)
        .map(|i| adj[i].iter().filter(|&&j| labels[j] == labels[i]).count() as f64)
        .collect();
    let mut z = vec![0.0; n];
    for i in 0..n {
        let peers: Vec<f64> = (0..n).filter(|&j| labels[j] == labels[i]).map(|j| kappa[j]).collect();
        let m = peers.iter().sum::<f64>() / peers.len() as f64;
        let sd = (peers.iter().map(|k| (k - m) * (k - m)).sum::<f64>() / peers.len() as f64).sqrt();
        if sd > 0.0 {
            z[i] = (kappa[i] - m) / sd;
        }
    }
    let p = (0..n)
        .map(|i| {
            let k = adj[i].len() as f64;
            if k == 0.0 {
                return 0.0;
            }
            let modules: std::collections::BTreeSet<usize> = adj[i].iter().map(|&j| labels[j]).collect();
            1.0 - modules
                .iter()
                .map(|&s| {
                    let ks = adj[i].iter().filter(|&&j| labels[j] == s).count() as f64;
                    (ks / k) * (ks / k)
                })
                .sum::<f64>()
        })
        .collect();
    (z, p)
}

/// Component sizes by union-find, largest first.
pub fn union_find_sizes(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let next = p[x];
            p[x] = r;
            x = next;
        }
        r
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let mut sizes = std::collections::BTreeMap::new();
    for x in 0..n {
        *sizes.entry(find(&mut parent, x)).or_insert(0) += 1;
    }
    let mut v: Vec<usize> = sizes.into_values().collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Chi-square upper tail by Simpson quadrature of the density after the
/// substitution t = u^2, which removes the singularity at zero.
pub fn chi_square_upper_tail(x: f64, df: usize) -> f64 {
    let half = df as f64 / 2.0;
    // gamma(df/2) by recurrence from gamma(1) = 1 or gamma(1/2) = sqrt(pi)
    let mut g = if df.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut a = if df.is_multiple_of(2) { 1.0 } else { 0.5 };
    while a < half {
        g *= a;
        a += 1.0;
    }
    let norm = 2f64.powf(half) * g;
    let f = |u: f64| 2.0 * u.powi(df as i32 - 1) * (-u * u / 2.0).exp() / norm;
    let (hi, steps) = (x.sqrt(), 20_000);
    let h = hi / steps as f64;
    let mut s = f(0.0) + f(hi);
    for i in 1..steps {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - s * h / 3.0
}
