//! Random influence networks.
//!
//! All four models share one density knob `p`: Erdős–Rényi and
//! Watts–Strogatz use it directly as an edge/rewiring probability, and the
//! degree-like parameter of Watts–Strogatz, regular and Barabási–Albert
//! graphs is `2 + p * (n/2 - 1)` rounded to an even integer. Undirected
//! edges become two directed edges, and an agent's influencers are its
//! in-neighbours.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::InfluencerSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraphModel {
    #[serde(rename = "ER")]
    ErdosRenyi,
    #[serde(rename = "WS")]
    WattsStrogatz,
    #[serde(rename = "RG")]
    Regular,
    #[serde(rename = "BA")]
    BarabasiAlbert,
}

impl GraphModel {
    pub const ALL: [GraphModel; 4] = [
        GraphModel::ErdosRenyi,
        GraphModel::WattsStrogatz,
        GraphModel::Regular,
        GraphModel::BarabasiAlbert,
    ];

    pub fn code(self) -> &'static str {
        match self {
            GraphModel::ErdosRenyi => "ER",
            GraphModel::WattsStrogatz => "WS",
            GraphModel::Regular => "RG",
            GraphModel::BarabasiAlbert => "BA",
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphModel::ALL
            .into_iter()
            .find(|m| m.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown graph model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub model: GraphModel,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

/// Rounds to the nearest even integer; exact odd values round down.
fn nearest_even(x: f64) -> usize {
    let half = x / 2.0;
    let down = half.floor();
    let k = if half - down > 0.5 { down + 1.0 } else { down };
    (2.0 * k) as usize
}

/// `(p1, p2)` for `n` agents at density `p`.
pub fn derive_params(n: usize, p: f64) -> Result<(f64, usize)> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 agents, got {n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("density {p} not in (0, 1)")));
    }
    Ok((p, nearest_even(2.0 + p * (n as f64 / 2.0 - 1.0))))
}

/// Directed graph over `0..n` with sorted, duplicate-free edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let set: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if let Some(&(u, v)) = set.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::AgentOutOfBounds { agent: u.max(v), n });
        }
        if let Some(&(u, _)) = set.iter().find(|&&(u, v)| u == v) {
            return Err(Error::Graph(format!("self-loop on agent {u}")));
        }
        Ok(DirectedGraph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    fn from_undirected(n: usize, edges: &BTreeSet<(usize, usize)>) -> Self {
        let directed: BTreeSet<(usize, usize)> = edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
        DirectedGraph {
            n,
            edges: directed.into_iter().collect(),
        }
    }

    /// In-neighbourhood of `agent`.
    pub fn influencers(&self, agent: usize) -> InfluencerSet {
        self.edges.iter().filter(|&&(_, v)| v == agent).map(|&(u, _)| u).collect()
    }

    /// In-neighbourhoods of every agent.
    pub fn all_influencers(&self) -> Vec<InfluencerSet> {
        let mut sets = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            sets[v].push(u);
        }
        sets.into_iter().map(InfluencerSet::new).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        self.edges.iter().for_each(|&(_, v)| d[v] += 1);
        d
    }

    pub fn is_symmetric(&self) -> bool {
        let set: BTreeSet<_> = self.edges.iter().copied().collect();
        self.edges.iter().all(|&(u, v)| set.contains(&(v, u)))
    }

    pub fn is_weakly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

const REGULAR_RETRIES: usize = 1000;

fn edge(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    edges
}

/// Ring lattice with `k/2` neighbours per side; each lattice edge `(u, u+j)`
/// is rewired to a uniform non-neighbour of `u` with probability `p`.
fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> BTreeSet<(usize, usize)> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let half = k / 2;
    for u in 0..n {
        for j in 1..=half {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || !rng.gen_bool(p) {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    adj.iter()
        .enumerate()
        .flat_map(|(u, vs)| vs.iter().map(move |&v| edge(u, v)))
        .collect()
}

/// One attempt at a uniform `d`-regular graph by repeated stub pairing:
/// stubs that would form loops or multi-edges are re-paired in the next
/// round, and the attempt is abandoned once no valid pair remains.
fn try_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<BTreeSet<(usize, usize)>> {
    let mut edges = BTreeSet::new();
    let mut stubs: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        let mut leftover = Vec::new();
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u != v && edges.insert(edge(u, v)) {
                continue;
            }
            leftover.extend_from_slice(pair);
        }
        if !leftover.is_empty() {
            let nodes: BTreeSet<usize> = leftover.iter().copied().collect();
            let pairable = nodes
                .iter()
                .any(|&u| nodes.iter().any(|&v| u < v && !edges.contains(&(u, v))));
            if !pairable {
                return None;
            }
        }
        stubs = leftover;
    }
    Some(edges)
}

fn regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<BTreeSet<(usize, usize)>> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::Graph(format!("no {d}-regular graph on {n} nodes")));
    }
    if d == 0 {
        return Ok(BTreeSet::new());
    }
    (0..REGULAR_RETRIES)
        .find_map(|_| try_regular(n, d, rng))
        .ok_or_else(|| Error::Graph(format!("{d}-regular graph on {n} nodes not found in {REGULAR_RETRIES} attempts")))
}

/// Preferential attachment from a star on `k + 1` nodes; each new node links
/// to `k` distinct targets drawn proportionally to degree.
fn barabasi_albert(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<BTreeSet<(usize, usize)>> {
    if k == 0 || k >= n {
        return Err(Error::Graph(format!("attachment count {k} must be in 1..{n}")));
    }
    let mut edges: BTreeSet<(usize, usize)> = (1..=k).map(|v| (0, v)).collect();
    let mut repeated: Vec<usize> = std::iter::repeat_n(0, k).chain(1..=k).collect();
    for source in k + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < k {
            targets.insert(*repeated.choose(rng).expect("star seeds the pool"));
        }
        for &t in &targets {
            edges.insert(edge(source, t));
        }
        repeated.extend(targets.iter().copied());
        repeated.extend(std::iter::repeat_n(source, k));
    }
    Ok(edges)
}

/// Draws one directed influence graph.
pub fn generate_graph(spec: &GraphSpec) -> Result<DirectedGraph> {
    let (p1, p2) = derive_params(spec.n, spec.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let undirected = match spec.model {
        GraphModel::ErdosRenyi => erdos_renyi(n, p1, &mut rng),
        GraphModel::WattsStrogatz => {
            if p2 >= n {
                return Err(Error::Graph(format!("lattice degree {p2} needs more than {n} nodes")));
            }
            watts_strogatz(n, p2, p1, &mut rng)
        }
        GraphModel::Regular => regular(n, p2, &mut rng)?,
        GraphModel::BarabasiAlbert => barabasi_albert(n, p2, &mut rng)?,
    };
    Ok(DirectedGraph::from_undirected(n, &undirected))
}

/// Erdős–Rényi draw with an explicit edge probability in `[0, 1]`.
pub fn erdos_renyi_graph(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(DirectedGraph::from_undirected(n, &erdos_renyi(n, p, &mut rng)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_parameters() {
        // 2 + 0.5 * 4 = 4.0
        assert_eq!(derive_params(10, 0.5).unwrap(), (0.5, 4));
        // 2 + 0.1 * 4 = 2.4
        assert_eq!(derive_params(10, 0.1).unwrap().1, 2);
        // 2 + 0.25 * 4 = 3.0 sits between 2 and 4
        assert_eq!(derive_params(10, 0.25).unwrap().1, 2);
        // 2 + 0.75 * 4 = 5.0
        assert_eq!(derive_params(10, 0.75).unwrap().1, 4);
        // 2 + 0.9 * 4 = 5.6
        assert_eq!(derive_params(10, 0.9).unwrap().1, 6);
        assert!(derive_params(2, 0.5).is_err());
        assert!(derive_params(10, 1.0).is_err());
    }

    #[test]
    fn p2_is_even_and_below_n() {
        for n in 3..80 {
            for p in [0.1, 0.25, 0.5, 0.75, 0.9, 0.33, 0.999] {
                let (_, p2) = derive_params(n, p).unwrap();
                assert_eq!(p2 % 2, 0);
                assert!(p2 < n, "n={n} p={p} p2={p2}");
            }
        }
    }

    #[test]
    fn complete_erdos_renyi() {
        let g = erdos_renyi_graph(6, 1.0, 0).unwrap();
        assert_eq!(g.edges.len(), 30);
        assert!(g.in_degrees().iter().all(|&d| d == 5));
    }

    #[test]
    fn regular_graph_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = DirectedGraph::from_undirected(6, &regular(6, 2, &mut rng).unwrap());
        assert!(g.in_degrees().iter().all(|&d| d == 2));
        for n in [10, 20, 30, 50] {
            for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let spec = GraphSpec {
                    model: GraphModel::Regular,
                    n,
                    p,
                    seed: 3,
                };
                let g = generate_graph(&spec).unwrap();
                let d = derive_params(n, p).unwrap().1;
                assert!(g.in_degrees().iter().all(|&x| x == d));
            }
        }
    }

    #[test]
    fn regular_rejects_odd_handshake() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(regular(5, 3, &mut rng).is_err());
        assert!(regular(4, 4, &mut rng).is_err());
    }

    #[test]
    fn generated_graphs_are_symmetric_and_seeded() {
        for model in GraphModel::ALL {
            for seed in 0..5 {
                let spec = GraphSpec { model, n: 20, p: 0.5, seed };
                let g = generate_graph(&spec).unwrap();
                assert!(g.is_symmetric());
                assert!(g.edges.iter().all(|&(u, v)| u != v));
                assert_eq!(g, generate_graph(&spec).unwrap());
            }
        }
    }

    #[test]
    fn barabasi_albert_is_connected_with_expected_edges() {
        for n in [5, 10, 30] {
            for p in [0.1, 0.5, 0.9] {
                let spec = GraphSpec {
                    model: GraphModel::BarabasiAlbert,
                    n,
                    p,
                    seed: 9,
                };
                let g = generate_graph(&spec).unwrap();
                let k = derive_params(n, p).unwrap().1;
                assert!(g.is_weakly_connected());
                assert_eq!(g.edges.len(), 2 * (k + (n - k - 1) * k));
            }
        }
    }

    #[test]
    fn watts_strogatz_keeps_edge_count() {
        for p in [0.1, 0.5, 0.9] {
            let spec = GraphSpec {
                model: GraphModel::WattsStrogatz,
                n: 24,
                p,
                seed: 2,
            };
            let k = derive_params(24, p).unwrap().1;
            assert_eq!(generate_graph(&spec).unwrap().edges.len(), 24 * k);
        }
    }

    #[test]
    fn erdos_renyi_mean_degree() {
        // degree of a fixed node ~ Binomial(n - 1, p); the mean over draws must
        // fall within three standard errors
        let (n, p, draws) = (20usize, 0.3, 1000);
        let degrees: Vec<f64> = (0..draws)
            .map(|s| generate_graph(&GraphSpec { model: GraphModel::ErdosRenyi, n, p, seed: s }).unwrap())
            .map(|g| g.in_degrees().iter().sum::<usize>() as f64 / n as f64)
            .collect();
        let mean = degrees.iter().sum::<f64>() / draws as f64;
        let expected = (n - 1) as f64 * p;
        // average of n correlated binomials: variance at most (n-1)p(1-p)
        let se = ((n - 1) as f64 * p * (1.0 - p) / draws as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "mean {mean} expected {expected}");
    }

    #[test]
    fn influencers_are_in_neighbours() {
        let g = DirectedGraph::new(4, [(0, 2), (1, 2), (3, 2), (2, 0)]).unwrap();
        assert_eq!(g.influencers(2), InfluencerSet::new([0, 1, 3]));
        assert_eq!(g.all_influencers()[0], InfluencerSet::new([2]));
        assert!(DirectedGraph::new(2, [(0, 0)]).is_err());
        assert!(DirectedGraph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn model_codes_parse() {
        for m in GraphModel::ALL {
            assert_eq!(m.code().parse::<GraphModel>().unwrap(), m);
        }
        assert!("XX".parse::<GraphModel>().is_err());
    }
}
