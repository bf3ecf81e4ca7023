use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Undirected simple graph with optional ±1 couplings (SK instances).
///
/// Edges are stored with `u < v` in insertion order; that order is the
/// canonical edge order used by every per-edge loop in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    couplings: Option<Vec<i8>>,
    adj: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::build(n, edges.into_iter().collect(), None)
    }

    /// Graph whose edges carry couplings `J ∈ {+1, −1}`.
    pub fn with_couplings(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, i8)>,
    ) -> Result<Self> {
        let (edges, js): (Vec<_>, Vec<_>) = edges.into_iter().map(|(u, v, j)| ((u, v), j)).unzip();
        if let Some(bad) = js.iter().find(|&&j| j != 1 && j != -1) {
            return Err(Error::InvalidGraph(format!("coupling {bad} is not +1 or -1")));
        }
        Self::build(n, edges, Some(js))
    }

    fn build(n: usize, raw: Vec<(usize, usize)>, couplings: Option<Vec<i8>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(raw.len());
        let mut edges = Vec::with_capacity(raw.len());
        let mut pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (u, v) in raw {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a vertex outside [0, {n})"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            pairs[u].push((v, edges.len()));
            pairs[v].push((u, edges.len()));
            edges.push(e);
        }
        let mut adj = Vec::with_capacity(n);
        let mut incident = Vec::with_capacity(n);
        for mut list in pairs {
            list.sort_unstable();
            adj.push(list.iter().map(|&(v, _)| v).collect());
            incident.push(list.iter().map(|&(_, k)| k).collect());
        }
        Ok(Self {
            n,
            edges,
            couplings,
            adj,
            incident,
        })
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    /// Cycle `C_n` (n ≥ 3).
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("a cycle needs at least 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// `m` disjoint edges `(2i, 2i+1)`.
    pub fn decoupled(m: usize) -> Self {
        Self::new(2 * m, (0..m).map(|i| (2 * i, 2 * i + 1))).expect("pairs are simple")
    }

    /// Complete graph with independent fair ±1 couplings.
    pub fn sherrington_kirkpatrick(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| (u, v, if rng.gen::<bool>() { 1 } else { -1 }))
            .collect();
        Self::with_couplings(n, edges).expect("complete graph is simple")
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn couplings(&self) -> Option<&[i8]> {
        self.couplings.as_deref()
    }

    /// Coupling of edge `idx`; `+1` when the graph carries none.
    pub fn coupling(&self, idx: usize) -> i8 {
        self.couplings.as_ref().map_or(1, |js| js[idx])
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Edge indices incident to `v`, aligned with [`Graph::neighbors`].
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// Index of edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n {
            return None;
        }
        self.adj[u].binary_search(&v).ok().map(|pos| self.incident[u][pos])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Returns a copy with the coupling of edge `idx` negated.
    pub fn with_flipped_coupling(&self, idx: usize) -> Self {
        let mut g = self.clone();
        let js = g.couplings.get_or_insert_with(|| vec![1; self.edges.len()]);
        js[idx] = -js[idx];
        g
    }
}

/// Uniform random simple `d`-regular graph from the configuration model.
///
/// Stubs are matched uniformly; a matching with a self-loop or a repeated
/// edge is discarded and the whole matching redrawn.
pub fn generate_regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n * d % 2 == 1 {
        return Err(Error::RegularGraph {
            n,
            degree: d,
            reason: "n·d must be even",
        });
    }
    if n <= d {
        return Err(Error::RegularGraph {
            n,
            degree: d,
            reason: "n must exceed d",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut seen = HashSet::with_capacity(n * d / 2);
    'draw: loop {
        stubs.shuffle(&mut rng);
        seen.clear();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'draw;
            }
            edges.push((u, v));
        }
        return Graph::new(n, edges);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_vertex_cubic_graph_is_k4() {
        for seed in 0..5 {
            let g = generate_regular_graph(4, 3, seed).unwrap();
            let mut e = g.edges().to_vec();
            e.sort_unstable();
            assert_eq!(e, Graph::complete(4).edges());
        }
    }

    #[test]
    fn regular_graph_audit() {
        for seed in 0..20 {
            let g = generate_regular_graph(12, 3, seed).unwrap();
            assert_eq!(g.num_edges(), 18);
            assert_eq!(g.regular_degree(), Some(3));
        }
        let g = generate_regular_graph(50, 4, 9).unwrap();
        assert_eq!(g.regular_degree(), Some(4));
    }

    #[test]
    fn edge_lookup() {
        let g = Graph::new(4, [(2, 1), (0, 3), (3, 1)]).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (0, 3), (1, 3)]);
        assert_eq!(g.edge_index(3, 1), Some(2));
        assert_eq!(g.edge_index(0, 1), None);
        assert_eq!(g.incident_edges(1), &[0, 2]);
    }

    #[test]
    fn regular_graph_is_deterministic() {
        let a = generate_regular_graph(40, 3, 17).unwrap();
        let b = generate_regular_graph(40, 3, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn regular_graph_rejects_bad_parameters() {
        assert!(generate_regular_graph(5, 3, 0).is_err());
        assert!(generate_regular_graph(3, 3, 0).is_err());
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::with_couplings(2, [(0, 1, 2)]).is_err());
    }
}
