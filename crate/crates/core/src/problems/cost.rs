use std::collections::BTreeMap;

use super::graph::Graph;
use super::strings::{BitString, Convention};
use crate::error::{Error, Result};

/// Largest vertex count accepted by exhaustive enumeration.
pub const ENUMERATION_CAP: usize = 24;

/// The diagonal cost functions supported by the simulators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostKind {
    /// `C_MC = Σ (1 − z_i z_j)/2`, the number of cut edges.
    MaxCut,
    /// `C_Z = −Σ z_i z_j`.
    Ising,
    /// Relaxed independent-set cost `W(b) − K(b)` over 0/1 bits.
    Mis,
    /// `C_SK = Σ J_ij z_i z_j` using the graph's couplings.
    Sk,
}

impl CostKind {
    pub fn convention(self) -> Convention {
        match self {
            CostKind::Mis => Convention::Binary,
            _ => Convention::Spin,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CostKind::MaxCut => "maxcut",
            CostKind::Ising => "ising",
            CostKind::Mis => "mis",
            CostKind::Sk => "sk",
        }
    }
}

impl std::str::FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxcut" => Ok(CostKind::MaxCut),
            "ising" => Ok(CostKind::Ising),
            "mis" => Ok(CostKind::Mis),
            "sk" => Ok(CostKind::Sk),
            other => Err(Error::InvalidArgument(format!("unknown cost kind '{other}'"))),
        }
    }
}

/// Per-edge term as a 2×2 table indexed by qubit values `[x_u][x_v]`
/// (`0` = spin `+1` / bit `0`).
pub type EdgeTable = [[f64; 2]; 2];

/// A cost function bound to a graph.
#[derive(Debug, Clone, Copy)]
pub struct Cost<'g> {
    kind: CostKind,
    graph: &'g Graph,
}

impl<'g> Cost<'g> {
    pub fn new(kind: CostKind, graph: &'g Graph) -> Self {
        Self { kind, graph }
    }

    pub fn maxcut(graph: &'g Graph) -> Self {
        Self::new(CostKind::MaxCut, graph)
    }

    pub fn ising(graph: &'g Graph) -> Self {
        Self::new(CostKind::Ising, graph)
    }

    pub fn mis(graph: &'g Graph) -> Self {
        Self::new(CostKind::Mis, graph)
    }

    pub fn sk(graph: &'g Graph) -> Self {
        Self::new(CostKind::Sk, graph)
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn num_qubits(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn convention(&self) -> Convention {
        self.kind.convention()
    }

    pub fn evaluate(&self, w: &BitString) -> Result<i64> {
        w.ensure(self.graph.num_vertices(), self.convention())?;
        Ok(self.evaluate_bits(|i| w.is_one(i)))
    }

    /// Cost of computational basis state `index`.
    pub fn value_at_index(&self, index: usize) -> i64 {
        let n = self.graph.num_vertices();
        self.evaluate_bits(|i| (index >> (n - 1 - i)) & 1 == 1)
    }

    fn evaluate_bits(&self, one: impl Fn(usize) -> bool) -> i64 {
        let g = self.graph;
        match self.kind {
            CostKind::MaxCut => g.edges().iter().filter(|&&(u, v)| one(u) != one(v)).count() as i64,
            CostKind::Ising => g
                .edges()
                .iter()
                .map(|&(u, v)| if one(u) == one(v) { -1 } else { 1 })
                .sum(),
            CostKind::Sk => g
                .edges()
                .iter()
                .enumerate()
                .map(|(k, &(u, v))| {
                    let zz = if one(u) == one(v) { 1 } else { -1 };
                    i64::from(g.coupling(k)) * zz
                })
                .sum(),
            CostKind::Mis => {
                let w = (0..g.num_vertices()).filter(|&i| one(i)).count() as i64;
                let k = g.edges().iter().filter(|&&(u, v)| one(u) && one(v)).count() as i64;
                w - k
            }
        }
    }

    /// Every cost value in basis-index order.
    pub fn values(&self, cap: usize) -> Result<Vec<i64>> {
        let n = self.graph.num_vertices();
        if n > cap {
            return Err(Error::CapExceeded {
                what: "cost enumeration",
                n,
                cap,
            });
        }
        Ok((0..1usize << n).map(|idx| self.value_at_index(idx)).collect())
    }

    /// Edge term table of edge `k` (oriented as stored, `u < v`).
    ///
    /// The independent-set vertex terms are split over incident edges as
    /// `b_u/deg(u) + b_v/deg(v) − b_u b_v`, so tables sum to the full cost
    /// whenever no vertex is isolated.
    pub fn edge_table(&self, k: usize) -> EdgeTable {
        let (u, v) = self.graph.edges()[k];
        match self.kind {
            CostKind::MaxCut => [[0.0, 1.0], [1.0, 0.0]],
            CostKind::Ising => [[-1.0, 1.0], [1.0, -1.0]],
            CostKind::Sk => {
                let j = f64::from(self.graph.coupling(k));
                [[j, -j], [-j, j]]
            }
            CostKind::Mis => {
                let du = 1.0 / self.graph.degree(u) as f64;
                let dv = 1.0 / self.graph.degree(v) as f64;
                [[0.0, dv], [du, du + dv - 1.0]]
            }
        }
    }

    /// Change in cost from flipping vertex `i` of the qubit assignment
    /// `one` (`true` is `|1⟩`).
    pub fn flip_gain(&self, one: &[bool], i: usize) -> i64 {
        let g = self.graph;
        let bi = one[i];
        let edges = g.neighbors(i).iter().zip(g.incident_edges(i));
        match self.kind {
            CostKind::MaxCut => edges.map(|(&j, _)| if one[j] == bi { 1 } else { -1 }).sum(),
            CostKind::Ising => edges.map(|(&j, _)| if one[j] == bi { 2 } else { -2 }).sum(),
            CostKind::Sk => edges
                .map(|(&j, &e)| {
                    let j_e = i64::from(g.coupling(e));
                    if one[j] == bi {
                        -2 * j_e
                    } else {
                        2 * j_e
                    }
                })
                .sum(),
            CostKind::Mis => {
                let occupied = edges.filter(|(&j, _)| one[j]).count() as i64;
                if bi {
                    occupied - 1
                } else {
                    1 - occupied
                }
            }
        }
    }

    /// Whether the cost is exactly the sum of its edge tables.
    pub fn is_edge_decomposable(&self) -> bool {
        self.kind != CostKind::Mis || (0..self.graph.num_vertices()).all(|v| self.graph.degree(v) > 0)
    }

    /// Mean of `C(z)/m` over all strings, from the edge terms directly.
    pub fn average_per_edge(&self) -> f64 {
        let g = self.graph;
        let m = g.num_edges() as f64;
        match self.kind {
            CostKind::MaxCut => 0.5,
            CostKind::Ising | CostKind::Sk => 0.0,
            CostKind::Mis => (g.num_vertices() as f64 / 2.0 - m / 4.0) / m,
        }
    }
}

/// `δ_i = (C_Z(w with bit i flipped) − C_Z(w)) / 2 = Σ_{j∼i} z_i z_j`.
pub fn flip_deltas(graph: &Graph, w: &BitString) -> Result<Vec<i64>> {
    w.ensure(graph.num_vertices(), Convention::Spin)?;
    let z = w.values();
    Ok((0..graph.num_vertices())
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .map(|&j| i64::from(z[i] * z[j]))
                .sum()
        })
        .collect())
}

/// Number of strings at each cost value.
pub fn density_of_states(cost: &Cost<'_>) -> Result<BTreeMap<i64, u64>> {
    let mut counts = BTreeMap::new();
    for c in cost.values(ENUMERATION_CAP)? {
        *counts.entry(c).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Whether the 0/1 string `b` is an independent set of `graph`.
pub fn is_independent_set(graph: &Graph, b: &BitString) -> bool {
    graph.edges().iter().all(|&(u, v)| !(b.is_one(u) && b.is_one(v)))
}

/// Repairs violated edges one at a time by dropping the endpoint with more
/// violations; the result is independent and never has lower relaxed cost.
pub fn prune_to_independent_set(graph: &Graph, b: &BitString) -> Result<BitString> {
    b.ensure(graph.num_vertices(), Convention::Binary)?;
    let mut out = b.clone();
    let violations = |s: &BitString, v: usize| graph.neighbors(v).iter().filter(|&&u| s.is_one(u)).count();
    for &(u, v) in graph.edges() {
        if out.is_one(u) && out.is_one(v) {
            let drop = if violations(&out, v) > violations(&out, u) { v } else { u };
            out = out.flipped(drop);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate_regular_graph, Graph};
    use proptest::prelude::*;

    #[test]
    fn k4_examples() {
        let g = Graph::complete(4);
        let up = BitString::all_up(4);
        assert_eq!(Cost::maxcut(&g).evaluate(&up).unwrap(), 0);
        let ones = BitString::binary(vec![1; 4]).unwrap();
        assert_eq!(Cost::mis(&g).evaluate(&ones).unwrap(), 4 - 6);
        assert!(Cost::maxcut(&g).evaluate(&ones).is_err());
    }

    #[test]
    fn satisfied_pair() {
        let g = Graph::decoupled(1);
        let w = BitString::spins(vec![1, -1]).unwrap();
        assert_eq!(Cost::maxcut(&g).evaluate(&w).unwrap(), 1);
    }

    #[test]
    fn single_edge_deltas() {
        let g = Graph::decoupled(1);
        assert_eq!(flip_deltas(&g, &BitString::all_up(2)).unwrap(), vec![1, 1]);
    }

    #[test]
    fn k4_density_of_states() {
        let g = Graph::complete(4);
        let dos = density_of_states(&Cost::maxcut(&g)).unwrap();
        assert_eq!(dos, BTreeMap::from([(0, 2), (3, 8), (4, 6)]));
    }

    #[test]
    fn decoupled_density_is_binomial() {
        let m = 6u64;
        let g = Graph::decoupled(m as usize);
        let dos = density_of_states(&Cost::maxcut(&g)).unwrap();
        let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        for k in 0..=m {
            assert_eq!(dos[&(k as i64)], binom(m, k) << m);
        }
    }

    #[test]
    fn enumeration_cap() {
        let g = Graph::decoupled(13);
        assert!(matches!(
            density_of_states(&Cost::maxcut(&g)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn local_maximum_has_negative_deltas() {
        let g = generate_regular_graph(10, 3, 4).unwrap();
        let cost = Cost::ising(&g);
        let values = cost.values(ENUMERATION_CAP).unwrap();
        let best = (0..values.len()).max_by_key(|&i| values[i]).unwrap();
        let w = BitString::from_index(10, best, Convention::Spin);
        assert!(flip_deltas(&g, &w).unwrap().iter().all(|&d| d <= -1));
    }

    #[test]
    fn edge_tables_sum_to_cost() {
        let g = generate_regular_graph(8, 3, 2).unwrap();
        let sk = Graph::sherrington_kirkpatrick(6, 3);
        for (graph, kind) in [
            (&g, CostKind::MaxCut),
            (&g, CostKind::Ising),
            (&g, CostKind::Mis),
            (&sk, CostKind::Sk),
        ] {
            let cost = Cost::new(kind, graph);
            let n = graph.num_vertices();
            for idx in 0..1usize << n {
                let bit = |v: usize| (idx >> (n - 1 - v)) & 1;
                let total: f64 = graph
                    .edges()
                    .iter()
                    .enumerate()
                    .map(|(k, &(u, v))| cost.edge_table(k)[bit(u)][bit(v)])
                    .sum();
                assert!((total - cost.value_at_index(idx) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn average_per_edge_matches_enumeration() {
        for seed in 0..3 {
            let g = generate_regular_graph(12, 3, seed).unwrap();
            for kind in [CostKind::MaxCut, CostKind::Ising, CostKind::Mis] {
                let cost = Cost::new(kind, &g);
                let values = cost.values(ENUMERATION_CAP).unwrap();
                let brute = values.iter().sum::<i64>() as f64 / values.len() as f64 / g.num_edges() as f64;
                assert!((brute - cost.average_per_edge()).abs() < 1e-12, "{kind:?}");
            }
        }
    }

    fn graph_and_string() -> impl Strategy<Value = (Graph, BitString)> {
        (4usize..14, 0u64..1000, any::<u64>()).prop_filter_map("odd n·d", |(n, seed, raw)| {
            let n = n + n % 2;
            let g = generate_regular_graph(n, 3, seed).ok()?;
            let w = BitString::from_index(n, raw as usize & ((1 << n) - 1), Convention::Spin);
            Some((g, w))
        })
    }

    proptest! {
        #[test]
        fn flip_gain_matches_reevaluation(seed in 0u64..500, idx in 0usize..4096, kind in 0usize..4) {
            let g = if kind == 3 { Graph::sherrington_kirkpatrick(12, seed) } else { generate_regular_graph(12, 3, seed).unwrap() };
            let kind = [CostKind::MaxCut, CostKind::Ising, CostKind::Mis, CostKind::Sk][kind];
            let cost = Cost::new(kind, &g);
            let w = BitString::from_index(12, idx, kind.convention());
            let one: Vec<bool> = w.bits().collect();
            for i in 0..12 {
                let gain = cost.evaluate(&w.flipped(i)).unwrap() - cost.evaluate(&w).unwrap();
                prop_assert_eq!(cost.flip_gain(&one, i), gain);
            }
        }

        #[test]
        fn maxcut_ising_relation((g, w) in graph_and_string()) {
            let mc = Cost::maxcut(&g).evaluate(&w).unwrap();
            let cz = Cost::ising(&g).evaluate(&w).unwrap();
            prop_assert_eq!(2 * mc, g.num_edges() as i64 + cz);
        }

        #[test]
        fn deltas_sum_and_match_flips((g, w) in graph_and_string()) {
            let cost = Cost::ising(&g);
            let cz = cost.evaluate(&w).unwrap();
            let deltas = flip_deltas(&g, &w).unwrap();
            prop_assert_eq!(deltas.iter().sum::<i64>(), -2 * cz);
            for (i, &d) in deltas.iter().enumerate() {
                prop_assert_eq!(2 * d, cost.evaluate(&w.flipped(i)).unwrap() - cz);
                prop_assert!(d.abs() == 1 || d.abs() == 3);
            }
        }

        #[test]
        fn pruning_keeps_cost((g, w) in graph_and_string()) {
            let b = BitString::binary(w.bits().map(u8::from).collect()).unwrap();
            let cost = Cost::mis(&g);
            let pruned = prune_to_independent_set(&g, &b).unwrap();
            prop_assert!(is_independent_set(&g, &pruned));
            prop_assert!(cost.evaluate(&pruned).unwrap() >= cost.evaluate(&b).unwrap());
        }
    }
}
