//! Warm-start QAOA expectations on large graphs from edge neighborhoods.
//!
//! With `k` mixer layers the conjugated edge term `U†C_eU` acts only on
//! vertices within distance `r = k − 1` of the edge, so the expectation is a
//! sum of small local problems. Two evaluation strategies are provided:
//!
//! * [`Strategy::Direct`] simulates the whole induced ball as a state vector
//!   with the full induced circuit (every induced edge, mixers on every ball
//!   qubit). Simple and slow; it is the reference.
//! * [`Strategy::LightCone`] works in the Heisenberg picture. Vertices at
//!   distance `r` only see the first mixer and phase layer, so they are traced
//!   out analytically; what remains is a dense operator on the inner vertices
//!   (distance `< r`) contracted against per-vertex factors. Inner operators
//!   are shared by every edge with the same local structure and per-edge
//!   contractions share common prefixes.

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problems::{BitString, Cost, EdgeTable, Graph};

// Identifies a unary class by its tag and edge-table signature.
type ClassKey = (u8, Vec<([u64; 4], u8)>);

/// Default largest neighborhood (ball) size.
pub const LOCAL_CAP: usize = 26;

/// Largest inner-vertex count handled by [`Strategy::LightCone`].
pub const INNER_CAP: usize = 10;

/// Vertices within distance `r` of an edge, in canonical order.
///
/// The order is a breadth-first traversal: the two endpoints (smaller index
/// first), then the unvisited neighbors of each listed vertex in turn, sorted
/// by global index. Two tree neighborhoods of a regular graph are therefore
/// identified by a structure-preserving map that sends position to position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeNeighborhood {
    edge: (usize, usize),
    radius: usize,
    vertices: Vec<usize>,
    distances: Vec<usize>,
    parents: Vec<Option<usize>>,
    local_edges: Vec<(usize, usize)>,
    edge_ids: Vec<usize>,
    is_tree: bool,
}

impl EdgeNeighborhood {
    pub fn edge(&self) -> (usize, usize) {
        self.edge
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Global index of every local vertex.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn distances(&self) -> &[usize] {
        &self.distances
    }

    /// Local index of the vertex through which each vertex was discovered.
    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    /// Induced edges as local index pairs `(i, j)` with `i < j`, sorted.
    pub fn local_edges(&self) -> &[(usize, usize)] {
        &self.local_edges
    }

    /// Global edge index of each entry of [`Self::local_edges`].
    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_tree(&self) -> bool {
        self.is_tree
    }

    /// The restriction of `w` to the neighborhood, as a basis index with
    /// local vertex 0 most significant.
    pub fn local_index(&self, w: &BitString) -> usize {
        self.vertices
            .iter()
            .fold(0, |acc, &v| (acc << 1) | usize::from(w.is_one(v)))
    }
}

/// Ball of radius `r` around `edge`.
pub fn edge_neighborhood(graph: &Graph, edge: (usize, usize), r: usize) -> Result<EdgeNeighborhood> {
    let (a, b) = (edge.0.min(edge.1), edge.0.max(edge.1));
    if graph.edge_index(a, b).is_none() {
        return Err(Error::MissingEdge(edge.0, edge.1));
    }
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut vertices = vec![a, b];
    let mut distances = vec![0, 0];
    let mut parents = vec![None, None];
    local.insert(a, 0);
    local.insert(b, 1);
    let mut queue: VecDeque<usize> = VecDeque::from([0, 1]);
    while let Some(i) = queue.pop_front() {
        if distances[i] == r {
            continue;
        }
        for &u in graph.neighbors(vertices[i]) {
            if local.contains_key(&u) {
                continue;
            }
            local.insert(u, vertices.len());
            queue.push_back(vertices.len());
            vertices.push(u);
            distances.push(distances[i] + 1);
            parents.push(Some(i));
        }
    }
    let mut pairs = Vec::new();
    for (i, &v) in vertices.iter().enumerate() {
        for (&u, &k) in graph.neighbors(v).iter().zip(graph.incident_edges(v)) {
            if let Some(&j) = local.get(&u) {
                if i < j {
                    pairs.push(((i, j), k));
                }
            }
        }
    }
    pairs.sort_unstable();
    let is_tree = pairs.len() + 1 == vertices.len();
    let (local_edges, edge_ids) = pairs.into_iter().unzip();
    Ok(EdgeNeighborhood {
        edge: (a, b),
        radius: r,
        vertices,
        distances,
        parents,
        local_edges,
        edge_ids,
        is_tree,
    })
}

/// Fraction `δ` of edges whose radius-`r` neighborhood contains a cycle.
pub fn tree_fraction(graph: &Graph, r: usize) -> f64 {
    let m = graph.num_edges();
    if m == 0 {
        return 0.0;
    }
    let trees = graph
        .edges()
        .iter()
        .filter(|&&e| edge_neighborhood(graph, e, r).is_ok_and(|nb| nb.is_tree()))
        .count();
    1.0 - trees as f64 / m as f64
}

/// Mean of `C(z)/m` over all strings, from the edge terms.
pub fn average_cost_per_edge(cost: &Cost<'_>) -> f64 {
    cost.average_per_edge()
}

/// How [`LocalSimulator`] evaluates each edge term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    LightCone,
    Direct,
}

fn table_key(t: &EdgeTable) -> [u64; 4] {
    [t[0][0].to_bits(), t[0][1].to_bits(), t[1][0].to_bits(), t[1][1].to_bits()]
}

fn oriented(t: EdgeTable, flip: bool) -> EdgeTable {
    if flip {
        [[t[0][0], t[1][0]], [t[0][1], t[1][1]]]
    } else {
        t
    }
}

/// Operator on the inner vertices shared by all edges with the same shape.
#[derive(Debug, Clone)]
struct InnerShape {
    size: usize,
    lifetimes: Vec<usize>,
    center: EdgeTable,
    /// `(i, j, table, last phase layer containing the edge)`.
    edges: Vec<(usize, usize, EdgeTable, usize)>,
}

impl InnerShape {
    fn key(&self) -> Vec<u64> {
        let mut key = vec![self.size as u64];
        key.extend(self.lifetimes.iter().map(|&l| l as u64));
        key.extend(table_key(&self.center));
        for &(i, j, t, last) in &self.edges {
            key.extend([i as u64, j as u64, last as u64]);
            key.extend(table_key(&t));
        }
        key
    }
}

/// Traced-out outer vertex attached to one or more inner vertices.
#[derive(Debug, Clone)]
struct Leaf {
    bit: usize,
    /// Inner neighbors with the edge table oriented `[inner][leaf]`.
    links: Vec<(usize, EdgeTable)>,
}

#[derive(Debug, Clone)]
struct EdgePlan {
    neighborhood: EdgeNeighborhood,
    /// Inner vertices come first in the neighborhood order.
    inner: usize,
    shape: usize,
    leaves: Vec<Leaf>,
    /// Ball edges with oriented tables (direct strategy).
    ball_edges: Vec<(usize, usize, EdgeTable)>,
    center: EdgeTable,
}

/// Prepared neighborhoods for one graph, cost and depth.
#[derive(Debug, Clone)]
pub struct LocalSimulator<'g> {
    cost: Cost<'g>,
    k: usize,
    strategy: Strategy,
    plans: Vec<EdgePlan>,
    shapes: Vec<InnerShape>,
    tree_fraction: f64,
}

impl<'g> LocalSimulator<'g> {
    /// Simulator for warm-start circuits with `k` mixer layers
    /// (`2k − 1` angles, depth `p = k − 1/2`, radius `r = k − 1`).
    pub fn new(cost: Cost<'g>, k: usize) -> Result<Self> {
        Self::with_options(cost, k, Strategy::LightCone, LOCAL_CAP)
    }

    pub fn with_options(cost: Cost<'g>, k: usize, strategy: Strategy, cap: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("at least one mixer layer is required".into()));
        }
        if !cost.is_edge_decomposable() {
            return Err(Error::Unsupported(
                "the independent-set cost is only a sum of edge terms without isolated vertices"
                    .into(),
            ));
        }
        let graph = cost.graph();
        let r = k - 1;
        let mut shapes = Vec::new();
        let mut shape_ids: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut plans = Vec::with_capacity(graph.num_edges());
        let mut trees = 0;
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            let nb = edge_neighborhood(graph, (a, b), r)?;
            if nb.len() > cap {
                return Err(Error::CapExceeded {
                    what: "edge neighborhood",
                    n: nb.len(),
                    cap,
                });
            }
            trees += usize::from(nb.is_tree());
            let inner = if r == 0 {
                nb.len()
            } else {
                nb.distances().iter().take_while(|&&d| d < r).count()
            };
            if strategy == Strategy::LightCone && inner > INNER_CAP {
                return Err(Error::CapExceeded {
                    what: "light-cone inner region",
                    n: inner,
                    cap: INNER_CAP,
                });
            }
            let ball_edges: Vec<_> = nb
                .local_edges()
                .iter()
                .zip(nb.edge_ids())
                .map(|(&(i, j), &id)| {
                    let flip = graph.edges()[id].0 != nb.vertices()[i];
                    (i, j, oriented(cost.edge_table(id), flip))
                })
                .collect();
            let center = cost.edge_table(e);
            let dist = nb.distances();
            let shape = InnerShape {
                size: inner,
                lifetimes: dist[..inner].iter().map(|&d| k - d).collect(),
                center,
                edges: ball_edges
                    .iter()
                    .filter(|&&(_, j, _)| j < inner)
                    .filter(|_| k >= 2)
                    .map(|&(i, j, t)| (i, j, t, k - 1 - dist[i].min(dist[j])))
                    .collect(),
            };
            let shape = *shape_ids.entry(shape.key()).or_insert_with(|| {
                shapes.push(shape);
                shapes.len() - 1
            });
            let mut leaves: Vec<Leaf> = (inner..nb.len())
                .map(|bit| Leaf {
                    bit,
                    links: Vec::new(),
                })
                .collect();
            for &(i, j, t) in &ball_edges {
                if i < inner && j >= inner {
                    leaves[j - inner].links.push((i, t));
                }
            }
            plans.push(EdgePlan {
                neighborhood: nb,
                inner,
                shape,
                leaves,
                ball_edges,
                center,
            });
        }
        let m = graph.num_edges();
        Ok(Self {
            cost,
            k,
            strategy,
            plans,
            shapes,
            tree_fraction: if m == 0 { 0.0 } else { 1.0 - trees as f64 / m as f64 },
        })
    }

    pub fn cost(&self) -> &Cost<'g> {
        &self.cost
    }

    pub fn mixer_layers(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> usize {
        self.k - 1
    }

    pub fn num_angles(&self) -> usize {
        2 * self.k - 1
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Tree fraction `δ` at this simulator's radius.
    pub fn tree_fraction(&self) -> f64 {
        self.tree_fraction
    }

    /// Number of distinct inner operators needed per evaluation.
    pub fn num_shapes(&self) -> usize {
        self.shapes.len()
    }

    pub fn neighborhood(&self, edge: usize) -> &EdgeNeighborhood {
        &self.plans[edge].neighborhood
    }

    /// Prepares per-string data for repeated evaluation at a fixed `w`.
    pub fn bind(&self, w: &BitString) -> Result<BoundLocal<'_, 'g>> {
        w.ensure(self.cost.num_qubits(), self.cost.convention())?;
        let mut classes: Vec<UnaryClass> = Vec::new();
        let mut class_ids: HashMap<ClassKey, u32> = HashMap::new();
        let mut edges = Vec::with_capacity(self.plans.len());
        for plan in &self.plans {
            let verts = plan.neighborhood.vertices();
            let bit = |i: usize| u8::from(w.is_one(verts[i]));
            let mut unary: Vec<Vec<(EdgeTable, u8)>> = vec![Vec::new(); plan.inner];
            let mut multi = Vec::new();
            for leaf in &plan.leaves {
                if leaf.links.len() == 1 {
                    let (v, t) = leaf.links[0];
                    unary[v].push((t, bit(leaf.bit)));
                } else {
                    multi.push(MultiFactor {
                        links: leaf.links.clone(),
                        bit: bit(leaf.bit),
                    });
                }
            }
            let seq: Vec<u32> = unary
                .into_iter()
                .enumerate()
                .map(|(v, mut factors)| {
                    factors.sort_by(|x, y| {
                        (table_key(&x.0), x.1).cmp(&(table_key(&y.0), y.1))
                    });
                    let key = (bit(v), factors.iter().map(|(t, b)| (table_key(t), *b)).collect());
                    *class_ids.entry(key).or_insert_with(|| {
                        classes.push(UnaryClass {
                            bit: bit(v),
                            leaves: factors.clone(),
                        });
                        (classes.len() - 1) as u32
                    })
                })
                .collect();
            let stop = multi.iter().flat_map(|m| m.links.iter().map(|l| l.0)).min();
            let key = match stop {
                Some(f) => seq[..f].iter().copied().chain([STOP]).collect(),
                None => seq.clone(),
            };
            edges.push(BoundEdge {
                key,
                seq,
                multi,
                local_index: plan.neighborhood.local_index(w),
            });
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); self.shapes.len()];
        for (e, plan) in self.plans.iter().enumerate() {
            groups[plan.shape].push(e);
        }
        for g in &mut groups {
            g.sort_by(|&x, &y| edges[x].key.cmp(&edges[y].key).then(x.cmp(&y)));
        }
        let max_inner = self.shapes.iter().map(|s| s.size).max().unwrap_or(0);
        Ok(BoundLocal {
            sim: self,
            initial: self.cost.evaluate(w)? as f64,
            classes,
            edges,
            groups,
            scratch: (1..=max_inner).rev().map(|l| vec![Complex64::default(); 1 << (2 * (l - 1))]).collect(),
            direct_memo: HashMap::new(),
            work: Default::default(),
        })
    }

    /// Expected cost of `U|w⟩` for warm-start angles.
    pub fn expectation(&self, w: &BitString, angles: &[f64]) -> Result<f64> {
        self.bind(w)?.expectation(angles)
    }
}

#[derive(Debug, Clone)]
struct UnaryClass {
    bit: u8,
    leaves: Vec<(EdgeTable, u8)>,
}

#[derive(Debug, Clone)]
struct MultiFactor {
    links: Vec<(usize, EdgeTable)>,
    bit: u8,
}

#[derive(Debug, Clone)]
struct BoundEdge {
    /// Trie key: the unary classes, cut at the first vertex linked to a
    /// shared leaf and terminated by [`STOP`].
    key: Vec<u32>,
    seq: Vec<u32>,
    multi: Vec<MultiFactor>,
    local_index: usize,
}

/// A [`LocalSimulator`] bound to one starting string.
#[derive(Debug, Clone)]
pub struct BoundLocal<'s, 'g> {
    sim: &'s LocalSimulator<'g>,
    initial: f64,
    classes: Vec<UnaryClass>,
    edges: Vec<BoundEdge>,
    groups: Vec<Vec<usize>>,
    scratch: Vec<Vec<Complex64>>,
    direct_memo: HashMap<(usize, usize), f64>,
    /// Reused buffers for the inner tensor.
    work: (Vec<Complex64>, Vec<Complex64>),
}

/// Layer angles split out of a warm-start angle vector.
struct Angles<'a>(&'a [f64]);

impl Angles<'_> {
    fn beta(&self, j: usize) -> f64 {
        self.0[2 * (j - 1)]
    }

    fn gamma(&self, j: usize) -> f64 {
        self.0[2 * j - 1]
    }
}

/// Amplitude `⟨x| e^{−iβX} |w⟩` of one qubit.
fn mixer_amp(beta: f64, w: u8, x: usize) -> Complex64 {
    if usize::from(w) == x {
        Complex64::new(beta.cos(), 0.0)
    } else {
        Complex64::new(0.0, -beta.sin())
    }
}

/// `Σ_y |⟨y|e^{−iβX}|w⟩|² e^{−iγ Σ_links (T(x_u, y) − T(x'_u, y))}`.
fn leaf_factor(beta: f64, gamma: f64, w: u8, tables: &[(EdgeTable, usize, usize)]) -> Complex64 {
    (0..2)
        .map(|y| {
            let weight = mixer_amp(beta, w, y).norm_sqr();
            let phase: f64 = tables.iter().map(|(t, x, xp)| t[*x][y] - t[*xp][y]).sum();
            Complex64::from_polar(weight, -gamma * phase)
        })
        .sum()
}

/// `⟨y|e^{−iβX}|x⟩` of one qubit.
fn mixer_entry(c: f64, s: f64, y: usize, x: usize) -> Complex64 {
    if y == x {
        Complex64::new(c, 0.0)
    } else {
        Complex64::new(0.0, -s)
    }
}

/// Inner Heisenberg operator `Õ(x', x)` laid out as a pair tensor with
/// digit `2x_v + x'_v` per inner vertex (vertex 0 most significant).
///
/// Core vertices (lifetime ≥ 3) are conjugated densely. The remaining
/// rim vertices stay diagonal until the second mixer layer, so they are
/// carried as single bits and expanded to pair digits last.
///
/// The result is left in `buf`; `next` is scratch space.
fn inner_tensor(
    shape: &InnerShape,
    k: usize,
    angles: &Angles<'_>,
    buf: &mut Vec<Complex64>,
    next: &mut Vec<Complex64>,
) {
    let q = shape.size;
    let nc = shape.lifetimes.iter().take_while(|&&l| l >= 3).count();
    let nr = q - nc;
    let dimc = 1usize << nc;
    let phase_table = |bits: usize, layer: usize, gamma: f64| -> Vec<Complex64> {
        (0..1usize << bits)
            .map(|y| {
                let value: f64 = shape
                    .edges
                    .iter()
                    .filter(|e| e.3 >= layer)
                    .map(|&(i, j, t, _)| t[(y >> (bits - 1 - i)) & 1][(y >> (bits - 1 - j)) & 1])
                    .sum();
                Complex64::from_polar(1.0, -gamma * value)
            })
            .collect()
    };
    let mut core = vec![Complex64::new(1.0, 0.0); dimc * dimc];
    if nc > 0 {
        core.fill(Complex64::default());
        for y in 0..dimc {
            let (ya, yb) = ((y >> (nc - 1)) & 1, (y >> (nc - 2)) & 1);
            core[y * dimc + y] = Complex64::new(shape.center[ya][yb], 0.0);
        }
        for j in (3..=k).rev() {
            let (s, c) = angles.beta(j).sin_cos();
            for v in (0..nc).filter(|&v| shape.lifetimes[v] >= j) {
                conjugate_mixer(&mut core, dimc, 1 << (nc - 1 - v), c, s);
            }
            if j > 3 {
                let phases = phase_table(nc, j - 1, angles.gamma(j - 1));
                for (yp, row) in core.chunks_exact_mut(dimc).enumerate() {
                    let left = phases[yp].conj();
                    for (o, ph) in row.iter_mut().zip(&phases) {
                        *o *= left * ph;
                    }
                }
            }
        }
    }
    // Compact layout: core pair digits, then one bit per rim vertex.
    let (gamma2, gamma1) = match k {
        1 => (0.0, 0.0),
        2 => (0.0, angles.gamma(1)),
        _ => (angles.gamma(2), angles.gamma(1)),
    };
    let ph2 = phase_table(q, 2, gamma2);
    let spread = |x: usize, bits: usize| (0..bits).fold(0, |acc, i| acc | (((x >> i) & 1) << (2 * i)));
    let rim_dim = 1usize << nr;
    buf.clear();
    buf.resize(dimc * dimc * rim_dim, Complex64::default());
    for yc in 0..dimc {
        for ycp in 0..dimc {
            let base = core[ycp * dimc + yc];
            let pair = (spread(yc, nc) << 1) | spread(ycp, nc);
            for yr in 0..rim_dim {
                let (y, yp) = ((yc << nr) | yr, (ycp << nr) | yr);
                let mut value = base * ph2[yp].conj() * ph2[y];
                if nc == 0 {
                    value *= shape.center[(y >> (q - 1)) & 1][(y >> (q - 2)) & 1];
                }
                buf[pair * rim_dim + yr] = value;
            }
        }
    }
    let (s2, c2) = if k >= 2 { angles.beta(2).sin_cos() } else { (0.0, 1.0) };
    // Core digits: (y, y') → (x, x') with ⟨y|M|x⟩ conj⟨y'|M|x'⟩.
    let kernel: [[Complex64; 4]; 4] = std::array::from_fn(|pn| {
        std::array::from_fn(|po| {
            let (x, xp, y, yp) = (pn >> 1, pn & 1, po >> 1, po & 1);
            mixer_entry(c2, s2, y, x) * mixer_entry(c2, s2, yp, xp).conj()
        })
    });
    for v in 0..nc {
        let stride = (1usize << (2 * (nc - 1 - v))) * rim_dim;
        for block in buf.chunks_exact_mut(4 * stride) {
            for i in 0..stride {
                let old = [block[i], block[stride + i], block[2 * stride + i], block[3 * stride + i]];
                for (pn, row) in kernel.iter().enumerate() {
                    block[pn * stride + i] = row[0] * old[0] + row[1] * old[1] + row[2] * old[2] + row[3] * old[3];
                }
            }
        }
    }
    // First-layer phase of one edge as a table over the pair digits of
    // its lower and higher endpoint.
    let cis = |x: f64| Complex64::from_polar(1.0, -gamma1 * x);
    let pair_phase = |t: &EdgeTable, flip: bool| -> [[Complex64; 4]; 4] {
        let t = oriented(*t, flip);
        std::array::from_fn(|pu| {
            std::array::from_fn(|pv| {
                cis(t[pu & 1][pv & 1]).conj() * cis(t[pu >> 1][pv >> 1])
            })
        })
    };
    let layer1: Vec<(usize, usize, [[Complex64; 4]; 4])> = if gamma1 == 0.0 {
        Vec::new()
    } else {
        shape
            .edges
            .iter()
            .map(|&(i, j, t, _)| (i.min(j), i.max(j), pair_phase(&t, i > j)))
            .collect()
    };
    for &(u, v, ref e) in layer1.iter().filter(|e| e.1 < nc) {
        let digit = |pair: usize, w: usize| (pair >> (2 * (nc - 1 - w))) & 3;
        for (pair, chunk) in buf.chunks_exact_mut(rim_dim).enumerate() {
            let f = e[digit(pair, u)][digit(pair, v)];
            chunk.iter_mut().for_each(|o| *o *= f);
        }
    }
    // Rim bits y → pair digits (x, x'), picking up the phases of edges
    // whose higher endpoint is the rim vertex.
    let (cc, cs) = (c2 * c2, c2 * s2);
    for v in nc..q {
        let low = 1usize << (q - 1 - v);
        let high = buf.len() / (2 * low);
        // Phase factors for every combination of linked digits.
        let links: Vec<(usize, &[[Complex64; 4]; 4])> = layer1
            .iter()
            .filter(|e| e.1 == v)
            .map(|(u, _, e)| (*u, e))
            .collect();
        let factors: Vec<[Complex64; 4]> = (0..1usize << (2 * links.len()))
            .map(|combo| {
                let mut f = [Complex64::new(1.0, 0.0); 4];
                for (i, &(_, e)) in links.iter().enumerate() {
                    let pu = (combo >> (2 * i)) & 3;
                    for (fp, ep) in f.iter_mut().zip(&e[pu]) {
                        *fp *= ep;
                    }
                }
                f
            })
            .collect();
        next.clear();
        next.resize(high * 4 * low, Complex64::default());
        for (h, out) in next.chunks_exact_mut(4 * low).enumerate() {
            let combo = links
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &(u, _))| acc | (((h >> (2 * (v - 1 - u))) & 3) << (2 * i)));
            let f = &factors[combo];
            let (a, b) = buf[2 * h * low..(2 * h + 2) * low].split_at(low);
            let (o0, rest) = out.split_at_mut(low);
            let (o1, rest) = rest.split_at_mut(low);
            let (o2, o3) = rest.split_at_mut(low);
            for l in 0..low {
                let (x0, x1) = (a[l], b[l]);
                let d = x0 - x1;
                let diag = d * cc;
                let off = Complex64::new(-d.im * cs, d.re * cs);
                o0[l] = f[0] * (x1 + diag);
                o1[l] = f[1] * off;
                o2[l] = -(f[2] * off);
                o3[l] = f[3] * (x0 - diag);
            }
        }
        std::mem::swap(buf, next);
    }
}

/// `O ← R† O R` for `R = e^{−iβX}` on the qubit with mask `bit`.
fn conjugate_mixer(op: &mut [Complex64], dim: usize, bit: usize, c: f64, s: f64) {
    // Left factor e^{+iβX}: rows y and y^bit mix with (c, +is).
    for y in (0..dim).filter(|y| y & bit == 0) {
        let (top, bot) = (y * dim, (y | bit) * dim);
        for col in 0..dim {
            let (a, b) = (op[top + col], op[bot + col]);
            op[top + col] = Complex64::new(c * a.re - s * b.im, c * a.im + s * b.re);
            op[bot + col] = Complex64::new(c * b.re - s * a.im, c * b.im + s * a.re);
        }
    }
    // Right factor e^{−iβX}: columns mix with (c, −is).
    for row in op.chunks_exact_mut(dim) {
        for x in (0..dim).filter(|x| x & bit == 0) {
            let (a, b) = (row[x], row[x | bit]);
            row[x] = Complex64::new(c * a.re + s * b.im, c * a.im - s * b.re);
            row[x | bit] = Complex64::new(c * b.re + s * a.im, c * b.im - s * a.re);
        }
    }
}

impl<'s, 'g> BoundLocal<'s, 'g> {
    /// `C(w)`, the value at all-zero angles.
    pub fn initial_cost(&self) -> f64 {
        self.initial
    }

    pub fn num_angles(&self) -> usize {
        self.sim.num_angles()
    }

    pub fn expectation(&mut self, angles: &[f64]) -> Result<f64> {
        Ok(self.edge_values(angles)?.iter().sum())
    }

    /// Per-edge expectations `⟨w|U†C_eU|w⟩` in edge order.
    pub fn edge_values(&mut self, angles: &[f64]) -> Result<Vec<f64>> {
        if angles.len() != self.sim.num_angles() {
            return Err(Error::InvalidParams(format!(
                "expected {} warm-start angles, got {}",
                self.sim.num_angles(),
                angles.len()
            )));
        }
        match self.sim.strategy {
            Strategy::LightCone => Ok(self.light_cone(&Angles(angles))),
            Strategy::Direct => Ok(self.direct(&Angles(angles))),
        }
    }

    fn light_cone(&mut self, angles: &Angles<'_>) -> Vec<f64> {
        let sim = self.sim;
        let k = sim.k;
        let (b1, g1) = (angles.beta(1), if k >= 2 { angles.gamma(1) } else { 0.0 });
        let tables: Vec<[Complex64; 4]> = self
            .classes
            .iter()
            .map(|cls| {
                std::array::from_fn(|p| {
                    let (x, xp) = (p >> 1, p & 1);
                    let mut h = mixer_amp(b1, cls.bit, x) * mixer_amp(b1, cls.bit, xp).conj();
                    for &(t, w) in &cls.leaves {
                        h *= leaf_factor(b1, g1, w, &[(t, x, xp)]);
                    }
                    h
                })
            })
            .collect();
        let mut out = vec![0.0; self.edges.len()];
        for (shape_id, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                continue;
            }
            let shape = &sim.shapes[shape_id];
            let (mut tensor, mut spare) = std::mem::take(&mut self.work);
            inner_tensor(shape, k, angles, &mut tensor, &mut spare);
            let q = shape.size;
            let keys: Vec<&[u32]> = group.iter().map(|&e| self.edges[e].key.as_slice()).collect();
            let depth = self.scratch.len();
            let ctx = TrieContext {
                q,
                tables: &tables,
                edges: &self.edges,
                b1,
                g1,
            };
            contract_trie(&ctx, &tensor, 0, &keys, group, &mut self.scratch[depth - q..], &mut out);
            self.work = (tensor, spare);
        }
        out
    }

    fn direct(&mut self, angles: &Angles<'_>) -> Vec<f64> {
        self.direct_memo.clear();
        let sim = self.sim;
        let mut out = Vec::with_capacity(self.edges.len());
        let mut shape_of: HashMap<Vec<u64>, usize> = HashMap::new();
        for (plan, be) in sim.plans.iter().zip(&self.edges) {
            let mut key = vec![plan.neighborhood.len() as u64];
            for &(i, j, t) in &plan.ball_edges {
                key.extend([i as u64, j as u64]);
                key.extend(table_key(&t));
            }
            key.extend(table_key(&plan.center));
            let n_shapes = shape_of.len();
            let shape = *shape_of.entry(key).or_insert(n_shapes);
            let value = *self
                .direct_memo
                .entry((shape, be.local_index))
                .or_insert_with(|| direct_ball(plan, be.local_index, sim.k, angles));
            out.push(value);
        }
        out
    }
}

/// Trie key entry marking an edge that leaves the shared contraction.
const STOP: u32 = u32::MAX;

struct TrieContext<'a> {
    q: usize,
    tables: &'a [[Complex64; 4]],
    edges: &'a [BoundEdge],
    b1: f64,
    g1: f64,
}

/// Contracts the shared inner tensor against the unary factors of every
/// edge in `edges`, reusing partial sums across common class prefixes.
fn contract_trie(
    ctx: &TrieContext<'_>,
    tensor: &[Complex64],
    level: usize,
    keys: &[&[u32]],
    edges: &[usize],
    scratch: &mut [Vec<Complex64>],
    out: &mut [f64],
) {
    let stride = tensor.len() / 4;
    let mut start = 0;
    while start < keys.len() {
        let class = keys[start][level];
        let end = start + keys[start..].iter().take_while(|s| s[level] == class).count();
        if class == STOP {
            for &e in &edges[start..end] {
                out[e] = explicit_tail(ctx, tensor, level, &ctx.edges[e]);
            }
        } else if level + 1 == ctx.q {
            let h = &ctx.tables[class as usize];
            let value: Complex64 = (0..4).map(|p| h[p] * tensor[p]).sum();
            for &e in &edges[start..end] {
                out[e] = value.re;
            }
        } else {
            let h = &ctx.tables[class as usize];
            let (buf, deeper) = scratch.split_first_mut().expect("scratch depth");
            let (t0, rest) = tensor.split_at(stride);
            let (t1, rest) = rest.split_at(stride);
            let (t2, t3) = rest.split_at(stride);
            for (i, o) in buf.iter_mut().enumerate() {
                *o = h[0] * t0[i] + h[1] * t1[i] + h[2] * t2[i] + h[3] * t3[i];
            }
            contract_trie(ctx, buf, level + 1, &keys[start..end], &edges[start..end], deeper, out);
        }
        start = end;
    }
}

/// Finishes one edge from `level` on, where some leaves link several
/// remaining inner vertices.
fn explicit_tail(ctx: &TrieContext<'_>, tensor: &[Complex64], level: usize, edge: &BoundEdge) -> f64 {
    let q = ctx.q;
    let rest = q - level;
    let mut factor = vec![Complex64::new(1.0, 0.0); tensor.len()];
    for (p, f) in factor.iter_mut().enumerate() {
        for (i, &class) in edge.seq[level..].iter().enumerate() {
            *f *= ctx.tables[class as usize][(p >> (2 * (rest - 1 - i))) & 3];
        }
    }
    let digit = |p: usize, v: usize| (p >> (2 * (q - 1 - v))) & 3;
    let mut links = Vec::new();
    for mf in &edge.multi {
        let width = mf.links.len();
        let values: Vec<Complex64> = (0..1usize << (2 * width))
            .map(|combo| {
                links.clear();
                links.extend(mf.links.iter().enumerate().map(|(i, &(_, t))| {
                    let d = (combo >> (2 * i)) & 3;
                    (t, d >> 1, d & 1)
                }));
                leaf_factor(ctx.b1, ctx.g1, mf.bit, &links)
            })
            .collect();
        for (p, f) in factor.iter_mut().enumerate() {
            let combo = mf
                .links
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &(v, _))| acc | (digit(p, v) << (2 * i)));
            *f *= values[combo];
        }
    }
    factor.iter().zip(tensor).map(|(f, t)| f * t).sum::<Complex64>().re
}

/// Full induced-ball simulation of one edge term.
fn direct_ball(plan: &EdgePlan, local_index: usize, k: usize, angles: &Angles<'_>) -> f64 {
    let b = plan.neighborhood.len();
    let dim = 1usize << b;
    let bitpos = |v: usize| b - 1 - v;
    let costs: Vec<f64> = (0..dim)
        .map(|x| {
            plan.ball_edges
                .iter()
                .map(|&(i, j, t)| t[(x >> bitpos(i)) & 1][(x >> bitpos(j)) & 1])
                .sum()
        })
        .collect();
    let mut psi = vec![Complex64::default(); dim];
    psi[local_index] = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        let (s, c) = angles.beta(j).sin_cos();
        for v in 0..b {
            let bit = 1usize << bitpos(v);
            for x in (0..dim).filter(|x| x & bit == 0) {
                let (p, q) = (psi[x], psi[x | bit]);
                psi[x] = Complex64::new(c * p.re + s * q.im, c * p.im - s * q.re);
                psi[x | bit] = Complex64::new(c * q.re + s * p.im, c * q.im - s * p.re);
            }
        }
        if j < k {
            let gamma = angles.gamma(j);
            for (a, &cv) in psi.iter_mut().zip(&costs) {
                *a *= Complex64::from_polar(1.0, -gamma * cv);
            }
        }
    }
    psi.iter()
        .enumerate()
        .map(|(x, a)| a.norm_sqr() * plan.center[(x >> bitpos(0)) & 1][(x >> bitpos(1)) & 1])
        .sum()
}

/// `⟨w|U†CU|w⟩` summed over edge neighborhoods, for warm-start parameters.
pub fn local_expectation(
    cost: &Cost<'_>,
    w: &BitString,
    params: &crate::statevector::QaoaParams,
) -> Result<f64> {
    if params.schedule() != crate::statevector::Schedule::WarmStart {
        return Err(Error::InvalidParams(
            "local simulation needs a warm-start (half-integral depth) schedule".into(),
        ));
    }
    LocalSimulator::new(*cost, params.mixer_layers())?.expectation(w, params.angles())
}
