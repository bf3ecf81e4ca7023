//! Classical warm-start generators and thermal samplers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problems::{density_of_states, BitString, Convention, Cost, CostKind, Graph, ENUMERATION_CAP};

/// Default Metropolis updates per vertex.
pub const UPDATES_PER_VERTEX: usize = 1000;

/// RNG for item `index` of a batch seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Move set of the Metropolis chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveSet {
    /// Flip one uniformly chosen vertex, accept with `min(1, e^{ΔC/T})`.
    SingleSite,
    /// Wolff cluster flips over satisfied couplings (Ising-type costs).
    Cluster,
}

/// Fixed-temperature sampler settings with `H = −C`, so strings are
/// weighted by `e^{C/T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    temperature: f64,
    updates: Option<usize>,
    moves: MoveSet,
}

impl ThermalSpec {
    /// `T > 0`; `T = ∞` accepts every move.
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        Ok(Self {
            temperature,
            updates: None,
            moves: MoveSet::SingleSite,
        })
    }

    /// Inverse temperature `β ≥ 0`.
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be nonnegative, got {beta}"
            )));
        }
        Self::new(if beta == 0.0 { f64::INFINITY } else { 1.0 / beta })
    }

    pub fn with_updates(mut self, updates: usize) -> Result<Self> {
        if updates == 0 {
            return Err(Error::InvalidArgument("at least one update is required".into()));
        }
        self.updates = Some(updates);
        Ok(self)
    }

    pub fn with_moves(mut self, moves: MoveSet) -> Self {
        self.moves = moves;
        self
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn moves(&self) -> MoveSet {
        self.moves
    }

    /// Update count, defaulting to `1000·n`.
    pub fn updates(&self, n: usize) -> usize {
        self.updates.unwrap_or(UPDATES_PER_VERTEX * n).max(1)
    }
}

/// Ising coupling `J_e` with `−C = −Σ J_e z_u z_v + const`.
fn ising_coupling(cost: &Cost<'_>, e: usize) -> Result<f64> {
    match cost.kind() {
        CostKind::MaxCut => Ok(-0.5),
        CostKind::Ising => Ok(-1.0),
        CostKind::Sk => Ok(f64::from(cost.graph().coupling(e))),
        CostKind::Mis => Err(Error::Unsupported(
            "cluster moves need a pure two-body spin cost".into(),
        )),
    }
}

/// One string from a Metropolis chain started at a uniform string.
pub fn metropolis_sample(cost: &Cost<'_>, spec: &ThermalSpec, rng: &mut impl Rng) -> Result<BitString> {
    let g = cost.graph();
    let n = g.num_vertices();
    let mut one: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    if n == 0 {
        return to_string(cost.convention(), &one);
    }
    let beta = spec.beta();
    let updates = spec.updates(n);
    match spec.moves {
        MoveSet::SingleSite => {
            for _ in 0..updates {
                let i = rng.gen_range(0..n);
                let gain = cost.flip_gain(&one, i);
                if gain >= 0 || rng.gen::<f64>() < (beta * gain as f64).exp() {
                    one[i] = !one[i];
                }
            }
        }
        MoveSet::Cluster => {
            let add: Vec<f64> = (0..g.num_edges())
                .map(|e| Ok(1.0 - (-2.0 * beta * ising_coupling(cost, e)?.abs()).exp()))
                .collect::<Result<_>>()?;
            let couplings: Vec<f64> = (0..g.num_edges())
                .map(|e| ising_coupling(cost, e))
                .collect::<Result<_>>()?;
            let mut in_cluster = vec![false; n];
            let mut cluster = Vec::new();
            for _ in 0..updates {
                let start = rng.gen_range(0..n);
                cluster.clear();
                cluster.push(start);
                in_cluster[start] = true;
                let mut head = 0;
                while head < cluster.len() {
                    let i = cluster[head];
                    head += 1;
                    for (&j, &e) in g.neighbors(i).iter().zip(g.incident_edges(i)) {
                        let zz = if one[i] == one[j] { 1.0 } else { -1.0 };
                        if !in_cluster[j] && couplings[e] * zz > 0.0 && rng.gen::<f64>() < add[e] {
                            in_cluster[j] = true;
                            cluster.push(j);
                        }
                    }
                }
                for &i in &cluster {
                    one[i] = !one[i];
                    in_cluster[i] = false;
                }
            }
        }
    }
    to_string(cost.convention(), &one)
}

/// `count` independent chains; chain `i` uses stream `(seed, i)`.
pub fn metropolis_samples(cost: &Cost<'_>, spec: &ThermalSpec, seed: u64, count: usize) -> Result<Vec<BitString>> {
    (0..count)
        .map(|i| metropolis_sample(cost, spec, &mut stream_rng(seed, i as u64)))
        .collect()
}

fn to_string(convention: Convention, one: &[bool]) -> Result<BitString> {
    match convention {
        Convention::Spin => BitString::spins(one.iter().map(|&b| if b { -1 } else { 1 }).collect()),
        Convention::Binary => BitString::binary(one.iter().map(|&b| u8::from(b)).collect()),
    }
}

/// Settings for [`goemans_williamson`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GwConfig {
    /// Vector dimension; `None` uses `⌈√(2n)⌉`.
    pub rank: Option<usize>,
    pub sweeps: usize,
    pub roundings: usize,
}

impl Default for GwConfig {
    fn default() -> Self {
        Self {
            rank: None,
            sweeps: 50,
            roundings: 100,
        }
    }
}

/// Relaxation and rounding details of one [`goemans_williamson`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct GwReport {
    pub string: BitString,
    pub cut: i64,
    /// Relaxed objective `Σ (1 − v_u·v_v)/2` at the start and after each sweep.
    pub relaxation: Vec<f64>,
    pub rounding_cuts: Vec<i64>,
}

/// Max-cut string from a low-rank vector relaxation and hyperplane rounding.
///
/// Each vertex holds a unit vector; a sweep sets every vector to the
/// normalized negative sum of its neighbors, which never lowers the
/// relaxed objective. The best of the random-hyperplane roundings wins.
pub fn goemans_williamson(graph: &Graph, config: &GwConfig, seed: u64) -> Result<GwReport> {
    let n = graph.num_vertices();
    let rank = config.rank.unwrap_or(((2 * n) as f64).sqrt().ceil() as usize).max(2);
    if config.roundings == 0 {
        return Err(Error::InvalidArgument("at least one rounding is required".into()));
    }
    if config.rank.is_some_and(|r| r < 2) {
        return Err(Error::InvalidArgument("rank must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.sample(StandardNormal)).collect() };
    let normalize = |v: &mut [f64]| -> bool {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            v.iter_mut().for_each(|x| *x /= norm);
            true
        } else {
            false
        }
    };
    let mut vecs = vec![0.0; n * rank];
    for row in vecs.chunks_exact_mut(rank) {
        loop {
            row.copy_from_slice(&gaussian(rank));
            if normalize(row) {
                break;
            }
        }
    }
    let objective = |vecs: &[f64]| -> f64 {
        graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                let dot: f64 = vecs[u * rank..(u + 1) * rank]
                    .iter()
                    .zip(&vecs[v * rank..(v + 1) * rank])
                    .map(|(a, b)| a * b)
                    .sum();
                (1.0 - dot) / 2.0
            })
            .sum()
    };
    let mut relaxation = vec![objective(&vecs)];
    let mut sum = vec![0.0; rank];
    for _ in 0..config.sweeps {
        for i in 0..n {
            sum.fill(0.0);
            for &j in graph.neighbors(i) {
                for (s, x) in sum.iter_mut().zip(&vecs[j * rank..(j + 1) * rank]) {
                    *s -= x;
                }
            }
            if normalize(&mut sum) {
                vecs[i * rank..(i + 1) * rank].copy_from_slice(&sum);
            }
        }
        relaxation.push(objective(&vecs));
    }
    let cost = Cost::maxcut(graph);
    let mut best: Option<(i64, BitString)> = None;
    let mut rounding_cuts = Vec::with_capacity(config.roundings);
    for _ in 0..config.roundings {
        let normal = gaussian(rank);
        let one: Vec<bool> = vecs
            .chunks_exact(rank)
            .map(|v| v.iter().zip(&normal).map(|(a, b)| a * b).sum::<f64>() < 0.0)
            .collect();
        let s = to_string(Convention::Spin, &one)?;
        let cut = cost.evaluate(&s)?;
        rounding_cuts.push(cut);
        if best.as_ref().is_none_or(|(c, _)| cut > *c) {
            best = Some((cut, s));
        }
    }
    let (cut, string) = best.expect("at least one rounding");
    Ok(GwReport {
        string,
        cut,
        relaxation,
        rounding_cuts,
    })
}

/// Greedy independent set: vertices in ascending degree order with
/// seed-shuffled ties, each added when no neighbor is already chosen.
pub fn greedy_mis(graph: &Graph, seed: u64) -> BitString {
    let n = graph.num_vertices();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.sort_by_key(|&v| graph.degree(v));
    let mut chosen = vec![0u8; n];
    for v in order {
        if graph.neighbors(v).iter().all(|&u| chosen[u] == 0) {
            chosen[v] = 1;
        }
    }
    BitString::binary(chosen).expect("0/1 values")
}

fn checked_dos(cost: &Cost<'_>) -> Result<BTreeMap<i64, u64>> {
    density_of_states(cost)
}

/// `Tr(C ρ_β)` with `ρ_β ∝ e^{βC}`, from a precomputed density of states.
pub fn thermal_mean_from_dos(dos: &BTreeMap<i64, u64>, beta: f64) -> f64 {
    let top = *dos.keys().next_back().unwrap_or(&0) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (&c, &count) in dos {
        let w = count as f64 * (beta * (c as f64 - top)).exp();
        num += w * c as f64;
        den += w;
    }
    num / den
}

/// Exact `Tr(C ρ_β)` by enumeration.
pub fn thermal_mean(cost: &Cost<'_>, beta: f64) -> Result<f64> {
    Ok(thermal_mean_from_dos(&checked_dos(cost)?, beta))
}

/// Exact Boltzmann probabilities `e^{βC(z)}/Z` in basis-index order.
pub fn boltzmann_probabilities(cost: &Cost<'_>, beta: f64) -> Result<Vec<f64>> {
    let values = cost.values(ENUMERATION_CAP)?;
    let top = values.iter().copied().max().unwrap_or(0) as f64;
    let mut probs: Vec<f64> = values.iter().map(|&c| (beta * (c as f64 - top)).exp()).collect();
    let z: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= z);
    Ok(probs)
}

/// I.i.d. strings drawn with exact probabilities `e^{βC(z)}/Z`.
pub fn exact_boltzmann_sample(cost: &Cost<'_>, beta: f64, seed: u64, count: usize) -> Result<Vec<BitString>> {
    let n = cost.num_qubits();
    let probs = boltzmann_probabilities(cost, beta)?;
    let dist = WeightedIndex::new(&probs)
        .map_err(|e| Error::InvalidArgument(format!("Boltzmann weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| BitString::from_index(n, dist.sample(&mut rng), cost.convention()))
        .collect())
}

/// Largest inverse temperature tried by the calibration bisection.
pub const BETA_CEILING: f64 = 1e3;

/// Bisection for a nondecreasing function `f` on `[0, ∞)`.
fn bisect_beta(mut f: impl FnMut(f64) -> Result<f64>, target: f64, tol: f64) -> Result<f64> {
    let mut hi = 1.0;
    while f(hi)? < target {
        hi *= 2.0;
        if hi > BETA_CEILING {
            return Err(Error::InvalidArgument(format!(
                "target {target} not reached below β = {BETA_CEILING}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        if (v - target).abs() < tol || hi - lo < 1e-15 {
            return Ok(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse temperature with `Tr(C ρ_β) = target`, by exact enumeration.
///
/// The target must lie in `[mean cost, max cost)`.
pub fn calibrate_beta(cost: &Cost<'_>, target: f64) -> Result<f64> {
    let dos = checked_dos(cost)?;
    let mean = thermal_mean_from_dos(&dos, 0.0);
    let max = *dos.keys().next_back().unwrap_or(&0) as f64;
    if (target - mean).abs() < 1e-12 {
        return Ok(0.0);
    }
    if !(target > mean && target < max) {
        return Err(Error::InvalidArgument(format!(
            "target {target} outside [{mean}, {max})"
        )));
    }
    bisect_beta(|b| Ok(thermal_mean_from_dos(&dos, b)), target, 1e-9)
}

/// Inverse temperature whose Metropolis mean cost matches `target`.
///
/// Each bisection step averages `chains` chains; every step reuses the
/// same streams so the estimate varies smoothly with `β`.
pub fn calibrate_beta_mcmc(cost: &Cost<'_>, target: f64, chains: usize, seed: u64) -> Result<f64> {
    if chains == 0 {
        return Err(Error::InvalidArgument("at least one chain is required".into()));
    }
    let m = cost.graph().num_edges().max(1) as f64;
    let estimate = |beta: f64| -> Result<f64> {
        let spec = ThermalSpec::from_beta(beta)?;
        let strings = metropolis_samples(cost, &spec, seed, chains)?;
        let total: i64 = strings.iter().map(|s| cost.evaluate(s)).sum::<Result<i64>>()?;
        Ok(total as f64 / chains as f64)
    };
    let mean = estimate(0.0)?;
    if target <= mean {
        return Ok(0.0);
    }
    // Statistical resolution of a chain-averaged mean.
    let tol = (m / chains as f64).sqrt() * 0.5;
    let mut iterations = 0;
    bisect_beta(
        |b| {
            iterations += 1;
            if iterations > 40 {
                return Ok(target);
            }
            estimate(b)
        },
        target,
        tol,
    )
}

/// A batch of warm-start strings with the provenance needed to replay it.
///
/// ```text
/// # graph: graphs/g12.txt
/// # generator: sa
/// # params: temperature=1.75 updates_per_vertex=1000
/// # seed: 7
/// +-+--+-++-+-
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct StringBatch {
    pub graph: String,
    pub generator: String,
    pub params: String,
    pub seed: u64,
    pub strings: Vec<BitString>,
}

impl StringBatch {
    pub fn format(&self) -> String {
        let mut out = format!(
            "# graph: {}\n# generator: {}\n# params: {}\n# seed: {}\n",
            self.graph, self.generator, self.params, self.seed
        );
        for s in &self.strings {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the batch format; `origin` only labels error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: PathBuf::from(origin),
            line,
            msg,
        };
        let mut header: BTreeMap<&str, &str> = BTreeMap::new();
        let mut strings = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((key, value)) = rest.split_once(':') {
                    header.insert(key.trim(), value.trim());
                }
                continue;
            }
            let s = BitString::parse(line).map_err(|e| err(i + 1, e.to_string()))?;
            if let Some(first) = strings.first() {
                let first: &BitString = first;
                if first.len() != s.len() || first.convention() != s.convention() {
                    return Err(err(i + 1, "strings differ in length or convention".into()));
                }
            }
            strings.push(s);
        }
        let field = |key: &str| -> Result<String> {
            header
                .get(key)
                .map(|v| v.to_string())
                .ok_or_else(|| err(1, format!("missing '{key}' header")))
        };
        let seed = field("seed")?
            .parse()
            .map_err(|e| err(1, format!("bad seed: {e}")))?;
        Ok(Self {
            graph: field("graph")?,
            generator: field("generator")?,
            params: field("params")?,
            seed,
            strings,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fs::read_to_string(path)?, path)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.format())?;
        Ok(())
    }
}
