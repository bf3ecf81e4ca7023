//! Closed-form conditions, local ensembles and bounds for warm starts.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::localsim::{edge_neighborhood, tree_fraction};
use crate::problems::{flip_deltas, BitString, Convention, Cost, CostKind, Graph, ENUMERATION_CAP};
use crate::statevector::{QaoaParams, Simulator, Start, StateVector};
use crate::warmstart::{boltzmann_probabilities, calibrate_beta, thermal_mean, BETA_CEILING};

/// Longest neighborhood whose strings fit in a `u64` key.
pub const KEY_CAP: usize = 64;

/// Probability distribution over strings on one abstract tree neighborhood.
///
/// Keys are basis indices with local vertex 0 most significant, in the
/// canonical order of [`crate::localsim::EdgeNeighborhood`].
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodDistribution {
    radius: usize,
    size: usize,
    probs: BTreeMap<u64, f64>,
}

impl NeighborhoodDistribution {
    /// Validates that probabilities are nonnegative and sum to one.
    pub fn new(radius: usize, size: usize, probs: BTreeMap<u64, f64>) -> Result<Self> {
        if size > KEY_CAP {
            return Err(Error::CapExceeded {
                what: "neighborhood key",
                n: size,
                cap: KEY_CAP,
            });
        }
        if let Some(&k) = probs.keys().find(|&&k| size < 64 && k >> size != 0) {
            return Err(Error::InvalidArgument(format!("key {k} has more than {size} bits")));
        }
        if probs.values().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument("negative probability".into()));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(Self { radius, size, probs })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of vertices in the neighborhood.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn probabilities(&self) -> &BTreeMap<u64, f64> {
        &self.probs
    }

    pub fn probability(&self, key: u64) -> f64 {
        self.probs.get(&key).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.probs.values().filter(|&&p| p > 0.0).count()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if (self.radius, self.size) != (other.radius, other.size) {
            return Err(Error::InvalidArgument(format!(
                "neighborhoods differ: radius {} size {} vs radius {} size {}",
                self.radius, self.size, other.radius, other.size
            )));
        }
        Ok(())
    }

    /// `Σ_x |p(x) − q(x)|`, in `[0, 2]`.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let mut total = 0.0;
        for (k, &p) in &self.probs {
            total += (p - other.probability(*k)).abs();
        }
        for (k, &q) in &other.probs {
            if !self.probs.contains_key(k) {
                total += q;
            }
        }
        Ok(total)
    }

    /// Equal-weight mixture of compatible distributions.
    pub fn mean(dists: &[Self]) -> Result<Self> {
        let first = dists
            .first()
            .ok_or_else(|| Error::InvalidArgument("mean of no distributions".into()))?;
        let weight = 1.0 / dists.len() as f64;
        let mut probs = BTreeMap::new();
        for d in dists {
            first.check_compatible(d)?;
            for (&k, &p) in &d.probs {
                *probs.entry(k).or_insert(0.0) += weight * p;
            }
        }
        Ok(Self {
            radius: first.radius,
            size: first.size,
            probs,
        })
    }
}

/// The tree neighborhoods `E_T` of a regular graph, with canonical vertex
/// lists, ready to restrict many strings.
#[derive(Debug, Clone)]
pub struct TreeNeighborhoods {
    radius: usize,
    size: usize,
    num_edges: usize,
    vertices: Vec<Vec<usize>>,
}

impl TreeNeighborhoods {
    /// Requires a regular graph so every tree neighborhood has one shape.
    pub fn new(graph: &Graph, r: usize) -> Result<Self> {
        if graph.regular_degree().is_none() {
            return Err(Error::InvalidArgument(
                "tree neighborhoods are only identified on regular graphs".into(),
            ));
        }
        let mut vertices = Vec::new();
        for &e in graph.edges() {
            let nb = edge_neighborhood(graph, e, r)?;
            if nb.is_tree() {
                vertices.push(nb.vertices().to_vec());
            }
        }
        let size = vertices.first().map_or(0, Vec::len);
        if vertices.is_empty() {
            return Err(Error::InvalidArgument(format!("no tree neighborhoods at radius {r}")));
        }
        if size > KEY_CAP {
            return Err(Error::CapExceeded {
                what: "neighborhood key",
                n: size,
                cap: KEY_CAP,
            });
        }
        Ok(Self {
            radius: r,
            size,
            num_edges: graph.num_edges(),
            vertices,
        })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `|E_T|`.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `δ = 1 − |E_T|/m`.
    pub fn tree_fraction(&self) -> f64 {
        1.0 - self.vertices.len() as f64 / self.num_edges as f64
    }

    /// Canonical vertex lists, one per tree edge.
    pub fn vertex_lists(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    /// `ρ_w,tree`: the empirical distribution of `w` over tree neighborhoods.
    pub fn ensemble(&self, w: &BitString) -> Result<NeighborhoodDistribution> {
        let n = self.vertices.iter().flatten().max().map_or(0, |&v| v + 1);
        if w.len() < n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: w.len(),
            });
        }
        let weight = 1.0 / self.len() as f64;
        let mut probs = BTreeMap::new();
        for vs in &self.vertices {
            let key = vs.iter().fold(0u64, |acc, &v| (acc << 1) | u64::from(w.is_one(v)));
            *probs.entry(key).or_insert(0.0) += weight;
        }
        Ok(NeighborhoodDistribution {
            radius: self.radius,
            size: self.size,
            probs,
        })
    }
}

/// `ρ_w,tree` for a single string.
pub fn local_ensemble(graph: &Graph, w: &BitString, r: usize) -> Result<NeighborhoodDistribution> {
    w.ensure(graph.num_vertices(), w.convention())?;
    TreeNeighborhoods::new(graph, r)?.ensemble(w)
}

/// `ρ_β,tree`: exact Boltzmann marginals `e^{βC}/Z` on every tree
/// neighborhood, averaged over `E_T`.
pub fn thermal_tree_ensemble_exact(cost: &Cost<'_>, beta: f64, r: usize) -> Result<NeighborhoodDistribution> {
    let graph = cost.graph();
    let n = graph.num_vertices();
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "exact thermal ensemble",
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let trees = TreeNeighborhoods::new(graph, r)?;
    let probs = boltzmann_probabilities(cost, beta)?;
    let weight = 1.0 / trees.len() as f64;
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    for vs in trees.vertex_lists() {
        let mut local: BTreeMap<u64, f64> = BTreeMap::new();
        for (idx, &p) in probs.iter().enumerate() {
            let key = vs
                .iter()
                .fold(0u64, |a, &v| (a << 1) | ((idx >> (n - 1 - v)) & 1) as u64);
            *local.entry(key).or_insert(0.0) += p;
        }
        for (k, p) in local {
            *acc.entry(k).or_insert(0.0) += weight * p;
        }
    }
    Ok(NeighborhoodDistribution {
        radius: r,
        size: trees.size(),
        probs: acc,
    })
}

/// Inverse temperature and thermality of one string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thermality {
    /// `β` with `Tr(C ρ_β) = C(w)`; see [`calibrated_beta`] for the edges.
    pub beta: f64,
    /// `ε_w = ‖ρ_β,tree − ρ_w,tree‖₁`.
    pub epsilon: f64,
}

/// `β ≥ 0` matched to `target`.
///
/// Targets at or below the mean use `β = 0` and targets at the maximum use
/// [`BETA_CEILING`], the uniform mixture over optima in practice. The thermal
/// bound holds for any `β ≥ 0`; calibration only makes `ε_w` small.
pub fn calibrated_beta(cost: &Cost<'_>, target: f64) -> Result<f64> {
    let mean = thermal_mean(cost, 0.0)?;
    if target <= mean {
        return Ok(0.0);
    }
    let top = thermal_mean(cost, BETA_CEILING)?;
    if target >= top - 1e-9 {
        return Ok(BETA_CEILING);
    }
    calibrate_beta(cost, target)
}

/// `ε_w` at the calibrated temperature, by exact enumeration.
pub fn thermality_coefficient(cost: &Cost<'_>, w: &BitString, r: usize) -> Result<Thermality> {
    let target = cost.evaluate(w)? as f64;
    let beta = calibrated_beta(cost, target)?;
    let thermal = thermal_tree_ensemble_exact(cost, beta, r)?;
    let local = local_ensemble(cost.graph(), w, r)?;
    Ok(Thermality {
        beta,
        epsilon: thermal.l1_distance(&local)?,
    })
}

/// Terms of the bound `⟨C⟩/m ≤ c(w) + 2ε_w + 4δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalBound {
    /// `c(w) = C(w)/m`.
    pub cut_fraction: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
}

impl ThermalBound {
    pub fn value(&self) -> f64 {
        thermal_bound_value(self.cut_fraction, self.epsilon, self.delta)
    }
}

/// `c + 2ε + 4δ`.
pub fn thermal_bound_value(cut_fraction: f64, epsilon: f64, delta: f64) -> f64 {
    cut_fraction + 2.0 * epsilon + 4.0 * delta
}

/// Upper bound on the per-edge warm-start expectation at radius `r`
/// (`r = k − 1` for `k` mixer layers). MaxCut only: edge terms lie in `[0, 1]`.
pub fn thermal_bound(cost: &Cost<'_>, w: &BitString, r: usize) -> Result<ThermalBound> {
    if cost.kind() != CostKind::MaxCut {
        return Err(Error::Unsupported(format!(
            "the thermal bound needs edge terms in [0, 1]; {} is not supported",
            cost.kind().name()
        )));
    }
    let graph = cost.graph();
    let delta = tree_fraction(graph, r);
    // With no tree neighborhoods δ = 1 and the bound holds trivially.
    let t = if delta == 1.0 {
        Thermality {
            beta: calibrated_beta(cost, cost.evaluate(w)? as f64)?,
            epsilon: 0.0,
        }
    } else {
        thermality_coefficient(cost, w, r)?
    };
    Ok(ThermalBound {
        cut_fraction: cost.evaluate(w)? as f64 / graph.num_edges() as f64,
        epsilon: t.epsilon,
        delta,
        beta: t.beta,
    })
}

/// `E = (1/k) Σ_α ‖ρ_{w_α,tree} − mean‖₁` over `k ≥ 2` strings.
pub fn sample_deviation(strings: &[BitString], graph: &Graph, r: usize) -> Result<f64> {
    if strings.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "sample deviation needs at least 2 strings, got {}",
            strings.len()
        )));
    }
    let trees = TreeNeighborhoods::new(graph, r)?;
    let dists = strings
        .iter()
        .map(|w| {
            w.ensure(graph.num_vertices(), w.convention())?;
            trees.ensemble(w)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = NeighborhoodDistribution::mean(&dists)?;
    let mut total = 0.0;
    for d in &dists {
        total += d.l1_distance(&mean)?;
    }
    Ok(total / dists.len() as f64)
}

/// Least-squares fits of `log E` against `log n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    /// `c` in `E = c·n^{−1/2}`.
    pub coefficient: f64,
    /// Free-slope fit `log E = a + s·log n`.
    pub slope: f64,
    pub intercept: f64,
}

/// Fixed-slope `−1/2` fit plus a free-slope diagnostic.
pub fn fit_inverse_sqrt(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 2 || points.iter().any(|&(n, e)| !(n > 0.0 && e > 0.0)) {
        return Err(Error::InvalidArgument(
            "fit needs at least 2 points with positive n and E".into(),
        ));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit needs at least 2 distinct n".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(ScalingFit {
        coefficient: (my + 0.5 * mx).exp(),
        slope,
        intercept: my - slope * mx,
    })
}

/// Quantities behind the small-β condition at `p = 3/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallAngleReport {
    /// `δ_i = Σ_{j∼i} z_i z_j`.
    pub deltas: Vec<i64>,
    /// `Σ_{|δ_i| = 1} δ_i`.
    pub s1: i64,
    /// `Σ_i δ_i³`.
    pub s3: i64,
}

impl SmallAngleReport {
    /// Improvement at small angles is possible iff `S1 > 0` or `S3 > 0`.
    pub fn condition(&self) -> bool {
        self.s1 > 0 || self.s3 > 0
    }
}

/// Small-angle condition for a spin string on a 3-regular graph.
pub fn small_angle_condition(graph: &Graph, w: &BitString) -> Result<SmallAngleReport> {
    if graph.regular_degree() != Some(3) {
        return Err(Error::InvalidArgument(
            "the small-angle condition assumes a 3-regular graph".into(),
        ));
    }
    let deltas = flip_deltas(graph, w)?;
    let s1 = deltas.iter().filter(|d| d.abs() == 1).sum();
    let s3 = deltas.iter().map(|d| d.pow(3)).sum();
    Ok(SmallAngleReport { deltas, s1, s3 })
}

/// Output of the magic-angle circuit on an SK instance.
#[derive(Debug, Clone)]
pub struct MagicAngleReport {
    pub state: StateVector,
    /// `w′`: bit `i` of `w` flipped when `Π_j J_ij = −1`.
    pub predicted: BitString,
    /// Strings with probability above `1e-12`, by basis index.
    pub support: Vec<(BitString, f64)>,
}

impl MagicAngleReport {
    /// Support is exactly `{w′, −w′}` with probabilities `1/2 ± tol`.
    pub fn matches_prediction(&self, tol: f64) -> bool {
        let targets = [self.predicted.clone(), self.predicted.complement()];
        self.support.len() == 2
            && self
                .support
                .iter()
                .all(|(s, p)| targets.contains(s) && (p - 0.5).abs() <= tol)
    }
}

/// `w′` from the product rule.
pub fn magic_angle_prediction(graph: &Graph, w: &BitString) -> Result<BitString> {
    let n = graph.num_vertices();
    w.ensure(n, Convention::Spin)?;
    let mut out = w.clone();
    for i in 0..n {
        let product: i8 = graph.incident_edges(i).iter().map(|&e| graph.coupling(e)).product();
        if product == -1 {
            out = out.flipped(i);
        }
    }
    Ok(out)
}

/// `e^{−iπ/4 B} e^{iπ/4 C_SK} e^{iπ/4 B}|w⟩` on a complete ±1-coupled graph.
pub fn magic_angle_state(graph: &Graph, w: &BitString) -> Result<MagicAngleReport> {
    let n = graph.num_vertices();
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("the magic angle needs even n, got {n}")));
    }
    if graph.couplings().is_none() || graph.num_edges() != n * (n - 1) / 2 {
        return Err(Error::InvalidArgument(
            "the magic angle needs a complete graph with couplings".into(),
        ));
    }
    let predicted = magic_angle_prediction(graph, w)?;
    let sim = Simulator::new(Cost::sk(graph))?;
    // Mixer layers apply e^{−iβB} and phase layers e^{−iγC}.
    let params = QaoaParams::warm_start(vec![-PI / 4.0, -PI / 4.0, PI / 4.0])?;
    let state = sim.state(&params, &Start::Basis(w.clone()))?;
    let support = state
        .probabilities()
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p > 1e-12)
        .map(|(idx, &p)| (BitString::from_index(n, idx, Convention::Spin), p))
        .collect();
    Ok(MagicAngleReport {
        state,
        predicted,
        support,
    })
}

/// Inputs of the compression bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionInputs {
    /// Strings with cost in the starting window `[C0, C0′]`.
    pub d0: u64,
    /// Strings with cost at least `C1`.
    pub d1: u64,
    /// QAOA depth.
    pub p: f64,
    /// Number of qubits.
    pub n: usize,
    /// Selection probability `Δ`.
    pub delta: f64,
}

impl CompressionInputs {
    /// Counts `d0` and `d1` from a density of states.
    pub fn from_dos(
        dos: &BTreeMap<i64, u64>,
        window: (i64, i64),
        target: i64,
        p: f64,
        n: usize,
        delta: f64,
    ) -> Result<Self> {
        let d0 = dos.range(window.0..=window.1).map(|(_, &c)| c).sum();
        let d1 = dos.range(target..).map(|(_, &c)| c).sum();
        let inputs = Self { d0, d1, p, n, delta };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d0 == 0 {
            return Err(Error::InvalidArgument("d0 must be at least 1".into()));
        }
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(Error::InvalidArgument(format!("depth must be positive, got {}", self.p)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidArgument(format!("Δ must lie in (0, 1], got {}", self.delta)));
        }
        Ok(())
    }
}

/// A bound value with its vacuity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub vacuous: bool,
}

/// `ε = (2d1/d0)^{1/(2p+2)} (16πpn²)^{p/(p+1)}`; vacuous when `ε ≥ 1`.
pub fn compression_epsilon(inputs: &CompressionInputs) -> Result<Bound> {
    inputs.validate()?;
    let value = if inputs.d1 == 0 {
        0.0
    } else {
        let p = inputs.p;
        let n = inputs.n as f64;
        let ratio = (2.0 * inputs.d1 as f64 / inputs.d0 as f64).ln();
        (ratio / (2.0 * p + 2.0) + p / (p + 1.0) * (16.0 * PI * p * n * n).ln()).exp()
    };
    Ok(Bound {
        value,
        vacuous: value >= 1.0,
    })
}

/// `M ≤ (2d1/Δ)(16πpn²/Δ)^{2p}`, the number of strings improvable to `C1`
/// with selection probability at least `Δ`.
pub fn improvable_count_bound(d1: u64, delta: f64, p: f64, n: usize) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("Δ must lie in (0, 1], got {delta}")));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("depth must be positive, got {p}")));
    }
    if d1 == 0 {
        return Ok(0.0);
    }
    let n = n as f64;
    Ok(((2.0 * d1 as f64 / delta).ln() + 2.0 * p * (16.0 * PI * p * n * n / delta).ln()).exp())
}

/// [`improvable_count_bound`] flagged vacuous when it reaches `d0`.
pub fn improvable_count(inputs: &CompressionInputs) -> Result<Bound> {
    inputs.validate()?;
    let value = improvable_count_bound(inputs.d1, inputs.delta, inputs.p, inputs.n)?;
    Ok(Bound {
        value,
        vacuous: value >= inputs.d0 as f64,
    })
}

/// Edge expectations on the decoupled graph after a circuit with mixing
/// angle `θ`: unsatisfied edges go from 0 to `½sin²θ` and satisfied edges
/// from 1 to `1 − ½sin²θ`.
pub fn decoupled_oracle(w: &BitString, theta: f64) -> Result<Vec<f64>> {
    if w.len() % 2 == 1 {
        return Err(Error::InvalidArgument("decoupled strings pair up vertices".into()));
    }
    let shift = 0.5 * theta.sin().powi(2);
    Ok((0..w.len() / 2)
        .map(|i| {
            if w.is_one(2 * i) != w.is_one(2 * i + 1) {
                1.0 - shift
            } else {
                shift
            }
        })
        .collect())
}

/// Mixing angle `θ` and phase `φ` of a circuit on one decoupled pair, from
/// `U|c⟩ = cos θ|c⟩ + e^{iφ} sin θ|d⟩` up to a global phase, where
/// `|c⟩ ∝ |00⟩ + |11⟩` and `|d⟩ ∝ |01⟩ + |10⟩`.
pub fn decoupled_mixing(params: &QaoaParams) -> (f64, f64) {
    use crate::statevector::Layer;
    let zero = Complex64::new(0.0, 0.0);
    // Column U|c⟩ in the (c, d) basis.
    let mut v = [Complex64::new(1.0, 0.0), zero];
    for layer in params.layers() {
        v = match layer {
            // C_MC is 0 on |c⟩ and 1 on |d⟩.
            Layer::Phase(g) => [v[0], v[1] * Complex64::from_polar(1.0, -g)],
            // X₁ + X₂ acts as 2σx on span{c, d}.
            Layer::Mixer(b) => {
                let (s, c) = (2.0 * b).sin_cos();
                let mi = Complex64::new(0.0, -s);
                [v[0] * c + v[1] * mi, v[0] * mi + v[1] * c]
            }
        };
    }
    let theta = v[1].norm().atan2(v[0].norm());
    let phi = (v[1] / v[0].norm().max(1e-300)).arg() - v[0].arg();
    (theta, phi)
}

/// `⟨w|e^{iβB} C_MIS e^{−iβB}|w⟩` on a `d`-regular graph, for a string
/// with weight `W` and `K` violated edges.
pub fn mis_p_half(n: usize, d: usize, w: usize, k: usize, beta: f64) -> f64 {
    let (n, d, w, k) = (n as f64, d as f64, w as f64, k as f64);
    let s2 = beta.sin().powi(2);
    w - k + 0.5 * d * (4.0 * w - n) * s2 * s2 + (n - w * (d + 2.0)) * s2 + k * (2.0 * beta).sin().powi(2)
}

/// Best `p = 1/2` angle for the independent-set cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisHalfOptimum {
    /// Optimal `sin²β₁ ∈ [0, 1]`.
    pub sin2_beta: f64,
    pub beta: f64,
    pub value: f64,
    /// Whether the optimum beats `W − K`.
    pub improves: bool,
    /// The closed-form verdict `W < n/(d+2)` (valid for `K = 0`).
    pub predicted_improves: bool,
}

/// Maximizes [`mis_p_half`] over `β₁`.
///
/// In `x = sin²β₁` the expectation is the quadratic
/// `W − K + a x² + b x` with `a = (d/2)(4W − n) − 4K`, `b = n − W(d+2) + 4K`.
/// Its maximum on `[0, 1]` is at a clamped stationary point or an endpoint,
/// which also covers the degenerate `a = 0` case.
pub fn mis_p_half_optimum(n: usize, d: usize, w: usize, k: usize) -> MisHalfOptimum {
    let (nf, df, wf, kf) = (n as f64, d as f64, w as f64, k as f64);
    let a = 0.5 * df * (4.0 * wf - nf) - 4.0 * kf;
    let b = nf - wf * (df + 2.0) + 4.0 * kf;
    let mut candidates = vec![0.0, 1.0];
    if a < 0.0 {
        candidates.push((-b / (2.0 * a)).clamp(0.0, 1.0));
    }
    let base = wf - kf;
    let f = |x: f64| base + a * x * x + b * x;
    let x = candidates
        .into_iter()
        .fold(0.0, |best, x| if f(x) > f(best) { x } else { best });
    let beta = x.sqrt().asin();
    let value = mis_p_half(n, d, w, k, beta);
    MisHalfOptimum {
        sin2_beta: x,
        beta,
        value,
        improves: value > base + 1e-12,
        predicted_improves: wf < nf / (df + 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate_regular_graph, Convention};
    use proptest::prelude::*;

    fn cube() -> Graph {
        let edges = (0..8usize).flat_map(|u| (0..3).map(move |b| (u, u ^ (1 << b)))).filter(|&(u, v)| u < v);
        Graph::new(8, edges).unwrap()
    }

    fn spins_from(n: usize, f: impl Fn(usize) -> bool) -> BitString {
        BitString::spins((0..n).map(|i| if f(i) { -1 } else { 1 }).collect()).unwrap()
    }

    /// First seeded cubic graph with at least one radius-1 tree neighborhood.
    fn treelike(n: usize, seed: u64) -> Graph {
        (seed..)
            .map(|s| generate_regular_graph(n, 3, s).unwrap())
            .find(|g| TreeNeighborhoods::new(g, 1).is_ok())
            .unwrap()
    }

    fn dist(size: usize, pairs: &[(u64, f64)]) -> NeighborhoodDistribution {
        NeighborhoodDistribution::new(1, size, pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn small_angle_examples() {
        let g = cube();
        // A perfect cut is a global maximum: every δ_i = −3.
        let cut = spins_from(8, |i| i.count_ones() % 2 == 1);
        let r = small_angle_condition(&g, &cut).unwrap();
        assert!(r.deltas.iter().all(|&d| d == -3));
        assert!(!r.condition());
        // Splitting along one axis leaves two agreeing neighbors per vertex.
        let half = spins_from(8, |i| i & 1 == 1);
        let r = small_angle_condition(&g, &half).unwrap();
        assert!(r.deltas.iter().all(|&d| d == 1));
        assert_eq!((r.s1, r.s3), (8, 8));
        assert!(r.condition());
        let c6 = Graph::cycle(6).unwrap();
        assert!(small_angle_condition(&c6, &BitString::all_up(6)).is_err());
    }

    #[test]
    fn constant_string_is_a_point_mass() {
        let g = generate_regular_graph(40, 3, 1).unwrap();
        let d = local_ensemble(&g, &BitString::all_up(40), 2).unwrap();
        assert_eq!(d.probabilities().len(), 1);
        assert!((d.probability(0) - 1.0).abs() < 1e-12);
        assert_eq!(d.size(), 14);
    }

    #[test]
    fn alternating_cycle_patterns() {
        // Endpoints are ordered by global index, so edge (i, i+1) reads
        // z_i, z_{i+1}, z_{i−1}, z_{i+2}: 0110 when z_i = +1, 1001 otherwise.
        // The wrap edge (0, n−1) starts at an even vertex, giving 6 and 4.
        let n = 10;
        let g = Graph::cycle(n).unwrap();
        let w = spins_from(n, |i| i % 2 == 1);
        let d = local_ensemble(&g, &w, 1).unwrap();
        assert_eq!(d.probabilities().len(), 2);
        assert!((d.probability(0b0110) - 0.6).abs() < 1e-12);
        assert!((d.probability(0b1001) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let g = treelike(10, 2);
        let d = thermal_tree_ensemble_exact(&Cost::maxcut(&g), 0.0, 1).unwrap();
        let u = 1.0 / (1u64 << d.size()) as f64;
        assert_eq!(d.probabilities().len(), 1 << d.size());
        assert!(d.probabilities().values().all(|p| (p - u).abs() < 1e-14));
    }

    #[test]
    fn decoupled_thermal_marginal() {
        let g = Graph::decoupled(5);
        let beta: f64 = 0.9;
        let d = thermal_tree_ensemble_exact(&Cost::maxcut(&g), beta, 1).unwrap();
        let cut = 0.5 * beta.exp() / (beta.exp() + 1.0);
        let uncut = 0.5 / (beta.exp() + 1.0);
        for (key, want) in [(0, uncut), (1, cut), (2, cut), (3, uncut)] {
            assert!((d.probability(key) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn boltzmann_average_of_local_ensembles() {
        let g = treelike(12, 3);
        let cost = Cost::maxcut(&g);
        let beta = 0.7;
        let probs = boltzmann_probabilities(&cost, beta).unwrap();
        let trees = TreeNeighborhoods::new(&g, 1).unwrap();
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (idx, &p) in probs.iter().enumerate() {
            let w = BitString::from_index(12, idx, Convention::Spin);
            for (k, q) in trees.ensemble(&w).unwrap().probabilities() {
                *acc.entry(*k).or_insert(0.0) += p * q;
            }
        }
        let exact = thermal_tree_ensemble_exact(&cost, beta, 1).unwrap();
        for (k, &p) in exact.probabilities() {
            assert!((acc.get(k).copied().unwrap_or(0.0) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn l1_extremes() {
        let a = dist(2, &[(0, 0.5), (1, 0.5)]);
        let b = dist(2, &[(2, 0.25), (3, 0.75)]);
        assert_eq!(a.l1_distance(&a).unwrap(), 0.0);
        assert!((a.l1_distance(&b).unwrap() - 2.0).abs() < 1e-15);
        assert!(a.l1_distance(&dist(3, &[(0, 1.0)])).is_err());
        assert!(NeighborhoodDistribution::new(1, 2, [(0, 0.7)].into_iter().collect()).is_err());
        assert!(NeighborhoodDistribution::new(1, 2, [(4, 1.0)].into_iter().collect()).is_err());
    }

    #[test]
    fn thermality_of_thermal_strings() {
        let g = treelike(12, 4);
        let cost = Cost::maxcut(&g);
        let values = cost.values(20).unwrap();
        let idx = values.iter().position(|&c| c == 12).unwrap();
        let w = BitString::from_index(12, idx, Convention::Spin);
        let t = thermality_coefficient(&cost, &w, 1).unwrap();
        assert!((thermal_mean(&cost, t.beta).unwrap() - 12.0).abs() < 1e-6);
        assert!((0.0..=2.0).contains(&t.epsilon));
        let bound = thermal_bound(&cost, &w, 1).unwrap();
        assert!((bound.delta - tree_fraction(&g, 1)).abs() < 1e-15);
        assert!(bound.value() >= bound.cut_fraction);
        assert!(thermal_bound(&Cost::ising(&g), &BitString::all_up(12), 1).is_err());
        let k4 = Graph::complete(4);
        let trivial = thermal_bound(&Cost::maxcut(&k4), &BitString::parse("++--").unwrap(), 1).unwrap();
        assert_eq!((trivial.delta, trivial.epsilon), (1.0, 0.0));
        // Below the mean the bound runs at β = 0.
        assert_eq!(thermality_coefficient(&cost, &BitString::all_up(12), 1).unwrap().beta, 0.0);
    }

    #[test]
    fn bound_formula() {
        assert_eq!(thermal_bound_value(0.8, 0.0, 0.0), 0.8);
        assert!(thermal_bound_value(0.8, 0.1, 0.0) < thermal_bound_value(0.8, 0.2, 0.0));
        assert!(thermal_bound_value(0.8, 0.1, 0.0) < thermal_bound_value(0.8, 0.1, 0.01));
    }

    #[test]
    fn sample_deviation_examples() {
        let g = generate_regular_graph(30, 3, 5).unwrap();
        let a = spins_from(30, |i| i % 3 == 0);
        let b = spins_from(30, |i| i % 5 < 2);
        assert_eq!(sample_deviation(&[a.clone(), a.clone(), a.clone()], &g, 1).unwrap(), 0.0);
        // Each string sits at half the pairwise distance from the mean.
        let pair = sample_deviation(&[a.clone(), b.clone()], &g, 1).unwrap();
        let direct = local_ensemble(&g, &a, 1).unwrap().l1_distance(&local_ensemble(&g, &b, 1).unwrap()).unwrap();
        assert!((pair - 0.5 * direct).abs() < 1e-12);
        assert!(sample_deviation(&[a], &g, 1).is_err());
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [1e3, 2e3, 5e3, 1e4].iter().map(|&n: &f64| (n, 3.0 * n.powf(-0.5))).collect();
        let fit = fit_inverse_sqrt(&pts).unwrap();
        assert!((fit.coefficient - 3.0).abs() < 1e-12);
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(fit_inverse_sqrt(&pts[..1]).is_err());
    }

    #[test]
    fn magic_angle_examples() {
        let n = 6;
        let ferro = Graph::with_couplings(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1)))).unwrap();
        let w = spins_from(n, |i| i % 4 == 1);
        let r = magic_angle_state(&ferro, &w).unwrap();
        assert_eq!(r.predicted, w);
        assert!(r.matches_prediction(1e-9));
        let g = Graph::sherrington_kirkpatrick(8, 9);
        let w = spins_from(8, |i| i < 3);
        let base = magic_angle_prediction(&g, &w).unwrap();
        assert!(magic_angle_state(&g, &w).unwrap().matches_prediction(1e-9));
        let e = g.edge_index(2, 5).unwrap();
        let flipped = magic_angle_prediction(&g.with_flipped_coupling(e), &w).unwrap();
        assert_eq!(flipped, base.flipped(2).flipped(5));
        assert!(magic_angle_state(&Graph::sherrington_kirkpatrick(5, 1), &BitString::all_up(5)).is_err());
    }

    #[test]
    fn compression_examples() {
        let inputs = CompressionInputs { d0: 1 << 20, d1: 1, p: 1.0, n: 20, delta: 0.5 };
        let eps = compression_epsilon(&inputs).unwrap();
        let direct = (2.0f64 / (1u64 << 20) as f64).powf(0.25) * (16.0 * PI * 400.0).sqrt();
        assert!((eps.value - direct).abs() / direct < 1e-13);
        assert!(eps.vacuous);
        assert_eq!(compression_epsilon(&CompressionInputs { d1: 0, ..inputs }).unwrap().value, 0.0);
        assert!(compression_epsilon(&CompressionInputs { d0: 0, ..inputs }).is_err());
        let m = improvable_count_bound(3, 0.25, 1.0, 12).unwrap();
        let direct = 24.0 * (16.0 * PI * 144.0 / 0.25f64).powi(2);
        assert!((m - direct).abs() / direct < 1e-13);
        assert_eq!(improvable_count_bound(0, 0.5, 1.0, 10).unwrap(), 0.0);
        assert!(improvable_count_bound(1, 0.0, 1.0, 10).is_err());
        assert!(improvable_count(&inputs).unwrap().vacuous);
    }

    proptest! {
        #[test]
        fn epsilon_increases_with_d1(d0 in 1000u64..1_000_000, d1 in 1u64..500, p in 0.5f64..4.0, n in 4usize..40) {
            let a = CompressionInputs { d0, d1, p, n, delta: 0.5 };
            let b = CompressionInputs { d1: d1 + 1, ..a };
            prop_assert!(compression_epsilon(&a).unwrap().value < compression_epsilon(&b).unwrap().value);
        }

        #[test]
        fn count_bound_decreases_with_delta(d1 in 1u64..1000, lo in 0.01f64..0.5, p in 0.5f64..3.0, n in 4usize..30) {
            prop_assert!(improvable_count_bound(d1, lo, p, n).unwrap() > improvable_count_bound(d1, lo * 1.5, p, n).unwrap());
        }

        #[test]
        fn l1_is_a_metric(a in proptest::collection::vec(0.01f64..1.0, 8), b in proptest::collection::vec(0.01f64..1.0, 8), c in proptest::collection::vec(0.01f64..1.0, 8)) {
            let mk = |v: &[f64]| {
                let s: f64 = v.iter().sum();
                dist(3, &v.iter().enumerate().map(|(i, x)| (i as u64, x / s)).collect::<Vec<_>>())
            };
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            let ab = a.l1_distance(&b).unwrap();
            prop_assert!((ab - b.l1_distance(&a).unwrap()).abs() < 1e-15);
            prop_assert!(ab <= a.l1_distance(&c).unwrap() + c.l1_distance(&b).unwrap() + 1e-12);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&ab));
        }
    }

    #[test]
    fn decoupled_oracle_examples() {
        let w = BitString::parse("+-++-+").unwrap();
        assert_eq!(decoupled_oracle(&w, 0.0).unwrap(), vec![1.0, 0.0, 1.0]);
        let half = decoupled_oracle(&w, PI / 2.0).unwrap();
        assert!((half[0] - 0.5).abs() < 1e-15 && (half[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decoupled_oracle_matches_statevector() {
        let g = Graph::decoupled(1);
        let sim = Simulator::new(Cost::maxcut(&g)).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let angles = vec![0.3 * i as f64, 0.5 * j as f64 - 1.0, 0.2 * (i + j) as f64];
                let params = QaoaParams::warm_start(angles).unwrap();
                let (theta, _) = decoupled_mixing(&params);
                for s in ["++", "+-", "-+", "--"] {
                    let w = BitString::parse(s).unwrap();
                    let want = decoupled_oracle(&w, theta).unwrap()[0];
                    let got = sim.expectation(&params, &Start::Basis(w)).unwrap();
                    assert!((got - want).abs() < 1e-12, "{s}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn mis_examples() {
        assert_eq!(mis_p_half(20, 3, 5, 2, 0.0), 3.0);
        let empty = mis_p_half_optimum(24, 3, 0, 0);
        assert!((empty.value - 4.0).abs() < 1e-12);
        assert!((empty.sin2_beta - 1.0 / 3.0).abs() < 1e-12);
        assert!(empty.improves && empty.predicted_improves);
        let greedy = mis_p_half_optimum(24, 3, 6, 0);
        assert!(!greedy.improves && !greedy.predicted_improves);
        assert_eq!(greedy.value, 6.0);
        // n = 4W makes the quadratic linear.
        let flat = mis_p_half_optimum(20, 3, 5, 0);
        assert!(!flat.improves);
    }

    #[test]
    fn mis_formula_matches_statevector() {
        let g = generate_regular_graph(10, 3, 6).unwrap();
        let sim = Simulator::new(Cost::mis(&g)).unwrap();
        for idx in [0usize, 5, 100, 513, 1023] {
            let w = BitString::from_index(10, idx, Convention::Binary);
            let weight = w.count_ones();
            let k = g.edges().iter().filter(|&&(u, v)| w.is_one(u) && w.is_one(v)).count();
            for t in 0..10 {
                let beta = 0.17 * t as f64;
                let params = QaoaParams::warm_start(vec![beta]).unwrap();
                let got = sim.expectation(&params, &Start::Basis(w.clone())).unwrap();
                assert!((got - mis_p_half(10, 3, weight, k, beta)).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn mis_verdict_matches_closed_form_prediction(n in 8usize..60, w in 0usize..20, d in 2usize..6) {
            prop_assume!(2 * w <= n);
            let opt = mis_p_half_optimum(n, d, w, 0);
            prop_assert_eq!(opt.improves, opt.predicted_improves);
            let scan = (0..=2000).map(|i| mis_p_half(n, d, w, 0, i as f64 * PI / 4000.0)).fold(f64::MIN, f64::max);
            prop_assert!(opt.value >= scan - 1e-9);
        }
    }
}
