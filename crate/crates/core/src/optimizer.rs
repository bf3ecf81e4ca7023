//! Multi-start Nelder–Mead maximization of QAOA expectations.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::localsim::LocalSimulator;
use crate::problems::{BitString, Cost};
use crate::statevector::{QaoaParams, Schedule, Simulator, Start};

/// Default number of random initial guesses.
pub const DEFAULT_RESTARTS: usize = 40;

/// Gain in total cost above which a string counts as improved.
pub const IMPROVEMENT_TOL: f64 = 1e-6;

/// Default half-width of the `β` box in [`small_beta_optimize`].
pub const DEFAULT_BETA_MAX: f64 = 0.05;

/// Box from which initial guesses are drawn. The search itself is
/// unconstrained; the expectation is periodic in every angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidArgument(
                "bounds need equal lengths and lower < upper".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// `γ ∈ [0, 2π)` and `β ∈ [0, π)` laid out for the schedule.
    pub fn qaoa(schedule: Schedule, num_angles: usize) -> Self {
        let gamma_first = schedule == Schedule::Standard;
        let upper = (0..num_angles)
            .map(|i| if (i % 2 == 0) == gamma_first { 2.0 * PI } else { PI })
            .collect();
        Self {
            lower: vec![0.0; num_angles],
            upper,
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| rng.gen_range(l..u))
            .collect()
    }
}

/// Settings for [`optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Simplex diameter and value spread at which a run stops.
    pub tolerance: f64,
    /// Iteration cap per run is this times the number of angles.
    pub iterations_per_angle: usize,
    /// Initial simplex edge as a fraction of each bound's width.
    pub initial_step: f64,
    pub improvement_tol: f64,
    /// Extra deterministic initial guesses run before the random ones.
    pub extra_starts: Vec<Vec<f64>>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            tolerance: 1e-8,
            iterations_per_angle: 400,
            initial_step: 0.1,
            improvement_tol: IMPROVEMENT_TOL,
            extra_starts: Vec::new(),
        }
    }
}

impl OptimizeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Outcome of a multi-start maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_angles: Vec<f64>,
    pub best_value: f64,
    /// Value at all-zero angles (`C(w)` for a warm start).
    pub initial_value: f64,
    pub improved: bool,
    pub restarts: usize,
    pub evaluations: usize,
}

impl OptimizationResult {
    pub fn improvement(&self) -> f64 {
        self.best_value - self.initial_value
    }

    pub fn params(&self, schedule: Schedule) -> Result<QaoaParams> {
        QaoaParams::new(schedule, self.best_angles.clone())
    }
}

/// Result of one local search.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMax {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
}

/// Nelder–Mead maximization from `x0` with per-coordinate initial steps.
///
/// Stops once both the simplex diameter (max-norm distance to the best
/// vertex) and the spread of values drop below `tol`, or after
/// `max_iter` iterations.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], steps: &[f64], tol: f64, max_iter: usize) -> Result<LocalMax>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut evaluations = 0;
    // Work with −f so the textbook minimization steps apply.
    let mut eval = |x: &[f64]| -> Result<f64> {
        evaluations += 1;
        Ok(-f(x)?)
    };
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        simplex.push(x);
    }
    let mut values = simplex.iter().map(|x| eval(x)).collect::<Result<Vec<_>>>()?;
    let mut iterations = 0;
    let mut order: Vec<usize> = (0..=n).collect();
    while iterations < max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n.saturating_sub(1)]);
        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .flat_map(|x| x.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if n == 0 || (spread <= tol && diameter <= tol) {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..n)
            .map(|j| order[..n].iter().map(|&i| simplex[i][j]).sum::<f64>() / n as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = toward(1.0);
        let fr = eval(&reflected)?;
        if fr < values[best] {
            let expanded = toward(2.0);
            let fe = eval(&expanded)?;
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        let outside = fr < values[worst];
        let contracted = toward(if outside { 0.5 } else { -0.5 });
        let fc = eval(&contracted)?;
        if (outside && fc <= fr) || (!outside && fc < values[worst]) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            let x: Vec<f64> = simplex[i]
                .iter()
                .zip(&anchor)
                .map(|(v, a)| a + 0.5 * (v - a))
                .collect();
            values[i] = eval(&x)?;
            simplex[i] = x;
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("simplex is nonempty");
    Ok(LocalMax {
        x: simplex[best].clone(),
        value: -values[best],
        evaluations,
        iterations,
    })
}

/// Multi-start maximization of `evaluator` over `bounds.len()` angles.
///
/// Restart `i` draws its initial guess from its own ChaCha8 stream
/// `(seed, i)`, so the first `r` restarts are the same for every restart
/// count `≥ r`. The all-zero angle vector is always a candidate.
pub fn optimize<F>(mut evaluator: F, bounds: &Bounds, config: &OptimizeConfig) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if config.restarts == 0 && config.extra_starts.is_empty() {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let n = bounds.len();
    if let Some(bad) = config.extra_starts.iter().find(|s| s.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "initial guess has {} angles, expected {n}",
            bad.len()
        )));
    }
    let zeros = vec![0.0; n];
    let initial_value = evaluator(&zeros)?;
    let mut best_angles = zeros;
    let mut best_value = initial_value;
    let mut evaluations = 1;
    let steps: Vec<f64> = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(l, u)| config.initial_step * (u - l))
        .collect();
    let max_iter = config.iterations_per_angle * n.max(1);
    let randoms = (0..config.restarts).map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        bounds.sample(&mut rng)
    });
    for x0 in config.extra_starts.iter().cloned().chain(randoms) {
        let run = nelder_mead(&mut evaluator, &x0, &steps, config.tolerance, max_iter)?;
        evaluations += run.evaluations;
        if run.value > best_value {
            best_value = run.value;
            best_angles = run.x;
        }
    }
    Ok(OptimizationResult {
        best_angles,
        best_value,
        initial_value,
        improved: best_value - initial_value > config.improvement_tol,
        restarts: config.restarts + config.extra_starts.len(),
        evaluations,
    })
}

/// Simulator used by [`improvement_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Statevector,
    LocalSim,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statevector" => Ok(Backend::Statevector),
            "localsim" => Ok(Backend::LocalSim),
            other => Err(Error::InvalidArgument(format!("unknown backend '{other}'"))),
        }
    }
}

/// Number of mixer layers `k` for a half-integral warm-start depth `p`.
pub fn warm_layers(p: f64) -> Result<usize> {
    let k = p + 0.5;
    if k < 1.0 || k.fract() != 0.0 {
        return Err(Error::InvalidParams(format!(
            "warm-start depth must be a positive half-integer, got {p}"
        )));
    }
    Ok(k as usize)
}

/// Optimizes warm-start QAOA of depth `p` from `w` and reports whether the
/// best expected cost beats `C(w)`.
pub fn improvement_report(
    cost: &Cost<'_>,
    w: &BitString,
    p: f64,
    config: &OptimizeConfig,
    backend: Backend,
) -> Result<OptimizationResult> {
    let k = warm_layers(p)?;
    let bounds = Bounds::qaoa(Schedule::WarmStart, 2 * k - 1);
    match backend {
        Backend::Statevector => {
            let sim = Simulator::new(*cost)?;
            let start = Start::Basis(w.clone());
            sim.initial_state(&start)?;
            optimize(
                |a| sim.expectation(&QaoaParams::warm_start(a.to_vec())?, &start),
                &bounds,
                config,
            )
        }
        Backend::LocalSim => {
            let sim = LocalSimulator::new(*cost, k)?;
            let mut bound = sim.bind(w)?;
            optimize(|a| bound.expectation(a), &bounds, config)
        }
    }
}

/// Settings for [`small_beta_optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct SmallBetaConfig {
    pub beta_max: f64,
    /// Number of `γ` values on an even grid over `[0, 2π)`.
    pub gamma_grid: usize,
    /// Grid candidates refined by a clamped Nelder–Mead search.
    pub refine: usize,
    pub tolerance: f64,
}

impl Default for SmallBetaConfig {
    fn default() -> Self {
        Self {
            beta_max: DEFAULT_BETA_MAX,
            gamma_grid: 32,
            refine: 4,
            tolerance: 1e-10,
        }
    }
}

/// Best value of a `p = 3/2` warm-start evaluator `[β₁, γ₁, β₂]` with
/// `|β₁|, |β₂| ≤ β_max`.
///
/// Every grid `γ` is tried at the four corners of the `β` box; the best
/// candidates are then refined with Nelder–Mead on the box-clamped
/// objective. All-zero angles are always included.
pub fn small_beta_optimize<F>(mut evaluator: F, config: &SmallBetaConfig) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let bm = config.beta_max;
    let mut best = evaluator(&[0.0, 0.0, 0.0])?;
    if bm <= 0.0 {
        return Ok(best);
    }
    let mut candidates = Vec::new();
    for i in 0..config.gamma_grid {
        let g = 2.0 * PI * i as f64 / config.gamma_grid as f64;
        for (b1, b2) in [(bm, -bm), (-bm, bm), (bm, bm), (-bm, -bm)] {
            let x = [b1, g, b2];
            candidates.push((evaluator(&x)?, x));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    best = best.max(candidates[0].0);
    let clamp = |x: &[f64]| [x[0].clamp(-bm, bm), x[1], x[2].clamp(-bm, bm)];
    let steps = [0.5 * bm, PI / config.gamma_grid as f64, 0.5 * bm];
    for &(_, x0) in candidates.iter().take(config.refine) {
        let run = nelder_mead(|x| evaluator(&clamp(x)), &x0, &steps, config.tolerance, 600)?;
        best = best.max(evaluator(&clamp(&run.x))?);
    }
    Ok(best)
}
