//! All fourteen acceptance criteria at their stated tolerances.
//!
//! Prints one PASS/FAIL line per criterion (run with `--nocapture` to see
//! them on success) and fails if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qaoa_lab::analysis::{
    compression_epsilon, fit_inverse_sqrt, improvable_count_bound, magic_angle_state, mis_p_half,
    mis_p_half_optimum, sample_deviation, small_angle_condition, thermal_bound, thermal_tree_ensemble_exact,
    CompressionInputs, TreeNeighborhoods,
};
use qaoa_lab::localsim::LocalSimulator;
use qaoa_lab::optimizer::{
    improvement_report, optimize, small_beta_optimize, Backend, Bounds, OptimizeConfig, SmallBetaConfig,
    IMPROVEMENT_TOL,
};
use qaoa_lab::problems::{
    density_of_states, flip_deltas, generate_regular_graph, BitString, Convention, Cost, Graph,
};
use qaoa_lab::statevector::{QaoaParams, Schedule, Simulator, Start};
use qaoa_lab::warmstart::{
    boltzmann_probabilities, exact_boltzmann_sample, goemans_williamson, greedy_mis, metropolis_samples, GwConfig,
    ThermalSpec,
};

type Verdict = (bool, String);

fn random_spins(n: usize, rng: &mut impl Rng) -> BitString {
    BitString::spins((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()).unwrap()
}

fn within(limit: Duration, start: Instant) -> bool {
    start.elapsed() < limit
}

/// Oracle equivalence of light-cone and full statevector evaluation.
fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let n = [8, 10, 12, 14][t % 4];
        let g = generate_regular_graph(n, 3, 100 + t as u64).unwrap();
        let cost = Cost::maxcut(&g);
        let k = if t % 2 == 0 { 2 } else { 3 };
        let w = random_spins(n, &mut rng);
        let angles: Vec<f64> = (0..2 * k - 1).map(|_| rng.gen_range(-PI..PI)).collect();
        let local = LocalSimulator::new(cost, k).unwrap().expectation(&w, &angles).unwrap();
        let exact = Simulator::new(cost)
            .unwrap()
            .expectation(&QaoaParams::warm_start(angles).unwrap(), &Start::Basis(w))
            .unwrap();
        worst = worst.max((local - exact).abs());
    }
    let ok = worst < 1e-9 && within(Duration::from_secs(120), start);
    (ok, format!("max |localsim − statevector| = {worst:.2e} over 50 triples"))
}

/// `p = 1/2` MaxCut: `⟨C_Z⟩ = cos²(2β) C_Z(w)`.
fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for t in 0..20 {
        let n = [6, 8, 10, 12][t % 4];
        let g = generate_regular_graph(n, 3, 200 + t as u64).unwrap();
        let cost = Cost::ising(&g);
        let sim = Simulator::new(cost).unwrap();
        let w = random_spins(n, &mut rng);
        let cz = cost.evaluate(&w).unwrap() as f64;
        for i in 0..20 {
            let beta = -PI + 2.0 * PI * i as f64 / 20.0;
            let got = sim
                .expectation(&QaoaParams::warm_start(vec![beta]).unwrap(), &Start::Basis(w.clone()))
                .unwrap();
            worst = worst.max((got - (2.0 * beta).cos().powi(2) * cz).abs());
        }
    }
    (worst < 1e-9, format!("max deviation {worst:.2e} on 20 β × 20 instances"))
}

/// Decoupled pairs: standard QAOA reaches the perfect cut, warm starts from
/// good strings never improve.
fn criterion_3() -> Verdict {
    let g = Graph::decoupled(3);
    let cost = Cost::maxcut(&g);
    let sim = Simulator::new(cost).unwrap();
    let state = sim
        .state(&QaoaParams::standard(vec![PI / 2.0, PI / 8.0]).unwrap(), &Start::Uniform)
        .unwrap();
    let success = sim.success_probability(&state, 3).unwrap();
    let good: Vec<BitString> = (0..64)
        .map(|i| BitString::from_index(6, i, Convention::Spin))
        .filter(|w| 2 * cost.evaluate(w).unwrap() >= 3)
        .collect();
    let mut worst = f64::NEG_INFINITY;
    for (i, w) in good.iter().enumerate() {
        for p in [1.5, 2.5, 3.5] {
            let r = improvement_report(&cost, w, p, &OptimizeConfig::with_seed(i as u64), Backend::Statevector).unwrap();
            worst = worst.max(r.improvement());
        }
    }
    let ok = success > 1.0 - 1e-9 && worst < 1e-7;
    (
        ok,
        format!("success probability {success:.12}; largest improvement {worst:.2e} over {} good strings", good.len()),
    )
}

/// `Σ_i δ_i = −2 C_Z(w)`.
fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for t in 0..1000 {
        let d = [2, 3, 4, 5][t % 4];
        let n = 2 * rng.gen_range(3..30);
        let g = generate_regular_graph(n, d, t as u64).unwrap();
        let w = random_spins(n, &mut rng);
        let sum: i64 = flip_deltas(&g, &w).unwrap().iter().sum();
        if sum != -2 * Cost::ising(&g).evaluate(&w).unwrap() {
            bad += 1;
        }
    }
    (bad == 0, format!("{bad} mismatches in 1000 pairs"))
}

/// Small-angle condition versus small-β optimization, exhaustively at cut
/// levels 11 and 13 on 20 random 12-vertex cubic graphs.
fn criterion_5() -> Verdict {
    let start = Instant::now();
    let config = SmallBetaConfig::default();
    let (mut checked, mut counter, mut improved) = (0, 0, 0);
    for seed in 0..20 {
        let g = generate_regular_graph(12, 3, 500 + seed).unwrap();
        let cost = Cost::maxcut(&g);
        let values = cost.values(12).unwrap();
        let sim = LocalSimulator::new(cost, 2).unwrap();
        for level in [11, 13] {
            for idx in (0..values.len()).filter(|&i| values[i] == level) {
                let w = BitString::from_index(12, idx, Convention::Spin);
                let condition = small_angle_condition(&g, &w).unwrap().condition();
                let mut bound = sim.bind(&w).unwrap();
                let best = small_beta_optimize(|x| bound.expectation(x), &config).unwrap();
                let up = best - level as f64 > IMPROVEMENT_TOL;
                checked += 1;
                improved += usize::from(up);
                counter += usize::from(up != condition);
            }
        }
    }
    let ok = counter == 0 && within(Duration::from_secs(1200), start);
    (
        ok,
        format!("{counter} counterexamples in {checked} strings ({improved} improvable), β_max = {}", config.beta_max),
    )
}

/// Boltzmann-weighted average of `ρ_w,tree` equals `ρ_β,tree`.
fn criterion_6() -> Verdict {
    let mut worst: f64 = 0.0;
    for (n, seed, beta) in [(12, 60, 0.4), (14, 61, 0.9), (14, 62, 1.6)] {
        let g = common::treelike(n, 3, 1, seed);
        let cost = Cost::maxcut(&g);
        let trees = TreeNeighborhoods::new(&g, 1).unwrap();
        let probs = boltzmann_probabilities(&cost, beta).unwrap();
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (idx, &p) in probs.iter().enumerate() {
            let w = BitString::from_index(n, idx, Convention::Spin);
            for (k, q) in trees.ensemble(&w).unwrap().probabilities() {
                *acc.entry(*k).or_insert(0.0) += p * q;
            }
        }
        let exact = thermal_tree_ensemble_exact(&cost, beta, 1).unwrap();
        for (k, &p) in exact.probabilities() {
            worst = worst.max((acc.remove(k).unwrap_or(0.0) - p).abs());
        }
        worst = worst.max(acc.values().fold(0.0, |a, &b| a.max(b)));
    }
    (worst < 1e-12, format!("max entry deviation {worst:.2e}"))
}

/// Optimized `p = 3/2` values never exceed `c(w) + 2ε_w + 4δ`.
fn criterion_7() -> Verdict {
    let (mut violations, mut samples) = (0, 0);
    let mut tightest = f64::INFINITY;
    for (i, (n, beta)) in [(12, 0.6), (12, 1.2), (14, 0.8), (14, 1.5), (14, 2.2)].into_iter().enumerate() {
        let g = common::treelike(n, 3, 1, 70 + 10 * i as u64);
        let cost = Cost::maxcut(&g);
        let m = g.num_edges() as f64;
        for (j, w) in exact_boltzmann_sample(&cost, beta, i as u64, 20).unwrap().iter().enumerate() {
            let bound = thermal_bound(&cost, w, 1).unwrap().value();
            let config = OptimizeConfig {
                restarts: 10,
                ..OptimizeConfig::with_seed(j as u64)
            };
            let r = improvement_report(&cost, w, 1.5, &config, Backend::LocalSim).unwrap();
            let slack = bound + 1e-9 - r.best_value / m;
            tightest = tightest.min(slack);
            violations += usize::from(slack < 0.0);
            samples += 1;
        }
    }
    (violations == 0, format!("{violations} violations in {samples} samples; smallest slack {tightest:.4}"))
}

/// Sample deviation `E` over `n` with a free-slope log-log fit.
fn criterion_8() -> Verdict {
    let start = Instant::now();
    let spec = ThermalSpec::new(1.75).unwrap();
    let mut points = Vec::new();
    for (i, n) in [1000usize, 2000, 5000, 10000, 20000].into_iter().enumerate() {
        let g = generate_regular_graph(n, 3, 800 + i as u64).unwrap();
        let strings = metropolis_samples(&Cost::maxcut(&g), &spec, 900 + i as u64, 10).unwrap();
        points.push((n as f64, sample_deviation(&strings, &g, 2).unwrap()));
    }
    let fit = fit_inverse_sqrt(&points).unwrap();
    let ok = (-0.65..=-0.35).contains(&fit.slope) && within(Duration::from_secs(1800), start);
    let series: Vec<String> = points.iter().map(|(n, e)| format!("{n}:{e:.3}")).collect();
    (
        ok,
        format!("free slope {:.3}, c = {:.2} (E at {})", fit.slope, fit.coefficient, series.join(" ")),
    )
}

/// No improvement from SA or GW strings on a 300-vertex cubic graph.
fn criterion_9() -> Verdict {
    let start = Instant::now();
    let g = generate_regular_graph(300, 3, 900).unwrap();
    let cost = Cost::maxcut(&g);
    let spec = ThermalSpec::new(1.75).unwrap();
    let mut strings = metropolis_samples(&cost, &spec, 901, 100).unwrap();
    let gw = GwConfig::default();
    strings.extend((0..100).map(|i| goemans_williamson(&g, &gw, 1000 + i).unwrap().string));
    let mut improved = 0;
    let mut largest = f64::NEG_INFINITY;
    for k in [2, 3] {
        let sim = LocalSimulator::new(cost, k).unwrap();
        let bounds = Bounds::qaoa(Schedule::WarmStart, 2 * k - 1);
        for (i, w) in strings.iter().enumerate() {
            let mut bound = sim.bind(w).unwrap();
            let r = optimize(|x| bound.expectation(x), &bounds, &OptimizeConfig::with_seed(i as u64)).unwrap();
            largest = largest.max(r.improvement());
            improved += usize::from(r.improvement() > 1e-6);
        }
    }
    let ok = improved == 0 && within(Duration::from_secs(1800), start);
    (
        ok,
        format!(
            "{improved} of 400 runs improved; largest change {largest:.2e}; {:.0}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

/// Mean SA cut fraction at `T = 1.75` on 1000-vertex cubic graphs.
fn criterion_10() -> Verdict {
    let spec = ThermalSpec::new(1.75).unwrap();
    let mut total = 0.0;
    let count = 10;
    for i in 0..count {
        let g = generate_regular_graph(1000, 3, 1100 + i).unwrap();
        let cost = Cost::maxcut(&g);
        let s = &metropolis_samples(&cost, &spec, 1200 + i, 1).unwrap()[0];
        total += cost.evaluate(s).unwrap() as f64 / g.num_edges() as f64;
    }
    let mean = total / count as f64;
    ((0.62..=0.66).contains(&mean), format!("mean cut fraction {mean:.4} over {count} graphs"))
}

/// Magic-angle cat states.
fn criterion_11() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bad = 0;
    for t in 0..200 {
        let n = [6, 8, 10][t % 3];
        let g = Graph::sherrington_kirkpatrick(n, 1300 + t as u64);
        let w = random_spins(n, &mut rng);
        if !magic_angle_state(&g, &w).unwrap().matches_prediction(1e-9) {
            bad += 1;
        }
    }
    (bad == 0, format!("{bad} of 200 outputs differ from {{w′, −w′}} at 1/2 each"))
}

/// Greedy independent sets and the `p = 1/2` independent-set formula.
fn criterion_12() -> Verdict {
    let mut small = 0;
    for i in 0..100 {
        let n = 20 + 2 * (i % 40);
        let g = generate_regular_graph(n, 3, 1400 + i as u64).unwrap();
        if 4 * greedy_mis(&g, i as u64).count_ones() < n {
            small += 1;
        }
    }
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..10 {
        let n = 10 + 2 * (i % 3);
        let g = generate_regular_graph(n, 3, 1500 + i as u64).unwrap();
        let sim = Simulator::new(Cost::mis(&g)).unwrap();
        let w = BitString::from_index(n, rng.gen_range(0..1 << n), Convention::Binary);
        let k = g.edges().iter().filter(|&&(u, v)| w.is_one(u) && w.is_one(v)).count();
        for t in 0..20 {
            let beta = PI * t as f64 / 20.0;
            let got = sim
                .expectation(&QaoaParams::warm_start(vec![beta]).unwrap(), &Start::Basis(w.clone()))
                .unwrap();
            worst = worst.max((got - mis_p_half(n, 3, w.count_ones(), k, beta)).abs());
        }
    }
    let mut improved = 0;
    for i in 0..10 {
        let n = 12 + 2 * (i % 3);
        let g = generate_regular_graph(n, 3, 1600 + i as u64).unwrap();
        let w = greedy_mis(&g, i as u64);
        let r = improvement_report(&Cost::mis(&g), &w, 0.5, &OptimizeConfig::with_seed(i as u64), Backend::Statevector)
            .unwrap();
        let closed = mis_p_half_optimum(n, 3, w.count_ones(), 0);
        improved += usize::from(r.improved || closed.improves);
    }
    let ok = small == 0 && worst < 1e-9 && improved == 0;
    (
        ok,
        format!("{small} greedy sets below n/(d+1); formula deviation {worst:.2e}; {improved} greedy strings improved"),
    )
}

/// Compression bounds against double-double evaluation and the decoupled
/// density of states against binomials.
fn criterion_13() -> Verdict {
    let mut worst: f64 = 0.0;
    let cases = [
        (1u64 << 20, 1u64, 1.0, 20usize),
        (1 << 30, 7, 2.0, 30),
        (184756, 12, 1.5, 20),
        (5_000_000_000, 3, 0.5, 40),
    ];
    for (d0, d1, p, n) in cases {
        let inputs = CompressionInputs { d0, d1, p, n, delta: 0.5 };
        let eps = compression_epsilon(&inputs).unwrap().value;
        let oracle = common::dd_epsilon(d0 as f64, d1 as f64, p, n as f64);
        worst = worst.max((eps - oracle).abs() / oracle);
        for delta in [1.0, 0.3, 1e-3] {
            let m = improvable_count_bound(d1, delta, p, n).unwrap();
            let oracle = common::dd_count(d1 as f64, delta, p, n as f64);
            worst = worst.max((m - oracle).abs() / oracle);
        }
    }
    let mut dos_ok = true;
    for m in 1..=8usize {
        let g = Graph::decoupled(m);
        let dos = density_of_states(&Cost::maxcut(&g)).unwrap();
        let mut binom = 1u64;
        for c in 0..=m {
            if c > 0 {
                binom = binom * (m - c + 1) as u64 / c as u64;
            }
            dos_ok &= dos.get(&(c as i64)) == Some(&(binom << m));
        }
        dos_ok &= dos.len() == m + 1;
    }
    (
        worst < 1e-12 && dos_ok,
        format!("max relative error {worst:.2e}; decoupled density of states exact: {dos_ok}"),
    )
}

/// Standard QAOA improves steadily with depth.
fn criterion_14() -> Verdict {
    let mut ok = true;
    let mut rows = Vec::new();
    for seed in [1400u64, 1401, 1402] {
        let g = generate_regular_graph(12, 3, seed).unwrap();
        let sim = Simulator::new(Cost::maxcut(&g)).unwrap();
        let mut values = Vec::new();
        let mut previous: Vec<f64> = Vec::new();
        for p in 1..=4 {
            let bounds = Bounds::qaoa(Schedule::Standard, 2 * p);
            let mut config = OptimizeConfig::with_seed(seed + p as u64);
            if !previous.is_empty() {
                // An appended identity layer reproduces the previous optimum.
                let mut warm = previous.clone();
                warm.extend([0.0, 0.0]);
                config.extra_starts.push(warm);
            }
            let r = optimize(
                |x| sim.expectation(&QaoaParams::standard(x.to_vec())?, &Start::Uniform),
                &bounds,
                &config,
            )
            .unwrap();
            previous = r.best_angles.clone();
            values.push(r.best_value);
        }
        ok &= values[0] > sim.mean_value();
        ok &= values.windows(2).all(|w| w[1] >= w[0] - 1e-9);
        let v: Vec<String> = values.iter().map(|x| format!("{x:.2}")).collect();
        rows.push(format!("[{}] mean {}", v.join(" "), sim.mean_value()));
    }
    (ok, rows.join("; "))
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, fn() -> Verdict);
    let criteria: [Criterion; 14] = [
        (1, "oracle equivalence", criterion_1),
        (2, "p=1/2 MaxCut closed form", criterion_2),
        (3, "decoupled problem", criterion_3),
        (4, "flip-delta identity", criterion_4),
        (5, "small-angle iff", criterion_5),
        (6, "thermal consistency", criterion_6),
        (7, "thermal bound", criterion_7),
        (8, "sample deviation scaling", criterion_8),
        (9, "large-graph stuck-ness", criterion_9),
        (10, "SA calibration", criterion_10),
        (11, "magic angle", criterion_11),
        (12, "independent set", criterion_12),
        (13, "compression formulas", criterion_13),
        (14, "standard QAOA sanity", criterion_14),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = check();
        println!(
            "criterion {id:>2} {} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
