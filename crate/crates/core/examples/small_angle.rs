//! The p = 3/2 small-angle condition against a small-β search.

use qaoa_lab::analysis::small_angle_condition;
use qaoa_lab::localsim::LocalSimulator;
use qaoa_lab::optimizer::{small_beta_optimize, SmallBetaConfig, IMPROVEMENT_TOL};
use qaoa_lab::problems::{generate_regular_graph, BitString, Convention, Cost};

fn main() -> qaoa_lab::Result<()> {
    let g = generate_regular_graph(12, 3, 9)?;
    let cost = Cost::maxcut(&g);
    let sim = LocalSimulator::new(cost, 2)?;
    let values = cost.values(12)?;
    let config = SmallBetaConfig::default();
    for level in [11, 13] {
        let (mut agree, mut total, mut up) = (0, 0, 0);
        for idx in (0..values.len()).filter(|&i| values[i] == level) {
            let w = BitString::from_index(12, idx, Convention::Spin);
            let report = small_angle_condition(&g, &w)?;
            let mut bound = sim.bind(&w)?;
            let best = small_beta_optimize(|x| bound.expectation(x), &config)?;
            let improved = best - level as f64 > IMPROVEMENT_TOL;
            agree += usize::from(improved == report.condition());
            up += usize::from(improved);
            total += 1;
        }
        println!("cut {level}: {up} of {total} strings improvable at |β| ≤ {}, condition agrees on {agree}", config.beta_max);
    }
    Ok(())
}
