//! Multi-start optimization of warm starts at increasing depth.

use qaoa_lab::optimizer::{improvement_report, Backend, OptimizeConfig};
use qaoa_lab::problems::{generate_regular_graph, BitString, Convention, Cost};

fn main() -> qaoa_lab::Result<()> {
    let g = generate_regular_graph(12, 3, 5)?;
    let cost = Cost::maxcut(&g);
    let values = cost.values(12)?;
    for level in [11, 13] {
        let idx = values.iter().position(|&c| c == level).expect("level present");
        let w = BitString::from_index(12, idx, Convention::Spin);
        for p in [1.5, 2.5] {
            let config = OptimizeConfig {
                restarts: 10,
                ..OptimizeConfig::with_seed(1)
            };
            let r = improvement_report(&cost, &w, p, &config, Backend::Statevector)?;
            println!(
                "C(w) = {level}, p = {p}: best {:.6} (improvement {:+.2e}, {} evaluations)",
                r.best_value,
                r.improvement(),
                r.evaluations
            );
        }
    }
    Ok(())
}
