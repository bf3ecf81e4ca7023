//! Local ensembles, thermality coefficients and the thermal bound.

use qaoa_lab::analysis::{local_ensemble, thermal_bound, thermal_tree_ensemble_exact, TreeNeighborhoods};
use qaoa_lab::optimizer::{improvement_report, Backend, OptimizeConfig};
use qaoa_lab::problems::{generate_regular_graph, Cost};
use qaoa_lab::warmstart::exact_boltzmann_sample;

fn main() -> qaoa_lab::Result<()> {
    let g = (0..)
        .map(|s| generate_regular_graph(14, 3, s))
        .find(|g| g.as_ref().map_or(true, |g| TreeNeighborhoods::new(g, 1).is_ok()))
        .expect("some seed")?;
    let cost = Cost::maxcut(&g);
    let m = g.num_edges() as f64;
    let thermal = thermal_tree_ensemble_exact(&cost, 1.0, 1)?;
    println!("ρ_β,tree at β = 1 has {} patterns on {} vertices", thermal.support_len(), thermal.size());
    for w in exact_boltzmann_sample(&cost, 1.0, 3, 4)? {
        let local = local_ensemble(&g, &w, 1)?;
        let b = thermal_bound(&cost, &w, 1)?;
        let r = improvement_report(&cost, &w, 1.5, &OptimizeConfig { restarts: 5, ..OptimizeConfig::with_seed(1) }, Backend::LocalSim)?;
        println!(
            "{w}: c(w) = {:.3}, ‖ρ_β − ρ_w‖₁ = {:.3}, ε_w = {:.3} at β = {:.3}, δ = {:.3}, bound {:.3} ≥ optimized {:.3}",
            b.cut_fraction,
            thermal.l1_distance(&local)?,
            b.epsilon,
            b.beta,
            b.delta,
            b.value(),
            r.best_value / m
        );
    }
    Ok(())
}
