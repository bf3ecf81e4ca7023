//! Independent sets at p = 1/2: closed form, optimum and greedy starts.

use qaoa_lab::analysis::{mis_p_half, mis_p_half_optimum};
use qaoa_lab::optimizer::{improvement_report, Backend, OptimizeConfig};
use qaoa_lab::problems::{generate_regular_graph, Cost};
use qaoa_lab::statevector::{QaoaParams, Simulator, Start};
use qaoa_lab::warmstart::greedy_mis;

fn main() -> qaoa_lab::Result<()> {
    let (n, d) = (14, 3);
    let g = generate_regular_graph(n, d, 2)?;
    let cost = Cost::mis(&g);
    let sim = Simulator::new(cost)?;
    let w = greedy_mis(&g, 1);
    let weight = w.count_ones();
    for beta in [0.1, 0.4, 0.9] {
        let v = sim.expectation(&QaoaParams::warm_start(vec![beta])?, &Start::Basis(w.clone()))?;
        println!("β = {beta}: simulator {v:.9}, closed form {:.9}", mis_p_half(n, d, weight, 0, beta));
    }
    let opt = mis_p_half_optimum(n, d, weight, 0);
    println!("greedy W = {weight} (n/(d+2) = {:.2}): improves {}", n as f64 / (d + 2) as f64, opt.improves);
    let r = improvement_report(&cost, &w, 0.5, &OptimizeConfig::with_seed(0), Backend::Statevector)?;
    println!("optimized p = 1/2 from greedy: {:.9} (start {})", r.best_value, weight);
    let empty = mis_p_half_optimum(n, d, 0, 0);
    println!("from the empty set: sin²β = {:.4}, value {:.4} = n/(2d)", empty.sin2_beta, empty.value);
    Ok(())
}
