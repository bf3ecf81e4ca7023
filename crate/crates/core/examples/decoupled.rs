//! Warm starts on disjoint edges: every gain on an unsatisfied edge is paid
//! for by a satisfied one.

use qaoa_lab::analysis::{decoupled_mixing, decoupled_oracle};
use qaoa_lab::optimizer::{improvement_report, Backend, OptimizeConfig};
use qaoa_lab::problems::{BitString, Cost, Graph};
use qaoa_lab::statevector::{QaoaParams, Simulator, Start};

fn main() -> qaoa_lab::Result<()> {
    let g = Graph::decoupled(3);
    let cost = Cost::maxcut(&g);
    let w = BitString::parse("+-++-+")?;
    let params = QaoaParams::warm_start(vec![0.4, 1.3, -0.2])?;
    let (theta, _) = decoupled_mixing(&params);
    let oracle: f64 = decoupled_oracle(&w, theta)?.iter().sum();
    let sim = Simulator::new(cost)?.expectation(&params, &Start::Basis(w.clone()))?;
    println!("θ = {theta:.4}: oracle {oracle:.12}, simulator {sim:.12}");
    for p in [1.5, 2.5, 3.5] {
        let r = improvement_report(&cost, &w, p, &OptimizeConfig::with_seed(1), Backend::Statevector)?;
        println!("p = {p}: best {:.9} from C(w) = {}", r.best_value, cost.evaluate(&w)?);
    }
    Ok(())
}
