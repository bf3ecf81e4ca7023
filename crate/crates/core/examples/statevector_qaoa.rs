//! Exact standard and warm-start QAOA on small instances.

use std::f64::consts::PI;

use qaoa_lab::problems::{generate_regular_graph, BitString, Cost, Graph};
use qaoa_lab::statevector::{QaoaParams, Simulator, Start};

fn main() -> qaoa_lab::Result<()> {
    // Disjoint edges: one standard layer at (π/2, π/8) finds the perfect cut.
    let pairs = Graph::decoupled(4);
    let sim = Simulator::new(Cost::maxcut(&pairs))?;
    let state = sim.state(&QaoaParams::standard(vec![PI / 2.0, PI / 8.0])?, &Start::Uniform)?;
    println!(
        "decoupled: ⟨C⟩ = {:.6}, P(perfect cut) = {:.6}",
        sim.expectation_of(&state)?,
        sim.success_probability(&state, sim.max_value())?
    );

    // A single mixer layer on a basis state scales C_Z by cos²(2β).
    let g = generate_regular_graph(10, 3, 3)?;
    let cost = Cost::ising(&g);
    let sim = Simulator::new(cost)?;
    let w = BitString::parse("+-+--+-++-")?;
    let cz = cost.evaluate(&w)? as f64;
    for beta in [0.0, 0.2, PI / 8.0, PI / 4.0] {
        let v = sim.expectation(&QaoaParams::warm_start(vec![beta])?, &Start::Basis(w.clone()))?;
        println!("β = {beta:.3}: ⟨C_Z⟩ = {v:+.6}, cos²(2β)·C_Z = {:+.6}", (2.0 * beta).cos().powi(2) * cz);
    }
    Ok(())
}
