//! Warm-start expectations on a 300-vertex graph from edge neighborhoods,
//! checked against the full statevector on a small graph.

use std::time::Instant;

use qaoa_lab::localsim::{tree_fraction, LocalSimulator, Strategy, LOCAL_CAP};
use qaoa_lab::problems::{generate_regular_graph, BitString, Cost};
use qaoa_lab::statevector::{QaoaParams, Simulator, Start};
use qaoa_lab::warmstart::{metropolis_sample, stream_rng, ThermalSpec};

fn main() -> qaoa_lab::Result<()> {
    let small = generate_regular_graph(12, 3, 1)?;
    let w = BitString::parse("+--+-++-+--+")?;
    let angles = [0.3, -1.1, 0.7];
    let light = LocalSimulator::new(Cost::maxcut(&small), 2)?.expectation(&w, &angles)?;
    let direct = LocalSimulator::with_options(Cost::maxcut(&small), 2, Strategy::Direct, LOCAL_CAP)?
        .expectation(&w, &angles)?;
    let full = Simulator::new(Cost::maxcut(&small))?
        .expectation(&QaoaParams::warm_start(angles.to_vec())?, &Start::Basis(w))?;
    println!("n = 12: light cone {light:.12}, direct ball {direct:.12}, statevector {full:.12}");

    let g = generate_regular_graph(300, 3, 2)?;
    let cost = Cost::maxcut(&g);
    let w = metropolis_sample(&cost, &ThermalSpec::new(1.75)?, &mut stream_rng(2, 0))?;
    println!("n = 300: C(w) = {}", cost.evaluate(&w)?);
    for k in [2, 3] {
        let sim = LocalSimulator::new(cost, k)?;
        let mut bound = sim.bind(&w)?;
        let angles: Vec<f64> = (0..2 * k - 1).map(|i| 0.1 * (i + 1) as f64).collect();
        let t = Instant::now();
        let v = bound.expectation(&angles)?;
        println!(
            "  p = {}/2: ⟨C⟩ = {v:.6}, δ = {:.3}, {} shapes, {:?} per evaluation",
            2 * k - 1,
            tree_fraction(&g, k - 1),
            sim.num_shapes(),
            t.elapsed()
        );
    }
    Ok(())
}
