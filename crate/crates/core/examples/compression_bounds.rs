//! Compression bounds from a density of states.

use qaoa_lab::analysis::{compression_epsilon, improvable_count, CompressionInputs};
use qaoa_lab::problems::{density_of_states, generate_regular_graph, Cost};

fn main() -> qaoa_lab::Result<()> {
    let g = generate_regular_graph(20, 3, 1)?;
    let dos = density_of_states(&Cost::maxcut(&g))?;
    let max = *dos.keys().next_back().expect("nonempty");
    println!("max cut {max}");
    for p in [0.5, 1.5, 2.5] {
        let inputs = CompressionInputs::from_dos(&dos, (max - 6, max - 4), max, p, 20, 0.5)?;
        let eps = compression_epsilon(&inputs)?;
        let count = improvable_count(&inputs)?;
        println!(
            "p = {p}: d0 = {}, d1 = {}, ε = {:.3e}{}, M ≤ {:.3e}{}",
            inputs.d0,
            inputs.d1,
            eps.value,
            if eps.vacuous { " (vacuous)" } else { "" },
            count.value,
            if count.vacuous { " (vacuous)" } else { "" }
        );
    }
    Ok(())
}
