//! Deviation of thermal samples' local ensembles from their mean, and the
//! E = c·n^(−1/2) fit.

use qaoa_lab::analysis::{fit_inverse_sqrt, sample_deviation};
use qaoa_lab::problems::{generate_regular_graph, Cost};
use qaoa_lab::warmstart::{metropolis_samples, ThermalSpec};

fn main() -> qaoa_lab::Result<()> {
    let spec = ThermalSpec::new(1.75)?;
    let mut points = Vec::new();
    println!("n,E");
    for (i, n) in [500usize, 1000, 2000, 4000].into_iter().enumerate() {
        let g = generate_regular_graph(n, 3, i as u64)?;
        let strings = metropolis_samples(&Cost::maxcut(&g), &spec, 100 + i as u64, 10)?;
        let e = sample_deviation(&strings, &g, 2)?;
        println!("{n},{e:.4}");
        points.push((n as f64, e));
    }
    let fit = fit_inverse_sqrt(&points)?;
    println!("E ≈ {:.2}·n^(-1/2); free slope {:.3}", fit.coefficient, fit.slope);
    Ok(())
}
