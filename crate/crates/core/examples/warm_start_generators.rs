//! Thermal sampling, Goemans–Williamson rounding and greedy independent sets.

use qaoa_lab::problems::{generate_regular_graph, is_independent_set, Cost};
use qaoa_lab::warmstart::{
    calibrate_beta, goemans_williamson, greedy_mis, metropolis_samples, thermal_mean, GwConfig, MoveSet,
    ThermalSpec,
};

fn main() -> qaoa_lab::Result<()> {
    let g = generate_regular_graph(300, 3, 11)?;
    let cost = Cost::maxcut(&g);
    let m = g.num_edges() as f64;
    for t in [1.25, 1.75] {
        let spec = ThermalSpec::new(t)?;
        let cuts: Vec<i64> = metropolis_samples(&cost, &spec, 1, 5)?
            .iter()
            .map(|s| cost.evaluate(s))
            .collect::<qaoa_lab::Result<_>>()?;
        println!("T = {t}: cuts {cuts:?} (fraction ≈ {:.3})", cuts.iter().sum::<i64>() as f64 / (5.0 * m));
    }
    let cluster = ThermalSpec::new(1.75)?.with_moves(MoveSet::Cluster);
    let s = &metropolis_samples(&cost, &cluster, 2, 1)?[0];
    println!("cluster moves at T = 1.75: cut {}", cost.evaluate(s)?);

    let gw = goemans_williamson(&g, &GwConfig::default(), 3)?;
    println!("GW: relaxation {:.1}, best rounded cut {}", gw.relaxation.last().unwrap_or(&0.0), gw.cut);

    let b = greedy_mis(&g, 4);
    println!("greedy independent set: size {}, valid {}", b.count_ones(), is_independent_set(&g, &b));

    let small = generate_regular_graph(14, 3, 5)?;
    let c = Cost::maxcut(&small);
    let beta = calibrate_beta(&c, 15.0)?;
    println!("n = 14: β = {beta:.4} gives Tr(Cρ_β) = {:.6}", thermal_mean(&c, beta)?);
    Ok(())
}
