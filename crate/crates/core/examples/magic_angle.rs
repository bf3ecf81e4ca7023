//! Magic-angle cat states on Sherrington–Kirkpatrick instances.

use qaoa_lab::analysis::magic_angle_state;
use qaoa_lab::problems::{BitString, Cost, Graph};

fn main() -> qaoa_lab::Result<()> {
    let g = Graph::sherrington_kirkpatrick(10, 4);
    let cost = Cost::sk(&g);
    let w = BitString::parse("++-+--+-++")?;
    let r = magic_angle_state(&g, &w)?;
    println!("w  = {w} (C = {})", cost.evaluate(&w)?);
    println!("w′ = {} (C = {})", r.predicted, cost.evaluate(&r.predicted)?);
    for (s, p) in &r.support {
        println!("  {s}: probability {p:.12}, C = {}", cost.evaluate(s)?);
    }
    println!("support matches {{w′, −w′}}: {}", r.matches_prediction(1e-9));
    Ok(())
}
