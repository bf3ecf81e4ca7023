//! Random regular graphs, the four cost functions and the edge-list format.

use qaoa_lab::problems::{
    density_of_states, flip_deltas, format_graph, generate_regular_graph, parse_graph, BitString, Cost, Graph,
};

fn main() -> qaoa_lab::Result<()> {
    let g = generate_regular_graph(12, 3, 7)?;
    println!("{}", format_graph(&g));

    let w = BitString::parse("+-+-+-+-+-+-")?;
    println!("C_MC(w) = {}", Cost::maxcut(&g).evaluate(&w)?);
    println!("C_Z(w)  = {}", Cost::ising(&g).evaluate(&w)?);
    let deltas = flip_deltas(&g, &w)?;
    println!("δ = {deltas:?} (sum {})", deltas.iter().sum::<i64>());

    let b = BitString::parse("100000100000")?;
    println!("C_MIS(b) = {}", Cost::mis(&g).evaluate(&b)?);

    let sk = Graph::sherrington_kirkpatrick(6, 1);
    println!("C_SK(+++---) = {}", Cost::sk(&sk).evaluate(&BitString::parse("+++---")?)?);

    println!("cut  count");
    for (c, k) in density_of_states(&Cost::maxcut(&g))? {
        println!("{c:>3}  {k}");
    }

    let back = parse_graph(&format_graph(&g), "inline".as_ref())?;
    assert_eq!(back, g);
    Ok(())
}
