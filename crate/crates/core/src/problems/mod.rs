//! Graphs, bit strings and the diagonal cost functions.

mod cost;
mod graph;
mod io;
mod strings;

pub use cost::{
    density_of_states, flip_deltas, is_independent_set, prune_to_independent_set, Cost, CostKind,
    EdgeTable, ENUMERATION_CAP,
};
pub use graph::{generate_regular_graph, Graph};
pub use io::{format_graph, parse_graph, read_graph, write_graph};
pub use strings::{BitString, Convention};
