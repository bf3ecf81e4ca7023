//! Plain-text edge lists.
//!
//! ```text
//! # optional comments
//! n m [sk]
//! i j        (or "i j J" with J = +1/-1 when the sk flag is set)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::graph::Graph;
use crate::error::{Error, Result};

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_graph(&fs::read_to_string(path)?, path)
}

pub fn write_graph(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_graph(graph))?;
    Ok(())
}

pub fn format_graph(graph: &Graph) -> String {
    let mut out = String::new();
    let sk = graph.couplings().is_some();
    let _ = writeln!(
        out,
        "{} {}{}",
        graph.num_vertices(),
        graph.num_edges(),
        if sk { " sk" } else { "" }
    );
    for (k, &(u, v)) in graph.edges().iter().enumerate() {
        if sk {
            let _ = writeln!(out, "{u} {v} {:+}", graph.coupling(k));
        } else {
            let _ = writeln!(out, "{u} {v}");
        }
    }
    out
}

/// Parses edge-list text; `origin` only labels error messages.
pub fn parse_graph(text: &str, origin: &Path) -> Result<Graph> {
    let err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(origin),
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || err(hline, format!("malformed header '{header}', expected 'n m [sk]'"));
    let (n, m, sk) = match fields.as_slice() {
        [n, m] => (n, m, false),
        [n, m, "sk"] => (n, m, true),
        _ => return Err(bad_header()),
    };
    let n: usize = n.parse().map_err(|_| bad_header())?;
    let m: usize = m.parse().map_err(|_| bad_header())?;

    let mut edges = Vec::with_capacity(m);
    let mut couplings = Vec::with_capacity(m);
    for (lno, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let want = if sk { 3 } else { 2 };
        if f.len() != want {
            return Err(err(lno, format!("expected {want} fields, found {}", f.len())));
        }
        let vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(lno, format!("'{s}' is not a vertex index")))
        };
        let (u, v) = (vertex(f[0])?, vertex(f[1])?);
        if u >= n || v >= n {
            return Err(err(lno, format!("edge ({u}, {v}) references a vertex outside [0, {n})")));
        }
        if sk {
            let j: i8 = f[2]
                .parse()
                .map_err(|_| err(lno, format!("'{}' is not a coupling", f[2])))?;
            couplings.push(j);
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(err(hline, format!("header declares {m} edges, found {}", edges.len())));
    }
    let built = if sk {
        Graph::with_couplings(n, edges.into_iter().zip(couplings).map(|((u, v), j)| (u, v, j)))
    } else {
        Graph::new(n, edges)
    };
    built.map_err(|e| match e {
        Error::InvalidGraph(msg) => err(hline, msg),
        other => other,
    })
}
