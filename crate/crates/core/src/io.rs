//! Plain-text graph format.
//!
//! ```text
//! n m
//! u v w      (m lines; 0-based ids; w as an integer, decimal, or p/q)
//! ```
//!
//! Blank lines are ignored. Self-loops and repeated pairs are format errors.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::weight::{format_weight, parse_weight};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_graph(text: &str) -> Result<SignedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut fields = header.split_whitespace();
    let mut count = |what: &str| -> Result<usize> {
        fields
            .next()
            .ok_or_else(|| parse_err(hline, format!("missing {what}")))?
            .parse()
            .map_err(|_| parse_err(hline, format!("bad {what}")))
    };
    let n = count("node count")?;
    let m = count("edge count")?;
    if fields.next().is_some() {
        return Err(parse_err(hline, "trailing fields in header"));
    }

    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [u, v, w] = parts[..] else {
            return Err(parse_err(lineno, "expected `u v w`"));
        };
        let u: usize = u.parse().map_err(|_| parse_err(lineno, "bad node id"))?;
        let v: usize = v.parse().map_err(|_| parse_err(lineno, "bad node id"))?;
        let w = parse_weight(w).ok_or_else(|| parse_err(lineno, format!("bad weight {w:?}")))?;
        edges.push((lineno, u, v, w));
    }
    if edges.len() != m {
        return Err(parse_err(
            hline,
            format!("header declares {m} edges but {} were given", edges.len()),
        ));
    }

    let mut g = SignedGraph::new(n);
    let mut seen = std::collections::BTreeSet::new();
    for (lineno, u, v, w) in edges {
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(lineno, format!("pair ({u}, {v}) repeated")));
        }
        g.set_weight(u, v, w)
            .map_err(|e| parse_err(lineno, e.to_string()))?;
    }
    Ok(g)
}

/// Writes the nonzero edges in lexicographic order.
pub fn write_graph(g: &SignedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.node_count(), g.edge_count());
    for (u, v, w) in g.edges() {
        let _ = writeln!(out, "{u} {v} {}", format_weight(w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{int, ratio};

    #[test]
    fn reads_mixed_weights() {
        let g = read_graph("4 3\n0 1 0.5\n2 1 -3/4\n\n3 0 2\n").unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.weight(1, 0), ratio(1, 2));
        assert_eq!(g.weight(1, 2), ratio(-3, 4));
        assert_eq!(g.weight(0, 3), int(2));
    }

    #[test]
    fn zero_weight_lines_are_non_edges() {
        let g = read_graph("3 2\n0 1 0\n1 2 1\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejects_format_errors() {
        assert!(matches!(
            read_graph("3 1\n1 1 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_graph("3 2\n0 1 1\n1 0 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(read_graph("3 2\n0 1 1\n").is_err());
        assert!(read_graph("3 1\n0 5 1\n").is_err());
        assert!(read_graph("3 1\n0 1 x\n").is_err());
        assert!(read_graph("").is_err());
    }

    #[test]
    fn writes_rational_form() {
        let g = read_graph("3 2\n0 1 0.25\n1 2 -1\n").unwrap();
        assert_eq!(write_graph(&g), "3 2\n0 1 1/4\n1 2 -1\n");
    }
}
