//! Edge-list text format shared by every CLI subcommand.
//!
//! ```text
//! # comment
//! p <num_vertices> <num_edges> genus=<g|unknown>
//! u v
//! ...
//! ```
//!
//! When the vertex IDs are exactly `1..=n`, isolated vertices are implicit.
//! Otherwise isolated vertices are listed as `v <id>` lines and the vertex
//! set is exactly the set of IDs that appear.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("missing `p <n> <m> genus=<g>` header")]
    MissingHeader,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("header declares {declared} {what}, found {found}")]
    CountMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A parsed edge-list file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub graph: Graph,
    /// `None` when the header says `genus=unknown`.
    pub genus: Option<u64>,
}

fn syntax(line: usize, msg: impl Into<String>) -> EdgeListError {
    EdgeListError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<u64, EdgeListError> {
    tok.parse::<u64>()
        .map_err(|_| syntax(line, format!("invalid vertex id `{tok}`")))
}

pub fn parse(text: &str) -> Result<EdgeList, EdgeListError> {
    let mut header: Option<(usize, usize, Option<u64>)> = None;
    let mut edges = Vec::new();
    let mut explicit = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if header.is_none() {
            if toks.len() != 4 || toks[0] != "p" {
                return Err(EdgeListError::MissingHeader);
            }
            let n = toks[1]
                .parse()
                .map_err(|_| syntax(line, "bad vertex count"))?;
            let m = toks[2].parse().map_err(|_| syntax(line, "bad edge count"))?;
            let genus = match toks[3].strip_prefix("genus=") {
                Some("unknown") => None,
                Some(g) => Some(g.parse().map_err(|_| syntax(line, "bad genus"))?),
                None => return Err(syntax(line, "expected genus=<g|unknown>")),
            };
            header = Some((n, m, genus));
            continue;
        }
        match toks.as_slice() {
            ["v", id] => explicit.push(parse_id(id, line)?),
            [u, v] => edges.push((parse_id(u, line)?, parse_id(v, line)?)),
            _ => return Err(syntax(line, "expected `u v` or `v <id>`")),
        }
    }
    let (n, m, genus) = header.ok_or(EdgeListError::MissingHeader)?;
    if edges.len() != m {
        return Err(EdgeListError::CountMismatch {
            what: "edges",
            declared: m,
            found: edges.len(),
        });
    }
    let mut seen: Vec<u64> = explicit;
    seen.extend(edges.iter().flat_map(|&(u, v)| [u, v]));
    seen.sort_unstable();
    seen.dedup();
    let vertices: Vec<u64> = if seen.last().is_none_or(|&mx| mx <= n as u64) {
        (1..=n as u64).collect()
    } else {
        if seen.len() != n {
            return Err(EdgeListError::CountMismatch {
                what: "vertices",
                declared: n,
                found: seen.len(),
            });
        }
        seen
    };
    let graph = Graph::new(
        vertices.into_iter().map(VertexId),
        edges.into_iter().map(|(u, v)| (VertexId(u), VertexId(v))),
    )?;
    Ok(EdgeList { graph, genus })
}

pub fn read(path: &Path) -> Result<EdgeList, EdgeListError> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write(graph: &Graph, genus: Option<u64>) -> String {
    let mut out = String::new();
    let genus = genus.map_or_else(|| "unknown".to_string(), |g| g.to_string());
    let _ = writeln!(
        out,
        "p {} {} genus={}",
        graph.num_vertices(),
        graph.num_edges(),
        genus
    );
    let contiguous = graph
        .vertices()
        .iter()
        .enumerate()
        .all(|(i, v)| v.0 == i as u64 + 1);
    if !contiguous {
        for (i, &v) in graph.vertices().iter().enumerate() {
            if graph.neighbor_indices(i).is_empty() {
                let _ = writeln!(out, "v {v}");
            }
        }
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_header_comments_and_isolated_vertices() {
        let text = "# path plus isolated vertex\np 4 2 genus=0\n1 2\n2 3\n";
        let el = parse(text).unwrap();
        assert_eq!(el.genus, Some(0));
        assert_eq!(el.graph.num_vertices(), 4);
        assert_eq!(el.graph.num_edges(), 2);
        assert_eq!(parse("p 1 0 genus=unknown\n").unwrap().genus, None);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse("1 2\n"), Err(EdgeListError::MissingHeader)));
        assert!(matches!(
            parse("p 3 2 genus=0\n1 2\n"),
            Err(EdgeListError::CountMismatch { .. })
        ));
        assert!(matches!(
            parse("p 3 1 genus=0\n1 x\n"),
            Err(EdgeListError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse("p 3 1 genus=0\n1 1\n"),
            Err(EdgeListError::Graph(GraphError::SelfLoop(_)))
        ));
        assert!(matches!(
            parse("p 3 1 genus=zero\n1 2\n"),
            Err(EdgeListError::Syntax { .. })
        ));
    }

    #[test]
    fn gapped_ids_round_trip_with_explicit_isolated_vertices() {
        let g = Graph::new(
            [5, 9, 40].map(VertexId),
            [(VertexId(5), VertexId(40))],
        )
        .unwrap();
        let text = write(&g, Some(2));
        assert!(text.contains("v 9"));
        let back = parse(&text).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(back.genus, Some(2));
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(n in 1u64..25, raw in prop::collection::vec((1u64..25, 1u64..25), 0..60)) {
            let mut edges: Vec<(u64, u64)> = raw
                .into_iter()
                .filter(|&(u, v)| u != v && u <= n && v <= n)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect();
            edges.sort_unstable();
            edges.dedup();
            let g = Graph::from_edges(n, &edges).unwrap();
            let back = parse(&write(&g, None)).unwrap();
            prop_assert_eq!(back.graph, g);
        }
    }
}
