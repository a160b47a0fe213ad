//! Plain-text formats.
//!
//! - Graph: first line `n m`, then `m` lines `u v` (0-based,
//!   whitespace-separated). Repeated lines are parallel edges.
//! - Terminals: one vertex id per line.
//! - Update stream: `I u v`, `D u v` or `Q s t`, one per line; `#`
//!   starts a comment.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{DynamicMultigraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| err(line, format!("bad {what} {tok:?}")))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_graph(text: &str) -> Result<DynamicMultigraph, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (no, header) = lines.next().ok_or_else(|| err(1, "empty graph file"))?;
    let mut toks = header.split_whitespace();
    let n = parse_usize(toks.next(), no, "vertex count")?;
    let m = parse_usize(toks.next(), no, "edge count")?;
    if toks.next().is_some() {
        return Err(err(no, "trailing tokens after `n m`"));
    }
    let mut g = DynamicMultigraph::new(n);
    let mut seen = 0;
    for (no, line) in lines {
        let mut toks = line.split_whitespace();
        let Some(first) = toks.next() else {
            continue;
        };
        if seen == m {
            return Err(err(no, format!("more than the declared {m} edges")));
        }
        let u = parse_usize(Some(first), no, "endpoint")?;
        let v = parse_usize(toks.next(), no, "endpoint")?;
        if toks.next().is_some() {
            return Err(err(no, "trailing tokens after `u v`"));
        }
        g.insert_edge(VertexId::from(u), VertexId::from(v))
            .map_err(|e| err(no, e.to_string()))?;
        seen += 1;
    }
    if seen != m {
        return Err(err(
            text.lines().count().max(1),
            format!("declared {m} edges, found {seen}"),
        ));
    }
    Ok(g)
}

/// Live edges in id order.
pub fn write_graph(g: &DynamicMultigraph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (_, u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_terminals(text: &str, n: usize) -> Result<Vec<VertexId>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        let v = parse_usize(Some(line), i + 1, "vertex id")?;
        if v >= n {
            return Err(err(i + 1, format!("vertex {v} out of range for n = {n}")));
        }
        out.push(VertexId::from(v));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamEvent {
    Insert(VertexId, VertexId),
    Delete(VertexId, VertexId),
    Query(VertexId, VertexId),
}

pub fn parse_stream(text: &str) -> Result<Vec<StreamEvent>, ParseError> {
    Ok(parse_stream_lines(text)?.into_iter().map(|(_, ev)| ev).collect())
}

/// Like [`parse_stream`], pairing each event with its 1-based line.
pub fn parse_stream_lines(text: &str) -> Result<Vec<(usize, StreamEvent)>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let mut toks = strip_comment(line).split_whitespace();
        let Some(kind) = toks.next() else {
            continue;
        };
        let a = VertexId::from(parse_usize(toks.next(), no, "vertex")?);
        let b = VertexId::from(parse_usize(toks.next(), no, "vertex")?);
        if toks.next().is_some() {
            return Err(err(no, "trailing tokens"));
        }
        let ev = match kind {
            "I" => StreamEvent::Insert(a, b),
            "D" => StreamEvent::Delete(a, b),
            "Q" => StreamEvent::Query(a, b),
            other => return Err(err(no, format!("unknown event kind {other:?}"))),
        };
        out.push((no, ev));
    }
    Ok(out)
}

pub fn write_stream(events: &[StreamEvent]) -> String {
    let mut out = String::new();
    for ev in events {
        let _ = match *ev {
            StreamEvent::Insert(a, b) => writeln!(out, "I {a} {b}"),
            StreamEvent::Delete(a, b) => writeln!(out, "D {a} {b}"),
            StreamEvent::Query(a, b) => writeln!(out, "Q {a} {b}"),
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let text = "4 3\n0 1\n0 1\n2 3\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree(VertexId(0)), 2);
        assert_eq!(write_graph(&g), text);
    }

    #[test]
    fn graph_errors_carry_lines() {
        assert_eq!(parse_graph("3 1\n0 x\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("3 1\n1 1\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("3 2\n0 1\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("3 1\n0 1\n1 2\n").unwrap_err().line, 3);
        assert_eq!(parse_graph("3\n").unwrap_err().line, 1);
    }

    #[test]
    fn stream_parsing() {
        let ev = parse_stream("# warmup\nI 0 1\n\nQ 0 1 # query\nD 1 0\n").unwrap();
        assert_eq!(
            ev,
            vec![
                StreamEvent::Insert(VertexId(0), VertexId(1)),
                StreamEvent::Query(VertexId(0), VertexId(1)),
                StreamEvent::Delete(VertexId(1), VertexId(0)),
            ]
        );
        assert_eq!(write_stream(&ev), "I 0 1\nQ 0 1\nD 1 0\n");
        assert_eq!(parse_stream("X 0 1\n").unwrap_err().line, 1);
        assert_eq!(parse_stream("I 0 1\nI 0\n").unwrap_err().line, 2);
    }

    #[test]
    fn terminals_file() {
        assert_eq!(
            parse_terminals("3\n0\n", 4).unwrap(),
            vec![VertexId(3), VertexId(0)]
        );
        assert_eq!(parse_terminals("1\n9\n", 4).unwrap_err().line, 2);
    }
}
