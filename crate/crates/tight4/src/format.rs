//! Line-oriented text formats for graphs, partitions and certificates.
//!
//! ```text
//! # comment
//! h4 <N> <M>
//! e v1 v2 v3 v4        (M lines)
//!
//! part <N>
//! A v1 v2 ...
//!
//! path v1 v2 ...   |   cycle v1 v2 ...
//! ```
//!
//! Blank and `#` lines are skipped everywhere; anything else unexpected is an
//! error, as is a missing final newline.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cert::{Certificate, TightCycle, TightPath};
use crate::error::{Error, Result};
use crate::graph::Hypergraph4;
use crate::partition::Partition;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-comment, non-blank lines with 1-based numbers; `#` lines go to
/// `comments` with the marker stripped.
fn content_lines<'a>(text: &'a str, comments: &mut Vec<String>) -> Result<Vec<(usize, &'a str)>> {
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(perr(text.lines().count(), "missing final newline"));
    }
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        out.push((i + 1, l));
    }
    Ok(out)
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| perr(line, format!("not a non-negative integer: {tok:?}")))
}

pub fn write_graph(h: &Hypergraph4, comments: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        s.push_str("# ");
        s.push_str(c);
        s.push('\n');
    }
    s.push_str(&format!("h4 {} {}\n", h.vertex_count(), h.edge_count()));
    for e in h.edges() {
        s.push_str(&format!("e {} {} {} {}\n", e[0], e[1], e[2], e[3]));
    }
    s
}

/// The graph and its comment lines.
pub fn parse_graph(text: &str) -> Result<(Hypergraph4, Vec<String>)> {
    let mut comments = Vec::new();
    let lines = content_lines(text, &mut comments)?;
    let (&(hl, header), rest) = lines.split_first().ok_or_else(|| perr(0, "empty graph file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "h4" {
        return Err(perr(hl, "expected `h4 <N> <M>`"));
    }
    let n = parse_usize(hl, toks[1])?;
    let m = parse_usize(hl, toks[2])?;
    if rest.len() != m {
        return Err(perr(hl, format!("header announces {m} edges, found {}", rest.len())));
    }
    let mut quads = Vec::with_capacity(m);
    for &(ln, l) in rest {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 5 || t[0] != "e" {
            return Err(perr(ln, "expected `e v1 v2 v3 v4`"));
        }
        quads.push([
            parse_usize(ln, t[1])?,
            parse_usize(ln, t[2])?,
            parse_usize(ln, t[3])?,
            parse_usize(ln, t[4])?,
        ]);
    }
    let h = Hypergraph4::new(n, &quads).map_err(|e| match e {
        Error::OutOfRange { .. } | Error::DegenerateEdge(_) => perr(0, e.to_string()),
        other => other,
    })?;
    Ok((h, comments))
}

/// `key=value` comment lines, as written for benchmark recipes.
pub fn kv_comments(comments: &[String]) -> Vec<&str> {
    comments.iter().map(|c| c.as_str()).filter(|c| c.contains('=')).collect()
}

pub fn write_partition(p: &Partition) -> String {
    let mut s = format!("part {}\nA", p.vertex_count());
    for v in p.a_vertices() {
        s.push_str(&format!(" {v}"));
    }
    s.push('\n');
    s
}

pub fn parse_partition(text: &str) -> Result<Partition> {
    let mut comments = Vec::new();
    let lines = content_lines(text, &mut comments)?;
    if lines.len() != 2 {
        return Err(perr(0, "expected `part <N>` followed by one `A ...` line"));
    }
    let (hl, header) = lines[0];
    let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["part", n] => parse_usize(hl, n)?,
        _ => return Err(perr(hl, "expected `part <N>`")),
    };
    let (al, body) = lines[1];
    let mut toks = body.split_whitespace();
    if toks.next() != Some("A") {
        return Err(perr(al, "expected `A v1 v2 ...`"));
    }
    let mut a = Vec::new();
    for t in toks {
        let v = parse_usize(al, t)?;
        if v >= n {
            return Err(perr(al, format!("vertex {v} out of range")));
        }
        if a.contains(&v) {
            return Err(perr(al, format!("vertex {v} repeated")));
        }
        a.push(v);
    }
    Partition::from_a(n, a)
}

pub fn write_certificate(c: &Certificate) -> String {
    let (kw, seq) = match c {
        Certificate::Path(p) => ("path", &p.seq),
        Certificate::Cycle(c) => ("cycle", &c.seq),
    };
    let mut s = String::from(kw);
    for v in seq {
        s.push_str(&format!(" {v}"));
    }
    s.push('\n');
    s
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut comments = Vec::new();
    let lines = content_lines(text, &mut comments)?;
    if lines.len() != 1 {
        return Err(perr(0, "expected a single `path ...` or `cycle ...` line"));
    }
    let (ln, l) = lines[0];
    let mut toks = l.split_whitespace();
    let kw = toks.next().unwrap_or("");
    let seq = toks.map(|t| parse_usize(ln, t)).collect::<Result<Vec<_>>>()?;
    match kw {
        "path" => Ok(Certificate::Path(TightPath { seq })),
        "cycle" => Ok(Certificate::Cycle(TightCycle { seq })),
        _ => Err(perr(ln, "expected `path` or `cycle`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{build_random, h0_partition};
    use proptest::prelude::*;

    #[test]
    fn graph_round_trip_with_comments() {
        let h = build_random(9, 0.3, 4);
        let text = write_graph(&h, &["recipe=benchmark".to_string(), "half_size=4".to_string()]);
        let (g, comments) = parse_graph(&text).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert_eq!(kv_comments(&comments), vec!["recipe=benchmark", "half_size=4"]);
    }

    #[test]
    fn graph_rejects_garbage() {
        assert!(parse_graph("h4 4 1\ne 0 1 2 3\n").is_ok());
        assert!(parse_graph("h4 4 1\ne 0 1 2 3").is_err());
        assert!(parse_graph("h4 4 1\ne 0 1 2 3\nextra\n").is_err());
        assert!(parse_graph("h4 4 1\ne 0 1 2 3 4\n").is_err());
        assert!(parse_graph("h4 4 1\ne 0 1 2 9\n").is_err());
        assert!(parse_graph("h4 4 2\ne 0 1 2 3\n").is_err());
        assert!(parse_graph("graph 4 1\ne 0 1 2 3\n").is_err());
        assert!(parse_graph("").is_err());
    }

    #[test]
    fn partition_and_certificate_round_trip() {
        let p = h0_partition(3, 2);
        assert_eq!(parse_partition(&write_partition(&p)).unwrap(), p);
        assert!(parse_partition("part 3\nA 0 3\n").is_err());
        assert!(parse_partition("part 3\nB 0\n").is_err());
        let c = Certificate::Cycle(TightCycle { seq: vec![4, 2, 0, 1, 3] });
        assert_eq!(parse_certificate(&write_certificate(&c)).unwrap(), c);
        assert!(parse_certificate("walk 1 2\n").is_err());
        assert!(parse_certificate("path 1 x\n").is_err());
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(seed in any::<u64>(), n in 4usize..12, p in 0.0f64..0.7) {
            let h = build_random(n, p, seed);
            let (g, _) = parse_graph(&write_graph(&h, &[])).unwrap();
            prop_assert_eq!(g.edges(), h.edges());
            prop_assert_eq!(g.vertex_count(), n);
        }
    }
}
