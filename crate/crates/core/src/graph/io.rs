//! `pa-graph v1` text format.
//!
//! ```text
//! pa-graph v1 t=<t> m=<m> delta=<float>
//! <source> <target>
//! ...
//! ```
//!
//! One edge per line in creation order. `delta` is written with Rust's
//! shortest round-trip float formatting, so write → read → write is
//! byte-identical.

use std::io::{BufRead, Write};

use super::{Edge, PaGraph};
use crate::error::{Error, Result};
use crate::params::Params;

pub const HEADER_MAGIC: &str = "pa-graph";

pub fn write_graph<W: Write>(graph: &PaGraph, mut out: W) -> Result<()> {
    let p = graph.params();
    writeln!(out, "{HEADER_MAGIC} v1 t={} m={} delta={}", graph.t(), p.m(), p.delta())?;
    for e in graph.edges() {
        writeln!(out, "{} {}", e.source, e.target)?;
    }
    out.flush()?;
    Ok(())
}

fn header_field<'a>(tok: Option<&'a str>, key: &str) -> Result<&'a str> {
    tok.and_then(|s| s.strip_prefix(key))
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| Error::parse(1, format!("expected `{key}=<value>` in header")))
}

fn parse_header(line: &str) -> Result<(usize, Params)> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some(HEADER_MAGIC) || toks.next() != Some("v1") {
        return Err(Error::parse(1, format!("header must start with `{HEADER_MAGIC} v1`")));
    }
    let t: usize = header_field(toks.next(), "t")?
        .parse()
        .map_err(|e| Error::parse(1, format!("bad t: {e}")))?;
    let m: usize = header_field(toks.next(), "m")?
        .parse()
        .map_err(|e| Error::parse(1, format!("bad m: {e}")))?;
    let delta: f64 = header_field(toks.next(), "delta")?
        .parse()
        .map_err(|e| Error::parse(1, format!("bad delta: {e}")))?;
    if toks.next().is_some() {
        return Err(Error::parse(1, "trailing tokens in header"));
    }
    if t == 0 {
        return Err(Error::parse(1, "t must be positive"));
    }
    let params = Params::new(m, delta).map_err(|e| Error::parse(1, e.to_string()))?;
    Ok((t, params))
}

pub fn read_graph<R: BufRead>(input: R) -> Result<PaGraph> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::parse(1, "empty input"))??;
    let (t, params) = parse_header(&header)?;
    let mut edges = Vec::with_capacity(t * params.m());
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split(' ');
        let parse = |tok: Option<&str>| -> Result<u32> {
            tok.ok_or_else(|| Error::parse(lineno, "expected `<source> <target>`"))?
                .parse()
                .map_err(|e| Error::parse(lineno, format!("bad vertex id: {e}")))
        };
        let source = parse(toks.next())?;
        let target = parse(toks.next())?;
        if toks.next().is_some() {
            return Err(Error::parse(lineno, "trailing tokens"));
        }
        if source < target {
            return Err(Error::parse(lineno, format!("source {source} < target {target}")));
        }
        edges.push(Edge { source, target });
    }
    if edges.len() != t * params.m() {
        return Err(Error::parse(
            edges.len() + 1,
            format!("expected {} edges, found {}", t * params.m(), edges.len()),
        ));
    }
    PaGraph::from_edges(params, edges).map_err(|e| Error::parse(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grow_pam_direct;
    use crate::rng::RngStream;

    #[test]
    fn round_trip_is_byte_identical() {
        let p = Params::new(3, -1.7).unwrap();
        let g = grow_pam_direct(300, p, RngStream::new(3, 1)).unwrap();
        let text = g.to_text();
        let back = read_graph(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
        assert!(text.starts_with("pa-graph v1 t=300 m=3 delta=-1.7\n"));
    }

    #[test]
    fn rejects_malformed_headers() {
        for bad in [
            "",
            "pa-graph v2 t=1 m=1 delta=0\n1 1\n",
            "pa-graph v1 t=1 m=1\n1 1\n",
            "pa-graph v1 t=x m=1 delta=0\n1 1\n",
            "pa-graph v1 t=1 m=1 delta=-1\n1 1\n",
            "pa-graph v1 m=1 t=1 delta=0\n1 1\n",
            "pa-graph v1 t=1 m=1 delta=0 extra\n1 1\n",
        ] {
            assert!(read_graph(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn rejects_bad_edges() {
        let upward = "pa-graph v1 t=2 m=1 delta=0\n1 1\n1 2\n";
        assert!(matches!(read_graph(upward.as_bytes()), Err(Error::Parse { line: 3, .. })));
        let short = "pa-graph v1 t=2 m=1 delta=0\n1 1\n";
        assert!(read_graph(short.as_bytes()).is_err());
        let wrong_owner = "pa-graph v1 t=2 m=1 delta=0\n1 1\n1 1\n";
        assert!(read_graph(wrong_owner.as_bytes()).is_err());
        let ok = "pa-graph v1 t=2 m=1 delta=0\n1 1\n2 1\n";
        assert_eq!(read_graph(ok.as_bytes()).unwrap().degree(1).unwrap(), 3);
    }
}
