//! Line-oriented text format:
//!
//! ```text
//! # comment
//! mgraph <n>
//! e <u> <v> <mult>
//! l <v> <mult>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use super::Multigraph;
use crate::error::{Error, Result};

pub fn parse_graph(text: &str) -> Result<Multigraph> {
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut n: Option<usize> = None;
    let mut edges = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|_| err(line_no, format!("expected a nonnegative integer, got {s:?}")))
        };
        let Some(n) = n else {
            match fields.as_slice() {
                ["mgraph", count] => {
                    let count = num(count)? as usize;
                    if count == 0 {
                        return Err(err(line_no, "graph needs at least one vertex".into()));
                    }
                    n = Some(count);
                    continue;
                }
                _ => return Err(err(line_no, "expected header \"mgraph <n>\"".into())),
            }
        };
        let (u, v, m) = match fields.as_slice() {
            ["e", u, v, m] => {
                let (u, v) = (num(u)? as usize, num(v)? as usize);
                if u == v {
                    return Err(err(line_no, format!("loop at {u} must use an \"l\" line")));
                }
                (u, v, num(m)?)
            }
            ["l", v, m] => {
                let v = num(v)? as usize;
                (v, v, num(m)?)
            }
            _ => return Err(err(line_no, format!("malformed line {line:?}"))),
        };
        if u >= n || v >= n {
            return Err(err(line_no, format!("vertex id {} >= n = {n}", u.max(v))));
        }
        if m == 0 {
            return Err(err(line_no, "multiplicity must be positive".into()));
        }
        let key = (u.min(v), u.max(v));
        if edges.insert(key, m).is_some() {
            return Err(err(line_no, format!("duplicate entry for pair {key:?}")));
        }
    }
    let n = n.ok_or_else(|| err(0, "missing \"mgraph <n>\" header".into()))?;
    Multigraph::from_edge_map(n, edges)
}

/// Canonical form: header, then one line per pair in lexicographic order.
pub fn serialize_graph(g: &Multigraph) -> String {
    let mut out = format!("mgraph {}\n", g.n());
    for (u, v, m) in g.edges() {
        if u == v {
            writeln!(out, "l {u} {m}").unwrap();
        } else {
            writeln!(out, "e {u} {v} {m}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_connected_graph() {
        let g = parse_graph("mgraph 2\ne 0 1 1").unwrap();
        assert_eq!(g.degrees(), &[1, 1]);
    }

    #[test]
    fn single_loop() {
        let g = parse_graph("mgraph 1\nl 0 3").unwrap();
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.loop_mult(0), 3);
    }

    #[test]
    fn multipath_degrees() {
        let g = parse_graph("# a multipath\nmgraph 3\ne 0 1 2\ne 1 2 2\n").unwrap();
        assert_eq!(g.degrees(), &[2, 4, 2]);
    }

    fn line_of(text: &str) -> usize {
        match parse_graph(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(line_of("mgraph 2\ne 0 2 1"), 2);
        assert_eq!(line_of("mgraph 2\n\ne 0 1 0"), 3);
        assert_eq!(line_of("mgraph 3\ne 0 1 1\ne 1 0 2"), 3);
        assert_eq!(line_of("mgraph 2\nx 0 1"), 2);
        assert_eq!(line_of("e 0 1 1"), 1);
        assert_eq!(line_of("mgraph 2\ne 0 1 -1"), 2);
        assert_eq!(line_of("mgraph 2\ne 1 1 1"), 2);
    }

    #[test]
    fn canonical_round_trip() {
        let text = "mgraph 4\ne 0 1 2\nl 1 1\ne 1 3 1\ne 2 3 5\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(serialize_graph(&g), text);
    }
}
