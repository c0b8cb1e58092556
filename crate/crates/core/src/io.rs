//! JSON and DOT formats for graphs.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::ccd::Ccd;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    edges: Vec<(usize, usize, u32)>,
    n: usize,
    vcolors: Vec<u32>,
}

fn repr(g: &Ccd) -> GraphJson {
    let n = g.n();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && g.ecolor(u, v) != 0 {
                edges.push((u, v, g.ecolor(u, v)));
            }
        }
    }
    GraphJson {
        edges,
        n,
        vcolors: g.vcolors().to_vec(),
    }
}

/// Compact JSON with keys in sorted order; only nonzero edge colors listed.
pub fn to_json(g: &Ccd) -> String {
    serde_json::to_string(&repr(g)).expect("graph serializes")
}

pub fn to_json_value(g: &Ccd) -> serde_json::Value {
    serde_json::to_value(repr(g)).expect("graph serializes")
}

pub fn from_json_value(v: serde_json::Value) -> Result<Ccd> {
    let r: GraphJson = serde_json::from_value(v)?;
    build(r)
}

/// Parses the JSON graph format; colors are renamed densely.
pub fn from_json(s: &str) -> Result<Ccd> {
    let r: GraphJson = serde_json::from_str(s)?;
    build(r)
}

fn build(r: GraphJson) -> Result<Ccd> {
    if r.vcolors.len() != r.n {
        return Err(Error::InvalidGraph(format!(
            "n is {} but {} vertex colors given",
            r.n,
            r.vcolors.len()
        )));
    }
    let n = r.n;
    let mut e = vec![0u32; n * n];
    let mut set = vec![false; n * n];
    for (u, v, c) in r.edges {
        if u >= n || v >= n {
            return Err(Error::VertexOutOfRange(u.max(v), n));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
        }
        if set[u * n + v] {
            return Err(Error::InvalidGraph(format!("pair ({u}, {v}) listed twice")));
        }
        set[u * n + v] = true;
        e[u * n + v] = c;
    }
    Ccd::from_fn(r.vcolors, |u, v| e[u * n + v])
}

impl Serialize for Ccd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        repr(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ccd {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Ccd, D::Error> {
        build(GraphJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

const PALETTE: [&str; 10] = [
    "red", "lightblue", "gold", "orange", "palegreen", "plum", "gray", "pink", "cyan", "tan",
];

/// DOT digraph: one arc per pair carrying a nonzero color in one direction,
/// one undirected edge where both directions carry the same nonzero color.
pub fn to_dot(g: &Ccd) -> String {
    let n = g.n();
    let labels = g.num_ecolors() > 2;
    let mut s = String::from("digraph G {\n  node [style=filled];\n");
    for v in 0..n {
        let c = g.vcolor(v) as usize;
        writeln!(s, "  {v} [fillcolor={}, label=\"{v}\"];", PALETTE[c % PALETTE.len()]).unwrap();
    }
    let edge = |s: &mut String, u: usize, v: usize, c: u32, undirected: bool| {
        let mut attrs = Vec::new();
        if undirected {
            attrs.push("dir=none".to_string());
        }
        if labels {
            attrs.push(format!("label=\"{c}\""));
        }
        if attrs.is_empty() {
            writeln!(s, "  {u} -> {v};").unwrap();
        } else {
            writeln!(s, "  {u} -> {v} [{}];", attrs.join(", ")).unwrap();
        }
    };
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (g.ecolor(u, v), g.ecolor(v, u));
            if a == b && a != 0 {
                edge(&mut s, u, v, a, true);
                continue;
            }
            if a != 0 {
                edge(&mut s, u, v, a, false);
            }
            if b != 0 {
                edge(&mut s, v, u, b, false);
            }
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccd::directed_cycle;

    #[test]
    fn json_round_trip_is_exact() {
        let g = directed_cycle(3);
        let s = to_json(&g);
        assert_eq!(s, r#"{"edges":[[0,1,1],[1,2,1],[2,0,1]],"n":3,"vcolors":[0,0,0]}"#);
        assert_eq!(from_json(&s).unwrap(), g);
        assert_eq!(to_json(&from_json(&s).unwrap()), s);
    }

    #[test]
    fn json_errors() {
        assert!(matches!(from_json("{\"n\":2"), Err(Error::Json { .. })));
        assert!(from_json(r#"{"edges":[[0,0,1]],"n":2,"vcolors":[0,0]}"#).is_err());
        assert!(from_json(r#"{"edges":[[0,5,1]],"n":2,"vcolors":[0,0]}"#).is_err());
        assert!(from_json(r#"{"edges":[],"n":2,"vcolors":[0]}"#).is_err());
    }

    #[test]
    fn dot_has_one_edge_per_arc() {
        let d = to_dot(&directed_cycle(4));
        assert_eq!(d.matches("->").count(), 4);
        assert!(d.contains("0 -> 1;"));
        assert!(d.contains("3 -> 0;"));
    }
}
