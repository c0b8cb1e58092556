//! The classified ultrahomogeneous oriented graphs and a text syntax for
//! naming them.
//!
//! ```text
//! spec  := "union(" spec ("," spec)* ")" | atom
//! atom  := "H0" | "C3" | "C4" | "C(k=" int ")" | "E(n=" int ")"
//!        | "EnC3(n=" int ")" | "C3En(n=" int ")"
//!        | "chain(E;n=" int ",t=" int [";blow=" blows] ")"
//!        | "tri(t=" int [";blow=" blows] ")"
//!        | "c4ext(" ("diag" | "cycle") ")"
//! blows := blow ("+" blow)*
//! blow  := ("EnC3" | "C4" | "C3En") [":" int] "@" int
//! ```
//!
//! A blow annotation `X@i` replaces color class `i` (1-based) by the named
//! graph. On chains `EnC3` uses the chain's `n` and `C4` needs `n = 2`; on
//! triangle chains `C3En:m` blows a triangle up to `C3 . E_m`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::BlockSystem;
use crate::budget::Budget;
use crate::ccd::{color_disjoint_union, directed_cycle, edgeless, with_vcolors, wreath_product, Ccd};
use crate::error::{Error, Result};
use crate::moves::equivalence_key;
use crate::theory::{blow_up, BlowupSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChainBlow {
    EnC3,
    C4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum C4Join {
    /// Two outer vertices, each pointing to one diagonal of the 4-cycle.
    Diagonals,
    /// A second 4-cycle whose diagonals point to those of the first.
    Cycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FamilySpec {
    E(usize),
    Cycle(usize),
    H0,
    EnC3(usize),
    C3En(usize),
    /// `n` disjoint transitive tournaments on `t` vertices, vertex color =
    /// position in the tournament.
    MatchingChain {
        n: usize,
        t: usize,
        blow: Vec<(usize, ChainBlow)>,
    },
    /// `t` directed triangles pairwise joined by directed 6-cycles; blow
    /// entries are `(class, m)`.
    TriangleChain {
        t: usize,
        blow: Vec<(usize, usize)>,
    },
    C4Ext(C4Join),
    Union(Vec<FamilySpec>),
}

/// The 8-vertex sporadic graph, in/out-degree 3.
pub fn h0() -> Ccd {
    const ARCS: [(usize, usize); 24] = [
        (1, 2), (2, 5), (5, 6), (6, 1), (3, 4), (4, 7), (7, 8), (8, 3),
        (1, 8), (8, 5), (5, 4), (4, 1), (3, 2), (2, 7), (7, 6), (6, 3),
        (2, 8), (8, 6), (6, 4), (4, 2), (7, 1), (1, 3), (3, 5), (5, 7),
    ];
    let arcs: Vec<_> = ARCS.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    Ccd::from_arcs(8, &arcs).expect("valid arc list")
}

/// Vertex `(i, j)` with `i < n`, `j < t` is `j * n + i` and has color `j`.
pub fn matching_chain(n: usize, t: usize) -> Ccd {
    let vcolors = (0..n * t).map(|v| (v / n) as u32).collect();
    Ccd::from_fn(vcolors, |u, v| (u % n == v % n && u / n < v / n) as u32).expect("nonempty")
}

/// Vertex `(i, a)` is `3 * i + a` and has color `i`.
pub fn triangle_chain(t: usize) -> Ccd {
    let vcolors = (0..3 * t).map(|v| (v / 3) as u32).collect();
    Ccd::from_fn(vcolors, |u, v| {
        let (i, a, j, b) = (u / 3, u % 3, v / 3, v % 3);
        let arc = (i == j && b == (a + 1) % 3) || (i < j && b == (a + 1) % 3) || (i > j && a == b);
        arc as u32
    })
    .expect("nonempty")
}

pub fn c4_extension(side: C4Join) -> Ccd {
    let mut arcs = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
    let n = match side {
        C4Join::Diagonals => {
            arcs.extend([(4, 0), (4, 2), (5, 1), (5, 3)]);
            6
        }
        C4Join::Cycle => {
            arcs.extend([(4, 5), (5, 6), (6, 7), (7, 4)]);
            for i in 0..4 {
                for j in 0..4 {
                    if i % 2 == j % 2 {
                        arcs.push((4 + i, j));
                    }
                }
            }
            8
        }
    };
    let g = Ccd::from_arcs(n, &arcs).expect("valid arc list");
    with_vcolors(&g, (0..n).map(|v| (v >= 4) as u32).collect()).expect("same length")
}

fn illegal(msg: impl Into<String>) -> Error {
    Error::IllegalSpec(msg.into())
}

impl FamilySpec {
    pub fn num_vertices(&self) -> usize {
        match self {
            FamilySpec::E(n) | FamilySpec::Cycle(n) => *n,
            FamilySpec::H0 => 8,
            FamilySpec::EnC3(n) | FamilySpec::C3En(n) => 3 * n,
            FamilySpec::MatchingChain { n, t, blow } => {
                n * t + blow.iter().map(|b| if b.1 == ChainBlow::C4 { 2 } else { 2 * n }).sum::<usize>()
            }
            FamilySpec::TriangleChain { t, blow } => 3 * t + blow.iter().map(|&(_, m)| 3 * m - 3).sum::<usize>(),
            FamilySpec::C4Ext(C4Join::Diagonals) => 6,
            FamilySpec::C4Ext(C4Join::Cycle) => 8,
            FamilySpec::Union(parts) => parts.iter().map(FamilySpec::num_vertices).sum(),
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            FamilySpec::MatchingChain { t, .. } | FamilySpec::TriangleChain { t, .. } => *t,
            FamilySpec::C4Ext(_) => 2,
            FamilySpec::Union(parts) => parts.iter().map(FamilySpec::num_classes).sum(),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let blow_classes = |classes: Vec<usize>, t: usize| -> Result<()> {
            for (k, &c) in classes.iter().enumerate() {
                if c == 0 || c > t {
                    return Err(illegal(format!("blow-up of class {c}, but classes are 1..={t}")));
                }
                if classes[..k].contains(&c) {
                    return Err(illegal(format!("class {c} is blown up twice")));
                }
            }
            Ok(())
        };
        match self {
            FamilySpec::E(n) | FamilySpec::EnC3(n) | FamilySpec::C3En(n) if *n == 0 => {
                Err(illegal("parameters must be at least 1"))
            }
            FamilySpec::Cycle(k) if *k != 3 && *k != 4 => Err(illegal(format!(
                "C(k={k}): only the directed 3- and 4-cycles are ultrahomogeneous"
            ))),
            FamilySpec::MatchingChain { n, t, blow } => {
                if *n == 0 || *t == 0 {
                    return Err(illegal("parameters must be at least 1"));
                }
                blow_classes(blow.iter().map(|b| b.0).collect(), *t)?;
                if *n != 2 && blow.iter().any(|b| b.1 == ChainBlow::C4) {
                    return Err(illegal("a C4 blow-up needs classes of size 2 (n = 2)"));
                }
                Ok(())
            }
            FamilySpec::TriangleChain { t, blow } => {
                if *t == 0 {
                    return Err(illegal("parameters must be at least 1"));
                }
                blow_classes(blow.iter().map(|b| b.0).collect(), *t)?;
                if blow.iter().any(|b| b.1 < 2) {
                    return Err(illegal("triangles blow up to C3 . E_m with m >= 2"));
                }
                Ok(())
            }
            FamilySpec::Union(parts) => {
                if parts.is_empty() {
                    return Err(illegal("empty union"));
                }
                parts.iter().try_for_each(FamilySpec::validate)
            }
            _ => Ok(()),
        }
    }

    /// Sorted blow lists and flattened, sorted unions.
    pub fn normalized(&self) -> FamilySpec {
        match self {
            FamilySpec::MatchingChain { n, t, blow } => {
                let mut blow = blow.clone();
                blow.sort();
                FamilySpec::MatchingChain { n: *n, t: *t, blow }
            }
            FamilySpec::TriangleChain { t, blow } => {
                let mut blow = blow.clone();
                blow.sort();
                FamilySpec::TriangleChain { t: *t, blow }
            }
            FamilySpec::Union(parts) => {
                let mut flat = Vec::new();
                for p in parts {
                    match p.normalized() {
                        FamilySpec::Union(inner) => flat.extend(inner),
                        q => flat.push(q),
                    }
                }
                flat.sort();
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    FamilySpec::Union(flat)
                }
            }
            s => s.clone(),
        }
    }
}

fn blow_class(host: Ccd, class: u32, filler: Ccd, blocks: Vec<Vec<usize>>) -> Result<Ccd> {
    let budget = Budget::default();
    let sys = BlockSystem::new(filler.n(), blocks)?;
    let spec = BlowupSpec::new(host, class, filler, sys, &budget)?;
    Ok(blow_up(&spec, &budget)?.graph)
}

fn consecutive_blocks(count: usize, size: usize) -> Vec<Vec<usize>> {
    (0..count).map(|b| (b * size..(b + 1) * size).collect()).collect()
}

/// Realizes a legal spec as an oriented graph: arcs carry color 1. Color
/// classes are contiguous and numbered in the order the spec names them.
pub fn gen(spec: &FamilySpec) -> Result<Ccd> {
    spec.validate()?;
    let c3 = directed_cycle(3);
    let g = match spec {
        FamilySpec::E(n) => edgeless(*n),
        FamilySpec::Cycle(k) => directed_cycle(*k),
        FamilySpec::H0 => h0(),
        FamilySpec::EnC3(n) => wreath_product(&edgeless(*n), &c3),
        FamilySpec::C3En(n) => wreath_product(&c3, &edgeless(*n)),
        FamilySpec::MatchingChain { n, t, blow } => {
            let mut g = matching_chain(*n, *t);
            for &(class, kind) in blow {
                let (filler, blocks) = match kind {
                    ChainBlow::EnC3 => (wreath_product(&edgeless(*n), &c3), consecutive_blocks(*n, 3)),
                    ChainBlow::C4 => (directed_cycle(4), vec![vec![0, 2], vec![1, 3]]),
                };
                g = blow_class(g, class as u32 - 1, filler, blocks)?;
            }
            g
        }
        FamilySpec::TriangleChain { t, blow } => {
            let mut g = triangle_chain(*t);
            for &(class, m) in blow {
                let filler = wreath_product(&c3, &edgeless(m));
                g = blow_class(g, class as u32 - 1, filler, consecutive_blocks(3, m))?;
            }
            g
        }
        FamilySpec::C4Ext(side) => c4_extension(*side),
        FamilySpec::Union(parts) => {
            let mut it = parts.iter();
            let mut g = gen(it.next().expect("validated nonempty"))?;
            for p in it {
                g = color_disjoint_union(&g, &gen(p)?);
            }
            g
        }
    };
    Ok(oriented(&g.class_sorted().0))
}

// Every construction marks an arc by the larger of its two colors.
fn oriented(g: &Ccd) -> Ccd {
    Ccd::from_fn(g.vcolors().to_vec(), |u, v| (g.ecolor(u, v) > g.ecolor(v, u)) as u32).expect("nonempty")
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::E(n) => write!(f, "E(n={n})"),
            FamilySpec::Cycle(3) => write!(f, "C3"),
            FamilySpec::Cycle(4) => write!(f, "C4"),
            FamilySpec::Cycle(k) => write!(f, "C(k={k})"),
            FamilySpec::H0 => write!(f, "H0"),
            FamilySpec::EnC3(n) => write!(f, "EnC3(n={n})"),
            FamilySpec::C3En(n) => write!(f, "C3En(n={n})"),
            FamilySpec::MatchingChain { n, t, blow } => {
                write!(f, "chain(E;n={n},t={t}")?;
                if !blow.is_empty() {
                    let items: Vec<String> = blow
                        .iter()
                        .map(|(c, k)| match k {
                            ChainBlow::EnC3 => format!("EnC3@{c}"),
                            ChainBlow::C4 => format!("C4@{c}"),
                        })
                        .collect();
                    write!(f, ";blow={}", items.join("+"))?;
                }
                write!(f, ")")
            }
            FamilySpec::TriangleChain { t, blow } => {
                write!(f, "tri(t={t}")?;
                if !blow.is_empty() {
                    let items: Vec<String> = blow.iter().map(|(c, m)| format!("C3En:{m}@{c}")).collect();
                    write!(f, ";blow={}", items.join("+"))?;
                }
                write!(f, ")")
            }
            FamilySpec::C4Ext(C4Join::Diagonals) => write!(f, "c4ext(diag)"),
            FamilySpec::C4Ext(C4Join::Cycle) => write!(f, "c4ext(cycle)"),
            FamilySpec::Union(parts) => {
                let items: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "union({})", items.join(", "))
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::SpecSyntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a name");
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn int(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("number too large"))
    }

    fn param(&mut self, key: &str) -> Result<usize> {
        self.expect(key)?;
        self.expect("=")?;
        self.int()
    }

    fn spec(&mut self) -> Result<FamilySpec> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident()?;
        let spec = match name.as_str() {
            "H0" => FamilySpec::H0,
            "C3" => FamilySpec::Cycle(3),
            "C4" => FamilySpec::Cycle(4),
            "E" | "C" | "EnC3" | "C3En" => {
                self.expect("(")?;
                let v = self.param(if name == "C" { "k" } else { "n" })?;
                self.expect(")")?;
                match name.as_str() {
                    "E" => FamilySpec::E(v),
                    "C" => FamilySpec::Cycle(v),
                    "EnC3" => FamilySpec::EnC3(v),
                    _ => FamilySpec::C3En(v),
                }
            }
            "chain" => {
                self.expect("(")?;
                self.expect("E")?;
                self.expect(";")?;
                let n = self.param("n")?;
                self.expect(",")?;
                let t = self.param("t")?;
                let mut blow = Vec::new();
                for (kind, size, class) in self.blows()? {
                    let k = match kind.as_str() {
                        "EnC3" => ChainBlow::EnC3,
                        "C4" => ChainBlow::C4,
                        _ => return self.err(format!("`{kind}` cannot blow up a chain class")),
                    };
                    if size.is_some_and(|m| k == ChainBlow::EnC3 && m != n) {
                        return self.err("EnC3 on a chain uses the chain's n");
                    }
                    blow.push((class, k));
                }
                self.expect(")")?;
                FamilySpec::MatchingChain { n, t, blow }
            }
            "tri" => {
                self.expect("(")?;
                let t = self.param("t")?;
                let mut blow = Vec::new();
                for (kind, size, class) in self.blows()? {
                    if kind != "C3En" {
                        return self.err(format!("`{kind}` cannot blow up a triangle class"));
                    }
                    match size {
                        Some(m) => blow.push((class, m)),
                        None => return self.err("C3En on a triangle needs a size, as in C3En:2@1"),
                    }
                }
                self.expect(")")?;
                FamilySpec::TriangleChain { t, blow }
            }
            "c4ext" => {
                self.expect("(")?;
                let side = match self.ident()?.as_str() {
                    "diag" => C4Join::Diagonals,
                    "cycle" => C4Join::Cycle,
                    _ => return self.err("expected `diag` or `cycle`"),
                };
                self.expect(")")?;
                FamilySpec::C4Ext(side)
            }
            "union" => {
                self.expect("(")?;
                let mut parts = vec![self.spec()?];
                while self.eat(",") {
                    parts.push(self.spec()?);
                }
                self.expect(")")?;
                FamilySpec::Union(parts)
            }
            _ => {
                self.pos = start;
                return self.err(format!("unknown family `{name}`"));
            }
        };
        Ok(spec)
    }

    fn blows(&mut self) -> Result<Vec<(String, Option<usize>, usize)>> {
        let mut out = Vec::new();
        if !self.eat(";") {
            return Ok(out);
        }
        self.expect("blow")?;
        self.expect("=")?;
        loop {
            let kind = self.ident()?;
            let size = if self.eat(":") { Some(self.int()?) } else { None };
            self.expect("@")?;
            let class = self.int()?;
            out.push((kind, size, class));
            if !self.eat("+") {
                return Ok(out);
            }
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilySpec> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return p.err("trailing input");
        }
        Ok(spec)
    }
}

impl TryFrom<String> for FamilySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<FamilySpec> {
        s.parse()
    }
}

impl From<FamilySpec> for String {
    fn from(s: FamilySpec) -> String {
        s.to_string()
    }
}

/// Single-component specs up to `max_vertices`, simplest kinds first.
fn components(max_vertices: usize) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    let max = max_vertices;
    for n in 1..=max {
        out.push(FamilySpec::E(n));
    }
    for k in [3, 4] {
        if k <= max {
            out.push(FamilySpec::Cycle(k));
        }
    }
    if max >= 8 {
        out.push(FamilySpec::H0);
    }
    for n in 1..=max / 3 {
        out.push(FamilySpec::EnC3(n));
    }
    for n in 1..=max / 3 {
        out.push(FamilySpec::C3En(n));
    }
    for t in 2..=max {
        for n in 1..=max / t {
            // each class is plain, EnC3, or (n = 2) C4
            let kinds: &[Option<ChainBlow>] = if n == 2 {
                &[None, Some(ChainBlow::EnC3), Some(ChainBlow::C4)]
            } else {
                &[None, Some(ChainBlow::EnC3)]
            };
            let mut choice = vec![0usize; t];
            loop {
                let blow: Vec<(usize, ChainBlow)> = choice
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &c)| kinds[c].map(|k| (i + 1, k)))
                    .collect();
                let spec = FamilySpec::MatchingChain { n, t, blow };
                if spec.num_vertices() <= max {
                    out.push(spec);
                }
                let mut i = 0;
                while i < t && choice[i] + 1 == kinds.len() {
                    choice[i] = 0;
                    i += 1;
                }
                if i == t {
                    break;
                }
                choice[i] += 1;
            }
        }
    }
    for t in 2..=max / 3 {
        let spare = max - 3 * t;
        let mut blows: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for class in 1..=t {
            let mut next = Vec::new();
            for b in &blows {
                next.push(b.clone());
                let used: usize = b.iter().map(|&(_, m)| 3 * m - 3).sum();
                let mut m = 2;
                while used + 3 * m - 3 <= spare {
                    let mut c = b.clone();
                    c.push((class, m));
                    next.push(c);
                    m += 1;
                }
            }
            blows = next;
        }
        for blow in blows {
            out.push(FamilySpec::TriangleChain { t, blow });
        }
    }
    if max >= 6 {
        out.push(FamilySpec::C4Ext(C4Join::Diagonals));
    }
    if max >= 8 {
        out.push(FamilySpec::C4Ext(C4Join::Cycle));
    }
    out
}

/// Single-component specs with exactly `vertices` vertices and `classes`
/// color classes whose classes are pairwise non-homogeneously connected.
pub fn component_specs(vertices: usize, classes: usize) -> Vec<FamilySpec> {
    components(vertices)
        .into_iter()
        .filter(|s| s.num_vertices() == vertices && s.num_classes() == classes)
        .filter(|s| !matches!(s, FamilySpec::MatchingChain { n: 1, .. }))
        .collect()
}

fn multisets(items: &[(FamilySpec, usize)], from: usize, room: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() >= 2 {
        out.push(cur.clone());
    }
    for i in from..items.len() {
        if items[i].1 <= room {
            cur.push(i);
            multisets(items, i, room - items[i].1, cur, out);
            cur.pop();
        }
    }
}

/// Every legal spec realizing at most `max_vertices` vertices, one per
/// `~_c` class: components first, then unions of two or more components.
pub fn enumerate_specs(max_vertices: usize) -> Result<Vec<FamilySpec>> {
    let mut seen = std::collections::HashSet::new();
    let mut comps: Vec<(FamilySpec, usize)> = Vec::new();
    for s in components(max_vertices) {
        if seen.insert(equivalence_key(&gen(&s)?)?) {
            let size = s.num_vertices();
            comps.push((s, size));
        }
    }
    let mut out: Vec<FamilySpec> = comps.iter().map(|c| c.0.clone()).collect();
    let mut picks = Vec::new();
    multisets(&comps, 0, max_vertices, &mut Vec::new(), &mut picks);
    picks.sort_by_key(|p| (p.len(), p.clone()));
    for p in picks {
        let spec = FamilySpec::Union(p.iter().map(|&i| comps[i].0.clone()).collect());
        if seen.insert(equivalence_key(&gen(&spec)?)?) {
            out.push(spec);
        }
    }
    Ok(out)
}

/// A random legal spec with at most `max_vertices >= 1` vertices.
pub fn random_spec<R: Rng>(rng: &mut R, max_vertices: usize) -> FamilySpec {
    let max = max_vertices.max(1);
    let mut parts = Vec::new();
    let mut room = max;
    let count = rng.gen_range(1..=3);
    while parts.len() < count && room > 0 {
        let c = random_component(rng, room);
        room -= c.num_vertices();
        parts.push(c);
    }
    FamilySpec::Union(parts).normalized()
}

fn random_component<R: Rng>(rng: &mut R, room: usize) -> FamilySpec {
    loop {
        let spec = match rng.gen_range(0..9) {
            0 => FamilySpec::E(rng.gen_range(1..=room)),
            1 => FamilySpec::Cycle(rng.gen_range(3..=4)),
            2 => FamilySpec::H0,
            3 => FamilySpec::EnC3(rng.gen_range(1..=4)),
            4 => FamilySpec::C3En(rng.gen_range(1..=4)),
            5 | 6 => {
                let n = rng.gen_range(1..=3);
                let t = rng.gen_range(2..=4);
                let blow = (1..=t)
                    .filter_map(|c| match rng.gen_range(0..4) {
                        0 => Some((c, ChainBlow::EnC3)),
                        1 if n == 2 => Some((c, ChainBlow::C4)),
                        _ => None,
                    })
                    .collect();
                FamilySpec::MatchingChain { n, t, blow }
            }
            7 => {
                let t = rng.gen_range(2..=3);
                let blow = (1..=t)
                    .filter_map(|c| rng.gen_bool(0.3).then(|| (c, rng.gen_range(2..=3))))
                    .collect();
                FamilySpec::TriangleChain { t, blow }
            }
            _ => FamilySpec::C4Ext(if rng.gen_bool(0.5) { C4Join::Diagonals } else { C4Join::Cycle }),
        };
        if spec.num_vertices() <= room {
            return spec;
        }
    }
}
