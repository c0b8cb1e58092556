//! Complete colored digraphs and the structural operations on them.
//!
//! A [`Ccd`] stores a vertex color per vertex and an edge color per ordered
//! pair of distinct vertices. Color ids are always dense: the set of used
//! vertex colors is `0..k` and the set of used edge colors is `0..m`. Every
//! constructor renames ids order-preservingly to enforce this.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::OrderedPartition;
use crate::perm::Perm;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ccd {
    n: usize,
    vcolors: Vec<u32>,
    // row-major n*n; the diagonal is unused and kept at 0
    ecolors: Vec<u32>,
    num_vcolors: u32,
    num_ecolors: u32,
}

fn dense_rename(values: &mut [u32], skip_diag: Option<usize>) -> u32 {
    let used: BTreeSet<u32> = match skip_diag {
        Some(n) => values
            .iter()
            .enumerate()
            .filter(|(i, _)| i / n != i % n)
            .map(|(_, &c)| c)
            .collect(),
        None => values.iter().copied().collect(),
    };
    let ranks: Vec<u32> = used.iter().copied().collect();
    for (i, c) in values.iter_mut().enumerate() {
        if let Some(n) = skip_diag {
            if i / n == i % n {
                *c = 0;
                continue;
            }
        }
        *c = ranks.binary_search(c).unwrap() as u32;
    }
    ranks.len() as u32
}

impl Ccd {
    /// Builds a CCD from a vertex coloring and an edge coloring function on
    /// ordered pairs of distinct vertices.
    pub fn from_fn(vcolors: Vec<u32>, mut edge: impl FnMut(usize, usize) -> u32) -> Result<Ccd> {
        let n = vcolors.len();
        if n == 0 {
            return Err(Error::InvalidGraph("a CCD needs at least one vertex".into()));
        }
        let mut ecolors = vec![0; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    ecolors[u * n + v] = edge(u, v);
                }
            }
        }
        Ok(Ccd::from_raw(vcolors, ecolors))
    }

    pub(crate) fn from_raw(mut vcolors: Vec<u32>, mut ecolors: Vec<u32>) -> Ccd {
        let n = vcolors.len();
        debug_assert_eq!(ecolors.len(), n * n);
        let num_vcolors = dense_rename(&mut vcolors, None);
        let num_ecolors = dense_rename(&mut ecolors, Some(n));
        Ccd {
            n,
            vcolors,
            ecolors,
            num_vcolors,
            num_ecolors,
        }
    }

    /// Monochromatic CCD with edge color 1 on the listed arcs, 0 elsewhere.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Ccd> {
        let g = OrientedGraph::new(vec![0; n], arcs.to_vec())?;
        Ok(from_oriented(&g))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vcolor(&self, v: usize) -> u32 {
        self.vcolors[v]
    }

    #[inline]
    pub fn ecolor(&self, u: usize, v: usize) -> u32 {
        debug_assert_ne!(u, v);
        self.ecolors[u * self.n + v]
    }

    pub fn vcolors(&self) -> &[u32] {
        &self.vcolors
    }

    pub(crate) fn raw_ecolors(&self) -> &[u32] {
        &self.ecolors
    }

    pub fn num_vcolors(&self) -> u32 {
        self.num_vcolors
    }

    pub fn num_ecolors(&self) -> u32 {
        self.num_ecolors
    }

    /// Vertices of each vertex color, indexed by color id.
    pub fn color_classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_vcolors as usize];
        for v in 0..self.n {
            classes[self.vcolors[v] as usize].push(v);
        }
        classes
    }

    pub fn is_monochromatic(&self) -> bool {
        self.num_vcolors == 1
    }

    /// Relabels vertices: vertex `v` of `self` becomes `p(v)`.
    pub fn relabel(&self, p: &Perm) -> Ccd {
        let n = self.n;
        let inv = p.inverse();
        let vcolors = (0..n).map(|v| self.vcolors[inv.apply(v)]).collect();
        let mut ecolors = vec![0; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    ecolors[u * n + v] = self.ecolor(inv.apply(u), inv.apply(v));
                }
            }
        }
        Ccd {
            n,
            vcolors,
            ecolors,
            num_vcolors: self.num_vcolors,
            num_ecolors: self.num_ecolors,
        }
    }

    /// True when `p` preserves all vertex and edge colors.
    pub fn is_automorphism(&self, p: &Perm) -> bool {
        let n = self.n;
        p.degree() == n
            && (0..n).all(|v| self.vcolors[v] == self.vcolors[p.apply(v)])
            && (0..n).all(|u| {
                (0..n).all(|v| u == v || self.ecolor(u, v) == self.ecolor(p.apply(u), p.apply(v)))
            })
    }

    /// True when `p` is an isomorphism from `self` onto `other`.
    pub fn is_isomorphism_to(&self, other: &Ccd, p: &Perm) -> bool {
        let n = self.n;
        other.n == n
            && p.degree() == n
            && (0..n).all(|v| self.vcolors[v] == other.vcolors[p.apply(v)])
            && (0..n).all(|u| {
                (0..n).all(|v| u == v || self.ecolor(u, v) == other.ecolor(p.apply(u), p.apply(v)))
            })
    }

    /// Reorders vertices so that color classes are contiguous, in color order.
    pub fn class_sorted(&self) -> (Ccd, Perm) {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (self.vcolors[v], v));
        let mut images = vec![0; self.n];
        for (pos, &v) in order.iter().enumerate() {
            images[v] = pos;
        }
        let p = Perm::from_images_unchecked(images);
        (self.relabel(&p), p)
    }

    fn check_vertices(&self, set: &[usize]) -> Result<()> {
        for &v in set {
            if v >= self.n {
                return Err(Error::VertexOutOfRange(v, self.n));
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Ccd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ccd(n={}, vcolors={:?}, edges=[", self.n, self.vcolors)?;
        let mut first = true;
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v && self.ecolor(u, v) != 0 {
                    if !first {
                        write!(f, ", ")?;
                    }
                    first = false;
                    write!(f, "{u}->{v}:{}", self.ecolor(u, v))?;
                }
            }
        }
        write!(f, "])")
    }
}

/// A vertex-colored oriented graph: no loops and no 2-cycles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedGraph {
    pub vcolors: Vec<u32>,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl OrientedGraph {
    pub fn new(vcolors: Vec<u32>, arcs: Vec<(usize, usize)>) -> Result<OrientedGraph> {
        let n = vcolors.len();
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange(u.max(v), n));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            set.insert((u, v));
        }
        for &(u, v) in &set {
            if set.contains(&(v, u)) {
                return Err(Error::SymmetricArc(u.min(v), u.max(v)));
            }
        }
        Ok(OrientedGraph { vcolors, arcs: set })
    }

    pub fn n(&self) -> usize {
        self.vcolors.len()
    }
}

/// Edge color 1 on arcs, 0 on non-arcs.
pub fn from_oriented(g: &OrientedGraph) -> Ccd {
    let arcs = &g.arcs;
    Ccd::from_fn(g.vcolors.clone(), |u, v| arcs.contains(&(u, v)) as u32)
        .expect("oriented graph has at least one vertex")
}

pub fn to_oriented(g: &Ccd, arc_color: u32) -> Result<OrientedGraph> {
    let n = g.n();
    let mut arcs = BTreeSet::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && g.ecolor(u, v) == arc_color {
                if g.ecolor(v, u) == arc_color {
                    return Err(Error::SymmetricArc(u.min(v), u.max(v)));
                }
                arcs.insert((u, v));
            }
        }
    }
    Ok(OrientedGraph {
        vcolors: g.vcolors().to_vec(),
        arcs,
    })
}

/// `g[U]`; the returned vector maps new index `i` to the old vertex.
pub fn induced_subgraph(g: &Ccd, set: &[usize]) -> Result<(Ccd, Vec<usize>)> {
    if set.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    g.check_vertices(set)?;
    let mut map: Vec<usize> = set.to_vec();
    map.sort_unstable();
    map.dedup();
    let vcolors = map.iter().map(|&v| g.vcolor(v)).collect();
    let h = Ccd::from_fn(vcolors, |i, j| g.ecolor(map[i], map[j]))?;
    Ok((h, map))
}

/// The lexicographic product `d . dp`: vertex `(u, u')` is `u * |dp| + u'`.
pub fn wreath_product(d: &Ccd, dp: &Ccd) -> Ccd {
    let m = dp.n();
    let nvc = dp.num_vcolors();
    let offset = dp.num_ecolors();
    let vcolors = (0..d.n() * m)
        .map(|x| d.vcolor(x / m) * nvc + dp.vcolor(x % m))
        .collect();
    Ccd::from_fn(vcolors, |x, y| {
        let (u, up) = (x / m, x % m);
        let (v, vp) = (y / m, y % m);
        if u == v {
            dp.ecolor(up, vp)
        } else {
            offset + d.ecolor(u, v)
        }
    })
    .expect("product of nonempty graphs is nonempty")
}

/// `g □ h`: vertex colors of `h` are shifted past those of `g` and all
/// cross pairs get one fresh edge color.
pub fn color_disjoint_union(g: &Ccd, h: &Ccd) -> Ccd {
    let n = g.n();
    let vcolors = g
        .vcolors()
        .iter()
        .copied()
        .chain(h.vcolors().iter().map(|&c| c + g.num_vcolors()))
        .collect();
    let hoff = g.num_ecolors();
    let fresh = g.num_ecolors() + h.num_ecolors();
    Ccd::from_fn(vcolors, |u, v| match (u < n, v < n) {
        (true, true) => g.ecolor(u, v),
        (false, false) => hoff + h.ecolor(u - n, v - n),
        _ => fresh,
    })
    .expect("nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    Homogeneous,
    /// `alpha[i]` is the partner in `B` of the `i`-th vertex of `R`.
    Matching { alpha: Vec<(usize, usize)> },
    Other,
}

fn constant_on(g: &Ccd, pairs: impl IntoIterator<Item = (usize, usize)>) -> bool {
    let mut it = pairs.into_iter();
    match it.next() {
        None => true,
        Some((u, v)) => {
            let c = g.ecolor(u, v);
            it.all(|(x, y)| g.ecolor(x, y) == c)
        }
    }
}

pub fn connectivity_type(g: &Ccd, r: &[usize], b: &[usize]) -> Result<Connectivity> {
    if r.is_empty() || b.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    g.check_vertices(r)?;
    g.check_vertices(b)?;
    if let Some(&x) = r.iter().find(|x| b.contains(x)) {
        return Err(Error::Overlap(x));
    }
    let cross = |s: &[usize], t: &[usize]| {
        s.iter()
            .flat_map(|&x| t.iter().map(move |&y| (x, y)))
            .collect::<Vec<_>>()
    };
    if constant_on(g, cross(r, b)) && constant_on(g, cross(b, r)) {
        return Ok(Connectivity::Homogeneous);
    }
    if r.len() != b.len() {
        return Ok(Connectivity::Other);
    }
    // Any matching partner of r[0] determines alpha: each other r must be
    // the unique vertex of B whose pattern toward r equals the matched one.
    for &b0 in b {
        let (m_out, m_in) = (g.ecolor(r[0], b0), g.ecolor(b0, r[0]));
        let mut alpha = Vec::with_capacity(r.len());
        let mut used = vec![false; b.len()];
        let mut ok = true;
        for &x in r {
            let partners: Vec<usize> = (0..b.len())
                .filter(|&j| g.ecolor(x, b[j]) == m_out && g.ecolor(b[j], x) == m_in)
                .collect();
            if partners.len() != 1 || used[partners[0]] {
                ok = false;
                break;
            }
            used[partners[0]] = true;
            alpha.push((x, b[partners[0]]));
        }
        if !ok {
            continue;
        }
        let matched: BTreeSet<(usize, usize)> = alpha.iter().copied().collect();
        let off_rb: Vec<_> = cross(r, b)
            .into_iter()
            .filter(|p| !matched.contains(p))
            .collect();
        let off_br: Vec<_> = cross(b, r)
            .into_iter()
            .filter(|&(y, x)| !matched.contains(&(x, y)))
            .collect();
        if constant_on(g, off_rb) && constant_on(g, off_br) {
            return Ok(Connectivity::Matching { alpha });
        }
    }
    Ok(Connectivity::Other)
}

/// Refines the vertex coloring by the part indices of each partition.
pub fn refine_coloring(g: &Ccd, parts: &[OrderedPartition]) -> Result<Ccd> {
    for a in parts {
        if a.ground() != g.n() {
            return Err(Error::BadPartition(format!(
                "partition covers {} points, graph has {}",
                a.ground(),
                g.n()
            )));
        }
    }
    let idx: Vec<Vec<usize>> = parts.iter().map(|a| a.part_index()).collect();
    let keys: Vec<Vec<usize>> = (0..g.n())
        .map(|v| {
            std::iter::once(g.vcolor(v) as usize)
                .chain(idx.iter().map(|ix| ix[v]))
                .collect()
        })
        .collect();
    let mut distinct = keys.clone();
    distinct.sort();
    distinct.dedup();
    let vcolors = keys
        .iter()
        .map(|k| distinct.binary_search(k).unwrap() as u32)
        .collect();
    Ccd::from_fn(vcolors, |u, v| g.ecolor(u, v))
}

/// Replaces vertex colors, keeping edges.
pub fn with_vcolors(g: &Ccd, vcolors: Vec<u32>) -> Result<Ccd> {
    if vcolors.len() != g.n() {
        return Err(Error::InvalidGraph("vertex color vector has wrong length".into()));
    }
    Ccd::from_fn(vcolors, |u, v| g.ecolor(u, v))
}

/// The edgeless graph `E_n`.
pub fn edgeless(n: usize) -> Ccd {
    Ccd::from_fn(vec![0; n.max(1)], |_, _| 0).unwrap()
}

/// The directed cycle on `n >= 3` vertices.
pub fn directed_cycle(n: usize) -> Ccd {
    let arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ccd::from_arcs(n, &arcs).unwrap()
}
