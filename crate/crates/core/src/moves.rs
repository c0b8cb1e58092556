//! Color changes, bichromatic symmetrization and equivalence up to them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::autiso::isomorphic_names_free;
use crate::ccd::Ccd;
use crate::error::{Error, Result};
use crate::perm::Perm;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColorMove {
    /// `map[old] = new`; must be injective on the colors in use.
    VertexColorChange { map: Vec<u32> },
    EdgeColorChange { map: Vec<u32> },
    /// Pairs `(u, v)` with `u` colored `b`, `v` colored `r`, `zeta(u, v) = d`
    /// and `zeta(v, u) = c` get `zeta(u, v) = c`.
    Symmetrize { c: u32, d: u32, r: u32, b: u32 },
    /// Pairs `(u, v)` with `u` colored `b`, `v` colored `r` and both
    /// directions colored `c` get `zeta(u, v) = d`. `d` may be a fresh color.
    InverseSymmetrize { c: u32, d: u32, r: u32, b: u32 },
}

fn check_injective(map: &[u32], used: u32, what: &str) -> Result<()> {
    if map.len() < used as usize {
        return Err(Error::InvalidMove(format!(
            "{what} map covers {} colors, graph uses {used}",
            map.len()
        )));
    }
    let mut seen = map[..used as usize].to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidMove(format!("{what} map is not injective")));
    }
    Ok(())
}

fn check_sym_params(g: &Ccd, r: u32, b: u32, c: u32) -> Result<()> {
    if r == b {
        return Err(Error::InvalidMove("vertex colors r and b must differ".into()));
    }
    for x in [r, b] {
        if x >= g.num_vcolors() {
            return Err(Error::InvalidMove(format!("vertex color {x} not present")));
        }
    }
    if c >= g.num_ecolors() {
        return Err(Error::InvalidMove(format!("edge color {c} not present")));
    }
    Ok(())
}

// ordered pairs (u, v) with u colored b and v colored r
fn slot_pairs(g: &Ccd, r: u32, b: u32) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = g.n();
    (0..n)
        .filter(move |&u| g.vcolor(u) == b)
        .flat_map(move |u| (0..n).filter(move |&v| g.vcolor(v) == r).map(move |v| (u, v)))
}

pub fn apply_move(g: &Ccd, m: &ColorMove) -> Result<Ccd> {
    let n = g.n();
    match m {
        ColorMove::VertexColorChange { map } => {
            check_injective(map, g.num_vcolors(), "vertex color")?;
            let vc = g.vcolors().iter().map(|&c| map[c as usize]).collect();
            Ccd::from_fn(vc, |u, v| g.ecolor(u, v))
        }
        ColorMove::EdgeColorChange { map } => {
            check_injective(map, g.num_ecolors(), "edge color")?;
            Ccd::from_fn(g.vcolors().to_vec(), |u, v| map[g.ecolor(u, v) as usize])
        }
        &ColorMove::Symmetrize { c, d, r, b } => {
            check_sym_params(g, r, b, c)?;
            if d >= g.num_ecolors() || c == d {
                return Err(Error::InvalidMove(format!("edge color {d} not present or equal to c")));
            }
            if slot_pairs(g, r, b).any(|(u, v)| g.ecolor(u, v) == c && g.ecolor(v, u) == c) {
                return Err(Error::InvalidMove(
                    "slot already has pairs colored c both ways; the move would not be invertible".into(),
                ));
            }
            let mut e: Vec<u32> = g.raw_ecolors().to_vec();
            for (u, v) in slot_pairs(g, r, b) {
                if g.ecolor(u, v) == d && g.ecolor(v, u) == c {
                    e[u * n + v] = c;
                }
            }
            Ok(Ccd::from_raw(g.vcolors().to_vec(), e))
        }
        &ColorMove::InverseSymmetrize { c, d, r, b } => {
            check_sym_params(g, r, b, c)?;
            if c == d {
                return Err(Error::InvalidMove("edge colors c and d must differ".into()));
            }
            if slot_pairs(g, r, b).any(|(u, v)| g.ecolor(u, v) == d && g.ecolor(v, u) == c) {
                return Err(Error::InvalidMove(
                    "slot already has pairs colored d toward r and c back; the move would not be invertible"
                        .into(),
                ));
            }
            let mut e: Vec<u32> = g.raw_ecolors().to_vec();
            for (u, v) in slot_pairs(g, r, b) {
                if g.ecolor(u, v) == c && g.ecolor(v, u) == c {
                    e[u * n + v] = d;
                }
            }
            Ok(Ccd::from_raw(g.vcolors().to_vec(), e))
        }
    }
}

pub fn apply_moves(g: &Ccd, moves: &[ColorMove]) -> Result<Ccd> {
    moves.iter().try_fold(g.clone(), |h, m| apply_move(&h, m))
}

// permutation undoing a dense renaming `raw -> rank`
fn unrank(map: &[u32]) -> Vec<u32> {
    let (ranked, _) = crate::partition::dense_ranks(map);
    let mut inv = vec![0; map.len()];
    for (old, &new) in ranked.iter().enumerate() {
        inv[new as usize] = old as u32;
    }
    inv
}

/// Moves that, applied to `apply_move(g, m)`, give back `g` exactly.
pub fn inverse(g: &Ccd, m: &ColorMove) -> Result<Vec<ColorMove>> {
    let h = apply_move(g, m)?;
    let moves = match m {
        ColorMove::VertexColorChange { map } => vec![ColorMove::VertexColorChange {
            map: unrank(&map[..g.num_vcolors() as usize]),
        }],
        ColorMove::EdgeColorChange { map } => vec![ColorMove::EdgeColorChange {
            map: unrank(&map[..g.num_ecolors() as usize]),
        }],
        &ColorMove::Symmetrize { c, d, r, b } => {
            if h.num_ecolors() == g.num_ecolors() {
                vec![ColorMove::InverseSymmetrize { c, d, r, b }]
            } else {
                // d vanished and the colors above it moved down by one
                let ch = if c > d { c - 1 } else { c };
                let top = h.num_ecolors();
                let map = (0..=top)
                    .map(|x| if x == top { d } else if x >= d { x + 1 } else { x })
                    .collect();
                vec![
                    ColorMove::InverseSymmetrize { c: ch, d: top, r, b },
                    ColorMove::EdgeColorChange { map },
                ]
            }
        }
        &ColorMove::InverseSymmetrize { c, d, r, b } => {
            if h == *g {
                Vec::new()
            } else if d < g.num_ecolors() {
                vec![ColorMove::Symmetrize { c, d, r, b }]
            } else {
                vec![ColorMove::Symmetrize {
                    c,
                    d: g.num_ecolors(),
                    r,
                    b,
                }]
            }
        }
    };
    debug_assert_eq!(apply_moves(&h, &moves).as_ref(), Ok(g));
    Ok(moves)
}

/// Slot-local recoding: every pair gets a token that depends only on its
/// color class pair and on the colors it carries within that slot. Pairs
/// across two classes get one symmetric token per pattern of colors.
pub fn normal_form(g: &Ccd) -> Ccd {
    let n = g.n();
    let mut keys: BTreeMap<(u32, u32, u32, u32), u32> = BTreeMap::new();
    let key = |u: usize, v: usize| {
        let (a, b) = (g.vcolor(u), g.vcolor(v));
        if a == b {
            (a, a, g.ecolor(u, v), u32::MAX)
        } else if a < b {
            (a, b, g.ecolor(u, v), g.ecolor(v, u))
        } else {
            (b, a, g.ecolor(v, u), g.ecolor(u, v))
        }
    };
    for u in 0..n {
        for v in 0..n {
            if u != v {
                keys.insert(key(u, v), 0);
            }
        }
    }
    for (i, val) in keys.values_mut().enumerate() {
        *val = i as u32;
    }
    Ccd::from_fn(g.vcolors().to_vec(), |u, v| keys[&key(u, v)]).expect("nonempty")
}

/// A recoding of `g` into `h`: relabel vertices by `iso`, rename vertex
/// colors, and within each slot replace each color pattern by another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub iso: Perm,
    pub vertex_colors: Vec<u32>,
    pub slots: Vec<SlotRecoding>,
}

/// Patterns `(zeta(u, v), zeta(v, u))` read with `u` in the first class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRecoding {
    pub classes: (u32, u32),
    pub patterns: Vec<((u32, u32), (u32, u32))>,
}

impl Equivalence {
    /// The recoding of `g` into `h` along `iso`, if each slot pattern of `g`
    /// is sent to a single pattern of `h`.
    pub fn derive(g: &Ccd, h: &Ccd, iso: Perm) -> Option<Equivalence> {
        let n = g.n();
        let mut vertex_colors = vec![u32::MAX; g.num_vcolors() as usize];
        for v in 0..n {
            let (a, b) = (g.vcolor(v), h.vcolor(iso.apply(v)));
            if vertex_colors[a as usize] != u32::MAX && vertex_colors[a as usize] != b {
                return None;
            }
            vertex_colors[a as usize] = b;
        }
        let mut slots: BTreeMap<(u32, u32), BTreeMap<(u32, u32), (u32, u32)>> = BTreeMap::new();
        for u in 0..n {
            for v in 0..n {
                if u == v || g.vcolor(u) > g.vcolor(v) {
                    continue;
                }
                let from = (g.ecolor(u, v), g.ecolor(v, u));
                let to = (
                    h.ecolor(iso.apply(u), iso.apply(v)),
                    h.ecolor(iso.apply(v), iso.apply(u)),
                );
                let slot = slots.entry((g.vcolor(u), g.vcolor(v))).or_default();
                if *slot.entry(from).or_insert(to) != to {
                    return None;
                }
            }
        }
        let e = Equivalence {
            iso,
            vertex_colors,
            slots: slots
                .into_iter()
                .map(|(classes, m)| SlotRecoding {
                    classes,
                    patterns: m.into_iter().collect(),
                })
                .collect(),
        };
        (e.apply(g).ok().as_ref() == Some(h)).then_some(e)
    }

    /// Recodes `g`; gives `h` when this witnesses `g ~ h`.
    pub fn apply(&self, g: &Ccd) -> Result<Ccd> {
        let n = g.n();
        if self.iso.degree() != n {
            return Err(Error::InvalidMove("witness has the wrong degree".into()));
        }
        let maps: BTreeMap<(u32, u32), BTreeMap<(u32, u32), (u32, u32)>> = self
            .slots
            .iter()
            .map(|s| (s.classes, s.patterns.iter().copied().collect()))
            .collect();
        let inv = self.iso.inverse();
        let mut vc = vec![0; n];
        for x in 0..n {
            let c = g.vcolor(inv.apply(x)) as usize;
            vc[x] = *self
                .vertex_colors
                .get(c)
                .ok_or_else(|| Error::InvalidMove("vertex color map too short".into()))?;
        }
        let lookup = |u: usize, v: usize| -> Result<u32> {
            let (a, b) = (g.vcolor(u), g.vcolor(v));
            let (x, y, forward) = if a <= b { (u, v, true) } else { (v, u, false) };
            let pat = (g.ecolor(x, y), g.ecolor(y, x));
            let to = maps
                .get(&(a.min(b), a.max(b)))
                .and_then(|m| m.get(&pat))
                .ok_or_else(|| Error::InvalidMove(format!("no pattern for pair ({u}, {v})")))?;
            Ok(if forward { to.0 } else { to.1 })
        };
        let mut e = vec![0u32; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    e[self.iso.apply(u) * n + self.iso.apply(v)] = lookup(u, v)?;
                }
            }
        }
        Ok(Ccd::from_raw(vc, e))
    }
}

/// A witness of equivalence up to color changes and bichromatic
/// symmetrization, or `None`.
pub fn equivalent_up_to_colors(g: &Ccd, h: &Ccd) -> Option<Equivalence> {
    if g.n() != h.n() || g.num_vcolors() != h.num_vcolors() {
        return None;
    }
    let iso = isomorphic_names_free(&normal_form(g), &normal_form(h))?;
    let e = Equivalence::derive(g, h, iso);
    debug_assert!(e.is_some());
    e
}

/// Key equal for two graphs iff they are equivalent.
pub fn equivalence_key(g: &Ccd) -> Result<Vec<u8>> {
    let c = crate::autiso::canonical_form_with(&normal_form(g), true, &crate::Budget::unlimited())?;
    Ok(crate::io::to_json(&c.graph).into_bytes())
}
