//! Automorphism groups, isomorphisms, partial isomorphisms and canonical
//! forms by individualization and refinement.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::ccd::Ccd;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::refine::{Mode, State};

/// A map between two equally long vertex lists of one graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialIso {
    pub domain: Vec<usize>,
    pub images: Vec<usize>,
}

impl PartialIso {
    pub fn new(domain: Vec<usize>, images: Vec<usize>) -> PartialIso {
        PartialIso { domain, images }
    }

    pub fn empty() -> PartialIso {
        PartialIso::new(Vec::new(), Vec::new())
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Checks that the map is injective and preserves every color of `g`.
    pub fn validate(&self, g: &Ccd) -> Result<()> {
        let n = g.n();
        if self.domain.len() != self.images.len() {
            return Err(Error::BadPartialMap("domain and image lengths differ".into()));
        }
        let mut seen_d = vec![false; n];
        let mut seen_i = vec![false; n];
        for (&u, &w) in self.domain.iter().zip(&self.images) {
            if u >= n || w >= n {
                return Err(Error::VertexOutOfRange(u.max(w), n));
            }
            if seen_d[u] || seen_i[w] {
                return Err(Error::BadPartialMap(format!("vertex repeated at {u} -> {w}")));
            }
            seen_d[u] = true;
            seen_i[w] = true;
            if g.vcolor(u) != g.vcolor(w) {
                return Err(Error::VertexColorViolation(u, w));
            }
        }
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j {
                    let (u, v) = (self.domain[i], self.domain[j]);
                    if g.ecolor(u, v) != g.ecolor(self.images[i], self.images[j]) {
                        return Err(Error::EdgeColorViolation(u, v));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when `p` agrees with the map on its domain.
    pub fn is_extended_by(&self, p: &Perm) -> bool {
        self.domain.iter().zip(&self.images).all(|(&u, &w)| p.apply(u) == w)
    }
}

fn is_names_free_iso(g: &Ccd, h: &Ccd, p: &Perm) -> bool {
    let n = g.n();
    let mut vmap = vec![u32::MAX; g.num_vcolors() as usize];
    let mut vinv = vec![u32::MAX; h.num_vcolors() as usize];
    for v in 0..n {
        let (a, b) = (g.vcolor(v), h.vcolor(p.apply(v)));
        if vmap[a as usize] == u32::MAX && vinv[b as usize] == u32::MAX {
            vmap[a as usize] = b;
            vinv[b as usize] = a;
        } else if vmap[a as usize] != b || vinv[b as usize] != a {
            return false;
        }
    }
    let mut emap = vec![u32::MAX; g.num_ecolors() as usize];
    let mut einv = vec![u32::MAX; h.num_ecolors() as usize];
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let (a, b) = (g.ecolor(u, v), h.ecolor(p.apply(u), p.apply(v)));
            if emap[a as usize] == u32::MAX && einv[b as usize] == u32::MAX {
                emap[a as usize] = b;
                einv[b as usize] = a;
            } else if emap[a as usize] != b || einv[b as usize] != a {
                return false;
            }
        }
    }
    true
}

pub(crate) struct Side<'a> {
    pub g: &'a Ccd,
    pub labels: &'a [u32],
}

/// Depth-first search for an isomorphism between two refined states whose
/// traces agree, verifying at discrete leaves.
pub(crate) fn search_iso(a: &Side, sa: &State, b: &Side, sb: &State, mode: Mode) -> Option<Perm> {
    if sa.trace != sb.trace || sa.ncells != sb.ncells {
        return None;
    }
    let n = a.g.n();
    if sa.is_discrete() {
        if !sb.is_discrete() {
            return None;
        }
        let mut pos = vec![0; n];
        for w in 0..n {
            pos[sb.cells[w] as usize] = w;
        }
        let p = Perm::from_images_unchecked((0..n).map(|v| pos[sa.cells[v] as usize]).collect());
        let labels_ok = (0..n).all(|v| a.labels[v] == b.labels[p.apply(v)]);
        let ok = labels_ok
            && match mode {
                Mode::Named => a.g.is_isomorphism_to(b.g, &p),
                Mode::NamesFree => is_names_free_iso(a.g, b.g, &p),
            };
        return ok.then_some(p);
    }
    let (id, cell) = sa.target_cell()?;
    let x = cell[0];
    let ca = sa.individualize(a.g, mode, x);
    for y in (0..n).filter(|&y| sb.cells[y] == id) {
        let cb = sb.individualize(b.g, mode, y);
        if let Some(p) = search_iso(a, &ca, b, &cb, mode) {
            return Some(p);
        }
    }
    None
}

fn orbit_labels(n: usize, gens: &[Perm]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = g.apply(x);
                if label[y] == usize::MAX {
                    label[y] = s;
                    stack.push(y);
                }
            }
        }
    }
    label
}

/// Automorphisms preserving `labels` as well as all colors.
pub(crate) fn aut_with_labels(g: &Ccd, labels: &[u32]) -> PermGroup {
    aut_in_mode(g, labels, Mode::Named)
}

// In names-free mode: permutations that map `g` onto itself after some
// renaming of the colors.
fn aut_in_mode(g: &Ccd, labels: &[u32], mode: Mode) -> PermGroup {
    let n = g.n();
    let side = Side { g, labels };
    let mut path = vec![State::new(g, mode, Some(labels))];
    let mut base = Vec::new();
    let mut cells = Vec::new();
    while let Some((_, cell)) = path.last().unwrap().target_cell() {
        let x = cell[0];
        base.push(x);
        cells.push(cell);
        let next = path.last().unwrap().individualize(g, mode, x);
        path.push(next);
    }
    let mut gens: Vec<Perm> = Vec::new();
    for i in (0..base.len()).rev() {
        let mut orb = orbit_labels(n, &gens);
        let mut rejected: Vec<usize> = Vec::new();
        for &w in &cells[i] {
            if orb[w] == orb[base[i]] || rejected.iter().any(|&r| orb[r] == orb[w]) {
                continue;
            }
            let sw = path[i].individualize(g, mode, w);
            match search_iso(&side, &path[i + 1], &side, &sw, mode) {
                Some(p) => {
                    debug_assert!(p.fixes_all(&base[..i]) && p.apply(base[i]) == w);
                    gens.push(p);
                    orb = orbit_labels(n, &gens);
                }
                None => rejected.push(w),
            }
        }
    }
    PermGroup::new(n, gens).expect("automorphisms have the graph's degree")
}

pub fn automorphism_group(g: &Ccd) -> Result<PermGroup> {
    automorphism_group_with(g, &Budget::default())
}

pub fn automorphism_group_with(g: &Ccd, budget: &Budget) -> Result<PermGroup> {
    Budget::check("vertices for automorphism search", g.n(), budget.aut_max_n)?;
    Ok(aut_with_labels(g, &vec![0; g.n()]).with_cap(budget.group_cap))
}

/// An automorphism of `g` extending `phi`, if one exists.
pub fn extend_partial_iso(g: &Ccd, phi: &PartialIso) -> Result<Option<Perm>> {
    phi.validate(g)?;
    let n = g.n();
    let mut la = vec![0u32; n];
    let mut lb = vec![0u32; n];
    for (i, (&u, &w)) in phi.domain.iter().zip(&phi.images).enumerate() {
        la[u] = i as u32 + 1;
        lb[w] = i as u32 + 1;
    }
    let a = Side { g, labels: &la };
    let b = Side { g, labels: &lb };
    let sa = State::new(g, Mode::Named, Some(&la));
    let sb = State::new(g, Mode::Named, Some(&lb));
    let p = search_iso(&a, &sa, &b, &sb, Mode::Named);
    debug_assert!(p.as_ref().is_none_or(|p| phi.is_extended_by(p) && g.is_automorphism(p)));
    Ok(p)
}

/// An isomorphism from `g` onto `h` preserving color names.
pub fn isomorphic(g: &Ccd, h: &Ccd) -> Option<Perm> {
    find_iso(g, h, Mode::Named)
}

/// An isomorphism from `g` onto `h` after some bijective renaming of vertex
/// colors and of edge colors.
pub fn isomorphic_names_free(g: &Ccd, h: &Ccd) -> Option<Perm> {
    find_iso(g, h, Mode::NamesFree)
}

fn find_iso(g: &Ccd, h: &Ccd, mode: Mode) -> Option<Perm> {
    if g.n() != h.n() {
        return None;
    }
    if mode == Mode::Named && (g.num_vcolors() != h.num_vcolors() || g.num_ecolors() != h.num_ecolors()) {
        return None;
    }
    let zeros = vec![0; g.n()];
    let a = Side { g, labels: &zeros };
    let b = Side { g: h, labels: &zeros };
    let sa = State::new(g, mode, None);
    let sb = State::new(h, mode, None);
    search_iso(&a, &sa, &b, &sb, mode)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub graph: Ccd,
    /// Vertex `v` of the input sits at position `labeling(v)`.
    pub labeling: Perm,
}

fn encode(g: &Ccd, lab: &[u32], mode: Mode) -> (Vec<u32>, Vec<u32>) {
    let n = g.n();
    let mut at = vec![0usize; n];
    for v in 0..n {
        at[lab[v] as usize] = v;
    }
    let mut vc: Vec<u32> = (0..n).map(|i| g.vcolor(at[i])).collect();
    let mut ec: Vec<u32> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            ec.push(if i == j { 0 } else { g.ecolor(at[i], at[j]) });
        }
    }
    if mode == Mode::NamesFree {
        first_occurrence(&mut vc, None);
        first_occurrence(&mut ec, Some(n));
    }
    (vc, ec)
}

fn first_occurrence(values: &mut [u32], diag: Option<usize>) {
    let mut map: Vec<u32> = Vec::new();
    let mut next = 0u32;
    for (k, x) in values.iter_mut().enumerate() {
        if let Some(n) = diag {
            if k / n == k % n {
                continue;
            }
        }
        let i = *x as usize;
        if map.len() <= i {
            map.resize(i + 1, u32::MAX);
        }
        if map[i] == u32::MAX {
            map[i] = next;
            next += 1;
        }
        *x = map[i];
    }
}

struct CanonSearch<'a> {
    g: &'a Ccd,
    mode: Mode,
    aut: PermGroup,
    best: Option<((Vec<u32>, Vec<u32>), Vec<u32>)>,
}

impl CanonSearch<'_> {
    fn dfs(&mut self, s: &State, seq: &mut Vec<usize>) {
        let Some((_, cell)) = s.target_cell() else {
            let enc = encode(self.g, &s.cells, self.mode);
            if self.best.as_ref().is_none_or(|(b, _)| enc < *b) {
                self.best = Some((enc, s.cells.clone()));
            }
            return;
        };
        let stab = self.aut.pointwise_stabilizer(seq);
        let orb = orbit_labels(self.g.n(), stab.generators());
        let mut tried: Vec<usize> = Vec::new();
        for &x in &cell {
            if tried.contains(&orb[x]) {
                continue;
            }
            tried.push(orb[x]);
            let child = s.individualize(self.g, self.mode, x);
            seq.push(x);
            self.dfs(&child, seq);
            seq.pop();
        }
    }
}

fn canonical(g: &Ccd, mode: Mode, budget: &Budget) -> Result<Canonical> {
    Budget::check("vertices for canonical form", g.n(), budget.aut_max_n)?;
    let aut = aut_in_mode(g, &vec![0; g.n()], mode);
    let mut search = CanonSearch {
        g,
        mode,
        aut,
        best: None,
    };
    let root = State::new(g, mode, None);
    search.dfs(&root, &mut Vec::new());
    let ((vc, ec), lab) = search.best.expect("search reaches a leaf");
    let labeling = Perm::from_images_unchecked(lab.iter().map(|&c| c as usize).collect());
    let graph = Ccd::from_raw(vc, ec);
    debug_assert!(mode == Mode::NamesFree || graph == g.relabel(&labeling));
    Ok(Canonical { graph, labeling })
}

/// Canonical relabeling preserving color names.
pub fn canonical_form(g: &Ccd) -> Result<Canonical> {
    canonical(g, Mode::Named, &Budget::default())
}

/// Canonical relabeling with colors renamed by first occurrence.
pub fn canonical_form_names_free(g: &Ccd) -> Result<Canonical> {
    canonical(g, Mode::NamesFree, &Budget::default())
}

pub fn canonical_form_with(g: &Ccd, names_free: bool, budget: &Budget) -> Result<Canonical> {
    let mode = if names_free { Mode::NamesFree } else { Mode::Named };
    canonical(g, mode, budget)
}

/// Isomorphism-type key: the canonical graph serialized as JSON bytes.
pub fn iso_type_key(g: &Ccd) -> Result<Vec<u8>> {
    Ok(crate::io::to_json(&canonical_form(g)?.graph).into_bytes())
}
