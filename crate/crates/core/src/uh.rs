//! Deciding ultrahomogeneity.
//!
//! A graph is ultrahomogeneous iff for every vertex set `U` the orbits of the
//! pointwise stabilizer of `U` on the remaining vertices are exactly the
//! classes of vertices with equal color and equal edge colors to and from
//! each vertex of `U`. Sets are visited up to the action of the automorphism
//! group, and color classes that are pairwise homogeneously connected are
//! tested separately.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::autiso::{aut_with_labels, PartialIso};
use crate::budget::Budget;
use crate::ccd::{connectivity_type, induced_subgraph, Ccd, Connectivity};
use crate::error::Result;
use crate::group::PermGroup;
use crate::perm::Perm;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UhVerdict {
    pub is_uh: bool,
    /// A partial isomorphism that extends to no automorphism.
    pub witness: Option<PartialIso>,
    pub aut: PermGroup,
}

/// Groups of color classes linked by non-homogeneous connections, as sorted
/// vertex sets.
pub fn homogeneity_components(g: &Ccd) -> Vec<Vec<usize>> {
    let classes = g.color_classes();
    let k = classes.len();
    let mut comp: Vec<usize> = (0..k).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for a in 0..k {
        for b in a + 1..k {
            let t = connectivity_type(g, &classes[a], &classes[b]).expect("classes are disjoint");
            if t != Connectivity::Homogeneous {
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                comp[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut root_idx: Vec<Option<usize>> = vec![None; k];
    for c in 0..k {
        let r = find(&mut comp, c);
        let i = *root_idx[r].get_or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[i].extend(&classes[c]);
    }
    for part in out.iter_mut() {
        part.sort_unstable();
    }
    out.sort();
    out
}

fn type_over(g: &Ccd, u: &[usize], w: usize) -> Vec<u32> {
    let mut t = Vec::with_capacity(2 * u.len() + 1);
    t.push(g.vcolor(w));
    for &x in u {
        t.push(g.ecolor(x, w));
        t.push(g.ecolor(w, x));
    }
    t
}

/// Checks one vertex set; on failure returns two vertices of equal type in
/// different orbits.
fn check_set(g: &Ccd, aut: &PermGroup, u: &[usize]) -> Option<(usize, usize)> {
    let n = g.n();
    let stab = aut.pointwise_stabilizer(u);
    let orbits = stab.orbits();
    let idx = orbits.part_index();
    let rest: Vec<usize> = (0..n).filter(|v| !u.contains(v)).collect();
    let mut by_type: std::collections::HashMap<Vec<u32>, usize> = Default::default();
    for &w in &rest {
        let t = type_over(g, u, w);
        match by_type.get(&t) {
            None => {
                by_type.insert(t, w);
            }
            Some(&v) if idx[v] != idx[w] => return Some((v, w)),
            Some(_) => {}
        }
    }
    None
}

fn mask(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &v| m | (1 << v))
}

/// Returns a failing witness inside one connected piece, or `None`.
fn check_component(g: &Ccd, aut: &PermGroup) -> Option<PartialIso> {
    let n = g.n();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    seen.insert(0);
    while let Some(u) = stack.pop() {
        if let Some((v, w)) = check_set(g, aut, &u) {
            let mut domain = u.clone();
            let mut images = u.clone();
            domain.push(v);
            images.push(w);
            return Some(PartialIso::new(domain, images));
        }
        if u.len() + 2 >= n {
            continue;
        }
        for x in 0..n {
            if u.contains(&x) {
                continue;
            }
            let mut next = u.clone();
            next.push(x);
            next.sort_unstable();
            if seen.contains(&mask(&next)) {
                continue;
            }
            for s in aut.set_orbit(&next) {
                seen.insert(mask(&s));
            }
            stack.push(next);
        }
    }
    None
}

pub fn is_ultrahomogeneous(g: &Ccd) -> Result<UhVerdict> {
    is_ultrahomogeneous_with(g, &Budget::default())
}

pub fn is_ultrahomogeneous_with(g: &Ccd, budget: &Budget) -> Result<UhVerdict> {
    let n = g.n();
    let comps = homogeneity_components(g);
    for c in &comps {
        Budget::check("vertices in a homogeneity component", c.len(), budget.uh_max_n.min(64))?;
    }
    let mut gens: Vec<Perm> = Vec::new();
    let mut witness = None;
    for c in &comps {
        let (h, map) = induced_subgraph(g, c)?;
        let aut = aut_with_labels(&h, &vec![0; h.n()]);
        for p in aut.generators() {
            let mut images: Vec<usize> = (0..n).collect();
            for (i, &v) in map.iter().enumerate() {
                images[v] = map[p.apply(i)];
            }
            gens.push(Perm::from_images_unchecked(images));
        }
        if witness.is_none() {
            if let Some(w) = check_component(&h, &aut) {
                witness = Some(PartialIso::new(
                    w.domain.iter().map(|&i| map[i]).collect(),
                    w.images.iter().map(|&i| map[i]).collect(),
                ));
            }
        }
    }
    let aut = PermGroup::new(n, gens)?.with_cap(budget.group_cap);
    Ok(UhVerdict {
        is_uh: witness.is_none(),
        witness,
        aut,
    })
}
