//! Permutation groups given by generators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::partition::OrderedPartition;
use crate::perm::Perm;

pub const DEFAULT_GROUP_CAP: usize = 10_000_000;

#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    cap: usize,
    chain: OnceLock<Arc<StabChain>>,
    elements: OnceLock<Arc<Vec<Perm>>>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::InvalidPerm(format!(
                    "generator of degree {} in a group of degree {degree}",
                    g.degree()
                )));
            }
        }
        let mut gens: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        gens.dedup();
        Ok(PermGroup::from_parts(degree, gens))
    }

    fn from_parts(degree: usize, gens: Vec<Perm>) -> PermGroup {
        PermGroup {
            degree,
            gens,
            cap: DEFAULT_GROUP_CAP,
            chain: OnceLock::new(),
            elements: OnceLock::new(),
        }
    }

    fn with_chain(degree: usize, gens: Vec<Perm>, chain: StabChain) -> PermGroup {
        let g = PermGroup::from_parts(degree, gens);
        let _ = g.chain.set(Arc::new(chain));
        g
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::from_parts(degree, Vec::new())
    }

    pub fn symmetric(degree: usize) -> PermGroup {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Perm::transposition(degree, 0, 1));
        }
        if degree >= 3 {
            let c: Vec<usize> = (0..degree).collect();
            gens.push(Perm::cycle(degree, &c).unwrap());
        }
        PermGroup::from_parts(degree, gens)
    }

    pub fn cyclic(degree: usize) -> PermGroup {
        let c: Vec<usize> = (0..degree).collect();
        PermGroup::new(degree, vec![Perm::cycle(degree, &c).unwrap()]).unwrap()
    }

    pub fn alternating(degree: usize) -> PermGroup {
        let gens = (2..degree)
            .map(|k| Perm::cycle(degree, &[0, 1, k]).unwrap())
            .collect();
        PermGroup::from_parts(degree, gens)
    }

    /// Generated subgroup with an explicit element cap for enumeration.
    pub fn closure(degree: usize, gens: Vec<Perm>, cap: usize) -> Result<PermGroup> {
        let mut g = PermGroup::new(degree, gens)?;
        g.cap = cap;
        g.elements()?;
        Ok(g)
    }

    pub fn with_cap(mut self, cap: usize) -> PermGroup {
        self.cap = cap;
        self.elements = OnceLock::new();
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub(crate) fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| Arc::new(StabChain::build(self.degree, &self.gens, &[])))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.chain().contains(g)
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    /// Every element, enumerated once and cached.
    pub fn elements(&self) -> Result<Arc<Vec<Perm>>> {
        if let Some(e) = self.elements.get() {
            return Ok(e.clone());
        }
        let els = self
            .chain()
            .elements(self.cap)
            .ok_or(Error::GroupTooLarge { cap: self.cap })?;
        Ok(self.elements.get_or_init(|| Arc::new(els)).clone())
    }

    /// True when both groups act on the same points and have the same elements.
    pub fn same_as(&self, other: &PermGroup) -> bool {
        self.degree == other.degree
            && self.order() == other.order()
            && other.gens.iter().all(|g| self.contains(g))
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.gens.iter().all(|g| other.contains(g))
    }

    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![x];
        seen[x] = true;
        let mut i = 0;
        while i < orbit.len() {
            let y = orbit[i];
            for g in &self.gens {
                let z = g.apply(y);
                if !seen[z] {
                    seen[z] = true;
                    orbit.push(z);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        orbit
    }

    /// Orbits ordered by least element.
    pub fn orbits(&self) -> OrderedPartition {
        let mut label = vec![usize::MAX; self.degree];
        for x in 0..self.degree {
            if label[x] == usize::MAX {
                for y in self.orbit(x) {
                    label[y] = x;
                }
            }
        }
        OrderedPartition::from_labels(&label)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).len() == self.degree
    }

    /// Orbit of a point set under the group, as sorted sets.
    pub fn set_orbit(&self, set: &[usize]) -> Vec<Vec<usize>> {
        let mut start = set.to_vec();
        start.sort_unstable();
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(start.clone());
        let mut queue = vec![start];
        let mut i = 0;
        while i < queue.len() {
            for g in &self.gens {
                let mut img: Vec<usize> = queue[i].iter().map(|&v| g.apply(v)).collect();
                img.sort_unstable();
                if seen.insert(img.clone()) {
                    queue.push(img);
                }
            }
            i += 1;
        }
        queue
    }

    pub fn pointwise_stabilizer(&self, points: &[usize]) -> PermGroup {
        let mut prefix: Vec<usize> = Vec::new();
        for &p in points {
            if !prefix.contains(&p) {
                prefix.push(p);
            }
        }
        let chain = StabChain::build(self.degree, &self.gens, &prefix);
        let sub = chain.suffix(prefix.len());
        let gens = sub.levels.first().map(|l| l.gens.clone()).unwrap_or_default();
        let g = PermGroup::with_chain(self.degree, gens, sub);
        debug_assert!(self.check_orbit_stabilizer(points.first().copied()));
        g
    }

    fn check_orbit_stabilizer(&self, x: Option<usize>) -> bool {
        match x {
            None => true,
            Some(x) => {
                let o = self.order();
                o == u128::MAX || o % self.orbit(x).len() as u128 == 0
            }
        }
    }

    /// Elements satisfying `pred`, searched with a chain whose base starts
    /// with `prefix`; `prune(point, image)` may reject partial images early.
    /// The result must be a subgroup for the returned group to be meaningful.
    pub(crate) fn subgroup_search(
        &self,
        prefix: &[usize],
        prune: &dyn Fn(usize, usize) -> bool,
        pred: &dyn Fn(&Perm) -> bool,
    ) -> Result<PermGroup> {
        let chain = StabChain::build(self.degree, &self.gens, prefix);
        let mut found: Vec<Perm> = Vec::new();
        let mut sub = StabChain::build(self.degree, &[], &[]);
        let res = chain.search(
            &mut |_, b, img| prune(b, img),
            &mut |g| {
                if pred(g) && !sub.contains(g) {
                    found.push(g.clone());
                    sub = StabChain::build(self.degree, &found, &[]);
                }
                true
            },
            self.cap,
        );
        res.ok_or(Error::GroupTooLarge { cap: self.cap })?;
        Ok(PermGroup::with_chain(self.degree, found, sub))
    }

    pub fn setwise_stabilizer(&self, set: &[usize]) -> Result<PermGroup> {
        let mut member = vec![false; self.degree];
        for &v in set {
            if v >= self.degree {
                return Err(Error::VertexOutOfRange(v, self.degree));
            }
            member[v] = true;
        }
        let g = self.subgroup_search(
            set,
            &|b, img| member[b] == member[img],
            &|g| set.iter().all(|&v| member[g.apply(v)]),
        )?;
        debug_assert!(self.check_orbit_stabilizer(set.first().copied()));
        Ok(g)
    }

    /// `(pointwise, setwise)` stabilizers of `set`.
    pub fn stabilizers(&self, set: &[usize]) -> Result<(PermGroup, PermGroup)> {
        let pw = self.pointwise_stabilizer(set);
        let sw = self.setwise_stabilizer(set)?;
        debug_assert!(pw.is_subgroup_of(&sw));
        Ok((pw, sw))
    }

    /// Count of elements of each order.
    pub fn order_spectrum(&self) -> Result<BTreeMap<usize, usize>> {
        let mut spec = BTreeMap::new();
        for g in self.elements()?.iter() {
            *spec.entry(g.order()).or_insert(0) += 1;
        }
        Ok(spec)
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .enumerate()
            .all(|(i, a)| self.gens[i + 1..].iter().all(|b| a.then(b) == b.then(a)))
    }

    /// `self` acting on the top, `fiber` on each fiber; point `(v, w)` is
    /// `v * fiber.degree() + w`.
    pub fn wreath(&self, fiber: &PermGroup) -> Result<PermGroup> {
        let m = fiber.degree;
        let n = self.degree;
        let total = n.checked_mul(m).ok_or(Error::Budget {
            what: "wreath degree",
            value: usize::MAX,
            cap: usize::MAX,
        })?;
        let mut gens = Vec::new();
        for g in &self.gens {
            gens.push(Perm::from_images_unchecked(
                (0..total).map(|x| g.apply(x / m) * m + x % m).collect(),
            ));
        }
        for v in 0..n {
            for h in &fiber.gens {
                gens.push(Perm::from_images_unchecked(
                    (0..total)
                        .map(|x| if x / m == v { v * m + h.apply(x % m) } else { x })
                        .collect(),
                ));
            }
        }
        let mut g = PermGroup::new(total, gens)?;
        g.cap = self.cap;
        Ok(g)
    }

    /// Conjugates by a relabeling `rho` of the points.
    pub fn conjugate_by(&self, rho: &Perm) -> PermGroup {
        PermGroup::from_parts(
            self.degree,
            self.gens.iter().map(|g| g.conjugate_by(rho)).collect(),
        )
    }
}

/// A bijection `rho` with `{rho g rho^-1} = h`, searched up to `max_degree`.
pub fn permutational_isomorphism(
    g: &PermGroup,
    h: &PermGroup,
    max_degree: usize,
) -> Result<Option<Perm>> {
    let n = g.degree();
    if n > max_degree {
        return Err(Error::Budget {
            what: "permutational isomorphism degree",
            value: n,
            cap: max_degree,
        });
    }
    if n != h.degree() || g.order() != h.order() {
        return Ok(None);
    }
    let mut prof_g: Vec<usize> = g.orbits().parts().iter().map(Vec::len).collect();
    let mut prof_h: Vec<usize> = h.orbits().parts().iter().map(Vec::len).collect();
    prof_g.sort_unstable();
    prof_h.sort_unstable();
    if prof_g != prof_h {
        return Ok(None);
    }
    let mut images = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(perm_iso_rec(g, h, 0, &mut images, &mut used))
}

// Assigns rho(x) for x = depth. Any image in the same orbit of the pointwise
// stabilizer of the assigned images is equivalent, so one per orbit suffices.
fn perm_iso_rec(
    g: &PermGroup,
    h: &PermGroup,
    depth: usize,
    images: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> Option<Perm> {
    let n = g.degree();
    if depth == n {
        let rho = Perm::from_images_unchecked(images.clone());
        let ok = g.generators().iter().all(|x| h.contains(&x.conjugate_by(&rho)));
        return ok.then_some(rho);
    }
    let gpre: Vec<usize> = (0..depth).collect();
    let hpre: Vec<usize> = images[..depth].to_vec();
    let gs = g.pointwise_stabilizer(&gpre);
    let hs = h.pointwise_stabilizer(&hpre);
    if gs.order() != hs.order() {
        return None;
    }
    let target = gs.orbit(depth).len();
    let mut done = vec![false; n];
    for y in 0..n {
        if used[y] || done[y] {
            continue;
        }
        let orb = hs.orbit(y);
        for &z in &orb {
            done[z] = true;
        }
        if orb.len() != target {
            continue;
        }
        images[depth] = y;
        used[y] = true;
        if let Some(r) = perm_iso_rec(g, h, depth + 1, images, used) {
            return Some(r);
        }
        used[y] = false;
    }
    images[depth] = usize::MAX;
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupName {
    Trivial,
    Cyclic(usize),
    Symmetric(usize),
    Alternating(usize),
    SL23,
    Other(u128),
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupName::Trivial => write!(f, "1"),
            GroupName::Cyclic(n) => write!(f, "Z{n}"),
            GroupName::Symmetric(n) => write!(f, "Sym({n})"),
            GroupName::Alternating(n) => write!(f, "Alt({n})"),
            GroupName::SL23 => write!(f, "SL(2,3)"),
            GroupName::Other(o) => write!(f, "group of order {o}"),
        }
    }
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Names the abstract group by order, commutativity and element-order
/// spectrum. Only small orders are recognized.
pub fn recognize(g: &PermGroup) -> Result<GroupName> {
    let order = g.order();
    if order == 1 {
        return Ok(GroupName::Trivial);
    }
    if order > 40_320 {
        return Ok(GroupName::Other(order));
    }
    let spec = g.order_spectrum()?;
    if g.is_abelian() {
        if spec.contains_key(&(order as usize)) {
            return Ok(GroupName::Cyclic(order as usize));
        }
        return Ok(GroupName::Other(order));
    }
    for k in 3..=8 {
        if order == factorial(k) && spec == PermGroup::symmetric(k).order_spectrum()? {
            return Ok(GroupName::Symmetric(k));
        }
        if k >= 4 && order == factorial(k) / 2 && spec == PermGroup::alternating(k).order_spectrum()? {
            return Ok(GroupName::Alternating(k));
        }
    }
    if order == 24 && spec == sl23_spectrum() {
        return Ok(GroupName::SL23);
    }
    Ok(GroupName::Other(order))
}

/// Element orders of SL(2,3): one involution, eight each of orders 3 and 6,
/// six of order 4.
pub fn sl23_spectrum() -> BTreeMap<usize, usize> {
    [(1, 1), (2, 1), (3, 8), (4, 6), (6, 8)].into_iter().collect()
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("generators", &self.gens)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    degree: usize,
    generators: Vec<Perm>,
    #[serde(default)]
    order: Option<String>,
}

impl Serialize for PermGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupRepr {
            degree: self.degree,
            generators: self.gens.clone(),
            order: Some(self.order().to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PermGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GroupRepr::deserialize(d)?;
        PermGroup::new(r.degree, r.generators).map_err(serde::de::Error::custom)
    }
}
