//! Partition systems, the easygoing property, the general and minimal
//! extension theorems, and blow-ups.
//!
//! Vertex sets passed in are sorted internally; partitions of a color class
//! `R` are stated over positions `0..|R|` of the sorted class, which is also
//! the vertex order of `induced_subgraph(g, R)`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::autiso::{automorphism_group_with, iso_type_key, PartialIso};
use crate::blocks::{all_block_systems, induced_action, BlockSystem};
use crate::budget::Budget;
use crate::ccd::{induced_subgraph, refine_coloring, with_vcolors, Ccd};
use crate::error::{Error, Result};
use crate::group::{permutational_isomorphism, PermGroup};
use crate::partition::OrderedPartition;
use crate::perm::Perm;
use crate::uh::is_ultrahomogeneous_with;

type Label = (u32, u32);

fn sorted_class(g: &Ccd, set: &[usize]) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&v) = s.iter().find(|&&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange(v, g.n()));
    }
    Ok(s)
}

fn class_of(g: &Ccd, c: u32) -> Result<Vec<usize>> {
    let cls = (0..g.n()).filter(|&v| g.vcolor(v) == c).collect::<Vec<_>>();
    if cls.is_empty() {
        return Err(Error::Precondition(format!("no vertex has color {c}")));
    }
    Ok(cls)
}

fn labels_from(g: &Ccd, r: &[usize], b: usize) -> Vec<Label> {
    r.iter().map(|&x| (g.ecolor(b, x), g.ecolor(x, b))).collect()
}

// Parts ordered by descending label, so for oriented graphs the order is
// (out-neighbors, in-neighbors, non-neighbors).
fn partition_of_labels<L: Ord + Copy>(labels: &[L]) -> OrderedPartition {
    let rev: Vec<Reverse<L>> = labels.iter().map(|&l| Reverse(l)).collect();
    OrderedPartition::from_labels(&rev)
}

fn image_labels<L: Clone>(labels: &[L], p: &Perm) -> Vec<L> {
    let mut out = labels.to_vec();
    for (i, l) in labels.iter().enumerate() {
        out[p.apply(i)] = l.clone();
    }
    out
}

fn label_orbit<L: Ord + Clone>(gens: &[Perm], base: Vec<L>, cap: usize) -> Result<Vec<Vec<L>>> {
    let mut seen: BTreeSet<Vec<L>> = BTreeSet::new();
    seen.insert(base.clone());
    let mut queue = vec![base];
    let mut i = 0;
    while i < queue.len() {
        for p in gens {
            let img = image_labels(&queue[i], p);
            if seen.insert(img.clone()) {
                queue.push(img);
                if queue.len() > cap {
                    return Err(Error::GroupTooLarge { cap });
                }
            }
        }
        i += 1;
    }
    Ok(seen.into_iter().collect())
}

/// Extends a permutation of the positions of `set` to all of `0..n`.
fn lift(n: usize, set: &[usize], p: &Perm) -> Perm {
    let mut images: Vec<usize> = (0..n).collect();
    for (i, &v) in set.iter().enumerate() {
        images[v] = set[p.apply(i)];
    }
    Perm::from_images_unchecked(images)
}

fn map_iso(w: &PartialIso, map: &[usize]) -> PartialIso {
    PartialIso::new(
        w.domain.iter().map(|&i| map[i]).collect(),
        w.images.iter().map(|&i| map[i]).collect(),
    )
}

fn bits(mask: u64, k: usize) -> Vec<usize> {
    (0..k).filter(|&i| mask >> i & 1 == 1).collect()
}

fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &i| m | 1 << i)
}

/// `A(b)`: the cells of `R` by the pair of edge colors between `b` and each
/// vertex, over positions of the sorted `R`.
pub fn neighborhood_partition(g: &Ccd, r: &[usize], b: usize) -> Result<OrderedPartition> {
    let r = sorted_class(g, r)?;
    if b >= g.n() {
        return Err(Error::VertexOutOfRange(b, g.n()));
    }
    if r.contains(&b) {
        return Err(Error::Overlap(b));
    }
    Ok(partition_of_labels(&labels_from(g, &r, b)))
}

/// The orbit `𝒜(A)` of an ordered partition under `Aut(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionOrbit {
    pub base: OrderedPartition,
    /// Sorted, without repetition.
    pub members: Vec<OrderedPartition>,
}

fn part_labels(g: &Ccd, a: &OrderedPartition) -> Result<Vec<usize>> {
    if a.ground() != g.n() {
        return Err(Error::BadPartition(format!(
            "partition covers {} points, graph has {}",
            a.ground(),
            g.n()
        )));
    }
    Ok(a.part_index())
}

pub fn partition_orbit(g: &Ccd, a: &OrderedPartition, budget: &Budget) -> Result<PartitionOrbit> {
    let labels = part_labels(g, a)?;
    let aut = automorphism_group_with(g, budget)?;
    let members = label_orbit(aut.generators(), labels, budget.group_cap)?
        .iter()
        .map(|l| OrderedPartition::from_labels(l))
        .collect();
    Ok(PartitionOrbit {
        base: a.clone(),
        members,
    })
}

/// A refinement of the vertex coloring by some members of a partition
/// system that is not ultrahomogeneous.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFailure {
    pub partitions: Vec<OrderedPartition>,
    /// A partial isomorphism of the refined graph that does not extend.
    pub witness: PartialIso,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemVerdict {
    pub holds: bool,
    pub orbit_size: usize,
    pub failure: Option<SystemFailure>,
}

fn refine_by<L: Ord + Clone>(h: &Ccd, chosen: &[&Vec<L>]) -> Ccd {
    let keys: Vec<(u32, Vec<L>)> = (0..h.n())
        .map(|v| (h.vcolor(v), chosen.iter().map(|l| l[v].clone()).collect()))
        .collect();
    let mut distinct = keys.clone();
    distinct.sort();
    distinct.dedup();
    let vc = keys
        .iter()
        .map(|k| distinct.binary_search(k).unwrap() as u32)
        .collect();
    with_vcolors(h, vc).expect("same length")
}

/// Checks every nonempty subset of `members`; returns the first failing one
/// in mask order with a witness.
fn system_failure<L: Ord + Clone>(
    h: &Ccd,
    members: &[Vec<L>],
    budget: &Budget,
) -> Result<Option<(Vec<usize>, PartialIso)>> {
    let m = members.len();
    Budget::check("members of a partition orbit", m, budget.partition_system_max.min(30))?;
    let mut passed: HashSet<Vec<u32>> = HashSet::new();
    for mask in 1u64..(1 << m) {
        let idx = bits(mask, m);
        let chosen: Vec<&Vec<L>> = idx.iter().map(|&i| &members[i]).collect();
        let refined = refine_by(h, &chosen);
        if passed.contains(refined.vcolors()) {
            continue;
        }
        let v = is_ultrahomogeneous_with(&refined, budget)?;
        match v.witness {
            Some(w) => return Ok(Some((idx, w))),
            None => {
                passed.insert(refined.vcolors().to_vec());
            }
        }
    }
    Ok(None)
}

/// Whether `𝒜(A)` is an ultrahomogeneous system of partitions: every
/// refinement of the coloring of `g` by a nonempty subset of the orbit is
/// ultrahomogeneous. Sequences add nothing over their sets of members.
pub fn is_uh_partition_system(g: &Ccd, a: &OrderedPartition, budget: &Budget) -> Result<SystemVerdict> {
    let labels = part_labels(g, a)?;
    let aut = automorphism_group_with(g, budget)?;
    let members = label_orbit(aut.generators(), labels, budget.group_cap)?;
    let failure = system_failure(g, &members, budget)?.map(|(idx, witness)| SystemFailure {
        partitions: idx.iter().map(|&i| OrderedPartition::from_labels(&members[i])).collect(),
        witness,
    });
    Ok(SystemVerdict {
        holds: failure.is_none(),
        orbit_size: members.len(),
        failure,
    })
}

fn easygoing_violation(aut: &PermGroup, blocks: &BlockSystem, max_blocks: usize) -> Result<Option<Vec<usize>>> {
    if !blocks.is_invariant(aut) {
        return Err(Error::NotInvariant("blocks are not preserved by the automorphisms".into()));
    }
    let k = blocks.num_blocks();
    Budget::check("blocks for the easygoing test", k, max_blocks.min(24))?;
    let induced = induced_action(aut, blocks)?;
    let mut seen: HashSet<u64> = HashSet::new();
    for mask in 0u64..(1 << k) {
        if seen.contains(&mask) {
            continue;
        }
        let idx = bits(mask, k);
        for s in induced.set_orbit(&idx) {
            seen.insert(mask_of(&s));
        }
        let lhs = induced_action(&aut.pointwise_stabilizer(&blocks.union_of(&idx)), blocks)?;
        let rhs = induced.pointwise_stabilizer(&idx);
        debug_assert!(lhs.is_subgroup_of(&rhs));
        if lhs.order() != rhs.order() {
            return Ok(Some(idx));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EasygoingVerdict {
    pub holds: bool,
    /// Indices of the blocks of the first violating subset.
    pub violating: Option<Vec<usize>>,
}

/// Whether, for every set of blocks, the pointwise stabilizer of their union
/// induces on the blocks the pointwise stabilizer of those blocks in the
/// induced action.
pub fn is_easygoing(h: &Ccd, blocks: &BlockSystem, budget: &Budget) -> Result<EasygoingVerdict> {
    if !h.is_monochromatic() {
        return Err(Error::Precondition("the graph must be vertex-monochromatic".into()));
    }
    if blocks.degree() != h.n() {
        return Err(Error::BadPartition("block system has the wrong degree".into()));
    }
    let aut = automorphism_group_with(h, budget)?;
    let violating = easygoing_violation(&aut, blocks, budget.easygoing_max_blocks)?;
    Ok(EasygoingVerdict {
        holds: violating.is_none(),
        violating,
    })
}

/// Given automorphisms `psi`, `phi` inducing the same map on the chosen
/// blocks, an automorphism `tau` inducing `psi` on all blocks and agreeing
/// with `phi` on the union of the chosen blocks. `None` if there is none,
/// which can only happen when the graph is not easygoing.
pub fn easygoing_lift(
    aut: &PermGroup,
    blocks: &BlockSystem,
    psi: &Perm,
    phi: &Perm,
    chosen: &[usize],
) -> Result<Option<Perm>> {
    let (pb, fb) = (blocks.project(psi)?, blocks.project(phi)?);
    if chosen.iter().any(|&i| pb.apply(i) != fb.apply(i)) {
        return Err(Error::Precondition("the maps differ on the chosen blocks".into()));
    }
    let target = blocks.project(&psi.then(&phi.inverse()))?;
    let stab = aut.pointwise_stabilizer(&blocks.union_of(chosen));
    for rho in stab.elements()?.iter() {
        if blocks.project(rho)? == target {
            let tau = rho.then(phi);
            debug_assert_eq!(blocks.project(&tau)?, pb);
            return Ok(Some(tau));
        }
    }
    Ok(None)
}

/// An automorphism of the blue graph splitting a class `X(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockFailure {
    /// `pair` lies in one class, its image under an automorphism does not.
    Split { pair: (usize, usize), images: (usize, usize) },
    UnequalSizes { small: Vec<usize>, large: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupWitness {
    /// An automorphism of the red graph moving a neighborhood partition to
    /// one that no blue vertex has; it fixes every blue vertex.
    Undefined { automorphism: Perm },
    /// A permutation of the classes induced by blue automorphisms only.
    OnlyBlue(Perm),
    /// A permutation of the classes induced by red automorphisms only.
    OnlyRed(Perm),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionWitnesses {
    pub induced_uh: Option<PartialIso>,
    pub partition_system: Option<SystemFailure>,
    /// Some partition of the orbit of `partitions[0]` that is not among the
    /// neighborhood partitions, or the other way round.
    pub not_an_orbit: Option<OrderedPartition>,
    pub block_system: Option<BlockFailure>,
    pub block_groups: Option<GroupWitness>,
    /// Blocks whose pointwise stabilizer induces too little.
    pub easygoing: Option<Vec<Vec<usize>>>,
}

/// The five conditions for a graph on two color classes. The last two are
/// only evaluated when the classes `X(A)` form a block system; otherwise they
/// are reported false without a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub red: Vec<usize>,
    pub blue: Vec<usize>,
    pub induced_uh: bool,
    pub partition_system: bool,
    pub block_system: bool,
    pub block_groups: bool,
    pub easygoing: bool,
    /// Distinct neighborhood partitions, over positions of `red`.
    pub partitions: Vec<OrderedPartition>,
    /// The classes `X(A)` as vertex sets, ordered like `partitions`.
    pub blocks: Vec<Vec<usize>>,
    pub witnesses: ExtensionWitnesses,
}

impl ExtensionReport {
    pub fn conditions(&self) -> [bool; 5] {
        [
            self.induced_uh,
            self.partition_system,
            self.block_system,
            self.block_groups,
            self.easygoing,
        ]
    }

    pub fn holds(&self) -> bool {
        self.conditions().iter().all(|&c| c)
    }

    /// 1-based number of the first failing condition.
    pub fn first_failure(&self) -> Option<usize> {
        self.conditions().iter().position(|&c| !c).map(|i| i + 1)
    }
}

/// Evaluates the general extension theorem on the classes with colors `red`
/// and `blue` of a graph with exactly two vertex colors.
pub fn check_general_extension(g: &Ccd, red: u32, blue: u32, budget: &Budget) -> Result<ExtensionReport> {
    if g.num_vcolors() != 2 || red == blue || red > 1 || blue > 1 {
        return Err(Error::Precondition(
            "the graph must have exactly two vertex colors, given as red and blue".into(),
        ));
    }
    let (r, b) = (class_of(g, red)?, class_of(g, blue)?);
    let n = g.n();
    let (gr, _) = induced_subgraph(g, &r)?;
    let (gb, _) = induced_subgraph(g, &b)?;
    let mut w = ExtensionWitnesses::default();

    let vr = is_ultrahomogeneous_with(&gr, budget)?;
    let vb = is_ultrahomogeneous_with(&gb, budget)?;
    w.induced_uh = vr
        .witness
        .as_ref()
        .map(|x| map_iso(x, &r))
        .or_else(|| vb.witness.as_ref().map(|x| map_iso(x, &b)));
    let aut_r = vr.aut;
    let aut_b = vb.aut;

    // condition 2
    let blue_labels: Vec<Vec<Label>> = b.iter().map(|&x| labels_from(g, &r, x)).collect();
    let distinct: Vec<Vec<Label>> = blue_labels
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let orbit = label_orbit(aut_r.generators(), blue_labels[0].clone(), budget.group_cap)?;
    if orbit != distinct {
        let odd = orbit
            .iter()
            .find(|l| !distinct.contains(l))
            .or_else(|| distinct.iter().find(|l| !orbit.contains(l)))
            .unwrap();
        w.not_an_orbit = Some(partition_of_labels(odd));
    } else if let Some((idx, wit)) = system_failure(&gr, &distinct, budget)? {
        w.partition_system = Some(SystemFailure {
            partitions: idx.iter().map(|&i| partition_of_labels(&distinct[i])).collect(),
            witness: map_iso(&wit, &r),
        });
    }
    let partition_system = w.not_an_orbit.is_none() && w.partition_system.is_none();

    // condition 3
    let key_index: HashMap<&Vec<Label>, usize> = distinct.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let class_of_pos: Vec<usize> = blue_labels.iter().map(|l| key_index[l]).collect();
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); distinct.len()];
    for (i, &c) in class_of_pos.iter().enumerate() {
        cells[c].push(i);
    }
    'gens: for p in aut_b.generators() {
        for cell in &cells {
            let t = class_of_pos[p.apply(cell[0])];
            if let Some(&y) = cell.iter().find(|&&y| class_of_pos[p.apply(y)] != t) {
                w.block_system = Some(BlockFailure::Split {
                    pair: (b[cell[0]], b[y]),
                    images: (b[p.apply(cell[0])], b[p.apply(y)]),
                });
                break 'gens;
            }
        }
    }
    if w.block_system.is_none() {
        let small = cells.iter().min_by_key(|c| c.len()).unwrap();
        let large = cells.iter().max_by_key(|c| c.len()).unwrap();
        if small.len() != large.len() {
            w.block_system = Some(BlockFailure::UnequalSizes {
                small: small.iter().map(|&i| b[i]).collect(),
                large: large.iter().map(|&i| b[i]).collect(),
            });
        }
    }
    let block_system = w.block_system.is_none();

    let mut block_groups = false;
    let mut easygoing = false;
    if block_system {
        let sys = BlockSystem::new(b.len(), cells.clone())?;
        // block index in `sys` for each class index
        let to_sys: Vec<usize> = cells.iter().map(|c| sys.block_of(c[0])).collect();
        let induced_blue = induced_action(&aut_b, &sys)?;
        let mut red_gens = Vec::new();
        for p in aut_r.generators() {
            let mut images = vec![0; distinct.len()];
            let mut ok = true;
            for (i, l) in distinct.iter().enumerate() {
                match key_index.get(&image_labels(l, p)) {
                    Some(&j) => images[to_sys[i]] = to_sys[j],
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                w.block_groups = Some(GroupWitness::Undefined {
                    automorphism: lift(n, &r, p),
                });
                break;
            }
            red_gens.push(Perm::from_images(images)?);
        }
        if w.block_groups.is_none() {
            let induced_red = PermGroup::new(distinct.len(), red_gens)?;
            if let Some(x) = induced_blue.generators().iter().find(|x| !induced_red.contains(x)) {
                w.block_groups = Some(GroupWitness::OnlyBlue(x.clone()));
            } else if let Some(x) = induced_red.generators().iter().find(|x| !induced_blue.contains(x)) {
                w.block_groups = Some(GroupWitness::OnlyRed(x.clone()));
            }
        }
        block_groups = w.block_groups.is_none();

        if let Some(idx) = easygoing_violation(&aut_b, &sys, budget.easygoing_max_blocks)? {
            w.easygoing = Some(
                idx.iter()
                    .map(|&i| sys.block(i).iter().map(|&y| b[y]).collect())
                    .collect(),
            );
        } else {
            easygoing = true;
        }
    }

    Ok(ExtensionReport {
        induced_uh: vr.is_uh && vb.is_uh,
        partition_system,
        block_system,
        block_groups,
        easygoing,
        partitions: distinct.iter().map(|l| partition_of_labels(l)).collect(),
        blocks: cells.iter().map(|c| c.iter().map(|&i| b[i]).collect()).collect(),
        red: r,
        blue: b,
        witnesses: w,
    })
}

// Isomorphism type of `g` with both partitions as labeled structure. The
// refined coloring renames labels densely, so the label set is kept too.
fn pair_type_key(g: &Ccd, a: &OrderedPartition, b: &OrderedPartition) -> Result<Vec<u8>> {
    let (ia, ib) = (a.part_index(), b.part_index());
    let labels: BTreeSet<(u32, usize, usize)> = (0..g.n()).map(|v| (g.vcolor(v), ia[v], ib[v])).collect();
    let mut key = Vec::new();
    for (c, x, y) in labels {
        for w in [c as u64, x as u64, y as u64] {
            key.extend_from_slice(&w.to_le_bytes());
        }
    }
    key.push(0xff);
    key.extend(iso_type_key(&refine_coloring(g, &[a.clone(), b.clone()])?)?);
    Ok(key)
}

/// The minimal ultrahomogeneous extension of `g` with respect to `𝒜(A)`:
/// one new vertex `b_A` of a fresh color per member, with `ζ(r, b_A) =
/// ζ(b_A, r) = i` for `r` in the `i`-th part of `A`, and blue pairs colored
/// by the isomorphism type of `g` refined by `(A, A')`.
///
/// When `A` is a block system the Iso-Type colors are checked against the
/// part translations between members. Otherwise the result is only
/// returned if it is ultrahomogeneous.
pub fn minimal_extension(g: &Ccd, a: &OrderedPartition, budget: &Budget) -> Result<Ccd> {
    let labels = part_labels(g, a)?;
    let aut = automorphism_group_with(g, budget)?;
    let members = label_orbit(aut.generators(), labels, budget.group_cap)?;
    if let Some((idx, _)) = system_failure(g, &members, budget)? {
        return Err(Error::Precondition(format!(
            "the orbit is not an ultrahomogeneous system of partitions (subset {idx:?} fails)"
        )));
    }
    let n = g.n();
    let m = members.len();
    let parts: Vec<OrderedPartition> = members.iter().map(|l| OrderedPartition::from_labels(l)).collect();
    let mut keys: Vec<Vec<Vec<u8>>> = vec![vec![Vec::new(); m]; m];
    let mut distinct: BTreeSet<Vec<u8>> = BTreeSet::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                keys[i][j] = pair_type_key(g, &parts[i], &parts[j])?;
                distinct.insert(keys[i][j].clone());
            }
        }
    }
    let key_id: BTreeMap<&Vec<u8>, u32> = distinct.iter().zip(0u32..).collect();

    let block_system = BlockSystem::new(n, a.parts().to_vec())
        .ok()
        .filter(|s| s.is_invariant(&aut));
    if block_system.is_some() {
        let t = a.len();
        let translation = |i: usize, j: usize| -> Vec<usize> {
            (0..t)
                .map(|p| members[j][parts[i].parts()[p][0]])
                .collect()
        };
        let mut seen: HashMap<Vec<usize>, u32> = HashMap::new();
        let mut back: HashMap<u32, Vec<usize>> = HashMap::new();
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let tr = translation(i, j);
                let id = key_id[&keys[i][j]];
                let a_ok = *seen.entry(tr.clone()).or_insert(id) == id;
                let b_ok = *back.entry(id).or_insert_with(|| tr.clone()) == tr;
                if !a_ok || !b_ok {
                    return Err(Error::ClassificationViolation(
                        "Iso-Type colors of the minimal extension disagree with the part translations".into(),
                    ));
                }
            }
        }
    }

    let e = g.num_ecolors();
    let t = a.len() as u32;
    let blue = g.num_vcolors();
    let mut vcolors = g.vcolors().to_vec();
    vcolors.extend(std::iter::repeat_n(blue, m));
    let ext = Ccd::from_fn(vcolors, |u, v| match (u < n, v < n) {
        (true, true) => g.ecolor(u, v),
        (true, false) => e + members[v - n][u] as u32,
        (false, true) => e + members[u - n][v] as u32,
        (false, false) => e + t + key_id[&keys[u - n][v - n]],
    })?;
    if block_system.is_none() && !is_ultrahomogeneous_with(&ext, budget)?.is_uh {
        return Err(Error::Precondition(
            "the partition is not a block system and the construction is not ultrahomogeneous".into(),
        ));
    }
    Ok(ext)
}

/// Data for replacing color class `class` of `host` by `filler`: block `i`
/// of `blocks` stands for host vertex `tau[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupSpec {
    pub host: Ccd,
    pub class: u32,
    pub filler: Ccd,
    pub blocks: BlockSystem,
    pub tau: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blowup {
    pub graph: Ccd,
    pub easygoing: bool,
}

impl BlowupSpec {
    /// Finds `tau` by a permutational isomorphism search.
    pub fn new(host: Ccd, class: u32, filler: Ccd, blocks: BlockSystem, budget: &Budget) -> Result<BlowupSpec> {
        let r = class_of(&host, class)?;
        let (hr, _) = induced_subgraph(&host, &r)?;
        let aut_r = automorphism_group_with(&hr, budget)?;
        let aut_h = automorphism_group_with(&filler, budget)?;
        if !blocks.is_invariant(&aut_h) {
            return Err(Error::NotInvariant("blocks are not preserved by the filler's automorphisms".into()));
        }
        let induced = induced_action(&aut_h, &blocks)?;
        let rho = permutational_isomorphism(&induced, &aut_r, budget.perm_iso_max_degree)?.ok_or_else(|| {
            Error::Precondition("the induced action on the blocks is not permutationally isomorphic to the class's automorphism group".into())
        })?;
        let tau = (0..blocks.num_blocks()).map(|i| r[rho.apply(i)]).collect();
        Ok(BlowupSpec {
            host,
            class,
            filler,
            blocks,
            tau,
        })
    }

    pub fn validate(&self, budget: &Budget) -> Result<()> {
        if !self.filler.is_monochromatic() {
            return Err(Error::Precondition("the filler must be vertex-monochromatic".into()));
        }
        if self.blocks.degree() != self.filler.n() {
            return Err(Error::BadPartition("block system has the wrong degree".into()));
        }
        let r = class_of(&self.host, self.class)?;
        let k = self.blocks.num_blocks();
        if k != r.len() || self.tau.len() != k {
            return Err(Error::Precondition("blocks and class differ in size".into()));
        }
        let mut images = Vec::with_capacity(k);
        for &t in &self.tau {
            match r.binary_search(&t) {
                Ok(p) => images.push(p),
                Err(_) => return Err(Error::Precondition(format!("tau maps a block to {t}, outside the class"))),
            }
        }
        let rho = Perm::from_images(images).map_err(|_| Error::Precondition("tau is not a bijection".into()))?;
        let (hr, _) = induced_subgraph(&self.host, &r)?;
        let aut_r = automorphism_group_with(&hr, budget)?;
        let aut_h = automorphism_group_with(&self.filler, budget)?;
        if !self.blocks.is_invariant(&aut_h) {
            return Err(Error::NotInvariant("blocks are not preserved by the filler's automorphisms".into()));
        }
        let induced = induced_action(&aut_h, &self.blocks)?;
        if !induced.conjugate_by(&rho).same_as(&aut_r) {
            return Err(Error::Precondition("tau is not a permutational isomorphism".into()));
        }
        Ok(())
    }
}

/// `host[filler ->_tau R]`. Vertices outside `R` come first in their host
/// order, followed by the filler's vertices. Filler edge colors are shifted
/// past the host's.
pub fn blow_up(spec: &BlowupSpec, budget: &Budget) -> Result<Blowup> {
    spec.validate(budget)?;
    let host = &spec.host;
    let outside: Vec<usize> = (0..host.n()).filter(|&v| host.vcolor(v) != spec.class).collect();
    let s = outside.len();
    let hat = |x: usize| -> usize {
        if x < s {
            outside[x]
        } else {
            spec.tau[spec.blocks.block_of(x - s)]
        }
    };
    let total = s + spec.filler.n();
    let vcolors = (0..total).map(|x| host.vcolor(hat(x))).collect();
    let off = host.num_ecolors();
    let graph = Ccd::from_fn(vcolors, |x, y| {
        if x >= s && y >= s {
            off + spec.filler.ecolor(x - s, y - s)
        } else {
            host.ecolor(hat(x), hat(y))
        }
    })?;
    let aut_h = automorphism_group_with(&spec.filler, budget)?;
    let easygoing = easygoing_violation(&aut_h, &spec.blocks, budget.easygoing_max_blocks)?.is_none();
    Ok(Blowup { graph, easygoing })
}

// Colors of ordered pairs by orbit under the group; the diagonal is 0.
fn orbital_colors(grp: &PermGroup) -> Vec<u32> {
    let k = grp.degree();
    let mut col = vec![u32::MAX; k * k];
    let mut next = 1;
    for x in 0..k {
        col[x * k + x] = 0;
    }
    for start in 0..k * k {
        if col[start] != u32::MAX {
            continue;
        }
        col[start] = next;
        let mut queue = vec![start];
        while let Some(pq) = queue.pop() {
            for p in grp.generators() {
                let img = p.apply(pq / k) * k + p.apply(pq % k);
                if col[img] == u32::MAX {
                    col[img] = next;
                    queue.push(img);
                }
            }
        }
        next += 1;
    }
    col
}

/// Every way of reading `g` as a non-trivial blow-up of one color class.
/// For each class, block systems whose blocks connect uniformly to every
/// outside vertex are kept when the induced action on the blocks is the
/// full automorphism group of its orbital graph; that orbital graph is the
/// quotient class. Each result is a spec whose blow-up is `g` up to vertex
/// order and edge color names.
pub fn blowup_decompositions(g: &Ccd, budget: &Budget) -> Result<Vec<BlowupSpec>> {
    let mut out = Vec::new();
    for (c, r) in g.color_classes().into_iter().enumerate() {
        if r.len() < 4 {
            continue;
        }
        let (h, _) = induced_subgraph(g, &r)?;
        let aut_h = automorphism_group_with(&h, budget)?;
        if !aut_h.is_transitive() {
            continue;
        }
        let outside: Vec<usize> = (0..g.n()).filter(|&v| g.vcolor(v) != c as u32).collect();
        for sys in all_block_systems(&aut_h)? {
            if sys.is_trivial() {
                continue;
            }
            let uniform = sys.blocks().iter().all(|blk| {
                outside.iter().all(|&w| {
                    let x0 = r[blk[0]];
                    blk.iter()
                        .all(|&i| g.ecolor(r[i], w) == g.ecolor(x0, w) && g.ecolor(w, r[i]) == g.ecolor(w, x0))
                })
            });
            if !uniform {
                continue;
            }
            let induced = induced_action(&aut_h, &sys)?;
            let k = sys.num_blocks();
            let orb = orbital_colors(&induced);
            let quotient_class = Ccd::from_fn(vec![0; k], |i, j| orb[i * k + j])?;
            if automorphism_group_with(&quotient_class, budget)?.order() != induced.order() {
                continue;
            }
            let s = outside.len();
            let rep = |x: usize| -> usize {
                if x < s {
                    outside[x]
                } else {
                    r[sys.block(x - s)[0]]
                }
            };
            let vcolors = (0..s + k).map(|x| g.vcolor(rep(x))).collect();
            let off = g.num_ecolors();
            let host = Ccd::from_fn(vcolors, |x, y| {
                if x >= s && y >= s {
                    off + orb[(x - s) * k + (y - s)]
                } else {
                    g.ecolor(rep(x), rep(y))
                }
            })?;
            let class = host.vcolor(s);
            out.push(BlowupSpec {
                host,
                class,
                filler: h.clone(),
                blocks: sys,
                tau: (s..s + k).collect(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autiso::isomorphic_names_free;
    use crate::ccd::{color_disjoint_union, directed_cycle, edgeless, wreath_product};
    use crate::moves::equivalent_up_to_colors;

    fn b() -> Budget {
        Budget::default()
    }

    fn diagonals() -> OrderedPartition {
        OrderedPartition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap()
    }

    fn c4_with_diagonal_pair() -> Ccd {
        // reds 0..4 on a C4, blue 4 beats {0,2}, blue 5 beats {1,3}
        let mut arcs = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        arcs.extend([(4, 0), (4, 2), (5, 1), (5, 3)]);
        let g = Ccd::from_arcs(6, &arcs).unwrap();
        with_vcolors(&g, vec![0, 0, 0, 0, 1, 1]).unwrap()
    }

    fn brute_uh(g: &Ccd) -> bool {
        is_ultrahomogeneous_with(g, &Budget::unlimited()).unwrap().is_uh
    }

    #[test]
    fn neighborhood_partitions() {
        let g = c4_with_diagonal_pair();
        let a = neighborhood_partition(&g, &[0, 1, 2, 3], 4).unwrap();
        assert_eq!(a.parts(), &[vec![0, 2], vec![1, 3]]);
        assert!(neighborhood_partition(&g, &[0, 1, 4], 4).is_err());
        let u = color_disjoint_union(&directed_cycle(3), &edgeless(1));
        assert!(neighborhood_partition(&u, &[0, 1, 2], 3).unwrap().is_trivial());
    }

    #[test]
    fn c4_diagonals_form_a_system() {
        let c4 = directed_cycle(4);
        let orb = partition_orbit(&c4, &diagonals(), &b()).unwrap();
        assert_eq!(orb.members.len(), 2);
        let v = is_uh_partition_system(&c4, &diagonals(), &b()).unwrap();
        assert!(v.holds);
        let mixed = OrderedPartition::new(4, vec![vec![0], vec![1, 2, 3]]).unwrap();
        let v = is_uh_partition_system(&c4, &mixed, &b()).unwrap();
        assert!(!v.holds);
        let f = v.failure.unwrap();
        let refined = refine_coloring(&c4, &f.partitions).unwrap();
        assert!(f.witness.validate(&refined).is_ok());
    }

    #[test]
    fn singleton_orbits_in_edgeless() {
        let e = edgeless(5);
        let a = OrderedPartition::new(5, vec![vec![2], vec![0, 1, 3, 4]]).unwrap();
        assert_eq!(partition_orbit(&e, &a, &b()).unwrap().members.len(), 5);
        assert!(is_uh_partition_system(&e, &a, &b()).unwrap().holds);
    }

    #[test]
    fn easygoing_examples() {
        let c3 = directed_cycle(3);
        let e2c3 = wreath_product(&edgeless(2), &c3);
        let tri = BlockSystem::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(is_easygoing(&e2c3, &tri, &b()).unwrap().holds);
        assert!(is_easygoing(&e2c3, &BlockSystem::discrete(6), &b()).unwrap().holds);
        let c4 = directed_cycle(4);
        let diag = BlockSystem::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert!(is_easygoing(&c4, &diag, &b()).unwrap().holds);
        let bad = BlockSystem::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(is_easygoing(&c4, &bad, &b()).is_err());
    }

    #[test]
    fn c3_e2_with_fibers_is_easygoing() {
        let g = wreath_product(&directed_cycle(3), &edgeless(2));
        let fibers = BlockSystem::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        assert!(is_easygoing(&g, &fibers, &b()).unwrap().holds);
    }

    // Cayley color graph of Sym(3): its automorphisms are exactly the left
    // translations, which act regularly.
    fn cayley_s3() -> (Ccd, Vec<Perm>) {
        let els: Vec<Perm> = PermGroup::symmetric(3).elements().unwrap().to_vec();
        let idx = |p: &Perm| els.iter().position(|q| q == p).unwrap() as u32;
        let g = Ccd::from_fn(vec![0; 6], |i, j| idx(&els[j].then(&els[i].inverse()))).unwrap();
        (g, els)
    }

    #[test]
    fn regular_action_on_cosets_is_not_easygoing() {
        let (g, els) = cayley_s3();
        assert_eq!(automorphism_group_with(&g, &b()).unwrap().order(), 6);
        let h = Perm::transposition(3, 0, 1);
        let pos = |p: &Perm| els.iter().position(|q| q == p).unwrap();
        let cosets: Vec<Vec<usize>> = els
            .iter()
            .map(|x| {
                let mut c = vec![pos(x), pos(&h.then(x))];
                c.sort();
                c
            })
            .collect();
        let sys = BlockSystem::new(6, cosets.into_iter().collect::<BTreeSet<_>>().into_iter().collect()).unwrap();
        let v = is_easygoing(&g, &sys, &b()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.violating.unwrap().len(), 1);
        assert!(is_easygoing(&g, &BlockSystem::discrete(6), &b()).unwrap().holds);
        assert!(is_easygoing(&g, &BlockSystem::universal(6), &b()).unwrap().holds);
    }

    #[test]
    fn blocks_must_be_invariant() {
        let sys = BlockSystem::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(is_easygoing(&edgeless(4), &sys, &b()), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn lift_matches_the_lemma() {
        let g = wreath_product(&edgeless(3), &directed_cycle(3));
        let aut = automorphism_group_with(&g, &b()).unwrap();
        let sys = BlockSystem::new(9, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap();
        let els = aut.elements().unwrap();
        let mut checked = 0;
        for psi in els.iter().step_by(17) {
            for phi in els.iter().step_by(23) {
                let (pb, fb) = (sys.project(psi).unwrap(), sys.project(phi).unwrap());
                let chosen: Vec<usize> = (0..3).filter(|&i| pb.apply(i) == fb.apply(i)).collect();
                let tau = easygoing_lift(&aut, &sys, psi, phi, &chosen).unwrap().unwrap();
                assert!(g.is_automorphism(&tau));
                assert_eq!(sys.project(&tau).unwrap(), pb);
                for x in sys.union_of(&chosen) {
                    assert_eq!(tau.apply(x), phi.apply(x));
                }
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn c4_with_diagonal_pair_satisfies_all_conditions() {
        let g = c4_with_diagonal_pair();
        let rep = check_general_extension(&g, 0, 1, &b()).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.blocks, vec![vec![5], vec![4]]);
        assert!(brute_uh(&g));
    }

    #[test]
    fn lone_blue_neighbor_fails_condition_two() {
        let g = Ccd::from_arcs(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 0)]).unwrap();
        let g = with_vcolors(&g, vec![0, 0, 0, 0, 1]).unwrap();
        let rep = check_general_extension(&g, 0, 1, &b()).unwrap();
        assert!(rep.induced_uh);
        assert!(!rep.partition_system);
        assert!(!rep.holds());
        assert!(!brute_uh(&g));
    }

    #[test]
    fn disjoint_unions_satisfy_everything() {
        let g = color_disjoint_union(&directed_cycle(4), &wreath_product(&edgeless(2), &directed_cycle(3)));
        let rep = check_general_extension(&g, 0, 1, &b()).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.partitions.len(), 1);
    }

    #[test]
    fn split_classes_fail_condition_three() {
        // blues 3,4,5 on E_3; red 0,1,2 on E_3; blues 3,4 see red 0, blue 5
        // sees red 1: classes {3,4} and {5}
        let g = Ccd::from_fn(vec![0, 0, 0, 1, 1, 1], |u, v| match (u, v) {
            (3, 0) | (4, 0) | (5, 1) => 1,
            _ => 0,
        })
        .unwrap();
        let rep = check_general_extension(&g, 0, 1, &b()).unwrap();
        assert!(!rep.holds());
        assert!(!brute_uh(&g));
    }

    #[test]
    fn minimal_extension_of_c4_is_c4_with_diagonal_pair() {
        let ext = minimal_extension(&directed_cycle(4), &diagonals(), &b()).unwrap();
        assert_eq!(ext.n(), 6);
        assert!(brute_uh(&ext));
        assert!(equivalent_up_to_colors(&ext, &c4_with_diagonal_pair()).is_some());
        let rep = check_general_extension(&ext, 0, 1, &b()).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn minimal_extension_of_edgeless_is_a_matching() {
        for n in 2..=4 {
            let a = OrderedPartition::new(n, vec![vec![0], (1..n).collect()]).unwrap();
            let ext = minimal_extension(&edgeless(n), &a, &b()).unwrap();
            assert_eq!(ext.n(), 2 * n);
            let matching = Ccd::from_fn(
                (0..2 * n).map(|v| (v >= n) as u32).collect(),
                |u, v| (u < n && v == u + n) as u32,
            )
            .unwrap();
            assert!(equivalent_up_to_colors(&ext, &matching).is_some());
        }
    }

    #[test]
    fn minimal_extension_rejects_non_systems() {
        let mixed = OrderedPartition::new(4, vec![vec![0], vec![1, 2, 3]]).unwrap();
        assert!(matches!(
            minimal_extension(&directed_cycle(4), &mixed, &b()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn minimal_extension_of_c3_e2() {
        let g = wreath_product(&directed_cycle(3), &edgeless(2));
        let a = OrderedPartition::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let ext = minimal_extension(&g, &a, &b()).unwrap();
        assert_eq!(ext.n(), 9);
        assert!(brute_uh(&ext));
    }

    fn matching_2() -> Ccd {
        Ccd::from_fn(vec![0, 0, 1, 1], |u, v| (u < 2 && v == u + 2) as u32).unwrap()
    }

    #[test]
    fn blowing_up_by_c4_gives_both_c4_extensions() {
        let diag = BlockSystem::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let spec = BlowupSpec::new(matching_2(), 0, directed_cycle(4), diag, &b()).unwrap();
        let bu = blow_up(&spec, &b()).unwrap();
        assert!(bu.easygoing);
        assert_eq!(bu.graph.n(), 6);
        assert!(brute_uh(&bu.graph));
        assert!(equivalent_up_to_colors(&bu.graph, &c4_with_diagonal_pair()).is_some());
        let diag = BlockSystem::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let class = bu.graph.vcolor(0);
        let both = BlowupSpec::new(bu.graph, class, directed_cycle(4), diag, &b()).unwrap();
        let right = blow_up(&both, &b()).unwrap().graph;
        assert_eq!(right.n(), 8);
        assert!(brute_uh(&right));
    }

    #[test]
    fn blow_up_by_triangles() {
        let tri = BlockSystem::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let e2c3 = wreath_product(&edgeless(2), &directed_cycle(3));
        let spec = BlowupSpec::new(matching_2(), 0, e2c3.clone(), tri.clone(), &b()).unwrap();
        let one = blow_up(&spec, &b()).unwrap();
        assert!(one.easygoing);
        let spec = BlowupSpec::new(one.graph.clone(), one.graph.vcolor(0), e2c3, tri, &b()).unwrap();
        let two = blow_up(&spec, &b()).unwrap().graph;
        assert_eq!(two.n(), 12);
        assert!(brute_uh(&one.graph));
        assert!(brute_uh(&two));
    }

    #[test]
    fn trivial_blow_up_keeps_the_host() {
        let host = matching_2();
        let spec = BlowupSpec::new(host.clone(), 1, edgeless(2), BlockSystem::discrete(2), &b()).unwrap();
        let g = blow_up(&spec, &b()).unwrap().graph;
        assert!(equivalent_up_to_colors(&g, &host).is_some());
    }

    #[test]
    fn bad_tau_is_rejected() {
        let diag = BlockSystem::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let mut spec = BlowupSpec::new(matching_2(), 0, directed_cycle(4), diag.clone(), &b()).unwrap();
        spec.tau = vec![0, 0];
        assert!(blow_up(&spec, &b()).is_err());
        assert!(BlowupSpec::new(matching_2(), 0, edgeless(3), BlockSystem::discrete(3), &b()).is_err());
    }

    #[test]
    fn decompositions_of_lachlan_graphs() {
        let c3 = directed_cycle(3);
        let cases: Vec<(Ccd, Option<Ccd>)> = vec![
            (directed_cycle(4), Some(edgeless(2))),
            (wreath_product(&edgeless(3), &c3), Some(edgeless(3))),
            (wreath_product(&c3, &edgeless(2)), Some(c3.clone())),
            (edgeless(6), None),
            (crate::families::h0(), None),
            (c3.clone(), None),
        ];
        for (g, quotient) in cases {
            let d = blowup_decompositions(&g, &b()).unwrap();
            match quotient {
                None => assert!(d.is_empty(), "{g:?}"),
                Some(q) => {
                    assert_eq!(d.len(), 1, "{g:?}");
                    assert!(isomorphic_names_free(&d[0].host, &q).is_some());
                    let back = blow_up(&d[0], &b()).unwrap().graph;
                    assert!(isomorphic_names_free(&back, &g).is_some());
                }
            }
        }
    }

    #[test]
    fn decompositions_in_colored_graphs() {
        let diag = BlockSystem::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let spec = BlowupSpec::new(matching_2(), 0, directed_cycle(4), diag, &b()).unwrap();
        let g = blow_up(&spec, &b()).unwrap().graph;
        let d = blowup_decompositions(&g, &b()).unwrap();
        assert_eq!(d.len(), 1);
        let back = blow_up(&d[0], &b()).unwrap().graph;
        assert!(isomorphic_names_free(&back, &g).is_some());
        assert!(equivalent_up_to_colors(&d[0].host, &matching_2()).is_some());
    }
}
