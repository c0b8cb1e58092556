//! Block systems of transitive groups and induced actions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;

/// An unordered partition into equal-size blocks. Blocks are kept sorted
/// internally and ordered by least element, which fixes the block indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct BlockSystem {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl BlockSystem {
    pub fn new(degree: usize, mut blocks: Vec<Vec<usize>>) -> Result<BlockSystem> {
        let mut block_of = vec![usize::MAX; degree];
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::BadPartition("empty block".into()));
            }
            if b.len() != blocks[0].len() {
                return Err(Error::BadPartition("blocks differ in size".into()));
            }
            for &v in b {
                if v >= degree {
                    return Err(Error::VertexOutOfRange(v, degree));
                }
                if block_of[v] != usize::MAX {
                    return Err(Error::BadPartition(format!("point {v} in two blocks")));
                }
                block_of[v] = i;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::BadPartition(format!("point {v} uncovered")));
        }
        Ok(BlockSystem { blocks, block_of })
    }

    fn from_labels(labels: &[usize]) -> BlockSystem {
        let n = labels.len();
        let mut map = std::collections::BTreeMap::new();
        for (v, &l) in labels.iter().enumerate() {
            map.entry(l).or_insert_with(Vec::new).push(v);
        }
        BlockSystem::new(n, map.into_values().collect()).expect("labels give a partition")
    }

    pub fn discrete(degree: usize) -> BlockSystem {
        BlockSystem::from_labels(&(0..degree).collect::<Vec<_>>())
    }

    pub fn universal(degree: usize) -> BlockSystem {
        BlockSystem::from_labels(&vec![0; degree])
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.block_size() == 1 || self.num_blocks() == 1
    }

    /// The permutation of block indices induced by `g`.
    pub fn project(&self, g: &Perm) -> Result<Perm> {
        let mut images = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let t = self.block_of[g.apply(b[0])];
            if b.iter().any(|&v| self.block_of[g.apply(v)] != t) {
                return Err(Error::NotInvariant(format!("block {b:?} is split")));
            }
            images.push(t);
        }
        Perm::from_images(images)
    }

    pub fn is_invariant(&self, g: &PermGroup) -> bool {
        g.degree() == self.degree() && g.generators().iter().all(|p| self.project(p).is_ok())
    }

    /// Union of the blocks with the given indices, sorted.
    pub fn union_of(&self, idx: &[usize]) -> Vec<usize> {
        let mut u: Vec<usize> = idx.iter().flat_map(|&i| self.blocks[i].iter().copied()).collect();
        u.sort_unstable();
        u
    }
}

impl TryFrom<Vec<Vec<usize>>> for BlockSystem {
    type Error = Error;
    fn try_from(blocks: Vec<Vec<usize>>) -> Result<BlockSystem> {
        let n = blocks.iter().map(Vec::len).sum();
        BlockSystem::new(n, blocks)
    }
}

impl From<BlockSystem> for Vec<Vec<usize>> {
    fn from(b: BlockSystem) -> Self {
        b.blocks
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
    fn labels(&mut self) -> Vec<usize> {
        (0..self.0.len()).map(|x| self.find(x)).collect()
    }
}

/// The finest invariant partition in which all `pairs` are merged.
fn invariant_closure(g: &PermGroup, pairs: Vec<(usize, usize)>) -> BlockSystem {
    let mut uf = UnionFind::new(g.degree());
    let mut queue = pairs;
    while let Some((x, y)) = queue.pop() {
        if uf.union(x, y) {
            for s in g.generators() {
                queue.push((s.apply(x), s.apply(y)));
            }
        }
    }
    BlockSystem::from_labels(&uf.labels())
}

/// The smallest block system in which `a` and `b` share a block.
pub fn minimal_block_system(g: &PermGroup, a: usize, b: usize) -> Result<BlockSystem> {
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    Ok(invariant_closure(g, vec![(a, b)]))
}

fn join(g: &PermGroup, a: &BlockSystem, b: &BlockSystem) -> BlockSystem {
    let pairs = a
        .blocks()
        .iter()
        .chain(b.blocks())
        .flat_map(|blk| blk.windows(2).map(|w| (w[0], w[1])))
        .collect();
    invariant_closure(g, pairs)
}

/// Every block system of a transitive group, sorted.
pub fn all_block_systems(g: &PermGroup) -> Result<Vec<BlockSystem>> {
    let n = g.degree();
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let mut found: BTreeSet<BlockSystem> = BTreeSet::new();
    found.insert(BlockSystem::discrete(n));
    found.insert(BlockSystem::universal(n));
    let minimal: BTreeSet<BlockSystem> =
        (1..n).map(|x| invariant_closure(g, vec![(0, x)])).collect();
    let mut frontier: Vec<BlockSystem> = minimal.iter().cloned().collect();
    found.extend(minimal.iter().cloned());
    while let Some(s) = frontier.pop() {
        for m in &minimal {
            let j = join(g, &s, m);
            if found.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    let out: Vec<BlockSystem> = found.into_iter().collect();
    debug_assert!(out.iter().all(|b| b.is_invariant(g)));
    Ok(out)
}

/// The action on block indices; every generator maps to its projection.
pub fn induced_action(g: &PermGroup, b: &BlockSystem) -> Result<PermGroup> {
    if b.degree() != g.degree() {
        return Err(Error::NotInvariant("degree mismatch".into()));
    }
    let gens = g
        .generators()
        .iter()
        .map(|p| b.project(p))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(g.generators().iter().zip(g.generators().iter().skip(1)).all(|(x, y)| {
        b.project(&x.then(y)).unwrap() == b.project(x).unwrap().then(&b.project(y).unwrap())
    }));
    PermGroup::new(b.num_blocks(), gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    // all set partitions by restricted growth strings
    fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        fn rec(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for l in 0..=max + 1 {
                cur.push(l);
                rec(n, cur, max.max(l), out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, &mut vec![0], 0, &mut out);
        }
        out
    }

    fn brute_force_systems(g: &PermGroup) -> Vec<BlockSystem> {
        let n = g.degree();
        let mut out: Vec<BlockSystem> = all_partitions(n)
            .into_iter()
            .map(|l| {
                let mut map = std::collections::BTreeMap::new();
                for (v, &x) in l.iter().enumerate() {
                    map.entry(x).or_insert_with(Vec::new).push(v);
                }
                map.into_values().collect::<Vec<_>>()
            })
            .filter_map(|blocks| BlockSystem::new(n, blocks).ok())
            .filter(|b| b.is_invariant(g))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn bell_numbers() {
        assert_eq!(all_partitions(4).len(), 15);
        assert_eq!(all_partitions(6).len(), 203);
    }

    #[test]
    fn symmetric_groups_are_primitive() {
        for n in 2..7 {
            let s = all_block_systems(&PermGroup::symmetric(n)).unwrap();
            assert!(s.iter().all(BlockSystem::is_trivial));
            assert_eq!(s.len(), 2);
        }
    }

    #[test]
    fn cyclic_four_has_diagonals() {
        let s = all_block_systems(&PermGroup::cyclic(4)).unwrap();
        let nontrivial: Vec<_> = s.iter().filter(|b| !b.is_trivial()).collect();
        assert_eq!(nontrivial.len(), 1);
        assert_eq!(nontrivial[0].blocks(), &[vec![0, 2], vec![1, 3]]);
        let ind = induced_action(&PermGroup::cyclic(4), nontrivial[0]).unwrap();
        assert_eq!(ind.order(), 2);
    }

    #[test]
    fn pair_closure_matches_brute_force() {
        let groups = vec![
            PermGroup::cyclic(6),
            PermGroup::cyclic(8),
            PermGroup::symmetric(2).wreath(&PermGroup::cyclic(3)).unwrap(),
            PermGroup::cyclic(3).wreath(&PermGroup::symmetric(2)).unwrap(),
            PermGroup::cyclic(2).wreath(&PermGroup::cyclic(2)).unwrap().wreath(&PermGroup::cyclic(2)).unwrap(),
            PermGroup::alternating(5),
        ];
        for g in groups {
            assert_eq!(all_block_systems(&g).unwrap(), brute_force_systems(&g), "{g:?}");
        }
    }

    #[test]
    fn induced_action_examples() {
        let g = PermGroup::cyclic(3).wreath(&PermGroup::symmetric(2)).unwrap();
        let fibers = BlockSystem::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let ind = induced_action(&g, &fibers).unwrap();
        assert_eq!(ind.order(), 3);
        let disc = induced_action(&g, &BlockSystem::discrete(6)).unwrap();
        assert!(disc.same_as(&g));
        let bad = BlockSystem::new(6, vec![vec![0, 2], vec![1, 3], vec![4, 5]]).unwrap();
        assert!(induced_action(&g, &bad).is_err());
        assert!(all_block_systems(&PermGroup::trivial(3)).is_err());
    }

    #[test]
    fn block_system_validation() {
        assert!(BlockSystem::new(4, vec![vec![0], vec![1, 2, 3]]).is_err());
        assert!(BlockSystem::new(4, vec![vec![0, 1], vec![1, 2]]).is_err());
        let b = BlockSystem::new(4, vec![vec![3, 1], vec![2, 0]]).unwrap();
        assert_eq!(b.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(b.block_of(3), 1);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<BlockSystem>(&json).unwrap(), b);
    }
}
