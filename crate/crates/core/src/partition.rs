use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;

/// A tuple of disjoint nonempty cells covering `0..ground`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedPartition {
    parts: Vec<Vec<usize>>,
}

impl OrderedPartition {
    pub fn new(ground: usize, mut parts: Vec<Vec<usize>>) -> Result<OrderedPartition> {
        let mut seen = vec![false; ground];
        for p in parts.iter_mut() {
            if p.is_empty() {
                return Err(Error::BadPartition("empty part".into()));
            }
            p.sort_unstable();
            for &x in p.iter() {
                if x >= ground {
                    return Err(Error::VertexOutOfRange(x, ground));
                }
                if seen[x] {
                    return Err(Error::BadPartition(format!("vertex {x} in two parts")));
                }
                seen[x] = true;
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::BadPartition(format!("vertex {x} not covered")));
        }
        Ok(OrderedPartition { parts })
    }

    /// Parts ordered by ascending label; equal labels share a part.
    pub fn from_labels<L: Ord + Copy>(labels: &[L]) -> OrderedPartition {
        let mut keys: Vec<L> = labels.to_vec();
        keys.sort_unstable();
        keys.dedup();
        let mut parts = vec![Vec::new(); keys.len()];
        for (v, l) in labels.iter().enumerate() {
            let i = keys.binary_search(l).unwrap();
            parts[i].push(v);
        }
        OrderedPartition { parts }
    }

    pub fn trivial(ground: usize) -> OrderedPartition {
        OrderedPartition {
            parts: vec![(0..ground).collect()],
        }
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn ground(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.parts.iter().all(|p| p.len() == 1)
    }

    /// Part index of every point.
    pub fn part_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.ground()];
        for (i, p) in self.parts.iter().enumerate() {
            for &x in p {
                idx[x] = i;
            }
        }
        idx
    }

    /// The image partition `phi(A)`, with `pi_i(phi(A)) = phi(pi_i(A))`.
    pub fn image(&self, phi: &Perm) -> OrderedPartition {
        OrderedPartition {
            parts: self
                .parts
                .iter()
                .map(|p| {
                    let mut q: Vec<usize> = p.iter().map(|&x| phi.apply(x)).collect();
                    q.sort_unstable();
                    q
                })
                .collect(),
        }
    }

    /// The cells as an unordered, canonically sorted partition.
    pub fn unordered(&self) -> Vec<Vec<usize>> {
        let mut cells = self.parts.clone();
        cells.sort();
        cells
    }
}

/// Order-preserving dense renaming of `values`; returns the new values and
/// the number of distinct ones.
pub(crate) fn dense_ranks(values: &[u32]) -> (Vec<u32>, usize) {
    let mut distinct = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let ranks = values
        .iter()
        .map(|v| distinct.binary_search(v).unwrap() as u32)
        .collect();
    (ranks, distinct.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_order_parts() {
        let a = OrderedPartition::from_labels(&[2, 0, 2, 0]);
        assert_eq!(a.parts(), &[vec![1, 3], vec![0, 2]]);
        assert_eq!(a.part_index(), vec![1, 0, 1, 0]);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(OrderedPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(OrderedPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(OrderedPartition::new(2, vec![vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn image_under_rotation() {
        let a = OrderedPartition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let rot = Perm::cycle(4, &[0, 1, 2, 3]).unwrap();
        assert_eq!(a.image(&rot).parts(), &[vec![1, 3], vec![0, 2]]);
    }
}
