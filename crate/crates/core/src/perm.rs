//! Permutations of `0..n` in image-array form.
//!
//! Composition follows the right-action convention used for groups
//! throughout the crate: `v^(ab) = (v^a)^b`, so `a.then(&b)` applies `a`
//! first.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPerm(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Perm {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm { images }
    }

    /// Transposition of `a` and `b` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Perm { images }
    }

    /// The cycle `c[0] -> c[1] -> ... -> c[0]` on `n` points.
    pub fn cycle(n: usize, c: &[usize]) -> Result<Perm> {
        let mut images: Vec<usize> = (0..n).collect();
        for (i, &x) in c.iter().enumerate() {
            images[x] = c[(i + 1) % c.len()];
        }
        Perm::from_images(images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn order(&self) -> usize {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut ord = 1usize;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    pub fn is_even(&self) -> bool {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for s in 0..n {
            let mut x = s;
            let mut len = 0;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 0
    }

    /// Conjugate by a relabeling: the permutation `rho(v) -> rho(self(v))`.
    pub fn conjugate_by(&self, rho: &Perm) -> Perm {
        let mut images = vec![0; self.images.len()];
        for v in 0..self.images.len() {
            images[rho.apply(v)] = rho.apply(self.images[v]);
        }
        Perm { images }
    }

    pub fn fixes_all(&self, points: &[usize]) -> bool {
        points.iter().all(|&p| self.images[p] == p)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Perm> {
        Perm::from_images(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Vec<usize> {
        p.images
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.images, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_right_action() {
        let a = Perm::cycle(3, &[0, 1, 2]).unwrap();
        let b = Perm::transposition(3, 0, 1);
        let ab = a.then(&b);
        for v in 0..3 {
            assert_eq!(ab.apply(v), b.apply(a.apply(v)));
        }
        assert!(a.then(&a.inverse()).is_identity());
    }

    #[test]
    fn orders_and_parity() {
        assert_eq!(Perm::cycle(5, &[0, 1, 2]).unwrap().order(), 3);
        let p = Perm::from_images(vec![1, 0, 3, 4, 2]).unwrap();
        assert_eq!(p.order(), 6);
        assert!(!p.is_even());
        assert!(Perm::cycle(4, &[0, 1, 2]).unwrap().is_even());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![0, 2]).is_err());
    }

    #[test]
    fn conjugation_relabels_cycles() {
        let g = Perm::cycle(3, &[0, 1, 2]).unwrap();
        let rho = Perm::transposition(3, 0, 1);
        let c = g.conjugate_by(&rho);
        // 1 -> 0 -> 2 -> 1
        assert_eq!(c.images(), &[2, 0, 1]);
    }
}
