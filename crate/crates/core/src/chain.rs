//! Stabilizer chains via deterministic Schreier–Sims.

use std::collections::HashSet;

use crate::perm::Perm;

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub point: usize,
    pub gens: Vec<Perm>,
    pub orbit: Vec<usize>,
    // trans[x] maps `point` to `x`
    pub trans: Vec<Option<Perm>>,
    tinv: Vec<Option<Perm>>,
    checked: HashSet<(usize, usize)>,
}

impl Level {
    fn new(n: usize, point: usize) -> Level {
        let mut trans = vec![None; n];
        let mut tinv = vec![None; n];
        trans[point] = Some(Perm::identity(n));
        tinv[point] = Some(Perm::identity(n));
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            trans,
            tinv,
            checked: HashSet::new(),
        }
    }

    fn add_gen(&mut self, g: Perm) {
        self.gens.push(g);
        let mut i = 0;
        while i < self.orbit.len() {
            let y = self.orbit[i];
            for s in &self.gens {
                let z = s.apply(y);
                if self.trans[z].is_none() {
                    let t = self.trans[y].as_ref().unwrap().then(s);
                    self.tinv[z] = Some(t.inverse());
                    self.trans[z] = Some(t);
                    self.orbit.push(z);
                }
            }
            i += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct StabChain {
    pub n: usize,
    pub levels: Vec<Level>,
}

impl StabChain {
    /// Builds a chain whose base starts with `prefix`.
    pub fn build(n: usize, gens: &[Perm], prefix: &[usize]) -> StabChain {
        let mut chain = StabChain {
            n,
            levels: prefix.iter().map(|&p| Level::new(n, p)).collect(),
        };
        for g in gens {
            if g.is_identity() {
                continue;
            }
            let fixes_base = chain.levels.iter().all(|l| g.apply(l.point) == l.point);
            if fixes_base {
                let p = (0..n).find(|&x| g.apply(x) != x).unwrap();
                chain.levels.push(Level::new(n, p));
            }
            for l in 0..chain.levels.len() {
                chain.levels[l].add_gen(g.clone());
                if g.apply(chain.levels[l].point) != chain.levels[l].point {
                    break;
                }
            }
        }
        chain.complete();
        chain
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            match self.find_residue(lvl) {
                None => i -= 1,
                Some((res, j)) => {
                    if j == self.levels.len() {
                        let p = (0..self.n).find(|&x| res.apply(x) != x).unwrap();
                        self.levels.push(Level::new(self.n, p));
                    }
                    for l in lvl + 1..=j {
                        self.levels[l].add_gen(res.clone());
                    }
                    i = j as isize;
                }
            }
        }
    }

    fn find_residue(&mut self, lvl: usize) -> Option<(Perm, usize)> {
        let mut oi = 0;
        while oi < self.levels[lvl].orbit.len() {
            let y = self.levels[lvl].orbit[oi];
            for si in 0..self.levels[lvl].gens.len() {
                if self.levels[lvl].checked.contains(&(y, si)) {
                    continue;
                }
                let level = &self.levels[lvl];
                let s = &level.gens[si];
                let z = s.apply(y);
                let h = level.trans[y]
                    .as_ref()
                    .unwrap()
                    .then(s)
                    .then(level.tinv[z].as_ref().unwrap());
                if !h.is_identity() {
                    let (res, j) = self.sift(&h, lvl + 1);
                    if j < self.levels.len() || !res.is_identity() {
                        return Some((res, j));
                    }
                }
                self.levels[lvl].checked.insert((y, si));
            }
            oi += 1;
        }
        None
    }

    /// Strips `g` through the levels from `from`; returns the residue and the
    /// level where stripping stopped (`levels.len()` if it went through).
    pub fn sift(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut g = g.clone();
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let x = g.apply(level.point);
            match &level.tinv[x] {
                None => return (g, l),
                Some(t) => g = g.then(t),
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (res, j) = self.sift(g, 0);
        j == self.levels.len() && res.is_identity()
    }

    /// Group order, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        self.levels
            .iter()
            .fold(1u128, |acc, l| acc.saturating_mul(l.orbit.len() as u128))
    }

    #[cfg(test)]
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// The chain of the stabilizer of the first `k` base points.
    pub fn suffix(&self, k: usize) -> StabChain {
        StabChain {
            n: self.n,
            levels: self.levels[k..].to_vec(),
        }
    }

    /// All elements, or `None` if the order exceeds `cap`.
    pub fn elements(&self, cap: usize) -> Option<Vec<Perm>> {
        if self.order() > cap as u128 {
            return None;
        }
        let mut cur = vec![Perm::identity(self.n)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(cur.len() * level.orbit.len());
            for &x in &level.orbit {
                let t = level.trans[x].as_ref().unwrap();
                for h in &cur {
                    next.push(h.then(t));
                }
            }
            cur = next;
        }
        Some(cur)
    }

    /// Backtrack over all elements. `prune(level, base_point, image)` returning
    /// false cuts every element mapping the base point there; `visit` sees
    /// each surviving element and returns false to stop. Returns the number of
    /// leaves visited or `None` if `leaf_cap` was hit.
    pub fn search(
        &self,
        prune: &mut dyn FnMut(usize, usize, usize) -> bool,
        visit: &mut dyn FnMut(&Perm) -> bool,
        leaf_cap: usize,
    ) -> Option<usize> {
        let mut leaves = 0usize;
        let id = Perm::identity(self.n);
        let mut stop = false;
        let ok = self.search_rec(0, &id, prune, visit, &mut leaves, leaf_cap, &mut stop);
        ok.then_some(leaves)
    }

    #[allow(clippy::too_many_arguments)]
    fn search_rec(
        &self,
        l: usize,
        q: &Perm,
        prune: &mut dyn FnMut(usize, usize, usize) -> bool,
        visit: &mut dyn FnMut(&Perm) -> bool,
        leaves: &mut usize,
        cap: usize,
        stop: &mut bool,
    ) -> bool {
        if l == self.levels.len() {
            *leaves += 1;
            if *leaves > cap {
                return false;
            }
            if !visit(q) {
                *stop = true;
            }
            return true;
        }
        let level = &self.levels[l];
        for &x in &level.orbit {
            let img = q.apply(x);
            if !prune(l, level.point, img) {
                continue;
            }
            let next = level.trans[x].as_ref().unwrap().then(q);
            if !self.search_rec(l + 1, &next, prune, visit, leaves, cap, stop) {
                return false;
            }
            if *stop {
                return true;
            }
        }
        true
    }
}
