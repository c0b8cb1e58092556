//! Canonical color refinement and individualization.
//!
//! Cell ids are ranks of sorted signatures, so two isomorphic inputs refine
//! to the same ids and the same trace. In names-free mode the vertex colors
//! and edge colors are themselves refined as a second and third sort, which
//! makes the result invariant under renaming colors.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::ccd::Ccd;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    Named,
    NamesFree,
}

#[derive(Clone, Debug)]
pub(crate) struct State {
    pub cells: Vec<u32>,
    pub ncells: usize,
    // cell of each vertex color and edge color
    pub vc: Vec<u32>,
    pub ec: Vec<u32>,
    pub trace: u64,
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> (Vec<u32>, Vec<T>) {
    let mut distinct = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    let ids = sigs
        .iter()
        .map(|s| distinct.binary_search(s).unwrap() as u32)
        .collect();
    (ids, distinct)
}

fn count(ids: &[u32]) -> usize {
    ids.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

fn mix<T: Hash>(trace: u64, sigs: &T) -> u64 {
    let mut h = DefaultHasher::new();
    trace.hash(&mut h);
    sigs.hash(&mut h);
    h.finish()
}

impl State {
    /// Initial state from per-vertex labels. The labels enter the trace, so
    /// two sides compared later must use comparable labels.
    pub fn new(g: &Ccd, mode: Mode, labels: Option<&[u32]>) -> State {
        let n = g.n();
        let (vc, ec) = match mode {
            Mode::Named => (
                (0..g.num_vcolors()).collect(),
                (0..g.num_ecolors()).collect(),
            ),
            Mode::NamesFree => (
                vec![0; g.num_vcolors() as usize],
                vec![0; g.num_ecolors() as usize],
            ),
        };
        let init: Vec<(u32, u32)> = (0..n)
            .map(|v| (vc[g.vcolor(v) as usize], labels.map_or(0, |l| l[v])))
            .collect();
        let (cells, distinct) = rank(&init);
        let mut sorted = init.clone();
        sorted.sort();
        let trace = mix(mix(n as u64, &distinct), &sorted);
        let ncells = count(&cells);
        let mut s = State {
            cells,
            ncells,
            vc,
            ec,
            trace,
        };
        s.refine(g, mode);
        s
    }

    pub fn is_discrete(&self) -> bool {
        self.ncells == self.cells.len()
    }

    pub fn refine(&mut self, g: &Ccd, mode: Mode) {
        let n = g.n();
        loop {
            let before = (self.ncells, count(&self.vc), count(&self.ec));
            let sigs: Vec<(u32, u32, Vec<(u32, u32, u32)>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(u32, u32, u32)> = (0..n)
                        .filter(|&w| w != v)
                        .map(|w| {
                            (
                                self.ec[g.ecolor(v, w) as usize],
                                self.ec[g.ecolor(w, v) as usize],
                                self.cells[w],
                            )
                        })
                        .collect();
                    nb.sort_unstable();
                    (self.cells[v], self.vc[g.vcolor(v) as usize], nb)
                })
                .collect();
            let (cells, _) = rank(&sigs);
            let mut sorted = sigs;
            sorted.sort();
            self.trace = mix(self.trace, &sorted);
            self.cells = cells;
            self.ncells = count(&self.cells);
            if mode == Mode::NamesFree {
                self.refine_colors(g);
            }
            if before == (self.ncells, count(&self.vc), count(&self.ec)) {
                break;
            }
        }
    }

    fn refine_colors(&mut self, g: &Ccd) {
        let n = g.n();
        let mut vsig: Vec<(u32, Vec<u32>)> = self.vc.iter().map(|&c| (c, Vec::new())).collect();
        for v in 0..n {
            vsig[g.vcolor(v) as usize].1.push(self.cells[v]);
        }
        let mut esig: Vec<(u32, Vec<(u32, u32, u32)>)> =
            self.ec.iter().map(|&c| (c, Vec::new())).collect();
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    esig[g.ecolor(u, v) as usize].1.push((
                        self.cells[u],
                        self.cells[v],
                        self.ec[g.ecolor(v, u) as usize],
                    ));
                }
            }
        }
        for s in vsig.iter_mut() {
            s.1.sort_unstable();
        }
        for s in esig.iter_mut() {
            s.1.sort_unstable();
        }
        let (vc, _) = rank(&vsig);
        let (ec, _) = rank(&esig);
        vsig.sort();
        esig.sort();
        self.trace = mix(mix(self.trace, &vsig), &esig);
        self.vc = vc;
        self.ec = ec;
    }

    /// Splits `x` off its cell and refines.
    pub fn individualize(&self, g: &Ccd, mode: Mode, x: usize) -> State {
        let split: Vec<u32> = self
            .cells
            .iter()
            .enumerate()
            .map(|(w, &c)| if w == x { 2 * c } else { 2 * c + 1 })
            .collect();
        let (cells, _) = rank(&split);
        let mut s = State {
            ncells: count(&cells),
            trace: mix(self.trace, &self.cells[x]),
            cells,
            vc: self.vc.clone(),
            ec: self.ec.clone(),
        };
        s.refine(g, mode);
        s
    }

    /// The first non-singleton cell, as its id and sorted members.
    pub fn target_cell(&self) -> Option<(u32, Vec<usize>)> {
        let mut size = vec![0usize; self.ncells];
        for &c in &self.cells {
            size[c as usize] += 1;
        }
        let id = size.iter().position(|&s| s > 1)? as u32;
        let members = (0..self.cells.len()).filter(|&v| self.cells[v] == id).collect();
        Some((id, members))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccd::{directed_cycle, edgeless};
    use crate::perm::Perm;

    #[test]
    fn regular_graphs_stay_one_cell() {
        let s = State::new(&directed_cycle(5), Mode::Named, None);
        assert_eq!(s.ncells, 1);
        let s = State::new(&edgeless(4), Mode::NamesFree, None);
        assert_eq!(s.ncells, 1);
    }

    #[test]
    fn individualizing_cycle_vertex_discretizes() {
        let g = directed_cycle(5);
        let s = State::new(&g, Mode::Named, None).individualize(&g, Mode::Named, 2);
        assert!(s.is_discrete());
        assert_eq!(s.cells[2], 0);
    }

    #[test]
    fn trace_is_relabeling_invariant() {
        let g = Ccd::from_arcs(5, &[(0, 1), (1, 2), (0, 3), (4, 2)]).unwrap();
        let p = Perm::from_images(vec![3, 0, 4, 1, 2]).unwrap();
        let h = g.relabel(&p);
        for mode in [Mode::Named, Mode::NamesFree] {
            let a = State::new(&g, mode, None);
            let b = State::new(&h, mode, None);
            assert_eq!(a.trace, b.trace);
            for v in 0..5 {
                assert_eq!(a.cells[v], b.cells[p.apply(v)]);
            }
        }
    }

    #[test]
    fn names_free_ignores_color_names() {
        let g = Ccd::from_fn(vec![0, 0, 1], |u, v| if u < v { 0 } else { 1 }).unwrap();
        let h = Ccd::from_fn(vec![1, 1, 0], |u, v| if u < v { 1 } else { 0 }).unwrap();
        assert_eq!(
            State::new(&g, Mode::NamesFree, None).trace,
            State::new(&h, Mode::NamesFree, None).trace
        );
        assert_ne!(
            State::new(&g, Mode::Named, None).trace,
            State::new(&h, Mode::Named, None).trace
        );
    }
}
