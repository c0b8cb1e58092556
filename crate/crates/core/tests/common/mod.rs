#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uhgraph::autiso::automorphism_group;
use uhgraph::blocks::all_block_systems;
use uhgraph::ccd::{color_disjoint_union, directed_cycle, edgeless, induced_subgraph, wreath_product};
use uhgraph::families::{gen, random_spec, FamilySpec};
use uhgraph::moves::{apply_move, ColorMove};
use uhgraph::theory::{blow_up, is_easygoing, BlowupSpec};
use uhgraph::uh::is_ultrahomogeneous_with;
use uhgraph::{BlockSystem, Budget, Ccd};

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn is_uh(g: &Ccd) -> bool {
    is_ultrahomogeneous_with(g, &Budget::scaled(2)).unwrap().is_uh
}

/// Random small graphs with up to `max_colors` vertex colors and three edge
/// colors.
pub fn arb_ccd(max_n: usize, max_colors: u32) -> impl Strategy<Value = Ccd> {
    (1..=max_n, 1..=max_colors)
        .prop_flat_map(|(n, k)| (prop::collection::vec(0..k, n), prop::collection::vec(0u32..3, n * n)))
        .prop_map(|(vc, e)| {
            let n = vc.len();
            Ccd::from_fn(vc, |u, v| e[u * n + v]).unwrap()
        })
}

/// A classified graph from a random spec.
pub fn arb_family(max_vertices: usize) -> impl Strategy<Value = (FamilySpec, Ccd)> {
    any::<u64>().prop_map(move |seed| {
        let spec = random_spec(&mut ChaCha8Rng::seed_from_u64(seed), max_vertices);
        let g = gen(&spec).unwrap();
        (spec, g)
    })
}

/// Mostly classified graphs, some random ones.
pub fn arb_mixed(max_n: usize) -> impl Strategy<Value = Ccd> {
    prop_oneof![
        2 => arb_family(max_n).prop_map(|(_, g)| g),
        1 => arb_ccd(max_n.min(5), 2),
    ]
}

pub fn arb_move(g: &Ccd) -> impl Strategy<Value = ColorMove> {
    let (vk, ek) = (g.num_vcolors().max(1), g.num_ecolors().max(1));
    let perm = |k: u32| Just((0..k).collect::<Vec<u32>>()).prop_shuffle();
    prop_oneof![
        perm(vk).prop_map(|map| ColorMove::VertexColorChange { map }),
        perm(ek + 1).prop_map(|map| ColorMove::EdgeColorChange { map }),
        (0..ek, 0..ek + 1, 0..vk, 0..vk).prop_map(|(c, d, r, b)| ColorMove::Symmetrize { c, d, r, b }),
        (0..ek, 0..ek + 1, 0..vk, 0..vk).prop_map(|(c, d, r, b)| ColorMove::InverseSymmetrize { c, d, r, b }),
    ]
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

/// Every block of every block system of a transitive ultrahomogeneous graph
/// induces an ultrahomogeneous graph.
pub fn blocks_induce_uh(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&arb_family(12), |(spec, g)| {
            for class in g.color_classes() {
                let (h, _) = induced_subgraph(&g, &class).unwrap();
                let aut = automorphism_group(&h).unwrap();
                for sys in all_block_systems(&aut).unwrap() {
                    for block in sys.blocks() {
                        let (x, _) = induced_subgraph(&h, block).unwrap();
                        if !is_uh(&x) {
                            return Err(fail(format!("{spec}: block {block:?} is not ultrahomogeneous")));
                        }
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// A color-disjoint union is ultrahomogeneous iff both parts are.
pub fn disjoint_union_law(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_mixed(6), arb_mixed(6)), |(g, h)| {
            let u = color_disjoint_union(&g, &h);
            prop_assert_eq!(is_uh(&u), is_uh(&g) && is_uh(&h));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Valid color moves keep the automorphism group and the verdict.
pub fn moves_preserve_aut(runner: &mut TestRunner) -> Result<(), String> {
    let strat = arb_mixed(7).prop_flat_map(|g| {
        let m = prop::collection::vec(arb_move(&g), 1..4);
        (Just(g), m)
    });
    runner
        .run(&strat, |(g, moves)| {
            let mut h = g.clone();
            for m in &moves {
                if let Ok(next) = apply_move(&h, m) {
                    h = next;
                }
            }
            let (a, b) = (automorphism_group(&g).unwrap(), automorphism_group(&h).unwrap());
            prop_assert!(a.same_as(&b), "moves {:?} changed the automorphism group", moves);
            prop_assert_eq!(is_uh(&g), is_uh(&h));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// A filler for class `c` of `g` whose quotient matches the class, and its
// blocks: triangles over an edgeless class, a 4-cycle over two vertices,
// fibers of C3 . E_m over a triangle.
fn filler_for(g: &Ccd, c: u32, pick: u8) -> Option<(Ccd, BlockSystem)> {
    let class: Vec<usize> = (0..g.n()).filter(|&v| g.vcolor(v) == c).collect();
    let (h, _) = induced_subgraph(g, &class).ok()?;
    let n = h.n();
    let c3 = directed_cycle(3);
    if uhgraph::moves::equivalent_up_to_colors(&h, &edgeless(n)).is_some() {
        if n == 2 && pick % 2 == 1 {
            let sys = BlockSystem::new(4, vec![vec![0, 2], vec![1, 3]]).ok()?;
            return Some((directed_cycle(4), sys));
        }
        let blocks = (0..n).map(|b| vec![3 * b, 3 * b + 1, 3 * b + 2]).collect();
        return Some((wreath_product(&edgeless(n), &c3), BlockSystem::new(3 * n, blocks).ok()?));
    }
    if n == 3 && uhgraph::autiso::isomorphic_names_free(&h, &c3).is_some() {
        let m = 2 + (pick % 2) as usize;
        let blocks = (0..3).map(|b| (b * m..(b + 1) * m).collect()).collect();
        return Some((wreath_product(&c3, &edgeless(m)), BlockSystem::new(3 * m, blocks).ok()?));
    }
    None
}

fn perturb(g: &Ccd, class: u32, pairs: &[(usize, usize, u32)]) -> Ccd {
    let n = g.n();
    let mut e: Vec<u32> = (0..n * n).map(|k| if k / n == k % n { 0 } else { g.ecolor(k / n, k % n) }).collect();
    for &(u, v, x) in pairs {
        let (u, v) = (u % n, v % n);
        if u != v && !(g.vcolor(u) == class && g.vcolor(v) == class) {
            e[u * n + v] = x % 2;
        }
    }
    Ccd::from_fn(g.vcolors().to_vec(), |u, v| e[u * n + v]).unwrap()
}

/// An easygoing blow-up of an ultrahomogeneous class is ultrahomogeneous iff
/// the host is.
pub fn blow_up_transfer(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (
        arb_family(7),
        any::<u8>(),
        any::<u8>(),
        prop::collection::vec((0usize..16, 0usize..16, 0u32..2), 0..3),
    );
    let budget = Budget::scaled(2);
    runner
        .run(&strat, |((spec, g), which, pick, flips)| {
            let c = which as u32 % g.num_vcolors();
            let Some((filler, blocks)) = filler_for(&g, c, pick).filter(|(f, _)| f.n() + g.n() <= 16) else {
                return Ok(());
            };
            let host = perturb(&g, c, &flips);
            let bs = BlowupSpec::new(host.clone(), c, filler, blocks, &budget).unwrap();
            let y = blow_up(&bs, &budget).unwrap();
            prop_assert!(y.easygoing, "{}: filler not easygoing", spec);
            prop_assert_eq!(is_uh(&y.graph), is_uh(&host), "{}", spec);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// |Aut(D . D')| = |Aut(D')|^|D| * |Aut(D)| for edge-color disjoint factors.
pub fn wreath_order_law(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_ccd(3, 2), arb_ccd(3, 2)), |(d, dp)| {
            let w = wreath_product(&d, &dp);
            let a = automorphism_group(&d).unwrap().order();
            let ap = automorphism_group(&dp).unwrap().order();
            prop_assert_eq!(automorphism_group(&w).unwrap().order(), ap.pow(d.n() as u32) * a);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// H0, a 3 x 4 discrete tournament block and a chain of three triangles,
/// side by side.
pub fn mixed_composite() -> Ccd {
    let s: FamilySpec = "union(H0, chain(E;n=3,t=4), tri(t=3))".parse().unwrap();
    gen(&s).unwrap()
}

pub fn easygoing_of(g: &Ccd, blocks: &BlockSystem) -> bool {
    is_easygoing(g, blocks, &Budget::default()).unwrap().holds
}
