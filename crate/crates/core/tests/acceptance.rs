//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits with status 1 if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uhgraph::autiso::{automorphism_group, isomorphic_names_free};
use uhgraph::blocks::{all_block_systems, induced_action};
use uhgraph::ccd::{with_vcolors, wreath_product};
use uhgraph::classifier::{
    classify, verify_bichromatic, verify_extension_equivalence, verify_lachlan, Classification, VerifyOptions,
};
use uhgraph::families::{gen, random_spec};
use uhgraph::group::{recognize, GroupName};
use uhgraph::moves::{equivalence_key, equivalent_up_to_colors};
use uhgraph::theory::{blow_up, blowup_decompositions, minimal_extension};
use uhgraph::{Budget, Ccd, OrderedPartition};

const LACHLAN_5_LIMIT: Duration = Duration::from_secs(60);
const LACHLAN_6_LIMIT: Duration = Duration::from_secs(15 * 60);
const GROUP_LIMIT: Duration = Duration::from_secs(1);
const EXTENSION_LIMIT: Duration = Duration::from_secs(10 * 60);
const EXTENSION_SEED: u64 = 20240611;
const EXTENSION_RANDOM: usize = 500;
const MINIMAL_LIMIT: Duration = Duration::from_secs(1);
const BLOWUP_LIMIT: Duration = Duration::from_secs(2 * 60);
const BICHROMATIC_LIMIT: Duration = Duration::from_secs(30 * 60);
const PROPERTY_LIMIT: Duration = Duration::from_secs(5 * 60);
const ROUND_TRIP_SPECS: usize = 200;
const ROUND_TRIP_MAX_VERTICES: usize = 12;
const ROUND_TRIP_SEED: u64 = 7;

type Outcome = Result<String, String>;

fn cycle(n: usize) -> Ccd {
    let arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ccd::from_arcs(n, &arcs).unwrap()
}

fn empty(n: usize) -> Ccd {
    Ccd::from_arcs(n, &[]).unwrap()
}

// Triangles on fibers {2i, 2i+1}: every vertex of fiber i points to every
// vertex of fiber i+1.
fn c3_of_pairs() -> Ccd {
    let mut arcs = Vec::new();
    for i in 0..3 {
        for a in 0..2 {
            for b in 0..2 {
                arcs.push((2 * i + a, 2 * ((i + 1) % 3) + b));
            }
        }
    }
    Ccd::from_arcs(6, &arcs).unwrap()
}

fn two_triangles() -> Ccd {
    Ccd::from_arcs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
}

// Cayley digraph of the quaternion group on {i, j, k}. Element `2 * u + s`
// is the unit u in (1, i, j, k) with sign (-1)^s.
fn h0_from_quaternions() -> Ccd {
    let unit = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, x) | (x, 0) => (x, 0),
            (x, y) if x == y => (0, 1),
            (x, y) if y == x % 3 + 1 => (6 - x - y, 0),
            (x, y) => (6 - x - y, 1),
        }
    };
    let mul = |x: usize, y: usize| {
        let (u, s) = unit(x / 2, y / 2);
        2 * u + (s + x % 2 + y % 2) % 2
    };
    let mut arcs = Vec::new();
    for g in 0..8 {
        for s in [2, 4, 6] {
            arcs.push((g, mul(g, s)));
        }
    }
    Ccd::from_arcs(8, &arcs).unwrap()
}

fn c4_diagonals_from_arcs() -> Ccd {
    let g = Ccd::from_arcs(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 2), (5, 1), (5, 3)]).unwrap();
    with_vcolors(&g, vec![0, 0, 0, 0, 1, 1]).unwrap()
}

fn c4_cycles_from_arcs() -> Ccd {
    let mut arcs = vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)];
    for b in 4..8 {
        for r in 0..4 {
            if b % 2 == r % 2 {
                arcs.push((b, r));
            }
        }
    }
    let g = Ccd::from_arcs(8, &arcs).unwrap();
    with_vcolors(&g, vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap()
}

fn keys(graphs: &[Ccd]) -> BTreeSet<Vec<u8>> {
    graphs.iter().map(|g| equivalence_key(g).unwrap()).collect()
}

fn timed(limit: Duration, t: Instant, detail: String) -> Outcome {
    let el = t.elapsed();
    if el > limit {
        Err(format!("{detail}; took {el:.1?}, limit {limit:?}"))
    } else {
        Ok(format!("{detail}; {el:.1?}"))
    }
}

fn lachlan() -> Outcome {
    let mut small = vec![empty(1), empty(2), empty(3), empty(4), empty(5), cycle(3), cycle(4)];
    let mut notes = Vec::new();
    for (max_n, limit) in [(5, LACHLAN_5_LIMIT), (6, LACHLAN_6_LIMIT)] {
        if max_n == 6 {
            small.extend([empty(6), two_triangles(), c3_of_pairs()]);
        }
        let t = Instant::now();
        let r = verify_lachlan(max_n, &VerifyOptions::default()).map_err(|e| e.to_string())?;
        let found: Vec<Ccd> = r.uh.iter().map(|f| f.graph.clone()).collect();
        if keys(&found) != keys(&small) {
            return Err(format!("n <= {max_n}: found {} graphs, expected {}", found.len(), small.len()));
        }
        if !r.matches_prediction {
            return Err(format!("n <= {max_n}: missing {:?}", r.missing));
        }
        notes.push(timed(limit, t, format!("n<={max_n}: {} tested, {} found", r.tested, found.len()))?);
    }
    Ok(notes.join(", "))
}

fn groups() -> Outcome {
    let order = |g: &Ccd| automorphism_group(g).unwrap().order();
    let cases: Vec<(&str, Ccd, u128)> = vec![
        ("E4", empty(4), 24),
        ("C4", cycle(4), 4),
        ("H0", h0_from_quaternions(), 24),
        ("E2.C3", wreath_product(&empty(2), &cycle(3)), 18),
        ("C3.E2", c3_of_pairs(), 24),
    ];
    let mut notes = Vec::new();
    for (name, g, want) in cases {
        let t = Instant::now();
        let got = order(&g);
        if got != want {
            return Err(format!("|Aut({name})| = {got}, expected {want}"));
        }
        notes.push(timed(GROUP_LIMIT, t, format!("{name}:{got}"))?);
    }
    let t = Instant::now();
    let c4 = automorphism_group(&cycle(4)).unwrap();
    if recognize(&c4).unwrap() != GroupName::Cyclic(4) {
        return Err("Aut(C4) is not cyclic".into());
    }
    if isomorphic_names_free(&h0_from_quaternions(), &uhgraph::families::h0()).is_none() {
        return Err("built-in H0 differs from the quaternion digraph".into());
    }
    let aut = automorphism_group(&h0_from_quaternions()).unwrap();
    let systems: Vec<_> = all_block_systems(&aut).unwrap().into_iter().filter(|s| !s.is_trivial()).collect();
    if systems.len() != 1 || systems[0].num_blocks() != 4 || systems[0].blocks().iter().any(|b| b.len() != 2) {
        return Err(format!("H0 block systems: {systems:?}"));
    }
    let action = induced_action(&aut, &systems[0]).unwrap();
    let spectrum = action.order_spectrum().unwrap();
    let alt4: BTreeMap<usize, usize> = [(1, 1), (2, 3), (3, 8)].into();
    if action.order() != 12 || spectrum != alt4 || recognize(&action).unwrap() != GroupName::Alternating(4) {
        return Err(format!("H0 block action: order {}, spectrum {spectrum:?}", action.order()));
    }
    notes.push(timed(GROUP_LIMIT, t, "C4 cyclic, H0 blocks act as Alt(4)".into())?);
    Ok(notes.join(", "))
}

fn extension() -> Outcome {
    let t = Instant::now();
    let opts = VerifyOptions {
        seed: EXTENSION_SEED,
        random_instances: EXTENSION_RANDOM,
        ..VerifyOptions::default()
    };
    let r = verify_extension_equivalence(&opts).map_err(|e| e.to_string())?;
    if r.random != EXTENSION_RANDOM as u64 {
        return Err(format!("only {} random instances", r.random));
    }
    // Oriented graphs on 1, 2, 3 vertices up to isomorphism, times the three
    // cross patterns per pair.
    let og = [1u64, 2, 7];
    let corpus: u64 = (1..=3)
        .flat_map(|a| (1..=3).map(move |b| og[a - 1] * og[b - 1] * 3u64.pow((a * b) as u32)))
        .sum();
    if r.corpus != corpus {
        return Err(format!("corpus {} instances, expected {corpus}", r.corpus));
    }
    if !r.ok() {
        return Err(format!("{} mismatches", r.mismatches.len()));
    }
    timed(
        EXTENSION_LIMIT,
        t,
        format!("{} corpus + {} random, {} UH, 0 mismatches", r.corpus, r.random, r.uh),
    )
}

fn minimal() -> Outcome {
    let t = Instant::now();
    let diag = OrderedPartition::new(4, vec![vec![0, 2], vec![1, 3]]).map_err(|e| e.to_string())?;
    let ext = minimal_extension(&cycle(4), &diag, &Budget::default()).map_err(|e| e.to_string())?;
    if equivalent_up_to_colors(&ext, &c4_diagonals_from_arcs()).is_none() {
        return Err("extension is not equivalent to the 6-vertex two-class graph".into());
    }
    timed(MINIMAL_LIMIT, t, format!("{} vertices", ext.n()))
}

fn blowups() -> Outcome {
    let t = Instant::now();
    let budget = Budget::default();
    let c3 = cycle(3);
    let mut cases: Vec<(String, Ccd, Option<Ccd>)> = Vec::new();
    for n in 1..=12 {
        cases.push((format!("E{n}"), empty(n), None));
    }
    cases.push(("C3".into(), c3.clone(), None));
    cases.push(("C4".into(), cycle(4), Some(empty(2))));
    cases.push(("H0".into(), h0_from_quaternions(), None));
    for n in 2..=4 {
        cases.push((format!("E{n}.C3"), wreath_product(&empty(n), &c3), Some(empty(n))));
        cases.push((format!("C3.E{n}"), wreath_product(&c3, &empty(n)), Some(c3.clone())));
    }
    let mut found = 0;
    for (name, g, quotient) in &cases {
        let d = blowup_decompositions(g, &budget).map_err(|e| format!("{name}: {e}"))?;
        match quotient {
            None if !d.is_empty() => return Err(format!("{name}: unexpected decomposition")),
            None => {}
            Some(q) => {
                if d.len() != 1 || isomorphic_names_free(&d[0].host, q).is_none() {
                    return Err(format!("{name}: {} decompositions", d.len()));
                }
                let back = blow_up(&d[0], &budget).map_err(|e| e.to_string())?.graph;
                if isomorphic_names_free(&back, g).is_none() {
                    return Err(format!("{name}: blow-up does not rebuild the graph"));
                }
                found += 1;
            }
        }
    }
    timed(BLOWUP_LIMIT, t, format!("{} graphs, {found} decompositions", cases.len()))
}

fn bichromatic() -> Outcome {
    let t = Instant::now();
    let r = verify_bichromatic(uhgraph::classifier::BICHROMATIC_MAX_TOTAL, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    if !r.matches_prediction || !r.missing.is_empty() || !r.unexpected.is_empty() {
        return Err(format!("missing {:?}, {} unexpected", r.missing, r.unexpected.len()));
    }
    let found: Vec<Ccd> = r.uh.iter().map(|f| f.graph.clone()).collect();
    if !keys(&found).contains(&equivalence_key(&c4_diagonals_from_arcs()).unwrap()) {
        return Err("6-vertex C4 extension not found".into());
    }
    if let Some(bad) = r.targeted.iter().find(|c| !c.ok) {
        return Err(format!("targeted check failed: {}", bad.spec));
    }
    let right = c4_cycles_from_arcs();
    if !common::is_uh(&right) || !r.targeted.iter().any(|c| c.vertices == 8) {
        return Err("8-vertex C4 blow-up not confirmed".into());
    }
    match classify(&right).map_err(|e| e.to_string())? {
        Classification::Uh { .. } => {}
        Classification::NotUh { .. } => return Err("8-vertex C4 blow-up rejected".into()),
    }
    timed(
        BICHROMATIC_LIMIT,
        t,
        format!("{} tested, {} found, {} targeted", r.tested, found.len(), r.targeted.len()),
    )
}

fn properties() -> Outcome {
    let t = Instant::now();
    let suites: [(&str, fn(&mut proptest::test_runner::TestRunner) -> Result<(), String>, u32); 5] = [
        ("blocks", common::blocks_induce_uh, 48),
        ("union", common::disjoint_union_law, 96),
        ("moves", common::moves_preserve_aut, 96),
        ("blow-up", common::blow_up_transfer, 64),
        ("wreath", common::wreath_order_law, 96),
    ];
    for (name, run, cases) in suites {
        run(&mut common::runner(cases)).map_err(|e| format!("{name}: {e}"))?;
    }
    let g = common::mixed_composite();
    if !common::is_uh(&g) {
        return Err("composite example is not ultrahomogeneous".into());
    }
    timed(PROPERTY_LIMIT, t, format!("5 suites, composite on {} vertices", g.n()))
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ROUND_TRIP_SEED);
    let mut bad = Vec::new();
    for _ in 0..ROUND_TRIP_SPECS {
        let spec = random_spec(&mut rng, ROUND_TRIP_MAX_VERTICES);
        let g = gen(&spec).map_err(|e| format!("{spec}: {e}"))?;
        let ok = match classify(&g) {
            Ok(Classification::Uh { certificate }) => {
                let back = gen(&certificate.spec).map_err(|e| e.to_string())?;
                certificate.replay().ok().as_ref() == Some(&g)
                    && equivalence_key(&back).unwrap() == equivalence_key(&g).unwrap()
            }
            _ => false,
        };
        if !ok {
            bad.push(spec.to_string());
        }
    }
    if bad.is_empty() {
        Ok(format!("{ROUND_TRIP_SPECS} specs, 0 mismatches"))
    } else {
        Err(format!("{} mismatches, first {}", bad.len(), bad[0]))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 monochromatic sweep", lachlan),
        ("2 automorphism groups", groups),
        ("3 extension conditions", extension),
        ("4 minimal extension", minimal),
        ("5 blow-up decompositions", blowups),
        ("6 bichromatic sweep", bichromatic),
        ("7 property suites", properties),
        ("8 classify/gen round trip", round_trip),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name:<28} {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<28} {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
