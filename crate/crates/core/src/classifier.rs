//! Recognizing classified graphs, and re-verifying the classification by
//! exhaustive enumeration of small cases.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::autiso::{canonical_form_with, PartialIso};
use crate::budget::Budget;
use crate::ccd::{induced_subgraph, Ccd};
use crate::error::{Error, Result};
use crate::families::{component_specs, enumerate_specs, gen, FamilySpec};
use crate::io::to_json;
use crate::moves::{equivalence_key, equivalent_up_to_colors, Equivalence};
use crate::perm::Perm;
use crate::theory::check_general_extension;
use crate::uh::{homogeneity_components, is_ultrahomogeneous_with};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Vertex colors of the input making up this component.
    pub colors: Vec<u32>,
    pub spec: FamilySpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationCertificate {
    pub components: Vec<Component>,
    /// The component specs as one union, in component order.
    pub spec: FamilySpec,
    /// Recodes `gen(spec)` into the input, pattern by pattern within each
    /// pair of color classes.
    pub equivalence: Equivalence,
}

impl ClassificationCertificate {
    /// Rebuilds the classified graph from the certificate alone.
    pub fn replay(&self) -> Result<Ccd> {
        self.equivalence.apply(&gen(&self.spec)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Classification {
    Uh { certificate: ClassificationCertificate },
    NotUh { witness: Option<PartialIso> },
}

fn violation(g: &Ccd, what: &str) -> Error {
    let canon = canonical_form_with(g, false, &Budget::unlimited())
        .map(|c| to_json(&c.graph))
        .unwrap_or_else(|_| to_json(g));
    Error::ClassificationViolation(format!("{what}: {canon}"))
}

/// The oriented graph carrying the same structure as `g`: inside a class
/// the larger of two asymmetric colors becomes the arc, and the patterns of
/// each pair of classes become non-edge, forward arc and backward arc in
/// sorted order.
fn to_oriented_form(g: &Ccd) -> Result<Ccd> {
    let n = g.n();
    let classes = g.color_classes();
    let mut e = vec![0u32; n * n];
    for (c, class) in classes.iter().enumerate() {
        let mut sym = BTreeSet::new();
        let mut asym = BTreeSet::new();
        for (i, &u) in class.iter().enumerate() {
            for &v in &class[i + 1..] {
                let (a, b) = (g.ecolor(u, v), g.ecolor(v, u));
                if a == b {
                    sym.insert(a);
                } else {
                    asym.insert((a.min(b), a.max(b)));
                }
                e[u * n + v] = (a > b) as u32;
                e[v * n + u] = (b > a) as u32;
            }
        }
        if sym.len() > 1 || asym.len() > 1 {
            return Err(Error::Precondition(format!(
                "color class {c} is not an oriented graph up to color names"
            )));
        }
    }
    const ORIENTED: [(u32, u32); 3] = [(0, 0), (1, 0), (0, 1)];
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let pats: BTreeSet<(u32, u32)> = classes[a]
                .iter()
                .flat_map(|&u| classes[b].iter().map(move |&v| (g.ecolor(u, v), g.ecolor(v, u))))
                .collect();
            if pats.len() > 3 {
                return Err(Error::Precondition(format!(
                    "classes {a} and {b} are joined by {} patterns, an oriented graph allows 3",
                    pats.len()
                )));
            }
            let code: BTreeMap<(u32, u32), (u32, u32)> = pats.into_iter().zip(ORIENTED).collect();
            for &u in &classes[a] {
                for &v in &classes[b] {
                    let (x, y) = code[&(g.ecolor(u, v), g.ecolor(v, u))];
                    e[u * n + v] = x;
                    e[v * n + u] = y;
                }
            }
        }
    }
    Ccd::from_fn(g.vcolors().to_vec(), |u, v| e[u * n + v])
}

type Candidates = Arc<Vec<(Vec<u8>, FamilySpec)>>;

fn candidates(vertices: usize, classes: usize) -> Result<Candidates> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Candidates>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(&(vertices, classes)) {
        return Ok(c.clone());
    }
    let list = component_specs(vertices, classes)
        .into_iter()
        .map(|s| Ok((equivalence_key(&gen(&s)?)?, s)))
        .collect::<Result<Vec<_>>>()?;
    let list = Arc::new(list);
    cache.lock().unwrap().insert((vertices, classes), list.clone());
    Ok(list)
}

pub fn classify(g: &Ccd) -> Result<Classification> {
    classify_with(g, &Budget::default())
}

/// Decides ultrahomogeneity and, for ultrahomogeneous input, splits it into
/// homogeneity components and names each one. An ultrahomogeneous graph with
/// a component matching no classified form is reported as
/// [`Error::ClassificationViolation`].
pub fn classify_with(g: &Ccd, budget: &Budget) -> Result<Classification> {
    let verdict = is_ultrahomogeneous_with(g, budget)?;
    if !verdict.is_uh {
        return Ok(Classification::NotUh {
            witness: verdict.witness,
        });
    }
    let og = to_oriented_form(g)?;
    let mut comps: Vec<(Vec<u32>, Vec<usize>)> = homogeneity_components(g)
        .into_iter()
        .map(|c| {
            let colors: BTreeSet<u32> = c.iter().map(|&v| g.vcolor(v)).collect();
            (colors.into_iter().collect(), c)
        })
        .collect();
    comps.sort();
    let mut components = Vec::with_capacity(comps.len());
    for (colors, set) in comps {
        let (sub, _) = induced_subgraph(&og, &set)?;
        let key = equivalence_key(&sub)?;
        let spec = candidates(sub.n(), colors.len())?
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| violation(&sub, "ultrahomogeneous component matches no classified form"))?;
        components.push(Component { colors, spec });
    }
    let spec = if components.len() == 1 {
        components[0].spec.clone()
    } else {
        FamilySpec::Union(components.iter().map(|c| c.spec.clone()).collect())
    };
    let realized = gen(&spec)?;
    let equivalence = equivalent_up_to_colors(&realized, &og)
        .and_then(|e| Equivalence::derive(&realized, g, e.iso))
        .ok_or_else(|| violation(g, "components do not reassemble into the input"))?;
    let cert = ClassificationCertificate {
        components,
        spec,
        equivalence,
    };
    if cert.replay()? != *g {
        return Err(violation(g, "certificate does not replay to the input"));
    }
    Ok(Classification::Uh { certificate: cert })
}

/// Settings shared by the enumeration harnesses.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Worker threads; 0 picks the number of cores.
    pub jobs: usize,
    pub budget: Budget,
    /// Progress file; finished chunks recorded there are skipped.
    pub checkpoint: Option<PathBuf>,
    pub seed: u64,
    pub random_instances: usize,
    /// Largest class in the exhaustive extension corpus, at most 3.
    pub exhaustive_class_max: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            jobs: 0,
            budget: Budget::default(),
            checkpoint: None,
            seed: 0,
            random_instances: 500,
            exhaustive_class_max: 3,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint<R> {
    task: String,
    done: BTreeMap<usize, R>,
}

fn save_checkpoint<R: Serialize>(path: &Path, task: &str, done: &BTreeMap<usize, R>) -> Result<()> {
    #[derive(Serialize)]
    struct View<'a, R> {
        task: &'a str,
        done: &'a BTreeMap<usize, R>,
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec(&View { task, done })?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs `work` on chunks `0..count` in parallel and returns the results in
/// chunk order.
fn run_chunks<R, F>(task: &str, count: usize, opts: &VerifyOptions, work: F) -> Result<Vec<R>>
where
    R: Serialize + DeserializeOwned + Send,
    F: Fn(usize) -> Result<R> + Sync + Send,
{
    let mut done: BTreeMap<usize, R> = BTreeMap::new();
    if let Some(path) = opts.checkpoint.as_deref().filter(|p| p.exists()) {
        let cp: Checkpoint<R> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if cp.task != task {
            return Err(Error::Precondition(format!(
                "checkpoint {} belongs to `{}`, not `{task}`",
                path.display(),
                cp.task
            )));
        }
        done = cp.done;
    }
    let todo: Vec<usize> = (0..count).filter(|i| !done.contains_key(i)).collect();
    let state = Mutex::new(done);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| {
        todo.par_iter().try_for_each(|&i| -> Result<()> {
            let r = work(i)?;
            let mut st = state.lock().unwrap();
            st.insert(i, r);
            if let Some(path) = &opts.checkpoint {
                save_checkpoint(path, task, &st)?;
            }
            Ok(())
        })
    })?;
    Ok(state.into_inner().unwrap().into_values().collect())
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct ChunkResult {
    scanned: u64,
    pruned: u64,
    tested: u64,
    uh: Vec<Ccd>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundGraph {
    pub name: String,
    pub graph: Ccd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetedCheck {
    pub spec: String,
    pub vertices: usize,
    pub uh: bool,
    pub classified_as: Option<String>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub kind: String,
    pub max_vertices: usize,
    pub max_colors: usize,
    pub scanned: u64,
    pub pruned: u64,
    /// Distinct survivors of pruning given to the ultrahomogeneity test.
    pub tested: u64,
    /// One canonical representative per equivalence class.
    pub uh: Vec<FoundGraph>,
    pub expected: Vec<String>,
    pub missing: Vec<String>,
    pub unexpected: Vec<FoundGraph>,
    pub targeted: Vec<TargetedCheck>,
    pub matches_prediction: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

fn name_of(g: &Ccd, budget: &Budget) -> String {
    match classify_with(g, budget) {
        Ok(Classification::Uh { certificate }) => certificate.spec.to_string(),
        Ok(Classification::NotUh { .. }) => "not ultrahomogeneous".into(),
        Err(e) => format!("unclassified ({e})"),
    }
}

struct Tally {
    kind: &'static str,
    max_vertices: usize,
    max_colors: usize,
    start: Instant,
}

impl Tally {
    fn finish(
        self,
        chunks: Vec<ChunkResult>,
        expected: Vec<FamilySpec>,
        targeted: Vec<TargetedCheck>,
        budget: &Budget,
    ) -> Result<EnumerationReport> {
        let (mut scanned, mut pruned, mut tested) = (0, 0, 0);
        let mut found: BTreeMap<Vec<u8>, Ccd> = BTreeMap::new();
        for c in chunks {
            scanned += c.scanned;
            pruned += c.pruned;
            tested += c.tested;
            for g in c.uh {
                let key = equivalence_key(&g)?;
                match found.get(&key) {
                    Some(h) if *h <= g => {}
                    _ => {
                        found.insert(key, g);
                    }
                }
            }
        }
        let mut want: BTreeMap<Vec<u8>, String> = BTreeMap::new();
        let mut expected_names = Vec::new();
        for s in expected {
            let key = equivalence_key(&gen(&s)?)?;
            if !want.contains_key(&key) {
                expected_names.push(s.to_string());
                want.insert(key, s.to_string());
            }
        }
        let mut uh = Vec::new();
        let mut unexpected = Vec::new();
        for (key, graph) in &found {
            match want.get(key) {
                Some(name) => uh.push(FoundGraph {
                    name: name.clone(),
                    graph: graph.clone(),
                }),
                None => {
                    let f = FoundGraph {
                        name: name_of(graph, budget),
                        graph: graph.clone(),
                    };
                    uh.push(f.clone());
                    unexpected.push(f);
                }
            }
        }
        let missing: Vec<String> = want
            .iter()
            .filter(|(k, _)| !found.contains_key(*k))
            .map(|(_, v)| v.clone())
            .collect();
        uh.sort_by(|a, b| (a.graph.n(), &a.name).cmp(&(b.graph.n(), &b.name)));
        let matches_prediction = missing.is_empty() && unexpected.is_empty() && targeted.iter().all(|t| t.ok);
        Ok(EnumerationReport {
            kind: self.kind.into(),
            max_vertices: self.max_vertices,
            max_colors: self.max_colors,
            scanned,
            pruned,
            tested,
            uh,
            expected: expected_names,
            missing,
            unexpected,
            targeted,
            matches_prediction,
            wall_time: self.start.elapsed(),
        })
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn set_digits(states: &mut [u8], mut code: usize) {
    for s in states.iter_mut().rev() {
        *s = (code % 3) as u8;
        code /= 3;
    }
}

// advances a base-3 counter; false once it wraps
fn step(states: &mut [u8]) -> bool {
    for s in states.iter_mut().rev() {
        if *s < 2 {
            *s += 1;
            return true;
        }
        *s = 0;
    }
    false
}

fn oriented_from_states(vcolors: Vec<u32>, pairs: &[(usize, usize)], states: &[u8]) -> Ccd {
    let n = vcolors.len();
    let mut adj = vec![0u32; n * n];
    for (&(u, v), &s) in pairs.iter().zip(states) {
        match s {
            1 => adj[u * n + v] = 1,
            2 => adj[v * n + u] = 1,
            _ => {}
        }
    }
    Ccd::from_fn(vcolors, |u, v| adj[u * n + v]).expect("nonempty")
}

/// Necessary condition for a monochromatic graph to be ultrahomogeneous:
/// all vertices have the same out-degree and the same in-degree per edge
/// color.
pub fn lachlan_prune_passes(g: &Ccd) -> bool {
    let n = g.n();
    let profile = |v: usize| {
        let mut p: Vec<(u32, u32)> = (0..n).filter(|&w| w != v).map(|w| (g.ecolor(v, w), g.ecolor(w, v))).collect();
        p.sort_unstable();
        p
    };
    let first = profile(0);
    (1..n).all(|v| profile(v) == first)
}

/// Necessary condition for a bichromatic graph: within each class, every
/// vertex sees the same multiset of edge-color pairs towards each class.
pub fn bichromatic_prune_passes(g: &Ccd) -> bool {
    let n = g.n();
    let profile = |v: usize| {
        let mut p: Vec<(u32, u32, u32)> = (0..n)
            .filter(|&w| w != v)
            .map(|w| (g.vcolor(w), g.ecolor(v, w), g.ecolor(w, v)))
            .collect();
        p.sort_unstable();
        p
    };
    let mut seen: BTreeMap<u32, Vec<(u32, u32, u32)>> = BTreeMap::new();
    (0..n).all(|v| {
        let p = profile(v);
        seen.entry(g.vcolor(v)).or_insert_with(|| p.clone()) == &p
    })
}

fn lachlan_chunk(n: usize, prefix: usize, code: usize, budget: &Budget) -> Result<ChunkResult> {
    let ps = pairs(n);
    let mut states = vec![0u8; ps.len()];
    set_digits(&mut states[..prefix], code);
    let mut res = ChunkResult::default();
    let mut survivors: BTreeSet<Ccd> = BTreeSet::new();
    let (mut outd, mut ind) = (vec![0u8; n], vec![0u8; n]);
    loop {
        res.scanned += 1;
        outd.iter_mut().for_each(|d| *d = 0);
        ind.iter_mut().for_each(|d| *d = 0);
        for (&(u, v), &s) in ps.iter().zip(&states) {
            match s {
                1 => {
                    outd[u] += 1;
                    ind[v] += 1;
                }
                2 => {
                    outd[v] += 1;
                    ind[u] += 1;
                }
                _ => {}
            }
        }
        if outd.iter().all(|&d| d == outd[0]) && ind.iter().all(|&d| d == ind[0]) {
            let g = oriented_from_states(vec![0; n], &ps, &states);
            survivors.insert(canonical_form_with(&g, false, budget)?.graph);
        } else {
            res.pruned += 1;
        }
        if !step(&mut states[prefix..]) {
            break;
        }
    }
    res.tested = survivors.len() as u64;
    for g in survivors {
        if is_ultrahomogeneous_with(&g, budget)?.is_uh {
            res.uh.push(g);
        }
    }
    Ok(res)
}

/// Lachlan's list up to `max_n` vertices.
pub fn lachlan_prediction(max_n: usize) -> Vec<FamilySpec> {
    let mut out: Vec<FamilySpec> = (1..=max_n).map(FamilySpec::E).collect();
    out.extend([3, 4].into_iter().filter(|&k| k <= max_n).map(FamilySpec::Cycle));
    if max_n >= 8 {
        out.push(FamilySpec::H0);
    }
    for k in 2..=max_n / 3 {
        out.push(FamilySpec::EnC3(k));
        out.push(FamilySpec::C3En(k));
    }
    out
}

pub const LACHLAN_MAX_N: usize = 6;
pub const BICHROMATIC_MAX_TOTAL: usize = 7;

/// Every labeled monochromatic oriented graph on at most `max_n` vertices,
/// pruned by degree regularity, deduplicated by canonical form and tested
/// for ultrahomogeneity.
pub fn verify_lachlan(max_n: usize, opts: &VerifyOptions) -> Result<EnumerationReport> {
    Budget::check("lachlan max_n", max_n, LACHLAN_MAX_N)?;
    let tally = Tally {
        kind: "lachlan",
        max_vertices: max_n,
        max_colors: 1,
        start: Instant::now(),
    };
    let mut chunks: Vec<(usize, usize, usize)> = Vec::new();
    for n in 1..=max_n {
        let prefix = pairs(n).len().min(6);
        for code in 0..3usize.pow(prefix as u32) {
            chunks.push((n, prefix, code));
        }
    }
    let budget = opts.budget;
    let results = run_chunks(&format!("lachlan:{max_n}"), chunks.len(), opts, |i| {
        let (n, prefix, code) = chunks[i];
        lachlan_chunk(n, prefix, code, &budget)
    })?;
    tally.finish(results, lachlan_prediction(max_n), Vec::new(), &budget)
}

// Lachlan graphs on `n` vertices as 0/1 arc matrices.
fn lachlan_graphs(n: usize) -> Result<Vec<Ccd>> {
    let mut out = Vec::new();
    let mut keys = BTreeSet::new();
    for s in lachlan_prediction(n) {
        if s.num_vertices() != n {
            continue;
        }
        let g = gen(&s)?;
        if !keys.insert(equivalence_key(&g)?) {
            continue;
        }
        out.push(Ccd::from_fn(vec![0; n], |u, v| (g.ecolor(u, v) > g.ecolor(v, u)) as u32)?);
    }
    Ok(out)
}

/// Every oriented graph on `n` vertices, one per isomorphism class.
pub fn oriented_graphs(n: usize) -> Result<Vec<Ccd>> {
    let ps = pairs(n);
    let mut states = vec![0u8; ps.len()];
    let mut out = BTreeSet::new();
    loop {
        let g = oriented_from_states(vec![0; n], &ps, &states);
        out.insert(canonical_form_with(&g, false, &Budget::unlimited())?.graph);
        if !step(&mut states) {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

// reds first, then blues; cross states as in `pairs` but between classes
fn bichromatic(red: &Ccd, blue: &Ccd, states: &[u8]) -> Ccd {
    let (r, b) = (red.n(), blue.n());
    let n = r + b;
    let vcolors = (0..n).map(|v| (v >= r) as u32).collect();
    Ccd::from_fn(vcolors, |u, v| match (u < r, v < r) {
        (true, true) => red.ecolor(u, v),
        (false, false) => blue.ecolor(u - r, v - r),
        (true, false) => (states[u * b + (v - r)] == 1) as u32,
        (false, true) => (states[v * b + (u - r)] == 2) as u32,
    })
    .expect("nonempty")
}

struct BiChunk {
    red: Arc<Ccd>,
    blue: Arc<Ccd>,
    prefix: usize,
    code: usize,
}

fn bichromatic_chunk(c: &BiChunk, budget: &Budget) -> Result<ChunkResult> {
    let q = c.red.n() * c.blue.n();
    let mut states = vec![0u8; q];
    set_digits(&mut states[..c.prefix], c.code);
    let mut res = ChunkResult::default();
    let mut survivors = BTreeSet::new();
    loop {
        res.scanned += 1;
        let g = bichromatic(&c.red, &c.blue, &states);
        if bichromatic_prune_passes(&g) {
            survivors.insert(canonical_form_with(&g, false, budget)?.graph);
        } else {
            res.pruned += 1;
        }
        if !step(&mut states[c.prefix..]) {
            break;
        }
    }
    res.tested = survivors.len() as u64;
    for g in survivors {
        if is_ultrahomogeneous_with(&g, budget)?.is_uh {
            res.uh.push(g);
        }
    }
    Ok(res)
}

fn targeted_check(spec: &FamilySpec, budget: &Budget) -> Result<TargetedCheck> {
    let g = gen(spec)?;
    let uh = is_ultrahomogeneous_with(&g, budget)?.is_uh;
    let classified = match classify_with(&g, budget) {
        Ok(Classification::Uh { certificate }) => Some(certificate.spec),
        Ok(Classification::NotUh { .. }) => None,
        Err(Error::ClassificationViolation(_)) => None,
        Err(e) => return Err(e),
    };
    let ok = uh
        && match &classified {
            Some(s) => equivalence_key(&gen(s)?)? == equivalence_key(&g)?,
            None => false,
        };
    Ok(TargetedCheck {
        spec: spec.to_string(),
        vertices: g.n(),
        uh,
        classified_as: classified.map(|s| s.to_string()),
        ok,
    })
}

/// Two-colored oriented graphs with `|R| + |B| <= max_total` and
/// `|R| >= |B|`. Both classes are fixed to graphs from Lachlan's list and all
/// connections between them are enumerated. Every two-class form on exactly
/// eight vertices is checked separately from its construction.
pub fn verify_bichromatic(max_total: usize, opts: &VerifyOptions) -> Result<EnumerationReport> {
    Budget::check("bichromatic max_total", max_total, BICHROMATIC_MAX_TOTAL)?;
    let tally = Tally {
        kind: "bichromatic",
        max_vertices: max_total,
        max_colors: 2,
        start: Instant::now(),
    };
    let mut lachlan: Vec<Vec<Arc<Ccd>>> = vec![Vec::new()];
    for n in 1..max_total {
        lachlan.push(lachlan_graphs(n)?.into_iter().map(Arc::new).collect());
    }
    let mut chunks = Vec::new();
    for r in 1..max_total {
        for b in 1..=r.min(max_total - r) {
            let prefix = (r * b).min(5);
            for red in &lachlan[r] {
                for blue in &lachlan[b] {
                    for code in 0..3usize.pow(prefix as u32) {
                        chunks.push(BiChunk {
                            red: red.clone(),
                            blue: blue.clone(),
                            prefix,
                            code,
                        });
                    }
                }
            }
        }
    }
    let budget = opts.budget;
    let results = run_chunks(&format!("bichromatic:{max_total}"), chunks.len(), opts, |i| {
        bichromatic_chunk(&chunks[i], &budget)
    })?;
    let expected: Vec<FamilySpec> = enumerate_specs(max_total)?
        .into_iter()
        .filter(|s| s.num_classes() == 2)
        .collect();
    let mut targets: Vec<FamilySpec> = vec![FamilySpec::C4Ext(crate::families::C4Join::Cycle)];
    targets.extend(
        enumerate_specs(8)?
            .into_iter()
            .filter(|s| s.num_classes() == 2 && s.num_vertices() == 8),
    );
    let targeted = targets
        .par_iter()
        .map(|s| targeted_check(s, &budget))
        .collect::<Result<Vec<_>>>()?;
    tally.finish(results, expected, targeted, &budget)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct ExtensionChunk {
    graphs: u64,
    uh: u64,
    conditions_hold: u64,
    condition_failures: [u64; 5],
    mismatches: Vec<Ccd>,
}

impl ExtensionChunk {
    fn record(&mut self, g: &Ccd, budget: &Budget) -> Result<()> {
        let brute = is_ultrahomogeneous_with(g, budget)?.is_uh;
        let report = check_general_extension(g, 0, 1, budget)?;
        self.graphs += 1;
        self.uh += brute as u64;
        self.conditions_hold += report.holds() as u64;
        for (count, ok) in self.condition_failures.iter_mut().zip(report.conditions()) {
            *count += !ok as u64;
        }
        if brute != report.holds() {
            self.mismatches.push(g.clone());
        }
        Ok(())
    }

    fn absorb(&mut self, o: ExtensionChunk) {
        self.graphs += o.graphs;
        self.uh += o.uh;
        self.conditions_hold += o.conditions_hold;
        for (a, b) in self.condition_failures.iter_mut().zip(o.condition_failures) {
            *a += b;
        }
        self.mismatches.extend(o.mismatches);
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionEquivalenceReport {
    pub seed: u64,
    /// Exhaustive part: every pair of classes with at most three vertices.
    pub corpus: u64,
    pub random: u64,
    pub uh: u64,
    pub conditions_hold: u64,
    /// How often each of the five conditions failed.
    pub condition_failures: [u64; 5],
    pub mismatches: Vec<Ccd>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExtensionEquivalenceReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// A random two-colored instance near a classified one: a two-class form
/// with at most `max_vertices` vertices, possibly with a few pairs recolored,
/// then shuffled and recolored by color moves.
pub fn random_extension_instance<R: Rng>(rng: &mut R, pool: &[FamilySpec]) -> Result<Ccd> {
    let spec = pool.choose(rng).ok_or_else(|| Error::Precondition("empty pool".into()))?;
    let g = gen(spec)?;
    let n = g.n();
    let mut e: Vec<u32> = (0..n * n).map(|k| if k / n == k % n { 0 } else { g.ecolor(k / n, k % n) }).collect();
    if rng.gen_bool(0.6) {
        let colors = g.num_ecolors().max(2);
        for _ in 0..rng.gen_range(1..=2) {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            e[u * n + v] = rng.gen_range(0..colors);
            e[v * n + u] = rng.gen_range(0..colors);
        }
    }
    let mut vc = g.vcolors().to_vec();
    if rng.gen_bool(0.5) {
        vc.iter_mut().for_each(|c| *c = 1 - *c);
    }
    let mut emap: Vec<u32> = (0..g.num_ecolors().max(2) + 1).collect();
    if rng.gen_bool(0.5) {
        emap.shuffle(rng);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let p = Perm::from_images(order)?;
    let h = Ccd::from_fn(vc, |u, v| emap[e[u * n + v] as usize])?;
    Ok(h.relabel(&p))
}

/// The five conditions for a two-colored graph against the brute-force test:
/// all graphs whose classes have at most `opts.exhaustive_class_max` (three
/// by default) vertices, plus
/// `opts.random_instances` seeded instances with at most ten vertices.
pub fn verify_extension_equivalence(opts: &VerifyOptions) -> Result<ExtensionEquivalenceReport> {
    let start = Instant::now();
    let m = opts.exhaustive_class_max.min(3);
    let reps: Vec<Vec<Arc<Ccd>>> = (0..=m)
        .map(|n| Ok(if n == 0 { Vec::new() } else { oriented_graphs(n)?.into_iter().map(Arc::new).collect() }))
        .collect::<Result<_>>()?;
    let mut chunks = Vec::new();
    for r in 1..=m {
        for b in 1..=m {
            let prefix = (r * b).min(3);
            for red in &reps[r] {
                for blue in &reps[b] {
                    for code in 0..3usize.pow(prefix as u32) {
                        chunks.push(BiChunk {
                            red: red.clone(),
                            blue: blue.clone(),
                            prefix,
                            code,
                        });
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pool: Vec<FamilySpec> = enumerate_specs(10)?
        .into_iter()
        .filter(|s| s.num_classes() == 2)
        .collect();
    let randoms = (0..opts.random_instances)
        .map(|_| random_extension_instance(&mut rng, &pool))
        .collect::<Result<Vec<_>>>()?;
    let budget = opts.budget;
    let fixed = chunks.len();
    let per_random = 25;
    let total = fixed + randoms.len().div_ceil(per_random);
    let task = format!("extension:{}:{}:{}", opts.seed, opts.random_instances, m);
    let results = run_chunks(&task, total, opts, |i| {
        let mut acc = ExtensionChunk::default();
        if i < fixed {
            let c = &chunks[i];
            let mut states = vec![0u8; c.red.n() * c.blue.n()];
            set_digits(&mut states[..c.prefix], c.code);
            loop {
                acc.record(&bichromatic(&c.red, &c.blue, &states), &budget)?;
                if !step(&mut states[c.prefix..]) {
                    break;
                }
            }
        } else {
            let k = (i - fixed) * per_random;
            for g in &randoms[k..(k + per_random).min(randoms.len())] {
                acc.record(g, &budget)?;
            }
        }
        Ok(acc)
    })?;
    let mut corpus = ExtensionChunk::default();
    let mut random = ExtensionChunk::default();
    for (i, r) in results.into_iter().enumerate() {
        if i < fixed {
            corpus.absorb(r);
        } else {
            random.absorb(r);
        }
    }
    let (corpus_count, random_count) = (corpus.graphs, random.graphs);
    corpus.absorb(random);
    Ok(ExtensionEquivalenceReport {
        seed: opts.seed,
        corpus: corpus_count,
        random: random_count,
        uh: corpus.uh,
        conditions_hold: corpus.conditions_hold,
        condition_failures: corpus.condition_failures,
        mismatches: corpus.mismatches,
        wall_time: start.elapsed(),
    })
}
