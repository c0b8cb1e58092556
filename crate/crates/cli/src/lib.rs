//! The `uhg` command line. `run` parses arguments, performs one library
//! operation and returns the exit code.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use uhgraph::autiso::automorphism_group_with;
use uhgraph::blocks::all_block_systems;
use uhgraph::ccd::{induced_subgraph, with_vcolors};
use uhgraph::classifier::{
    classify_with, verify_bichromatic, verify_extension_equivalence, verify_lachlan, Classification,
    EnumerationReport, ExtensionEquivalenceReport, VerifyOptions,
};
use uhgraph::families::{gen, FamilySpec};
use uhgraph::group::recognize;
use uhgraph::io::{from_json, to_dot, to_json};
use uhgraph::moves::equivalent_up_to_colors;
use uhgraph::theory::check_general_extension;
use uhgraph::uh::is_ultrahomogeneous_with;
use uhgraph::{Budget, Ccd, Error, PartialIso};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_ALARM: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "uhg", version, about = "Ultrahomogeneous vertex-colored oriented graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for the verify commands; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Seed for randomized corpora.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Search limits: a scale factor, `unlimited`, or `key=value` pairs
    /// separated by commas (aut_max_n, uh_max_n, group_cap,
    /// perm_iso_max_degree, easygoing_max_blocks, partition_system_max).
    #[arg(long, global = true, value_parser = parse_budget)]
    pub budget: Option<Budget>,
    /// Checkpoint file for the verify commands; finished work recorded there
    /// is skipped.
    #[arg(long, global = true)]
    pub resume: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Summary,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide ultrahomogeneity; a failing verdict prints a witness.
    Check { graph: PathBuf },
    /// Automorphism group: generators, order, block systems.
    Aut { graph: PathBuf },
    /// Evaluate the extension conditions for two color classes.
    Extend {
        graph: PathBuf,
        #[arg(long)]
        red: u32,
        #[arg(long)]
        blue: u32,
    },
    /// Build the graph of a family spec.
    Gen { spec: String },
    /// Classify an ultrahomogeneous graph and print a certificate.
    Classify { graph: PathBuf },
    /// Re-verify parts of the classification by enumeration.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Whether two graphs agree up to color changes and isomorphism.
    Equiv { a: PathBuf, b: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// All monochromatic oriented graphs up to N vertices.
    Lachlan {
        #[arg(long)]
        max_n: usize,
    },
    /// All two-colored oriented graphs up to N vertices.
    Bichromatic {
        #[arg(long)]
        max_total: usize,
    },
    /// The extension conditions against brute force.
    Extension {
        /// Random instances on top of the exhaustive corpus.
        #[arg(long, default_value_t = 500)]
        random: usize,
        /// Largest class size in the exhaustive corpus (1 to 3).
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
        class_max: u8,
    },
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    if s == "unlimited" {
        return Ok(Budget::unlimited());
    }
    if let Ok(f) = s.parse::<usize>() {
        return Ok(Budget::scaled(f));
    }
    let mut b = Budget::default();
    for kv in s.split(',') {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
        let v: usize = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
        let slot = match k.trim() {
            "aut_max_n" => &mut b.aut_max_n,
            "uh_max_n" => &mut b.uh_max_n,
            "group_cap" => &mut b.group_cap,
            "perm_iso_max_degree" => &mut b.perm_iso_max_degree,
            "easygoing_max_blocks" => &mut b.easygoing_max_blocks,
            "partition_system_max" => &mut b.partition_system_max,
            other => return Err(format!("unknown budget key `{other}`")),
        };
        *slot = v;
    }
    Ok(b)
}

enum Failure {
    Usage(String),
    Lib(String, Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(String::new(), e)
    }
}

type Outcome = Result<(String, i32), Failure>;

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
        Err(Failure::Lib(ctx, e)) => {
            let prefix = if ctx.is_empty() { String::new() } else { format!("{ctx}: ") };
            if let Error::ClassificationViolation(_) = e {
                let _ = writeln!(err, "alarm: {prefix}{e}");
                EXIT_ALARM
            } else {
                let _ = writeln!(err, "error: {prefix}{e}");
                EXIT_ERROR
            }
        }
    }
}

fn read_graph(path: &PathBuf) -> Result<Ccd, Failure> {
    let name = path.display().to_string();
    let mut text = String::new();
    let res = if name == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Lib(name.clone(), e.into()))?;
    from_json(&text).map_err(|e| Failure::Lib(name, e))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn no_dot(what: &str) -> Failure {
    Failure::Usage(format!("DOT output is only available for graphs, not for {what}"))
}

fn show_iso(p: &PartialIso) -> String {
    let pairs: Vec<String> = p.domain.iter().zip(&p.images).map(|(a, b)| format!("{a}->{b}")).collect();
    format!("{{{}}}", pairs.join(", "))
}

fn verdict(b: bool) -> i32 {
    if b {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}

fn execute(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let budget = g.budget.unwrap_or_default();
    let fmt = g.format;
    match &cli.command {
        Command::Check { graph } => {
            let x = read_graph(graph)?;
            let v = is_ultrahomogeneous_with(&x, &budget)?;
            let text = match fmt {
                Format::Json => pretty(&json!({
                    "ultrahomogeneous": v.is_uh,
                    "witness": v.witness,
                    "automorphism_group_order": v.aut.order().to_string(),
                })),
                Format::Summary => match &v.witness {
                    None => format!("ultrahomogeneous (|Aut| = {})\n", v.aut.order()),
                    Some(w) => format!("not ultrahomogeneous; witness {} extends to no automorphism\n", show_iso(w)),
                },
                Format::Dot => return Err(no_dot("a verdict")),
            };
            Ok((text, verdict(v.is_uh)))
        }
        Command::Aut { graph } => {
            let x = read_graph(graph)?;
            let aut = automorphism_group_with(&x, &budget)?;
            let systems = if aut.is_transitive() {
                Some(all_block_systems(&aut)?)
            } else {
                None
            };
            let name = recognize(&aut).ok().map(|n| n.to_string());
            let gens: Vec<&[usize]> = aut.generators().iter().map(|p| p.images()).collect();
            let text = match fmt {
                Format::Json => pretty(&json!({
                    "degree": aut.degree(),
                    "order": aut.order().to_string(),
                    "name": name,
                    "generators": gens,
                    "orbits": aut.orbits().parts(),
                    "block_systems": systems,
                })),
                Format::Summary => {
                    let mut s = format!("order {}", aut.order());
                    if let Some(n) = &name {
                        write!(s, " ({n})").unwrap();
                    }
                    writeln!(s, ", {} generators", gens.len()).unwrap();
                    match &systems {
                        Some(sys) => writeln!(s, "transitive, {} block systems", sys.len()).unwrap(),
                        None => writeln!(s, "{} orbits", aut.orbits().len()).unwrap(),
                    }
                    s
                }
                Format::Dot => return Err(no_dot("a group")),
            };
            Ok((text, EXIT_OK))
        }
        Command::Extend { graph, red, blue } => {
            let x = read_graph(graph)?;
            if red == blue || *red >= x.num_vcolors() || *blue >= x.num_vcolors() {
                return Err(Failure::Usage(format!(
                    "--red and --blue must be two distinct colors below {}",
                    x.num_vcolors()
                )));
            }
            // The two classes, renumbered in increasing order, red as color 0.
            let vertices: Vec<usize> = (0..x.n()).filter(|&v| [*red, *blue].contains(&x.vcolor(v))).collect();
            let (sub, _) = induced_subgraph(&x, &vertices)?;
            let vc = vertices.iter().map(|&v| (x.vcolor(v) == *blue) as u32).collect();
            let sub = with_vcolors(&sub, vc)?;
            let r = check_general_extension(&sub, 0, 1, &budget)?;
            let holds = r.holds();
            let text = match fmt {
                Format::Json => pretty(&json!({ "vertices": vertices, "holds": holds, "report": r })),
                Format::Summary => {
                    let mut s = String::new();
                    for (i, c) in r.conditions().iter().enumerate() {
                        writeln!(s, "condition {}: {}", i + 1, if *c { "holds" } else { "fails" }).unwrap();
                    }
                    writeln!(s, "{}", if holds { "all conditions hold" } else { "conditions fail" }).unwrap();
                    s
                }
                Format::Dot => return Err(no_dot("an extension report")),
            };
            Ok((text, verdict(holds)))
        }
        Command::Gen { spec } => {
            let s: FamilySpec = spec.parse().map_err(|e| Failure::Lib("spec".into(), e))?;
            let x = gen(&s)?;
            let text = match fmt {
                Format::Json => to_json(&x) + "\n",
                Format::Dot => to_dot(&x),
                Format::Summary => format!("{s}: n={}, classes={}\n", x.n(), x.num_vcolors()),
            };
            Ok((text, EXIT_OK))
        }
        Command::Classify { graph } => {
            let x = read_graph(graph)?;
            let c = classify_with(&x, &budget)?;
            let ok = matches!(c, Classification::Uh { .. });
            let text = match fmt {
                Format::Json => pretty(&c),
                Format::Summary => match &c {
                    Classification::Uh { certificate } => {
                        let mut s = format!("{}\n", certificate.spec);
                        for comp in &certificate.components {
                            writeln!(s, "  colors {:?}: {}", comp.colors, comp.spec).unwrap();
                        }
                        s
                    }
                    Classification::NotUh { witness } => {
                        let w = witness.as_ref().map_or("unavailable".to_string(), show_iso);
                        format!("not ultrahomogeneous; witness {w}\n")
                    }
                },
                Format::Dot => return Err(no_dot("a certificate")),
            };
            Ok((text, verdict(ok)))
        }
        Command::Verify { what } => {
            let opts = VerifyOptions {
                jobs: g.jobs,
                budget,
                checkpoint: g.resume.clone(),
                seed: g.seed,
                ..VerifyOptions::default()
            };
            match what {
                Verify::Lachlan { max_n } => enumeration(verify_lachlan(*max_n, &opts)?, fmt),
                Verify::Bichromatic { max_total } => enumeration(verify_bichromatic(*max_total, &opts)?, fmt),
                Verify::Extension { random, class_max } => {
                    let opts = VerifyOptions {
                        random_instances: *random,
                        exhaustive_class_max: *class_max as usize,
                        ..opts
                    };
                    extension(verify_extension_equivalence(&opts)?, fmt)
                }
            }
        }
        Command::Equiv { a, b } => {
            let (x, y) = (read_graph(a)?, read_graph(b)?);
            let e = equivalent_up_to_colors(&x, &y);
            let text = match fmt {
                Format::Json => pretty(&json!({ "equivalent": e.is_some(), "equivalence": e })),
                Format::Summary => {
                    if e.is_some() { "equivalent\n" } else { "not equivalent\n" }.to_string()
                }
                Format::Dot => return Err(no_dot("an equivalence")),
            };
            Ok((text, verdict(e.is_some())))
        }
    }
}

fn enumeration(r: EnumerationReport, fmt: Format) -> Outcome {
    let ok = r.matches_prediction && r.targeted.iter().all(|t| t.ok);
    let text = match fmt {
        Format::Json => pretty(&r),
        Format::Summary => {
            let mut s = format!(
                "{}: up to {} vertices, {} scanned, {} pruned, {} tested\n",
                r.kind, r.max_vertices, r.scanned, r.pruned, r.tested
            );
            let names: Vec<&str> = r.uh.iter().map(|f| f.name.as_str()).collect();
            writeln!(s, "ultrahomogeneous: {}", names.join(", ")).unwrap();
            for t in &r.targeted {
                writeln!(s, "targeted {}: {}", t.spec, if t.ok { "ok" } else { "FAILED" }).unwrap();
            }
            if !r.missing.is_empty() {
                writeln!(s, "missing: {}", r.missing.join(", ")).unwrap();
            }
            if !r.unexpected.is_empty() {
                writeln!(s, "unexpected: {} graphs", r.unexpected.len()).unwrap();
            }
            writeln!(s, "{}", if ok { "matches the classification" } else { "CLASSIFICATION VIOLATION" }).unwrap();
            s
        }
        Format::Dot => return Err(no_dot("a report")),
    };
    Ok((text, if ok { EXIT_OK } else { EXIT_ALARM }))
}

fn extension(r: ExtensionEquivalenceReport, fmt: Format) -> Outcome {
    let ok = r.ok();
    let text = match fmt {
        Format::Json => pretty(&r),
        Format::Summary => format!(
            "{} exhaustive + {} random instances (seed {}), {} ultrahomogeneous, condition failures {:?}, {} mismatches\n",
            r.corpus,
            r.random,
            r.seed,
            r.uh,
            r.condition_failures,
            r.mismatches.len()
        ),
        Format::Dot => return Err(no_dot("a report")),
    };
    Ok((text, if ok { EXIT_OK } else { EXIT_ALARM }))
}
