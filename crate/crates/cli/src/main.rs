//! Command-line front end: exact analysis of restricted configuration
//! spaces of metric graphs.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use graphconfig_core::report::{
    to_json_string, ComplexReport, SweepReport, VerifyCheck, VerifyReport,
};
use graphconfig_core::sweep::render_bound;
use graphconfig_core::{
    bounds, build_complex, format_rational, oracle, parse_rational, rat_int, sweep_types,
    MetricGraph, Rational, Ray, Restraints,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "graphconfig",
    version,
    about = "Exact cell structure, invariants and restraint sweeps for configuration spaces of metric graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Build the cell complex at a fixed restraint vector and report its
    /// invariants.
    Analyze {
        /// Graph file (`a b length` lines; `#` comments).
        graph: PathBuf,
        /// Number of points.
        #[arg(long)]
        n: usize,
        /// Restraints: a single rational applied to every pair, or a
        /// comma-separated list over pairs in lexicographic order.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Sweep a restraint ray: critical values, intervals, class counts.
    Sweep {
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        /// Ray as `base;direction`, each a scalar or a comma-separated
        /// vector over pairs. Default: base 0, all directions 1.
        #[arg(long)]
        ray: Option<String>,
        /// Count the empty space as an isotopy class in the summary.
        #[arg(long)]
        include_empty: bool,
    },
    /// Evaluate the closed-form counting bounds.
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        edges: u64,
        #[arg(long)]
        dim: u64,
    },
    /// Write a corolla graph file (k edges of length 1 + 1/2^i).
    Corolla {
        #[arg(long)]
        k: usize,
        /// Output path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the pipeline against the brute-force oracles.
    Verify {
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Grid step override for the discretized oracle.
        #[arg(long)]
        mesh: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let line = e.to_string();
            let first = line.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    if let Ok(threads) = std::env::var("GRAPHCONFIG_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
    let run = std::panic::catch_unwind(|| dispatch(&cli));
    match run {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("error: internal invariant violation");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), String> {
    match &cli.command {
        Command::Analyze { graph, n, r } => analyze(graph, *n, r, cli.format),
        Command::Sweep {
            graph,
            n,
            ray,
            include_empty,
        } => sweep(graph, *n, ray.as_deref(), *include_empty, cli.format),
        Command::Bound { n, edges, dim } => bound(*n, *edges, *dim),
        Command::Corolla { k, out } => corolla(*k, out.as_deref()),
        Command::Verify { graph, n, r, mesh } => verify(graph, *n, r, mesh.as_deref()),
    }
}

fn load_graph(path: &std::path::Path) -> Result<MetricGraph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    MetricGraph::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_restraints(spec: &str, n: usize) -> Result<Restraints, String> {
    let pairs = Restraints::pair_count(n);
    let parts: Vec<&str> = spec.split(',').collect();
    let values: Vec<Rational> = if parts.len() == 1 {
        let v = parse_rational(parts[0])?;
        vec![v; pairs]
    } else {
        if parts.len() != pairs {
            return Err(format!(
                "expected 1 or {pairs} restraint components for n = {n}, got {}",
                parts.len()
            ));
        }
        parts
            .iter()
            .map(|p| parse_rational(p))
            .collect::<Result<_, _>>()?
    };
    Restraints::new(values).map_err(|e| e.to_string())
}

fn parse_ray(spec: Option<&str>, n: usize) -> Result<Ray, String> {
    match spec {
        None => Ray::scalar(n).map_err(|e| e.to_string()),
        Some(s) => {
            let (base, dir) = s
                .split_once(';')
                .ok_or_else(|| "ray must be `base;direction`".to_string())?;
            let base = parse_restraints(base, n)?;
            let pairs = Restraints::pair_count(n);
            let parts: Vec<&str> = dir.split(',').collect();
            let direction: Vec<Rational> = if parts.len() == 1 {
                vec![parse_rational(parts[0])?; pairs]
            } else {
                if parts.len() != pairs {
                    return Err(format!(
                        "expected 1 or {pairs} direction components, got {}",
                        parts.len()
                    ));
                }
                parts
                    .iter()
                    .map(|p| parse_rational(p))
                    .collect::<Result<_, _>>()?
            };
            Ray::new(n, base, direction).map_err(|e| e.to_string())
        }
    }
}

fn analyze(path: &std::path::Path, n: usize, r: &str, format: Format) -> Result<(), String> {
    if n < 1 {
        return Err("n must be at least 1".into());
    }
    let g = load_graph(path)?;
    let r = parse_restraints(r, n)?;
    let x = build_complex(&g, n, &r);
    let rep = ComplexReport::from_complex(&x);
    match format {
        Format::Json => println!("{}", to_json_string(&rep)),
        Format::Table => {
            println!("f-vector   : {:?}", rep.f_vector);
            println!("components : {}", rep.components);
            println!("euler      : {}", rep.euler);
            println!("betti mod 2: {:?}", rep.betti_mod2);
            println!("cells      : {}", rep.cells.len());
            for c in &rep.cells {
                println!("  {c}");
            }
        }
    }
    Ok(())
}

fn sweep(
    path: &std::path::Path,
    n: usize,
    ray: Option<&str>,
    include_empty: bool,
    format: Format,
) -> Result<(), String> {
    if n < 2 {
        return Err("sweeps need n >= 2 (no restraint pairs otherwise)".into());
    }
    let g = load_graph(path)?;
    let ray = parse_ray(ray, n)?;
    let s = sweep_types(&g, n, &ray);
    let mut rep = SweepReport::from_sweep(&s);
    if include_empty {
        rep.counts.isotopy_classes = rep.counts.isotopy_classes_with_empty;
    }
    match format {
        Format::Json => println!("{}", to_json_string(&rep)),
        Format::Table => {
            println!("critical values ({} candidates):", rep.candidates.len());
            for c in &rep.candidates {
                let mark = if c.spurious { "spurious" } else { "critical" };
                println!(
                    "  t = {:<8} {mark:<9} from {} [{} | {}]",
                    c.t,
                    c.provenance.cell,
                    c.provenance.beta.join(","),
                    c.provenance.label
                );
            }
            println!("intervals:");
            for iv in &s.intervals {
                println!(
                    "  ({}, {})  sample {}  components {}  betti {:?}",
                    format_rational(&iv.lo),
                    render_bound(&iv.hi),
                    format_rational(&iv.sample),
                    iv.inv.components,
                    iv.inv.betti_mod2,
                );
            }
            println!("critical points:");
            for cp in &s.critical_points {
                println!(
                    "  t = {}  components {}  betti {:?}",
                    format_rational(&cp.t),
                    cp.inv.components,
                    cp.inv.betti_mod2,
                );
            }
            println!(
                "classes: {} isotopy ({} with empty), {} homotopy signatures",
                rep.counts.isotopy_classes,
                rep.counts.isotopy_classes_with_empty,
                rep.counts.homotopy_signatures
            );
        }
    }
    Ok(())
}

fn bound(n: u64, edges: u64, dim: u64) -> Result<(), String> {
    let rep = bounds::bound_report(edges, n, dim).map_err(|e| e.to_string())?;
    println!("{}", to_json_string(&rep));
    Ok(())
}

fn corolla(k: usize, out: Option<&std::path::Path>) -> Result<(), String> {
    let g = MetricGraph::corolla(k).map_err(|e| e.to_string())?;
    let text = g.to_file_string();
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn verify(path: &std::path::Path, n: usize, r: &str, mesh: Option<&str>) -> Result<(), String> {
    if n < 1 {
        return Err("n must be at least 1".into());
    }
    let g = load_graph(path)?;
    let r = parse_restraints(r, n)?;
    let mut checks = Vec::new();

    // components: complex vs discretized oracle at two meshes
    let x = build_complex(&g, n, &r);
    let mesh = match mesh {
        Some(m) => parse_rational(m)?,
        None => oracle::suggest_mesh(&g, &r, &[]),
    };
    for m in [mesh.clone(), &mesh / rat_int(2)] {
        let name = format!("components at mesh {}", format_rational(&m));
        match oracle::discrete_components(&g, n, &r, &m) {
            Ok(c) => checks.push(VerifyCheck {
                name,
                status: if c == x.components() {
                    "agree"
                } else {
                    "disagree"
                }
                .into(),
                details: format!("complex {} vs oracle {c}", x.components()),
            }),
            Err(e) => checks.push(VerifyCheck {
                name,
                status: "disagree".into(),
                details: e.to_string(),
            }),
        }
    }

    // face posets: Galois connection vs exhaustive enumeration, per cell
    let dist = g.distances();
    let mut agree = 0usize;
    let mut total = 0usize;
    let mut first_fail = String::new();
    for cell in graphconfig_core::all_cells(&g, n) {
        let sys = graphconfig_core::cell_system(&cell, &g, &dist);
        if sys.polytope.dim() > 3 || sys.polytope.num_labels() > 14 {
            continue;
        }
        total += 1;
        let typ = sys.polytope.polytope_type(&r).map_err(|e| e.to_string())?;
        let brute = oracle::bruteforce_face_poset(&sys.polytope, &r).map_err(|e| e.to_string())?;
        let ok = if typ.is_empty() {
            brute.is_empty()
        } else {
            sys.polytope
                .face_poset(&typ)
                .map(|p| p.eq_labeled(&brute))
                .unwrap_or(false)
        };
        if ok {
            agree += 1;
        } else if first_fail.is_empty() {
            first_fail = cell.canonical_string();
        }
    }
    checks.push(VerifyCheck {
        name: "face posets vs exhaustive enumeration".into(),
        status: if agree == total { "agree" } else { "disagree" }.into(),
        details: if agree == total {
            format!("{agree}/{total} cells")
        } else {
            format!("{agree}/{total} cells; first mismatch {first_fail}")
        },
    });

    let all_agree = checks.iter().all(|c| c.status == "agree");
    let rep = VerifyReport { checks, all_agree };
    println!("{}", to_json_string(&rep));
    if all_agree {
        Ok(())
    } else {
        Err("oracle disagreement".into())
    }
}
