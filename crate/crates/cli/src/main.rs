use std::io::{self, Write};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use frobcirc::audit::audit_upto;
use frobcirc::circulant::isomorphism_classes;
use frobcirc::covers::{ej_cover_expand, frobenius_reduction, quotient_circulant, verify_cover};
use frobcirc::eisenstein::{
    circulant_to_ej, find_witness, iso_map, kernel_circulant, DiophantineWitness,
};
use frobcirc::graph::{to_dot, to_edge_list};
use frobcirc::numtheory::{classify, gcd};
use frobcirc::scheduler::{
    broadcast_schedule, build_diagram, build_spanning_tree, gossip_schedule, metrics, Cell,
    HexCell, DEFAULT_NODE_BUDGET, EXACT_SEARCH_BOUND,
};
use frobcirc::simulator::{
    run_broadcast, run_gossip, run_gossip_translation, SimReport, GOSSIP_SIM_BOUND,
};
use frobcirc::{EjGraph, EjInt, Error, FrobeniusCirculant};

mod human;

#[derive(Parser)]
#[command(
    name = "frobcirc",
    version,
    about = "Frobenius circulants of degree six and their schedules"
)]
struct Cli {
    /// Print tables instead of JSON.
    #[arg(long, global = true)]
    human: bool,

    /// Worker threads for parallel verbs.
    #[arg(long, global = true, env = "FROBCIRC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a^2 - a + 1 = 0 (mod n) and count the graphs of order n.
    Classify { n: u64 },
    /// Summarize TL_n(a, a-1, 1), or every class of order n when `a` is omitted.
    Build { n: u64, a: Option<u64> },
    /// Map a circulant to its Eisenstein-Jacobi generator.
    Convert {
        n: u64,
        a: u64,
        /// Number of isomorphism-map entries to print.
        #[arg(long, default_value_t = 8)]
        sample: usize,
    },
    /// Map the EJ graph of c + d rho to a circulant.
    ConvertEj {
        #[arg(allow_negative_numbers = true)]
        c: i64,
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Diameter, type vector, forwarding index, Wiener index, gossip and broadcast times.
    Metrics {
        n: u64,
        a: u64,
        /// Certify the broadcast time by exact search up to this order.
        #[arg(long, default_value_t = EXACT_SEARCH_BOUND)]
        exact_bound: u64,
        /// Node budget of the exact search.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// The minimum distance diagram.
    Diagram { n: u64, a: u64 },
    /// Emit a gossip or broadcast schedule.
    Schedule {
        kind: Kind,
        n: u64,
        a: u64,
        /// Broadcast source.
        #[arg(long, default_value_t = 0)]
        source: u64,
    },
    /// Generate a schedule and validate it in the simulator.
    Simulate {
        kind: Kind,
        n: u64,
        a: u64,
        /// Broadcast source.
        #[arg(long, default_value_t = 0)]
        source: u64,
        /// Gossip engine: transmission-level or translation-orbit.
        #[arg(long, value_enum, default_value_t = Engine::Generic)]
        engine: Engine,
        /// Largest order the transmission-level engine accepts.
        #[arg(long, default_value_t = GOSSIP_SIM_BOUND)]
        bound: u64,
    },
    /// Quotient TL_n -> TL_m for a divisor m of n.
    Quotient { n: u64, a: u64, m: u64 },
    /// Expand EJ_(c + d rho) to EJ_(alpha beta) with beta = c2 + d2 rho.
    EjCover {
        #[arg(allow_negative_numbers = true)]
        c: i64,
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[arg(allow_negative_numbers = true)]
        c2: i64,
        #[arg(allow_negative_numbers = true)]
        d2: i64,
    },
    /// Write the graph as DOT or an edge list.
    Export {
        n: u64,
        a: u64,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Run the invariant suite on every class of order at most --max.
    Verify {
        #[arg(long)]
        max: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gossip,
    Broadcast,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Generic,
    Translation,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Edges,
}

#[derive(Serialize)]
struct GraphSummary {
    n: u64,
    a: u64,
    canonical_generator: u64,
    connection_set: [u64; 6],
    diameter: u64,
    isomorphism_classes: usize,
}

#[derive(Serialize)]
struct MapEntry {
    u: u64,
    image: EjInt,
}

#[derive(Serialize)]
struct Conversion {
    n: u64,
    a: u64,
    alpha: EjInt,
    canonical: (i64, i64),
    witness: DiophantineWitness,
    iso_map_sample: Vec<MapEntry>,
}

#[derive(Serialize)]
struct EjConversion {
    alpha: EjInt,
    norm: u64,
    canonical: (i64, i64),
    gcd: u64,
    /// `TL_n(a, a-1, 1)` with kernel exactly `(alpha)`; only when gcd = 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    circulant: Option<FrobeniusCirculant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical_generator: Option<u64>,
    /// For gcd > 1: the circulant this graph covers, and the fold.
    #[serde(skip_serializing_if = "Option::is_none")]
    covers: Option<FrobeniusCirculant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fold: Option<usize>,
}

#[derive(Serialize)]
struct DiagramReport {
    n: u64,
    a: u64,
    r: u64,
    diameter: u64,
    profile: Vec<u64>,
    type_vector: Vec<u64>,
    forwarding_index: u128,
    y: Vec<Cell>,
    hex_cells: Vec<HexCell>,
}

#[derive(Serialize)]
struct CoverReport {
    total_order: usize,
    base_order: usize,
    fold: usize,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<FrobeniusCirculant>,
    projection: Vec<usize>,
}

/// A failure, split by whose fault it is.
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Out {
    human: bool,
}

impl Out {
    fn emit<T: Serialize>(
        &self,
        value: &T,
        table: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> Outcome {
        let stdout = io::stdout();
        let mut w = io::BufWriter::new(stdout.lock());
        if self.human {
            table(&mut w)?;
        } else {
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `None` for precondition failures, which here only mean "not applicable".
fn optional<T>(r: frobcirc::Result<T>) -> Result<Option<T>, Failure> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(e) if e.is_internal() => Err(e.into()),
        Err(_) => Ok(None),
    }
}

fn graph(n: u64, a: u64) -> Result<FrobeniusCirculant, Failure> {
    Ok(FrobeniusCirculant::new(n, a)?)
}

fn summary(g: &FrobeniusCirculant) -> Result<GraphSummary, Failure> {
    Ok(GraphSummary {
        n: g.n(),
        a: g.a(),
        canonical_generator: g.canonical_generator(),
        connection_set: g.connection_set(),
        diameter: build_diagram(g)?.diameter(),
        isomorphism_classes: isomorphism_classes(g.n())?.len(),
    })
}

fn simulate(
    kind: Kind,
    g: &FrobeniusCirculant,
    source: u64,
    engine: Engine,
    bound: u64,
) -> Result<SimReport, Failure> {
    let d = build_diagram(g)?;
    match kind {
        Kind::Gossip => {
            let plan = gossip_schedule(&build_spanning_tree(g, &d)?);
            Ok(match engine {
                Engine::Generic => run_gossip(g, &plan, bound)?,
                Engine::Translation => run_gossip_translation(g, &plan)?,
            })
        }
        Kind::Broadcast => {
            if source >= g.n() {
                return Err(Error::VertexOutOfRange {
                    v: source,
                    n: g.n(),
                }
                .into());
            }
            let s = broadcast_schedule(g, &d)?.translate(source, g.n());
            Ok(run_broadcast(g, &s, source as usize))
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let out = Out { human: cli.human };
    match cli.command {
        Command::Classify { n } => {
            let c = classify(n)?;
            out.emit(&c, |w| human::classification(w, &c))
        }
        Command::Build { n, a } => {
            let graphs = match a {
                Some(a) => vec![graph(n, a)?],
                None => isomorphism_classes(n)?,
            };
            if graphs.is_empty() {
                return Err(Failure::Usage(format!(
                    "no Frobenius circulant of order {n}"
                )));
            }
            let rows = graphs.iter().map(summary).collect::<Result<Vec<_>, _>>()?;
            let table = |w: &mut dyn Write| human::summaries(w, &rows);
            match a {
                Some(_) => out.emit(&rows[0], table),
                None => out.emit(&rows, table),
            }
        }
        Command::Convert { n, a, sample } => {
            let g = graph(n, a)?;
            let alpha = circulant_to_ej(&g)?;
            let map = iso_map(&g, alpha)?;
            let report = Conversion {
                n,
                a,
                alpha,
                canonical: alpha.canonicalize()?,
                witness: find_witness(&g, alpha)?,
                iso_map_sample: map
                    .into_iter()
                    .take(sample)
                    .enumerate()
                    .map(|(u, image)| MapEntry { u: u as u64, image })
                    .collect(),
            };
            out.emit(&report, |w| {
                writeln!(w, "TL_{n}({a}) ~ EJ_({})", report.alpha)?;
                writeln!(w, "canonical (c, d)  {:?}", report.canonical)?;
                writeln!(
                    w,
                    "witness           {:?} m={} r={} s={}",
                    report.witness.case, report.witness.m, report.witness.r, report.witness.s
                )?;
                for e in &report.iso_map_sample {
                    writeln!(w, "  {:>6} -> {}", e.u, e.image)?;
                }
                Ok(())
            })
        }
        Command::ConvertEj { c, d } => {
            let alpha = EjInt::new(c, d);
            let canonical = alpha.canonicalize()?;
            let norm = u64::try_from(alpha.norm()).map_err(|_| Error::ModulusTooLarge(u64::MAX))?;
            let g = gcd(c.unsigned_abs(), d.unsigned_abs());
            let mut report = EjConversion {
                alpha,
                norm,
                canonical,
                gcd: g,
                circulant: None,
                canonical_generator: None,
                covers: None,
                fold: None,
            };
            // not every EJ graph is a Frobenius circulant or covers one
            if g == 1 {
                if let Some(tl) = optional(kernel_circulant(alpha))? {
                    report.canonical_generator = Some(tl.canonical_generator());
                    report.circulant = Some(tl);
                }
            } else if let Some((base, map)) = optional(frobenius_reduction(alpha))? {
                report.covers = Some(base);
                report.fold = Some(map.fold);
            }
            out.emit(&report, |w| human::ej_conversion(w, &report))
        }
        Command::Metrics {
            n,
            a,
            exact_bound,
            budget,
        } => {
            let m = metrics(&graph(n, a)?, exact_bound, budget)?;
            out.emit(&m, |w| human::metrics(w, &m))
        }
        Command::Diagram { n, a } => {
            let g = graph(n, a)?;
            let d = build_diagram(&g)?;
            let report = DiagramReport {
                n,
                a,
                r: d.r,
                diameter: d.diameter(),
                profile: d.profile.clone(),
                type_vector: d.type_vector(),
                forwarding_index: d.forwarding_index(),
                hex_cells: d.hex_cells(),
                y: d.y,
            };
            out.emit(&report, |w| {
                human::diagram(w, &report.profile, &report.y, report.diameter)
            })
        }
        Command::Schedule { kind, n, a, source } => {
            let g = graph(n, a)?;
            let d = build_diagram(&g)?;
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            match kind {
                Kind::Gossip => {
                    let plan = gossip_schedule(&build_spanning_tree(&g, &d)?);
                    if out.human {
                        human::gossip(&mut w, &plan)?;
                    } else {
                        plan.write_json(&mut w)?;
                        writeln!(w)?;
                    }
                }
                Kind::Broadcast => {
                    if source >= n {
                        return Err(Error::VertexOutOfRange { v: source, n }.into());
                    }
                    let s = broadcast_schedule(&g, &d)?.translate(source, n);
                    if out.human {
                        human::broadcast(&mut w, &s)?;
                    } else {
                        serde_json::to_writer(&mut w, &s)?;
                        writeln!(w)?;
                    }
                }
            }
            w.flush()?;
            Ok(())
        }
        Command::Simulate {
            kind,
            n,
            a,
            source,
            engine,
            bound,
        } => {
            let g = graph(n, a)?;
            let report = simulate(kind, &g, source, engine, bound)?;
            out.emit(&report, |w| human::sim_report(w, &report))?;
            if report.valid {
                Ok(())
            } else {
                Err(Failure::Internal(
                    "generated schedule failed validation".into(),
                ))
            }
        }
        Command::Quotient { n, a, m } => {
            let g = graph(n, a)?;
            let (base, map) = quotient_circulant(&g, m)?;
            let report = CoverReport {
                total_order: map.total_order,
                base_order: map.base_order,
                fold: map.fold,
                verified: verify_cover(&map, &g, &base),
                base: Some(base),
                projection: map.projection,
            };
            out.emit(&report, |w| human::cover(w, &report))
        }
        Command::EjCover { c, d, c2, d2 } => {
            let alpha = EjInt::new(c, d);
            let (total, map) = ej_cover_expand(alpha, EjInt::new(c2, d2))?;
            let base = EjGraph::new(alpha)?;
            let report = CoverReport {
                total_order: map.total_order,
                base_order: map.base_order,
                fold: map.fold,
                verified: verify_cover(&map, &total, &base),
                base: None,
                projection: map.projection,
            };
            out.emit(&report, |w| human::cover(w, &report))
        }
        Command::Export { n, a, format } => {
            let g = graph(n, a)?;
            let text = match format {
                Format::Dot => to_dot(&g, &format!("TL_{n}({a})")),
                Format::Edges => to_edge_list(&g),
            };
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
        Command::Verify { max } => {
            let step = AtomicUsize::new(0);
            let report = audit_upto(max, |done, total| {
                // roughly twenty progress lines per run
                let bucket = done * 20 / total.max(1);
                if step.fetch_max(bucket, Ordering::Relaxed) < bucket || done == total {
                    eprintln!("verified {done}/{total} classes");
                }
            })?;
            out.emit(&report, |w| human::audit(w, &report))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Internal(format!(
                    "{} invariant failures",
                    report.failures.len()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
