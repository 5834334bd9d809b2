use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use neighbourly::construct::sew;
use neighbourly::figures::{quotient_polygon, vertex_figure};
use neighbourly::linkage::{universal_edges_def, universal_edges_sep, LinkageStructure, VertexArray};
use neighbourly::polytope::format;
use neighbourly::separation::{
    min_separation, verify::polytope_hash, verify_conjecture, SeparationInstance, VerifyConfig, BOUND,
};
use neighbourly::{Edge, Point4, Polytope, VertexId};

/// Exact construction and analysis of neighbourly 4-polytopes, and minimum
/// hyperplane separation of interior points from their facets.
#[derive(Parser, Debug)]
#[command(name = "neighbourly", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the cyclic polytope with m vertices on the moment curve.
    GenCyclic {
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Facets, neighbourliness, universal edges and vertex-figure structure.
    Analyze {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The vertex figure P/x with its cuts and components.
    Figure {
        path: PathBuf,
        /// 1-based vertex label.
        vertex: usize,
    },
    /// The quotient polygon P/E of an edge.
    Quotient {
        path: PathBuf,
        /// Edge as "a,b" (1-based labels).
        edge: String,
    },
    /// Universal edges, computed by both detectors.
    UniversalEdges { path: PathBuf },
    /// Links, V^k sets and maximal chains under an array.
    Chains {
        path: PathBuf,
        #[arg(long)]
        array: Option<String>,
    },
    CheckLinked {
        path: PathBuf,
        #[arg(long)]
        array: Option<String>,
    },
    CheckSimplyLinked {
        path: PathBuf,
        #[arg(long)]
        array: Option<String>,
    },
    /// Add a vertex beyond the facets around a universal edge.
    Sew {
        path: PathBuf,
        /// Universal edge as "a,b".
        edge: String,
        /// Polygon edge of the quotient to leave out, as "c,d".
        #[arg(long)]
        omit: Option<String>,
        /// Output polytope; a JSON sidecar is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact s(O) with a certificate.
    Separate {
        path: PathBuf,
        /// Four rationals, e.g. "1/2 3 -1 7/3"; defaults to the centroid.
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sample interior points and check s(O) <= 16.
    Verify {
        path: PathBuf,
        #[arg(long)]
        array: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Run even if the array is not simply linked.
        #[arg(long)]
        force: bool,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
}

enum Failure {
    Input(anyhow::Error),
    Bound(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn load(path: &Path) -> Result<Polytope> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    format::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn array_for(p: &Polytope, array: Option<&str>) -> Result<VertexArray> {
    match array {
        Some(s) => Ok(VertexArray::parse(s, p.vertex_count())?),
        None => Ok(VertexArray::natural(p.vertex_count())),
    }
}

fn label(p: &Polytope, l: usize) -> Result<VertexId> {
    VertexId::from_label(l)
        .filter(|v| v.index() < p.vertex_count())
        .ok_or_else(|| anyhow!("vertex {l} outside 1..={}", p.vertex_count()))
}

fn parse_edge(p: &Polytope, s: &str) -> Result<Edge> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        bail!("expected an edge as `a,b`, got `{s}`");
    };
    let a = label(p, a.parse().with_context(|| format!("bad label `{a}`"))?)?;
    let b = label(p, b.parse().with_context(|| format!("bad label `{b}`"))?)?;
    if a == b {
        bail!("edge needs two distinct vertices");
    }
    Ok(neighbourly::polytope::edge(a, b))
}

fn labels(ids: &[VertexId]) -> Vec<usize> {
    ids.iter().map(|v| v.label()).collect()
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn analyze(p: &Polytope) -> Result<Value> {
    let universal = universal_edges_def(p);
    let figures: Vec<Value> = p
        .vertex_ids()
        .map(|x| {
            let fig = vertex_figure(p, x);
            let cd = fig.cut_decomposition().ok();
            json!({
                "vertex": x,
                "figure_vertices": fig.vertex_count(),
                "triangles": fig.triangles.len(),
                "stacked": fig.is_stacked(),
                "cuts": cd.as_ref().map(|c| c.cuts.len()),
                "components": cd.as_ref().map(|c| c.components.len()),
            })
        })
        .collect();
    Ok(json!({
        "polytope_hash": polytope_hash(p),
        "vertices": p.vertex_count(),
        "facet_count": p.facet_count(),
        "facets": p.facets().collect::<Vec<_>>(),
        "neighbourly": p.is_neighbourly(),
        "universal_edges": universal.len(),
        "universal_edge_list": universal,
        "vertex_figures": figures,
    }))
}

fn linkage_json(p: &Polytope, array: &VertexArray) -> Result<(LinkageStructure, Value)> {
    let ls = LinkageStructure::compute(p, array)?;
    let n = ls.n();
    let links: Value = (7..=n)
        .map(|t| (t.to_string(), json!(ls.link_targets(t))))
        .collect::<serde_json::Map<_, _>>()
        .into();
    let vk: Value = (1..=n)
        .map(|k| (k.to_string(), json!(ls.vk(k))))
        .collect::<serde_json::Map<_, _>>()
        .into();
    let v = json!({
        "array": labels(array.order()),
        "links": links,
        "roots": ls.roots(),
        "vk": vk,
        "maximal_chains": ls.maximal_chains(),
        "base_anchors": ls.base_anchors(),
    });
    Ok((ls, v))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenCyclic { m, out } => {
            if m < 5 {
                return Err(anyhow!("cyclic polytopes need m >= 5, got {m}").into());
            }
            let text = format::write(&Polytope::cyclic(m).map_err(anyhow::Error::from)?);
            match out {
                Some(path) => fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Analyze { path, out } => {
            let p = load(&path)?;
            emit(&analyze(&p)?, out.as_deref())?;
        }
        Command::Figure { path, vertex } => {
            let p = load(&path)?;
            let x = label(&p, vertex)?;
            let fig = vertex_figure(&p, x);
            let cd = fig.cut_decomposition().map_err(anyhow::Error::from)?;
            emit(
                &json!({
                    "vertex": x,
                    "figure_vertices": labels(&fig.vertex_ids),
                    "triangles": fig.triangles,
                    "stacked": fig.is_stacked(),
                    "cuts": cd.cuts,
                    "components": cd.components,
                }),
                None,
            )?;
        }
        Command::Quotient { path, edge } => {
            let p = load(&path)?;
            let e = parse_edge(&p, &edge)?;
            let q = quotient_polygon(&p, e).map_err(anyhow::Error::from)?;
            emit(
                &json!({
                    "edge": e,
                    "cyclic_order": labels(&q.cyclic_order),
                    "polygon_edges": q.polygon_edges(),
                }),
                None,
            )?;
        }
        Command::UniversalEdges { path } => {
            let p = load(&path)?;
            let def = universal_edges_def(&p);
            let sep = universal_edges_sep(&p);
            emit(
                &json!({
                    "count": def.len(),
                    "edges": def,
                    "detectors_agree": def == sep,
                }),
                None,
            )?;
        }
        Command::Chains { path, array } => {
            let p = load(&path)?;
            let (_, v) = linkage_json(&p, &array_for(&p, array.as_deref())?)?;
            emit(&v, None)?;
        }
        Command::CheckLinked { path, array } => {
            let p = load(&path)?;
            let (ls, mut v) = linkage_json(&p, &array_for(&p, array.as_deref())?)?;
            v["linked"] = json!(ls.is_linked().map_err(anyhow::Error::from)?);
            emit(&v, None)?;
        }
        Command::CheckSimplyLinked { path, array } => {
            let p = load(&path)?;
            let (ls, mut v) = linkage_json(&p, &array_for(&p, array.as_deref())?)?;
            let linked = ls.is_linked().map_err(anyhow::Error::from)?;
            v["linked"] = json!(linked);
            v["simply_linked"] = json!(linked && ls.is_simply_linked().map_err(anyhow::Error::from)?);
            emit(&v, None)?;
        }
        Command::Sew { path, edge, omit, out } => {
            let p = load(&path)?;
            let e = parse_edge(&p, &edge)?;
            let omit = omit.map(|s| parse_edge(&p, &s)).transpose()?;
            let ext = sew(&p, e, omit).map_err(anyhow::Error::from)?;
            fs::write(&out, format::write(&ext.result))
                .with_context(|| format!("writing {}", out.display()))?;
            let sidecar = json!({
                "input_hash": polytope_hash(&p),
                "output_hash": polytope_hash(&ext.result),
                "new_vertex_id": ext.new_id(),
                "new_vertex": ext.new_vertex,
                "frame": ext.frame,
                "gained_universal": ext.gained_universal,
            });
            let mut side = out.clone().into_os_string();
            side.push(".json");
            emit(&sidecar, Some(Path::new(&side)))?;
        }
        Command::Separate { path, point, report } => {
            let p = load(&path)?;
            let o = match point {
                Some(s) => Point4::parse(&s.replace(',', " ")).map_err(anyhow::Error::from)?,
                None => p.centroid(),
            };
            let inst = SeparationInstance::new(&p, o).map_err(anyhow::Error::from)?;
            let r = min_separation(&inst);
            emit(
                &json!({
                    "polytope_hash": polytope_hash(&p),
                    "point": inst.point,
                    "s": r.s_value,
                    "certificate": r.certificate,
                    "optimality_proof": r.optimality_proof,
                }),
                report.as_deref(),
            )?;
        }
        Command::Verify { path, array, samples, seed, report, force, timing } => {
            let p = load(&path)?;
            let a = array_for(&p, array.as_deref())?;
            let config = VerifyConfig { samples, seed, force, timing };
            let r = verify_conjecture(&p, &a, &config).map_err(anyhow::Error::from)?;
            emit(&serde_json::to_value(&r).map_err(anyhow::Error::from)?, report.as_deref())?;
            eprintln!(
                "{} samples, max s = {}, histogram {:?}",
                r.samples.len(),
                r.max_s,
                r.histogram
            );
            if r.max_s > BOUND {
                return Err(Failure::Bound(format!("s(O) = {} exceeds {BOUND}", r.max_s)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Bound(msg)) => {
            eprintln!("bound violated: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
