//! The acceptance suite: one PASS/FAIL line per criterion. All comparisons
//! are exact (rational arithmetic, zero tolerance); sample counts and seeds
//! are pinned below.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use neighbourly::construct::sew;
use neighbourly::figures::{corr_21_in, corr_22_in, figure_chart, quotient_chart, vertex_figure};
use neighbourly::linkage::{
    bipartite_split, scan_lemma_c1, scan_lemma_d, universal_edges_def, universal_edges_sep,
    LinkageStructure, VertexArray,
};
use neighbourly::polytope::{gale_facets, sorted};
use neighbourly::separation::{
    lemma_b_certificate, min_separation, restricted_min_separation, verify_conjecture, LemmaBCase,
    SampleKind, SeparationInstance, VerifyConfig,
};
use neighbourly::{Facet, Point4, Polytope, VertexId};

use common::*;

/// Random interior samples per instance in the bound sweep.
const SWEEP_SAMPLES: usize = 100;
const SWEEP_SEED: u64 = 20_240_601;
/// Figure/quotient correspondence probes per polytope.
const PROBES: usize = 200;
const PROBE_SEED: u64 = 7;
const FAMILY_SEED: u64 = 11;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn cyclic(m: usize) -> Polytope {
    Polytope::cyclic(m).unwrap()
}

/// Cyclic polytopes C_6..C_10 and the five sewn instances, with arrays.
fn instances() -> Vec<(String, Polytope)> {
    let mut out: Vec<(String, Polytope)> = (6..=10).map(|m| (format!("C{m}"), cyclic(m))).collect();
    for p in sewn_instances() {
        out.push((format!("S{}", p.vertex_count()), p));
    }
    out
}

fn c1_gale() -> Outcome {
    for m in 5..=10 {
        let p = cyclic(m);
        // Independent oracle: every 4-subset whose hyperplane leaves all other
        // vertices on one side.
        let brute: BTreeSet<Facet> = p
            .vertex_ids()
            .combinations(4)
            .filter(|s| {
                let pts: Vec<&Point4> = s.iter().map(|&v| p.point(v)).collect();
                let h = neighbourly::exact_geometry::hyperplane_through(pts[0], pts[1], pts[2], pts[3]).unwrap();
                let signs: BTreeSet<_> = p
                    .vertex_ids()
                    .filter(|v| !s.contains(v))
                    .map(|v| h.side_of(p.point(v)))
                    .collect();
                signs.len() == 1
            })
            .map(|s| [s[0], s[1], s[2], s[3]])
            .collect();
        ensure!(p.facet_set() == gale_facets(m), "C{m}: hull facets differ from Gale prediction");
        ensure!(brute == gale_facets(m), "C{m}: brute-force facets differ from Gale prediction");
    }
    Ok("facets(C_m) = Gale evenness = brute force, m = 5..10".into())
}

fn c2_neighbourly() -> Outcome {
    for m in 5..=10 {
        let p = cyclic(m);
        let edges = p.face_set().edges;
        ensure!(edges.len() == m * (m - 1) / 2, "C{m} has {} edges", edges.len());
        ensure!(p.is_neighbourly(), "C{m} not neighbourly");
    }
    Ok("C_m has all C(m,2) edges, m = 5..10".into())
}

fn c3_beyond_and_figures() -> Outcome {
    for m in 6..=9 {
        let q = cyclic(m);
        let p = cyclic(m + 1);
        let x = VertexId(m);
        let beyond: BTreeSet<Facet> = q.beyond_set(p.point(x)).unwrap().into_iter().collect();
        ensure!(beyond.len() == m - 3, "m={m}: beyond {} facets", beyond.len());
        let lost: BTreeSet<Facet> = q.facet_set().difference(&p.facet_set()).copied().collect();
        ensure!(lost == beyond, "m={m}: F(Q) minus F(P) is not the beyond set");
        let fig = vertex_figure(&p, x);
        ensure!(fig.is_stacked(), "m={m}: figure not stacked");
        let cd = fig.cut_decomposition().unwrap();
        let s = fig.vertex_count();
        ensure!(s == m, "m={m}: figure has {s} vertices");
        ensure!(cd.cuts.len() == s - 4, "m={m}: {} cuts", cd.cuts.len());
        ensure!(cd.components.len() == s - 3, "m={m}: {} components", cd.components.len());
        ensure!(cd.components == lost, "m={m}: components differ from F(Q) minus F(P)");
    }
    Ok("beyond m-3 facets; components = F(Q)\\F(P); s-4 cuts, s-3 components, m = 6..9".into())
}

fn c4_universal() -> Outcome {
    let c6 = cyclic(6);
    let u6 = universal_edges_def(&c6);
    ensure!(u6.len() == 9, "|U(C6)| = {}", u6.len());
    let ids: Vec<VertexId> = c6.vertex_ids().collect();
    let split = bipartite_split(&ids, &u6);
    ensure!(split.is_some(), "U(C6) is not Y x Z");
    for m in 7..=10 {
        let u = universal_edges_def(&cyclic(m));
        ensure!(u.len() == m, "|U(C{m})| = {}", u.len());
    }
    let mut checked = 0;
    for (name, p) in instances().into_iter().chain([("C5".into(), cyclic(5))]) {
        ensure!(universal_edges_def(&p) == universal_edges_sep(&p), "{name}: detectors disagree");
        checked += 1;
    }
    let (y, z) = split.unwrap();
    Ok(format!(
        "|U(C6)| = 9 = {:?} x {:?}; |U(C_m)| = m for 7..10; detectors agree on {checked} polytopes",
        y.map(|v| v.label()),
        z.map(|v| v.label())
    ))
}

fn c5_correspondences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut total = 0;
    for (name, p) in instances() {
        let ids: Vec<VertexId> = p.vertex_ids().collect();
        let mut figs = HashMap::new();
        let mut quots = HashMap::new();
        for _ in 0..PROBES {
            let x = ids[rng.gen_range(0..ids.len())];
            let pool: Vec<VertexId> = ids.iter().copied().filter(|&v| v != x).collect();
            let ys: [VertexId; 5] = distinct(&mut rng, &pool);
            let chart = figs
                .entry(x)
                .or_insert_with(|| figure_chart(&p, x, &q(1, 2)).unwrap());
            ensure!(corr_21_in(&p, chart, ys), "{name}: figure correspondence fails at x={x} ys={ys:?}");

            let [a, b]: [VertexId; 2] = distinct(&mut rng, &ids);
            let e = [a.min(b), a.max(b)];
            let pool: Vec<VertexId> = ids.iter().copied().filter(|v| !e.contains(v)).collect();
            let zs: [VertexId; 4] = distinct(&mut rng, &pool);
            let chart = quots.entry(e).or_insert_with(|| quotient_chart(&p, e).unwrap());
            ensure!(corr_22_in(&p, chart, zs), "{name}: quotient correspondence fails at e={e:?} zs={zs:?}");
            total += 2;
        }
    }
    Ok(format!("{total} probes ({PROBES} + {PROBES} per polytope, 10 polytopes), all true"))
}

fn c6_pipeline() -> Outcome {
    let mut p = cyclic(6);
    let mut gained = Vec::new();
    for &(a, b) in &PIPELINE {
        let ext = sew(&p, [id(a), id(b)], None).map_err(|e| format!("sew {a},{b}: {e}"))?;
        let v = ext.new_id();
        ensure!(ext.result.is_neighbourly(), "sew {a},{b}: result not neighbourly");
        ensure!(
            ext.gained_universal.iter().any(|e| e.contains(&v)),
            "sew {a},{b}: no gained universal edge through {v}"
        );
        let u = universal_edges_def(&ext.result);
        for y in [id(a), id(b)] {
            ensure!(u.contains(&sorted([v, y])), "sew {a},{b}: [{v},{y}] not universal");
        }
        gained.push(ext.gained_universal.len());
        p = ext.result;
    }
    ensure!(p.vertex_count() == 11, "ended with {} vertices", p.vertex_count());
    let ls = LinkageStructure::compute(&p, &VertexArray::natural(11)).unwrap();
    ensure!(ls.is_simply_linked().unwrap(), "final array not simply linked");
    let chains: Vec<Vec<usize>> = ls.maximal_chains().into_iter().map(|c| c.members).collect();
    Ok(format!("11 vertices, neighbourly, simply linked; chains {chains:?}; gained {gained:?}"))
}

fn c7_simplex() -> Outcome {
    let p = Polytope::simplex();
    let inst = SeparationInstance::new(&p, p.centroid()).unwrap();
    let solver = min_separation(&inst).s_value;
    let family: Vec<Facet> = p.facets().collect();
    let brute = brute_force_min(&inst, &family);
    ensure!(solver == 5 && brute == 5, "solver {solver}, brute force {brute}");
    Ok("s(centroid of 4-simplex) = 5 = exhaustive partition minimum".into())
}

fn c8_bounds() -> Outcome {
    let mut lines = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    let config = VerifyConfig { samples: SWEEP_SAMPLES, seed: SWEEP_SEED, force: false, timing: false };

    let mut sweep_max = 0;
    let mut core_max = 0;
    let mut swept = 0;
    for (name, p) in instances() {
        let array = VertexArray::natural(p.vertex_count());
        let r = verify_conjecture(&p, &array, &config).map_err(|e| format!("{name}: {e}"))?;
        let random = r.samples.iter().filter(|s| s.kind == SampleKind::Random).count();
        ensure!(random >= SWEEP_SAMPLES, "{name}: only {random} random samples");
        ensure!(r.within_bound, "{name}: s = {} > 16", r.max_s);
        for s in r.samples.iter().filter(|s| s.kind == SampleKind::Core) {
            ensure!(s.s <= 9, "{name}: core point needs {}", s.s);
            core_max = core_max.max(s.s);
        }
        sweep_max = sweep_max.max(r.max_s);
        swept += r.samples.len();
    }
    lines.push(format!("s<=16 over {swept} samples (max {sweep_max}); core <= 9 (max {core_max})"));

    let mut a_max = 0;
    let mut a_count = 0;
    let mut r41_max = 0;
    let mut r41_count = 0;
    let mut r42_max = 0;
    let mut r42_count = 0;
    for (name, p) in instances() {
        let outer = p.facet_set();
        for (keep, sub) in neighbourly_subpolytopes(&p, 1) {
            let shared: Vec<Facet> = lifted_facets(&keep, &sub).intersection(&outer).copied().collect();
            for (i, (o, on_bd)) in points_outside_int_q(&mut rng, &p, &keep, &sub, 1).into_iter().enumerate() {
                let inst = SeparationInstance::new(&p, o).unwrap();
                if on_bd {
                    let s = restricted_min_separation(&inst, &shared).unwrap().s_value;
                    ensure!(s <= 3, "{name}: Lemma A family needs {s}");
                    a_max = a_max.max(s);
                    a_count += 1;
                }
                if i >= 4 {
                    continue;
                }
                let s = min_separation(&inst).s_value;
                ensure!(s <= 9, "{name}: O outside int Q (N_(m-1)) needs {s}");
                r41_max = r41_max.max(s);
                r41_count += 1;
            }
        }
        if p.vertex_count() >= 8 {
            let subs = neighbourly_subpolytopes(&p, 3);
            for (keep, sub) in subs.iter().take(4) {
                for (o, _) in points_outside_int_q(&mut rng, &p, keep, sub, 1).into_iter().take(6) {
                    let inst = SeparationInstance::new(&p, o).unwrap();
                    let s = min_separation(&inst).s_value;
                    ensure!(s <= 15, "{name}: O outside int Q (N_(m-3)) needs {s}");
                    r42_max = r42_max.max(s);
                    r42_count += 1;
                }
            }
        }
    }
    lines.push(format!("Lemma A <= 3 over {a_count} (max {a_max})"));
    lines.push(format!("outside Q <= 9 over {r41_count} (max {r41_max}); outside lower prefix <= 15 over {r42_count} (max {r42_max})"));

    let mut b_interior = (0, 0);
    let mut b_cut = (0, 0);
    for (name, p) in instances() {
        for w in p.vertex_ids() {
            let rest: Vec<VertexId> = p.vertex_ids().filter(|&v| v != w).collect();
            if !p.subpolytope(&rest).unwrap().is_neighbourly() {
                continue;
            }
            let all: Vec<&Point4> = p.vertices().iter().collect();
            let mut points: Vec<Point4> = (0..2).map(|_| random_combination(&mut rng, &all)).collect();
            let cuts = vertex_figure(&p, w).cut_decomposition().unwrap().cuts;
            for cut in cuts.iter().take(2) {
                let tet = [p.point(w), p.point(cut[0]), p.point(cut[1]), p.point(cut[2])];
                points.push(random_combination(&mut rng, &tet));
            }
            for o in points.into_iter().filter(|o| p.contains_interior(o)) {
                let cert = lemma_b_certificate(&p, w, &o).map_err(|e| format!("{name} w={w}: {e}"))?;
                let family: BTreeSet<Facet> = p.facets_containing(&[w]).map(|f| f.vertices).collect();
                ensure!(cert.certificate.validate(&p, &o, &family).is_ok(), "{name} w={w}: invalid certificate");
                let size = cert.certificate.size();
                match cert.case {
                    LemmaBCase::Interior { .. } => {
                        ensure!(size <= 4, "{name} w={w}: interior case needs {size}");
                        b_interior = (b_interior.0 + 1, b_interior.1.max(size));
                    }
                    LemmaBCase::Cut { .. } => {
                        ensure!(size <= 6, "{name} w={w}: cut case needs {size}");
                        b_cut = (b_cut.0 + 1, b_cut.1.max(size));
                    }
                }
            }
        }
    }
    ensure!(b_cut.0 > 0, "no cut-case Lemma B instance was generated");
    lines.push(format!(
        "Lemma B interior <= 4 over {} (max {}), cut <= 6 over {} (max {})",
        b_interior.0, b_interior.1, b_cut.0, b_cut.1
    ));
    Ok(lines.join("; "))
}

fn c9_scans() -> Outcome {
    let mut probes = 0;
    let mut d_probes = 0;
    for p in sewn_instances().into_iter().filter(|p| p.vertex_count() <= 9) {
        let n = p.vertex_count();
        let ls = LinkageStructure::compute(&p, &VertexArray::natural(n)).unwrap();
        let c1 = scan_lemma_c1(&p, &ls);
        ensure!(c1.holds(), "n={n}: C.1 counterexamples {:?}", c1.counterexamples);
        let d = scan_lemma_d(&p, &ls);
        ensure!(d.holds(), "n={n}: Lemma D counterexamples {:?}", d.counterexamples);
        probes += c1.probes;
        d_probes += d.probes;
    }
    Ok(format!("C.1: {probes} probes, Lemma D: {d_probes} facets, zero counterexamples (n = 7..9)"))
}

fn c10_determinism() -> Outcome {
    let p = sewn_instances().remove(2);
    let array = VertexArray::natural(p.vertex_count());
    let config = VerifyConfig { samples: 30, seed: 99, force: false, timing: false };
    let a = serde_json::to_string(&verify_conjecture(&p, &array, &config).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_conjecture(&p, &array, &config).unwrap()).unwrap();
    ensure!(a == b, "reports differ");
    let other = VerifyConfig { seed: 100, ..config };
    let c = serde_json::to_string(&verify_conjecture(&p, &array, &other).unwrap()).unwrap();
    ensure!(a != c, "a different seed gave the same report");
    Ok(format!("identical {}-byte reports for equal seeds", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("facet cross-validation", c1_gale),
        ("neighbourliness", c2_neighbourly),
        ("beyond sets and stacked figures", c3_beyond_and_figures),
        ("universal edges", c4_universal),
        ("correspondence probes", c5_correspondences),
        ("sewing pipeline", c6_pipeline),
        ("solver ground truth", c7_simplex),
        ("separation bounds", c8_bounds),
        ("lemma C/D scans", c9_scans),
        ("determinism", c10_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    println!("acceptance: exact arithmetic, tolerance 0");
    let mut failed = 0;
    let mut summary = BTreeMap::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str()) || *x == (i + 1).to_string()) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match &outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
        summary.insert(i + 1, outcome.is_ok());
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        summary.values().filter(|&&ok| ok).count()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
