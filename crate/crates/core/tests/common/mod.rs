#![allow(dead_code)]

use std::collections::BTreeSet;

use neighbourly::construct::sew;
use neighbourly::separation::{coverable, SeparationInstance};
use neighbourly::{Facet, Point4, Polytope, Rational, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;

/// Sews applied to C_6, as 1-based edge labels. Gives an 11-vertex simply
/// linked polytope whose array has three maximal chains.
pub const PIPELINE: [(usize, usize); 5] = [(1, 2), (3, 4), (5, 6), (9, 5), (7, 2)];

pub fn id(label: usize) -> VertexId {
    VertexId::from_label(label).unwrap()
}

/// The polytopes after each sew of [`PIPELINE`] (7 to 11 vertices), each
/// new vertex appended last so the natural order is the construction array.
pub fn sewn_instances() -> Vec<Polytope> {
    let mut p = Polytope::cyclic(6).unwrap();
    PIPELINE
        .iter()
        .map(|&(a, b)| {
            p = sew(&p, [id(a), id(b)], None).unwrap().result;
            p.clone()
        })
        .collect()
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// A convex combination of `pts` with positive random integer weights.
pub fn random_combination<R: Rng>(rng: &mut R, pts: &[&Point4]) -> Point4 {
    let w: Vec<i64> = pts.iter().map(|_| rng.gen_range(1..=100)).collect();
    let total: i64 = w.iter().sum();
    Point4::combination(pts.iter().copied().zip(w.iter().map(|&x| q(x, total))))
}

/// Minimum number of coverable groups covering `family`, by dynamic
/// programming over subsets with the hull oracle alone.
pub fn brute_force_min(inst: &SeparationInstance<'_, Rational>, family: &[Facet]) -> usize {
    let k = family.len();
    assert!(k <= 14, "brute force is exponential");
    let full = (1usize << k) - 1;
    let ok: Vec<bool> = (0..=full)
        .map(|m| {
            let fs: Vec<Facet> = (0..k).filter(|i| m >> i & 1 == 1).map(|i| family[i]).collect();
            m != 0 && coverable(inst, &fs)
        })
        .collect();
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for m in 1..=full {
        let low = m & m.wrapping_neg();
        // Every cover can be made a partition, and the part holding the
        // lowest element ranges over the coverable submasks containing it.
        let mut sub = m;
        while sub > 0 {
            if sub & low != 0 && ok[sub] && best[m & !sub] != usize::MAX {
                best[m] = best[m].min(best[m & !sub] + 1);
            }
            sub = (sub - 1) & m;
        }
    }
    best[full]
}

/// Vertex subsets `S` with `[S]` neighbourly and full-dimensional, obtained by
/// dropping `drop` vertices.
pub fn neighbourly_subpolytopes(p: &Polytope, drop: usize) -> Vec<(Vec<VertexId>, Polytope)> {
    use itertools::Itertools;
    p.vertex_ids()
        .combinations(drop)
        .filter_map(|gone| {
            let keep: Vec<VertexId> = p.vertex_ids().filter(|v| !gone.contains(v)).collect();
            let sub = p.subpolytope(&keep).ok()?;
            (sub.vertex_count() == keep.len() && sub.is_neighbourly()).then_some((keep, sub))
        })
        .collect()
}

/// Facets of `[keep]` in the labels of `p`.
pub fn lifted_facets(keep: &[VertexId], sub: &Polytope) -> BTreeSet<Facet> {
    sub.facets()
        .map(|f| {
            let mut g = f.map(|v| keep[v.index()]);
            g.sort();
            g
        })
        .collect()
}

/// Points `O` interior to `p` with `O ∉ int Q`: on or just beyond a facet of
/// `Q = [keep]` that is not a facet of `p`. Returns `(O, on_boundary_of_Q)`.
pub fn points_outside_int_q<R: Rng>(
    rng: &mut R,
    p: &Polytope,
    keep: &[VertexId],
    sub: &Polytope,
    per_facet: usize,
) -> Vec<(Point4, bool)> {
    let outer = p.facet_set();
    let cq = sub.centroid();
    let mut out = Vec::new();
    for g in lifted_facets(keep, sub) {
        if outer.contains(&g) {
            continue;
        }
        let pts: Vec<&Point4> = g.iter().map(|&v| p.point(v)).collect();
        for _ in 0..per_facet {
            let on = random_combination(rng, &pts);
            let beyond = on.lerp(&cq, &q(-1, 1000));
            for (o, on_bd) in [(on, true), (beyond, false)] {
                if p.contains_interior(&o) {
                    out.push((o, on_bd));
                }
            }
        }
    }
    out
}

pub fn distinct<R: Rng, const N: usize>(rng: &mut R, pool: &[VertexId]) -> [VertexId; N] {
    let picked: Vec<VertexId> = pool.choose_multiple(rng, N).copied().collect();
    picked.try_into().unwrap()
}
