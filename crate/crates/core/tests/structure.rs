mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Zero};
use proptest::prelude::*;

use neighbourly::construct::{linking_triangles, lost_facets, new_vertex_components, scan_sewing_nonfaces, sew};
use neighbourly::exact_geometry::linalg::solve;
use neighbourly::figures::{corr_21_in, figure_chart, quotient_polygon};
use neighbourly::linkage::{scan_lemma_c23, scan_lemma_d, universal_edges_def, LinkageStructure, VertexArray};
use neighbourly::polytope::format::{self, FormatError};
use neighbourly::polytope::edge;
use neighbourly::{Polytope, Rational, VertexId};

use common::*;

/// Whether the plane through `abc` meets the relative interior of the
/// triangle `efg`, by solving `a + s(b-a) + t(c-a) = λe + μf + (1-λ-μ)g`.
fn plane_pierces_triangle(p: &Polytope, abc: [VertexId; 3], efg: [VertexId; 3]) -> bool {
    let [a, b, c] = abc.map(|v| p.point(v).coords().to_vec());
    let [e, f, g] = efg.map(|v| p.point(v).coords().to_vec());
    let rows: Vec<Vec<Rational>> = (0..4)
        .map(|i| {
            vec![
                b[i].clone() - a[i].clone(),
                c[i].clone() - a[i].clone(),
                g[i].clone() - e[i].clone(),
                g[i].clone() - f[i].clone(),
            ]
        })
        .collect();
    let rhs: Vec<Rational> = (0..4).map(|i| g[i].clone() - a[i].clone()).collect();
    let Some(x) = solve(&rows, &rhs) else { return false };
    let (l, m) = (x[2].clone(), x[3].clone());
    let rest = Rational::one() - l.clone() - m.clone();
    l > Rational::zero() && m > Rational::zero() && rest > Rational::zero()
}

fn scaled(p: &Polytope, k: i64) -> Polytope {
    let s = q(k, 7);
    Polytope::from_vertices(p.vertices().iter().map(|v| v.scale(&s)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn text_format_round_trips(m in 5usize..=9, k in 1i64..=30) {
        let p = scaled(&Polytope::cyclic(m).unwrap(), k);
        let back: Polytope = format::parse(&format::write(&p)).unwrap();
        prop_assert_eq!(back.vertices(), p.vertices());
        prop_assert_eq!(back.facet_set(), p.facet_set());
    }

    #[test]
    fn a_corrupted_line_is_reported_by_number(m in 5usize..=8, line in 3usize..=8) {
        let text = format::write(&Polytope::cyclic(m).unwrap());
        let line = line.min(m + 2);
        let bad: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| if i + 1 == line { "v 1 1 2 x 4".to_string() } else { l.to_string() })
            .join("\n");
        match format::parse::<Rational>(&bad) {
            Err(FormatError::Syntax { line: l, .. }) => prop_assert_eq!(l, line),
            other => prop_assert!(false, "unexpected {:?}", other.map(|p| p.vertex_count())),
        }
    }

    #[test]
    fn linking_triangles_matches_plane_piercing(picks in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
        let p = Polytope::cyclic(8).unwrap();
        let abc = [picks[0], picks[1], picks[2]].map(VertexId);
        let efg = [picks[3], picks[4], picks[5]].map(VertexId);
        let linked = linking_triangles(&p, abc, efg).unwrap();
        prop_assert_eq!(linked, plane_pierces_triangle(&p, abc, efg));
        prop_assert_eq!(linked, linking_triangles(&p, efg, abc).unwrap());
    }

    #[test]
    fn figure_predicates_do_not_depend_on_the_section(x in 0usize..8, a in 1i64..100, b in 1i64..100) {
        static P8: OnceLock<Polytope> = OnceLock::new();
        let p = P8.get_or_init(|| sewn_instances().remove(1));
        let x = VertexId(x);
        let c1 = figure_chart(p, x, &q(a, 100)).unwrap();
        let c2 = figure_chart(p, x, &q(b, 100)).unwrap();
        let others: Vec<VertexId> = p.vertex_ids().filter(|&v| v != x).collect();
        for ys in others.iter().copied().permutations(5).step_by(31) {
            let ys = [ys[0], ys[1], ys[2], ys[3], ys[4]];
            let [y1, y2, y3, y4, y5] = ys;
            prop_assert_eq!(c1.plane_separates([y1, y2, y3], y4, y5), c2.plane_separates([y1, y2, y3], y4, y5));
            prop_assert!(corr_21_in(p, &c1, ys));
        }
    }
}

#[test]
fn every_omit_choice_sews_correctly() {
    let p = Polytope::cyclic(7).unwrap();
    for e in universal_edges_def(&p) {
        let polygon = quotient_polygon(&p, e).unwrap();
        for omit in polygon.polygon_edges() {
            let ext = sew(&p, e, Some(omit)).unwrap();
            let r = &ext.result;
            let v = ext.new_id();
            assert!(r.is_neighbourly());
            assert_eq!(r.vertex_count(), 8);
            let lost = lost_facets(&p, r);
            assert_eq!(lost, ext.frame.target_facets.iter().copied().collect::<BTreeSet<_>>());
            assert_eq!(lost.len(), polygon.cyclic_order.len() - 1);
            assert_eq!(new_vertex_components(&ext).unwrap(), lost);
            assert!(ext.gained_universal.contains(&edge(e[0], v)));
            assert!(ext.gained_universal.contains(&edge(e[1], v)));
            assert!(scan_sewing_nonfaces(&ext).holds());
        }
    }
}

#[test]
fn sewing_refuses_non_universal_edges_and_foreign_omits() {
    let p = Polytope::cyclic(8).unwrap();
    let u = universal_edges_def(&p);
    let bad = p.vertex_ids().tuple_combinations().map(|(a, b)| edge(a, b)).find(|e| !u.contains(e)).unwrap();
    assert!(sew(&p, bad, None).is_err());
    let good = *u.iter().next().unwrap();
    assert!(sew(&p, good, Some(good)).is_err());
}

#[test]
fn sewing_back_onto_the_new_vertex_breaks_simple_linkage() {
    let mut p = Polytope::cyclic(6).unwrap();
    for (a, b) in [(1, 2), (2, 7), (1, 7)] {
        p = sew(&p, [id(a), id(b)], None).unwrap().result;
    }
    let ls = LinkageStructure::compute(&p, &VertexArray::natural(9)).unwrap();
    assert!(!ls.is_chain(&ls.vk(7)));
    assert!(!ls.is_simply_linked().unwrap());
}

#[test]
fn pipeline_polytopes_satisfy_the_chain_lemmas() {
    for p in sewn_instances().into_iter().skip(3) {
        let n = p.vertex_count();
        let ls = LinkageStructure::compute(&p, &VertexArray::natural(n)).unwrap();
        assert!(ls.is_simply_linked().unwrap());
        let d = scan_lemma_d(&p, &ls);
        assert_eq!(d.probes, p.facet_count());
        assert!(d.holds(), "{n}: {:?}", d.counterexamples);
        let c = scan_lemma_c23(&p, &ls);
        assert!(c.probes > 0);
        assert!(c.holds(), "{n}: {:?}", c.counterexamples);
    }
}
