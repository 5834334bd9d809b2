//! Vertex figures `P/x` (stacked 3-polytopes), their cut decompositions, and
//! quotient polygons `P/E` for universal edges.
//!
//! Figures are combinatorial first. Geometric charts are built on demand by
//! slicing the cone at `x` (or the wedge at `E`) with an affine section and
//! dropping to intrinsic coordinates.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::exact_geometry::{linalg, orient, Point4, Sign};
use crate::polytope::{edge, sorted, Edge, Facet, Polytope, Triangle, VertexId};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FigureError {
    #[error("vertex figure at {0} is not a stacked 3-polytope")]
    NotStacked(VertexId),
    #[error("[{0}, {1}] is not a universal edge")]
    NotUniversalEdge(VertexId, VertexId),
    #[error("section shift must lie strictly between 0 and 1")]
    BadShift,
    #[error("vertex {0} does not appear in the figure")]
    MissingVertex(VertexId),
    #[error("combinatorial and geometric descriptions disagree: {0}")]
    Inconsistent(String),
}

/// The vertex figure `P/x`, as the triangles `F \ {x}` for facets `F ∋ x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stacked3 {
    pub base: VertexId,
    pub vertex_ids: Vec<VertexId>,
    pub triangles: BTreeSet<Triangle>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutDecomposition {
    pub cuts: BTreeSet<Triangle>,
    pub components: BTreeSet<Facet>,
}

/// One peeling step: `vertex` had exactly the three neighbours `replaced_by`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peel {
    pub vertex: VertexId,
    pub replaced_by: Triangle,
}

pub fn vertex_figure<T: Scalar>(p: &Polytope<T>, x: VertexId) -> Stacked3 {
    let triangles: BTreeSet<Triangle> = p
        .facets_containing(&[x])
        .map(|f| {
            let rest: Vec<VertexId> = f.vertices.iter().copied().filter(|&v| v != x).collect();
            [rest[0], rest[1], rest[2]]
        })
        .collect();
    let vertex_ids = triangles
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Stacked3 { base: x, vertex_ids, triangles }
}

impl Stacked3 {
    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        self.triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]])
            .collect()
    }

    fn adjacency(&self) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> =
            self.vertex_ids.iter().map(|&v| (v, BTreeSet::new())).collect();
        for [a, b] in self.edges() {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj
    }

    /// Whether the triangles form a simplicial 2-sphere's worth of incidences:
    /// `2s - 4` triangles and every edge on exactly two of them.
    pub fn is_simplicial_sphere(&self) -> bool {
        let s = self.vertex_count();
        if s < 4 || self.triangles.len() != 2 * s - 4 {
            return false;
        }
        let mut count = BTreeMap::<Edge, usize>::new();
        for t in &self.triangles {
            for e in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                *count.entry(e).or_default() += 1;
            }
        }
        count.values().all(|&c| c == 2)
    }

    /// Greedy peeling of triangle-degree-3 vertices, smallest id first.
    /// Returns the peeling order when it reduces the figure to a tetrahedron.
    pub fn peeling_order(&self) -> Option<Vec<Peel>> {
        if !self.is_simplicial_sphere() {
            return None;
        }
        let mut tris = self.triangles.clone();
        let mut alive: BTreeSet<VertexId> = self.vertex_ids.iter().copied().collect();
        let mut order = Vec::new();
        while alive.len() > 4 {
            let step = alive.iter().find_map(|&v| {
                let star: Vec<&Triangle> = tris.iter().filter(|t| t.contains(&v)).collect();
                if star.len() != 3 {
                    return None;
                }
                let nbrs: BTreeSet<VertexId> =
                    star.iter().flat_map(|t| t.iter().copied()).filter(|&u| u != v).collect();
                if nbrs.len() != 3 {
                    return None;
                }
                let n: Vec<VertexId> = nbrs.into_iter().collect();
                let lid = [n[0], n[1], n[2]];
                (!tris.contains(&lid)).then_some(Peel { vertex: v, replaced_by: lid })
            })?;
            tris.retain(|t| !t.contains(&step.vertex));
            tris.insert(step.replaced_by);
            alive.remove(&step.vertex);
            order.push(step);
        }
        let rest: Vec<VertexId> = alive.into_iter().collect();
        let full: BTreeSet<Triangle> = rest
            .iter()
            .copied()
            .combinations(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        (tris == full).then_some(order)
    }

    pub fn is_stacked(&self) -> bool {
        self.peeling_order().is_some()
    }

    /// Cuts are the graph triangles that are not figure triangles; components
    /// are the 4-cliques of the figure graph. Both are checked against the
    /// tetrahedra produced by peeling.
    pub fn cut_decomposition(&self) -> Result<CutDecomposition, FigureError> {
        let order = self.peeling_order().ok_or(FigureError::NotStacked(self.base))?;
        let adj = self.adjacency();
        let joined = |a: VertexId, b: VertexId| adj.get(&a).is_some_and(|n| n.contains(&b));

        let mut cuts = BTreeSet::new();
        let mut components = BTreeSet::new();
        for c in self.vertex_ids.iter().copied().combinations(3) {
            let t = [c[0], c[1], c[2]];
            if joined(t[0], t[1]) && joined(t[0], t[2]) && joined(t[1], t[2]) && !self.triangles.contains(&t) {
                cuts.insert(t);
            }
        }
        for c in self.vertex_ids.iter().copied().combinations(4) {
            if c.iter().tuple_combinations().all(|(a, b)| joined(*a, *b)) {
                components.insert([c[0], c[1], c[2], c[3]]);
            }
        }

        let mut peeled: BTreeSet<Facet> = BTreeSet::new();
        let mut remaining: BTreeSet<VertexId> = self.vertex_ids.iter().copied().collect();
        for step in &order {
            let [a, b, c] = step.replaced_by;
            peeled.insert(sorted([step.vertex, a, b, c]));
            remaining.remove(&step.vertex);
        }
        let last: Vec<VertexId> = remaining.into_iter().collect();
        peeled.insert([last[0], last[1], last[2], last[3]]);
        let peeled_cuts: BTreeSet<Triangle> = order.iter().map(|s| s.replaced_by).collect();

        let s = self.vertex_count();
        if components != peeled || cuts != peeled_cuts || cuts.len() != s - 4 || components.len() != s - 3 {
            return Err(FigureError::Inconsistent(format!(
                "{} cuts / {} components for {s} figure vertices",
                cuts.len(),
                components.len()
            )));
        }
        Ok(CutDecomposition { cuts, components })
    }
}

fn orient3<T: Scalar>(a: &[T; 3], b: &[T; 3], c: &[T; 3], q: &[T; 3]) -> Sign {
    let rows = [b, c, q]
        .iter()
        .map(|p| (0..3).map(|i| p[i].clone() - a[i].clone()).collect())
        .collect();
    Sign::of(&linalg::determinant(rows))
}

fn orient2<T: Scalar>(a: &[T; 2], b: &[T; 2], q: &[T; 2]) -> Sign {
    let (ux, uy) = (b[0].clone() - a[0].clone(), b[1].clone() - a[1].clone());
    let (vx, vy) = (q[0].clone() - a[0].clone(), q[1].clone() - a[1].clone());
    Sign::of(&(ux * vy - uy * vx))
}

fn opposite(a: Sign, b: Sign) -> bool {
    !a.is_zero() && a == b.flip()
}

/// Inward functional at `x`: positive on every other vertex relative to `x`.
fn inward_sum<T: Scalar>(p: &Polytope<T>, ids: &[VertexId]) -> [T; 4] {
    let mut g: [T; 4] = std::array::from_fn(|_| T::zero());
    for f in p.facets_containing(ids) {
        for (gi, ni) in g.iter_mut().zip(f.outward_normal()) {
            *gi = gi.clone() - ni;
        }
    }
    g
}

/// A geometric realization of `P/x` in intrinsic 3-dimensional coordinates.
#[derive(Clone, Debug)]
pub struct FigureChart<T> {
    pub base: VertexId,
    pub points: BTreeMap<VertexId, [T; 3]>,
}

/// Slices the cone at `x` with the hyperplane `g · (q - x) = shift · min_z g · (z - x)`,
/// where `g` is the sum of inward facet normals at `x`. Every `shift` in
/// `(0, 1)` gives a section separating `x` from the other vertices.
pub fn figure_chart<T: Scalar>(
    p: &Polytope<T>,
    x: VertexId,
    shift: &T,
) -> Result<FigureChart<T>, FigureError> {
    if !shift.is_positive() || *shift >= T::one() {
        return Err(FigureError::BadShift);
    }
    let g = inward_sum(p, &[x]);
    let px = p.point(x);
    let heights: Vec<(VertexId, [T; 4], T)> = p
        .vertex_ids()
        .filter(|&v| v != x)
        .map(|v| {
            let d = p.point(v).sub(px);
            let h = linalg::dot(&g, &d);
            (v, d, h)
        })
        .collect();
    let lambda = heights
        .iter()
        .map(|(_, _, h)| h.clone())
        .min()
        .expect("at least four other vertices")
        * shift.clone();
    let drop = (0..4).find(|&k| !g[k].is_zero()).expect("inward sum is nonzero");
    let points = heights
        .into_iter()
        .map(|(v, d, h)| {
            let t = lambda.clone() / h;
            let full: Vec<T> = (0..4).filter(|&k| k != drop).map(|k| t.clone() * d[k].clone()).collect();
            (v, [full[0].clone(), full[1].clone(), full[2].clone()])
        })
        .collect();
    Ok(FigureChart { base: x, points })
}

impl<T: Scalar> FigureChart<T> {
    fn pt(&self, v: VertexId) -> &[T; 3] {
        &self.points[&v]
    }

    /// Does the plane through `a, b, c` strictly separate `d` and `e` in the chart?
    pub fn plane_separates(&self, [a, b, c]: [VertexId; 3], d: VertexId, e: VertexId) -> bool {
        let (a, b, c) = (self.pt(a), self.pt(b), self.pt(c));
        opposite(orient3(a, b, c, self.pt(d)), orient3(a, b, c, self.pt(e)))
    }
}

/// Compares planar separation of `y4, y5` by `⟨y1, y2, y3⟩` in the figure at
/// `x` with separation by `⟨x, y1, y2, y3⟩` in 4-space. `true` when they agree.
pub fn check_corr_21<T: Scalar>(p: &Polytope<T>, x: VertexId, ys: [VertexId; 5]) -> Result<bool, FigureError> {
    let chart = figure_chart(p, x, &T::from_ratio(1, 2))?;
    Ok(corr_21_in(p, &chart, ys))
}

pub fn corr_21_in<T: Scalar>(p: &Polytope<T>, chart: &FigureChart<T>, ys: [VertexId; 5]) -> bool {
    let [y1, y2, y3, y4, y5] = ys;
    let figure_side = chart.plane_separates([y1, y2, y3], y4, y5);
    let (a, b, c, d) = (p.point(chart.base), p.point(y1), p.point(y2), p.point(y3));
    let space_side = opposite(orient(a, b, c, d, p.point(y4)), orient(a, b, c, d, p.point(y5)));
    figure_side == space_side
}

/// The polygon `P/E` of a universal edge, as the cyclic order of the other
/// vertices. The order starts at the smallest id and proceeds toward its
/// smaller neighbour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPolygon {
    pub edge: Edge,
    pub cyclic_order: Vec<VertexId>,
}

impl QuotientPolygon {
    pub fn polygon_edges(&self) -> BTreeSet<Edge> {
        let n = self.cyclic_order.len();
        (0..n)
            .map(|i| edge(self.cyclic_order[i], self.cyclic_order[(i + 1) % n]))
            .collect()
    }

    /// The two polygon neighbours of `z`.
    pub fn neighbours(&self, z: VertexId) -> Option<(VertexId, VertexId)> {
        let n = self.cyclic_order.len();
        let i = self.cyclic_order.iter().position(|&v| v == z)?;
        Some((self.cyclic_order[(i + n - 1) % n], self.cyclic_order[(i + 1) % n]))
    }
}

#[derive(Clone, Debug)]
pub struct QuotientChart<T> {
    pub edge: Edge,
    pub points: BTreeMap<VertexId, [T; 2]>,
}

impl<T: Scalar> QuotientChart<T> {
    pub fn line_separates(&self, [a, b]: [VertexId; 2], c: VertexId, d: VertexId) -> bool {
        let (a, b) = (&self.points[&a], &self.points[&b]);
        opposite(orient2(a, b, &self.points[&c]), orient2(a, b, &self.points[&d]))
    }
}

fn is_universal<T: Scalar>(p: &Polytope<T>, [x, y]: Edge) -> bool {
    p.vertex_ids()
        .filter(|&z| z != x && z != y)
        .all(|z| p.is_face(&[x, y, z]))
}

/// Realizes `P/E` for `E = [x, y]`: each other vertex `z` maps to
/// `y + (z - y) / f(z - y)`, where `f` sums the inward normals of the facets
/// through `E`, and the result is projected along `x - y` to the plane.
pub fn quotient_chart<T: Scalar>(p: &Polytope<T>, e: Edge) -> Result<QuotientChart<T>, FigureError> {
    let [x, y] = e;
    if x == y || !p.is_face(&[x, y]) {
        return Err(FigureError::NotUniversalEdge(x, y));
    }
    let f = inward_sum(p, &[x, y]);
    let d = p.point(x).sub(p.point(y));
    let kernel = linalg::null_space(&[d.to_vec()], 4);
    let (a, b) = kernel
        .iter()
        .tuple_combinations()
        .find(|(a, b)| {
            let mut rows = vec![f.to_vec(), a.to_vec(), b.to_vec()];
            linalg::rref(&mut rows).len() == 3
        })
        .expect("the annihilator of x - y is 3-dimensional and contains f");
    let py = p.point(y);
    let points = p
        .vertex_ids()
        .filter(|&z| z != x && z != y)
        .map(|z| {
            let dz = p.point(z).sub(py);
            let t = T::one() / linalg::dot(&f, &dz);
            let w: Vec<T> = dz.iter().map(|c| c.clone() * t.clone()).collect();
            (z, [linalg::dot(a, &w), linalg::dot(b, &w)])
        })
        .collect();
    Ok(QuotientChart { edge: e, points })
}

/// Counter-clockwise order of points in convex position.
fn convex_cycle<T: Scalar>(points: &BTreeMap<VertexId, [T; 2]>) -> Vec<VertexId> {
    let n = T::from_int(points.len() as i64);
    let cx = points.values().fold(T::zero(), |s, p| s + p[0].clone()) / n.clone();
    let cy = points.values().fold(T::zero(), |s, p| s + p[1].clone()) / n;
    let rel: Vec<(VertexId, T, T)> = points
        .iter()
        .map(|(&v, p)| (v, p[0].clone() - cx.clone(), p[1].clone() - cy.clone()))
        .collect();
    let upper = |x: &T, y: &T| y.is_positive() || (y.is_zero() && x.is_positive());
    let mut order = rel.clone();
    order.sort_by(|(_, ax, ay), (_, bx, by)| {
        let (ha, hb) = (upper(ax, ay), upper(bx, by));
        if ha != hb {
            return hb.cmp(&ha);
        }
        let cross = ax.clone() * by.clone() - ay.clone() * bx.clone();
        T::zero().cmp(&cross)
    });
    order.into_iter().map(|(v, _, _)| v).collect()
}

fn canonical_cycle(mut cycle: Vec<VertexId>) -> Vec<VertexId> {
    let n = cycle.len();
    let start = (0..n).min_by_key(|&i| cycle[i]).expect("nonempty cycle");
    cycle.rotate_left(start);
    if n > 2 && cycle[n - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

/// Polygon edges of `P/E` read off the facets through `E`.
pub fn facet_polygon_edges<T: Scalar>(p: &Polytope<T>, [x, y]: Edge) -> BTreeSet<Edge> {
    p.facets_containing(&[x, y])
        .map(|f| {
            let rest: Vec<VertexId> = f.vertices.iter().copied().filter(|&v| v != x && v != y).collect();
            edge(rest[0], rest[1])
        })
        .collect()
}

pub fn quotient_polygon<T: Scalar>(p: &Polytope<T>, e: Edge) -> Result<QuotientPolygon, FigureError> {
    let e = edge(e[0], e[1]);
    if !is_universal(p, e) {
        return Err(FigureError::NotUniversalEdge(e[0], e[1]));
    }
    let chart = quotient_chart(p, e)?;
    let polygon = QuotientPolygon { edge: e, cyclic_order: canonical_cycle(convex_cycle(&chart.points)) };
    let expected = facet_polygon_edges(p, e);
    if polygon.polygon_edges() != expected {
        return Err(FigureError::Inconsistent(format!(
            "projected polygon of [{}, {}] does not match its facets",
            e[0], e[1]
        )));
    }
    Ok(polygon)
}

/// Compares separation of `z3, z4` by the line `⟨z1, z2⟩` in `P/E` with
/// separation by `⟨E, z1, z2⟩` in 4-space.
pub fn check_corr_22<T: Scalar>(p: &Polytope<T>, e: Edge, zs: [VertexId; 4]) -> Result<bool, FigureError> {
    let chart = quotient_chart(p, e)?;
    Ok(corr_22_in(p, &chart, zs))
}

pub fn corr_22_in<T: Scalar>(p: &Polytope<T>, chart: &QuotientChart<T>, zs: [VertexId; 4]) -> bool {
    let [z1, z2, z3, z4] = zs;
    let [x, y] = chart.edge;
    let quotient_side = chart.line_separates([z1, z2], z3, z4);
    let (a, b, c, d) = (p.point(x), p.point(y), p.point(z1), p.point(z2));
    let space_side = opposite(orient(a, b, c, d, p.point(z3)), orient(a, b, c, d, p.point(z4)));
    quotient_side == space_side
}

/// The section point of `y` in the figure at `x`, as a point of 4-space.
pub fn section_point<T: Scalar>(p: &Polytope<T>, x: VertexId, y: VertexId, level: &T) -> Point4<T> {
    let g = inward_sum(p, &[x]);
    let d = p.point(y).sub(p.point(x));
    let t = level.clone() / linalg::dot(&g, &d);
    p.point(x).lerp(p.point(y), &t)
}
