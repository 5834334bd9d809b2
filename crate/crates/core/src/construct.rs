//! Extending a neighbourly polytope by a vertex placed beyond the facets
//! around a universal edge.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::exact_geometry::lp::{LinearProgram, LpOutcome, Relation};
use crate::exact_geometry::{hyperplane_through, linalg, Hyperplane, Point4, Sign};
use crate::figures::{quotient_polygon, vertex_figure, FigureError};
use crate::linkage::{universal_edges_def, ScanReport};
use crate::polytope::{edge, sorted, Edge, Facet, Polytope, PolytopeError, Triangle, VertexId};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("[{0}, {1}] is not a universal edge")]
    NotUniversalEdge(VertexId, VertexId),
    #[error("[{0}, {1}] is not an edge of the quotient polygon")]
    NotPolygonEdge(VertexId, VertexId),
    #[error("base polytope is not neighbourly")]
    NotNeighbourly,
    #[error("no point is beyond exactly the requested facets")]
    Infeasible,
    #[error("extension failed its postcondition: {0}")]
    PostconditionFailed(String),
    #[error("a vertex maps to the origin of the quotient by the plane")]
    DegenerateQuotient,
    #[error("{0}")]
    Inconsistent(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Figure(FigureError),
}

impl From<FigureError> for ConstructError {
    fn from(e: FigureError) -> Self {
        match e {
            FigureError::NotUniversalEdge(a, b) => ConstructError::NotUniversalEdge(a, b),
            other => ConstructError::Figure(other),
        }
    }
}

/// The facets `[y1, y2, y_t, y_{t+1}]`, `t = 3..a-1`, around a universal edge
/// `[y1, y2]`, where `y_3, ..., y_a` walks the quotient polygon from one end
/// of the omitted polygon edge `[y_a, y_3]` to the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SewingFrame {
    pub edge: Edge,
    pub fan: Vec<VertexId>,
    pub omitted: Edge,
    pub target_facets: Vec<Facet>,
}

/// Builds the frame for `e`. By default the omitted polygon edge joins the
/// smallest polygon vertex to its larger neighbour.
pub fn frame_for_edge<T: Scalar>(
    q: &Polytope<T>,
    e: Edge,
    omit: Option<Edge>,
) -> Result<SewingFrame, ConstructError> {
    let polygon = quotient_polygon(q, e)?;
    let cycle = &polygon.cyclic_order;
    let n = cycle.len();
    let omit = match omit {
        Some([a, b]) => edge(a, b),
        None => edge(cycle[0], cycle[n - 1]),
    };
    let i = (0..n)
        .find(|&i| edge(cycle[i], cycle[(i + 1) % n]) == omit)
        .ok_or(ConstructError::NotPolygonEdge(omit[0], omit[1]))?;
    let fan: Vec<VertexId> = (1..=n).map(|k| cycle[(i + k) % n]).collect();
    let [y1, y2] = polygon.edge;
    let target_facets = fan.windows(2).map(|w| sorted([y1, y2, w[0], w[1]])).collect();
    Ok(SewingFrame { edge: polygon.edge, fan, omitted: omit, target_facets })
}

fn in_general_position_with<T: Scalar>(planes: &[Hyperplane<T>], x: &Point4<T>) -> bool {
    planes.iter().all(|h| !h.side_of(x).is_zero())
}

fn spanned_planes<T: Scalar>(q: &Polytope<T>) -> Vec<Hyperplane<T>> {
    q.vertex_ids()
        .combinations(4)
        .map(|w| {
            hyperplane_through(q.point(w[0]), q.point(w[1]), q.point(w[2]), q.point(w[3]))
                .expect("vertices are in general position")
        })
        .collect()
}

fn realizes<T: Scalar>(q: &Polytope<T>, targets: &BTreeSet<Facet>, x: &Point4<T>) -> bool {
    q.facet_records().iter().all(|f| {
        let s = Sign::of(&f.outward_eval(x));
        if targets.contains(&f.vertices) {
            s == Sign::Positive
        } else {
            s == Sign::Negative
        }
    })
}

/// A point beyond exactly `targets` and in general position with the
/// vertices of `q`.
///
/// Maximizes the least slack `t` of the strict system (target facets
/// violated by `t`, the rest satisfied by `t`) with exact LP, then prefers the
/// coarsest dyadic rounding of the optimum that still realizes the pattern.
pub fn point_beyond<T: Scalar>(q: &Polytope<T>, targets: &BTreeSet<Facet>) -> Result<Point4<T>, ConstructError> {
    if targets.is_empty() || targets.len() >= q.facet_count() {
        return Err(ConstructError::Infeasible);
    }
    // variables: x+ (4), x- (4), t
    let mut objective = vec![T::zero(); 9];
    objective[8] = T::one();
    let mut lp = LinearProgram::new(9).maximize(objective);
    for f in q.facet_records() {
        let n = f.outward_normal();
        let c = linalg::dot(&n, q.point(f.vertices[0]).coords());
        let sign = if targets.contains(&f.vertices) { T::one() } else { -T::one() };
        let mut row: Vec<T> = n.iter().map(|a| sign.clone() * a.clone()).collect();
        row.extend(n.iter().map(|a| -(sign.clone() * a.clone())));
        row.push(-T::one());
        lp.constrain(row, Relation::Ge, sign * c);
    }
    let mut cap = vec![T::zero(); 9];
    cap[8] = T::one();
    lp.constrain(cap, Relation::Le, T::one());
    let LpOutcome::Optimal { x, value } = lp.solve() else {
        return Err(ConstructError::Infeasible);
    };
    if !value.is_positive() {
        return Err(ConstructError::Infeasible);
    }
    let exact = Point4::new(std::array::from_fn(|i| x[i].clone() - x[i + 4].clone()));

    let planes = spanned_planes(q);
    let accept = |p: &Point4<T>| realizes(q, targets, p) && in_general_position_with(&planes, p);
    let offsets = [[0, 0, 0, 0], [1, 2, 3, 5], [-3, 1, -2, 1], [2, -1, 1, -3]];
    let mut scale = T::one();
    for _ in 0..=64 {
        let rounded = Point4::new(std::array::from_fn(|i| {
            (exact.coords()[i].clone() * scale.clone()).floor() / scale.clone()
        }));
        for off in offsets {
            let delta = Point4::from_ints(off).scale(&(T::one() / (scale.clone() * T::from_int(8))));
            let cand = rounded.add(&delta);
            if accept(&cand) {
                return Ok(cand);
            }
        }
        scale = scale * T::from_int(2);
    }
    if accept(&exact) {
        return Ok(exact);
    }
    Err(ConstructError::PostconditionFailed(
        "no general-position point found near the optimum".into(),
    ))
}

#[derive(Clone, Debug)]
pub struct ExtensionResult<T> {
    pub new_vertex: Point4<T>,
    /// `[Q, v]`; `v` is its last vertex.
    pub result: Polytope<T>,
    pub frame: SewingFrame,
    pub gained_universal: BTreeSet<Edge>,
}

impl<T: Scalar> ExtensionResult<T> {
    pub fn new_id(&self) -> VertexId {
        VertexId(self.result.vertex_count() - 1)
    }
}

/// Sews a new vertex onto the universal edge `e` of `q`.
pub fn sew<T: Scalar>(q: &Polytope<T>, e: Edge, omit: Option<Edge>) -> Result<ExtensionResult<T>, ConstructError> {
    if !q.is_neighbourly() {
        return Err(ConstructError::NotNeighbourly);
    }
    let frame = frame_for_edge(q, e, omit)?;
    let targets: BTreeSet<Facet> = frame.target_facets.iter().copied().collect();
    let v = point_beyond(q, &targets)?;
    let r = q.with_vertex(v.clone())?;
    if !r.is_neighbourly() {
        return Err(ConstructError::PostconditionFailed("result is not neighbourly".into()));
    }
    let lost = lost_facets(q, &r);
    if lost != targets {
        return Err(ConstructError::PostconditionFailed("lost facets differ from the targets".into()));
    }
    let vid = VertexId(q.vertex_count());
    let uq = universal_edges_def(q);
    let ur = universal_edges_def(&r);
    let [y1, y2] = frame.edge;
    for y in [y1, y2] {
        if !ur.contains(&edge(y, vid)) {
            return Err(ConstructError::PostconditionFailed(format!("[{vid}, {y}] is not universal")));
        }
    }
    let gained = ur.difference(&uq).copied().collect();
    Ok(ExtensionResult { new_vertex: v, result: r, frame, gained_universal: gained })
}

/// `F(Q) \ F(R)` for `R` whose first vertices are those of `Q`.
pub fn lost_facets<T: Scalar>(q: &Polytope<T>, r: &Polytope<T>) -> BTreeSet<Facet> {
    let kept = r.facet_set();
    q.facets().filter(|f| !kept.contains(f)).collect()
}

/// Components of `R/v` for the new vertex, which must equal the lost facets.
pub fn new_vertex_components<T: Scalar>(ext: &ExtensionResult<T>) -> Result<BTreeSet<Facet>, ConstructError> {
    Ok(vertex_figure(&ext.result, ext.new_id()).cut_decomposition()?.components)
}

/// Whether every hyperplane through `⟨a, b, c⟩` strictly separates two of
/// `e, f, g`: in the plane quotient by `⟨a, b, c⟩` the origin lies strictly
/// inside the triangle of their images.
pub fn linking_triangles<T: Scalar>(p: &Polytope<T>, abc: Triangle, efg: Triangle) -> Result<bool, ConstructError> {
    let [a, b, c] = abc.map(|v| p.point(v));
    let dirs = vec![b.sub(a).to_vec(), c.sub(a).to_vec()];
    let phi = linalg::null_space(&dirs, 4);
    if phi.len() != 2 {
        return Err(ConstructError::DegenerateQuotient);
    }
    let images: Vec<[T; 2]> = efg
        .iter()
        .map(|&v| {
            let d = p.point(v).sub(a);
            [linalg::dot(&phi[0], &d), linalg::dot(&phi[1], &d)]
        })
        .collect();
    if images.iter().any(|[x, y]| x.is_zero() && y.is_zero()) {
        return Err(ConstructError::DegenerateQuotient);
    }
    let cross = |u: &[T; 2], w: &[T; 2]| Sign::of(&(u[0].clone() * w[1].clone() - u[1].clone() * w[0].clone()));
    let s = [cross(&images[0], &images[1]), cross(&images[1], &images[2]), cross(&images[2], &images[0])];
    let inside = !s[0].is_zero() && s.iter().all(|&x| x == s[0]);
    if inside && (p.is_face(&abc) || p.is_face(&efg)) {
        return Err(ConstructError::Inconsistent(format!(
            "linked triangles {abc:?} and {efg:?} include a 2-face"
        )));
    }
    Ok(inside)
}

/// For `3 < t < a`: if `⟨v, y1, y2, y_t⟩` strictly separates vertices `p, s`
/// of `Q`, then `[p, s]` is not an edge of `R/v` and `[v, p, s]` not a 2-face.
pub fn scan_sewing_nonfaces<T: Scalar>(ext: &ExtensionResult<T>) -> ScanReport {
    let r = &ext.result;
    let v = ext.new_id();
    let [y1, y2] = ext.frame.edge;
    let figure_edges = vertex_figure(r, v).edges();
    let others: Vec<VertexId> = r.vertex_ids().filter(|&u| u != v).collect();
    let mut report = ScanReport::default();
    let fan = &ext.frame.fan;
    for &yt in fan.iter().take(fan.len().saturating_sub(1)).skip(1) {
        let h = hyperplane_through(r.point(v), r.point(y1), r.point(y2), r.point(yt))
            .expect("vertices are in general position");
        for (&p, &s) in others.iter().tuple_combinations() {
            let (sp, ss) = (h.side_of(r.point(p)), h.side_of(r.point(s)));
            if sp.is_zero() || sp != ss.flip() {
                continue;
            }
            report.probes += 1;
            if figure_edges.contains(&edge(p, s)) || r.is_face(&[v, p, s]) {
                report.counterexamples.push(format!("y_t={yt}: [{p}, {s}] survives"));
            }
        }
    }
    report
}
