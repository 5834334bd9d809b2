//! Minimum-hyperplane separation of an interior point from the facets of a
//! polytope.
//!
//! A group of facets can share one strictly separating hyperplane iff `O`
//! lies outside the convex hull of their vertex union. Rather than querying
//! that oracle for every group, the solver enumerates the maximal vertex sets
//! whose hull avoids `O`: with `u_v = v - O` these are the sets
//! `{v : r · u_v > 0}` over the chambers of the central arrangement of the
//! hyperplanes `u_v^⊥`, and every chamber is reached from one of its extreme
//! rays. Each maximal set contributes the facets it contains as one candidate
//! group, and an exact set cover over those groups gives `s(O)`.

pub mod cover;
pub mod verify;

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact_geometry::{
    farkas_separator, hyperplane_through, in_convex_hull, linalg, strictly_separates, Hyperplane,
    Point4, Sign,
};
use crate::figures::{vertex_figure, FigureError};
use crate::polytope::{Facet, Polytope, PolytopeError, Triangle, VertexId};
use crate::scalar::Scalar;

use cover::{min_cover, CoverProof, Mask};

pub use verify::{verify_conjecture, SampleKind, SampleRecord, VerifyConfig, VerifyReport, BOUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("point is not interior to the polytope")]
    NotInterior,
    #[error("vertex {0} is not a vertex of the polytope")]
    NotApex(VertexId),
    #[error("array is not simply linked")]
    NotSimplyLinked,
    #[error("{0} items exceed the 128-bit mask capacity")]
    TooLarge(usize),
    #[error("facet {0:?} is not a facet of the polytope")]
    UnknownFacet(Facet),
    #[error("the polytope without vertex {0} is not neighbourly")]
    BaseNotNeighbourly(VertexId),
    #[error(transparent)]
    Figure(#[from] FigureError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug)]
pub struct SeparationInstance<'a, T> {
    pub polytope: &'a Polytope<T>,
    pub point: Point4<T>,
}

impl<'a, T: Scalar> SeparationInstance<'a, T> {
    pub fn new(polytope: &'a Polytope<T>, point: Point4<T>) -> Result<Self, SeparationError> {
        if !polytope.contains_interior(&point) {
            return Err(SeparationError::NotInterior);
        }
        if polytope.vertex_count() > 128 || polytope.facet_count() > 128 {
            return Err(SeparationError::TooLarge(
                polytope.vertex_count().max(polytope.facet_count()),
            ));
        }
        Ok(Self { polytope, point })
    }

    fn union_points(&self, facets: &[Facet]) -> Vec<Point4<T>> {
        let ids: BTreeSet<VertexId> = facets.iter().flatten().copied().collect();
        ids.into_iter().map(|v| self.polytope.point(v).clone()).collect()
    }
}

/// Whether one hyperplane strictly separates `O` from all the given facets.
pub fn coverable<T: Scalar>(inst: &SeparationInstance<'_, T>, facets: &[Facet]) -> bool {
    !in_convex_hull(&inst.point, &inst.union_points(facets))
}

/// Hyperplanes plus, for every covered facet, the index of one that strictly
/// separates it from `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCertificate<T> {
    pub hyperplanes: Vec<Hyperplane<T>>,
    pub assignment: BTreeMap<Facet, usize>,
}

impl<T: Scalar> SeparationCertificate<T> {
    pub fn size(&self) -> usize {
        self.hyperplanes.len()
    }

    /// Re-checks every assignment with [`strictly_separates`] and that exactly
    /// `family` is covered. Returns the first offending facet.
    pub fn validate(
        &self,
        p: &Polytope<T>,
        o: &Point4<T>,
        family: &BTreeSet<Facet>,
    ) -> Result<(), Facet> {
        if let Some(f) = family.symmetric_difference(&self.assignment.keys().copied().collect()).next() {
            return Err(*f);
        }
        for (f, &i) in &self.assignment {
            let ok = self
                .hyperplanes
                .get(i)
                .is_some_and(|h| strictly_separates(h, [o], p.points(f)));
            if !ok {
                return Err(*f);
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Serialize for SeparationCertificate<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            facet: &'a Facet,
            hyperplane: usize,
        }
        let entries: Vec<Entry<'_>> = self
            .assignment
            .iter()
            .map(|(facet, &hyperplane)| Entry { facet, hyperplane })
            .collect();
        let mut st = s.serialize_struct("SeparationCertificate", 2)?;
        st.serialize_field("hyperplanes", &self.hyperplanes)?;
        st.serialize_field("assignment", &entries)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct CoverReport<T: Scalar> {
    pub s_value: usize,
    pub certificate: SeparationCertificate<T>,
    pub optimality_proof: CoverProof,
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..128).filter(move |i| m >> i & 1 == 1)
}

/// A vertex set whose hull avoids `O`, with a functional `r` such that
/// `r · (v - O) > 0` for every member `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoidingSet<T> {
    pub mask: Mask,
    pub witness: [T; 4],
}

impl<T: Scalar> AvoidingSet<T> {
    /// A hyperplane strictly between `O` and every member.
    pub fn hyperplane(&self, inst: &SeparationInstance<'_, T>) -> Hyperplane<T> {
        let at_o = linalg::dot(&self.witness, inst.point.coords());
        let gap = bits(self.mask)
            .map(|i| linalg::dot(&self.witness, inst.polytope.vertices()[i].coords()) - at_o.clone())
            .min()
            .expect("avoiding sets are nonempty");
        Hyperplane::new(self.witness.clone(), at_o + gap / T::from_int(2)).expect("witness is nonzero")
    }
}

/// `v - O` rescaled to a primitive integer vector; positive rescaling keeps
/// every sign the enumeration looks at.
fn directions<T: Scalar>(inst: &SeparationInstance<'_, T>) -> Vec<[T; 4]> {
    inst.polytope
        .vertices()
        .iter()
        .map(|v| {
            let mut d = v.sub(&inst.point);
            T::make_primitive(&mut d);
            d
        })
        .collect()
}

/// The vector orthogonal to `a`, `b`, `c` given by cofactor expansion, made
/// primitive with its first nonzero entry positive; `None` when they are
/// dependent.
fn cross<I: Clone + Integer + Signed>(a: &[I; 4], b: &[I; 4], c: &[I; 4]) -> Option<[I; 4]> {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        let m = |r: &[I; 4], k: usize| r[cols[k]].clone();
        m(a, 0) * (m(b, 1) * m(c, 2) - m(b, 2) * m(c, 1))
            - m(a, 1) * (m(b, 0) * m(c, 2) - m(b, 2) * m(c, 0))
            + m(a, 2) * (m(b, 0) * m(c, 1) - m(b, 1) * m(c, 0))
    };
    let r = [minor(0), -minor(1), minor(2), -minor(3)];
    let g = r.iter().fold(I::zero(), |g, x| g.gcd(x));
    let lead = r.iter().find(|x| !x.is_zero())?;
    let g = if lead.is_negative() { -g } else { g };
    Some(r.map(|x| x / g.clone()))
}

fn idot<I: Clone + Integer>(a: &[I; 4], b: &[I; 4]) -> I {
    a.iter().zip(b).fold(I::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Maximal vertex sets whose convex hull does not contain `O`, with witness
/// functionals. Every vertex set with that property lies inside one of them.
pub fn maximal_avoiding_sets<T: Scalar>(inst: &SeparationInstance<'_, T>) -> Vec<AvoidingSet<T>> {
    let u = directions(inst);
    let ui: Vec<[T::Int; 4]> = u.iter().map(|d| d.clone().map(|x| x.to_parts().0)).collect();

    let mut rays = BTreeSet::new();
    for (a, b, c) in (0..u.len()).tuple_combinations() {
        if let Some(r) = cross(&ui[a], &ui[b], &ui[c]) {
            rays.insert(r);
        }
    }

    // Candidate mask -> (signed ray, vertices pushed off its hyperplane, tilt).
    let mut found: BTreeMap<Mask, ([T; 4], Mask, Option<[T; 4]>)> = BTreeMap::new();
    for ray in &rays {
        let dots: Vec<T::Int> = ui.iter().map(|d| idot(ray, d)).collect();
        for flip in [false, true] {
            let mut pos: Mask = 0;
            let mut zero = Vec::new();
            for (i, d) in dots.iter().enumerate() {
                if d.is_zero() {
                    zero.push(i);
                } else if d.is_positive() != flip {
                    pos |= 1 << i;
                }
            }
            let r0: [T; 4] = ray.clone().map(|x| T::from_integer(if flip { -x } else { x }));
            if zero.len() == 3 {
                let t = zero.iter().fold(0, |m, &i| m | 1 << i);
                found.entry(pos | t).or_insert((r0, t, None));
            } else {
                for (t, delta) in degenerate_tilts(inst, &zero) {
                    found.entry(pos | t).or_insert((r0.clone(), t, Some(delta)));
                }
            }
        }
    }
    let masks: Vec<Mask> = found.keys().copied().collect();
    found
        .into_iter()
        .filter(|(s, _)| !masks.iter().any(|&t| t != *s && s & t == *s))
        .map(|(mask, (r0, t, delta))| {
            let delta = delta.unwrap_or_else(|| {
                // Three independent directions: delta · u_z = 1 on them, delta · r0 = 0.
                let mut rows: Vec<Vec<T>> = bits(t).map(|i| u[i].to_vec()).collect();
                rows.push(r0.to_vec());
                let x = linalg::solve(&rows, &[T::one(), T::one(), T::one(), T::zero()])
                    .expect("rows are independent");
                [x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()]
            });
            AvoidingSet { mask, witness: tilted(&u, &r0, &delta, mask & !t) }
        })
        .collect()
}

/// `r0 + t·delta` with `t` small enough that every member of `pos` stays on
/// the positive side.
fn tilted<T: Scalar>(u: &[[T; 4]], r0: &[T; 4], delta: &[T; 4], pos: Mask) -> [T; 4] {
    let two = T::from_int(2);
    let mut t = T::one();
    for i in bits(pos) {
        let d = linalg::dot(delta, &u[i]);
        if d.is_negative() {
            let limit = linalg::dot(r0, &u[i]) / (-d * two.clone());
            if limit < t {
                t = limit;
            }
        }
    }
    let mut w: [T; 4] = std::array::from_fn(|k| r0[k].clone() + t.clone() * delta[k].clone());
    T::make_primitive(&mut w);
    w
}

/// For a ray whose hyperplane holds four or more vertices: the maximal
/// subsets a small tilt pushes to the positive side, each with a tilt
/// direction positive on it. By Gordan's theorem a subset qualifies iff `O`
/// is not in its hull.
fn degenerate_tilts<T: Scalar>(inst: &SeparationInstance<'_, T>, zero: &[usize]) -> Vec<(Mask, [T; 4])> {
    let mut out: Vec<(Mask, [T; 4])> = Vec::new();
    for size in (1..=zero.len()).rev() {
        for sub in zero.iter().copied().combinations(size) {
            let m: Mask = sub.iter().fold(0, |m, &i| m | 1 << i);
            if out.iter().any(|(o, _)| o & m == m) {
                continue;
            }
            let pts: Vec<Point4<T>> = sub.iter().map(|&i| inst.polytope.vertices()[i].clone()).collect();
            if let Ok(h) = farkas_separator(&inst.point, &pts) {
                let mut delta = h.normal().clone();
                if h.side_of(&inst.point) == Sign::Positive {
                    delta = delta.map(|x| -x);
                }
                out.push((m, delta));
            }
        }
    }
    out
}

/// Candidate facet groups over `family`: for each maximal avoiding vertex
/// set, the family members it contains.
fn candidate_groups<T: Scalar>(
    sets: &[AvoidingSet<T>],
    family: &[Facet],
) -> (Vec<Mask>, Vec<usize>) {
    let mut groups: Vec<(Mask, usize)> = sets
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let g = family
                .iter()
                .enumerate()
                .filter(|(_, f)| f.iter().all(|v| s.mask >> v.index() & 1 == 1))
                .fold(0, |m, (i, _)| m | 1 << i);
            (g, k)
        })
        .filter(|&(g, _)| g != 0)
        .collect();
    groups.sort_unstable();
    groups.dedup_by_key(|(g, _)| *g);
    groups.into_iter().unzip()
}

fn solve_family<T: Scalar>(
    inst: &SeparationInstance<'_, T>,
    family: &[Facet],
) -> Result<CoverReport<T>, SeparationError> {
    if family.len() > 128 {
        return Err(SeparationError::TooLarge(family.len()));
    }
    if let Some(f) = family.iter().find(|f| inst.polytope.facet_record(f).is_none()) {
        return Err(SeparationError::UnknownFacet(*f));
    }
    if family.is_empty() {
        return Ok(CoverReport {
            s_value: 0,
            certificate: SeparationCertificate { hyperplanes: vec![], assignment: BTreeMap::new() },
            optimality_proof: CoverProof::default(),
        });
    }
    let sets = maximal_avoiding_sets(inst);
    let (groups, source) = candidate_groups(&sets, family);
    let universe: Mask = if family.len() == 128 { Mask::MAX } else { (1 << family.len()) - 1 };
    let cover = min_cover(&groups, universe)
        .ok_or_else(|| SeparationError::Inconsistent("a facet is in no avoiding set".into()))?;

    let mut hyperplanes = Vec::new();
    let mut assignment = BTreeMap::new();
    for &g in &cover.chosen {
        for i in bits(groups[g]) {
            assignment.entry(family[i]).or_insert(hyperplanes.len());
        }
        hyperplanes.push(sets[source[g]].hyperplane(inst));
    }
    let certificate = SeparationCertificate { hyperplanes, assignment };
    let family_set: BTreeSet<Facet> = family.iter().copied().collect();
    certificate
        .validate(inst.polytope, &inst.point, &family_set)
        .map_err(|f| SeparationError::Inconsistent(format!("certificate fails at {f:?}")))?;
    Ok(CoverReport { s_value: certificate.size(), certificate, optimality_proof: cover.proof })
}

/// `s(O)`: the least number of hyperplanes such that every facet is strictly
/// separated from `O` by one of them, with a validated certificate.
pub fn min_separation<T: Scalar>(inst: &SeparationInstance<'_, T>) -> CoverReport<T> {
    let family: Vec<Facet> = inst.polytope.facets().collect();
    solve_family(inst, &family).expect("instance checks guarantee a cover")
}

/// The same minimum restricted to a subfamily of facets.
pub fn restricted_min_separation<T: Scalar>(
    inst: &SeparationInstance<'_, T>,
    family: &[Facet],
) -> Result<CoverReport<T>, SeparationError> {
    let family: Vec<Facet> = family.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    solve_family(inst, &family)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaBCase {
    /// The ray from the apex through `O` meets the interior of this
    /// component of the vertex figure.
    Interior { component: Facet },
    /// It meets this cut; `o_interior_to_base` records whether `O` is an
    /// interior point of the polytope without the apex.
    Cut { cut: Triangle, o_interior_to_base: bool },
}

#[derive(Clone, Debug)]
pub struct LemmaBCertificate<T> {
    pub case: LemmaBCase,
    pub certificate: SeparationCertificate<T>,
}

/// Hyperplanes separating `O` from every facet through the apex `w`, built
/// from the component of the vertex figure hit by the ray from `w` through
/// `O`: the four hyperplanes spanned by `w` and a 3-subset of the component,
/// or per side of a cut either one hyperplane or an exact restricted cover.
pub fn lemma_b_certificate<T: Scalar>(
    p: &Polytope<T>,
    w: VertexId,
    o: &Point4<T>,
) -> Result<LemmaBCertificate<T>, SeparationError> {
    if w.index() >= p.vertex_count() {
        return Err(SeparationError::NotApex(w));
    }
    let inst = SeparationInstance::new(p, o.clone())?;
    let rest: Vec<VertexId> = p.vertex_ids().filter(|&v| v != w).collect();
    let base = p.subpolytope(&rest)?;
    if base.vertex_count() != rest.len() || !base.is_neighbourly() {
        return Err(SeparationError::BaseNotNeighbourly(w));
    }
    let cd = vertex_figure(p, w).cut_decomposition()?;
    let apex = p.point(w);
    let d = o.sub(apex);

    let mut hit = None;
    for comp in &cd.components {
        let cols: Vec<[T; 4]> = comp.iter().map(|&v| p.point(v).sub(apex)).collect();
        let a: Vec<Vec<T>> = (0..4).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        if let Some(lambda) = linalg::solve(&a, &d) {
            if lambda.iter().all(|l| !l.is_negative()) {
                hit = Some((*comp, lambda));
                break;
            }
        }
    }
    let (comp, lambda) =
        hit.ok_or_else(|| SeparationError::Inconsistent("ray misses every component".into()))?;
    let zeros: Vec<usize> = (0..4).filter(|&i| lambda[i].is_zero()).collect();
    let family: BTreeSet<Facet> = p.facets_containing(&[w]).map(|f| f.vertices).collect();

    match zeros.as_slice() {
        [] => {
            let mut hyperplanes = Vec::new();
            for tri in comp.iter().copied().combinations(3) {
                let h = hyperplane_through(apex, p.point(tri[0]), p.point(tri[1]), p.point(tri[2]))
                    .map_err(|e| SeparationError::Inconsistent(e.to_string()))?;
                // Move halfway toward O so vertices on the plane fall strictly
                // on the far side while O keeps its side.
                let half = h.eval(o) / T::from_int(2);
                hyperplanes.push(h.shifted(half));
            }
            let mut assignment = BTreeMap::new();
            for f in &family {
                let i = hyperplanes
                    .iter()
                    .position(|h| strictly_separates(h, [o], p.points(f)))
                    .ok_or_else(|| SeparationError::Inconsistent(format!("facet {f:?} uncovered")))?;
                assignment.insert(*f, i);
            }
            let case = LemmaBCase::Interior { component: comp };
            finish(p, o, &family, case, SeparationCertificate { hyperplanes, assignment })
        }
        [z] => {
            let cut: Triangle = {
                let t: Vec<VertexId> = (0..4).filter(|i| i != z).map(|i| comp[i]).collect();
                [t[0], t[1], t[2]]
            };
            let plane = hyperplane_through(apex, p.point(cut[0]), p.point(cut[1]), p.point(cut[2]))
                .map_err(|e| SeparationError::Inconsistent(e.to_string()))?;
            let mut sides: [Vec<Facet>; 2] = [Vec::new(), Vec::new()];
            for f in &family {
                let signs: BTreeSet<Sign> =
                    p.points(f).map(|q| plane.side_of(q)).filter(|s| !s.is_zero()).collect();
                match signs.iter().collect::<Vec<_>>().as_slice() {
                    [Sign::Positive] => sides[0].push(*f),
                    [Sign::Negative] => sides[1].push(*f),
                    _ => {
                        return Err(SeparationError::Inconsistent(format!(
                            "facet {f:?} straddles the cut"
                        )))
                    }
                }
            }
            let mut hyperplanes = Vec::new();
            let mut assignment = BTreeMap::new();
            for side in sides.iter().filter(|s| !s.is_empty()) {
                let part = if coverable(&inst, side) {
                    let h = farkas_separator(o, &inst.union_points(side))
                        .map_err(|e| SeparationError::Inconsistent(e.to_string()))?;
                    SeparationCertificate {
                        hyperplanes: vec![h],
                        assignment: side.iter().map(|f| (*f, 0)).collect(),
                    }
                } else {
                    restricted_min_separation(&inst, side)?.certificate
                };
                let offset = hyperplanes.len();
                hyperplanes.extend(part.hyperplanes);
                assignment.extend(part.assignment.into_iter().map(|(f, i)| (f, i + offset)));
            }
            let case = LemmaBCase::Cut { cut, o_interior_to_base: base.contains_interior(o) };
            finish(p, o, &family, case, SeparationCertificate { hyperplanes, assignment })
        }
        _ => Err(SeparationError::Inconsistent("ray meets the figure in an edge".into())),
    }
}

fn finish<T: Scalar>(
    p: &Polytope<T>,
    o: &Point4<T>,
    family: &BTreeSet<Facet>,
    case: LemmaBCase,
    certificate: SeparationCertificate<T>,
) -> Result<LemmaBCertificate<T>, SeparationError> {
    certificate
        .validate(p, o, family)
        .map_err(|f| SeparationError::Inconsistent(format!("certificate fails at {f:?}")))?;
    Ok(LemmaBCertificate { case, certificate })
}
