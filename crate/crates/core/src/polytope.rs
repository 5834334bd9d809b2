//! Simplicial 4-polytopes in general position.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact_geometry::{hyperplane_through, orient, GeometryError, Hyperplane, Point4, Sign};
use crate::scalar::Scalar;

/// Index of a vertex in a polytope's vertex list. Displayed 1-based, which is
/// also the label used by the text format and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }

    pub fn from_label(label: usize) -> Option<Self> {
        label.checked_sub(1).map(VertexId)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.label() as u64)
    }
}

/// A facet, as its four vertex ids in increasing order.
pub type Facet = [VertexId; 4];
pub type Edge = [VertexId; 2];
pub type Triangle = [VertexId; 3];

pub fn edge(a: VertexId, b: VertexId) -> Edge {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub fn sorted<const N: usize>(mut ids: [VertexId; N]) -> [VertexId; N] {
    ids.sort();
    ids
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("need at least 5 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertices {0:?} are affinely dependent")]
    DegeneratePosition(Vec<usize>),
    #[error("point {0} lies inside the hull of the others")]
    NotAllVertices(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Debug)]
pub struct FacetRecord<T> {
    pub vertices: Facet,
    pub plane: Hyperplane<T>,
    /// Side of the plane holding the remaining vertices.
    pub inner: Sign,
}

impl<T: Scalar> FacetRecord<T> {
    /// `> 0` strictly outside the facet's halfspace, `0` on it, `< 0` inside.
    pub fn outward_eval(&self, q: &Point4<T>) -> T {
        let v = self.plane.eval(q);
        if self.inner == Sign::Positive {
            -v
        } else {
            v
        }
    }

    /// Outward linear functional `n` with `n · (q - p) = outward_eval(q)` for
    /// any `p` on the facet.
    pub fn outward_normal(&self) -> [T; 4] {
        let n = self.plane.normal().clone();
        if self.inner == Sign::Positive {
            n.map(|x| -x)
        } else {
            n
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaceSet {
    pub edges: BTreeSet<Edge>,
    pub two_faces: BTreeSet<Triangle>,
}

/// A simplicial 4-polytope whose vertices are in general position.
#[derive(Clone, Debug)]
pub struct Polytope<T> {
    vertices: Vec<Point4<T>>,
    facets: Vec<FacetRecord<T>>,
}

impl<T: Scalar> Polytope<T> {
    /// Validates general position and enumerates facets: a 4-subset is a
    /// facet iff every other vertex lies strictly on the same side of it.
    pub fn from_vertices(pts: Vec<Point4<T>>) -> Result<Self, PolytopeError> {
        let n = pts.len();
        if n < 5 {
            return Err(PolytopeError::TooFewVertices(n));
        }
        for s in (0..n).combinations(5) {
            if orient(&pts[s[0]], &pts[s[1]], &pts[s[2]], &pts[s[3]], &pts[s[4]]).is_zero() {
                return Err(PolytopeError::DegeneratePosition(s));
            }
        }
        let mut facets = Vec::new();
        for s in (0..n).combinations(4) {
            let plane = hyperplane_through(&pts[s[0]], &pts[s[1]], &pts[s[2]], &pts[s[3]])?;
            let mut others = (0..n).filter(|i| !s.contains(i)).map(|i| plane.side_of(&pts[i]));
            let first = others.next().expect("at least one other vertex");
            if others.all(|x| x == first) {
                facets.push(FacetRecord {
                    vertices: [s[0], s[1], s[2], s[3]].map(VertexId),
                    plane,
                    inner: first,
                });
            }
        }
        if let Some(lost) =
            (0..n).find(|&i| !facets.iter().any(|f| f.contains(VertexId(i))))
        {
            return Err(PolytopeError::NotAllVertices(lost));
        }
        Ok(Self { vertices: pts, facets })
    }

    /// The cyclic polytope on the moment-curve points `(t, t², t³, t⁴)`,
    /// `t = 1..=m`; vertex `t` has label `t`.
    pub fn cyclic(m: usize) -> Result<Self, PolytopeError> {
        if m < 5 {
            return Err(PolytopeError::TooFewVertices(m));
        }
        let pts = (1..=m as i64)
            .map(|t| Point4::from_ints([t, t * t, t * t * t, t * t * t * t]))
            .collect();
        Self::from_vertices(pts)
    }

    pub fn simplex() -> Self {
        let mut pts = vec![Point4::origin()];
        pts.extend((0..4).map(Point4::unit));
        Self::from_vertices(pts).expect("standard simplex is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + Clone {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn vertices(&self) -> &[Point4<T>] {
        &self.vertices
    }

    pub fn point(&self, v: VertexId) -> &Point4<T> {
        &self.vertices[v.0]
    }

    pub fn points<'a>(&'a self, ids: &'a [VertexId]) -> impl Iterator<Item = &'a Point4<T>> + 'a {
        ids.iter().map(|&v| self.point(v))
    }

    /// Facet records, lexicographically ordered by vertex ids.
    pub fn facet_records(&self) -> &[FacetRecord<T>] {
        &self.facets
    }

    pub fn facets(&self) -> impl Iterator<Item = Facet> + '_ {
        self.facets.iter().map(|f| f.vertices)
    }

    pub fn facet_set(&self) -> BTreeSet<Facet> {
        self.facets().collect()
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn facet_record(&self, f: &Facet) -> Option<&FacetRecord<T>> {
        self.facets
            .binary_search_by(|r| r.vertices.cmp(f))
            .ok()
            .map(|i| &self.facets[i])
    }

    pub fn facets_containing(&self, ids: &[VertexId]) -> impl Iterator<Item = &FacetRecord<T>> + '_ {
        let ids = ids.to_vec();
        self.facets
            .iter()
            .filter(move |f| ids.iter().all(|v| f.contains(*v)))
    }

    pub fn centroid(&self) -> Point4<T> {
        Point4::centroid(&self.vertices)
    }

    /// For a simplicial polytope, a vertex set is a face iff it lies in some facet.
    pub fn is_face(&self, s: &[VertexId]) -> bool {
        debug_assert!(s.len() <= 4);
        self.facets
            .iter()
            .any(|f| s.iter().all(|v| f.contains(*v)))
    }

    pub fn face_set(&self) -> FaceSet {
        let mut fs = FaceSet::default();
        for f in self.facets() {
            for e in f.iter().copied().combinations(2) {
                fs.edges.insert([e[0], e[1]]);
            }
            for t in f.iter().copied().combinations(3) {
                fs.two_faces.insert([t[0], t[1], t[2]]);
            }
        }
        fs
    }

    pub fn is_neighbourly(&self) -> bool {
        self.vertex_ids()
            .tuple_combinations()
            .all(|(a, b)| self.is_face(&[a, b]))
    }

    /// Facets of `self` whose hyperplanes strictly separate `x` from the rest
    /// of the polytope.
    pub fn beyond_set(&self, x: &Point4<T>) -> Result<Vec<Facet>, PolytopeError> {
        let mut out = Vec::new();
        for f in &self.facets {
            match f.plane.side_of(x) {
                Sign::Zero => {
                    return Err(PolytopeError::DegeneratePosition(
                        f.vertices.iter().map(|v| v.index()).collect(),
                    ));
                }
                s if s != f.inner => out.push(f.vertices),
                _ => {}
            }
        }
        Ok(out)
    }

    /// Strictly beneath every facet hyperplane.
    pub fn contains_interior(&self, o: &Point4<T>) -> bool {
        self.facets.iter().all(|f| f.plane.side_of(o) == f.inner)
    }

    /// The polytope spanned by `ids`; its vertex `i` is `ids[i]` of `self`.
    pub fn subpolytope(&self, ids: &[VertexId]) -> Result<Self, PolytopeError> {
        Self::from_vertices(ids.iter().map(|&v| self.point(v).clone()).collect())
    }

    /// Facets of the polytope spanned by all vertices but `x`, in `self`'s ids.
    pub fn facets_without(&self, x: VertexId) -> Result<BTreeSet<Facet>, PolytopeError> {
        let ids: Vec<VertexId> = self.vertex_ids().filter(|&v| v != x).collect();
        let sub = self.subpolytope(&ids)?;
        Ok(sub.facets().map(|f| sorted(f.map(|v| ids[v.0]))).collect())
    }

    /// Appends a vertex and rebuilds.
    pub fn with_vertex(&self, p: Point4<T>) -> Result<Self, PolytopeError> {
        let mut pts = self.vertices.clone();
        pts.push(p);
        Self::from_vertices(pts)
    }

    /// Every ridge lies in exactly two facets.
    pub fn ridges_are_shared_by_two(&self) -> bool {
        let mut counts = std::collections::BTreeMap::<Triangle, usize>::new();
        for f in self.facets() {
            for t in f.iter().copied().combinations(3) {
                *counts.entry([t[0], t[1], t[2]]).or_default() += 1;
            }
        }
        counts.values().all(|&c| c == 2)
    }
}

/// Gale's evenness condition for a 4-subset of `1..=m` (labels are 1-based):
/// every maximal run of chosen labels not touching `1` or `m` has even length.
pub fn gale_evenness(m: usize, s: &[usize]) -> bool {
    debug_assert!(m >= 5 && s.len() == 4);
    let set: BTreeSet<usize> = s.iter().copied().collect();
    let mut t = 1;
    while t <= m {
        if !set.contains(&t) {
            t += 1;
            continue;
        }
        let start = t;
        while t <= m && set.contains(&t) {
            t += 1;
        }
        let len = t - start;
        let interior = start > 1 && t <= m;
        if interior && len % 2 == 1 {
            return false;
        }
    }
    true
}

/// All Gale-evenness 4-subsets of `1..=m`, as facet ids.
pub fn gale_facets(m: usize) -> BTreeSet<Facet> {
    (1..=m)
        .combinations(4)
        .filter(|s| gale_evenness(m, s))
        .map(|s| [s[0], s[1], s[2], s[3]].map(|l| VertexId(l - 1)))
        .collect()
}

pub mod format {
    //! The line-oriented polytope text format:
    //!
    //! ```text
    //! dim 4
    //! n <count>
    //! v <id> <r> <r> <r> <r>
    //! ```
    //!
    //! Ids are 1-based labels; blank lines and `#` comments are ignored.

    use std::fmt::Write;

    use thiserror::Error;

    use super::{Polytope, PolytopeError};
    use crate::exact_geometry::Point4;
    use crate::scalar::Scalar;

    #[derive(Debug, Error, Clone, PartialEq, Eq)]
    pub enum FormatError {
        #[error("line {line}: {message}")]
        Syntax { line: usize, message: String },
        #[error("invalid polytope: {0}")]
        Invalid(#[from] PolytopeError),
    }

    fn syntax(line: usize, message: impl Into<String>) -> FormatError {
        FormatError::Syntax { line, message: message.into() }
    }

    pub fn write<T: Scalar>(p: &Polytope<T>) -> String {
        let mut out = format!("dim 4\nn {}\n", p.vertex_count());
        for (v, pt) in p.vertex_ids().zip(p.vertices()) {
            writeln!(out, "v {v} {pt}").expect("writing to a string");
        }
        out
    }

    pub fn parse<T: Scalar>(text: &str) -> Result<Polytope<T>, FormatError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (ln, l) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
        if l.split_whitespace().collect::<Vec<_>>() != ["dim", "4"] {
            return Err(syntax(ln, "expected `dim 4`"));
        }
        let (ln, l) = lines.next().ok_or_else(|| syntax(ln + 1, "missing `n <count>`"))?;
        let count: usize = match l.split_whitespace().collect::<Vec<_>>()[..] {
            ["n", c] => c.parse().map_err(|_| syntax(ln, format!("bad count `{c}`")))?,
            _ => return Err(syntax(ln, "expected `n <count>`")),
        };

        let mut slots: Vec<Option<Point4<T>>> = vec![None; count];
        let mut last = ln;
        for (ln, l) in lines {
            last = ln;
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.first() != Some(&"v") || fields.len() != 6 {
                return Err(syntax(ln, "expected `v <id> <r> <r> <r> <r>`"));
            }
            let id: usize = fields[1]
                .parse()
                .map_err(|_| syntax(ln, format!("bad vertex id `{}`", fields[1])))?;
            if id == 0 || id > count {
                return Err(syntax(ln, format!("vertex id {id} outside 1..={count}")));
            }
            if slots[id - 1].is_some() {
                return Err(syntax(ln, format!("duplicate vertex id {id}")));
            }
            let pt = Point4::parse_fields(&fields[2..]).map_err(|e| syntax(ln, e.to_string()))?;
            slots[id - 1] = Some(pt);
        }
        let pts: Option<Vec<Point4<T>>> = slots.into_iter().collect();
        let pts = pts.ok_or_else(|| syntax(last, format!("expected {count} vertices")))?;
        Ok(Polytope::from_vertices(pts)?)
    }

    /// One line per facet, sorted ids, lexicographic order.
    pub fn facet_listing<T: Scalar>(p: &Polytope<T>) -> String {
        let mut out = String::new();
        for f in p.facets() {
            writeln!(out, "{} {} {} {}", f[0], f[1], f[2], f[3]).expect("writing to a string");
        }
        out
    }
}
