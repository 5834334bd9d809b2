//! Universal edges, vertex arrays, links between vertices, chains, and the
//! linked / simply-linked predicates.
//!
//! Inside a [`LinkageStructure`] vertices are addressed by their 1-based
//! array position `t`, so `x_t` is `array.vertex(t)`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact_geometry::{hyperplane_through, Hyperplane, Point4, Sign};
use crate::polytope::{edge, Edge, Polytope, PolytopeError, VertexId};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkageError {
    #[error("prefix P_{0} is not neighbourly")]
    PrefixNotNeighbourly(usize),
    #[error("polytope is not linked under this array")]
    NotLinked,
    #[error("x_{t} is linked to several vertices: {targets:?}")]
    AmbiguousLink { t: usize, targets: Vec<usize> },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid vertex array: {0}")]
    BadArray(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Universal edges by definition: `[E, z]` is a 2-face for every other `z`.
pub fn universal_edges_def<T: Scalar>(p: &Polytope<T>) -> BTreeSet<Edge> {
    let faces = p.face_set();
    p.vertex_ids()
        .tuple_combinations()
        .filter(|&(x, y)| {
            faces.edges.contains(&[x, y])
                && p.vertex_ids()
                    .filter(|&z| z != x && z != y)
                    .all(|z| faces.two_faces.contains(&crate::polytope::sorted([x, y, z])))
        })
        .map(|(x, y)| [x, y])
        .collect()
}

/// Universal edges by separation: no hyperplane spanned by four other
/// vertices strictly separates the endpoints.
pub fn universal_edges_sep<T: Scalar>(p: &Polytope<T>) -> BTreeSet<Edge> {
    let n = p.vertex_count();
    let spans: Vec<(Vec<usize>, Vec<Sign>)> = (0..n)
        .combinations(4)
        .map(|w| {
            let h = hyperplane_through(p.point(VertexId(w[0])), p.point(VertexId(w[1])), p.point(VertexId(w[2])), p.point(VertexId(w[3])))
                .expect("vertices are in general position");
            let sides = p.vertices().iter().map(|q| h.side_of(q)).collect();
            (w, sides)
        })
        .collect();
    let faces = p.face_set();
    p.vertex_ids()
        .tuple_combinations()
        .filter(|&(x, y)| {
            faces.edges.contains(&[x, y])
                && spans.iter().all(|(w, sides)| {
                    w.contains(&x.0) || w.contains(&y.0) || sides[x.0] != sides[y.0].flip()
                })
        })
        .map(|(x, y)| [x, y])
        .collect()
}

/// Disjoint 3-sets `Y, Z` of the six vertices with `U = Y × Z`, if any.
/// `Y` is the part holding the smallest vertex.
pub fn bipartite_split(vertices: &[VertexId], u: &BTreeSet<Edge>) -> Option<([VertexId; 3], [VertexId; 3])> {
    if vertices.len() != 6 {
        return None;
    }
    let first = vertices.iter().copied().min()?;
    vertices.iter().copied().combinations(3).find_map(|y| {
        if !y.contains(&first) {
            return None;
        }
        let z: Vec<VertexId> = vertices.iter().copied().filter(|v| !y.contains(v)).collect();
        let product: BTreeSet<Edge> = y.iter().cartesian_product(&z).map(|(&a, &b)| edge(a, b)).collect();
        (product == *u).then(|| ([y[0], y[1], y[2]], [z[0], z[1], z[2]]))
    })
}

/// An ordering `x_1 < x_2 < ... < x_n` of a polytope's vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexArray {
    order: Vec<VertexId>,
}

impl VertexArray {
    /// `order[t - 1]` is `x_t`.
    pub fn new(order: Vec<VertexId>, vertex_count: usize) -> Result<Self, LinkageError> {
        let set: BTreeSet<VertexId> = order.iter().copied().collect();
        if order.len() != vertex_count || set.len() != vertex_count || set.iter().any(|v| v.0 >= vertex_count) {
            return Err(LinkageError::BadArray(format!(
                "expected a permutation of 1..={vertex_count}"
            )));
        }
        Ok(Self { order })
    }

    pub fn natural(n: usize) -> Self {
        Self { order: (0..n).map(VertexId).collect() }
    }

    /// Parses `"i1,i2,...,in"`: 1-based vertex labels listed as `x_1, x_2, ..., x_n`.
    pub fn parse(s: &str, vertex_count: usize) -> Result<Self, LinkageError> {
        let order = s
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<usize>()
                    .ok()
                    .and_then(VertexId::from_label)
                    .ok_or_else(|| LinkageError::BadArray(format!("bad label `{f}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(order, vertex_count)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `x_t`, for `t` in `1..=n`.
    pub fn vertex(&self, t: usize) -> VertexId {
        self.order[t - 1]
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.order.iter().position(|&u| u == v).map(|i| i + 1)
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    /// `P_m = [x_m, ..., x_1]`, whose vertex `i` is `x_{i+1}`.
    pub fn prefix<T: Scalar>(&self, p: &Polytope<T>, m: usize) -> Result<Polytope<T>, PolytopeError> {
        p.subpolytope(&self.order[..m])
    }
}

/// A descending run `w_s > ... > w_1` of array positions with `w_i → w_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Chain {
    pub members: Vec<usize>,
}

impl Chain {
    pub fn least(&self) -> usize {
        *self.members.last().expect("chains are nonempty")
    }

    pub fn contains(&self, t: usize) -> bool {
        self.members.contains(&t)
    }
}

/// Edges between array positions.
pub type PosEdge = [usize; 2];

#[derive(Clone, Debug, Serialize)]
pub struct LinkageStructure {
    pub array: VertexArray,
    /// `U(P_m)` in array positions, for `m = 6..=n`.
    pub universal: BTreeMap<usize, BTreeSet<PosEdge>>,
    /// Prefixes `P_m` (for `m >= 6`) that are neighbourly.
    pub neighbourly: BTreeMap<usize, bool>,
    /// `t → r` for every `t >= 7` (possibly several `r <= 6`).
    pub links: BTreeMap<usize, BTreeSet<usize>>,
}

impl LinkageStructure {
    pub fn compute<T: Scalar>(p: &Polytope<T>, array: &VertexArray) -> Result<Self, LinkageError> {
        let n = p.vertex_count();
        if array.len() != n {
            return Err(LinkageError::BadArray(format!("array has {} entries for {n} vertices", array.len())));
        }
        let per_prefix: Vec<(usize, bool, BTreeSet<PosEdge>)> = (6.min(n)..=n)
            .into_par_iter()
            .map(|m| {
                let pm = array.prefix(p, m)?;
                let u = universal_edges_def(&pm)
                    .into_iter()
                    .map(|[a, b]| [a.0 + 1, b.0 + 1])
                    .collect();
                Ok((m, pm.is_neighbourly(), u))
            })
            .collect::<Result<_, PolytopeError>>()?;
        let mut universal = BTreeMap::new();
        let mut neighbourly = BTreeMap::new();
        for (m, nb, u) in per_prefix {
            universal.insert(m, u);
            neighbourly.insert(m, nb);
        }
        let mut links = BTreeMap::new();
        for t in 7..=n {
            let candidates: BTreeSet<usize> = universal[&t]
                .iter()
                .filter(|e| e[1] == t)
                .map(|e| e[0])
                .collect();
            let targets = match candidates.iter().max() {
                Some(&top) if top > 6 => BTreeSet::from([top]),
                _ => candidates,
            };
            links.insert(t, targets);
        }
        Ok(Self { array: array.clone(), universal, neighbourly, links })
    }

    pub fn n(&self) -> usize {
        self.array.len()
    }

    /// All `r` with `x_t → x_r`.
    pub fn link_targets(&self, t: usize) -> BTreeSet<usize> {
        self.links.get(&t).cloned().unwrap_or_default()
    }

    /// The vertex `x_t` is linked to, when there is exactly one.
    pub fn link_of(&self, t: usize) -> Result<Option<usize>, LinkageError> {
        let targets = self.link_targets(t);
        match targets.len() {
            0 => Ok(None),
            1 => Ok(targets.into_iter().next()),
            _ => Err(LinkageError::AmbiguousLink { t, targets: targets.into_iter().collect() }),
        }
    }

    /// Link within the upper vertices `x_7, ..., x_n`.
    fn upper_parent(&self, t: usize) -> Option<usize> {
        self.link_targets(t).into_iter().find(|&r| r > 6)
    }

    /// Upper vertices linked only into `P_6` (or nowhere).
    pub fn roots(&self) -> Vec<usize> {
        (7..=self.n()).filter(|&t| self.upper_parent(t).is_none()).collect()
    }

    fn children(&self, t: usize) -> Vec<usize> {
        (t + 1..=self.n()).filter(|&c| self.upper_parent(c) == Some(t)).collect()
    }

    fn subtree(&self, t: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::from([t]);
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            for c in self.children(u) {
                out.insert(c);
                stack.push(c);
            }
        }
        out
    }

    /// `V^k`: the union of all chains whose least vertex is `x_k`.
    pub fn vk(&self, k: usize) -> BTreeSet<usize> {
        if k > 6 {
            return self.subtree(k);
        }
        let mut out = BTreeSet::from([k]);
        for root in self.roots() {
            if self.link_targets(root).contains(&k) {
                out.extend(self.subtree(root));
            }
        }
        out
    }

    /// Whether the positions in `set` form one chain under `→`.
    pub fn is_chain(&self, set: &BTreeSet<usize>) -> bool {
        let members: Vec<usize> = set.iter().rev().copied().collect();
        members.windows(2).all(|w| self.link_targets(w[0]).contains(&w[1]))
    }

    /// Maximal chains of the upper vertices, one per root-to-leaf path.
    pub fn maximal_chains(&self) -> Vec<Chain> {
        let mut chains = Vec::new();
        for root in self.roots() {
            let mut stack = vec![vec![root]];
            while let Some(path) = stack.pop() {
                let top = *path.last().expect("nonempty path");
                let kids = self.children(top);
                if kids.is_empty() {
                    chains.push(Chain { members: path.iter().rev().copied().collect() });
                }
                for c in kids.into_iter().rev() {
                    let mut next = path.clone();
                    next.push(c);
                    stack.push(next);
                }
            }
        }
        chains.sort();
        chains
    }

    /// Linked under the array: `P_m` neighbourly and `U(P_{m+1}) \ U(P_m)`
    /// nonempty for `m = 6..n-1`.
    pub fn is_linked(&self) -> Result<bool, LinkageError> {
        let n = self.n();
        if n <= 6 {
            return Ok(true);
        }
        for m in 6..=n {
            if !self.neighbourly[&m] {
                return Err(LinkageError::PrefixNotNeighbourly(m));
            }
        }
        Ok((6..n).all(|m| self.universal[&(m + 1)].difference(&self.universal[&m]).next().is_some()))
    }

    /// Every `V^k` (`k >= 7`) is a chain, and distinct chains hanging off
    /// `P_6` attach to base vertices that are not joined by a universal edge.
    pub fn is_simply_linked(&self) -> Result<bool, LinkageError> {
        if !self.is_linked()? {
            return Err(LinkageError::NotLinked);
        }
        let n = self.n();
        if (7..=n).any(|k| !self.is_chain(&self.vk(k))) {
            return Ok(false);
        }
        Ok(self.base_anchors().is_some())
    }

    /// One link target in `P_6` per root, pairwise distinct and pairwise not
    /// joined by an edge of `U(P_6)`, when such a choice exists.
    pub fn base_anchors(&self) -> Option<BTreeMap<usize, usize>> {
        let roots = self.roots();
        let Some(u6) = self.universal.get(&6) else {
            return Some(BTreeMap::new());
        };
        let choices: Vec<Vec<usize>> = roots
            .iter()
            .map(|&r| self.link_targets(r).into_iter().collect())
            .collect();
        choices
            .iter()
            .map(|c| c.iter().copied())
            .multi_cartesian_product()
            .find(|pick| {
                pick.iter()
                    .tuple_combinations()
                    .all(|(&i, &j)| i != j && !u6.contains(&[i.min(j), i.max(j)]))
            })
            .map(|pick| roots.iter().copied().zip(pick).collect())
            .or_else(|| roots.is_empty().then(BTreeMap::new))
    }

    fn point<'a, T: Scalar>(&self, p: &'a Polytope<T>, t: usize) -> &'a Point4<T> {
        p.point(self.array.vertex(t))
    }

    fn misses_hull<T: Scalar>(&self, p: &Polytope<T>, h: &Hyperplane<T>, set: &BTreeSet<usize>) -> bool {
        let mut sides = set.iter().map(|&t| h.side_of(self.point(p, t)));
        let first = sides.next().expect("nonempty set");
        !first.is_zero() && sides.all(|s| s == first)
    }

    fn spanned<T: Scalar>(&self, p: &Polytope<T>, span: [usize; 4]) -> Hyperplane<T> {
        let [a, b, c, d] = span.map(|t| self.point(p, t));
        hyperplane_through(a, b, c, d).expect("vertices are in general position")
    }

    fn check_c_hypotheses(&self, m: usize, t: usize, k: usize) -> Result<(), LinkageError> {
        let n = self.n();
        if !(6 <= m && m < n && m < t && t <= n && k < t) {
            return Err(LinkageError::HypothesisViolated(format!(
                "need 6 <= m < n, x_m < x_t, x_k < x_t (m={m}, t={t}, k={k}, n={n})"
            )));
        }
        if self.vk(k).contains(&t) {
            return Err(LinkageError::HypothesisViolated(format!("x_{t} lies in V^{k}")));
        }
        Ok(())
    }

    /// C.1: the hyperplane spanned by `x_span` (all `<= m`) misses `conv(V^t)`.
    pub fn lemma_c_probe<T: Scalar>(
        &self,
        p: &Polytope<T>,
        m: usize,
        t: usize,
        k: usize,
        span: [usize; 4],
    ) -> Result<bool, LinkageError> {
        self.check_c_hypotheses(m, t, k)?;
        if span.iter().any(|&s| s == 0 || s > m) {
            return Err(LinkageError::HypothesisViolated(format!("span {span:?} not within x_1..x_{m}")));
        }
        Ok(self.misses_hull(p, &self.spanned(p, span), &self.vk(t)))
    }

    /// C.2: `H_h = ⟨x_a, x_b, x_c, x_h⟩` with `a, b, c <= m` and
    /// `H_h ∩ V^k = {x_h}` misses `conv(V^t)`.
    pub fn lemma_c2_probe<T: Scalar>(
        &self,
        p: &Polytope<T>,
        m: usize,
        t: usize,
        k: usize,
        abc: [usize; 3],
        h: usize,
    ) -> Result<bool, LinkageError> {
        self.check_c_hypotheses(m, t, k)?;
        let vk = self.vk(k);
        if abc.iter().any(|&s| s == 0 || s > m || vk.contains(&s)) || !vk.contains(&h) {
            return Err(LinkageError::HypothesisViolated("H_h must meet V^k exactly in x_h".into()));
        }
        let [a, b, c] = abc;
        Ok(self.misses_hull(p, &self.spanned(p, [a, b, c, h]), &self.vk(t)))
    }

    /// C.3: for `x_t → x_j` with `x_j ∉ {x_a, x_b, x_c}`, `H_h` misses `conv(V^j)`.
    pub fn lemma_c3_probe<T: Scalar>(
        &self,
        p: &Polytope<T>,
        m: usize,
        t: usize,
        k: usize,
        abc: [usize; 3],
        h: usize,
    ) -> Result<bool, LinkageError> {
        self.check_c_hypotheses(m, t, k)?;
        let Some(j) = self.link_of(t)? else {
            return Err(LinkageError::HypothesisViolated(format!("x_{t} is not linked")));
        };
        let vk = self.vk(k);
        if abc.contains(&j) || abc.iter().any(|&s| s == 0 || s > m || vk.contains(&s)) || !vk.contains(&h) {
            return Err(LinkageError::HypothesisViolated("C.3 hyperplane conditions".into()));
        }
        let vj: BTreeSet<usize> = std::iter::once(j).chain(self.vk(t)).collect();
        let [a, b, c] = abc;
        Ok(self.misses_hull(p, &self.spanned(p, [a, b, c, h]), &vj))
    }
}

/// Outcome of an exhaustive property scan.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub probes: usize,
    pub counterexamples: Vec<String>,
}

impl ScanReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.probes += 1;
        if !ok {
            self.counterexamples.push(what());
        }
    }
}

/// Every admissible `(m, t, k)` and every hyperplane spanned from `x_1..x_m`.
pub fn scan_lemma_c1<T: Scalar>(p: &Polytope<T>, ls: &LinkageStructure) -> ScanReport {
    let n = ls.n();
    let mut report = ScanReport::default();
    for m in 6..n {
        let spans: Vec<Vec<usize>> = (1..=m).combinations(4).collect();
        for t in m + 1..=n {
            for k in 1..t {
                if ls.check_c_hypotheses(m, t, k).is_err() {
                    continue;
                }
                for s in &spans {
                    let span = [s[0], s[1], s[2], s[3]];
                    let ok = ls.lemma_c_probe(p, m, t, k, span).expect("hypotheses checked");
                    report.record(ok, || format!("C.1 m={m} t={t} k={k} span={span:?}"));
                }
            }
        }
    }
    report
}

/// C.2 and C.3 over every admissible configuration.
pub fn scan_lemma_c23<T: Scalar>(p: &Polytope<T>, ls: &LinkageStructure) -> ScanReport {
    let n = ls.n();
    let mut report = ScanReport::default();
    for m in 6..n {
        for t in m + 1..=n {
            for k in 1..t {
                if ls.check_c_hypotheses(m, t, k).is_err() {
                    continue;
                }
                let vk = ls.vk(k);
                let base: Vec<usize> = (1..=m).filter(|s| !vk.contains(s)).collect();
                let j = ls.link_of(t).ok().flatten();
                for abc in base.iter().copied().combinations(3) {
                    let abc = [abc[0], abc[1], abc[2]];
                    for &h in &vk {
                        if ls.lemma_c2_probe(p, m, t, k, abc, h).is_ok_and(|ok| !ok) {
                            report.record(false, || format!("C.2 m={m} t={t} k={k} abc={abc:?} h={h}"));
                        } else {
                            report.probes += 1;
                        }
                        if j.is_some_and(|j| !abc.contains(&j)) {
                            let ok = ls.lemma_c3_probe(p, m, t, k, abc, h).unwrap_or(true);
                            report.record(ok, || format!("C.3 m={m} t={t} k={k} abc={abc:?} h={h}"));
                        }
                    }
                }
            }
        }
    }
    report
}

/// No facet meets three pairwise disjoint maximal chains of the upper vertices.
pub fn scan_lemma_d<T: Scalar>(p: &Polytope<T>, ls: &LinkageStructure) -> ScanReport {
    let chains = ls.maximal_chains();
    let mut report = ScanReport::default();
    for f in p.facets() {
        let pos: BTreeSet<usize> = f.iter().filter_map(|&v| ls.array.position(v)).collect();
        let met = chains.iter().filter(|c| c.members.iter().any(|t| pos.contains(t))).count();
        report.record(met <= 2, || format!("facet {f:?} meets {met} chains"));
    }
    report
}

/// Every hyperplane spanned by `Y` and a further vertex strictly separates
/// two elements of `Z`, where `U(P_6) = Y × Z`.
pub fn scan_pencil<T: Scalar>(p: &Polytope<T>, ls: &LinkageStructure, y: [usize; 3], z: [usize; 3]) -> ScanReport {
    let mut report = ScanReport::default();
    for v in 1..=ls.n() {
        if y.contains(&v) {
            continue;
        }
        let h = ls.spanned(p, [y[0], y[1], y[2], v]);
        let sides: Vec<Sign> = z.iter().map(|&t| h.side_of(ls.point(p, t))).collect();
        let ok = sides.contains(&Sign::Positive) && sides.contains(&Sign::Negative);
        report.record(ok, || format!("⟨Y, x_{v}⟩ does not separate Z"));
    }
    report
}

/// Searches arrays (top vertex first) under which `p` is linked, for small `n`.
pub fn find_linked_array<T: Scalar>(p: &Polytope<T>) -> Result<Option<VertexArray>, LinkageError> {
    fn descend<T: Scalar>(
        p: &Polytope<T>,
        remaining: Vec<VertexId>,
        upper: &mut Vec<VertexId>,
        u_here: &BTreeSet<Edge>,
    ) -> Result<bool, PolytopeError> {
        if remaining.len() == 6 {
            return Ok(true);
        }
        for &x in &remaining {
            let rest: Vec<VertexId> = remaining.iter().copied().filter(|&v| v != x).collect();
            let sub = p.subpolytope(&rest)?;
            if !sub.is_neighbourly() {
                continue;
            }
            let u_sub: BTreeSet<Edge> =
                universal_edges_def(&sub).into_iter().map(|[a, b]| edge(rest[a.0], rest[b.0])).collect();
            if u_here.difference(&u_sub).next().is_none() {
                continue;
            }
            upper.push(x);
            if descend(p, rest, upper, &u_sub)? {
                return Ok(true);
            }
            upper.pop();
        }
        Ok(false)
    }
    if !p.is_neighbourly() {
        return Ok(None);
    }
    let all: Vec<VertexId> = p.vertex_ids().collect();
    let mut upper = Vec::new();
    if !descend(p, all, &mut upper, &universal_edges_def(p))? {
        return Ok(None);
    }
    let mut order: Vec<VertexId> = p.vertex_ids().filter(|v| !upper.contains(v)).collect();
    order.extend(upper.into_iter().rev());
    Ok(Some(VertexArray::new(order, p.vertex_count())?))
}
