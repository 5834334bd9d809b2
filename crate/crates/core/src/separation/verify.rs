//! Seeded sweeps of `s(O)` over interior points, with a reproducible report.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::exact_geometry::{linalg, Hyperplane, Point4};
use crate::linkage::{LinkageStructure, VertexArray};
use crate::polytope::{format, Facet, Polytope};
use crate::scalar::Scalar;

use super::{min_separation, SeparationError, SeparationInstance};

/// The conjectured bound `2^d` in dimension four.
pub const BOUND: usize = 16;

/// Distance parameter of the near-boundary samples.
const NEAR: (i64, i64) = (1, 1000);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Number of random convex combinations; the deterministic samples come on top.
    pub samples: usize,
    pub seed: u64,
    /// Run even when the array is not simply linked.
    pub force: bool,
    /// Record wall-clock time in the report (which makes it non-reproducible).
    pub timing: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { samples: 100, seed: 0, force: false, timing: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Centroid,
    NearFacet,
    Random,
    /// Just inside or just outside a facet of a prefix `P_m` that is interior to `P`.
    PrefixBoundary,
    /// The point `[x_1, x_3, x_5] ∩ [x_2, x_4, x_6]` of the first six array vertices.
    Core,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct SampleRecord<T: Scalar> {
    pub index: usize,
    pub kind: SampleKind,
    pub point: Point4<T>,
    pub s: usize,
    pub hyperplanes: Vec<Hyperplane<T>>,
    pub assignment: Vec<AssignmentEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssignmentEntry {
    pub facet: Facet,
    pub hyperplane: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct VerifyReport<T: Scalar> {
    pub polytope_hash: String,
    pub seed: u64,
    pub random_samples: usize,
    pub array: Vec<usize>,
    pub scope: &'static str,
    pub samples: Vec<SampleRecord<T>>,
    pub max_s: usize,
    pub histogram: BTreeMap<usize, usize>,
    pub bound: usize,
    pub within_bound: bool,
    pub runtime_ms: Option<u64>,
}

pub fn polytope_hash<T: Scalar>(p: &Polytope<T>) -> String {
    hex::encode(Sha256::digest(format::write(p).as_bytes()))
}

fn near<T: Scalar>(from: &Point4<T>, toward: &Point4<T>, sign: i64) -> Point4<T> {
    from.lerp(toward, &T::from_ratio(sign * NEAR.0, NEAR.1))
}

/// `[a0, a1, a2] ∩ [b0, b1, b2]` when the two triangles meet in one point.
pub fn triangle_crossing<T: Scalar>(a: [&Point4<T>; 3], b: [&Point4<T>; 3]) -> Option<Point4<T>> {
    // Unknowns (λ0, λ1, λ2, μ0, μ1, μ2): Σλ a_i - Σμ b_j = 0, Σλ = 1, Σμ = 1.
    let mut rows: Vec<Vec<T>> = (0..4)
        .map(|k| {
            a.iter()
                .map(|p| p.coords()[k].clone())
                .chain(b.iter().map(|p| -p.coords()[k].clone()))
                .collect()
        })
        .collect();
    rows.push([T::one(), T::one(), T::one(), T::zero(), T::zero(), T::zero()].to_vec());
    rows.push([T::zero(), T::zero(), T::zero(), T::one(), T::one(), T::one()].to_vec());
    let rhs = [T::zero(), T::zero(), T::zero(), T::zero(), T::one(), T::one()];
    let x = linalg::solve(&rows, &rhs)?;
    if x.iter().any(|v| v.is_negative()) {
        return None;
    }
    Some(Point4::combination(a.iter().copied().zip(x.into_iter().take(3))))
}

/// The sample points, in report order.
pub fn sample_points<T: Scalar>(
    p: &Polytope<T>,
    array: &VertexArray,
    config: &VerifyConfig,
) -> Result<Vec<(SampleKind, Point4<T>)>, SeparationError> {
    let centre = p.centroid();
    let mut out = vec![(SampleKind::Centroid, centre.clone())];

    for rec in p.facet_records() {
        let c = Point4::centroid(p.points(&rec.vertices));
        out.push((SampleKind::NearFacet, near(&c, &centre, 1)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.samples {
        let weights: Vec<i64> = (0..p.vertex_count()).map(|_| rng.gen_range(1..=1000)).collect();
        let total: i64 = weights.iter().sum();
        let pt = Point4::combination(
            p.vertices().iter().zip(weights.iter().map(|&w| T::from_ratio(w, total))),
        );
        out.push((SampleKind::Random, pt));
    }

    let n = p.vertex_count();
    let facets = p.facet_set();
    for m in 6..n {
        let pm = array.prefix(p, m)?;
        let cm = pm.centroid();
        for rec in pm.facet_records() {
            let ids: Facet = rec.vertices.map(|v| array.vertex(v.index() + 1));
            let mut sorted = ids;
            sorted.sort();
            if facets.contains(&sorted) {
                continue;
            }
            let c = Point4::centroid(pm.points(&rec.vertices));
            for sign in [1, -1] {
                let pt = near(&c, &cm, sign);
                if p.contains_interior(&pt) {
                    out.push((SampleKind::PrefixBoundary, pt));
                }
            }
        }
    }

    if n >= 6 {
        let x = |t: usize| p.point(array.vertex(t));
        if let Some(pt) = triangle_crossing([x(1), x(3), x(5)], [x(2), x(4), x(6)]) {
            if p.contains_interior(&pt) {
                out.push((SampleKind::Core, pt));
            }
        }
    }
    Ok(out)
}

/// Computes `s(O)` for every sample point. Refuses arrays that are not simply
/// linked unless `config.force`, in which case the report is marked out of scope.
pub fn verify_conjecture<T: Scalar>(
    p: &Polytope<T>,
    array: &VertexArray,
    config: &VerifyConfig,
) -> Result<VerifyReport<T>, SeparationError> {
    let start = Instant::now();
    let in_scope = p.vertex_count() >= 6
        && p.is_neighbourly()
        && LinkageStructure::compute(p, array)
        .ok()
        .and_then(|ls| ls.is_simply_linked().ok())
        .unwrap_or(false);
    if !in_scope && !config.force {
        return Err(SeparationError::NotSimplyLinked);
    }
    let points = sample_points(p, array, config)?;
    let samples: Vec<SampleRecord<T>> = points
        .into_par_iter()
        .enumerate()
        .map(|(index, (kind, point))| {
            let inst = SeparationInstance::new(p, point)?;
            let report = min_separation(&inst);
            let cert = report.certificate;
            Ok(SampleRecord {
                index,
                kind,
                point: inst.point,
                s: report.s_value,
                hyperplanes: cert.hyperplanes,
                assignment: cert
                    .assignment
                    .into_iter()
                    .map(|(facet, hyperplane)| AssignmentEntry { facet, hyperplane })
                    .collect(),
            })
        })
        .collect::<Result<_, SeparationError>>()?;

    let mut histogram = BTreeMap::new();
    for s in &samples {
        *histogram.entry(s.s).or_insert(0) += 1;
    }
    let max_s = samples.iter().map(|s| s.s).max().unwrap_or(0);
    Ok(VerifyReport {
        polytope_hash: polytope_hash(p),
        seed: config.seed,
        random_samples: config.samples,
        array: array.order().iter().map(|v| v.label()).collect(),
        scope: if in_scope { "in-theorem-scope" } else { "out-of-theorem-scope" },
        samples,
        max_s,
        histogram,
        bound: BOUND,
        within_bound: max_s <= BOUND,
        runtime_ms: config.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_six_core_is_interior() {
        let p = crate::Polytope::cyclic(6).unwrap();
        let a = VertexArray::natural(6);
        let pts = sample_points(&p, &a, &VerifyConfig { samples: 0, ..VerifyConfig::default() }).unwrap();
        assert!(pts.iter().any(|(k, _)| *k == SampleKind::Core));
    }

    #[test]
    fn simplex_needs_the_force_flag() {
        let p = crate::Polytope::simplex();
        let a = VertexArray::natural(5);
        let cfg = VerifyConfig { samples: 0, ..VerifyConfig::default() };
        assert_eq!(verify_conjecture(&p, &a, &cfg).unwrap_err(), SeparationError::NotSimplyLinked);
        let forced = verify_conjecture(&p, &a, &VerifyConfig { force: true, ..cfg }).unwrap();
        assert_eq!(forced.scope, "out-of-theorem-scope");
        assert_eq!(forced.samples[0].s, 5);
    }
}
