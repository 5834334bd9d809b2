//! Exact points, hyperplanes and orientation predicates in 4-space.
//!
//! Nothing here touches floating point: every sidedness decision is the sign
//! of an exactly evaluated expression.

pub mod linalg;
pub mod lp;

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Scalar;
use lp::{LinearProgram, LpOutcome, Relation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("points are affinely dependent and span no hyperplane")]
    DegenerateSpan,
    #[error("hyperplane normal must be nonzero")]
    ZeroNormal,
    #[error("point lies in the convex hull; no strictly separating hyperplane exists")]
    NotSeparable,
    #[error("cannot parse `{0}` as a rational")]
    BadRational(String),
    #[error("expected 4 coordinates, found {0}")]
    WrongArity(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Scalar>(x: &T) -> Self {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A point of 4-space with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point4<T> {
    coords: [T; 4],
}

impl<T: Scalar> Point4<T> {
    pub fn new(coords: [T; 4]) -> Self {
        Self { coords }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        Self::new(c.map(T::from_int))
    }

    pub fn origin() -> Self {
        Self::from_ints([0; 4])
    }

    /// The `i`-th standard basis vector, `i` in `0..4`.
    pub fn unit(i: usize) -> Self {
        let mut c = [0; 4];
        c[i] = 1;
        Self::from_ints(c)
    }

    pub fn coords(&self) -> &[T; 4] {
        &self.coords
    }

    pub fn sub(&self, other: &Self) -> [T; 4] {
        std::array::from_fn(|i| self.coords[i].clone() - other.coords[i].clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(std::array::from_fn(|i| self.coords[i].clone() * k.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(std::array::from_fn(|i| {
            self.coords[i].clone() + other.coords[i].clone()
        }))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    /// `self + t (other - self)`.
    pub fn lerp(&self, other: &Self, t: &T) -> Self {
        let d = other.sub(self);
        Self::new(std::array::from_fn(|i| {
            self.coords[i].clone() + t.clone() * d[i].clone()
        }))
    }

    /// Convex combination with the given (nonnegative, unit-sum) weights.
    pub fn combination<'a>(points: impl IntoIterator<Item = (&'a Self, T)>) -> Self
    where
        T: 'a,
    {
        points
            .into_iter()
            .fold(Self::origin(), |acc, (p, w)| acc.add(&p.scale(&w)))
    }

    pub fn centroid<'a>(points: impl IntoIterator<Item = &'a Self>) -> Self
    where
        T: 'a,
    {
        let pts: Vec<&Self> = points.into_iter().collect();
        let w = T::one() / T::from_int(pts.len() as i64);
        Self::combination(pts.into_iter().map(|p| (p, w.clone())))
    }

    /// Parses four whitespace-separated rationals.
    pub fn parse(s: &str) -> Result<Self, GeometryError> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        Self::parse_fields(&parts)
    }

    pub fn parse_fields(parts: &[&str]) -> Result<Self, GeometryError> {
        if parts.len() != 4 {
            return Err(GeometryError::WrongArity(parts.len()));
        }
        let mut c: Vec<T> = Vec::with_capacity(4);
        for p in parts {
            c.push(parse_rational(p)?);
        }
        Ok(Self::new([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]))
    }
}

pub fn parse_rational<T: Scalar>(s: &str) -> Result<T, GeometryError> {
    s.parse::<T>()
        .map_err(|_| GeometryError::BadRational(s.to_string()))
}

impl<T: Scalar> fmt::Display for Point4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.coords;
        write!(f, "{a} {b} {c} {d}")
    }
}

impl<T: Scalar> Serialize for Point4<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        strs.serialize(s)
    }
}

/// `{x : normal · x = offset}`, stored in canonical form: `(normal, offset)`
/// is a primitive integer vector whose first nonzero normal entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane<T> {
    normal: [T; 4],
    offset: T,
}

impl<T: Scalar> Hyperplane<T> {
    pub fn new(normal: [T; 4], offset: T) -> Result<Self, GeometryError> {
        if normal.iter().all(|x| x.is_zero()) {
            return Err(GeometryError::ZeroNormal);
        }
        let mut v: Vec<T> = normal.into_iter().chain([offset]).collect();
        T::make_primitive(&mut v);
        if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
        let offset = v.pop().expect("five entries");
        Ok(Self {
            normal: [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()],
            offset,
        })
    }

    pub fn normal(&self) -> &[T; 4] {
        &self.normal
    }

    pub fn offset(&self) -> &T {
        &self.offset
    }

    /// `normal · q - offset`.
    pub fn eval(&self, q: &Point4<T>) -> T {
        linalg::dot(&self.normal, q.coords()) - self.offset.clone()
    }

    pub fn side_of(&self, q: &Point4<T>) -> Sign {
        Sign::of(&self.eval(q))
    }

    /// The parallel hyperplane through `q`.
    pub fn parallel_through(&self, q: &Point4<T>) -> Self {
        Self::new(self.normal.clone(), linalg::dot(&self.normal, q.coords()))
            .expect("normal is nonzero")
    }

    /// The parallel hyperplane whose evaluation is shifted by `delta`.
    pub fn shifted(&self, delta: T) -> Self {
        Self::new(self.normal.clone(), self.offset.clone() + delta).expect("normal is nonzero")
    }
}

impl<T: Scalar> fmt::Display for Hyperplane<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.normal;
        write!(f, "[{a} {b} {c} {d}] . x = {}", self.offset)
    }
}

impl<T: Scalar> Serialize for Hyperplane<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            normal: Vec<String>,
            offset: String,
        }
        Repr {
            normal: self.normal.iter().map(ToString::to_string).collect(),
            offset: self.offset.to_string(),
        }
        .serialize(s)
    }
}

/// Sign of the 5×5 determinant with rows `(p_i, 1)` followed by `(q, 1)`.
///
/// Positive for `(0, e1, e2, e3, e4)`.
pub fn orient<T: Scalar>(
    p0: &Point4<T>,
    p1: &Point4<T>,
    p2: &Point4<T>,
    p3: &Point4<T>,
    q: &Point4<T>,
) -> Sign {
    Sign::of(&orient_det(p0, p1, p2, p3, q))
}

/// The determinant behind [`orient`]; subtracting the first row reduces it to
/// the 4×4 determinant of the difference vectors.
pub fn orient_det<T: Scalar>(
    p0: &Point4<T>,
    p1: &Point4<T>,
    p2: &Point4<T>,
    p3: &Point4<T>,
    q: &Point4<T>,
) -> T {
    let rows = [p1, p2, p3, q]
        .iter()
        .map(|p| p.sub(p0).to_vec())
        .collect();
    linalg::determinant(rows)
}

pub fn hyperplane_through<T: Scalar>(
    a: &Point4<T>,
    b: &Point4<T>,
    c: &Point4<T>,
    d: &Point4<T>,
) -> Result<Hyperplane<T>, GeometryError> {
    // Solve [p, -1] · (normal, offset) = 0 for the four points.
    let rows: Vec<Vec<T>> = [a, b, c, d]
        .iter()
        .map(|p| {
            let mut r = p.coords().to_vec();
            r.push(-T::one());
            r
        })
        .collect();
    let ns = linalg::null_space(&rows, 5);
    if ns.len() != 1 {
        return Err(GeometryError::DegenerateSpan);
    }
    let v = &ns[0];
    Hyperplane::new(
        [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()],
        v[4].clone(),
    )
    .map_err(|_| GeometryError::DegenerateSpan)
}

pub fn side_of<T: Scalar>(h: &Hyperplane<T>, q: &Point4<T>) -> Sign {
    h.side_of(q)
}

/// Whether every point of `xs` is strictly on one open side of `h` and every
/// point of `ys` strictly on the other.
pub fn strictly_separates<'a, T: Scalar>(
    h: &Hyperplane<T>,
    xs: impl IntoIterator<Item = &'a Point4<T>>,
    ys: impl IntoIterator<Item = &'a Point4<T>>,
) -> bool {
    let mut xs = xs.into_iter();
    let Some(first) = xs.next() else {
        return false;
    };
    let s = h.side_of(first);
    if s.is_zero() || !xs.all(|x| h.side_of(x) == s) {
        return false;
    }
    let mut ys = ys.into_iter().peekable();
    ys.peek().is_some() && ys.all(|y| h.side_of(y) == s.flip())
}

/// Exact convex-hull membership via LP feasibility of
/// `λ >= 0, Σλ = 1, Σ λ_i p_i = q`.
pub fn in_convex_hull<T: Scalar>(q: &Point4<T>, pts: &[Point4<T>]) -> bool {
    assert!(!pts.is_empty(), "hull of an empty set");
    let mut lp = LinearProgram::new(pts.len());
    for axis in 0..4 {
        lp.constrain(
            pts.iter().map(|p| p.coords()[axis].clone()).collect(),
            Relation::Eq,
            q.coords()[axis].clone(),
        );
    }
    lp.constrain(vec![T::one(); pts.len()], Relation::Eq, T::one());
    matches!(lp.solve(), LpOutcome::Optimal { .. })
}

/// A hyperplane with `q` strictly on one side and all of `pts` strictly on
/// the other; the certificate that `q ∉ conv(pts)`.
pub fn farkas_separator<T: Scalar>(
    q: &Point4<T>,
    pts: &[Point4<T>],
) -> Result<Hyperplane<T>, GeometryError> {
    // Variables (a+, a-, b+, b-) >= 0 with a = a+ - a-, b = b+ - b-:
    //   a·p - b <= -1 for every p,   a·q - b >= 1,   minimizing |a|_1.
    let row = |p: &Point4<T>| -> Vec<T> {
        let mut r = Vec::with_capacity(10);
        r.extend(p.coords().iter().cloned());
        r.extend(p.coords().iter().map(|x| -x.clone()));
        r.push(-T::one());
        r.push(T::one());
        r
    };
    let mut objective = vec![-T::one(); 8];
    objective.extend([T::zero(), T::zero()]);
    let mut lp = LinearProgram::new(10).maximize(objective);
    for p in pts {
        lp.constrain(row(p), Relation::Le, -T::one());
    }
    lp.constrain(row(q), Relation::Ge, T::one());
    let LpOutcome::Optimal { x, .. } = lp.solve() else {
        return Err(GeometryError::NotSeparable);
    };
    let normal: [T; 4] = std::array::from_fn(|i| x[i].clone() - x[i + 4].clone());
    let offset = x[8].clone() - x[9].clone();
    let h = Hyperplane::new(normal, offset).map_err(|_| GeometryError::NotSeparable)?;
    debug_assert!(strictly_separates(&h, [q], pts));
    Ok(h)
}
