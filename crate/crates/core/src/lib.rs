//! Exact computational geometry for neighbourly simplicial 4-polytopes:
//! vertex figures, universal edges, linked vertex arrays, sewing, and
//! separation of an interior point from the vertex set by few hyperplanes.

pub mod exact_geometry;
pub mod construct;
pub mod figures;
pub mod linkage;
pub mod polytope;
pub mod scalar;
pub mod separation;

pub use num_rational::BigRational as Rational;
pub use polytope::{Edge, Facet, Triangle, VertexId};
pub use scalar::Scalar;

pub type Point4 = exact_geometry::Point4<Rational>;
pub type Hyperplane = exact_geometry::Hyperplane<Rational>;
pub type Polytope = polytope::Polytope<Rational>;
