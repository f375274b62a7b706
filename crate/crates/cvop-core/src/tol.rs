//! Central numeric tolerances.
//!
//! All geometric predicates work on unit-normalized normals and unit rays, so
//! the tolerances below are absolute unless noted otherwise.

/// Feasibility slack for halfspace membership (`normal` unit length).
pub const FEAS: f64 = 1e-8;

/// Sign classification of a ray against a cutting hyperplane.
pub const ZERO: f64 = 1e-9;

/// Relative tolerance for deduplicating directions and coordinates.
pub const DEDUP: f64 = 1e-7;

/// Pivot threshold for rank decisions on unit-normalized rows.
pub const RANK: f64 = 1e-7;

/// Below this a vector counts as the zero direction.
pub const TINY: f64 = 1e-12;

/// Last homogeneous coordinate above which a cone ray maps to a vertex.
pub const VERTEX_T: f64 = 1e-9;

/// Target accuracy of iterative scalarization solves (duality gap).
pub const GAP: f64 = 1e-6;
