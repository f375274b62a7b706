//! Performance indicators: the primal error (largest scalarization value
//! over the outer approximation's vertices) and the hypervolume gap between
//! outer and inner approximations inside a bounding polytope.

use nalgebra::DVector;

use crate::cones::OrderingCone;
use crate::poly::{
    contains, enumerate_vertices, polytope_volume, DoubleDescription, HRep, Halfspace, PolyError,
    VRep,
};
use crate::scalar::{ps_solve, ProblemInstance, ScalarError};
use crate::solve::DualPoint;

#[derive(Debug)]
pub enum MetricsError {
    EmptyPointSet,
    ZeroOuterVolume,
    UnboundedRegion,
    InnerNotContained,
    Scalar(ScalarError),
    Poly(PolyError),
}

impl std::fmt::Display for MetricsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricsError::EmptyPointSet => write!(f, "empty point set"),
            MetricsError::ZeroOuterVolume => write!(f, "outer approximation has zero volume"),
            MetricsError::UnboundedRegion => {
                write!(f, "bounding polytope leaves the region unbounded")
            }
            MetricsError::InnerNotContained => {
                write!(f, "inner region is not contained in the outer region")
            }
            MetricsError::Scalar(e) => write!(f, "{e}"),
            MetricsError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for MetricsError {}

impl From<PolyError> for MetricsError {
    fn from(e: PolyError) -> Self {
        MetricsError::Poly(e)
    }
}

#[derive(Debug, Clone)]
pub struct MetricReport {
    pub pe: f64,
    pub hv_outer: f64,
    pub hv_inner: f64,
    pub hv_percent: f64,
    /// Set when every per-vertex scalarization solve succeeded.
    pub pe_complete: bool,
}

#[derive(Debug, Clone)]
pub struct PrimalErrorReport {
    pub pe: f64,
    /// One entry per vertex: the scalarization value, or the failure text.
    pub per_vertex: Vec<Result<f64, String>>,
    pub complete: bool,
}

/// `PE = max ||z^v||` over the outer approximation's vertices, solved with
/// the same primal norm the algorithm ran with. Failures are recorded per
/// vertex and flagged, never dropped silently.
pub fn primal_error(
    outer_vertices: &[DVector<f64>],
    problem: &ProblemInstance,
) -> Result<PrimalErrorReport, MetricsError> {
    if outer_vertices.is_empty() {
        return Err(MetricsError::EmptyPointSet);
    }
    let mut per_vertex = Vec::with_capacity(outer_vertices.len());
    let mut pe = 0.0f64;
    let mut complete = true;
    for v in outer_vertices {
        match ps_solve(problem, v) {
            Ok(r) => {
                pe = pe.max(r.value);
                per_vertex.push(Ok(r.value));
            }
            Err(e) => {
                complete = false;
                per_vertex.push(Err(e.to_string()));
            }
        }
    }
    Ok(PrimalErrorReport {
        pe,
        per_vertex,
        complete,
    })
}

/// `Q = ∩_j {y : (w^j)^T y <= max_a (w^j)^T a}` over the compared point set.
pub fn bounding_polytope(
    points: &[DVector<f64>],
    cone: &OrderingCone,
) -> Result<HRep, MetricsError> {
    if points.is_empty() {
        return Err(MetricsError::EmptyPointSet);
    }
    let halfspaces = cone
        .dual_generators()
        .iter()
        .map(|w| {
            let cap = points
                .iter()
                .map(|a| w.dot(a))
                .fold(f64::NEG_INFINITY, f64::max);
            Halfspace::new(-w.clone(), -cap)
        })
        .collect();
    Ok(HRep::new(cone.q(), halfspaces))
}

/// `HV(S, Q) = vol((conv S + C) ∩ Q)`.
pub fn hypervolume(
    points: &[DVector<f64>],
    q_polytope: &HRep,
    cone: &OrderingCone,
) -> Result<f64, MetricsError> {
    if points.is_empty() {
        return Err(MetricsError::EmptyPointSet);
    }
    let region = DoubleDescription::from_generators(&VRep::new(
        cone.q(),
        points.to_vec(),
        cone.primal_generators().to_vec(),
    ))?;
    let clipped = match region.insert_batch(&q_polytope.halfspaces) {
        Ok(dd) => dd,
        // A bounding polytope through the region's boundary can clip the
        // region to a flat set; its volume is zero.
        Err(PolyError::EmptyIntersection) => return Ok(0.0),
        Err(e) => return Err(e.into()),
    };
    if !clipped.vrep().rays.is_empty() {
        return Err(MetricsError::UnboundedRegion);
    }
    Ok(polytope_volume(&clipped)?.value)
}

/// Percentage gap `100 (HV_o - HV_i) / HV_o` between the outer and inner
/// hypervolumes against a shared bounding polytope.
pub fn hv_indicator(
    v_outer: &[DVector<f64>],
    v_inner: &[DVector<f64>],
    q_polytope: &HRep,
    cone: &OrderingCone,
) -> Result<f64, MetricsError> {
    if v_outer.is_empty() || v_inner.is_empty() {
        return Err(MetricsError::EmptyPointSet);
    }
    // Sampled containment: every inner generator lies in the outer region.
    let outer_region = DoubleDescription::from_generators(&VRep::new(
        cone.q(),
        v_outer.to_vec(),
        cone.primal_generators().to_vec(),
    ))?;
    for p in v_inner {
        if !contains(outer_region.hrep(), p, 1e-6 * (1.0 + p.amax()))? {
            return Err(MetricsError::InnerNotContained);
        }
    }
    let hv_o = hypervolume(v_outer, q_polytope, cone)?;
    let hv_i = hypervolume(v_inner, q_polytope, cone)?;
    if hv_o <= 0.0 {
        return Err(MetricsError::ZeroOuterVolume);
    }
    Ok((100.0 * (hv_o - hv_i) / hv_o).clamp(0.0, 100.0))
}

/// Outer approximation induced by a dual solution: `∩_{w in W} H(w, p^w)`.
pub fn primal_outer_from_dual(
    w_bar: &[DualPoint],
    q: usize,
) -> Result<DoubleDescription, MetricsError> {
    if w_bar.is_empty() {
        return Err(MetricsError::EmptyPointSet);
    }
    let hrep = HRep::new(
        q,
        w_bar
            .iter()
            .map(|d| Halfspace::new(d.w.clone(), d.p))
            .collect(),
    );
    enumerate_vertices(&hrep).map_err(MetricsError::Poly)
}

/// Full report for one run against a shared bounding polytope.
pub fn metric_report(
    outer_vertices: &[DVector<f64>],
    inner_points: &[DVector<f64>],
    q_polytope: &HRep,
    problem: &ProblemInstance,
) -> Result<MetricReport, MetricsError> {
    let pe = primal_error(outer_vertices, problem)?;
    let hv_outer = hypervolume(outer_vertices, q_polytope, &problem.cone)?;
    let hv_inner = hypervolume(inner_points, q_polytope, &problem.cone)?;
    let hv_percent = if hv_outer > 0.0 {
        (100.0 * (hv_outer - hv_inner) / hv_outer).clamp(0.0, 100.0)
    } else {
        return Err(MetricsError::ZeroOuterVolume);
    };
    Ok(MetricReport {
        pe: pe.pe,
        hv_outer,
        hv_inner,
        hv_percent,
        pe_complete: pe.complete,
    })
}
