//! Scalarization oracles: the weighted-sum problem WS(w) and the
//! norm-minimizing problem P(v) with its Lagrangian dual D(v).
//!
//! Three benchmark families ship with closed-form or near-closed-form WS
//! solvers; arbitrary problems plug in through [`ExternalOracle`].

mod io;
mod ps;

pub use io::{instance_from_json, instance_to_json};
pub use ps::{cone_min_shift, project_dual_ball, ps_solve};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::cones::{ConeError, NormSpec, OrderingCone};
use crate::poly::HRep;
use crate::tol;

#[derive(Debug, Clone)]
pub enum ScalarError {
    NotInDualCone,
    SingularData,
    OracleFailure(String),
    ConvergenceFailure {
        value: f64,
        gap: f64,
        iterations: usize,
    },
    NonConvergence,
    Cone(ConeError),
    BadInstance(String),
}

impl std::fmt::Display for ScalarError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarError::NotInDualCone => write!(f, "weight vector outside the dual cone"),
            ScalarError::SingularData => write!(f, "constraint matrix is not positive definite"),
            ScalarError::OracleFailure(s) => write!(f, "external oracle failed: {s}"),
            ScalarError::ConvergenceFailure {
                value,
                gap,
                iterations,
            } => write!(
                f,
                "scalarization stalled after {iterations} iterations (value {value:.3e}, gap {gap:.3e})"
            ),
            ScalarError::NonConvergence => write!(f, "alternating projections did not converge"),
            ScalarError::Cone(e) => write!(f, "{e}"),
            ScalarError::BadInstance(s) => write!(f, "bad instance: {s}"),
        }
    }
}

impl std::error::Error for ScalarError {}

impl From<ConeError> for ScalarError {
    fn from(e: ConeError) -> Self {
        ScalarError::Cone(e)
    }
}

/// User-registered problem. `ws` must return a minimizer and the optimal
/// value of `min w^T f(x)`; `ps` may override the built-in dual ascent.
/// Implementations must declare whether concurrent calls are safe.
pub trait ExternalOracle: Send + Sync {
    fn ws(&self, w: &DVector<f64>) -> Result<(DVector<f64>, f64), String>;
    fn objective(&self, x: &DVector<f64>) -> DVector<f64>;
    fn ps(&self, _v: &DVector<f64>) -> Option<Result<PSResult, String>> {
        None
    }
    fn reentrant(&self) -> bool {
        true
    }
}

#[derive(Clone)]
pub enum Family {
    /// `f(x) = A^T x` over the ellipsoid `x^T P x <= 1`.
    Ellipsoid { a: DMatrix<f64>, p: DMatrix<f64> },
    /// `f(x) = x` over the unit ball around `center`.
    Ball { center: DVector<f64> },
    /// `f_i(x) = ||x - a^i||^2` over a bounded polytope.
    QuadraticBox {
        anchors: Vec<DVector<f64>>,
        polytope: HRep,
    },
    External(Arc<dyn ExternalOracle>),
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Ellipsoid { a, .. } => write!(f, "Ellipsoid(n={})", a.nrows()),
            Family::Ball { center } => write!(f, "Ball(q={})", center.len()),
            Family::QuadraticBox { anchors, .. } => {
                write!(f, "QuadraticBox(anchors={})", anchors.len())
            }
            Family::External(_) => write!(f, "External"),
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ellipsoid { .. } => "ellipsoid",
            Family::Ball { .. } => "ball",
            Family::QuadraticBox { .. } => "quadratic_box",
            Family::External(_) => "external",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub id: String,
    pub family: Family,
    pub q: usize,
    pub n: usize,
    pub cone: OrderingCone,
    pub norm: NormSpec,
    pub seed: Option<u64>,
    /// `P^{-1} A`, cached for the ellipsoid family.
    p_inv_a: Option<DMatrix<f64>>,
    /// `A^T P^{-1} A`.
    gram: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct WSResult {
    pub w: DVector<f64>,
    pub x: DVector<f64>,
    pub p: f64,
}

#[derive(Debug, Clone)]
pub struct PSResult {
    pub v: DVector<f64>,
    pub x: DVector<f64>,
    pub z: DVector<f64>,
    pub w: DVector<f64>,
    pub value: f64,
    /// Set when `v` lies (numerically) in the interior of the upper image;
    /// `w` then carries no supporting hyperplane.
    pub interior: bool,
}

impl ProblemInstance {
    pub fn ellipsoid(
        id: impl Into<String>,
        a: DMatrix<f64>,
        p: DMatrix<f64>,
        cone: OrderingCone,
        norm: NormSpec,
        seed: Option<u64>,
    ) -> Result<ProblemInstance, ScalarError> {
        let n = a.nrows();
        let q = a.ncols();
        if p.nrows() != n || p.ncols() != n {
            return Err(ScalarError::BadInstance("P must be n x n".into()));
        }
        if cone.q() != q {
            return Err(ScalarError::BadInstance("cone dimension != q".into()));
        }
        let chol = p
            .clone()
            .cholesky()
            .ok_or(ScalarError::SingularData)?;
        let p_inv_a = chol.solve(&a);
        let gram = a.transpose() * &p_inv_a;
        Ok(ProblemInstance {
            id: id.into(),
            family: Family::Ellipsoid { a, p },
            q,
            n,
            cone,
            norm,
            seed,
            p_inv_a: Some(p_inv_a),
            gram: Some(gram),
        })
    }

    /// The unit-ball instance with `f(x) = x`; `center` defaults to all ones.
    pub fn ball(
        id: impl Into<String>,
        q: usize,
        cone: OrderingCone,
        norm: NormSpec,
    ) -> Result<ProblemInstance, ScalarError> {
        if cone.q() != q {
            return Err(ScalarError::BadInstance("cone dimension != q".into()));
        }
        Ok(ProblemInstance {
            id: id.into(),
            family: Family::Ball {
                center: DVector::from_element(q, 1.0),
            },
            q,
            n: q,
            cone,
            norm,
            seed: None,
            p_inv_a: None,
            gram: None,
        })
    }

    /// The three-anchor quadratic objective over its fixed polytope.
    pub fn quadratic_box(
        id: impl Into<String>,
        cone: OrderingCone,
        norm: NormSpec,
    ) -> Result<ProblemInstance, ScalarError> {
        use crate::poly::Halfspace;
        if cone.q() != 3 {
            return Err(ScalarError::BadInstance(
                "quadratic_box has three objectives".into(),
            ));
        }
        let anchors = vec![
            DVector::from_column_slice(&[1.0, 1.0]),
            DVector::from_column_slice(&[2.0, 3.0]),
            DVector::from_column_slice(&[4.0, 2.0]),
        ];
        let hs = |n: &[f64], c: f64| Halfspace::new(DVector::from_column_slice(n), c);
        let polytope = HRep::new(
            2,
            vec![
                hs(&[-1.0, -2.0], -10.0),
                hs(&[1.0, 0.0], 0.0),
                hs(&[-1.0, 0.0], -10.0),
                hs(&[0.0, 1.0], 0.0),
                hs(&[0.0, -1.0], -4.0),
            ],
        );
        Ok(ProblemInstance {
            id: id.into(),
            family: Family::QuadraticBox { anchors, polytope },
            q: 3,
            n: 2,
            cone,
            norm,
            seed: None,
            p_inv_a: None,
            gram: None,
        })
    }

    pub fn external(
        id: impl Into<String>,
        oracle: Arc<dyn ExternalOracle>,
        q: usize,
        n: usize,
        cone: OrderingCone,
        norm: NormSpec,
    ) -> Result<ProblemInstance, ScalarError> {
        if cone.q() != q {
            return Err(ScalarError::BadInstance("cone dimension != q".into()));
        }
        Ok(ProblemInstance {
            id: id.into(),
            family: Family::External(oracle),
            q,
            n,
            cone,
            norm,
            seed: None,
            p_inv_a: None,
            gram: None,
        })
    }

    pub fn objective(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.family {
            Family::Ellipsoid { a, .. } => a.transpose() * x,
            Family::Ball { .. } => x.clone(),
            Family::QuadraticBox { anchors, .. } => {
                DVector::from_fn(anchors.len(), |i, _| (x - &anchors[i]).norm_squared())
            }
            Family::External(o) => o.objective(x),
        }
    }

    pub fn is_feasible(&self, x: &DVector<f64>, tol_: f64) -> bool {
        match &self.family {
            Family::Ellipsoid { p, .. } => (x.transpose() * p * x)[(0, 0)] <= 1.0 + tol_,
            Family::Ball { center } => (x - center).norm() <= 1.0 + tol_,
            Family::QuadraticBox { polytope, .. } => {
                crate::poly::contains(polytope, x, tol_).unwrap_or(false)
            }
            Family::External(_) => true,
        }
    }
}

/// Minimize `w^T f(x)` over the feasible set.
pub fn ws_solve(problem: &ProblemInstance, w: &DVector<f64>) -> Result<WSResult, ScalarError> {
    if w.len() != problem.q {
        return Err(ScalarError::BadInstance("weight dimension".into()));
    }
    let wn = w.norm();
    if wn <= tol::TINY || !problem.cone.dual_contains(w, 1e-6 * wn.max(1.0)) {
        return Err(ScalarError::NotInDualCone);
    }
    let (x, p) = match &problem.family {
        Family::Ellipsoid { .. } => {
            let gram = problem.gram.as_ref().unwrap();
            let p_inv_a = problem.p_inv_a.as_ref().unwrap();
            let t = (w.transpose() * gram * w)[(0, 0)].max(0.0);
            let root = t.sqrt();
            if root <= tol::TINY {
                (DVector::zeros(problem.n), 0.0)
            } else {
                let x = -(p_inv_a * w) / root;
                (x, -root)
            }
        }
        Family::Ball { center } => {
            let x = center - w / wn;
            (x, w.dot(center) - wn)
        }
        Family::QuadraticBox { anchors, polytope } => quadratic_box_ws(w, anchors, polytope)?,
        Family::External(o) => o.ws(w).map_err(ScalarError::OracleFailure)?,
    };
    // The optimal value is reported as w^T f(x) so the pair stays consistent
    // to machine precision.
    let p_check = w.dot(&problem.objective(&x));
    if (p_check - p).abs() > 1e-6 * (1.0 + p.abs()) {
        return Err(ScalarError::OracleFailure(format!(
            "reported value {p} disagrees with w^T f(x) = {p_check}"
        )));
    }
    Ok(WSResult {
        w: w.clone(),
        x,
        p: p_check,
    })
}

/// Projected gradient with Dykstra projections onto the polytope.
fn quadratic_box_ws(
    w: &DVector<f64>,
    anchors: &[DVector<f64>],
    polytope: &HRep,
) -> Result<(DVector<f64>, f64), ScalarError> {
    let wsum: f64 = w.iter().sum();
    let dim = polytope.dim;
    let weighted_anchor = {
        let mut s = DVector::zeros(dim);
        for (wi, a) in w.iter().zip(anchors) {
            s.axpy(*wi, a, 1.0);
        }
        s / wsum.max(tol::TINY)
    };
    let value = |x: &DVector<f64>| -> f64 {
        w.iter()
            .zip(anchors)
            .map(|(wi, a)| wi * (x - a).norm_squared())
            .sum()
    };
    if wsum <= tol::TINY {
        let x = project_polytope(&weighted_anchor, polytope)?;
        return Ok((x.clone(), value(&x)));
    }
    if crate::poly::contains(polytope, &weighted_anchor, tol::FEAS).unwrap_or(false) {
        return Ok((weighted_anchor.clone(), value(&weighted_anchor)));
    }
    let lip = 2.0 * wsum;
    let mut x = project_polytope(&weighted_anchor, polytope)?;
    for _ in 0..100_000 {
        // grad = 2 sum w_i (x - a_i) = 2 wsum (x - weighted_anchor)
        let grad = (&x - &weighted_anchor) * lip;
        let step = project_polytope(&(&x - &grad / lip), polytope)?;
        let movement = (&step - &x).norm();
        x = step;
        if movement <= 1e-9 {
            break;
        }
    }
    let p = value(&x);
    Ok((x, p))
}

/// Euclidean projection onto an H-polytope by Dykstra over the halfspaces.
pub(crate) fn project_polytope(
    y: &DVector<f64>,
    hrep: &HRep,
) -> Result<DVector<f64>, ScalarError> {
    let m = hrep.halfspaces.len();
    let mut x = y.clone();
    let mut corrections: Vec<DVector<f64>> = vec![DVector::zeros(hrep.dim); m];
    for _ in 0..10_000 {
        let mut moved = 0.0;
        for (i, h) in hrep.halfspaces.iter().enumerate() {
            let z = &x + &corrections[i];
            let nn = h.normal.norm_squared();
            let slack = h.normal.dot(&z) - h.offset;
            let proj = if nn <= tol::TINY || slack >= 0.0 {
                z.clone()
            } else {
                &z - &h.normal * (slack / nn)
            };
            corrections[i] = &z - &proj;
            moved += (&proj - &x).norm();
            x = proj;
        }
        if moved <= 1e-13 {
            return Ok(x);
        }
    }
    // Accept the iterate when it is feasible to tolerance.
    if crate::poly::contains(hrep, &x, tol::FEAS * 10.0).unwrap_or(false) {
        Ok(x)
    } else {
        Err(ScalarError::NonConvergence)
    }
}

#[cfg(test)]
mod tests;
