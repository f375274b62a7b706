//! Inner approximations generated by the returned solution sets.

use nalgebra::DVector;

use super::{DualPoint, SolutionPoint, SolveError};
use crate::cones::OrderingCone;
use crate::poly::{cone_from_generators, DoubleDescription, VRep};

/// `conv f(X̄) + C` as generators.
pub fn primal_inner(x_bar: &[SolutionPoint], cone: &OrderingCone) -> Result<VRep, SolveError> {
    if x_bar.is_empty() {
        return Err(SolveError::EmptySolutionSet);
    }
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    for p in x_bar {
        if !vertices.iter().any(|v| (v - &p.fx).amax() <= 1e-12) {
            vertices.push(p.fx.clone());
        }
    }
    Ok(VRep::new(
        cone.q(),
        vertices,
        cone.primal_generators().to_vec(),
    ))
}

/// `cone conv xi(W̄) - K` as a full double description in `R^{q+1}`.
pub fn dual_inner(w_bar: &[DualPoint]) -> Result<DoubleDescription, SolveError> {
    if w_bar.is_empty() {
        return Err(SolveError::EmptySolutionSet);
    }
    let q = w_bar[0].w.len();
    let mut gens: Vec<DVector<f64>> = w_bar
        .iter()
        .map(|d| DVector::from_fn(q + 1, |i, _| if i < q { d.w[i] } else { d.p }))
        .collect();
    let mut down = DVector::zeros(q + 1);
    down[q] = -1.0;
    gens.push(down);
    cone_from_generators(&gens, q + 1).map_err(SolveError::Poly)
}
