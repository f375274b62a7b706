//! Primal outer approximation of the upper image.

use std::time::Instant;

use nalgebra::DVector;

use super::{
    Algorithm, Counters, DualPoint, IterationSnapshot, RunArtifacts, SeenSet, SolutionPoint,
    SolveError, StopReason, StoppingRule, MAX_ITERATIONS,
};
use crate::cones::normalize_dual;
use crate::poly::{DoubleDescription, HRep, Halfspace, PolyError};
use crate::scalar::{ps_solve, ws_solve, ProblemInstance, ScalarError};
use crate::tol;

pub struct PrimalState {
    pub outer: DoubleDescription,
    pub x_bar: Vec<SolutionPoint>,
    pub w_bar: Vec<DualPoint>,
    pub counters: Counters,
    v_known: SeenSet,
    w_keys: SeenSet,
    x_keys: SeenSet,
}

/// Solve WS for every dual-cone generator and intersect the supporting
/// halfspaces into the initial outer approximation.
pub fn primal_init(problem: &ProblemInstance) -> Result<PrimalState, SolveError> {
    let mut counters = Counters::default();
    let mut x_bar = Vec::new();
    let mut w_bar = Vec::new();
    let mut x_keys = SeenSet::new();
    let mut w_keys = SeenSet::new();
    let mut halfspaces = Vec::new();
    for w in problem.cone.dual_generators() {
        let t0 = Instant::now();
        let ws = ws_solve(problem, w)?;
        counters.opt += 1;
        counters.t_opt += t0.elapsed().as_secs_f64();
        halfspaces.push(Halfspace::new(w.clone(), ws.p));
        let fx = problem.objective(&ws.x);
        if !x_keys.contains(&ws.x) {
            x_keys.insert(&ws.x);
            x_bar.push(SolutionPoint { x: ws.x, fx });
        }
        if !w_keys.contains(w) {
            w_keys.insert(w);
            w_bar.push(DualPoint {
                w: w.clone(),
                p: ws.p,
            });
        }
    }
    let t0 = Instant::now();
    let outer = DoubleDescription::from_hrep(&HRep::new(problem.q, halfspaces)).map_err(
        |e| match e {
            PolyError::NotLineFree => SolveError::UnboundedInit,
            other => SolveError::Poly(other),
        },
    )?;
    counters.en += 1;
    counters.t_en += t0.elapsed().as_secs_f64();
    Ok(PrimalState {
        outer,
        x_bar,
        w_bar,
        counters,
        v_known: SeenSet::new(),
        w_keys,
        x_keys,
    })
}

/// Run the primal algorithm to the stopping rule.
pub fn primal_solve(
    problem: &ProblemInstance,
    stop: &StoppingRule,
) -> Result<RunArtifacts, SolveError> {
    let wall = Instant::now();
    let mut state = primal_init(problem)?;
    let eps_cut = stop.cut_threshold();
    let break_variant = stop.break_variant();
    let mut snapshots: Vec<IterationSnapshot> = Vec::new();
    let stop_reason;
    let mut incomplete = false;
    let mut iter = 0usize;

    'outer: loop {
        if let Some(budget) = stop.time_budget() {
            if wall.elapsed().as_secs_f64() >= budget {
                stop_reason = StopReason::Time;
                break;
            }
        }
        if iter >= MAX_ITERATIONS {
            stop_reason = StopReason::IterationCap;
            incomplete = true;
            break;
        }

        let vertices: Vec<DVector<f64>> = state.outer.vrep().vertices.clone();
        let mut cuts: Vec<Halfspace> = Vec::new();
        let mut max_violation = 0.0f64;
        for v in &vertices {
            if state.v_known.contains(v) {
                continue;
            }
            let t0 = Instant::now();
            let ps = match ps_solve(problem, v) {
                Ok(ps) => ps,
                Err(e @ ScalarError::ConvergenceFailure { .. })
                | Err(e @ ScalarError::OracleFailure(_)) => {
                    state.counters.t_opt += t0.elapsed().as_secs_f64();
                    stop_reason = StopReason::OracleFailure(e.to_string());
                    incomplete = true;
                    snapshots.push(IterationSnapshot {
                        iter,
                        max_violation,
                        x_count: state.x_bar.len(),
                        w_count: state.w_bar.len(),
                        outer_vertices: Some(vertices.clone()),
                        cuts: cuts.clone(),
                    });
                    break 'outer;
                }
                Err(e) => return Err(e.into()),
            };
            state.counters.opt += 1;
            state.counters.t_opt += t0.elapsed().as_secs_f64();
            state.v_known.insert(v);

            let fx = problem.objective(&ps.x);
            if !state.x_keys.contains(&ps.x) {
                state.x_keys.insert(&ps.x);
                state.x_bar.push(SolutionPoint {
                    x: ps.x.clone(),
                    fx: fx.clone(),
                });
            }
            // A numerically interior reference point yields no usable
            // direction; the vertex is within tolerance by definition.
            let w_norm = problem.norm.dual(&ps.w).unwrap_or(0.0);
            if ps.interior || w_norm <= tol::TINY {
                continue;
            }
            let wn = normalize_dual(&ps.w, &problem.norm).map_err(ScalarError::Cone)?;
            let p_wn = wn.dot(&fx);
            if !state.w_keys.contains(&wn) {
                state.w_keys.insert(&wn);
                state.w_bar.push(DualPoint {
                    w: wn.clone(),
                    p: p_wn,
                });
            }
            if ps.value > eps_cut {
                max_violation = max_violation.max(ps.value);
                cuts.push(Halfspace::new(wn, p_wn));
                if break_variant {
                    break;
                }
            }
        }

        snapshots.push(IterationSnapshot {
            iter,
            max_violation,
            x_count: state.x_bar.len(),
            w_count: state.w_bar.len(),
            outer_vertices: Some(vertices),
            cuts: cuts.clone(),
        });

        if cuts.is_empty() {
            stop_reason = StopReason::Epsilon;
            break;
        }
        let t0 = Instant::now();
        let mut next = state.outer.insert_batch(&cuts)?;
        next.prune_redundant();
        state.counters.en += 1;
        state.counters.t_en += t0.elapsed().as_secs_f64();
        state.outer = next;
        iter += 1;
    }

    state.counters.t = wall.elapsed().as_secs_f64();
    Ok(RunArtifacts {
        alg: Algorithm::Primal,
        x_bar: state.x_bar,
        w_bar: state.w_bar,
        outer: state.outer,
        counters: state.counters,
        stop_reason,
        incomplete,
        snapshots,
        epsilon_used: eps_cut,
    })
}
