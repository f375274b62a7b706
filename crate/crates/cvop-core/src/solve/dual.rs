//! Dual outer approximation of the lower image, a cone in `R^{q+1}`.

use std::time::Instant;

use nalgebra::DVector;

use super::{
    Algorithm, Counters, DualPoint, IterationSnapshot, RunArtifacts, SeenSet, SolutionPoint,
    SolveError, StopReason, StoppingRule, MAX_ITERATIONS,
};
use crate::cones::normalize_dual;
use crate::poly::{DoubleDescription, HRep, Halfspace, PolyError};
use crate::scalar::{ws_solve, ProblemInstance, ScalarError};
use crate::tol;

pub struct DualState {
    pub outer: DoubleDescription,
    pub x_bar: Vec<SolutionPoint>,
    pub w_bar: Vec<DualPoint>,
    pub counters: Counters,
    d_known: SeenSet,
    w_keys: SeenSet,
    x_keys: SeenSet,
}

fn lift(y: &DVector<f64>, last: f64) -> DVector<f64> {
    let q = y.len();
    DVector::from_fn(q + 1, |i, _| if i < q { y[i] } else { last })
}

/// Supporting halfspace `H*(fx)` of the lower image in `R^{q+1}`.
fn support_halfspace(fx: &DVector<f64>) -> Halfspace {
    Halfspace::new(lift(fx, -1.0), 0.0)
}

/// Initialize with the averaged weight `w^0` and `D_0 = H*(f(x^0)) ∩ (C+ x R)`.
pub fn dual_init(problem: &ProblemInstance) -> Result<DualState, SolveError> {
    let mut counters = Counters::default();
    let mut sum = DVector::zeros(problem.q);
    for w in problem.cone.dual_generators() {
        sum += w;
    }
    let w0 = normalize_dual(&sum, &problem.norm).map_err(ScalarError::Cone)?;
    let t0 = Instant::now();
    let ws = ws_solve(problem, &w0)?;
    counters.opt += 1;
    counters.t_opt += t0.elapsed().as_secs_f64();
    let fx = problem.objective(&ws.x);

    let mut halfspaces = vec![support_halfspace(&fx)];
    for g in problem.cone.primal_generators() {
        halfspaces.push(Halfspace::new(lift(g, 0.0), 0.0));
    }
    let t0 = Instant::now();
    let outer = DoubleDescription::from_hrep(&HRep::new(problem.q + 1, halfspaces)).map_err(
        |e| match e {
            PolyError::NotLineFree => SolveError::NotPointedDual,
            other => SolveError::Poly(other),
        },
    )?;
    counters.en += 1;
    counters.t_en += t0.elapsed().as_secs_f64();

    let mut x_keys = SeenSet::new();
    let mut w_keys = SeenSet::new();
    x_keys.insert(&ws.x);
    w_keys.insert(&w0);
    Ok(DualState {
        outer,
        x_bar: vec![SolutionPoint { x: ws.x, fx }],
        w_bar: vec![DualPoint { w: w0, p: ws.p }],
        counters,
        d_known: SeenSet::new(),
        w_keys,
        x_keys,
    })
}

/// Run the dual algorithm to the stopping rule.
pub fn dual_solve(
    problem: &ProblemInstance,
    stop: &StoppingRule,
) -> Result<RunArtifacts, SolveError> {
    let wall = Instant::now();
    let mut state = dual_init(problem)?;
    let eps_cut = stop.cut_threshold();
    let break_variant = stop.break_variant();
    let q = problem.q;
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

        let dirs: Vec<DVector<f64>> = state.outer.vrep().rays.clone();
        let mut cuts: Vec<Halfspace> = Vec::new();
        let mut max_violation = 0.0f64;
        for dir in &dirs {
            let w = DVector::from_fn(q, |i, _| dir[i]);
            // Directions in {0} x R (the downward ray) carry no weight.
            let wn_val = match problem.norm.dual(&w) {
                Ok(v) if v > tol::TINY => v,
                _ => continue,
            };
            let scaled = dir / wn_val;
            if state.d_known.contains(&scaled) {
                continue;
            }
            let w = DVector::from_fn(q, |i, _| scaled[i]);
            let alpha = scaled[q];

            let t0 = Instant::now();
            let ws = match ws_solve(problem, &w) {
                Ok(ws) => ws,
                Err(e @ ScalarError::OracleFailure(_))
                | Err(e @ ScalarError::ConvergenceFailure { .. }) => {
                    state.counters.t_opt += t0.elapsed().as_secs_f64();
                    stop_reason = StopReason::OracleFailure(e.to_string());
                    incomplete = true;
                    snapshots.push(IterationSnapshot {
                        iter,
                        max_violation,
                        x_count: state.x_bar.len(),
                        w_count: state.w_bar.len(),
                        outer_vertices: None,
                        cuts: cuts.clone(),
                    });
                    break 'outer;
                }
                Err(e) => return Err(e.into()),
            };
            state.counters.opt += 1;
            state.counters.t_opt += t0.elapsed().as_secs_f64();
            state.d_known.insert(&scaled);

            let fx = problem.objective(&ws.x);
            if !state.x_keys.contains(&ws.x) {
                state.x_keys.insert(&ws.x);
                state.x_bar.push(SolutionPoint {
                    x: ws.x.clone(),
                    fx: fx.clone(),
                });
            }
            if !state.w_keys.contains(&w) {
                state.w_keys.insert(&w);
                state.w_bar.push(DualPoint { w, p: ws.p });
            }
            let violation = alpha - ws.p;
            if violation > eps_cut {
                max_violation = max_violation.max(violation);
                cuts.push(support_halfspace(&fx));
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
            outer_vertices: None,
            cuts: cuts.clone(),
        });

        if cuts.is_empty() {
            stop_reason = StopReason::Epsilon;
            break;
        }
        let t0 = Instant::now();
        let next = state.outer.insert_batch(&cuts).map_err(|e| match e {
            PolyError::NotLineFree => SolveError::NotPointedDual,
            other => SolveError::Poly(other),
        })?;
        let mut next = next;
        next.prune_redundant();
        state.counters.en += 1;
        state.counters.t_en += t0.elapsed().as_secs_f64();
        state.outer = next;
        iter += 1;
    }

    state.counters.t = wall.elapsed().as_secs_f64();
    Ok(RunArtifacts {
        alg: Algorithm::Dual,
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
