//! Batch experiment orchestration: run algorithm/stopping-rule cells over a
//! list of instances, compute metrics against a per-instance shared bounding
//! polytope, and emit CSV reports.

mod export;
mod gen;

pub use export::{export_run, plot_csv};
pub use gen::gen_instance;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nalgebra::DVector;

use crate::cones::epsilon_to_dual;
use crate::metrics::{bounding_polytope, metric_report, primal_outer_from_dual};
use crate::poly::HRep;
use crate::scalar::ProblemInstance;
use crate::solve::{
    dual_solve, primal_solve, Algorithm, RunArtifacts, SolveError, StoppingRule,
};

/// Fixed CSV column order, mirroring the result tables.
pub const REPORT_HEADER: &str =
    "instance,alg,stop,Opt,T_opt,T_opt_per_Opt,En,T_en,T,X_bar,T_per_X_bar,PE,HV,stop_reason,incomplete";

#[derive(Debug, Clone)]
pub struct RunReport {
    pub instance: String,
    pub alg: String,
    pub stop: String,
    pub opt: usize,
    pub t_opt: f64,
    pub en: usize,
    pub t_en: f64,
    pub t: f64,
    pub x_count: usize,
    pub pe: f64,
    pub hv: f64,
    pub stop_reason: String,
    pub incomplete: bool,
}

impl RunReport {
    pub fn csv_row(&self) -> String {
        let t_opt_per = if self.opt > 0 {
            self.t_opt / self.opt as f64
        } else {
            0.0
        };
        let t_per_x = if self.x_count > 0 {
            self.t / self.x_count as f64
        } else {
            0.0
        };
        format!(
            "{},{},{},{},{:.4},{:.6},{},{:.4},{:.4},{},{:.6},{},{},{},{}",
            self.instance,
            self.alg,
            self.stop,
            self.opt,
            self.t_opt,
            t_opt_per,
            self.en,
            self.t_en,
            self.t,
            self.x_count,
            t_per_x,
            self.pe,
            self.hv,
            self.stop_reason,
            self.incomplete
        )
    }
}

/// How the cells of one instance are derived.
#[derive(Debug, Clone)]
pub enum Protocol {
    /// Independent (algorithm, stopping rule) cells.
    Simple(Vec<(Algorithm, StoppingRule)>),
    /// The four-row pattern: a primal epsilon run, the dual run at the
    /// converted epsilon, a primal rerun at the dual run's realized PE, and
    /// a dual rerun under the primal run's realized time.
    Chained { eps1: f64 },
}

/// Everything one run leaves behind.
pub struct RunBundle {
    pub problem: ProblemInstance,
    pub artifacts: RunArtifacts,
    /// Vertices of the P-space outer approximation.
    pub outer_vertices: Vec<DVector<f64>>,
    /// Generator points of the P-space inner approximation.
    pub inner_points: Vec<DVector<f64>>,
    /// Shared bounding polytope of the instance's batch.
    pub q_polytope: HRep,
    pub report: RunReport,
}

pub struct ExperimentOutcome {
    pub bundles: Vec<RunBundle>,
    pub csv: String,
}

fn solve_cell(
    problem: &ProblemInstance,
    alg: Algorithm,
    stop: &StoppingRule,
) -> Result<RunArtifacts, SolveError> {
    match alg {
        Algorithm::Primal => primal_solve(problem, stop),
        Algorithm::Dual => dual_solve(problem, stop),
    }
}

fn outer_vertices_of(artifacts: &RunArtifacts, q: usize) -> Vec<DVector<f64>> {
    match artifacts.alg {
        Algorithm::Primal => artifacts.outer.vrep().vertices.clone(),
        Algorithm::Dual => primal_outer_from_dual(&artifacts.w_bar, q)
            .map(|dd| dd.vrep().vertices.clone())
            .unwrap_or_default(),
    }
}

fn inner_points_of(artifacts: &RunArtifacts) -> Vec<DVector<f64>> {
    let mut pts: Vec<DVector<f64>> = Vec::new();
    for p in &artifacts.x_bar {
        if !pts.iter().any(|x| (x - &p.fx).amax() <= 1e-12) {
            pts.push(p.fx.clone());
        }
    }
    pts
}

/// All cells of one instance, sequentially (chained rows feed each other).
fn run_instance(problem: &ProblemInstance, protocol: &Protocol) -> Vec<RunBundle> {
    let cells: Vec<(Algorithm, StoppingRule)> = match protocol {
        Protocol::Simple(cells) => cells.clone(),
        Protocol::Chained { eps1 } => {
            let eps2 = epsilon_to_dual(*eps1, &problem.cone, &problem.norm).unwrap_or(*eps1);
            vec![
                (Algorithm::Primal, StoppingRule::epsilon(*eps1)),
                (Algorithm::Dual, StoppingRule::epsilon(eps2)),
            ]
        }
    };
    let mut runs: Vec<(Algorithm, StoppingRule, RunArtifacts)> = Vec::new();
    for (alg, stop) in &cells {
        match solve_cell(problem, *alg, stop) {
            Ok(art) => runs.push((*alg, stop.clone(), art)),
            Err(e) => {
                // Record the failure as an empty, flagged row.
                let report = RunReport {
                    instance: problem.id.clone(),
                    alg: alg.name().into(),
                    stop: stop.describe(),
                    opt: 0,
                    t_opt: 0.0,
                    en: 0,
                    t_en: 0.0,
                    t: 0.0,
                    x_count: 0,
                    pe: f64::NAN,
                    hv: f64::NAN,
                    stop_reason: format!("error:{e}"),
                    incomplete: true,
                };
                runs.push((
                    *alg,
                    stop.clone(),
                    RunArtifacts {
                        alg: *alg,
                        x_bar: vec![],
                        w_bar: vec![],
                        outer: empty_dd(problem.q),
                        counters: Default::default(),
                        stop_reason: crate::solve::StopReason::OracleFailure(report.stop_reason.clone()),
                        incomplete: true,
                        snapshots: vec![],
                        epsilon_used: f64::NAN,
                    },
                ));
            }
        }
    }
    // Chained rows three and four reuse realized values of rows two and one.
    if let Protocol::Chained { .. } = protocol {
        if runs.len() == 2 {
            let q = problem.q;
            let dual_outer = outer_vertices_of(&runs[1].2, q);
            let pe2 = crate::metrics::primal_error(&dual_outer, problem)
                .map(|r| r.pe)
                .unwrap_or(f64::NAN);
            if pe2.is_finite() && pe2 > 0.0 {
                let stop = StoppingRule::epsilon(pe2);
                if let Ok(art) = solve_cell(problem, Algorithm::Primal, &stop) {
                    runs.push((Algorithm::Primal, stop, art));
                }
            }
            let t1 = runs[0].2.counters.t;
            if t1 > 0.0 {
                let stop = StoppingRule::time_limit(t1);
                if let Ok(art) = solve_cell(problem, Algorithm::Dual, &stop) {
                    runs.push((Algorithm::Dual, stop, art));
                }
            }
        }
    }

    // Shared bounding polytope over every approximation of this instance.
    let q = problem.q;
    let mut all_points: Vec<DVector<f64>> = Vec::new();
    let mut per_run: Vec<(Vec<DVector<f64>>, Vec<DVector<f64>>)> = Vec::new();
    for (_, _, art) in &runs {
        let outer = outer_vertices_of(art, q);
        let inner = inner_points_of(art);
        all_points.extend(outer.iter().cloned());
        all_points.extend(inner.iter().cloned());
        per_run.push((outer, inner));
    }
    let q_polytope = bounding_polytope(&all_points, &problem.cone)
        .unwrap_or_else(|_| HRep::new(q, vec![]));

    runs.into_iter()
        .zip(per_run)
        .map(|((alg, stop, art), (outer, inner))| {
            let (pe, hv) = if outer.is_empty() || inner.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                match metric_report(&outer, &inner, &q_polytope, problem) {
                    Ok(m) => (m.pe, m.hv_percent),
                    Err(_) => (f64::NAN, f64::NAN),
                }
            };
            let report = RunReport {
                instance: problem.id.clone(),
                alg: alg.name().into(),
                stop: stop.describe(),
                opt: art.counters.opt,
                t_opt: art.counters.t_opt,
                en: art.counters.en,
                t_en: art.counters.t_en,
                t: art.counters.t,
                x_count: art.x_bar.len(),
                pe,
                hv,
                stop_reason: art.stop_reason.as_str().into(),
                incomplete: art.incomplete,
            };
            RunBundle {
                problem: problem.clone(),
                artifacts: art,
                outer_vertices: outer,
                inner_points: inner,
                q_polytope: q_polytope.clone(),
                report,
            }
        })
        .collect()
}

fn empty_dd(q: usize) -> crate::poly::DoubleDescription {
    use crate::poly::{DoubleDescription, Halfspace};
    let hrep = HRep::new(
        q,
        (0..q)
            .map(|j| {
                let mut e = DVector::zeros(q);
                e[j] = 1.0;
                Halfspace::new(e, 0.0)
            })
            .collect(),
    );
    DoubleDescription::from_hrep(&hrep).expect("orthant")
}

/// Execute the protocol over every instance, `workers` instances at a time.
/// Row order follows the input instance order and the protocol's cell order
/// regardless of completion order.
pub fn run_experiment(
    problems: &[ProblemInstance],
    protocol: &Protocol,
    workers: usize,
) -> ExperimentOutcome {
    let workers = workers.max(1).min(problems.len().max(1));
    let results: Mutex<Vec<Option<Vec<RunBundle>>>> =
        Mutex::new((0..problems.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= problems.len() {
                    break;
                }
                let bundles = run_instance(&problems[i], protocol);
                results.lock().unwrap()[i] = Some(bundles);
            });
        }
    });
    let mut bundles = Vec::new();
    for slot in results.into_inner().unwrap() {
        bundles.extend(slot.expect("worker finished"));
    }
    let mut csv = String::from(REPORT_HEADER);
    csv.push('\n');
    for b in &bundles {
        csv.push_str(&b.report.csv_row());
        csv.push('\n');
    }
    ExperimentOutcome { bundles, csv }
}

/// Worker cap from the environment, defaulting to the machine parallelism.
pub fn worker_count() -> usize {
    if let Ok(s) = std::env::var("CVOP_WORKERS") {
        if let Ok(n) = s.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
