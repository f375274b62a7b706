//! The primal and dual outer-approximation algorithms.
//!
//! Both iterate the same loop shape: enumerate the frontier of the current
//! outer approximation (vertices of `P_k`, extreme directions of `D_k`),
//! query a scalarization oracle at every element not seen before, collect
//! supporting halfspaces of the elements further than the tolerance, and cut.
//! Termination: no halfspace collected (epsilon rule), a time budget checked
//! at the head of the loop, or the iteration safety cap.

mod dual;
mod inner;
mod primal;

pub use dual::{dual_init, dual_solve};
pub use inner::{dual_inner, primal_inner};
pub use primal::{primal_init, primal_solve};

use nalgebra::DVector;

use crate::poly::{DoubleDescription, PolyError};
use crate::scalar::ScalarError;

/// Cut threshold used when the stopping rule carries no epsilon: just above
/// the scalarization gap tolerance, so solver noise never triggers a cut.
pub(crate) const TIME_RULE_CUT: f64 = 1e-6;

/// Safety net for numerical stalls.
pub(crate) const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum StoppingRule {
    Epsilon { epsilon: f64, break_variant: bool },
    TimeLimit { seconds: f64, break_variant: bool },
}

impl StoppingRule {
    pub fn epsilon(epsilon: f64) -> Self {
        StoppingRule::Epsilon {
            epsilon,
            break_variant: false,
        }
    }

    pub fn time_limit(seconds: f64) -> Self {
        StoppingRule::TimeLimit {
            seconds,
            break_variant: false,
        }
    }

    pub fn with_break(mut self, flag: bool) -> Self {
        match &mut self {
            StoppingRule::Epsilon { break_variant, .. }
            | StoppingRule::TimeLimit { break_variant, .. } => *break_variant = flag,
        }
        self
    }

    pub(crate) fn cut_threshold(&self) -> f64 {
        match self {
            StoppingRule::Epsilon { epsilon, .. } => *epsilon,
            StoppingRule::TimeLimit { .. } => TIME_RULE_CUT,
        }
    }

    pub(crate) fn break_variant(&self) -> bool {
        match self {
            StoppingRule::Epsilon { break_variant, .. }
            | StoppingRule::TimeLimit { break_variant, .. } => *break_variant,
        }
    }

    pub(crate) fn time_budget(&self) -> Option<f64> {
        match self {
            StoppingRule::TimeLimit { seconds, .. } => Some(*seconds),
            StoppingRule::Epsilon { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            StoppingRule::Epsilon {
                epsilon,
                break_variant,
            } => {
                if *break_variant {
                    format!("eps={epsilon}(break)")
                } else {
                    format!("eps={epsilon}")
                }
            }
            StoppingRule::TimeLimit {
                seconds,
                break_variant,
            } => {
                if *break_variant {
                    format!("time={seconds}(break)")
                } else {
                    format!("time={seconds}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Primal,
    Dual,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Primal => "primal",
            Algorithm::Dual => "dual",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    Epsilon,
    Time,
    IterationCap,
    OracleFailure(String),
}

impl StopReason {
    pub fn as_str(&self) -> &str {
        match self {
            StopReason::Epsilon => "eps",
            StopReason::Time => "time",
            StopReason::IterationCap => "iter_cap",
            StopReason::OracleFailure(_) => "oracle_failure",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Counters {
    /// Scalarization problems solved.
    pub opt: usize,
    pub t_opt: f64,
    /// Vertex/direction enumeration passes.
    pub en: usize,
    pub t_en: f64,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct SolutionPoint {
    pub x: DVector<f64>,
    pub fx: DVector<f64>,
}

/// Normalized dual vector with its weighted-sum value witness.
#[derive(Debug, Clone)]
pub struct DualPoint {
    pub w: DVector<f64>,
    pub p: f64,
}

/// Per-iteration trace used for plot exports.
#[derive(Debug, Clone)]
pub struct IterationSnapshot {
    pub iter: usize,
    pub max_violation: f64,
    pub x_count: usize,
    pub w_count: usize,
    /// Vertices of the outer approximation at this pass (primal runs).
    pub outer_vertices: Option<Vec<DVector<f64>>>,
    /// Supporting halfspaces collected during the pass.
    pub cuts: Vec<crate::poly::Halfspace>,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub alg: Algorithm,
    pub x_bar: Vec<SolutionPoint>,
    pub w_bar: Vec<DualPoint>,
    /// Final `P_k` (primal) or `D_k` in `R^{q+1}` (dual).
    pub outer: DoubleDescription,
    pub counters: Counters,
    pub stop_reason: StopReason,
    pub incomplete: bool,
    pub snapshots: Vec<IterationSnapshot>,
    /// Cut threshold the run used.
    pub epsilon_used: f64,
}

#[derive(Debug)]
pub enum SolveError {
    UnboundedInit,
    NotPointedDual,
    EmptySolutionSet,
    Scalar(ScalarError),
    Poly(PolyError),
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::UnboundedInit => write!(f, "initial approximation contains a line"),
            SolveError::NotPointedDual => write!(f, "dual approximation lost pointedness"),
            SolveError::EmptySolutionSet => write!(f, "empty solution set"),
            SolveError::Scalar(e) => write!(f, "{e}"),
            SolveError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<ScalarError> for SolveError {
    fn from(e: ScalarError) -> Self {
        SolveError::Scalar(e)
    }
}

impl From<PolyError> for SolveError {
    fn from(e: PolyError) -> Self {
        SolveError::Poly(e)
    }
}

/// Key for matching points that reappear across iterations with tiny
/// perturbations: the coordinates rounded to 12 decimal digits, backed by an
/// exact recheck against the stored originals.
pub(crate) struct SeenSet {
    keys: std::collections::BTreeSet<String>,
    points: Vec<DVector<f64>>,
}

impl SeenSet {
    pub fn new() -> Self {
        SeenSet {
            keys: std::collections::BTreeSet::new(),
            points: Vec::new(),
        }
    }

    fn key(p: &DVector<f64>) -> String {
        let mut s = String::new();
        for x in p.iter() {
            // Round half-away ties stably; -0 collapses to 0.
            let r = (x * 1e12).round() / 1e12;
            let r = if r == 0.0 { 0.0 } else { r };
            s.push_str(&format!("{r:.12};"));
        }
        s
    }

    pub fn contains(&self, p: &DVector<f64>) -> bool {
        self.keys.contains(&Self::key(p))
            || self.points.iter().any(|q| (q - p).amax() <= 1e-9)
    }

    pub fn insert(&mut self, p: &DVector<f64>) {
        if !self.contains(p) {
            self.keys.insert(Self::key(p));
            self.points.push(p.clone());
        }
    }
}

#[cfg(test)]
mod tests;
