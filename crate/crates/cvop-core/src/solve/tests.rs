use super::*;
use crate::cones::{NormSpec, OrderingCone};
use crate::poly::contains;
use crate::scalar::ProblemInstance;
use crate::testing::{rng_f64, sample_orthant_sphere, test_rng};
use nalgebra::{DMatrix, DVector};

fn c1() -> OrderingCone {
    OrderingCone::preset("C1", 3, &NormSpec::L2).unwrap()
}

fn ball4() -> ProblemInstance {
    ProblemInstance::ball("ex4", 3, c1(), NormSpec::L2).unwrap()
}

/// Distance from `v` to `ball(e,1) + R^3_+`, in closed form.
fn ball_distance(v: &DVector<f64>) -> f64 {
    let d = v - DVector::from_element(3, 1.0);
    let clipped = d.map(|x| x.min(0.0));
    (clipped.norm() - 1.0).max(0.0)
}

#[test]
fn primal_init_ball_is_orthant() {
    let state = primal::primal_init(&ball4()).unwrap();
    let verts = &state.outer.vrep().vertices;
    assert_eq!(verts.len(), 1);
    assert!(verts[0].norm() < 1e-9);
    assert_eq!(state.outer.vrep().rays.len(), 3);
    assert_eq!(state.x_bar.len(), 3);
    assert_eq!(state.w_bar.len(), 3);
}

#[test]
fn primal_init_identity_ellipsoid() {
    let p = ProblemInstance::ellipsoid(
        "ell",
        DMatrix::identity(3, 3),
        DMatrix::identity(3, 3),
        c1(),
        NormSpec::L2,
        None,
    )
    .unwrap();
    let state = primal::primal_init(&p).unwrap();
    let verts = &state.outer.vrep().vertices;
    assert_eq!(verts.len(), 1);
    assert!((&verts[0] - DVector::from_element(3, -1.0)).norm() < 1e-9);
}

#[test]
fn primal_ball_outer_within_epsilon() {
    let problem = ball4();
    let eps = 0.1;
    let run = primal_solve(&problem, &StoppingRule::epsilon(eps)).unwrap();
    assert_eq!(run.stop_reason, StopReason::Epsilon);
    assert!(!run.incomplete);
    for v in &run.outer.vrep().vertices {
        assert!(
            ball_distance(v) <= eps + 1e-6,
            "vertex {v:?} at distance {}",
            ball_distance(v)
        );
    }
    // Every returned dual vector is normalized and in the dual cone.
    for d in &run.w_bar {
        assert!((problem.norm.dual(&d.w).unwrap() - 1.0).abs() <= 1e-9);
        assert!(problem.cone.dual_contains(&d.w, 1e-8));
    }
    // Monotonicity: later outer vertices satisfy all earlier cuts.
    for k in 1..run.snapshots.len() {
        let verts = run.snapshots[k].outer_vertices.as_ref().unwrap();
        for snap in &run.snapshots[..k] {
            for h in &snap.cuts {
                for v in verts {
                    assert!(h.normal.dot(v) - h.offset >= -1e-7);
                }
            }
        }
    }
}

#[test]
fn primal_huge_epsilon_stops_after_one_pass() {
    let run = primal_solve(&ball4(), &StoppingRule::epsilon(1e3)).unwrap();
    assert_eq!(run.snapshots.len(), 1);
    assert!(run.x_bar.len() >= 3);
    assert_eq!(run.stop_reason, StopReason::Epsilon);
}

#[test]
fn primal_time_limit_reports_time() {
    let run = primal_solve(&ball4(), &StoppingRule::time_limit(0.2)).unwrap();
    assert_eq!(run.stop_reason, StopReason::Time);
    assert!(run.counters.t >= 0.2);
}

#[test]
fn primal_break_variant_converges_too() {
    let eps = 0.15;
    let run = primal_solve(&ball4(), &StoppingRule::epsilon(eps).with_break(true)).unwrap();
    assert_eq!(run.stop_reason, StopReason::Epsilon);
    for v in &run.outer.vrep().vertices {
        assert!(ball_distance(v) <= eps + 1e-6);
    }
}

#[test]
fn dual_init_structure() {
    let state = dual::dual_init(&ball4()).unwrap();
    let u = DVector::from_element(3, 1.0) / 3f64.sqrt();
    assert!((&state.w_bar[0].w - &u).norm() < 1e-12);
    let rays = &state.outer.vrep().rays;
    assert_eq!(rays.len(), 4);
    let down = DVector::from_column_slice(&[0.0, 0.0, 0.0, -1.0]);
    assert!(rays.iter().any(|r| (r - &down).norm() < 1e-9));
}

#[test]
fn dual_ball_containment() {
    let problem = ball4();
    let eps = 0.05;
    let run = dual_solve(&problem, &StoppingRule::epsilon(eps)).unwrap();
    assert_eq!(run.stop_reason, StopReason::Epsilon);
    // D_eps = cone(conv xi(W) + eps e4) - K must contain the lower image:
    // sample w on the unit sphere in the dual cone, check (w, p^w - 1e-9).
    let shifted: Vec<DVector<f64>> = run
        .w_bar
        .iter()
        .map(|d| DVector::from_column_slice(&[d.w[0], d.w[1], d.w[2], d.p + eps]))
        .chain(std::iter::once(DVector::from_column_slice(&[
            0.0, 0.0, 0.0, -1.0,
        ])))
        .collect();
    let d_eps = crate::poly::cone_from_generators(&shifted, 4).unwrap();
    let mut rng = test_rng(77);
    for _ in 0..200 {
        let w = sample_orthant_sphere(&mut rng, 3);
        let p_w = w.dot(&DVector::from_element(3, 1.0)) - 1.0;
        let point = DVector::from_column_slice(&[w[0], w[1], w[2], p_w - 1e-9]);
        assert!(
            contains(d_eps.hrep(), &point, 1e-7).unwrap(),
            "missing {point:?}"
        );
    }
}

#[test]
fn dual_huge_epsilon_stops_after_one_pass() {
    let run = dual_solve(&ball4(), &StoppingRule::epsilon(1e3)).unwrap();
    assert_eq!(run.snapshots.len(), 1);
    assert_eq!(run.stop_reason, StopReason::Epsilon);
    // w0 plus the first pass of directions.
    assert!(run.w_bar.len() >= 4);
}

#[test]
fn dual_time_limit_keeps_maximizers() {
    let problem = ball4();
    let run = dual_solve(&problem, &StoppingRule::time_limit(0.2)).unwrap();
    assert_eq!(run.stop_reason, StopReason::Time);
    // Every stored w went through WS: p equals the analytic optimal value.
    for d in &run.w_bar {
        let analytic = d.w.dot(&DVector::from_element(3, 1.0)) - d.w.norm();
        assert!((d.p - analytic).abs() < 1e-9);
    }
}

#[test]
fn support_soundness_on_random_feasible_points() {
    let problem = ball4();
    let run = primal_solve(&problem, &StoppingRule::epsilon(0.2)).unwrap();
    let mut rng = test_rng(41);
    for _ in 0..300 {
        // Random feasible x in the ball, random c in the cone.
        let mut x = DVector::from_fn(3, |_, _| 2.0 * rng_f64(&mut rng) - 1.0);
        let n = x.norm();
        if n > 1.0 {
            x /= n;
        }
        let y = &x + DVector::from_element(3, 1.0)
            + DVector::from_fn(3, |_, _| rng_f64(&mut rng)) * 2.0;
        for snap in &run.snapshots {
            for h in &snap.cuts {
                assert!(h.normal.dot(&y) - h.offset >= -1e-7);
            }
        }
    }
}

#[test]
fn inner_approximations() {
    let problem = ball4();
    let run = dual_solve(&problem, &StoppingRule::epsilon(0.3)).unwrap();
    let inner = primal_inner(&run.x_bar, &problem.cone).unwrap();
    assert_eq!(inner.rays.len(), 3);
    assert!(!inner.vertices.is_empty());
    let dual_in = dual_inner(&run.w_bar).unwrap();
    // Inner dual cone contains the downward ray and is inside the outer.
    let down = DVector::from_column_slice(&[0.0, 0.0, 0.0, -1.0]);
    assert!(dual_in.vrep().rays.iter().any(|r| (r - &down).norm() < 1e-9));
    for r in dual_in.vrep().rays.iter() {
        assert!(contains(run.outer.hrep(), r, 1e-7).unwrap());
    }
    assert!(matches!(
        primal_inner(&[], &problem.cone),
        Err(SolveError::EmptySolutionSet)
    ));
}

#[test]
fn determinism_bitwise() {
    let problem = ball4();
    let a = primal_solve(&problem, &StoppingRule::epsilon(0.2)).unwrap();
    let b = primal_solve(&problem, &StoppingRule::epsilon(0.2)).unwrap();
    assert_eq!(a.x_bar.len(), b.x_bar.len());
    for (pa, pb) in a.x_bar.iter().zip(&b.x_bar) {
        assert_eq!(pa.x, pb.x);
    }
    for (wa, wb) in a.w_bar.iter().zip(&b.w_bar) {
        assert_eq!(wa.w, wb.w);
        assert_eq!(wa.p, wb.p);
    }
    assert_eq!(a.outer.vrep().vertices, b.outer.vrep().vertices);
}
