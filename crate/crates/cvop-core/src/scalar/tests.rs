use super::*;
use crate::cones::{NormSpec, OrderingCone};
use crate::scalar::ps::{cone_min_shift, project_dual_ball, ps_solve};
use crate::testing::{rng_f64, test_rng};
use nalgebra::{DMatrix, DVector};

fn v(c: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(c)
}

fn c1() -> OrderingCone {
    OrderingCone::preset("C1", 3, &NormSpec::L2).unwrap()
}

fn ball4() -> ProblemInstance {
    ProblemInstance::ball("ex4", 3, c1(), NormSpec::L2).unwrap()
}

fn identity_ellipsoid() -> ProblemInstance {
    ProblemInstance::ellipsoid(
        "ell-i3",
        DMatrix::identity(3, 3),
        DMatrix::identity(3, 3),
        c1(),
        NormSpec::L2,
        None,
    )
    .unwrap()
}

#[test]
fn ellipsoid_closed_form() {
    let p = identity_ellipsoid();
    let ws = ws_solve(&p, &v(&[1.0, 0.0, 0.0])).unwrap();
    assert!((ws.p + 1.0).abs() < 1e-12);
    assert!((ws.x - v(&[-1.0, 0.0, 0.0])).norm() < 1e-12);
    // Sampled optimality certificate inside the unit ball.
    let mut rng = test_rng(3);
    for _ in 0..2000 {
        let mut x = DVector::from_fn(3, |_, _| 2.0 * rng_f64(&mut rng) - 1.0);
        if x.norm() > 1.0 {
            x /= x.norm();
        }
        assert!(ws.w.dot(&p.objective(&x)) >= ws.p - 1e-9);
    }
}

#[test]
fn ball_closed_form() {
    let p = ball4();
    let ws = ws_solve(&p, &v(&[0.0, 0.0, 1.0])).unwrap();
    assert!(ws.p.abs() < 1e-12);
    assert!((ws.x - v(&[1.0, 1.0, 0.0])).norm() < 1e-12);
}

#[test]
fn quadratic_box_interior_optimum() {
    let p = ProblemInstance::quadratic_box("ex5", c1(), NormSpec::L2).unwrap();
    let ws = ws_solve(&p, &v(&[1.0, 0.0, 0.0])).unwrap();
    assert!((ws.x - v(&[1.0, 1.0])).norm() < 1e-9);
    assert!(ws.p.abs() < 1e-12);
    // Weighted case pushes the optimum toward the anchor mix; check the
    // certificate over the polytope by sampling.
    let w = v(&[1.0, 2.0, 0.5]);
    let ws = ws_solve(&p, &w).unwrap();
    let mut rng = test_rng(9);
    if let Family::QuadraticBox { polytope, .. } = &p.family {
        let mut checked = 0;
        while checked < 500 {
            let x = v(&[10.0 * rng_f64(&mut rng), 4.0 * rng_f64(&mut rng)]);
            if !crate::poly::contains(polytope, &x, 0.0).unwrap() {
                continue;
            }
            assert!(w.dot(&p.objective(&x)) >= ws.p - 1e-7);
            checked += 1;
        }
    }
}

#[test]
fn ws_rejects_bad_weights() {
    let p = ball4();
    assert!(matches!(
        ws_solve(&p, &v(&[-1.0, 0.0, 0.0])),
        Err(ScalarError::NotInDualCone)
    ));
    assert!(matches!(
        ws_solve(&p, &v(&[0.0, 0.0, 0.0])),
        Err(ScalarError::NotInDualCone)
    ));
}

#[test]
fn ws_scaling_is_linear() {
    let p = identity_ellipsoid();
    let w = v(&[0.3, 0.5, 0.2]);
    let base = ws_solve(&p, &w).unwrap().p;
    for lam in [0.5, 2.0, 7.5] {
        let scaled = ws_solve(&p, &(&w * lam)).unwrap().p;
        assert!((scaled - lam * base).abs() < 1e-10 * (1.0 + scaled.abs()));
    }
}

#[test]
fn k_maximality_of_ws_support() {
    let p = ball4();
    let w = v(&[0.6, 0.8, 0.0]);
    let ws = ws_solve(&p, &w).unwrap();
    for delta in [1e-6, 1e-3, 1.0] {
        assert!(ws.p + delta > ws.p);
    }
}

#[test]
fn projection_examples() {
    let cone = c1();
    let w = project_dual_ball(&v(&[2.0, -1.0, 0.0]), &cone, &NormSpec::L2).unwrap();
    assert!((w - v(&[1.0, 0.0, 0.0])).norm() < 1e-9);
    let inside = v(&[0.3, 0.3, 0.0]);
    let w = project_dual_ball(&inside, &cone, &NormSpec::L2).unwrap();
    assert!((w - inside).norm() < 1e-12);
    // Dense-sample check: no feasible point is closer than the projection.
    let w0 = v(&[1.3, 0.9, -0.4]);
    let proj = project_dual_ball(&w0, &cone, &NormSpec::L2).unwrap();
    let d0 = (&proj - &w0).norm();
    let mut rng = test_rng(4);
    for _ in 0..20000 {
        let cand = DVector::from_fn(3, |_, _| rng_f64(&mut rng));
        if cand.norm() <= 1.0 {
            assert!((&cand - &w0).norm() >= d0 - 1e-9);
        }
    }
}

#[test]
fn l1_ball_projection_inside_dual_feasible_set() {
    let cone = c1();
    let w = project_dual_ball(&v(&[2.0, 2.0, 2.0]), &cone, &NormSpec::Linf).unwrap();
    let l1: f64 = w.iter().map(|x| x.abs()).sum();
    assert!(l1 <= 1.0 + 1e-9);
    assert!(w.iter().all(|&x| x >= -1e-9));
}

#[test]
fn shift_examples() {
    let cone = c1();
    let z = cone_min_shift(&v(&[-1.0, -1.0, -1.0]), &cone, &NormSpec::L2).unwrap();
    assert!(z.norm() < 1e-12);
    let z = cone_min_shift(&v(&[1.0, -1.0, 0.0]), &cone, &NormSpec::L2).unwrap();
    assert!((z - v(&[1.0, 0.0, 0.0])).norm() < 1e-9);
    for norm in [NormSpec::L1, NormSpec::L2, NormSpec::Linf] {
        let z = cone_min_shift(&v(&[1.0, 1.0, 1.0]), &cone, &norm).unwrap();
        assert!((z - v(&[1.0, 1.0, 1.0])).norm() < 1e-9, "{norm:?}");
    }
    // Sampled lower bound: no feasible shift beats the reported one.
    let y0 = v(&[0.7, -0.9, 0.3]);
    let z = cone_min_shift(&y0, &cone, &NormSpec::L2).unwrap();
    let mut rng = test_rng(6);
    for _ in 0..20000 {
        let c = DVector::from_fn(3, |_, _| 3.0 * rng_f64(&mut rng));
        assert!((&y0 + &c).norm() >= z.norm() - 1e-9);
    }
}

#[test]
fn ps_solve_analytic_distance() {
    let p = ball4();
    let u = DVector::from_element(3, 1.0) / 3f64.sqrt();
    let v_pt = DVector::from_element(3, 1.0) - &u * 2.0;
    let r = ps_solve(&p, &v_pt).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6, "value {}", r.value);
    assert!((&r.w - &u).norm() < 1e-3, "w {:?}", r.w);
    assert!((&r.x - (DVector::from_element(3, 1.0) - &u)).norm() < 1e-3);
    assert!(!r.interior);
    // Feasibility of the returned pair: f(x) - z - v in -C.
    let resid = p.objective(&r.x) - &r.z - &v_pt;
    assert!(p.cone.contains(&(-&resid), 1e-8));
}

#[test]
fn ps_solve_interior_point() {
    let p = ball4();
    let r = ps_solve(&p, &DVector::from_element(3, 1.0)).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(r.interior);
    assert!(r.z.norm() < 1e-7);
}

#[test]
fn ps_solve_axis_certificate() {
    let p = ball4();
    let v_pt = v(&[-1.0, 1.0, 1.0]);
    let r = ps_solve(&p, &v_pt).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6);
    let dual_value = ws_solve(&p, &r.w).unwrap().p - r.w.dot(&v_pt);
    assert!((r.value - dual_value).abs() <= 1e-6);
    assert!((&r.w - v(&[1.0, 0.0, 0.0])).norm() < 1e-3);
}

#[test]
fn ps_strong_duality_on_random_points() {
    let p = ball4();
    let mut rng = test_rng(12);
    for _ in 0..25 {
        let v_pt = DVector::from_fn(3, |_, _| 2.0 * rng_f64(&mut rng) - 0.5);
        match ps_solve(&p, &v_pt) {
            Ok(r) => {
                if !r.interior {
                    let dual = ws_solve(&p, &r.w).unwrap().p - r.w.dot(&v_pt);
                    assert!((r.value - dual).abs() <= 1e-6);
                }
            }
            Err(ScalarError::ConvergenceFailure { .. }) => panic!("stall must not occur here"),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn ps_solve_l1_and_linf_norms() {
    for norm in [NormSpec::L1, NormSpec::Linf] {
        let cone = OrderingCone::preset("C1", 3, &norm).unwrap();
        let p = ProblemInstance::ball("ex4", 3, cone, norm.clone()).unwrap();
        let v_pt = v(&[-1.0, 1.0, 1.0]);
        let r = ps_solve(&p, &v_pt).unwrap();
        let dual = ws_solve(&p, &r.w).unwrap().p - r.w.dot(&v_pt);
        assert!((r.value - dual).abs() <= 1e-6, "{norm:?}");
        let resid = p.objective(&r.x) - &r.z - &v_pt;
        assert!(p.cone.contains(&(-&resid), 1e-8));
    }
}

#[test]
fn external_oracle_round_trip() {
    struct DiscreteBall;
    impl ExternalOracle for DiscreteBall {
        fn ws(&self, w: &DVector<f64>) -> Result<(DVector<f64>, f64), String> {
            let e = DVector::from_element(3, 1.0);
            let x = &e - w / w.norm();
            Ok((x.clone(), w.dot(&x)))
        }
        fn objective(&self, x: &DVector<f64>) -> DVector<f64> {
            x.clone()
        }
    }
    let p = ProblemInstance::external(
        "ext",
        std::sync::Arc::new(DiscreteBall),
        3,
        3,
        c1(),
        NormSpec::L2,
    )
    .unwrap();
    let u = DVector::from_element(3, 1.0) / 3f64.sqrt();
    let r = ps_solve(&p, &(DVector::from_element(3, 1.0) - &u * 2.0)).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6);
}

#[test]
fn instance_json_round_trip_is_bit_exact() {
    let mut rng = test_rng(31);
    let a = DMatrix::from_fn(4, 3, |_, _| 50.0 * rng_f64(&mut rng));
    let mut p = DMatrix::from_fn(4, 4, |_, _| rng_f64(&mut rng));
    p = &p * p.transpose() + DMatrix::identity(4, 4);
    let inst =
        ProblemInstance::ellipsoid("rt", a, p, c1(), NormSpec::L2, Some(99)).unwrap();
    let doc = instance_to_json(&inst).unwrap();
    let text = serde_json::to_string(&doc).unwrap();
    let back = instance_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    match (&inst.family, &back.family) {
        (Family::Ellipsoid { a: a1, p: p1 }, Family::Ellipsoid { a: a2, p: p2 }) => {
            assert_eq!(a1, a2);
            assert_eq!(p1, p2);
        }
        _ => panic!("family changed"),
    }
    assert_eq!(back.seed, Some(99));
    let doc2 = instance_to_json(&back).unwrap();
    assert_eq!(serde_json::to_string(&doc2).unwrap(), text);
}
