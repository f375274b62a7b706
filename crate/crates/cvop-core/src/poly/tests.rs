use super::*;
use crate::testing::{brute_force_vertices, monte_carlo_volume, rng_f64, test_rng};
use nalgebra::DVector;

fn v(c: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(c)
}

fn hs(n: &[f64], c: f64) -> Halfspace {
    Halfspace::new(v(n), c)
}

fn orthant3() -> HRep {
    HRep::new(
        3,
        vec![
            hs(&[1.0, 0.0, 0.0], 0.0),
            hs(&[0.0, 1.0, 0.0], 0.0),
            hs(&[0.0, 0.0, 1.0], 0.0),
        ],
    )
}

fn unit_cube() -> HRep {
    let mut h = Vec::new();
    for j in 0..3 {
        let mut lo = [0.0; 3];
        lo[j] = 1.0;
        h.push(hs(&lo, 0.0));
        let mut up = [0.0; 3];
        up[j] = -1.0;
        h.push(hs(&up, -1.0));
    }
    HRep::new(3, h)
}

fn same_point_set(a: &[DVector<f64>], b: &[DVector<f64>], tol_: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|p| b.iter().any(|q| (p - q).norm() <= tol_ * (1.0 + p.norm())))
}

#[test]
fn orthant_enumeration() {
    let dd = enumerate_vertices(&orthant3()).unwrap();
    assert_eq!(dd.vrep().vertices.len(), 1);
    assert!(dd.vrep().vertices[0].norm() < 1e-12);
    assert!(same_point_set(
        &dd.vrep().rays,
        &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])],
        1e-12
    ));
    dd.check_consistency().unwrap();
}

#[test]
fn cube_enumeration() {
    let dd = enumerate_vertices(&unit_cube()).unwrap();
    assert_eq!(dd.vrep().vertices.len(), 8);
    assert!(dd.vrep().rays.is_empty());
    let oracle = brute_force_vertices(&unit_cube());
    assert!(same_point_set(&dd.vrep().vertices, &oracle, 1e-9));
    dd.check_consistency().unwrap();
}

#[test]
fn insert_cut_matches_brute_force() {
    // R^3_+ cut by y1+y2+y3 >= 1: vertices e1,e2,e3 and the same rays.
    let dd = enumerate_vertices(&orthant3()).unwrap();
    let cut = hs(&[1.0, 1.0, 1.0], 1.0);
    let dd = dd.insert_halfspace(&cut).unwrap();
    let mut hrep = orthant3();
    hrep.halfspaces.push(cut);
    let oracle = brute_force_vertices(&hrep);
    assert!(same_point_set(&dd.vrep().vertices, &oracle, 1e-9));
    assert!(same_point_set(
        &dd.vrep().vertices,
        &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])],
        1e-9
    ));
    assert_eq!(dd.vrep().rays.len(), 3);
    dd.check_consistency().unwrap();
}

#[test]
fn redundant_insert_is_noop() {
    let dd = enumerate_vertices(&unit_cube()).unwrap();
    let before = dd.vrep().clone();
    let dd = dd.insert_halfspace(&hs(&[1.0, 0.0, 0.0], 0.0)).unwrap();
    assert!(same_point_set(&dd.vrep().vertices, &before.vertices, 1e-12));
    assert_eq!(dd.vrep().rays.len(), before.rays.len());
}

#[test]
fn contradictory_insert_is_empty() {
    let dd = enumerate_vertices(&orthant3()).unwrap();
    let err = dd.insert_halfspace(&hs(&[-1.0, 0.0, 0.0], 1.0)).unwrap_err();
    assert_eq!(err, PolyError::EmptyIntersection);
}

#[test]
fn line_detection() {
    // A slab has lines in two directions.
    let hrep = HRep::new(3, vec![hs(&[0.0, 0.0, 1.0], 0.0), hs(&[0.0, 0.0, -1.0], -1.0)]);
    assert_eq!(enumerate_vertices(&hrep).unwrap_err(), PolyError::NotLineFree);
}

#[test]
fn infeasible_hrep() {
    let hrep = HRep::new(
        3,
        vec![
            hs(&[1.0, 0.0, 0.0], 0.0),
            hs(&[0.0, 1.0, 0.0], 0.0),
            hs(&[0.0, 0.0, 1.0], 0.0),
            hs(&[-1.0, -1.0, -1.0], 1.0),
        ],
    );
    assert_eq!(enumerate_vertices(&hrep).unwrap_err(), PolyError::Infeasible);
}

#[test]
fn random_hreps_match_brute_force() {
    let mut rng = test_rng(7);
    let mut done = 0;
    while done < 40 {
        let dim = 3;
        let m = 8;
        let mut halfspaces = Vec::new();
        for _ in 0..m {
            let n = DVector::from_fn(dim, |_, _| rng_f64(&mut rng) * 2.0 - 1.0);
            if n.norm() < 0.1 {
                continue;
            }
            // Keep the origin-ish point feasible so the set is nonempty.
            let c = -rng_f64(&mut rng);
            halfspaces.push(Halfspace::new(n, c));
        }
        let hrep = HRep::new(dim, halfspaces);
        let dd = match enumerate_vertices(&hrep) {
            Ok(dd) => dd,
            Err(_) => continue,
        };
        let oracle = brute_force_vertices(&hrep);
        assert!(
            same_point_set(&dd.vrep().vertices, &oracle, 1e-7),
            "mismatch: dd={:?} oracle={:?}",
            dd.vrep().vertices,
            oracle
        );
        dd.check_consistency().unwrap();
        done += 1;
    }
}

#[test]
fn extreme_directions_examples() {
    let dirs = extreme_directions(&orthant3()).unwrap();
    assert_eq!(dirs.rays.len(), 3);
    let one = HRep::new(1, vec![hs(&[2.0], 0.0)]);
    let dirs = extreme_directions(&one).unwrap();
    assert!(same_point_set(&dirs.rays, &[v(&[1.0])], 1e-12));
    let offs = HRep::new(1, vec![hs(&[1.0], 1.0)]);
    assert_eq!(extreme_directions(&offs).unwrap_err(), PolyError::NotACone);
}

#[test]
fn orthant_is_self_dual() {
    let gens = VRep::new(
        3,
        vec![v(&[0.0, 0.0, 0.0])],
        vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])],
    );
    let dual = dualize_cone(&gens).unwrap();
    assert!(same_point_set(&dual.vrep().rays, &gens.rays, 1e-12));
    // Twice returns the original.
    let dd2 = dualize_cone(dual.vrep()).unwrap();
    assert!(same_point_set(&dd2.vrep().rays, &gens.rays, 1e-12));
}

#[test]
fn dualize_rejects_flat_and_wide() {
    let flat = VRep::new(3, vec![v(&[0.0; 3])], vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]);
    assert_eq!(dualize_cone(&flat).unwrap_err(), PolyError::NotSolid);
    let wide = VRep::new(
        2,
        vec![v(&[0.0, 0.0])],
        vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0])],
    );
    assert_eq!(dualize_cone(&wide).unwrap_err(), PolyError::NotPointed);
}

#[test]
fn cube_facets() {
    let dd = enumerate_vertices(&unit_cube()).unwrap();
    let facets = dd.facets();
    assert_eq!(facets.len(), 6);
    for f in &facets {
        assert_eq!(f.vertices.len(), 4);
        assert_eq!(f.dimension, 2);
    }
}

#[test]
fn orthant_facets_have_two_rays() {
    let dd = enumerate_vertices(&orthant3()).unwrap();
    let facets = dd.facets();
    assert_eq!(facets.len(), 3);
    for f in &facets {
        assert_eq!(f.rays.len(), 2);
        assert_eq!(f.vertices.len(), 1);
    }
}

#[test]
fn unit_simplex_volume() {
    let hrep = HRep::new(
        3,
        vec![
            hs(&[1.0, 0.0, 0.0], 0.0),
            hs(&[0.0, 1.0, 0.0], 0.0),
            hs(&[0.0, 0.0, 1.0], 0.0),
            hs(&[-1.0, -1.0, -1.0], -1.0),
        ],
    );
    let dd = enumerate_vertices(&hrep).unwrap();
    let vol = polytope_volume(&dd).unwrap();
    assert!((vol.value - 1.0 / 6.0).abs() < 1e-12);
    assert!(!vol.degenerate);
}

#[test]
fn cube_volume_and_4d_cube() {
    let dd = enumerate_vertices(&unit_cube()).unwrap();
    assert!((polytope_volume(&dd).unwrap().value - 1.0).abs() < 1e-12);

    let mut h4 = Vec::new();
    for j in 0..4 {
        let mut lo = vec![0.0; 4];
        lo[j] = 1.0;
        h4.push(Halfspace::new(DVector::from_column_slice(&lo), 0.0));
        let mut up = vec![0.0; 4];
        up[j] = -1.0;
        h4.push(Halfspace::new(DVector::from_column_slice(&up), -2.0));
    }
    let dd4 = enumerate_vertices(&HRep::new(4, h4)).unwrap();
    assert!((polytope_volume(&dd4).unwrap().value - 16.0).abs() < 1e-9);
}

#[test]
fn degenerate_volume_is_flagged() {
    let flat = HRep::new(
        3,
        vec![
            hs(&[1.0, 0.0, 0.0], 0.0),
            hs(&[-1.0, 0.0, 0.0], 0.0),
            hs(&[0.0, 1.0, 0.0], 0.0),
            hs(&[0.0, -1.0, 0.0], -1.0),
            hs(&[0.0, 0.0, 1.0], 0.0),
            hs(&[0.0, 0.0, -1.0], -1.0),
        ],
    );
    let dd = enumerate_vertices(&flat).unwrap();
    let vol = polytope_volume(&dd).unwrap();
    assert_eq!(vol.value, 0.0);
    assert!(vol.degenerate);
}

#[test]
fn unbounded_volume_errors() {
    let dd = enumerate_vertices(&orthant3()).unwrap();
    assert_eq!(polytope_volume(&dd).unwrap_err(), PolyError::Unbounded);
}

#[test]
fn random_polytope_volume_vs_monte_carlo() {
    let mut rng = test_rng(11);
    for _ in 0..3 {
        let mut h = unit_cube().halfspaces;
        for _ in 0..10 {
            let n = DVector::from_fn(3, |_, _| rng_f64(&mut rng) * 2.0 - 1.0);
            if n.norm() < 0.1 {
                continue;
            }
            let center = v(&[0.5, 0.5, 0.5]);
            // Keep the cube center inside.
            let c = n.dot(&center) - 0.35 * rng_f64(&mut rng) - 0.05;
            h.push(Halfspace::new(n, c));
        }
        let hrep = HRep::new(3, h);
        let dd = enumerate_vertices(&hrep).unwrap();
        let vol = polytope_volume(&dd).unwrap().value;
        let mc = monte_carlo_volume(&hrep, &[0.0; 3], &[1.0; 3], 1_000_000, 99);
        assert!(
            (vol - mc).abs() <= 0.01 * vol.max(1e-9),
            "vol={vol} mc={mc}"
        );
    }
}

#[test]
fn volume_invariant_under_permutation_and_rotation() {
    let dd = enumerate_vertices(&unit_cube()).unwrap();
    let base = polytope_volume(&dd).unwrap().value;

    // Rigid rotation of the vertex set around (cos t, sin t) in the xy plane.
    let t: f64 = 0.7;
    let rot = |p: &DVector<f64>| {
        v(&[
            t.cos() * p[0] - t.sin() * p[1],
            t.sin() * p[0] + t.cos() * p[1],
            p[2],
        ])
    };
    let mut pts: Vec<DVector<f64>> = dd.vrep().vertices.iter().map(|p| rot(p)).collect();
    pts.reverse();
    let hull = DoubleDescription::from_generators(&VRep::new(3, pts, vec![])).unwrap();
    let rotated = polytope_volume(&hull).unwrap().value;
    assert!((rotated - base).abs() <= 1e-9 * base);
}

#[test]
fn contains_tolerances() {
    let orth = orthant3();
    assert!(contains(&orth, &v(&[0.0, 0.0, 0.0]), tol::FEAS).unwrap());
    assert!(contains(&orth, &v(&[-1e-12, 0.0, 0.0]), 1e-9).unwrap());
    assert!(!contains(&unit_cube(), &v(&[2.0, 0.0, 0.0]), 1e-9).unwrap());
    assert_eq!(
        contains(&orth, &v(&[0.0, 0.0]), 1e-9).unwrap_err(),
        PolyError::DimensionMismatch
    );
}

#[test]
fn round_trip_idempotent() {
    let mut rng = test_rng(21);
    for _ in 0..10 {
        let mut h = Vec::new();
        for _ in 0..7 {
            let n = DVector::from_fn(3, |_, _| rng_f64(&mut rng) * 2.0 - 1.0);
            if n.norm() < 0.1 {
                continue;
            }
            let c = -rng_f64(&mut rng);
            h.push(Halfspace::new(n, c));
        }
        let hrep = HRep::new(3, h);
        let dd = match enumerate_vertices(&hrep) {
            Ok(dd) => dd,
            Err(_) => continue,
        };
        let back = DoubleDescription::from_generators(dd.vrep()).unwrap();
        let again = enumerate_vertices(back.hrep()).unwrap();
        assert!(same_point_set(
            &again.vrep().vertices,
            &dd.vrep().vertices,
            1e-7
        ));
    }
}

#[test]
fn prune_keeps_geometry() {
    let mut h = unit_cube().halfspaces;
    h.push(hs(&[1.0, 1.0, 0.0], -5.0)); // redundant
    h.push(hs(&[1.0, 0.0, 0.0], -0.5)); // redundant, parallel to a facet
    let mut dd = enumerate_vertices(&HRep::new(3, h)).unwrap();
    let before = dd.vrep().clone();
    dd.prune_redundant();
    assert_eq!(dd.hrep().halfspaces.len(), 6);
    assert!(same_point_set(&dd.vrep().vertices, &before.vertices, 1e-12));
    dd.check_consistency().unwrap();
}

#[test]
fn json_round_trip_and_off() {
    let dd = enumerate_vertices(&unit_cube()).unwrap();
    let doc = polyhedron_to_json(dd.hrep(), dd.vrep());
    let (hrep, vrep) = polyhedron_from_json(&doc).unwrap();
    assert_eq!(hrep.halfspaces.len(), dd.hrep().halfspaces.len());
    assert_eq!(vrep.vertices.len(), 8);
    let off = export_off(&dd).unwrap();
    assert!(off.starts_with("OFF\n8 6 0\n"));
    assert_eq!(off.lines().count(), 2 + 8 + 6);
}
