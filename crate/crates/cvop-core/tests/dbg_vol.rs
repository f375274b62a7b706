use cvop_core::cones::{NormSpec, OrderingCone};
use cvop_core::harness::gen_instance;
use cvop_core::metrics::{bounding_polytope, hypervolume};
use cvop_core::poly::{contains, DoubleDescription, VRep};
use cvop_core::solve::{primal_solve, StoppingRule};

#[test]
fn dbg_hull_reload() {
    let cone = OrderingCone::preset("C1", 3, &NormSpec::L2).unwrap();
    let p = gen_instance(6, 3, 42, cone.clone(), NormSpec::L2).unwrap();
    let run_p = primal_solve(&p, &StoppingRule::epsilon(0.3)).unwrap();
    let inner_p: Vec<_> = run_p.x_bar.iter().map(|s| s.fx.clone()).collect();
    println!("raw inner points: {}", inner_p.len());
    let hull = DoubleDescription::from_generators(&VRep::new(3, inner_p.clone(), cone.primal_generators().to_vec())).unwrap();
    println!("hull vertices: {} rays: {} halfspaces: {}", hull.vrep().vertices.len(), hull.vrep().rays.len(), hull.hrep().halfspaces.len());
    // any hull vertex far from the raw-point hull?
    let mut all = inner_p.clone();
    all.extend(run_p.outer.vrep().vertices.iter().cloned());
    let q = bounding_polytope(&all, &cone).unwrap();
    let hv_raw = hypervolume(&inner_p, &q, &cone).unwrap();
    let hv_hull = hypervolume(&hull.vrep().vertices, &q, &cone).unwrap();
    println!("hv raw {hv_raw} vs hull {hv_hull}");
    // check each hull vertex against the raw hull's hrep
    let raw_hull = DoubleDescription::from_generators(&VRep::new(3, inner_p.clone(), cone.primal_generators().to_vec())).unwrap();
    let mut worst: f64 = 0.0;
    for v in hull.vrep().vertices.iter() {
        if !contains(raw_hull.hrep(), v, 1e-6).unwrap() {
            let slack = raw_hull.hrep().halfspaces.iter().map(|h| {
                let hn = h.normalized();
                hn.normal.dot(v) - hn.offset
            }).fold(f64::INFINITY, f64::min);
            worst = worst.min(slack);
        }
    }
    println!("worst hull-vertex violation: {worst}");
}
