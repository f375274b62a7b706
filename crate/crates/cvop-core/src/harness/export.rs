//! Run artifact export: instance and polyhedron JSON documents, OFF meshes
//! for three-dimensional runs, the one-row report CSV and a per-iteration
//! plot CSV.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nalgebra::DVector;

use super::{RunBundle, REPORT_HEADER};
use crate::metrics::primal_outer_from_dual;
use crate::poly::{export_off, polyhedron_to_json, DoubleDescription, VRep};
use crate::scalar::instance_to_json;
use crate::solve::{dual_inner, Algorithm};

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '-' })
        .collect()
}

/// Per-iteration `iter,violation,hv_percent` rows; one row per enumeration
/// pass of the run.
pub fn plot_csv(bundle: &RunBundle) -> String {
    let mut out = String::from("iter,violation,hv_percent\n");
    let problem = &bundle.problem;
    for snap in &bundle.artifacts.snapshots {
        let outer: Option<Vec<DVector<f64>>> = match bundle.artifacts.alg {
            Algorithm::Primal => snap.outer_vertices.clone(),
            Algorithm::Dual => {
                let prefix = &bundle.artifacts.w_bar[..snap.w_count.min(bundle.artifacts.w_bar.len())];
                primal_outer_from_dual(prefix, problem.q)
                    .ok()
                    .map(|dd| dd.vrep().vertices.clone())
            }
        };
        let inner: Vec<DVector<f64>> = bundle.artifacts.x_bar[..snap.x_count.min(bundle.artifacts.x_bar.len())]
            .iter()
            .map(|p| p.fx.clone())
            .collect();
        let hv = match outer {
            Some(outer) if !outer.is_empty() && !inner.is_empty() => {
                crate::metrics::hv_indicator(&outer, &inner, &bundle.q_polytope, &problem.cone)
                    .unwrap_or(f64::NAN)
            }
            _ => f64::NAN,
        };
        out.push_str(&format!("{},{},{}\n", snap.iter, snap.max_violation, hv));
    }
    out
}

/// Write every artifact of one run under `dir`, returning the run directory.
pub fn export_run(dir: &Path, bundle: &RunBundle) -> io::Result<PathBuf> {
    let name = format!(
        "{}__{}__{}",
        slug(&bundle.report.instance),
        bundle.report.alg,
        slug(&bundle.report.stop)
    );
    let run_dir = dir.join(name);
    fs::create_dir_all(&run_dir)?;

    if let Ok(doc) = instance_to_json(&bundle.problem) {
        fs::write(
            run_dir.join("instance.json"),
            serde_json::to_string_pretty(&doc)?,
        )?;
    }

    let q = bundle.problem.q;
    // P-space outer approximation (for dual runs, the intersection of the
    // supporting halfspaces carried by the solution).
    let outer_dd: Option<DoubleDescription> = match bundle.artifacts.alg {
        Algorithm::Primal => Some(bundle.artifacts.outer.clone()),
        Algorithm::Dual => primal_outer_from_dual(&bundle.artifacts.w_bar, q).ok(),
    };
    if let Some(dd) = &outer_dd {
        fs::write(
            run_dir.join("outer.json"),
            serde_json::to_string_pretty(&polyhedron_to_json(dd.hrep(), dd.vrep()))?,
        )?;
    }

    let inner_vrep = VRep::new(
        q,
        bundle.inner_points.clone(),
        bundle.problem.cone.primal_generators().to_vec(),
    );
    let inner_hull = DoubleDescription::from_generators(&inner_vrep).ok();
    if let Some(dd) = &inner_hull {
        fs::write(
            run_dir.join("inner.json"),
            serde_json::to_string_pretty(&polyhedron_to_json(dd.hrep(), dd.vrep()))?,
        )?;
    }

    // Lower-image cone: the dual algorithm's final outer set, or the cone
    // generated by the primal algorithm's dual solution.
    let dual_dd: Option<DoubleDescription> = match bundle.artifacts.alg {
        Algorithm::Dual => Some(bundle.artifacts.outer.clone()),
        Algorithm::Primal => dual_inner(&bundle.artifacts.w_bar).ok(),
    };
    if let Some(dd) = &dual_dd {
        fs::write(
            run_dir.join("dual.json"),
            serde_json::to_string_pretty(&polyhedron_to_json(dd.hrep(), dd.vrep()))?,
        )?;
    }

    if q == 3 && !bundle.q_polytope.halfspaces.is_empty() {
        // Meshes are bounded by clipping with the bounding polytope.
        let clip = |dd: &DoubleDescription| -> Option<String> {
            let clipped = dd.insert_batch(&bundle.q_polytope.halfspaces).ok()?;
            export_off(&clipped).ok()
        };
        if let Some(off) = outer_dd.as_ref().and_then(|dd| clip(dd)) {
            fs::write(run_dir.join("outer.off"), off)?;
        }
        if let Some(off) = inner_hull.as_ref().and_then(|dd| clip(dd)) {
            fs::write(run_dir.join("inner.off"), off)?;
        }
    }

    fs::write(
        run_dir.join("report.csv"),
        format!("{REPORT_HEADER}\n{}\n", bundle.report.csv_row()),
    )?;
    fs::write(run_dir.join("plot.csv"), plot_csv(bundle))?;
    Ok(run_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{NormSpec, OrderingCone};
    use crate::harness::{run_experiment, Protocol};
    use crate::scalar::{instance_from_json, ProblemInstance};
    use crate::solve::StoppingRule;

    #[test]
    fn export_writes_all_artifacts() {
        let cone = OrderingCone::preset("C1", 3, &NormSpec::L2).unwrap();
        let problem = ProblemInstance::ball("ex4", 3, cone, NormSpec::L2).unwrap();
        let protocol = Protocol::Simple(vec![
            (Algorithm::Primal, StoppingRule::epsilon(0.3)),
            (Algorithm::Dual, StoppingRule::epsilon(0.3)),
        ]);
        let outcome = run_experiment(&[problem], &protocol, 1);
        let tmp = tempfile::tempdir().unwrap();
        for bundle in &outcome.bundles {
            let run_dir = export_run(tmp.path(), bundle).unwrap();
            for f in ["instance.json", "outer.json", "inner.json", "dual.json", "report.csv", "plot.csv", "outer.off", "inner.off"] {
                assert!(run_dir.join(f).exists(), "{f} missing");
            }
            // OFF header and plot row count: one row per enumeration pass.
            let off = std::fs::read_to_string(run_dir.join("outer.off")).unwrap();
            assert!(off.starts_with("OFF\n"));
            let plot = std::fs::read_to_string(run_dir.join("plot.csv")).unwrap();
            assert_eq!(
                plot.lines().count(),
                1 + bundle.artifacts.snapshots.len()
            );
            // The exported instance re-imports bit-identically.
            let text = std::fs::read_to_string(run_dir.join("instance.json")).unwrap();
            let back = instance_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            let doc1 = instance_to_json(&bundle.problem).unwrap();
            let doc2 = instance_to_json(&back).unwrap();
            assert_eq!(
                serde_json::to_string(&doc1).unwrap(),
                serde_json::to_string(&doc2).unwrap()
            );
        }
    }
}
