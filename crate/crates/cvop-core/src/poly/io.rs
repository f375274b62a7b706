//! Polyhedron interchange: a JSON document with `dim`, `halfspaces`
//! (arrays `[normal..., offset]`), `vertices` and `rays`, plus an OFF export
//! for three-dimensional bounded sets.

use nalgebra::DVector;
use serde_json::{json, Value};

use super::{DoubleDescription, HRep, Halfspace, PolyError, VRep};

pub fn polyhedron_to_json(hrep: &HRep, vrep: &VRep) -> Value {
    let halfspaces: Vec<Vec<f64>> = hrep
        .halfspaces
        .iter()
        .map(|h| {
            let mut row: Vec<f64> = h.normal.iter().copied().collect();
            row.push(h.offset);
            row
        })
        .collect();
    let vertices: Vec<Vec<f64>> = vrep
        .vertices
        .iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    let rays: Vec<Vec<f64>> = vrep
        .rays
        .iter()
        .map(|r| r.iter().copied().collect())
        .collect();
    json!({
        "dim": hrep.dim,
        "halfspaces": halfspaces,
        "vertices": vertices,
        "rays": rays,
    })
}

fn vec_of_f64(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(|x| x.as_f64()).collect()
}

pub fn polyhedron_from_json(v: &Value) -> Result<(HRep, VRep), PolyError> {
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| PolyError::Inconsistent("missing dim".into()))? as usize;
    let mut halfspaces = Vec::new();
    for row in v
        .get("halfspaces")
        .and_then(Value::as_array)
        .ok_or_else(|| PolyError::Inconsistent("missing halfspaces".into()))?
    {
        let row = vec_of_f64(row)
            .ok_or_else(|| PolyError::Inconsistent("bad halfspace row".into()))?;
        if row.len() != dim + 1 {
            return Err(PolyError::DimensionMismatch);
        }
        halfspaces.push(Halfspace::new(
            DVector::from_column_slice(&row[..dim]),
            row[dim],
        ));
    }
    let parse_points = |key: &str| -> Result<Vec<DVector<f64>>, PolyError> {
        let mut out = Vec::new();
        if let Some(arr) = v.get(key).and_then(Value::as_array) {
            for p in arr {
                let p = vec_of_f64(p)
                    .ok_or_else(|| PolyError::Inconsistent(format!("bad {key} entry")))?;
                if p.len() != dim {
                    return Err(PolyError::DimensionMismatch);
                }
                out.push(DVector::from_column_slice(&p));
            }
        }
        Ok(out)
    };
    let vertices = parse_points("vertices")?;
    let rays = parse_points("rays")?;
    Ok((HRep::new(dim, halfspaces), VRep::new(dim, vertices, rays)))
}

/// OFF mesh of a bounded three-dimensional double description.
pub fn export_off(dd: &DoubleDescription) -> Result<String, PolyError> {
    if dd.dim() != 3 {
        return Err(PolyError::DimensionMismatch);
    }
    if !dd.vrep().rays.is_empty() {
        return Err(PolyError::Unbounded);
    }
    let verts = &dd.vrep().vertices;
    let facets = dd.facets();
    let mut out = String::from("OFF\n");
    out.push_str(&format!("{} {} 0\n", verts.len(), facets.len()));
    for v in verts {
        out.push_str(&format!("{} {} {}\n", v[0], v[1], v[2]));
    }
    for f in &facets {
        let idxs = order_polygon(verts, &f.vertices);
        out.push_str(&idxs.len().to_string());
        for i in idxs {
            out.push_str(&format!(" {i}"));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Order a planar facet's vertices by angle around their centroid.
fn order_polygon(verts: &[DVector<f64>], members: &[usize]) -> Vec<usize> {
    if members.len() <= 3 {
        return members.to_vec();
    }
    let mut centroid = DVector::zeros(3);
    for &m in members {
        centroid += &verts[m];
    }
    centroid /= members.len() as f64;
    // Plane basis from the two most separated members.
    let u0 = &verts[members[0]] - &centroid;
    let e1 = &u0 / u0.norm().max(1e-300);
    let mut e2 = DVector::zeros(3);
    let mut best = 0.0;
    for &m in &members[1..] {
        let v = &verts[m] - &centroid;
        let perp = &v - &e1 * e1.dot(&v);
        let n = perp.norm();
        if n > best {
            best = n;
            e2 = perp / n;
        }
    }
    let mut keyed: Vec<(f64, usize)> = members
        .iter()
        .map(|&m| {
            let v = &verts[m] - &centroid;
            (e2.dot(&v).atan2(e1.dot(&v)), m)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, m)| m).collect()
}
