//! Instance files. Numbers round-trip bit-exactly through serde_json's
//! shortest-representation float formatting.

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use super::{Family, ProblemInstance, ScalarError};
use crate::cones::{NormSpec, OrderingCone};
use crate::poly::{polyhedron_from_json, polyhedron_to_json, VRep};

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, ScalarError> {
    let nr = rows.len();
    let nc = rows.first().map(Vec::len).unwrap_or(0);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(ScalarError::BadInstance("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

fn cone_to_json(cone: &OrderingCone) -> Value {
    match cone.name() {
        Some(name) => json!({ "preset": name }),
        None => {
            let gens: Vec<Vec<f64>> = cone
                .primal_generators()
                .iter()
                .map(|g| g.iter().copied().collect())
                .collect();
            json!({ "generators": gens })
        }
    }
}

pub fn instance_to_json(p: &ProblemInstance) -> Result<Value, ScalarError> {
    let mut doc = json!({
        "id": p.id,
        "family": p.family.name(),
        "q": p.q,
        "n": p.n,
        "cone": cone_to_json(&p.cone),
        "norm": p.norm.name(),
    });
    if let Some(seed) = p.seed {
        doc["seed"] = json!(seed);
    }
    match &p.family {
        Family::Ellipsoid { a, p: pm } => {
            doc["A"] = json!(matrix_rows(a));
            doc["P"] = json!(matrix_rows(pm));
        }
        Family::Ball { center } => {
            let e: Vec<f64> = center.iter().copied().collect();
            doc["e"] = json!(e);
        }
        Family::QuadraticBox { anchors, polytope } => {
            let rows: Vec<Vec<f64>> = anchors
                .iter()
                .map(|a| a.iter().copied().collect())
                .collect();
            doc["anchors"] = json!(rows);
            let empty = VRep::new(polytope.dim, vec![], vec![]);
            doc["polytope"] = polyhedron_to_json(polytope, &empty);
        }
        Family::External(_) => {
            return Err(ScalarError::BadInstance(
                "external instances are not serializable".into(),
            ))
        }
    }
    Ok(doc)
}

fn get_usize(v: &Value, key: &str) -> Result<usize, ScalarError> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| ScalarError::BadInstance(format!("missing {key}")))
}

fn get_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, ScalarError> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| ScalarError::BadInstance(format!("missing {key}")))
}

fn rows_of(v: &Value, key: &str) -> Result<Vec<Vec<f64>>, ScalarError> {
    let arr = v
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| ScalarError::BadInstance(format!("missing {key}")))?;
    arr.iter()
        .map(|row| {
            row.as_array()
                .and_then(|r| r.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>())
                .ok_or_else(|| ScalarError::BadInstance(format!("bad row in {key}")))
        })
        .collect()
}

pub fn instance_from_json(v: &Value) -> Result<ProblemInstance, ScalarError> {
    let id = get_str(v, "id")?.to_string();
    let family = get_str(v, "family")?.to_string();
    let q = get_usize(v, "q")?;
    let n = get_usize(v, "n")?;
    let norm = NormSpec::parse(get_str(v, "norm")?)?;
    let cone_val = v
        .get("cone")
        .ok_or_else(|| ScalarError::BadInstance("missing cone".into()))?;
    let cone = if let Some(preset) = cone_val.get("preset").and_then(Value::as_str) {
        OrderingCone::preset(preset, q, &norm)?
    } else {
        let gens = rows_of(cone_val, "generators")?;
        let gens: Vec<DVector<f64>> = gens
            .iter()
            .map(|g| DVector::from_column_slice(g))
            .collect();
        OrderingCone::from_generators(&gens, &norm)?
    };
    let seed = v.get("seed").and_then(Value::as_u64);
    match family.as_str() {
        "ellipsoid" => {
            let a = matrix_from_rows(&rows_of(v, "A")?)?;
            let p = matrix_from_rows(&rows_of(v, "P")?)?;
            if a.nrows() != n || a.ncols() != q {
                return Err(ScalarError::BadInstance("A must be n x q".into()));
            }
            ProblemInstance::ellipsoid(id, a, p, cone, norm, seed)
        }
        "ball" => {
            let e = v
                .get("e")
                .and_then(|x| x.as_array())
                .and_then(|r| r.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>())
                .ok_or_else(|| ScalarError::BadInstance("missing e".into()))?;
            let mut inst = ProblemInstance::ball(id, q, cone, norm)?;
            inst.family = Family::Ball {
                center: DVector::from_column_slice(&e),
            };
            inst.seed = seed;
            Ok(inst)
        }
        "quadratic_box" => {
            let anchors = rows_of(v, "anchors")?
                .iter()
                .map(|a| DVector::from_column_slice(a))
                .collect::<Vec<_>>();
            let poly_val = v
                .get("polytope")
                .ok_or_else(|| ScalarError::BadInstance("missing polytope".into()))?;
            let (hrep, _) = polyhedron_from_json(poly_val)
                .map_err(|e| ScalarError::BadInstance(e.to_string()))?;
            let mut inst = ProblemInstance::quadratic_box(id, cone, norm)?;
            inst.family = Family::QuadraticBox {
                anchors,
                polytope: hrep,
            };
            inst.seed = seed;
            Ok(inst)
        }
        other => Err(ScalarError::BadInstance(format!("unknown family `{other}`"))),
    }
}
