//! Geometric duality between upper sets in `R^q` and lower cones in
//! `R^{q+1}`: the polar transforms, the inclusion-reversing face maps and the
//! conversion to the fixed-direction dual image in `R^q`.

use nalgebra::{DMatrix, DVector};

use crate::cones::{ConeError, OrderingCone};
use crate::poly::{
    dualize_cone, enumerate_vertices, DoubleDescription, FaceDescriptor, HRep, Halfspace,
    PolyError, VRep,
};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub enum DualityError {
    EmptyInput,
    /// Every generator has `w = 0`; the induced upper set is all of `R^q`.
    AllVertical,
    /// The zero face maps to the whole upper set and sits outside the
    /// face bijection.
    TrivialFace,
    NotMaximalFace,
    NotMinimalFace,
    NoPositiveSlice,
    InconsistentFrame,
    ImproperSet,
    Poly(PolyError),
    Cone(ConeError),
}

impl std::fmt::Display for DualityError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DualityError::EmptyInput => write!(f, "empty input"),
            DualityError::AllVertical => write!(f, "all generators are vertical"),
            DualityError::TrivialFace => write!(f, "zero face maps to the whole set"),
            DualityError::NotMaximalFace => write!(f, "face is not K-maximal"),
            DualityError::NotMinimalFace => write!(f, "face is not weakly C-minimal"),
            DualityError::NoPositiveSlice => write!(f, "no generator has positive c-component"),
            DualityError::InconsistentFrame => write!(f, "frame is not orthogonal"),
            DualityError::ImproperSet => write!(f, "set is not a proper subset"),
            DualityError::Poly(e) => write!(f, "{e}"),
            DualityError::Cone(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DualityError {}

impl From<PolyError> for DualityError {
    fn from(e: PolyError) -> Self {
        DualityError::Poly(e)
    }
}

/// Closed convex set `A = A + C` in `R^q`.
#[derive(Debug, Clone)]
pub struct UpperSet {
    pub dd: DoubleDescription,
}

impl UpperSet {
    /// Wrap a double description, verifying the recession cone matches `C`.
    pub fn new(dd: DoubleDescription, cone: &OrderingCone) -> Result<UpperSet, DualityError> {
        let rays = &dd.vrep().rays;
        let gens = cone.primal_generators();
        if rays.len() != gens.len() {
            return Err(DualityError::ImproperSet);
        }
        for g in gens {
            let gn = g / g.norm();
            if !rays.iter().any(|r| (r - &gn).norm() <= 1e-6) {
                return Err(DualityError::ImproperSet);
            }
        }
        Ok(UpperSet { dd })
    }

    pub fn from_dd(dd: DoubleDescription) -> UpperSet {
        UpperSet { dd }
    }
}

/// Closed convex cone `A = A - K` in `R^{q+1}` contained in `C+ x R`.
#[derive(Debug, Clone)]
pub struct LowerCone {
    pub dd: DoubleDescription,
}

impl LowerCone {
    pub fn new(dd: DoubleDescription) -> Result<LowerCone, DualityError> {
        let qp1 = dd.dim();
        if !dd.hrep().is_cone() {
            return Err(DualityError::Poly(PolyError::NotACone));
        }
        let mut down = DVector::zeros(qp1);
        down[qp1 - 1] = -1.0;
        let has_down = dd.vrep().rays.iter().any(|r| (r - &down).norm() <= 1e-7);
        if !has_down {
            return Err(DualityError::ImproperSet);
        }
        Ok(LowerCone { dd })
    }

    pub fn from_dd(dd: DoubleDescription) -> LowerCone {
        LowerCone { dd }
    }
}

/// `D_P = (P x {-1})^+`: lift vertices with -1 and rays with 0, dualize.
pub fn lower_from_upper(upper: &UpperSet) -> Result<LowerCone, DualityError> {
    let dd = &upper.dd;
    let q = dd.dim();
    if dd.vrep().vertices.is_empty() {
        return Err(DualityError::EmptyInput);
    }
    if dd.hrep().halfspaces.is_empty() {
        return Err(DualityError::ImproperSet);
    }
    let mut gens: Vec<DVector<f64>> = Vec::new();
    for v in &dd.vrep().vertices {
        gens.push(DVector::from_fn(q + 1, |i, _| if i < q { v[i] } else { -1.0 }));
    }
    for r in &dd.vrep().rays {
        gens.push(DVector::from_fn(q + 1, |i, _| if i < q { r[i] } else { 0.0 }));
    }
    let dual = dualize_cone(&VRep::new(q + 1, vec![DVector::zeros(q + 1)], gens))?;
    Ok(LowerCone { dd: dual })
}

/// `P_D`: one halfspace `{y : w^T y >= alpha}` per extreme direction with
/// nonzero `w` (considering the extreme directions is sufficient).
pub fn upper_from_lower(lower: &LowerCone) -> Result<UpperSet, DualityError> {
    let dd = &lower.dd;
    let qp1 = dd.dim();
    let q = qp1 - 1;
    let mut halfspaces = Vec::new();
    for dir in &dd.vrep().rays {
        let w = DVector::from_fn(q, |i, _| dir[i]);
        if w.norm() <= tol::TINY {
            continue;
        }
        halfspaces.push(Halfspace::new(w, dir[q]));
    }
    if halfspaces.is_empty() {
        return Err(DualityError::AllVertical);
    }
    let dd = enumerate_vertices(&HRep::new(q, halfspaces))?;
    Ok(UpperSet { dd })
}

/// Face image under Ψ, with the whole-set flag for the zero face.
#[derive(Debug, Clone)]
pub struct PsiImage {
    pub face: FaceDescriptor,
    pub whole_set: bool,
}

fn is_k_maximal(lower: &DoubleDescription, face: &FaceDescriptor) -> bool {
    let qp1 = lower.dim();
    face.tight_halfspaces
        .iter()
        .any(|&h| lower.hrep().halfspaces[h].normal[qp1 - 1] < -tol::ZERO)
}

/// `Ψ(F*) = ∩_{(w,alpha) in F*} H(w,alpha) ∩ P`, computed on incidence.
pub fn psi(
    lower: &LowerCone,
    face_star: &FaceDescriptor,
    upper: &UpperSet,
) -> Result<PsiImage, DualityError> {
    let qp1 = lower.dd.dim();
    let q = qp1 - 1;
    let dirs: Vec<&DVector<f64>> = face_star
        .rays
        .iter()
        .map(|&r| &lower.dd.vrep().rays[r])
        .collect();
    let weighted: Vec<&DVector<f64>> = dirs
        .iter()
        .copied()
        .filter(|d| DVector::from_fn(q, |i, _| d[i]).norm() > tol::TINY)
        .collect();
    if weighted.is_empty() {
        // The zero face of the lower cone maps to the whole upper set.
        return Ok(PsiImage {
            face: FaceDescriptor {
                dimension: upper.dd.affine_dim(),
                tight_halfspaces: vec![],
                vertices: (0..upper.dd.vrep().vertices.len()).collect(),
                rays: (0..upper.dd.vrep().rays.len()).collect(),
            },
            whole_set: true,
        });
    }
    if !is_k_maximal(&lower.dd, face_star) {
        return Err(DualityError::NotMaximalFace);
    }

    let phi = |y: &DVector<f64>, d: &DVector<f64>, hom: bool| -> f64 {
        let mut s = 0.0;
        for i in 0..q {
            s += d[i] * y[i];
        }
        if hom {
            s
        } else {
            s - d[q]
        }
    };
    let scale = |y: &DVector<f64>| 1.0 + y.amax();
    let verts: Vec<usize> = (0..upper.dd.vrep().vertices.len())
        .filter(|&vi| {
            let y = &upper.dd.vrep().vertices[vi];
            weighted
                .iter()
                .all(|d| phi(y, d, false).abs() <= tol::FEAS * 10.0 * scale(y))
        })
        .collect();
    let rays: Vec<usize> = (0..upper.dd.vrep().rays.len())
        .filter(|&ri| {
            let r = &upper.dd.vrep().rays[ri];
            weighted.iter().all(|d| phi(r, d, true).abs() <= tol::FEAS * 10.0)
        })
        .collect();

    let member_vs: Vec<&DVector<f64>> =
        verts.iter().map(|&v| &upper.dd.vrep().vertices[v]).collect();
    let member_rs: Vec<&DVector<f64>> = rays.iter().map(|&r| &upper.dd.vrep().rays[r]).collect();
    let dimension = crate::poly::affine_rank_refs(&member_vs, &member_rs, q);
    let tight = tight_on_all(&upper.dd, &verts, &rays);

    Ok(PsiImage {
        face: FaceDescriptor {
            dimension,
            tight_halfspaces: tight,
            vertices: verts,
            rays,
        },
        whole_set: false,
    })
}

fn tight_on_all(dd: &DoubleDescription, verts: &[usize], rays: &[usize]) -> Vec<usize> {
    (0..dd.hrep().halfspaces.len())
        .filter(|&h| {
            verts.iter().all(|v| dd.vertex_incidence()[*v].contains(&h))
                && rays.iter().all(|r| dd.ray_incidence()[*r].contains(&h))
        })
        .collect()
}

/// `Ψ*(F) = ∩_{y in F} H*(y) ∩ D`, the inverse face map.
pub fn psi_star(
    upper: &UpperSet,
    face: &FaceDescriptor,
    lower: &LowerCone,
) -> Result<FaceDescriptor, DualityError> {
    let qp1 = lower.dd.dim();
    let q = qp1 - 1;
    let member_vs: Vec<&DVector<f64>> = face
        .vertices
        .iter()
        .map(|&v| &upper.dd.vrep().vertices[v])
        .collect();
    let member_rs: Vec<&DVector<f64>> =
        face.rays.iter().map(|&r| &upper.dd.vrep().rays[r]).collect();
    if member_vs.is_empty() && member_rs.is_empty() {
        return Err(DualityError::EmptyInput);
    }
    // Sampled weak-minimality check: no member may strictly dominate another.
    let cone_dirs: Vec<&Halfspace> = lower.dd.hrep().halfspaces.iter().collect();
    let _ = cone_dirs;
    for a in &member_vs {
        for b in &member_vs {
            let d = *a - *b;
            if d.norm() > tol::FEAS {
                let strictly_dominates = (0..q).all(|i| d[i] < -tol::FEAS);
                if strictly_dominates && face.vertices.len() > 1 && upper_contains_shift(upper, a) {
                    return Err(DualityError::NotMinimalFace);
                }
            }
        }
    }

    let rays: Vec<usize> = (0..lower.dd.vrep().rays.len())
        .filter(|&ri| {
            let d = &lower.dd.vrep().rays[ri];
            let ok_v = member_vs.iter().all(|y| {
                let mut s = -d[q];
                for i in 0..q {
                    s += d[i] * y[i];
                }
                s.abs() <= tol::FEAS * 10.0 * (1.0 + y.amax())
            });
            let ok_r = member_rs.iter().all(|r| {
                let mut s = 0.0;
                for i in 0..q {
                    s += d[i] * r[i];
                }
                s.abs() <= tol::FEAS * 10.0
            });
            ok_v && ok_r
        })
        .collect();
    let verts: Vec<usize> = (0..lower.dd.vrep().vertices.len())
        .filter(|&vi| lower.dd.vrep().vertices[vi].norm() <= tol::FEAS)
        .collect();

    let member_dirs: Vec<&DVector<f64>> =
        rays.iter().map(|&r| &lower.dd.vrep().rays[r]).collect();
    let dimension = crate::poly::affine_rank_refs(&[], &member_dirs, qp1);
    let tight = tight_on_all(&lower.dd, &verts, &rays);
    let out = FaceDescriptor {
        dimension,
        tight_halfspaces: tight,
        vertices: verts,
        rays,
    };
    if out.rays.is_empty() {
        return Err(DualityError::TrivialFace);
    }
    if !is_k_maximal(&lower.dd, &out) {
        return Err(DualityError::NotMaximalFace);
    }
    Ok(out)
}

/// True when `y - small * interior_direction` stays in the set, i.e. `y` is
/// not weakly minimal. Cheap sampled check used by `psi_star`.
fn upper_contains_shift(upper: &UpperSet, y: &DVector<f64>) -> bool {
    let q = upper.dd.dim();
    let probe = DVector::from_element(q, -1e-5) + y;
    crate::poly::contains(upper.dd.hrep(), &probe, 0.0).unwrap_or(false)
}

/// All K-maximal exposed faces of the lower cone, coarsest first: facets,
/// then pairwise facet intersections, then extreme rays. Deduplicated by
/// member set.
pub fn k_maximal_faces(lower: &LowerCone) -> Vec<FaceDescriptor> {
    let dd = &lower.dd;
    let facets: Vec<FaceDescriptor> = dd
        .facets()
        .into_iter()
        .filter(|f| is_k_maximal(dd, f))
        .collect();
    let mut out: Vec<FaceDescriptor> = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let push = |f: FaceDescriptor, seen: &mut Vec<Vec<usize>>, out: &mut Vec<FaceDescriptor>| {
        if !f.rays.is_empty() && !seen.contains(&f.rays) {
            seen.push(f.rays.clone());
            out.push(f);
        }
    };
    for f in &facets {
        push(f.clone(), &mut seen, &mut out);
    }
    for (i, a) in facets.iter().enumerate() {
        for b in facets.iter().skip(i + 1) {
            let rays: Vec<usize> = a
                .rays
                .iter()
                .filter(|r| b.rays.contains(r))
                .copied()
                .collect();
            if rays.is_empty() {
                continue;
            }
            let dirs: Vec<&DVector<f64>> = rays.iter().map(|&r| &dd.vrep().rays[r]).collect();
            let dimension = crate::poly::affine_rank_refs(&[], &dirs, dd.dim());
            let verts = a
                .vertices
                .iter()
                .filter(|v| b.vertices.contains(v))
                .copied()
                .collect();
            let f = FaceDescriptor {
                dimension,
                tight_halfspaces: tight_on_all(dd, &[], &rays),
                vertices: verts,
                rays,
            };
            if is_k_maximal(dd, &f) {
                push(f, &mut seen, &mut out);
            }
        }
    }
    for (ri, dir) in dd.vrep().rays.iter().enumerate() {
        let q = dd.dim() - 1;
        if DVector::from_fn(q, |i, _| dir[i]).norm() <= tol::TINY {
            continue;
        }
        let rays = vec![ri];
        let f = FaceDescriptor {
            dimension: 1,
            tight_halfspaces: tight_on_all(dd, &[], &rays),
            vertices: (0..dd.vrep().vertices.len())
                .filter(|&v| dd.vrep().vertices[v].norm() <= tol::FEAS)
                .collect(),
            rays,
        };
        if is_k_maximal(dd, &f) {
            push(f, &mut seen, &mut out);
        }
    }
    out
}

/// The fixed-direction dual image: `D^H` in `R^{q-1} x R` together with the
/// frame that produced it.
#[derive(Debug, Clone)]
pub struct HeydeDual {
    pub c: DVector<f64>,
    /// Columns complete `c` to the orthogonal matrix `T = [E c]`.
    pub e_frame: DMatrix<f64>,
    pub dd: DoubleDescription,
}

/// Deterministic completion of `c` to an orthonormal basis, standard basis
/// vectors first.
pub fn orthogonal_frame(c: &DVector<f64>) -> Result<DMatrix<f64>, DualityError> {
    let q = c.len();
    let cn = c.norm();
    if cn <= tol::TINY {
        return Err(DualityError::InconsistentFrame);
    }
    let c = c / cn;
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(q - 1);
    for j in 0..q {
        if cols.len() == q - 1 {
            break;
        }
        let mut e = DVector::zeros(q);
        e[j] = 1.0;
        let mut v = e;
        for _ in 0..2 {
            let s = c.dot(&v);
            v.axpy(-s, &c, 1.0);
            for col in &cols {
                let s = col.dot(&v);
                v.axpy(-s, col, 1.0);
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v / n);
        }
    }
    if cols.len() != q - 1 {
        return Err(DualityError::InconsistentFrame);
    }
    let mut e_frame = DMatrix::zeros(q, q - 1);
    for (j, col) in cols.iter().enumerate() {
        e_frame.set_column(j, col);
    }
    Ok(e_frame)
}

/// Slice the lower cone at `c^T w = 1` and project: generator `(w, alpha)`
/// with `c^T w > 0` maps to the vertex `(E^T w / c^T w, alpha / c^T w)`.
pub fn heyde_from_conic(lower: &LowerCone, c: &DVector<f64>) -> Result<HeydeDual, DualityError> {
    let qp1 = lower.dd.dim();
    let q = qp1 - 1;
    if c.len() != q {
        return Err(DualityError::InconsistentFrame);
    }
    let cn = c.norm();
    if cn <= tol::TINY {
        return Err(DualityError::InconsistentFrame);
    }
    let c = c / cn;
    let e_frame = orthogonal_frame(&c)?;
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    let mut rays: Vec<DVector<f64>> = Vec::new();
    for dir in &lower.dd.vrep().rays {
        let w = DVector::from_fn(q, |i, _| dir[i]);
        let alpha = dir[q];
        let s_c = c.dot(&w);
        let tw = e_frame.transpose() * &w;
        if s_c > tol::ZERO {
            let mut v = DVector::zeros(q);
            for i in 0..q - 1 {
                v[i] = tw[i] / s_c;
            }
            v[q - 1] = alpha / s_c;
            vertices.push(v);
        } else if s_c.abs() <= tol::ZERO {
            let mut r = DVector::zeros(q);
            for i in 0..q - 1 {
                r[i] = tw[i];
            }
            r[q - 1] = alpha;
            if r.norm() > tol::TINY {
                rays.push(r);
            }
        }
    }
    if vertices.is_empty() {
        return Err(DualityError::NoPositiveSlice);
    }
    let dd = DoubleDescription::from_generators(&VRep::new(q, vertices, rays))?;
    Ok(HeydeDual { c, e_frame, dd })
}

/// Lift every vertex `(t, s)` to `(E t + c, s)`, every ray `(t, s)` to
/// `(E t, s)`, re-adjoin the downward ray and take the conic hull.
pub fn conic_from_heyde(heyde: &HeydeDual) -> Result<LowerCone, DualityError> {
    let q = heyde.c.len();
    let t = {
        let mut t = DMatrix::zeros(q, q);
        for j in 0..q - 1 {
            t.set_column(j, &heyde.e_frame.column(j).into_owned());
        }
        t.set_column(q - 1, &heyde.c);
        t
    };
    let gram = t.transpose() * &t;
    if (&gram - DMatrix::identity(q, q)).amax() > 1e-8 {
        return Err(DualityError::InconsistentFrame);
    }
    let mut gens: Vec<DVector<f64>> = Vec::new();
    let lift = |tvec: &DVector<f64>, with_c: bool| -> DVector<f64> {
        let head = DVector::from_fn(q - 1, |i, _| tvec[i]);
        let mut w = &heyde.e_frame * head;
        if with_c {
            w += &heyde.c;
        }
        DVector::from_fn(q + 1, |i, _| if i < q { w[i] } else { tvec[q - 1] })
    };
    for v in &heyde.dd.vrep().vertices {
        gens.push(lift(v, true));
    }
    for r in &heyde.dd.vrep().rays {
        gens.push(lift(r, false));
    }
    let mut down = DVector::zeros(q + 1);
    down[q] = -1.0;
    gens.push(down);
    let dd = crate::poly::cone_from_generators(&gens, q + 1)?;
    Ok(LowerCone { dd })
}
