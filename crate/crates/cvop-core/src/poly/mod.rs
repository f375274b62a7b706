//! Incremental double-description polyhedral calculus in low dimension.
//!
//! A polyhedron `{y : n_i^T y >= c_i}` is handled through its homogenization,
//! the cone `{(y,t) : n_i^T y - c_i t >= 0, t >= 0}` in one dimension more.
//! Extreme rays with positive last coordinate scale to vertices, the rest are
//! recession directions. The same machinery covers pure cones (all offsets
//! zero), vertex enumeration, cone dualization, facet extraction and volume.

mod cone_dd;
mod io;
mod volume;

pub use io::{export_off, polyhedron_from_json, polyhedron_to_json};
pub use volume::{polytope_volume, VolumeResult};

use nalgebra::DVector;

use crate::tol;
use cone_dd::{row_rank, ConeDD};

/// `{y : normal^T y >= offset}`.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: DVector<f64>, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Same halfspace with `normal` scaled to unit length.
    pub fn normalized(&self) -> Halfspace {
        let n = self.normal.norm();
        if n <= tol::TINY {
            return self.clone();
        }
        Halfspace {
            normal: &self.normal / n,
            offset: self.offset / n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HRep {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl HRep {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Self {
        HRep { dim, halfspaces }
    }

    /// True when every offset vanishes, i.e. the set is a cone.
    pub fn is_cone(&self) -> bool {
        self.halfspaces.iter().all(|h| {
            let n = h.normal.norm().max(1.0);
            h.offset.abs() <= tol::FEAS * n
        })
    }
}

#[derive(Debug, Clone)]
pub struct VRep {
    pub dim: usize,
    pub vertices: Vec<DVector<f64>>,
    /// Recession directions, stored unit length.
    pub rays: Vec<DVector<f64>>,
}

impl VRep {
    pub fn new(dim: usize, vertices: Vec<DVector<f64>>, rays: Vec<DVector<f64>>) -> Self {
        let rays = rays
            .into_iter()
            .map(|r| {
                let n = r.norm();
                if n > tol::TINY {
                    r / n
                } else {
                    r
                }
            })
            .collect();
        VRep {
            dim,
            vertices,
            rays,
        }
    }
}

/// An exposed face, addressed through the double description it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceDescriptor {
    pub dimension: usize,
    /// Halfspaces tight on every member.
    pub tight_halfspaces: Vec<usize>,
    /// Member vertex indices into the host `VRep`.
    pub vertices: Vec<usize>,
    /// Member ray indices into the host `VRep`.
    pub rays: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    DimensionMismatch,
    EmptyIntersection,
    NotLineFree,
    Infeasible,
    NotACone,
    NotPointed,
    NotSolid,
    Unbounded,
    EmptyInput,
    Inconsistent(String),
}

impl std::fmt::Display for PolyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolyError::DimensionMismatch => write!(f, "dimension mismatch"),
            PolyError::EmptyIntersection => write!(f, "intersection is empty"),
            PolyError::NotLineFree => write!(f, "polyhedron contains a line"),
            PolyError::Infeasible => write!(f, "polyhedron is empty"),
            PolyError::NotACone => write!(f, "h-representation has a nonzero offset"),
            PolyError::NotPointed => write!(f, "cone is not pointed"),
            PolyError::NotSolid => write!(f, "cone is not solid"),
            PolyError::Unbounded => write!(f, "polyhedron is unbounded"),
            PolyError::EmptyInput => write!(f, "empty input"),
            PolyError::Inconsistent(s) => write!(f, "inconsistent double description: {s}"),
        }
    }
}

impl std::error::Error for PolyError {}

/// Paired H/V representation with incidence, kept consistent incrementally.
#[derive(Debug, Clone)]
pub struct DoubleDescription {
    hrep: HRep,
    vrep: VRep,
    vertex_incidence: Vec<Vec<usize>>,
    ray_incidence: Vec<Vec<usize>>,
    cone: ConeDD,
}

fn homogenize(h: &Halfspace) -> DVector<f64> {
    let d = h.dim();
    let mut a = DVector::zeros(d + 1);
    for i in 0..d {
        a[i] = h.normal[i];
    }
    a[d] = -h.offset;
    a
}

impl DoubleDescription {
    /// Enumerate vertices and extreme rays of `{y : n_i^T y >= c_i}`.
    ///
    /// Fails with `NotLineFree` when a lineality direction survives and with
    /// `Infeasible` when the set has no point.
    pub fn from_hrep(hrep: &HRep) -> Result<Self, PolyError> {
        for h in &hrep.halfspaces {
            if h.dim() != hrep.dim {
                return Err(PolyError::DimensionMismatch);
            }
        }
        let d = hrep.dim;
        let mut cone = ConeDD::full_space(d + 1);
        let mut t_pos = DVector::zeros(d + 1);
        t_pos[d] = 1.0;
        cone.insert(&t_pos);
        for h in &hrep.halfspaces {
            cone.insert(&homogenize(h));
        }
        let mut dd = DoubleDescription {
            hrep: HRep::new(
                d,
                hrep.halfspaces.iter().map(|h| h.normalized()).collect(),
            ),
            vrep: VRep {
                dim: d,
                vertices: Vec::new(),
                rays: Vec::new(),
            },
            vertex_incidence: Vec::new(),
            ray_incidence: Vec::new(),
            cone,
        };
        dd.extract()?;
        if dd.vrep.vertices.is_empty() {
            return Err(PolyError::Infeasible);
        }
        Ok(dd)
    }

    /// Convex hull: the polyhedron `conv(vertices) + cone(rays)`.
    pub fn from_generators(vrep: &VRep) -> Result<Self, PolyError> {
        let d = vrep.dim;
        if vrep.vertices.is_empty() {
            return Err(PolyError::EmptyInput);
        }
        let mut dual = ConeDD::full_space(d + 1);
        for v in &vrep.vertices {
            if v.len() != d {
                return Err(PolyError::DimensionMismatch);
            }
            let mut g = DVector::zeros(d + 1);
            for i in 0..d {
                g[i] = v[i];
            }
            g[d] = 1.0;
            dual.insert(&g);
        }
        for r in &vrep.rays {
            if r.len() != d {
                return Err(PolyError::DimensionMismatch);
            }
            let mut g = DVector::zeros(d + 1);
            for i in 0..d {
                g[i] = r[i];
            }
            dual.insert(&g);
        }
        let mut halfspaces = Vec::new();
        for ray in &dual.rays {
            halfspaces.push(Halfspace::new(
                DVector::from_fn(d, |i, _| ray.dir[i]),
                -ray.dir[d],
            ));
        }
        // A flat hull leaves lineality in the dual cone; each basis vector
        // contributes an equality, written as a pair of halfspaces.
        for l in &dual.lineality {
            let n = DVector::from_fn(d, |i, _| l[i]);
            halfspaces.push(Halfspace::new(n.clone(), -l[d]));
            halfspaces.push(Halfspace::new(-n, l[d]));
        }
        Self::from_hrep(&HRep::new(d, halfspaces))
    }

    /// Intersection with one more halfspace; the standard double-description
    /// step on the homogenized cone.
    pub fn insert_halfspace(&self, h: &Halfspace) -> Result<Self, PolyError> {
        if h.dim() != self.hrep.dim {
            return Err(PolyError::DimensionMismatch);
        }
        let mut next = self.clone();
        next.cone.insert(&homogenize(h));
        next.hrep.halfspaces.push(h.normalized());
        next.extract()?;
        if next.vrep.vertices.is_empty() {
            return Err(PolyError::EmptyIntersection);
        }
        Ok(next)
    }

    pub fn insert_batch(&self, hs: &[Halfspace]) -> Result<Self, PolyError> {
        let mut dd = self.clone();
        for h in hs {
            if h.dim() != dd.hrep.dim {
                return Err(PolyError::DimensionMismatch);
            }
            dd.cone.insert(&homogenize(h));
            dd.hrep.halfspaces.push(h.normalized());
        }
        dd.extract()?;
        if dd.vrep.vertices.is_empty() {
            return Err(PolyError::EmptyIntersection);
        }
        Ok(dd)
    }

    /// Rebuild the public view from the homogenized cone.
    fn extract(&mut self) -> Result<(), PolyError> {
        if !self.cone.is_pointed() {
            return Err(PolyError::NotLineFree);
        }
        let d = self.hrep.dim;
        self.vrep.vertices.clear();
        self.vrep.rays.clear();
        self.vertex_incidence.clear();
        self.ray_incidence.clear();
        for ray in &self.cone.rays {
            let t = ray.dir[d];
            // Constraint 0 of the cone is the homogenizing t >= 0; shift the rest.
            let inc: Vec<usize> = ray
                .inc
                .iter()
                .filter(|&&i| i > 0)
                .map(|&i| i - 1)
                .collect();
            if t > tol::VERTEX_T {
                let v = DVector::from_fn(d, |i, _| ray.dir[i] / t);
                self.vrep.vertices.push(v);
                self.vertex_incidence.push(inc);
            } else {
                let r = DVector::from_fn(d, |i, _| ray.dir[i]);
                let n = r.norm();
                if n <= tol::TINY {
                    continue;
                }
                self.vrep.rays.push(r / n);
                self.ray_incidence.push(inc);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.hrep.dim
    }

    pub fn hrep(&self) -> &HRep {
        &self.hrep
    }

    pub fn vrep(&self) -> &VRep {
        &self.vrep
    }

    pub fn vertex_incidence(&self) -> &[Vec<usize>] {
        &self.vertex_incidence
    }

    pub fn ray_incidence(&self) -> &[Vec<usize>] {
        &self.ray_incidence
    }

    /// Dimension of the affine hull of the represented set.
    pub fn affine_dim(&self) -> usize {
        affine_rank(&self.vrep.vertices, &self.vrep.rays, self.hrep.dim)
    }

    /// Members (vertices, rays) tight on halfspace `h`.
    fn tight_members(&self, h: usize) -> (Vec<usize>, Vec<usize>) {
        let vs = (0..self.vrep.vertices.len())
            .filter(|&v| self.vertex_incidence[v].contains(&h))
            .collect();
        let rs = (0..self.vrep.rays.len())
            .filter(|&r| self.ray_incidence[r].contains(&h))
            .collect();
        (vs, rs)
    }

    /// One descriptor per irredundant halfspace. Parallel duplicates that cut
    /// the same facet are merged into a single descriptor.
    pub fn facets(&self) -> Vec<FaceDescriptor> {
        let d = self.hrep.dim;
        let mut seen: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut out: Vec<FaceDescriptor> = Vec::new();
        for h in 0..self.hrep.halfspaces.len() {
            let (vs, rs) = self.tight_members(h);
            if vs.is_empty() && rs.is_empty() {
                continue;
            }
            if let Some(k) = seen.iter().position(|m| m.0 == vs && m.1 == rs) {
                out[k].tight_halfspaces.push(h);
                continue;
            }
            let verts: Vec<&DVector<f64>> =
                vs.iter().map(|&v| &self.vrep.vertices[v]).collect();
            let rays: Vec<&DVector<f64>> = rs.iter().map(|&r| &self.vrep.rays[r]).collect();
            if affine_rank_refs(&verts, &rays, d) != d.saturating_sub(1) {
                continue;
            }
            seen.push((vs.clone(), rs.clone()));
            out.push(FaceDescriptor {
                dimension: d - 1,
                tight_halfspaces: vec![h],
                vertices: vs,
                rays: rs,
            });
        }
        out
    }

    /// Drop halfspaces that do not cut a facet. Runs after insertion batches;
    /// only meaningful (and only applied) on full-dimensional sets.
    pub fn prune_redundant(&mut self) {
        let d = self.hrep.dim;
        if self.affine_dim() < d {
            return;
        }
        let keep_h: Vec<usize> = self
            .facets()
            .iter()
            .map(|f| f.tight_halfspaces[0])
            .collect();
        if keep_h.len() == self.hrep.halfspaces.len() {
            return;
        }
        // Cone constraint 0 is the homogenizer, always kept.
        let mut keep_cone = vec![0usize];
        keep_cone.extend(keep_h.iter().map(|&h| h + 1));
        self.cone.retain_normals(&keep_cone);
        self.hrep.halfspaces = keep_h
            .iter()
            .map(|&h| self.hrep.halfspaces[h].clone())
            .collect();
        self.extract().expect("pruning cannot introduce lines");
    }

    /// Recompute incidence from scratch and verify stored tight sets,
    /// feasibility of every member and vertex rank. Test support.
    pub fn check_consistency(&self) -> Result<(), PolyError> {
        let d = self.hrep.dim;
        for (v, inc) in self.vrep.vertices.iter().zip(&self.vertex_incidence) {
            for (h, hs) in self.hrep.halfspaces.iter().enumerate() {
                let slack = hs.normal.dot(v) - hs.offset;
                if slack < -tol::FEAS * 10.0 {
                    return Err(PolyError::Inconsistent(format!(
                        "vertex violates halfspace {h} by {slack:e}"
                    )));
                }
                if inc.contains(&h) && slack.abs() > tol::FEAS * 10.0 {
                    return Err(PolyError::Inconsistent(format!(
                        "stored incidence {h} not tight ({slack:e})"
                    )));
                }
            }
            let rows: Vec<DVector<f64>> = inc
                .iter()
                .map(|&h| self.hrep.halfspaces[h].normal.clone())
                .collect();
            if row_rank(&rows, d, tol::RANK) < d {
                return Err(PolyError::Inconsistent(
                    "vertex tight on fewer than dim independent halfspaces".into(),
                ));
            }
        }
        for (r, inc) in self.vrep.rays.iter().zip(&self.ray_incidence) {
            for (h, hs) in self.hrep.halfspaces.iter().enumerate() {
                let slack = hs.normal.dot(r);
                if slack < -tol::FEAS * 10.0 {
                    return Err(PolyError::Inconsistent(format!(
                        "ray violates halfspace {h} by {slack:e}"
                    )));
                }
                if inc.contains(&h) && slack.abs() > tol::FEAS * 10.0 {
                    return Err(PolyError::Inconsistent(format!(
                        "stored ray incidence {h} not tight ({slack:e})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Vertices and extreme rays of a general H-representation.
pub fn enumerate_vertices(hrep: &HRep) -> Result<DoubleDescription, PolyError> {
    DoubleDescription::from_hrep(hrep)
}

/// Extreme directions of a pointed cone given by homogeneous halfspaces.
pub fn extreme_directions(cone_hrep: &HRep) -> Result<VRep, PolyError> {
    if !cone_hrep.is_cone() {
        return Err(PolyError::NotACone);
    }
    let dd = DoubleDescription::from_hrep(cone_hrep).map_err(|e| match e {
        PolyError::NotLineFree => PolyError::NotPointed,
        other => other,
    })?;
    Ok(dd.vrep.clone())
}

/// The cone `{y : g^T y >= 0}` for every generator `g`, as a full double
/// description. Errors when the input cone is not solid (the dual would
/// contain a line) or not pointed (the dual would not be solid).
pub fn dualize_cone(generators: &VRep) -> Result<DoubleDescription, PolyError> {
    let d = generators.dim;
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    for v in &generators.vertices {
        if v.norm() > tol::FEAS {
            dirs.push(v.clone());
        }
    }
    dirs.extend(generators.rays.iter().cloned());
    if dirs.is_empty() {
        return Err(PolyError::EmptyInput);
    }
    let hrep = HRep::new(
        d,
        dirs.iter()
            .map(|g| Halfspace::new(g.clone(), 0.0))
            .collect(),
    );
    let dd = DoubleDescription::from_hrep(&hrep).map_err(|e| match e {
        PolyError::NotLineFree => PolyError::NotSolid,
        other => other,
    })?;
    if row_rank(&dd.vrep.rays, d, tol::RANK) < d {
        return Err(PolyError::NotPointed);
    }
    Ok(dd)
}

/// Double description of `cone(dirs)` itself (dualize twice).
pub fn cone_from_generators(dirs: &[DVector<f64>], dim: usize) -> Result<DoubleDescription, PolyError> {
    if dirs.is_empty() {
        return Err(PolyError::EmptyInput);
    }
    let mut dual = ConeDD::full_space(dim);
    for g in dirs {
        if g.len() != dim {
            return Err(PolyError::DimensionMismatch);
        }
        dual.insert(g);
    }
    let mut halfspaces: Vec<Halfspace> = dual
        .rays
        .iter()
        .map(|r| Halfspace::new(r.dir.clone(), 0.0))
        .collect();
    for l in &dual.lineality {
        halfspaces.push(Halfspace::new(l.clone(), 0.0));
        halfspaces.push(Halfspace::new(-l.clone(), 0.0));
    }
    DoubleDescription::from_hrep(&HRep::new(dim, halfspaces)).map_err(|e| match e {
        PolyError::NotLineFree => PolyError::NotPointed,
        other => other,
    })
}

/// Membership within absolute tolerance `tol` on unit-normalized normals.
pub fn contains(hrep: &HRep, point: &DVector<f64>, tol_: f64) -> Result<bool, PolyError> {
    if point.len() != hrep.dim {
        return Err(PolyError::DimensionMismatch);
    }
    for h in &hrep.halfspaces {
        let hn = h.normalized();
        if hn.normal.dot(point) - hn.offset < -tol_ {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank of the direction space of `conv(vertices) + cone(rays)`.
pub(crate) fn affine_rank(
    vertices: &[DVector<f64>],
    rays: &[DVector<f64>],
    dim: usize,
) -> usize {
    let vrefs: Vec<&DVector<f64>> = vertices.iter().collect();
    let rrefs: Vec<&DVector<f64>> = rays.iter().collect();
    affine_rank_refs(&vrefs, &rrefs, dim)
}

pub(crate) fn affine_rank_refs(
    vertices: &[&DVector<f64>],
    rays: &[&DVector<f64>],
    dim: usize,
) -> usize {
    let mut rows: Vec<DVector<f64>> = Vec::new();
    if let Some(v0) = vertices.first() {
        for v in &vertices[1..] {
            let mut d = *v - *v0;
            let n = d.norm();
            if n > tol::TINY {
                d /= n;
                rows.push(d);
            }
        }
    }
    for r in rays {
        rows.push((*r).clone());
    }
    row_rank(&rows, dim, tol::RANK)
}

#[cfg(test)]
mod tests;
