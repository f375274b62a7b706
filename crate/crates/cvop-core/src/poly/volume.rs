//! Polytope volume by recursive pyramid decomposition.
//!
//! The volume of a d-polytope is the sum over facets of
//! `dist(centroid, facet) * vol(facet) / d`; facet volumes are computed the
//! same way inside their own affine hulls, down to segment length. The face
//! lattice is read off the incidence structure, so no vertex ordering is
//! needed in any dimension.

use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

use super::cone_dd::row_rank;
use super::{DoubleDescription, PolyError};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeResult {
    pub value: f64,
    /// Set when the affine hull has lower dimension than the ambient space;
    /// the reported volume is then 0 by convention.
    pub degenerate: bool,
}

/// Lebesgue volume of a bounded `DoubleDescription`.
pub fn polytope_volume(dd: &DoubleDescription) -> Result<VolumeResult, PolyError> {
    if !dd.vrep().rays.is_empty() {
        return Err(PolyError::Unbounded);
    }
    let verts = &dd.vrep().vertices;
    if verts.is_empty() {
        return Err(PolyError::EmptyInput);
    }
    let d = dd.dim();
    if dd.affine_dim() < d {
        return Ok(VolumeResult {
            value: 0.0,
            degenerate: true,
        });
    }
    let members: Vec<usize> = (0..verts.len()).collect();
    let frame = Frame::ambient(d);
    let value = face_volume(dd, &members, &[], &frame, d);
    Ok(VolumeResult {
        value,
        degenerate: false,
    })
}

/// Isometric chart of a face's affine hull: `local(y) = B^T (y - origin)`.
struct Frame {
    origin: DVector<f64>,
    basis: DMatrix<f64>,
}

impl Frame {
    fn ambient(d: usize) -> Frame {
        Frame {
            origin: DVector::zeros(d),
            basis: DMatrix::identity(d, d),
        }
    }

    fn local(&self, y: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * (y - &self.origin)
    }

    /// Orthonormal basis of `span{points[i] - points[0]}` with the given rank.
    fn for_points(points: &[&DVector<f64>], rank: usize) -> Frame {
        let d = points[0].len();
        let origin = points[0].clone();
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(rank);
        for p in &points[1..] {
            let mut v = *p - &origin;
            // Two Gram-Schmidt passes for stability.
            for _ in 0..2 {
                for c in &cols {
                    let s = c.dot(&v);
                    v.axpy(-s, c, 1.0);
                }
            }
            let n = v.norm();
            if n > tol::RANK {
                cols.push(v / n);
                if cols.len() == rank {
                    break;
                }
            }
        }
        let mut basis = DMatrix::zeros(d, cols.len());
        for (j, c) in cols.iter().enumerate() {
            basis.set_column(j, c);
        }
        Frame { origin, basis }
    }
}

/// Map halfspace index -> member vertices tight on it, restricted to `members`
/// and excluding halfspaces already tight on the whole face.
fn subface_candidates(
    dd: &DoubleDescription,
    members: &[usize],
    face_tight: &[usize],
) -> BTreeMap<usize, Vec<usize>> {
    let mut by_halfspace: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in members {
        for &h in &dd.vertex_incidence()[v] {
            if !face_tight.contains(&h) {
                by_halfspace.entry(h).or_default().push(v);
            }
        }
    }
    by_halfspace
}

fn face_volume(
    dd: &DoubleDescription,
    members: &[usize],
    tight: &[usize],
    frame: &Frame,
    k: usize,
) -> f64 {
    let verts = &dd.vrep().vertices;
    let local: Vec<DVector<f64>> = members.iter().map(|&v| frame.local(&verts[v])).collect();
    let local_idx: BTreeMap<usize, usize> = members
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    if k == 1 {
        let lo = local.iter().map(|x| x[0]).fold(f64::INFINITY, f64::min);
        let hi = local.iter().map(|x| x[0]).fold(f64::NEG_INFINITY, f64::max);
        return (hi - lo).max(0.0);
    }
    let mut centroid = DVector::zeros(k);
    for x in &local {
        centroid += x;
    }
    centroid /= members.len() as f64;

    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut total = 0.0;
    for (h, sub) in subface_candidates(dd, members, tight) {
        if sub.len() < k.min(2) || seen.contains(&sub) {
            continue;
        }
        let sub_local: Vec<DVector<f64>> = sub.iter().map(|&v| local[local_idx[&v]].clone()).collect();
        let rows: Vec<DVector<f64>> = sub_local[1..]
            .iter()
            .map(|x| {
                let mut r = x - &sub_local[0];
                let n = r.norm();
                if n > tol::TINY {
                    r /= n;
                }
                r
            })
            .collect();
        if row_rank(&rows, k, tol::RANK) != k - 1 {
            continue;
        }
        seen.push(sub.clone());

        // Height of the pyramid apexed at the face centroid.
        let refs: Vec<&DVector<f64>> = sub_local.iter().collect();
        let span = Frame::for_points(&refs, k - 1);
        let rel = &centroid - &sub_local[0];
        let proj = &span.basis * (span.basis.transpose() * &rel);
        let height = (rel - proj).norm();
        if height <= tol::TINY {
            continue;
        }

        let sub_verts: Vec<&DVector<f64>> = sub.iter().map(|&v| &verts[v]).collect();
        let sub_frame = Frame::for_points(&sub_verts, k - 1);
        let mut sub_tight = tight.to_vec();
        sub_tight.push(h);
        let sub_vol = face_volume(dd, &sub, &sub_tight, &sub_frame, k - 1);
        total += height * sub_vol / k as f64;
    }
    total
}
