//! Incremental double description of a polyhedral cone `{x : a_i^T x >= 0}`.
//!
//! The engine keeps an explicit lineality basis next to the extreme rays, so
//! insertion can start from the full space and stays valid while the cone is
//! not yet pointed. Adjacency of rays is decided by the algebraic rank of
//! their common tight constraints, which is robust under degeneracy.

use nalgebra::DVector;

use crate::tol;

#[derive(Debug, Clone)]
pub(crate) struct Ray {
    /// Unit-length direction.
    pub dir: DVector<f64>,
    /// Sorted indices of inserted normals the ray is tight on.
    pub inc: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct ConeDD {
    pub dim: usize,
    /// Inserted halfspace normals, unit length, in insertion order.
    pub normals: Vec<DVector<f64>>,
    /// Basis of the current lineality space.
    pub lineality: Vec<DVector<f64>>,
    pub rays: Vec<Ray>,
}

/// Rank of a set of row vectors by Gaussian elimination with partial pivoting.
pub(crate) fn row_rank(rows: &[DVector<f64>], dim: usize, tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<DVector<f64>> = rows.to_vec();
    let mut rank = 0;
    let mut col = 0;
    while rank < m.len() && col < dim {
        let (best, best_abs) = m[rank..]
            .iter()
            .enumerate()
            .map(|(i, r)| (i + rank, r[col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best_abs <= tol {
            col += 1;
            continue;
        }
        m.swap(rank, best);
        let pivot = m[rank][col];
        let pivot_row = m[rank].clone();
        for r in m.iter_mut().skip(rank + 1) {
            let factor = r[col] / pivot;
            if factor != 0.0 {
                r.axpy(-factor, &pivot_row, 1.0);
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Sorted-vector intersection.
fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl ConeDD {
    /// Full space `R^dim`.
    pub fn full_space(dim: usize) -> Self {
        let lineality = (0..dim)
            .map(|j| {
                let mut e = DVector::zeros(dim);
                e[j] = 1.0;
                e
            })
            .collect();
        ConeDD {
            dim,
            normals: Vec::new(),
            lineality,
            rays: Vec::new(),
        }
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    /// Recompute a ray's tight set against every inserted normal.
    fn fresh_incidence(&self, dir: &DVector<f64>) -> Vec<usize> {
        self.normals
            .iter()
            .enumerate()
            .filter(|(_, a)| a.dot(dir).abs() <= tol::FEAS)
            .map(|(i, _)| i)
            .collect()
    }

    /// Intersect the cone with `{x : a^T x >= 0}`. `a` need not be normalized.
    pub fn insert(&mut self, a: &DVector<f64>) {
        let norm = a.norm();
        if norm <= tol::TINY {
            // Trivial full-space constraint.
            self.normals.push(DVector::zeros(self.dim));
            for r in &mut self.rays {
                r.inc.push(self.normals.len() - 1);
            }
            return;
        }
        let a = a / norm;
        let new_idx = self.normals.len();

        // Products with the lineality basis. If any is nonzero the lineality
        // space is cut down by one and a new ray appears.
        let lin_prods: Vec<f64> = self.lineality.iter().map(|l| a.dot(l)).collect();
        let cut = lin_prods
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .filter(|(_, s)| s.abs() > tol::ZERO)
            .map(|(j, s)| (j, *s));

        if let Some((j_star, s_star)) = cut {
            let l_star = self.lineality.remove(j_star);
            let prods: Vec<f64> = self
                .lineality
                .iter()
                .map(|l| a.dot(l))
                .collect();
            for (l, s) in self.lineality.iter_mut().zip(prods) {
                l.axpy(-s / s_star, &l_star, 1.0);
                let n = l.norm();
                if n > tol::TINY {
                    *l /= n;
                }
            }
            // Old rays slide into the hyperplane of `a`; they keep their
            // previous tight sets and gain the new constraint.
            for r in &mut self.rays {
                let s = a.dot(&r.dir);
                r.dir.axpy(-s / s_star, &l_star, 1.0);
                let n = r.dir.norm();
                if n > tol::TINY {
                    r.dir /= n;
                }
                r.inc.push(new_idx);
            }
            let mut dir = l_star * s_star.signum();
            dir /= dir.norm();
            let inc = (0..new_idx).collect();
            self.rays.push(Ray { dir, inc });
            self.normals.push(a);
            return;
        }

        // Classify rays against the cut.
        let prods: Vec<f64> = self.rays.iter().map(|r| a.dot(&r.dir)).collect();
        let pos: Vec<usize> = (0..self.rays.len())
            .filter(|&i| prods[i] > tol::ZERO)
            .collect();
        let neg: Vec<usize> = (0..self.rays.len())
            .filter(|&i| prods[i] < -tol::ZERO)
            .collect();

        let mut new_rays: Vec<Ray> = Vec::new();
        if !neg.is_empty() && !pos.is_empty() {
            // Adjacent pairs generate the rays on the cutting hyperplane.
            // A pair is adjacent when its shared tight set has the rank of a
            // two-dimensional face and no third ray is tight on all of it;
            // the combinatorial check arbitrates where noise inflates the
            // rank of nearly-degenerate constraint bundles.
            let needed = self.dim - self.lineality.len() - 2;
            for &p in &pos {
                for &n in &neg {
                    let common = intersect_sorted(&self.rays[p].inc, &self.rays[n].inc);
                    if common.len() < needed {
                        continue;
                    }
                    let rows: Vec<DVector<f64>> =
                        common.iter().map(|&i| self.normals[i].clone()).collect();
                    if row_rank(&rows, self.dim, tol::RANK) < needed {
                        continue;
                    }
                    let dominated = self.rays.iter().enumerate().any(|(k, r)| {
                        k != p && k != n && is_subset(&common, &r.inc)
                    });
                    if dominated {
                        continue;
                    }
                    let mut dir =
                        &self.rays[n].dir * prods[p] - &self.rays[p].dir * prods[n];
                    let nn = dir.norm();
                    if nn <= tol::TINY {
                        continue;
                    }
                    dir /= nn;
                    new_rays.push(Ray {
                        dir,
                        inc: Vec::new(),
                    });
                }
            }
        }

        self.normals.push(a);
        let mut kept: Vec<Ray> = Vec::new();
        for (i, r) in self.rays.drain(..).enumerate() {
            if prods[i] < -tol::ZERO {
                continue;
            }
            let mut r = r;
            if prods[i] <= tol::ZERO {
                r.inc.push(new_idx);
            }
            kept.push(r);
        }
        // Deduplicate fresh rays against kept rays and each other, then give
        // them an exact tight set.
        for mut nr in new_rays {
            let dup = kept
                .iter()
                .any(|r| (&r.dir - &nr.dir).norm() <= tol::DEDUP);
            if dup {
                continue;
            }
            nr.inc = self.fresh_incidence(&nr.dir);
            kept.push(nr);
        }
        self.rays = kept;
    }

    /// Replace the constraint list, keeping only `keep` (by index), and
    /// recompute all tight sets.
    pub fn retain_normals(&mut self, keep: &[usize]) {
        let normals: Vec<DVector<f64>> = keep.iter().map(|&i| self.normals[i].clone()).collect();
        self.normals = normals;
        let fresh: Vec<Vec<usize>> = self
            .rays
            .iter()
            .map(|r| self.fresh_incidence(&r.dir))
            .collect();
        for (r, inc) in self.rays.iter_mut().zip(fresh) {
            r.inc = inc;
        }
    }
}
