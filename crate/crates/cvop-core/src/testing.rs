//! Independent oracles and helpers used by the test suites. Everything here
//! is deliberately brute force and shares no code path with the kernel it
//! checks.

#![doc(hidden)]

use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::HRep;

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0,1) from the top 53 bits of the stream.
pub fn rng_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Every vertex of `{y : n_i^T y >= c_i}` by solving all `dim`-subsets of the
/// constraint system and keeping feasible, well-conditioned solutions.
pub fn brute_force_vertices(hrep: &HRep) -> Vec<DVector<f64>> {
    let d = hrep.dim;
    let m = hrep.halfspaces.len();
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    for subset in combinations(m, d) {
        let mut a = DMatrix::zeros(d, d);
        let mut b = DVector::zeros(d);
        for (row, &i) in subset.iter().enumerate() {
            for col in 0..d {
                a[(row, col)] = hrep.halfspaces[i].normal[col];
            }
            b[row] = hrep.halfspaces[i].offset;
        }
        let lu = a.clone().full_piv_lu();
        let y = match lu.solve(&b) {
            Some(y) => y,
            None => continue,
        };
        if (&a * &y - &b).norm() > 1e-8 * (1.0 + y.norm()) {
            continue;
        }
        let feasible = hrep.halfspaces.iter().all(|h| {
            let n = h.normal.norm();
            n <= 1e-12 || (h.normal.dot(&y) - h.offset) / n >= -1e-7
        });
        if !feasible {
            continue;
        }
        if !vertices
            .iter()
            .any(|vv| (vv - &y).norm() <= 1e-7 * (1.0 + y.norm()))
        {
            vertices.push(y);
        }
    }
    vertices
}

/// Rejection-sampling volume estimate over the box `[lo, hi]`.
pub fn monte_carlo_volume(hrep: &HRep, lo: &[f64], hi: &[f64], samples: usize, seed: u64) -> f64 {
    let d = hrep.dim;
    let mut rng = test_rng(seed);
    let mut hits = 0usize;
    let mut point = DVector::zeros(d);
    'outer: for _ in 0..samples {
        for j in 0..d {
            point[j] = lo[j] + (hi[j] - lo[j]) * rng_f64(&mut rng);
        }
        for h in &hrep.halfspaces {
            if h.normal.dot(&point) < h.offset {
                continue 'outer;
            }
        }
        hits += 1;
    }
    let box_vol: f64 = (0..d).map(|j| hi[j] - lo[j]).product();
    box_vol * hits as f64 / samples as f64
}

/// Minimum of `dual_norm(sum lambda_j v_j)` over the unit simplex by a dense
/// grid with `steps` subdivisions per axis.
pub fn grid_simplex_min<F: Fn(&DVector<f64>) -> f64>(
    vectors: &[DVector<f64>],
    dual_norm: F,
    steps: usize,
) -> f64 {
    let n = vectors.len();
    let dim = vectors[0].len();
    let mut best = f64::INFINITY;
    let mut lambda = vec![0usize; n];
    fn rec<F: Fn(&DVector<f64>) -> f64>(
        idx: usize,
        left: usize,
        lambda: &mut Vec<usize>,
        vectors: &[DVector<f64>],
        dim: usize,
        steps: usize,
        dual_norm: &F,
        best: &mut f64,
    ) {
        if idx == lambda.len() - 1 {
            lambda[idx] = left;
            let mut s = DVector::zeros(dim);
            for (l, v) in lambda.iter().zip(vectors) {
                s.axpy(*l as f64 / steps as f64, v, 1.0);
            }
            let val = dual_norm(&s);
            if val < *best {
                *best = val;
            }
            return;
        }
        for l in 0..=left {
            lambda[idx] = l;
            rec(idx + 1, left - l, lambda, vectors, dim, steps, dual_norm, best);
        }
    }
    rec(0, steps, &mut lambda, vectors, dim, steps, &dual_norm, &mut best);
    best
}

/// Zooming variant of the grid minimizer: repeatedly re-grids around the
/// incumbent with a shrinking radius until the lattice spacing is below
/// `target_res`. Independent of any solver path.
pub fn grid_simplex_min_refined<F: Fn(&DVector<f64>) -> f64>(
    vectors: &[DVector<f64>],
    dual_norm: F,
    target_res: f64,
) -> f64 {
    let n = vectors.len();
    let dim = vectors[0].len();
    let steps = 16usize;
    let mut center = vec![1.0 / n as f64; n];
    let mut radius = 1.0;
    let mut best = f64::INFINITY;
    while radius / steps as f64 > target_res {
        let mut idx = vec![0usize; n.saturating_sub(1)];
        loop {
            let mut lambda = Vec::with_capacity(n);
            let mut sum = 0.0;
            for (k, &i) in idx.iter().enumerate() {
                let lo = (center[k] - radius).max(0.0);
                let hi = (center[k] + radius).min(1.0);
                let l = lo + (hi - lo) * i as f64 / steps as f64;
                lambda.push(l);
                sum += l;
            }
            let last = 1.0 - sum;
            if last >= -1e-12 {
                lambda.push(last.max(0.0));
                let mut s = DVector::zeros(dim);
                for (l, v) in lambda.iter().zip(vectors) {
                    s.axpy(*l, v, 1.0);
                }
                let val = dual_norm(&s);
                if val < best {
                    best = val;
                    center = lambda.clone();
                }
            }
            // Odometer over the free coordinates.
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] <= steps {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        radius /= 2.0;
    }
    best
}

/// Euclidean distance from `y` to `{x : n_i^T x >= c_i}` by Dykstra's
/// alternating projections over the individual halfspaces.
pub fn dykstra_distance(y: &DVector<f64>, hrep: &HRep, sweeps: usize) -> f64 {
    let m = hrep.halfspaces.len();
    let mut x = y.clone();
    let mut corrections: Vec<DVector<f64>> = vec![DVector::zeros(hrep.dim); m];
    for _ in 0..sweeps {
        let mut moved = 0.0;
        for (i, h) in hrep.halfspaces.iter().enumerate() {
            let z = &x + &corrections[i];
            let nn = h.normal.norm_squared();
            let slack = h.normal.dot(&z) - h.offset;
            let proj = if nn <= 1e-300 || slack >= 0.0 {
                z.clone()
            } else {
                &z - &h.normal * (slack / nn)
            };
            corrections[i] = &z - &proj;
            moved += (&proj - &x).norm();
            x = proj;
        }
        if moved <= 1e-14 {
            break;
        }
    }
    (y - &x).norm()
}

/// Uniform direction on the unit sphere intersected with the nonnegative
/// orthant (absolute values of gaussians, normalized).
pub fn sample_orthant_sphere(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        // Box-Muller pairs.
        let mut g = DVector::zeros(dim);
        for j in 0..dim {
            let u1 = rng_f64(rng).max(1e-300);
            let u2 = rng_f64(rng);
            g[j] = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
        let n = g.norm();
        if n > 1e-9 {
            return g.map(f64::abs) / n;
        }
    }
}
