//! Random instance generation.
//!
//! The generator is pinned for cross-platform reproducibility: ChaCha8 keyed
//! by the 64-bit seed, substream 0 for `A` and substream 1 for `U`, matrices
//! filled row-major, uniform draws taken as the top 53 bits of the raw
//! stream scaled into `[0, 50)`.

use nalgebra::DMatrix;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cones::{NormSpec, OrderingCone};
use crate::scalar::{ProblemInstance, ScalarError};

fn uniform50(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (50.0 / 9007199254740992.0)
}

fn row_major(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = uniform50(rng);
        }
    }
    m
}

/// A random instance of the linear-objective/ellipsoid-constraint family:
/// `A` i.i.d. uniform on `[0,50]`, `P = Q |D| Q^T` from the symmetrized
/// eigendecomposition of a second uniform draw.
pub fn gen_instance(
    n: usize,
    q: usize,
    seed: u64,
    cone: OrderingCone,
    norm: NormSpec,
) -> Result<ProblemInstance, ScalarError> {
    if n < q || q < 2 {
        return Err(ScalarError::BadInstance("need n >= q >= 2".into()));
    }
    let mut rng_a = ChaCha8Rng::seed_from_u64(seed);
    rng_a.set_stream(0);
    let a = row_major(&mut rng_a, n, q);

    let mut rng_u = ChaCha8Rng::seed_from_u64(seed);
    rng_u.set_stream(1);
    let u = row_major(&mut rng_u, n, n);
    let s = (&u + u.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let mut p = DMatrix::zeros(n, n);
    for k in 0..n {
        let col = eig.eigenvectors.column(k);
        let lam = eig.eigenvalues[k].abs();
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += lam * col[i] * col[j];
            }
        }
    }
    // Kill round-off asymmetry.
    let p = (&p + p.transpose()) * 0.5;
    let id = format!("ell-n{n}-q{q}-s{seed}");
    ProblemInstance::ellipsoid(id, a, p, cone, norm, Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone3() -> OrderingCone {
        OrderingCone::preset("C1", 3, &NormSpec::L2).unwrap()
    }

    #[test]
    fn generated_p_is_symmetric_positive_definite() {
        for seed in [0u64, 1, 42, 987654321] {
            let inst = gen_instance(8, 3, seed, cone3(), NormSpec::L2).unwrap();
            if let crate::scalar::Family::Ellipsoid { p, .. } = &inst.family {
                assert!((p - p.transpose()).amax() <= 1e-12);
                let eig = p.clone().symmetric_eigen();
                assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
            } else {
                panic!("wrong family");
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = gen_instance(6, 3, 7, cone3(), NormSpec::L2).unwrap();
        let b = gen_instance(6, 3, 7, cone3(), NormSpec::L2).unwrap();
        match (&a.family, &b.family) {
            (
                crate::scalar::Family::Ellipsoid { a: a1, p: p1 },
                crate::scalar::Family::Ellipsoid { a: a2, p: p2 },
            ) => {
                assert_eq!(a1, a2);
                assert_eq!(p1, p2);
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn entries_stay_in_range() {
        let mut count = 0usize;
        for seed in 0..40u64 {
            let inst = gen_instance(10, 3, seed, cone3(), NormSpec::L2).unwrap();
            if let crate::scalar::Family::Ellipsoid { a, .. } = &inst.family {
                for x in a.iter() {
                    assert!((0.0..50.0).contains(x));
                    count += 1;
                }
            }
        }
        assert_eq!(count, 40 * 30);
    }
}
