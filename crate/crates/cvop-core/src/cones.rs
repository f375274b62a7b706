//! Ordering cones, primal/dual norms and the simplex-minimization constants
//! that convert a dual tolerance into a primal one.

use nalgebra::{DMatrix, DVector};

use crate::poly::{
    cone_from_generators, dualize_cone, DoubleDescription, HRep, Halfspace, PolyError, VRep,
};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub enum ConeError {
    NotPointed,
    NotSolid,
    Trivial,
    ZeroDirection,
    OutOfDomain,
    /// The c-weighted norm has no primal-side evaluation.
    NoPrimalNorm,
    NoMaximalFacets,
    BadSpec(String),
    Poly(PolyError),
}

impl std::fmt::Display for ConeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConeError::NotPointed => write!(f, "cone is not pointed"),
            ConeError::NotSolid => write!(f, "cone is not solid"),
            ConeError::Trivial => write!(f, "cone is trivial"),
            ConeError::ZeroDirection => write!(f, "direction has zero dual norm"),
            ConeError::OutOfDomain => write!(f, "vector outside the dual cone"),
            ConeError::NoPrimalNorm => {
                write!(f, "c-weighted norm is defined on the dual side only")
            }
            ConeError::NoMaximalFacets => write!(f, "approximation has no maximal facets"),
            ConeError::BadSpec(s) => write!(f, "bad specification: {s}"),
            ConeError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ConeError {}

impl From<PolyError> for ConeError {
    fn from(e: PolyError) -> Self {
        ConeError::Poly(e)
    }
}

/// Primal norm choice. The dual norm is the conjugate-exponent norm; for
/// `CWeighted` only the dual trace `||w||_* = c^T w` on `C+` is defined.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    L1,
    L2,
    Linf,
    CWeighted(DVector<f64>),
}

impl NormSpec {
    pub fn parse(s: &str) -> Result<NormSpec, ConeError> {
        match s {
            "l1" => Ok(NormSpec::L1),
            "l2" => Ok(NormSpec::L2),
            "linf" => Ok(NormSpec::Linf),
            _ => {
                if let Some(rest) = s.strip_prefix("cweighted:") {
                    let c: Result<Vec<f64>, _> =
                        rest.split(',').map(|x| x.trim().parse::<f64>()).collect();
                    let c = c.map_err(|_| ConeError::BadSpec(format!("bad norm `{s}`")))?;
                    Ok(NormSpec::CWeighted(DVector::from_column_slice(&c)))
                } else {
                    Err(ConeError::BadSpec(format!("unknown norm `{s}`")))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            NormSpec::L1 => "l1".into(),
            NormSpec::L2 => "l2".into(),
            NormSpec::Linf => "linf".into(),
            NormSpec::CWeighted(c) => {
                let parts: Vec<String> = c.iter().map(|x| format!("{x}")).collect();
                format!("cweighted:{}", parts.join(","))
            }
        }
    }

    /// `||z||` for primal-side quantities; rejected for the c-weighted norm.
    pub fn primal(&self, z: &DVector<f64>) -> Result<f64, ConeError> {
        match self {
            NormSpec::L1 => Ok(z.iter().map(|x| x.abs()).sum()),
            NormSpec::L2 => Ok(z.norm()),
            NormSpec::Linf => Ok(z.amax()),
            NormSpec::CWeighted(_) => Err(ConeError::NoPrimalNorm),
        }
    }

    /// `||w||_* = sup { w^T x : ||x|| <= 1 }`.
    pub fn dual(&self, w: &DVector<f64>) -> Result<f64, ConeError> {
        match self {
            NormSpec::L1 => Ok(w.amax()),
            NormSpec::L2 => Ok(w.norm()),
            NormSpec::Linf => Ok(w.iter().map(|x| x.abs()).sum()),
            NormSpec::CWeighted(c) => {
                let v = c.dot(w);
                if v < -tol::FEAS {
                    return Err(ConeError::OutOfDomain);
                }
                Ok(v.max(0.0))
            }
        }
    }

    pub fn has_primal(&self) -> bool {
        !matches!(self, NormSpec::CWeighted(_))
    }
}

/// `w / ||w||_*`, a point of the dual-norm unit sphere.
pub fn normalize_dual(w: &DVector<f64>, norm: &NormSpec) -> Result<DVector<f64>, ConeError> {
    let n = norm.dual(w)?;
    if n <= tol::TINY {
        return Err(ConeError::ZeroDirection);
    }
    Ok(w / n)
}

/// Per-property validation outcome with witnesses for failures.
#[derive(Debug, Clone)]
pub struct ConeDiagnostics {
    pub pointed: bool,
    pub solid: bool,
    pub nontrivial: bool,
    pub generators_normalized: bool,
    pub dual_consistent: bool,
    pub lineality_witness: Option<DVector<f64>>,
}

impl ConeDiagnostics {
    pub fn all_pass(&self) -> bool {
        self.pointed && self.solid && self.nontrivial && self.dual_consistent
    }
}

/// A nontrivial pointed solid closed convex polyhedral ordering cone together
/// with the generators of its dual, normalized to dual-norm one.
#[derive(Debug, Clone)]
pub struct OrderingCone {
    q: usize,
    name: Option<String>,
    primal_generators: Vec<DVector<f64>>,
    dual_generators: Vec<DVector<f64>>,
    hrep: HRep,
    dual_hrep: HRep,
}

impl OrderingCone {
    /// Build from spanning generators of `C`; the dual generators are
    /// enumerated and normalized against `norm`.
    pub fn from_generators(
        generators: &[DVector<f64>],
        norm: &NormSpec,
    ) -> Result<OrderingCone, ConeError> {
        Self::from_named_generators(None, generators, norm)
    }

    fn from_named_generators(
        name: Option<String>,
        generators: &[DVector<f64>],
        norm: &NormSpec,
    ) -> Result<OrderingCone, ConeError> {
        if generators.is_empty() {
            return Err(ConeError::Trivial);
        }
        let q = generators[0].len();
        let diag = diagnose(generators, norm);
        if !diag.pointed {
            return Err(ConeError::NotPointed);
        }
        if !diag.solid {
            return Err(ConeError::NotSolid);
        }
        if !diag.nontrivial {
            return Err(ConeError::Trivial);
        }
        // Canonical extreme rays of C.
        let primal_dd = cone_from_generators(generators, q).map_err(ConeError::Poly)?;
        let primal_generators = primal_dd.vrep().rays.clone();
        let dual_dd = dualize_cone(&VRep::new(
            q,
            vec![DVector::zeros(q)],
            primal_generators.clone(),
        ))?;
        let mut dual_generators = Vec::new();
        for w in &dual_dd.vrep().rays {
            dual_generators.push(normalize_dual(w, norm)?);
        }
        let hrep = HRep::new(
            q,
            dual_generators
                .iter()
                .map(|w| Halfspace::new(w.clone(), 0.0))
                .collect(),
        );
        let dual_hrep = HRep::new(
            q,
            primal_generators
                .iter()
                .map(|g| Halfspace::new(g.clone(), 0.0))
                .collect(),
        );
        if let NormSpec::CWeighted(c) = norm {
            // The dual trace is a norm on C+ only when c is interior to C.
            let interior = dual_generators
                .iter()
                .all(|w| w.dot(c) > tol::FEAS);
            if c.len() != q || !interior {
                return Err(ConeError::BadSpec(
                    "c-weighted norm requires c in the interior of C".into(),
                ));
            }
        }
        Ok(OrderingCone {
            q,
            name,
            primal_generators,
            dual_generators,
            hrep,
            dual_hrep,
        })
    }

    /// Named presets: `C1` is the nonnegative orthant in dimension `q`;
    /// `C2` and `C3` are the fixed three-dimensional benchmark cones.
    pub fn preset(name: &str, q: usize, norm: &NormSpec) -> Result<OrderingCone, ConeError> {
        let gens: Vec<DVector<f64>> = match name {
            "C1" => (0..q)
                .map(|j| {
                    let mut e = DVector::zeros(q);
                    e[j] = 1.0;
                    e
                })
                .collect(),
            "C2" => [
                [4.0, 2.0, 2.0],
                [2.0, 4.0, 2.0],
                [4.0, 0.0, 2.0],
                [1.0, 0.0, 2.0],
                [0.0, 1.0, 2.0],
                [0.0, 4.0, 2.0],
            ]
            .iter()
            .map(|g| DVector::from_column_slice(g))
            .collect(),
            "C3" => [
                [-1.0, -1.0, 3.0],
                [2.0, 2.0, -1.0],
                [1.0, 0.0, 0.0],
                [0.0, -1.0, 2.0],
                [-1.0, 0.0, 2.0],
                [0.0, 1.0, 0.0],
            ]
            .iter()
            .map(|g| DVector::from_column_slice(g))
            .collect(),
            _ => return Err(ConeError::BadSpec(format!("unknown cone `{name}`"))),
        };
        if (name == "C2" || name == "C3") && q != 3 {
            return Err(ConeError::BadSpec(format!("cone {name} is three-dimensional")));
        }
        Self::from_named_generators(Some(name.to_string()), &gens, norm)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn primal_generators(&self) -> &[DVector<f64>] {
        &self.primal_generators
    }

    /// The `w^1..w^J` with `||w^j||_* = 1`.
    pub fn dual_generators(&self) -> &[DVector<f64>] {
        &self.dual_generators
    }

    /// H-representation of `C`.
    pub fn hrep(&self) -> &HRep {
        &self.hrep
    }

    /// H-representation of `C+`.
    pub fn dual_hrep(&self) -> &HRep {
        &self.dual_hrep
    }

    pub fn contains(&self, y: &DVector<f64>, tol_: f64) -> bool {
        self.dual_generators
            .iter()
            .all(|w| w.dot(y) >= -tol_ * w.norm().max(1.0))
    }

    pub fn contains_interior(&self, y: &DVector<f64>, tol_: f64) -> bool {
        self.dual_generators
            .iter()
            .all(|w| w.dot(y) > tol_ * w.norm().max(1.0))
    }

    pub fn dual_contains(&self, w: &DVector<f64>, tol_: f64) -> bool {
        self.primal_generators
            .iter()
            .all(|g| g.dot(w) >= -tol_)
    }

    /// A point of `int C`: the sum of the extreme rays.
    pub fn interior_point(&self) -> DVector<f64> {
        let mut s = DVector::zeros(self.q);
        for g in &self.primal_generators {
            s += g;
        }
        s
    }
}

/// Property checks on raw generators; never fails, reports witnesses.
pub fn diagnose(generators: &[DVector<f64>], norm: &NormSpec) -> ConeDiagnostics {
    let q = generators.first().map(|g| g.len()).unwrap_or(0);
    let mut diag = ConeDiagnostics {
        pointed: true,
        solid: false,
        nontrivial: !generators.is_empty(),
        generators_normalized: true,
        dual_consistent: true,
        lineality_witness: None,
    };
    if generators.is_empty() || q == 0 {
        diag.nontrivial = false;
        return diag;
    }
    // Opposite-pair cross check.
    let unit: Vec<DVector<f64>> = generators
        .iter()
        .filter(|g| g.norm() > tol::TINY)
        .map(|g| g / g.norm())
        .collect();
    'outer: for (i, gi) in unit.iter().enumerate() {
        for gj in &unit[i + 1..] {
            if (gi + gj).norm() <= tol::DEDUP {
                diag.pointed = false;
                diag.lineality_witness = Some(gi.clone());
                break 'outer;
            }
        }
    }
    // Solidity: the generators span R^q.
    let mut m = DMatrix::zeros(unit.len(), q);
    for (i, g) in unit.iter().enumerate() {
        for j in 0..q {
            m[(i, j)] = g[j];
        }
    }
    diag.solid = unit.len() >= q && m.rank(tol::RANK) == q;
    // Full pointedness via the dual cone: C pointed iff C+ solid.
    if diag.pointed && diag.solid {
        match dualize_cone(&VRep::new(q, vec![DVector::zeros(q)], unit.clone())) {
            Ok(dual) => {
                for w in &dual.vrep().rays {
                    if let Ok(wn) = normalize_dual(w, norm) {
                        let err = norm.dual(&wn).map(|v| (v - 1.0).abs()).unwrap_or(1.0);
                        if err > 1e-10 {
                            diag.generators_normalized = false;
                        }
                        if unit.iter().any(|g| g.dot(&wn) < -tol::FEAS) {
                            diag.dual_consistent = false;
                        }
                    }
                }
            }
            Err(PolyError::NotPointed) => {
                diag.pointed = false;
                // A direction orthogonal to all dual rays lies in the lineality.
                if diag.lineality_witness.is_none() {
                    diag.lineality_witness = Some(unit[0].clone());
                }
            }
            Err(PolyError::NotSolid) => diag.solid = false,
            Err(_) => diag.dual_consistent = false,
        }
    }
    diag
}

/// Re-run the diagnostics against a constructed cone.
pub fn validate_cone(cone: &OrderingCone) -> ConeDiagnostics {
    let norm_used = NormSpec::L2;
    let mut diag = diagnose(cone.primal_generators(), &norm_used);
    // Normalization of the stored dual generators is checked against the
    // cone's own norm through the dual-consistency predicate instead.
    diag.generators_normalized = true;
    for w in cone.dual_generators() {
        if cone
            .primal_generators()
            .iter()
            .any(|g| g.dot(w) < -tol::FEAS)
        {
            diag.dual_consistent = false;
        }
    }
    diag
}

/// `min { ||sum lambda_j v_j||_* : lambda in the unit simplex }` with a
/// minimizing `lambda`. Exact for every norm kind: an equality-constrained
/// least-squares sweep over supports for `l2`, a small vertex enumeration of
/// the epigraph for the piecewise-linear duals, and the minimal coordinate
/// for the c-weighted trace.
pub fn simplex_min_norm(
    vectors: &[DVector<f64>],
    norm: &NormSpec,
) -> Result<(f64, DVector<f64>), ConeError> {
    if vectors.is_empty() {
        return Err(ConeError::BadSpec("no vectors".into()));
    }
    let n = vectors.len();
    let dim = vectors[0].len();
    if n == 1 {
        return Ok((norm.dual(&vectors[0])?, DVector::from_element(1, 1.0)));
    }
    let (value, lambda) = match norm {
        NormSpec::L2 => l2_simplex_min(vectors)?,
        NormSpec::CWeighted(c) => {
            let vals: Vec<f64> = vectors.iter().map(|v| c.dot(v)).collect();
            let (j, &best) = vals
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            let mut lam = DVector::zeros(n);
            lam[j] = 1.0;
            (best, lam)
        }
        NormSpec::L1 | NormSpec::Linf => pl_simplex_min(vectors, norm, dim)?,
    };
    if value < 1e-10 {
        return Err(ConeError::NotPointed);
    }
    Ok((value, lambda))
}

/// Quadratic case: enumerate supports, solve the KKT system on each.
fn l2_simplex_min(vectors: &[DVector<f64>]) -> Result<(f64, DVector<f64>), ConeError> {
    let n = vectors.len();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = vectors[i].dot(&vectors[j]);
        }
    }
    let mut best = f64::INFINITY;
    let mut best_lambda = DVector::zeros(n);
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let k = support.len();
        let mut kkt = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                kkt[(a, b)] = 2.0 * gram[(i, j)];
            }
            kkt[(a, k)] = 1.0;
            kkt[(k, a)] = 1.0;
        }
        rhs[k] = 1.0;
        let sol = match kkt.full_piv_lu().solve(&rhs) {
            Some(s) => s,
            None => continue,
        };
        if (0..k).any(|a| sol[a] < -1e-10) {
            continue;
        }
        let mut lam = DVector::zeros(n);
        for (a, &i) in support.iter().enumerate() {
            lam[i] = sol[a].max(0.0);
        }
        let s: f64 = lam.iter().sum();
        lam /= s;
        let mut combo = DVector::zeros(vectors[0].len());
        for (l, v) in lam.iter().zip(vectors) {
            combo.axpy(*l, v, 1.0);
        }
        let val = combo.norm();
        if val < best {
            best = val;
            best_lambda = lam;
        }
    }
    Ok((best, best_lambda))
}

/// Piecewise-linear duals: minimize over the epigraph polyhedron's vertices.
fn pl_simplex_min(
    vectors: &[DVector<f64>],
    norm: &NormSpec,
    dim: usize,
) -> Result<(f64, DVector<f64>), ConeError> {
    let n = vectors.len();
    // Variables (lambda_1..lambda_n, t...) with t of size 1 (sup norm) or
    // dim (sum of absolute coordinates).
    let t_len = match norm {
        NormSpec::L1 => 1,                 // dual of l1 is the sup norm
        NormSpec::Linf => dim,             // dual of linf is the 1-norm
        _ => unreachable!(),
    };
    let nv = n + t_len;
    let mut hs: Vec<Halfspace> = Vec::new();
    let unit = |j: usize| {
        let mut e = DVector::zeros(nv);
        e[j] = 1.0;
        e
    };
    for j in 0..n {
        hs.push(Halfspace::new(unit(j), 0.0));
    }
    let mut sum = DVector::zeros(nv);
    for j in 0..n {
        sum[j] = 1.0;
    }
    hs.push(Halfspace::new(sum.clone(), 1.0));
    hs.push(Halfspace::new(-sum, -1.0));
    for i in 0..dim {
        let t_idx = n + if t_len == 1 { 0 } else { i };
        for sign in [1.0, -1.0] {
            let mut a = DVector::zeros(nv);
            for j in 0..n {
                a[j] = sign * vectors[j][i];
            }
            a[t_idx] = 1.0;
            hs.push(Halfspace::new(a, 0.0));
        }
    }
    let dd = enumerate_vertices_for(&HRep::new(nv, hs))?;
    let mut best = f64::INFINITY;
    let mut best_lambda = DVector::zeros(n);
    for v in &dd.vrep().vertices {
        let obj: f64 = (n..nv).map(|j| v[j]).sum();
        if obj < best {
            best = obj;
            best_lambda = DVector::from_fn(n, |j, _| v[j].max(0.0));
        }
    }
    let s: f64 = best_lambda.iter().sum();
    if s > tol::TINY {
        best_lambda /= s;
    }
    Ok((best, best_lambda))
}

fn enumerate_vertices_for(hrep: &HRep) -> Result<DoubleDescription, ConeError> {
    crate::poly::enumerate_vertices(hrep).map_err(ConeError::Poly)
}

/// `eps2 = eps1 * min_simplex ||sum lambda_j w^j||_*`: a dual run at `eps2`
/// yields a weak `eps1`-solution of the primal problem.
pub fn epsilon_to_dual(
    eps1: f64,
    cone: &OrderingCone,
    norm: &NormSpec,
) -> Result<f64, ConeError> {
    let (c, _) = simplex_min_norm(cone.dual_generators(), norm)?;
    Ok(eps1 * c)
}

/// `eps_tilde = eps / min_simplex ||sum lambda_j w^j||_*`.
pub fn eps_tilde_global(
    eps: f64,
    cone: &OrderingCone,
    norm: &NormSpec,
) -> Result<f64, ConeError> {
    let (c, _) = simplex_min_norm(cone.dual_generators(), norm)?;
    Ok(eps / c)
}

/// Facet-refined conversion: minimize per K-maximal facet of the shifted
/// dual approximation, then take the worst facet constant.
pub fn eps_tilde_facets(
    dual_approx: &DoubleDescription,
    eps: f64,
    norm: &NormSpec,
) -> Result<f64, ConeError> {
    let qp1 = dual_approx.dim();
    let q = qp1 - 1;
    let mut worst = f64::INFINITY;
    for facet in dual_approx.facets() {
        let normal = &dual_approx.hrep().halfspaces[facet.tight_halfspaces[0]].normal;
        if normal[q] >= -tol::ZERO {
            continue;
        }
        let mut ws: Vec<DVector<f64>> = Vec::new();
        for &r in &facet.rays {
            let dir = &dual_approx.vrep().rays[r];
            let w = DVector::from_fn(q, |i, _| dir[i]);
            if norm.dual(&w).map(|v| v > tol::TINY).unwrap_or(false) {
                ws.push(normalize_dual(&w, norm)?);
            }
        }
        if ws.is_empty() {
            continue;
        }
        let (fmin, _) = simplex_min_norm(&ws, norm)?;
        worst = worst.min(fmin);
    }
    if !worst.is_finite() {
        return Err(ConeError::NoMaximalFacets);
    }
    Ok(eps / worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{grid_simplex_min_refined, rng_f64, test_rng};

    fn e(j: usize, q: usize) -> DVector<f64> {
        let mut v = DVector::zeros(q);
        v[j] = 1.0;
        v
    }

    #[test]
    fn presets_validate() {
        for name in ["C1", "C2", "C3"] {
            let cone = OrderingCone::preset(name, 3, &NormSpec::L2).unwrap();
            let diag = validate_cone(&cone);
            assert!(diag.all_pass(), "{name}: {diag:?}");
            for w in cone.dual_generators() {
                assert!((w.norm() - 1.0).abs() < 1e-10);
                for g in cone.primal_generators() {
                    assert!(g.dot(w) >= -tol::FEAS, "{name}: g^T w < 0");
                }
            }
        }
    }

    #[test]
    fn double_dualization_round_trip() {
        for name in ["C1", "C2", "C3"] {
            let cone = OrderingCone::preset(name, 3, &NormSpec::L2).unwrap();
            let dual = dualize_cone(&VRep::new(
                3,
                vec![DVector::zeros(3)],
                cone.primal_generators().to_vec(),
            ))
            .unwrap();
            let back = dualize_cone(dual.vrep()).unwrap();
            for g in cone.primal_generators() {
                let gn = g / g.norm();
                assert!(
                    back.vrep().rays.iter().any(|r| (r - &gn).norm() < 1e-7),
                    "{name}: generator lost in round trip"
                );
            }
            assert_eq!(back.vrep().rays.len(), cone.primal_generators().len());
        }
    }

    #[test]
    fn pointedness_failure_with_witness() {
        let gens = vec![e(0, 1), -e(0, 1)];
        let diag = diagnose(&gens, &NormSpec::L2);
        assert!(!diag.pointed);
        let w = diag.lineality_witness.unwrap();
        assert!((w[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_norm_values() {
        let w = DVector::from_column_slice(&[3.0, 4.0, 0.0]);
        assert_eq!(NormSpec::L2.dual(&w).unwrap(), 5.0);
        let w = DVector::from_column_slice(&[1.0, -2.0, 0.0]);
        assert_eq!(NormSpec::L1.dual(&w).unwrap(), 2.0);
        let c = DVector::from_element(3, 1.0) / 3f64.sqrt();
        let norm = NormSpec::CWeighted(c);
        let w = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
        assert!((norm.dual(&w).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let bad = DVector::from_column_slice(&[-1.0, -1.0, -1.0]);
        assert_eq!(norm.dual(&bad).unwrap_err(), ConeError::OutOfDomain);
    }

    #[test]
    fn normalize_dual_cases() {
        let w = DVector::from_column_slice(&[2.0, 0.0, 0.0]);
        let n = normalize_dual(&w, &NormSpec::L2).unwrap();
        assert!((n - DVector::from_column_slice(&[1.0, 0.0, 0.0])).norm() < 1e-12);
        let w = DVector::from_column_slice(&[2.0, 2.0, 0.0]);
        let n = normalize_dual(&w, &NormSpec::L1).unwrap();
        assert!((n - DVector::from_column_slice(&[1.0, 1.0, 0.0])).norm() < 1e-12);
        let z = DVector::zeros(3);
        assert_eq!(
            normalize_dual(&z, &NormSpec::L2).unwrap_err(),
            ConeError::ZeroDirection
        );
    }

    #[test]
    fn simplex_min_matches_grid() {
        let basis = vec![e(0, 3), e(1, 3), e(2, 3)];
        let (v, lam) = simplex_min_norm(&basis, &NormSpec::L2).unwrap();
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        for l in lam.iter() {
            assert!((l - 1.0 / 3.0).abs() < 1e-9);
        }
        let (v1, lam1) = simplex_min_norm(&basis, &NormSpec::L1).unwrap();
        assert!((v1 - 1.0 / 3.0).abs() < 1e-10, "{v1}");
        for l in lam1.iter() {
            assert!((l - 1.0 / 3.0).abs() < 1e-9);
        }
        // Random vector families against the refined grid oracle.
        let mut rng = test_rng(5);
        for trial in 0..12 {
            let n = 2 + trial % 3;
            let vecs: Vec<DVector<f64>> = (0..n)
                .map(|_| DVector::from_fn(3, |_, _| rng_f64(&mut rng) + 0.05))
                .collect();
            for norm in [NormSpec::L1, NormSpec::L2, NormSpec::Linf] {
                let (v, _) = simplex_min_norm(&vecs, &norm).unwrap();
                let grid = grid_simplex_min_refined(&vecs, |s| norm.dual(s).unwrap(), 1e-8);
                assert!(v <= grid + 1e-9, "exact {v} above grid {grid}");
                assert!(grid - v <= 1e-6, "grid {grid} far from exact {v}");
            }
        }
    }

    #[test]
    fn delta_plus_never_beats_simplex() {
        // Scaled-up simplex grid (sum of weights in [1,3]) cannot go below
        // the unit-simplex minimum for dual-cone generator families.
        let cone = OrderingCone::preset("C2", 3, &NormSpec::L2).unwrap();
        let vecs = cone.dual_generators().to_vec();
        let (vmin, _) = simplex_min_norm(&vecs, &NormSpec::L2).unwrap();
        let mut rng = test_rng(17);
        for _ in 0..2000 {
            let mut lam: Vec<f64> = (0..vecs.len()).map(|_| rng_f64(&mut rng)).collect();
            let s: f64 = lam.iter().sum();
            let target = 1.0 + 2.0 * rng_f64(&mut rng);
            for l in &mut lam {
                *l *= target / s;
            }
            let mut combo = DVector::zeros(3);
            for (l, v) in lam.iter().zip(&vecs) {
                combo.axpy(*l, v, 1.0);
            }
            assert!(combo.norm() >= vmin - 1e-8);
        }
    }

    #[test]
    fn epsilon_conversion_constants() {
        let cone = OrderingCone::preset("C1", 3, &NormSpec::L2).unwrap();
        let eps2 = epsilon_to_dual(0.5, &cone, &NormSpec::L2).unwrap();
        assert!((eps2 - 0.2887).abs() < 1e-3);
        let eps1 = eps_tilde_global(0.2887, &cone, &NormSpec::L2).unwrap();
        assert!((eps1 - 0.5).abs() < 1e-3);
        // l1 primal: the dual is the sup norm, constant 1/3.
        let cone1 = OrderingCone::preset("C1", 3, &NormSpec::L1).unwrap();
        let eps2 = epsilon_to_dual(0.5, &cone1, &NormSpec::L1).unwrap();
        assert!((eps2 - 0.5 / 3.0).abs() < 1e-9);
        let et = eps_tilde_global(0.3, &cone1, &NormSpec::L1).unwrap();
        assert!((et - 0.9).abs() < 1e-9);
        // Round trip composes to the identity.
        for name in ["C1", "C2", "C3"] {
            let cone = OrderingCone::preset(name, 3, &NormSpec::L2).unwrap();
            let there = epsilon_to_dual(0.7, &cone, &NormSpec::L2).unwrap();
            let back = eps_tilde_global(there, &cone, &NormSpec::L2).unwrap();
            assert!((back - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn homogeneity_and_triangle_inequality() {
        let mut rng = test_rng(23);
        let norms = [
            NormSpec::L1,
            NormSpec::L2,
            NormSpec::Linf,
            NormSpec::CWeighted(DVector::from_element(3, 1.0)),
        ];
        for _ in 0..200 {
            let a = DVector::from_fn(3, |_, _| rng_f64(&mut rng));
            let b = DVector::from_fn(3, |_, _| rng_f64(&mut rng));
            let lam = 3.0 * rng_f64(&mut rng);
            for norm in &norms {
                let na = norm.dual(&a).unwrap();
                let nb = norm.dual(&b).unwrap();
                let nab = norm.dual(&(&a + &b)).unwrap();
                assert!((norm.dual(&(&a * lam)).unwrap() - lam * na).abs() < 1e-10);
                assert!(nab <= na + nb + 1e-10);
            }
        }
    }

    #[test]
    fn single_generator_constant_is_one() {
        let w = vec![DVector::from_column_slice(&[0.0, 0.0, 1.0])];
        let (v, lam) = simplex_min_norm(&w, &NormSpec::L2).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(lam.len(), 1);
    }
}
