//! Fujiki constants, Hodge decompositions of period points and the
//! infinitesimal Deligne-torus generator.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use num::bigint::BigInt;
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::closure::LieClosure;
use super::ops::{lefschetz_generators, GradedOperator};
use super::ring::CohomologyRing;
use crate::error::{Error, Result};
use crate::period::{PeriodDomain, PeriodPoint, PositiveThreePlane};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FujikiFit {
    #[serde(serialize_with = "crate::json::ser_rat")]
    pub c: Rat,
    pub samples: usize,
}

/// Fits `q(a)^m = c·∫a^{2m}` over `max(2·rank², 1000)` seeded integer samples.
pub fn fujiki_constant(ring: &CohomologyRing, seed: u64) -> Result<FujikiFit> {
    let r = ring.lattice_block().lattice.rank();
    fujiki_constant_with(ring, (2 * r * r).max(1000), seed)
}

pub fn fujiki_constant_with(ring: &CohomologyRing, samples: usize, seed: u64) -> Result<FujikiFit> {
    let block = ring.lattice_block();
    let m = ring.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Option<Rat> = None;
    for _ in 0..samples {
        let a: Vec<i64> = (0..block.lattice.rank())
            .map(|_| rng.random_range(-5..=5))
            .collect();
        let q = BigInt::from(block.lattice.q_int(&a));
        let lhs = num::pow(q, m);
        let x = ring.embed_degree2(&a.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
        let mut power = x.clone();
        for _ in 1..2 * m {
            power = ring.multiply(&power, &x);
        }
        let integral = ring.integrate(&power);
        let violated = match &c {
            _ if integral.is_zero() => !lhs.is_zero(),
            None => {
                if !lhs.is_zero() {
                    c = Some(Rat::new(lhs, integral));
                }
                false
            }
            Some(c) => Rat::from(lhs) != c * Rat::from(integral),
        };
        if violated {
            return Err(Error::FujikiViolated { sample: a });
        }
    }
    let c = c.ok_or_else(|| Error::Invalid("no sample determines the Fujiki constant".into()))?;
    if !c.is_positive() {
        return Err(Error::Invalid(format!(
            "Fujiki constant {c} is not positive"
        )));
    }
    Ok(FujikiFit { c, samples })
}

/// `H² ⊗ ℂ = H^{2,0} ⊕ H^{1,1} ⊕ H^{0,2}` for a period point.
#[derive(Debug, Clone)]
pub struct HodgeDecomposition {
    pub h20: DVector<Complex<f64>>,
    pub h02: DVector<Complex<f64>>,
    /// Real basis of `Π_z^⊥`, whose complexification is `H^{1,1}`.
    pub h11: Vec<DVector<f64>>,
    pub dims: [usize; 3],
    /// `(positive, negative)` inertia of `h_q` on `H^{1,1}`.
    pub h11_inertia: (usize, usize),
    /// `h_q(σ, σ)`.
    pub h20_norm: f64,
    /// `|h_q(σ, σ̄)|`.
    pub isotropy_residual: f64,
    /// Largest `|h_q(x, σ)|` over the `H^{1,1}` basis.
    pub orthogonality_residual: f64,
}

pub fn hodge_decompose(domain: &PeriodDomain, z: &PeriodPoint) -> Result<HodgeDecomposition> {
    let (a, b) = (z.re(), z.im());
    let r = domain.rank();
    // q-orthogonal projection of the coordinate vectors onto Π_z^⊥
    let mut h11: Vec<DVector<f64>> = Vec::new();
    for k in 0..r {
        let mut x = DVector::zeros(r);
        x[k] = 1.0;
        let x = &x - a * (domain.b(&x, a) / domain.q(a)) - b * (domain.b(&x, b) / domain.q(b));
        let mut y = x.clone();
        for _ in 0..2 {
            for u in &h11 {
                y -= u * u.dot(&y);
            }
        }
        let n = y.norm();
        if n > 1e-8 * x.norm().max(1.0) && h11.len() < r - 2 {
            h11.push(y / n);
        }
    }
    if h11.len() != r - 2 {
        return Err(Error::Numerical("Π_z^⊥ has the wrong dimension".into()));
    }
    let gram = DMatrix::from_fn(h11.len(), h11.len(), |i, j| domain.b(&h11[i], &h11[j]));
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let scale = eig.amax().max(1.0);
    let tol = domain.tolerances().pos * scale;
    if eig.iter().any(|x| x.abs() <= tol) {
        return Err(Error::Numerical("h_q is degenerate on H^{1,1}".into()));
    }
    let inertia = (
        eig.iter().filter(|&&x| x > 0.0).count(),
        eig.iter().filter(|&&x| x < 0.0).count(),
    );
    if inertia != (1, domain.n()) {
        return Err(Error::Inconsistent(format!(
            "h_q on H^{{1,1}} has inertia {inertia:?}, expected (1, {})",
            domain.n()
        )));
    }
    let sigma = z.sigma();
    let orthogonality_residual = h11
        .iter()
        .map(|x| domain.b(x, a).hypot(domain.b(x, b)))
        .fold(0.0, f64::max);
    Ok(HodgeDecomposition {
        h02: sigma.map(|c| c.conj()),
        h20: sigma,
        dims: [1, h11.len(), 1],
        h11,
        h11_inertia: inertia,
        h20_norm: domain.q(a) + domain.q(b),
        isotropy_residual: (domain.q(a) - domain.q(b)).hypot(2.0 * domain.b(a, b)),
        orthogonality_residual,
    })
}

/// Lefschetz generators for a q-orthonormal basis of a positive 3-plane.
pub fn plane_generators(
    ring: &CohomologyRing,
    domain: &PeriodDomain,
    frame: &[DVector<f64>; 3],
) -> Result<Vec<GradedOperator>> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(3);
    for v in frame {
        let mut w = v.clone();
        for u in &basis {
            w -= u * domain.b(u, v);
        }
        let q = domain.q(&w);
        if q <= 0.0 {
            return Err(Error::NotPositive { min_eigenvalue: q });
        }
        basis.push(w / q.sqrt());
    }
    let etas: Vec<Vec<f64>> = basis.iter().map(|v| v.iter().copied().collect()).collect();
    lefschetz_generators(ring, &etas)
}

#[derive(Debug, Clone, Serialize)]
pub struct DeligneGenerator {
    #[serde(skip)]
    pub operator: GradedOperator,
    /// Relative residual of the defining equations.
    pub residual: f64,
}

/// The degree-0 element `X` of the plane closure with `X·a = 2b`,
/// `X·b = −2a`, `X·ℓ = 0` for `ℓ ∈ P ∩ Π_z^⊥`, and `X = 0` on `H⁰` and the
/// top degree, where `(a, b)` is the frame of `Π_z`.
pub fn deligne_generator(
    ring: &CohomologyRing,
    closure: &LieClosure,
    domain: &PeriodDomain,
    plane: &PositiveThreePlane,
    z: &PeriodPoint,
) -> Result<DeligneGenerator> {
    if !domain.conic_contains(plane, z) {
        return Err(Error::Invalid(
            "period point is not on the conic of the 3-plane".into(),
        ));
    }
    let (a, b) = (z.re(), z.im());
    let ell = plane
        .frame()
        .iter()
        .map(|v| v - a * domain.b(v, a) - b * domain.b(v, b))
        .max_by(|x, y| domain.q(x).total_cmp(&domain.q(y)))
        .expect("frame has three vectors");
    let ell = &ell / domain.q(&ell).sqrt();

    let n = ring.dim();
    let embed = |v: &DVector<f64>| DVector::from_vec(ring.embed_degree2(v.as_slice()));
    let mut inputs = vec![embed(a), embed(b), embed(&ell)];
    let mut targets = vec![embed(b) * 2.0, embed(a) * -2.0, DVector::zeros(n)];
    for (k, &d) in ring.degrees().iter().enumerate() {
        if d != 2 {
            inputs.push(DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }));
            targets.push(DVector::zeros(n));
        }
    }
    let deg0: Vec<&GradedOperator> = closure.degree(0).collect();
    if deg0.is_empty() {
        return Err(Error::Invalid("closure has no degree-0 part".into()));
    }
    let rows = n * inputs.len();
    let sys = DMatrix::from_fn(rows, deg0.len(), |r, c| {
        (&deg0[c].matrix * &inputs[r / n])[r % n]
    });
    let rhs = DVector::from_fn(rows, |r, _| targets[r / n][r % n]);
    let svd = sys.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let coef = svd
        .solve(&rhs, 1e-12 * smax.max(1.0))
        .map_err(|s| Error::Numerical(s.into()))?;
    let residual = (&sys * &coef - &rhs).norm() / rhs.norm();
    if !(residual < 1e-8) {
        return Err(Error::Numerical(format!(
            "Deligne generator is not in the closure (residual {residual:.3e})"
        )));
    }
    let mut x = DMatrix::zeros(n, n);
    for (c, op) in coef.iter().zip(&deg0) {
        x += &op.matrix * *c;
    }
    Ok(DeligneGenerator {
        operator: GradedOperator::new(x, 0),
        residual,
    })
}

/// Eigenvalues of an operator restricted to the degree-2 block, sorted by
/// imaginary part.
pub fn h2_spectrum(ring: &CohomologyRing, op: &GradedOperator) -> Vec<Complex<f64>> {
    let idx = &ring.lattice_block().indices;
    let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| op.matrix[(idx[i], idx[j])]);
    let mut ev: Vec<Complex<f64>> = block.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.im.total_cmp(&y.im));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::QuadLattice;
    use crate::llv::closure::{lie_closure, ClosureOptions};
    use crate::llv::ring::RingJson;
    use crate::rational::ratio;

    #[test]
    fn fujiki_on_k3() {
        let ring = CohomologyRing::k3();
        let fit = fujiki_constant(&ring, 1).unwrap();
        assert_eq!(fit.c, ratio(1, 1));
        assert_eq!(fit.samples, 1000);
    }

    #[test]
    fn fujiki_with_doubled_integration() {
        let ring = CohomologyRing::k3().with_scaled_integration(2).unwrap();
        assert_eq!(fujiki_constant(&ring, 2).unwrap().c, ratio(1, 2));
    }

    #[test]
    fn fujiki_detects_a_perturbed_product() {
        let ring = CohomologyRing::k3();
        let mut j: RingJson = ring.to_json();
        j.structure_constants.push([1, 3, 23, 1]);
        j.structure_constants.push([3, 1, 23, 1]);
        let bad = CohomologyRing::from_json(&j).unwrap();
        assert!(matches!(
            fujiki_constant(&bad, 3),
            Err(Error::FujikiViolated { .. })
        ));
    }

    fn k3_domain() -> PeriodDomain {
        PeriodDomain::new(QuadLattice::k3()).unwrap()
    }

    #[test]
    fn hodge_on_k3_sample() {
        let d = k3_domain();
        for seed in 0..5 {
            let z = d.sample_period_point(seed);
            let h = hodge_decompose(&d, &z).unwrap();
            assert_eq!(h.dims, [1, 20, 1]);
            assert_eq!(h.h11_inertia, (1, 19));
            assert!((h.h20_norm - 2.0).abs() < 1e-9);
            assert!(h.isotropy_residual < 1e-9);
            assert!(h.orthogonality_residual < 1e-9);
            let hc = hodge_decompose(&d, &z.conjugate()).unwrap();
            assert!((hc.h20.clone() - h.h02.clone()).norm() < 1e-12);
        }
    }

    #[test]
    fn deligne_weights_on_k3() {
        let ring = CohomologyRing::k3();
        let d = k3_domain();
        let z = d.sample_period_point(7);
        let line = d.sample_irrational_line(&z, 0, 1e-9, 7).unwrap();
        let plane = d.twistor_plane(&z, &line).unwrap();
        let closure = lie_closure(
            &plane_generators(&ring, &d, plane.frame()).unwrap(),
            &ClosureOptions::default(),
        )
        .unwrap();
        assert_eq!(closure.dimension, 10);
        let x = deligne_generator(&ring, &closure, &d, &plane, &z).unwrap();
        let spec = h2_spectrum(&ring, &x.operator);
        assert!((spec[0] - Complex::new(0.0, -2.0)).norm() < 1e-8);
        assert!((spec[21] - Complex::new(0.0, 2.0)).norm() < 1e-8);
        assert!(spec[1..21].iter().all(|c| c.norm() < 1e-8));
        // zero on H⁰ and H⁴
        assert!(x.operator.matrix.column(0).norm() < 1e-8);
        assert!(x.operator.matrix.column(23).norm() < 1e-8);
        // X σ = −2i σ
        let sigma = DVector::from_vec(ring.embed_degree2(z.sigma().as_slice()));
        let xs = x.operator.matrix.map(|v| Complex::new(v, 0.0)) * &sigma;
        assert!((xs - sigma * Complex::new(0.0, -2.0)).norm() < 1e-8);
    }

    #[test]
    fn deligne_rejects_points_off_the_conic() {
        let ring = CohomologyRing::k3();
        let d = k3_domain();
        let z = d.sample_period_point(1);
        let w = d.sample_period_point(2);
        let line = d.sample_irrational_line(&z, 0, 1e-9, 1).unwrap();
        let plane = d.twistor_plane(&z, &line).unwrap();
        let closure = lie_closure(
            &plane_generators(&ring, &d, plane.frame()).unwrap(),
            &ClosureOptions::default(),
        )
        .unwrap();
        assert!(deligne_generator(&ring, &closure, &d, &plane, &w).is_err());
    }
}
