//! Seeded sampling of period points and irrational positive lines.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::irrational::{is_fully_irrational, IrrationalityVerdict};
use super::{PeriodDomain, PeriodPoint};
use crate::error::{Error, Result};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

impl PeriodDomain {
    /// Random vector `Σ c_i o_i + s·Σ d_j n_j` over the reference and
    /// negative eigen-frames.
    fn random_vector(&self, rng: &mut ChaCha8Rng, spread: f64) -> DVector<f64> {
        let mut v = DVector::zeros(self.rank());
        for o in self.reference_plane() {
            v += o * gaussian(rng);
        }
        for n in self.negative_frame() {
            v += n * (spread * gaussian(rng));
        }
        v
    }

    /// A period point drawn deterministically from `seed`.
    pub fn sample_period_point(&self, seed: u64) -> PeriodPoint {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.negative_frame().len().max(1) as f64;
        let mut spread = 0.6 / n.sqrt();
        loop {
            let a = self.random_vector(&mut rng, spread);
            let b = self.random_vector(&mut rng, spread);
            if let Ok(margin) = self.positivity_margin(&[&a, &b]) {
                if margin > 1e-3 {
                    if let Ok(plane) = self.two_plane(&a, &b) {
                        if let Ok(z) = self.point(&plane.a, &plane.b) {
                            return z;
                        }
                    }
                }
            }
            spread *= 0.5;
        }
    }

    /// A positive vector `ℓ ⊥ Π_z` such that `Π_z + ℓ` passes the
    /// full-irrationality test at `(height, tol)`.
    pub fn sample_irrational_line(
        &self,
        z: &PeriodPoint,
        height: u64,
        tol: f64,
        seed: u64,
    ) -> Result<DVector<f64>> {
        if self.n() == 0 {
            return Err(Error::SignatureTooSmall(
                "signature (3, 0): Π_z^⊥ has no positive vectors".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (z.re(), z.im());
        let base = self.reference_line(a, b);
        for _ in 0..64 {
            let mut y = self.random_vector(&mut rng, 1.0);
            for _ in 0..2 {
                y -= a * self.b(&y, a);
                y -= b * self.b(&y, b);
            }
            let mut s = 0.5;
            let line = loop {
                let l = &base + &y * s;
                if self.q(&l) > 0.25 {
                    break l;
                }
                s *= 0.5;
            };
            let line = &line / self.q(&line).sqrt();
            let span = [a.clone(), b.clone(), line.clone()];
            if let IrrationalityVerdict::FullyIrrational { .. } =
                is_fully_irrational(&span, height, tol)?
            {
                return Ok(line);
            }
        }
        Err(Error::Numerical(
            "no fully irrational line found in 64 draws".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::QuadLattice;

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let d = PeriodDomain::new(QuadLattice::k3()).unwrap();
        let z1 = d.sample_period_point(42);
        let z2 = d.sample_period_point(42);
        assert_eq!(z1, z2);
        assert_ne!(z1, d.sample_period_point(43));
        for seed in 0..100 {
            let z = d.sample_period_point(seed);
            let diag = d.diagnose(z.re(), z.im()).unwrap();
            assert!(diag.isotropy_residual < 1e-12);
            assert!(diag.hq > 0.0);
        }
    }

    #[test]
    fn irrational_line_composes_with_twistor_plane() {
        let d = PeriodDomain::new(QuadLattice::u_power(3)).unwrap();
        let z = d.sample_period_point(3);
        let l = d.sample_irrational_line(&z, 100, 1e-9, 9).unwrap();
        assert_eq!(l, d.sample_irrational_line(&z, 100, 1e-9, 9).unwrap());
        let residual = d.perp_residual(&z, &l);
        assert!(residual < 1e-12);
        assert!(d.q(&l) > 0.0);
        let p = d.twistor_plane(&z, &l).unwrap();
        assert!(d.conic_contains(&p, &z));
        let k3 = PeriodDomain::new(QuadLattice::k3()).unwrap();
        let z = k3.sample_period_point(3);
        let l = k3.sample_irrational_line(&z, 2, 1e-9, 1).unwrap();
        assert!(k3.twistor_plane(&z, &l).is_ok());
    }
}
