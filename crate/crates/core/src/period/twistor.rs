//! Twistor conics `𝒟(P)` of positive 3-planes and chains of them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{PeriodDomain, PeriodPoint, PositiveThreePlane};
use crate::error::{Error, Result};

/// One conic of a chain: `entry` and `exit` both lie on `𝒟(plane)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLink {
    pub plane: PositiveThreePlane,
    pub entry: PeriodPoint,
    pub exit: PeriodPoint,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwistorChain {
    pub links: Vec<ChainLink>,
}

impl TwistorChain {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub max_links: usize,
    /// Required positivity margin of every link plane.
    pub tau_pos: f64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            max_links: 400,
            tau_pos: 1e-6,
        }
    }
}

impl PeriodDomain {
    /// `ℓ + Π_z` as an oriented positive 3-plane with frame `(Re σ, Im σ, ℓ̂)`.
    pub fn twistor_plane(
        &self,
        z: &PeriodPoint,
        line: &DVector<f64>,
    ) -> Result<PositiveThreePlane> {
        self.check_len(line)?;
        let residual = self.perp_residual(z, line);
        if residual > self.tol.orth {
            return Err(Error::NotInPerp { residual });
        }
        let ql = self.q(line);
        if !(ql > 0.0) {
            return Err(Error::NotPositive { min_eigenvalue: ql });
        }
        self.orient_three_plane(&[z.re.clone(), z.im.clone(), line.clone()])
    }

    /// The point of `𝒟(P)` attached to the unit vector `u ∈ P`.
    pub fn conic_point(&self, plane: &PositiveThreePlane, u: &DVector<f64>) -> Result<PeriodPoint> {
        self.conic_point_with_order(plane, u, [0, 1, 2])
    }

    /// As [`conic_point`](Self::conic_point), completing `u` to a frame with the
    /// plane's frame vectors tried in `order`.
    pub fn conic_point_with_order(
        &self,
        plane: &PositiveThreePlane,
        u: &DVector<f64>,
        order: [usize; 3],
    ) -> Result<PeriodPoint> {
        self.check_len(u)?;
        let residual = self.plane_residual(plane, u);
        if residual > self.tol.orth * u.norm().max(1.0) {
            return Err(Error::Invalid(format!(
                "vector not in the plane (residual {residual:e})"
            )));
        }
        if (self.q(u) - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!(
                "vector is not q-unit (q = {})",
                self.q(u)
            )));
        }
        // v from the first frame vector not nearly parallel to u; w from the
        // first one with a substantial component off span(u, v)
        let mut frame = vec![u.clone()];
        for threshold in [0.9, 0.3] {
            for &j in &order {
                let mut w = plane.frame[j].clone();
                for _ in 0..2 {
                    for e in &frame {
                        w -= e * self.b(e, &w);
                    }
                }
                let qw = self.q(&w);
                let accept = if frame.len() == 1 {
                    self.b(u, &plane.frame[j]).abs() < threshold
                } else {
                    qw > threshold * threshold
                };
                if accept {
                    frame.push(w / qw.sqrt());
                    break;
                }
            }
        }
        if frame.len() != 3 {
            return Err(Error::Numerical("frame completion failed".into()));
        }
        let coeffs = DMatrix::from_fn(3, 3, |i, j| self.b(&frame[j], &plane.frame[i]));
        if coeffs.determinant() * plane.orientation.sign() < 0.0 {
            frame[2] = -&frame[2];
        }
        self.point(&frame[1], &frame[2])
    }

    /// Euclidean distance from `x` to its q-orthogonal projection onto `P`.
    pub fn plane_residual(&self, plane: &PositiveThreePlane, x: &DVector<f64>) -> f64 {
        let mut r = x.clone();
        for p in &plane.frame {
            r -= p * self.b(x, p);
        }
        r.norm()
    }

    /// Incidence residual of `z` with the conic `𝒟(P)`.
    pub fn conic_residual(&self, plane: &PositiveThreePlane, z: &PeriodPoint) -> f64 {
        self.plane_residual(plane, &z.re)
            .max(self.plane_residual(plane, &z.im))
    }

    /// `Π_z ⊂ P` within the orthogonality tolerance.
    pub fn conic_contains(&self, plane: &PositiveThreePlane, z: &PeriodPoint) -> bool {
        self.conic_residual(plane, z) < self.tol.orth
    }

    /// A unit positive vector of `P_o ∩ Π^⊥` for a positive plane `Π = span(a, b)`.
    pub(crate) fn reference_line(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let o = &self.reference;
        let m = DMatrix::from_fn(2, 3, |i, j| self.b(&o[j], if i == 0 { a } else { b }));
        // null vector of the 2x3 system: eigenvector of mᵀm for the smallest eigenvalue
        let eig = SymmetricEigen::new(m.transpose() * &m);
        let k = eig.eigenvalues.imin();
        let c = eig.eigenvectors.column(k).into_owned();
        let mut x = &o[0] * c[0] + &o[1] * c[1] + &o[2] * c[2];
        // remove rounding drift out of Π^⊥
        for _ in 0..2 {
            x -= a * self.b(&x, a);
            x -= b * self.b(&x, b);
        }
        let qx = self.q(&x);
        x / qx.sqrt()
    }

    /// Graph frame `(o_i + A o_i)` of a positive 3-plane over `P_o`.
    fn graph_frame(&self, frame: &[DVector<f64>; 3]) -> Result<[DVector<f64>; 3]> {
        let m = self.projection_matrix(frame);
        let inv = m.try_inverse().ok_or_else(|| {
            Error::Numerical("projection to the reference plane is singular".into())
        })?;
        Ok(std::array::from_fn(|i| {
            &frame[0] * inv[(0, i)] + &frame[1] * inv[(1, i)] + &frame[2] * inv[(2, i)]
        }))
    }

    /// Connects `source` to `target` by a chain of twistor conics.
    ///
    /// Each endpoint plane `Π` is thickened to the positive 3-plane
    /// `Π + (P_o ∩ Π^⊥)`. Positive 3-planes are graphs of maps `P_o → P_o^⊥`
    /// of norm < 1, a convex set, so the straight segment between the two
    /// graph frames stays positive; it is discretized into steps and each step
    /// replaces one frame vector at a time ("pivots"). Consecutive planes then
    /// share a positive 2-plane, which becomes the exit/entry point. The step
    /// count doubles until every pivot plane clears `tau_pos`.
    pub fn chain_connect(
        &self,
        source: &PeriodPoint,
        target: &PeriodPoint,
        opts: &ChainOptions,
    ) -> Result<TwistorChain> {
        if self.n() == 0 {
            return Err(Error::SignatureTooSmall(
                "signature (3, 0): Π^⊥ has no positive vectors".into(),
            ));
        }
        if source.distance(target) < 1e-12 {
            return Ok(TwistorChain::default());
        }
        if let Some(link) = self.single_link(source, target, opts)? {
            return Ok(TwistorChain { links: vec![link] });
        }
        let start = self.twistor_plane(source, &self.reference_line(&source.re, &source.im))?;
        let end = self.twistor_plane(target, &self.reference_line(&target.re, &target.im))?;
        let g0 = self.graph_frame(&start.frame)?;
        let g1 = self.graph_frame(&end.frame)?;

        let mut steps = 1usize;
        loop {
            if 3 * steps + 1 > opts.max_links {
                return Err(Error::MaxLinksExceeded(opts.max_links));
            }
            match self.pivot_chain(source, target, &start, &end, &g0, &g1, steps, opts)? {
                Some(chain) => return Ok(chain),
                None => steps *= 2,
            }
        }
    }

    /// One conic through both points, when `Π + Π'` is a positive 3-plane or
    /// the points share their plane.
    fn single_link(
        &self,
        source: &PeriodPoint,
        target: &PeriodPoint,
        opts: &ChainOptions,
    ) -> Result<Option<ChainLink>> {
        let mut best: Option<DVector<f64>> = None;
        for x in [&target.re, &target.im] {
            let mut r = x.clone();
            r -= &source.re * self.b(x, &source.re);
            r -= &source.im * self.b(x, &source.im);
            if best.as_ref().is_none_or(|b| r.norm() > b.norm()) {
                best = Some(r);
            }
        }
        let third = best.expect("two candidates");
        let plane = if third.norm() < 1e-10 {
            self.twistor_plane(source, &self.reference_line(&source.re, &source.im))?
        } else {
            if !(self.q(&third) > 0.0) {
                return Ok(None);
            }
            match self.twistor_plane(source, &third) {
                Ok(p) => p,
                Err(_) => return Ok(None),
            }
        };
        let margin =
            self.positivity_margin(&[&plane.frame[0], &plane.frame[1], &plane.frame[2]])?;
        if margin > opts.tau_pos
            && self.conic_contains(&plane, target)
            && self.conic_contains(&plane, source)
        {
            return Ok(Some(ChainLink {
                plane,
                entry: source.clone(),
                exit: target.clone(),
            }));
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn pivot_chain(
        &self,
        source: &PeriodPoint,
        target: &PeriodPoint,
        start: &PositiveThreePlane,
        end: &PositiveThreePlane,
        g0: &[DVector<f64>; 3],
        g1: &[DVector<f64>; 3],
        steps: usize,
        opts: &ChainOptions,
    ) -> Result<Option<TwistorChain>> {
        let frame_at = |k: usize| -> [DVector<f64>; 3] {
            let t = k as f64 / steps as f64;
            std::array::from_fn(|i| &g0[i] * (1.0 - t) + &g1[i] * t)
        };
        // planes[i] and shared[i] = the 2-plane shared by planes[i] and planes[i+1]
        let mut planes: Vec<PositiveThreePlane> = vec![start.clone()];
        let mut shared: Vec<PeriodPoint> = Vec::new();
        let mut current = frame_at(0);
        for k in 0..steps {
            let next = frame_at(k + 1);
            for c in 0..3 {
                if (&current[c] - &next[c]).amax() < 1e-14 {
                    continue;
                }
                let keep: Vec<&DVector<f64>> =
                    (0..3).filter(|&i| i != c).map(|i| &current[i]).collect();
                let mut cand = current.clone();
                cand[c] = next[c].clone();
                let margin = self.positivity_margin(&[&cand[0], &cand[1], &cand[2]])?;
                if margin <= opts.tau_pos {
                    return Ok(None);
                }
                let two = self.two_plane(keep[0], keep[1])?;
                shared.push(self.point(&two.a, &two.b)?);
                planes.push(self.orient_three_plane(&cand)?);
                current = cand;
            }
        }
        // the final graph frame spans the end plane; replace it to keep the target's frame exactly
        if let Some(last) = planes.last_mut() {
            *last = end.clone();
        }
        if planes.len() > opts.max_links {
            return Err(Error::MaxLinksExceeded(opts.max_links));
        }
        let mut links = Vec::with_capacity(planes.len());
        for (i, plane) in planes.into_iter().enumerate() {
            let entry = if i == 0 {
                source.clone()
            } else {
                shared[i - 1].clone()
            };
            let exit = if i == shared.len() {
                target.clone()
            } else {
                shared[i].clone()
            };
            links.push(ChainLink { plane, entry, exit });
        }
        let chain = TwistorChain { links };
        self.verify_chain(source, target, &chain, opts)?;
        Ok(Some(chain))
    }

    /// Re-checks every chain invariant; returns an error naming the first breach.
    pub fn verify_chain(
        &self,
        source: &PeriodPoint,
        target: &PeriodPoint,
        chain: &TwistorChain,
        opts: &ChainOptions,
    ) -> Result<()> {
        if chain.is_empty() {
            return if source.distance(target) < 1e-12 {
                Ok(())
            } else {
                Err(Error::Numerical(
                    "empty chain between distinct points".into(),
                ))
            };
        }
        if chain.links[0].entry.distance(source) > 1e-9 {
            return Err(Error::Numerical(
                "chain does not start at the source".into(),
            ));
        }
        if chain.links[chain.len() - 1].exit.distance(target) > 1e-9 {
            return Err(Error::Numerical("chain does not end at the target".into()));
        }
        for (i, link) in chain.links.iter().enumerate() {
            let f = &link.plane.frame;
            let margin = self.positivity_margin(&[&f[0], &f[1], &f[2]])?;
            if margin <= opts.tau_pos {
                return Err(Error::Numerical(format!(
                    "link {i}: plane margin {margin:e}"
                )));
            }
            if !self.conic_contains(&link.plane, &link.entry)
                || !self.conic_contains(&link.plane, &link.exit)
            {
                return Err(Error::Numerical(format!(
                    "link {i}: endpoint off the conic"
                )));
            }
            if i + 1 < chain.len() && link.exit.distance(&chain.links[i + 1].entry) > 1e-12 {
                return Err(Error::Numerical(format!(
                    "link {i}: exit differs from next entry"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{diag_point, u3, vec6};
    use super::*;
    use crate::lattice::QuadLattice;

    fn diagonals() -> [DVector<f64>; 3] {
        [
            vec6([1., 1., 0., 0., 0., 0.]),
            vec6([0., 0., 1., 1., 0., 0.]),
            vec6([0., 0., 0., 0., 1., 1.]),
        ]
    }

    #[test]
    fn twistor_plane_of_diagonals() {
        let d = u3();
        let z = diag_point(&d);
        let p = d
            .twistor_plane(&z, &vec6([0., 0., 0., 0., 1., 1.]))
            .unwrap();
        assert!(d.conic_contains(&p, &z));
        let s = 1.0 / 2f64.sqrt();
        assert!((&p.frame()[2] - vec6([0., 0., 0., 0., s, s])).amax() < 1e-12);
        assert!(matches!(
            d.twistor_plane(&z, &vec6([1., 1., 0., 0., 0., 0.])),
            Err(Error::NotInPerp { .. })
        ));
        assert!(matches!(
            d.twistor_plane(&z, &vec6([0., 0., 0., 0., 1., -1.])),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn conic_point_examples() {
        let d = u3();
        let p = d.orient_three_plane(&diagonals()).unwrap();
        let f = p.frame().clone();
        let z = d.conic_point(&p, &f[2]).unwrap();
        let expect = d.point(&f[0], &f[1]).unwrap();
        assert!(z.distance(&expect) < 1e-12);
        let zc = d.conic_point(&p, &(-&f[2])).unwrap();
        assert!(zc.distance(&expect.conjugate()) < 1e-12);
        assert!(d.conic_point(&p, &(&f[2] * 2.0)).is_err());
        assert!(d.conic_point(&p, &vec6([1., -1., 0., 0., 0., 0.])).is_err());
    }

    #[test]
    fn conic_membership() {
        let d = u3();
        let p = d.orient_three_plane(&diagonals()).unwrap();
        let f = p.frame();
        let u = &f[0] * 0.6 + &f[1] * 0.8;
        let z = d.conic_point(&p, &u).unwrap();
        assert!(d.conic_contains(&p, &z));
        // a plane tilted into the negative direction e₁ − f₁ leaves P
        let (ch, sh) = (0.5f64.cosh(), 0.5f64.sinh());
        let tilted = &f[0] * ch + vec6([s2(), -s2(), 0., 0., 0., 0.]) * sh;
        let off = d.point(&f[1], &tilted).unwrap();
        assert!(!d.conic_contains(&p, &off));
        // perturbation by 10·τ_orth along a negative normal direction
        let normal = vec6([0., 0., 0., 0., s2(), -s2()]);
        let eps = 10.0 * d.tolerances().orth;
        let near = d.point(&(z.re() + &normal * eps), z.im()).unwrap();
        assert!(!d.conic_contains(&p, &near));
        assert!(d.conic_residual(&p, &near) < 20.0 * d.tolerances().orth);
    }

    fn s2() -> f64 {
        1.0 / 2f64.sqrt()
    }

    #[test]
    fn trivial_and_single_link_chains() {
        let d = u3();
        let s = 1.0 / 2f64.sqrt();
        let x: Vec<DVector<f64>> = diagonals().iter().map(|v| v * s).collect();
        let z = d.point(&x[0], &x[1]).unwrap();
        assert!(d
            .chain_connect(&z, &z, &ChainOptions::default())
            .unwrap()
            .is_empty());
        let z2 = d.point(&x[1], &x[2]).unwrap();
        let chain = d.chain_connect(&z, &z2, &ChainOptions::default()).unwrap();
        assert_eq!(chain.len(), 1);
        let f = chain.links[0].plane.frame();
        for v in f {
            assert!(d.plane_residual(&d.orient_three_plane(&diagonals()).unwrap(), v) < 1e-12);
        }
        let zc = z.conjugate();
        assert_eq!(
            d.chain_connect(&z, &zc, &ChainOptions::default())
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn chain_between_generic_points() {
        let d = PeriodDomain::new(QuadLattice::k3()).unwrap();
        let a = d.sample_period_point(11);
        let b = d.sample_period_point(12);
        let opts = ChainOptions::default();
        let chain = d.chain_connect(&a, &b, &opts).unwrap();
        assert!(!chain.is_empty());
        d.verify_chain(&a, &b, &chain, &opts).unwrap();
    }

    #[test]
    fn chain_rejects_definite_lattice() {
        let d = PeriodDomain::new(QuadLattice::rank1(1).unwrap().rescale(1).unwrap());
        assert!(d.is_err());
        let l = QuadLattice::new(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let d = PeriodDomain::new(l).unwrap();
        let e = |i: usize| {
            let mut v = DVector::zeros(3);
            v[i] = 1.0;
            v
        };
        let z = d.point(&e(0), &e(1)).unwrap();
        let w = d.point(&e(1), &e(2)).unwrap();
        assert!(matches!(
            d.chain_connect(&z, &w, &ChainOptions::default()),
            Err(Error::SignatureTooSmall(_))
        ));
    }

    #[test]
    fn max_links_is_enforced() {
        let d = PeriodDomain::new(QuadLattice::k3()).unwrap();
        let a = d.sample_period_point(1);
        let b = d.sample_period_point(2);
        let opts = ChainOptions {
            max_links: 2,
            ..Default::default()
        };
        assert!(matches!(
            d.chain_connect(&a, &b, &opts),
            Err(Error::MaxLinksExceeded(2))
        ));
    }
}
