//! Period domain of a lattice of signature (3, n): period points `[σ]`,
//! oriented positive 2-planes, the spin orientation of positive 3-planes and
//! positive cones.

mod irrational;
mod lll;
mod sample;
mod twistor;

pub use irrational::{
    is_fully_irrational, picard_trivial, rational_closure_detect, rational_closure_exact,
    ClosureReport, IrrationalityVerdict, PicardVerdict,
};
pub use lll::lll_reduce;
pub use twistor::{ChainLink, ChainOptions, TwistorChain};

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::QuadLattice;

/// Numerical tolerances for period-domain computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Isotropy `q(σ) = 0`, relative.
    pub iso: f64,
    /// Orthogonality and incidence residuals on normalized vectors.
    pub orth: f64,
    /// Minimum eigenvalue certifying positivity of a 3-plane.
    pub pos: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            iso: 1e-9,
            orth: 1e-9,
            pos: 1e-6,
        }
    }
}

/// Orientation of a positive 3-plane relative to the spin orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Orientation {
    fn from_sign(x: f64) -> Self {
        if x > 0.0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// A point `[σ]` of the period domain, `σ = re + i·im`, stored as its
/// normalized representative: `q(re) = q(im) = 1`, `b(re, im) = 0`, and at the
/// first coordinate where `σ` is nonzero, `re > 0` and `im = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodPoint {
    re: DVector<f64>,
    im: DVector<f64>,
}

/// An oriented q-orthonormal pair `(a, b)` spanning a positive 2-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedTwoPlane {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
}

/// A q-orthonormal frame of a positive 3-plane together with its orientation
/// relative to the reference plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveThreePlane {
    frame: [DVector<f64>; 3],
    orientation: Orientation,
}

impl PositiveThreePlane {
    pub fn frame(&self) -> &[DVector<f64>; 3] {
        &self.frame
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
}

impl PeriodPoint {
    pub fn re(&self) -> &DVector<f64> {
        &self.re
    }

    pub fn im(&self) -> &DVector<f64> {
        &self.im
    }

    pub fn sigma(&self) -> DVector<Complex<f64>> {
        self.re.zip_map(&self.im, Complex::new)
    }

    /// `[σ̄]`.
    pub fn conjugate(&self) -> PeriodPoint {
        let (re, im) = canonical_rotation(&self.re, &(-&self.im));
        PeriodPoint { re, im }
    }

    /// Largest coordinate difference between normalized representatives.
    pub fn distance(&self, other: &PeriodPoint) -> f64 {
        (&self.re - &other.re)
            .amax()
            .max((&self.im - &other.im).amax())
    }
}

/// Rotates `a + i·b` by a unit complex number so that at the first
/// significant coordinate the real part is positive and the imaginary part 0.
fn canonical_rotation(a: &DVector<f64>, b: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let mags: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x.hypot(*y)).collect();
    let max = mags.iter().cloned().fold(0.0, f64::max);
    let j = mags.iter().position(|&m| m > 1e-6 * max).unwrap_or(0);
    let phi = b[j].atan2(a[j]);
    let (s, c) = phi.sin_cos();
    let re = a * c + b * s;
    let mut im = b * c - a * s;
    im[j] = 0.0;
    (re, im)
}

/// Diagnostics for a candidate period vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointDiagnostics {
    /// `max(|q(a) − q(b)|, 2|b(a,b)|) / h_q(σ,σ)`.
    pub isotropy_residual: f64,
    /// `h_q(σ, σ) = q(a) + q(b)`.
    pub hq: f64,
}

/// The period domain of a lattice of signature `(3, n)` with its reference
/// positive 3-plane `P_o`.
#[derive(Debug, Clone)]
pub struct PeriodDomain {
    lattice: QuadLattice,
    reference: [DVector<f64>; 3],
    negative_frame: Vec<DVector<f64>>,
    tol: Tolerances,
}

impl PeriodDomain {
    pub fn new(lattice: QuadLattice) -> Result<Self> {
        Self::with_tolerances(lattice, Tolerances::default())
    }

    pub fn with_tolerances(lattice: QuadLattice, tol: Tolerances) -> Result<Self> {
        let (p, _) = lattice.signature();
        if p != 3 {
            return Err(Error::Invalid(format!(
                "period domain needs signature (3, n), got {:?}",
                lattice.signature()
            )));
        }
        if !(tol.iso > 0.0 && tol.orth > 0.0 && tol.pos > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        let (pos, neg) = eigen_frames(lattice.gram_f64());
        let reference: [DVector<f64>; 3] = pos.try_into().expect("three positive eigenvalues");
        Ok(Self {
            lattice,
            reference,
            negative_frame: neg,
            tol,
        })
    }

    pub fn lattice(&self) -> &QuadLattice {
        &self.lattice
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// Number `n` of negative directions.
    pub fn n(&self) -> usize {
        self.lattice.signature().1
    }

    /// q-orthonormal basis of the reference plane `P_o`.
    pub fn reference_plane(&self) -> &[DVector<f64>; 3] {
        &self.reference
    }

    pub(crate) fn negative_frame(&self) -> &[DVector<f64>] {
        &self.negative_frame
    }

    pub fn b(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.lattice.bilinear_f64(x, y)
    }

    pub fn q(&self, x: &DVector<f64>) -> f64 {
        self.lattice.q_f64(x)
    }

    fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn diagnose(&self, re: &DVector<f64>, im: &DVector<f64>) -> Result<PointDiagnostics> {
        self.check_len(re)?;
        self.check_len(im)?;
        let (qa, qb, bab) = (self.q(re), self.q(im), self.b(re, im));
        let hq = qa + qb;
        let isotropy_residual =
            (qa - qb).abs().max(2.0 * bab.abs()) / hq.abs().max(f64::MIN_POSITIVE);
        Ok(PointDiagnostics {
            isotropy_residual,
            hq,
        })
    }

    /// Validates and normalizes `[re + i·im]`; any nonzero complex multiple
    /// yields the same point.
    pub fn point(&self, re: &DVector<f64>, im: &DVector<f64>) -> Result<PeriodPoint> {
        let d = self.diagnose(re, im)?;
        if !(d.hq > 0.0) {
            return Err(Error::Invalid(format!(
                "h_q(σ, σ) = {} is not positive",
                d.hq
            )));
        }
        if d.isotropy_residual > self.tol.iso {
            return Err(Error::Invalid(format!(
                "q(σ) ≠ 0 (residual {:e})",
                d.isotropy_residual
            )));
        }
        let a = re / self.q(re).sqrt();
        let b = im - &a * self.b(im, &a);
        let b = &b / self.q(&b).sqrt();
        let (re, im) = canonical_rotation(&a, &b);
        Ok(PeriodPoint { re, im })
    }

    /// `Π_z = span(Re σ, Im σ)` oriented by `(Re σ, Im σ)`.
    pub fn point_to_plane(&self, z: &PeriodPoint) -> OrientedTwoPlane {
        OrientedTwoPlane {
            a: z.re.clone(),
            b: z.im.clone(),
        }
    }

    /// Orthonormalizes `(a, b)` in order, keeping the orientation.
    pub fn two_plane(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<OrientedTwoPlane> {
        self.check_len(a)?;
        self.check_len(b)?;
        let margin = self.positivity_margin(&[a, b])?;
        if margin <= 0.0 {
            return Err(Error::NotPositive {
                min_eigenvalue: margin,
            });
        }
        let a = a / self.q(a).sqrt();
        let b = b - &a * self.b(b, &a);
        let b = &b / self.q(&b).sqrt();
        Ok(OrientedTwoPlane { a, b })
    }

    /// The point `[a + i·b]` of an oriented positive plane.
    pub fn plane_to_point(&self, plane: &OrientedTwoPlane) -> Result<PeriodPoint> {
        let p = self.two_plane(&plane.a, &plane.b)?;
        self.point(&p.a, &p.b)
    }

    /// Minimum of `q` on the Euclidean unit sphere of `span(vectors)`
    /// (non-positive when degenerate or indefinite).
    pub fn positivity_margin(&self, vectors: &[&DVector<f64>]) -> Result<f64> {
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            self.check_len(v)?;
            let norm0 = v.norm();
            let mut w = (*v).clone();
            for _ in 0..2 {
                for e in &basis {
                    w -= e * e.dot(&w);
                }
            }
            let norm = w.norm();
            if !(norm > 1e-12 * norm0) {
                return Ok(0.0);
            }
            basis.push(w / norm);
        }
        let k = basis.len();
        let gram = DMatrix::from_fn(k, k, |i, j| self.b(&basis[i], &basis[j]));
        Ok(SymmetricEigen::new(gram).eigenvalues.min())
    }

    /// Orthonormalizes a spanning triple and orients it by the sign of the
    /// determinant of its q-orthogonal projection to `P_o`.
    pub fn orient_three_plane(&self, vectors: &[DVector<f64>; 3]) -> Result<PositiveThreePlane> {
        let margin = self.positivity_margin(&[&vectors[0], &vectors[1], &vectors[2]])?;
        if margin <= 0.0 {
            return Err(Error::NotPositive {
                min_eigenvalue: margin,
            });
        }
        let mut frame: Vec<DVector<f64>> = Vec::with_capacity(3);
        for v in vectors {
            let mut w = v.clone();
            for _ in 0..2 {
                for e in &frame {
                    w -= e * self.b(e, &w);
                }
            }
            let qw = self.q(&w);
            frame.push(w / qw.sqrt());
        }
        let frame: [DVector<f64>; 3] = frame.try_into().expect("three vectors");
        let orientation = Orientation::from_sign(self.projection_det(&frame));
        Ok(PositiveThreePlane { frame, orientation })
    }

    /// `det [b(p_j, o_i)]`, the determinant of the projection to `P_o`.
    pub fn projection_det(&self, frame: &[DVector<f64>; 3]) -> f64 {
        let m = self.projection_matrix(frame);
        m.determinant()
    }

    pub(crate) fn projection_matrix(&self, frame: &[DVector<f64>; 3]) -> DMatrix<f64> {
        DMatrix::from_fn(3, 3, |i, j| self.b(&frame[j], &self.reference[i]))
    }

    /// Scale-free residual of `c` against `Π_z^⊥`.
    pub fn perp_residual(&self, z: &PeriodPoint, c: &DVector<f64>) -> f64 {
        let n = c.norm();
        if n == 0.0 {
            return 0.0;
        }
        (self.b(c, &z.re).abs().max(self.b(c, &z.im).abs())) / n
    }

    /// Membership of `c` in the positive cone of `z`: the component of
    /// `{q > 0} ⊂ Π_z^⊥` picked out by the spin orientation.
    pub fn positive_cone_contains(&self, z: &PeriodPoint, c: &DVector<f64>) -> Result<bool> {
        self.check_len(c)?;
        let residual = self.perp_residual(z, c);
        if residual > self.tol.orth {
            return Err(Error::NotInPerp { residual });
        }
        let qc = self.q(c);
        if !(qc > 0.0) {
            return Ok(false);
        }
        let frame = [z.re.clone(), z.im.clone(), c / qc.sqrt()];
        Ok(self.projection_det(&frame) > 0.0)
    }
}

/// Eigen-frames of a Gram matrix: the q-orthonormal positive frame (sorted by
/// descending eigenvalue; within an eigenvalue cluster, projections of the
/// standard basis in index order) and the q-anti-orthonormal negative frame.
fn eigen_frames(gram: &DMatrix<f64>) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let n = gram.nrows();
    let eig = SymmetricEigen::new(gram.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut start = 0;
    while start < n {
        let lam = eig.eigenvalues[idx[start]];
        let mut end = start + 1;
        while end < n && (eig.eigenvalues[idx[end]] - lam).abs() < 1e-8 * scale {
            end += 1;
        }
        let cluster: Vec<DVector<f64>> = idx[start..end]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let mut chosen: Vec<DVector<f64>> = Vec::new();
        for k in 0..n {
            if chosen.len() == cluster.len() {
                break;
            }
            // projection of e_k onto the eigenspace, orthogonalized against earlier picks
            let mut w = DVector::zeros(n);
            for v in &cluster {
                w += v * v[k];
            }
            for _ in 0..2 {
                for c in &chosen {
                    w -= c * c.dot(&w);
                }
            }
            let norm = w.norm();
            if norm > 1e-6 {
                chosen.push(w / norm);
            }
        }
        let target = if lam > 0.0 { &mut pos } else { &mut neg };
        for v in chosen {
            let s = (v.dot(&(gram * &v))).abs().sqrt();
            target.push(v / s);
        }
        start = end;
    }
    (pos, neg)
}
