//! Majorants of an indefinite form attached to a maximal positive subspace.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lattice::{QuadLattice, WallForm};
use crate::rational::{self, Rat, RatMatrix};

/// `q_P(x) = q(x_P) − q(x_{P⊥})` for a maximal positive subspace `P`; its
/// Gram matrix is `2·G V (VᵀG V)⁻¹ VᵀG − G` for a basis `V` of `P`.
#[derive(Debug, Clone)]
pub struct MajorantForm {
    gram: DMatrix<f64>,
    dual: DMatrix<f64>,
    exact: Option<(RatMatrix, RatMatrix)>,
}

fn check_frame_len(lattice: &QuadLattice, len: usize) -> Result<()> {
    let p = lattice.signature().0;
    if len != p {
        return Err(Error::Dimension {
            expected: p,
            got: len,
        });
    }
    Ok(())
}

impl MajorantForm {
    pub fn new(lattice: &QuadLattice, frame: &[DVector<f64>]) -> Result<Self> {
        check_frame_len(lattice, frame.len())?;
        let g = lattice.gram_f64();
        let r = lattice.rank();
        let v = DMatrix::from_fn(r, frame.len(), |i, j| frame[j][i]);
        if v.nrows() != r || frame.iter().any(|f| f.len() != r) {
            return Err(Error::Dimension {
                expected: r,
                got: frame.first().map_or(0, |f| f.len()),
            });
        }
        let gv = g * &v;
        let pgram = v.transpose() * &gv;
        let min = SymmetricEigen::new(pgram.clone()).eigenvalues.min();
        if !(min > 0.0) {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        let inv = pgram
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular plane Gram".into()))?;
        let gram = (&gv * inv * gv.transpose()) * 2.0 - g;
        let gram = (&gram + gram.transpose()) * 0.5;
        let min = SymmetricEigen::new(gram.clone()).eigenvalues.min();
        if !(min > 0.0) {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        let dual = gram
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular majorant".into()))?;
        let dual = (&dual + dual.transpose()) * 0.5;
        Ok(Self {
            gram,
            dual,
            exact: None,
        })
    }

    /// Exact majorant for a subspace spanned by rational vectors.
    pub fn exact(lattice: &QuadLattice, frame: &[Vec<Rat>]) -> Result<Self> {
        check_frame_len(lattice, frame.len())?;
        let r = lattice.rank();
        if let Some(f) = frame.iter().find(|f| f.len() != r) {
            return Err(Error::Dimension {
                expected: r,
                got: f.len(),
            });
        }
        let g = lattice.gram_rat();
        let gv: RatMatrix = (0..r)
            .map(|i| frame.iter().map(|f| rational::dot(&g[i], f)).collect())
            .collect();
        let pgram: RatMatrix = frame
            .iter()
            .map(|x| frame.iter().map(|y| lattice.bilinear(x, y)).collect())
            .collect();
        let inertia = rational::inertia(&pgram);
        if inertia.positive != frame.len() {
            return Err(Error::NotPositive {
                min_eigenvalue: 0.0,
            });
        }
        let inv = rational::inverse(&pgram).expect("positive definite");
        let m = rational::mat_mul(&rational::mat_mul(&gv, &inv), &rational::transpose(&gv));
        let gram: RatMatrix = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| &m[i][j] * rational::rat(2) - &g[i][j])
                    .collect()
            })
            .collect();
        let inertia = rational::inertia(&gram);
        if inertia.positive != r {
            return Err(Error::NotPositive {
                min_eigenvalue: 0.0,
            });
        }
        let dual = rational::inverse(&gram).expect("positive definite");
        let to_f = |m: &RatMatrix| DMatrix::from_fn(r, r, |i, j| rational::to_f64(&m[i][j]));
        Ok(Self {
            gram: to_f(&gram),
            dual: to_f(&dual),
            exact: Some((gram, dual)),
        })
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Gram matrix of the dual majorant on `H^∨`.
    pub fn dual_gram(&self) -> &DMatrix<f64> {
        &self.dual
    }

    pub fn exact_gram(&self) -> Option<&RatMatrix> {
        self.exact.as_ref().map(|(g, _)| g)
    }

    pub fn exact_dual_gram(&self) -> Option<&RatMatrix> {
        self.exact.as_ref().map(|(_, d)| d)
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.gram * x))
    }

    pub fn dual_norm(&self, form: &WallForm) -> f64 {
        let c = form.coords_f64();
        c.dot(&(&self.dual * &c))
    }

    pub fn dual_norm_exact(&self, form: &WallForm) -> Option<Rat> {
        self.exact_dual_gram()
            .map(|d| rational::bilinear(d, &form.coords, &form.coords))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.gram.clone()).eigenvalues.min()
    }
}

/// q-orthogonal splitting `v = v_P + v_{P⊥}`.
pub fn split(
    lattice: &QuadLattice,
    frame: &[DVector<f64>],
    v: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let r = lattice.rank();
    if v.len() != r {
        return Err(Error::Dimension {
            expected: r,
            got: v.len(),
        });
    }
    let g = lattice.gram_f64();
    let vm = DMatrix::from_fn(r, frame.len(), |i, j| frame[j][i]);
    let gv = g * &vm;
    let pgram = vm.transpose() * &gv;
    let inv = pgram
        .try_inverse()
        .ok_or_else(|| Error::Numerical("degenerate plane".into()))?;
    let vp = &vm * (inv * (gv.transpose() * v));
    let perp = v - &vp;
    Ok((vp, perp))
}

/// `q(v_P) < −ε·q(v_{P⊥})`.
pub fn in_u_eps(
    lattice: &QuadLattice,
    frame: &[DVector<f64>],
    v: &DVector<f64>,
    eps: f64,
) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Invalid(format!("ε must lie in (0, 1), got {eps}")));
    }
    let (vp, perp) = split(lattice, frame, v)?;
    Ok(lattice.q_f64(&vp) < -eps * lattice.q_f64(&perp))
}
