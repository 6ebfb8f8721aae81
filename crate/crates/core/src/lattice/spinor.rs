//! Reflections, Cartan–Dieudonné factorisation and the real spinor norm for `−q`.

use num::{One, Signed, Zero};

use super::QuadLattice;
use crate::error::{Error, Result};
use crate::rational::{self, Rat, RatMatrix};

/// A rational matrix `g` with `gᵀ·gram·g = gram`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: RatMatrix,
}

impl Isometry {
    pub fn new(lattice: &QuadLattice, matrix: RatMatrix) -> Result<Self> {
        let n = lattice.rank();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: matrix.len(),
            });
        }
        let gt = rational::transpose(&matrix);
        let lhs = rational::mat_mul(&gt, &rational::mat_mul(lattice.gram_rat(), &matrix));
        if &lhs != lattice.gram_rat() {
            return Err(Error::NotIsometry);
        }
        Ok(Self { matrix })
    }

    pub fn from_ints(lattice: &QuadLattice, matrix: &[Vec<i64>]) -> Result<Self> {
        Self::new(lattice, rational::int_matrix_to_rat(matrix))
    }

    pub fn identity(lattice: &QuadLattice) -> Self {
        Self {
            matrix: rational::identity(lattice.rank()),
        }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_integer())
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        rational::mat_vec(&self.matrix, v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            matrix: rational::mat_mul(&self.matrix, &other.matrix),
        }
    }
}

/// `r_v(x) = x − (2 b(x,v) / q(v)) v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflection {
    pub vector: Vec<Rat>,
    pub isometry: Isometry,
    /// True when the matrix has integer entries, i.e. `r_v` preserves the lattice.
    pub integral: bool,
}

pub fn reflection(lattice: &QuadLattice, v: &[Rat]) -> Result<Reflection> {
    let n = lattice.rank();
    if v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v.len(),
        });
    }
    let qv = lattice.q(v);
    if qv.is_zero() {
        return Err(Error::IsotropicReflection);
    }
    let gv = rational::mat_vec(lattice.gram_rat(), v);
    let c = Rat::from_integer(2.into()) / qv;
    let matrix: RatMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = if i == j { Rat::one() } else { Rat::zero() };
                    d - &c * &v[i] * &gv[j]
                })
                .collect()
        })
        .collect();
    let isometry = Isometry { matrix };
    let integral = isometry.is_integral();
    Ok(Reflection {
        vector: v.to_vec(),
        isometry,
        integral,
    })
}

/// q-orthogonal basis of anisotropic vectors, built from the standard basis
/// taken in `order`.
fn orthogonal_basis(lattice: &QuadLattice, order: &[usize]) -> Result<Vec<Vec<Rat>>> {
    let n = lattice.rank();
    let mut pending: Vec<Vec<Rat>> = order
        .iter()
        .map(|&i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    while !pending.is_empty() {
        let idx = match pending.iter().position(|v| !lattice.q(v).is_zero()) {
            Some(i) => i,
            None => {
                // every remaining vector is isotropic; v_i + v_j is not when b(v_i, v_j) ≠ 0
                let pair = (0..pending.len()).find_map(|i| {
                    (i + 1..pending.len())
                        .find(|&j| !lattice.bilinear(&pending[i], &pending[j]).is_zero())
                        .map(|j| (i, j))
                });
                let (i, j) = pair.ok_or(Error::DegenerateForm)?;
                let s: Vec<Rat> = pending[i]
                    .iter()
                    .zip(&pending[j])
                    .map(|(a, b)| a + b)
                    .collect();
                pending[i] = s;
                i
            }
        };
        let w = pending.remove(idx);
        let qw = lattice.q(&w);
        for v in pending.iter_mut() {
            let c = lattice.bilinear(v, &w) / &qw;
            if !c.is_zero() {
                for (x, y) in v.iter_mut().zip(&w) {
                    *x -= &c * y;
                }
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Factors `g = r_{v_1} ∘ … ∘ r_{v_k}` (k ≤ 2·rank) and returns the `v_i`.
///
/// Walks an orthogonal anisotropic basis `w_1, …`; at each step the current
/// isometry `h` fixes the earlier `w_j`, and either `r_{hw−w}` or
/// `r_w ∘ r_{hw+w}` maps `hw` back to `w` (one of `hw ∓ w` is anisotropic since
/// `q(hw−w) + q(hw+w) = 4q(w)`).
pub fn reflection_decomposition(
    lattice: &QuadLattice,
    g: &Isometry,
    order: &[usize],
) -> Result<Vec<Vec<Rat>>> {
    let n = lattice.rank();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::Invalid(
            "order must be a permutation of the basis".into(),
        ));
    }
    let basis = orthogonal_basis(lattice, order)?;
    let mut h = g.matrix.clone();
    let mut vectors = Vec::new();
    let apply_reflection =
        |h: &mut RatMatrix, v: &[Rat], vectors: &mut Vec<Vec<Rat>>| -> Result<()> {
            let r = reflection(lattice, v)?;
            *h = rational::mat_mul(r.isometry.matrix(), h);
            vectors.push(v.to_vec());
            Ok(())
        };
    for w in &basis {
        let y = rational::mat_vec(&h, w);
        if &y == w {
            continue;
        }
        let diff: Vec<Rat> = y.iter().zip(w).map(|(a, b)| a - b).collect();
        if !lattice.q(&diff).is_zero() {
            apply_reflection(&mut h, &diff, &mut vectors)?;
        } else {
            let sum: Vec<Rat> = y.iter().zip(w).map(|(a, b)| a + b).collect();
            apply_reflection(&mut h, &sum, &mut vectors)?;
            apply_reflection(&mut h, w, &mut vectors)?;
        }
    }
    if h != rational::identity(n) {
        return Err(Error::Inconsistent(
            "reflection factorisation did not terminate at the identity".into(),
        ));
    }
    // h = r_k ⋯ r_1 g = id, so g = r_1 ⋯ r_k
    Ok(vectors)
}

/// Sign of the real spinor norm of `g` for the form `−q`: `sign ∏ (−q(v_i))`.
pub fn spinor_norm_sign(lattice: &QuadLattice, g: &Isometry) -> Result<i8> {
    let order: Vec<usize> = (0..lattice.rank()).collect();
    spinor_norm_sign_with_order(lattice, g, &order)
}

/// As [`spinor_norm_sign`], running the factorisation from a permuted basis.
pub fn spinor_norm_sign_with_order(
    lattice: &QuadLattice,
    g: &Isometry,
    order: &[usize],
) -> Result<i8> {
    let vs = reflection_decomposition(lattice, g, order)?;
    let negatives = vs.iter().filter(|v| lattice.q(v).is_positive()).count();
    Ok(if negatives % 2 == 0 { 1 } else { -1 })
}

/// Membership in `O^#(−q)`, the kernel of the real spinor norm for `−q`.
pub fn in_o_sharp(lattice: &QuadLattice, g: &Isometry) -> Result<bool> {
    Ok(spinor_norm_sign(lattice, g)? == 1)
}
