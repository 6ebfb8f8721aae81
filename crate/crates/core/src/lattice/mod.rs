//! Integral quadratic lattices: Gram matrices, exact signatures, the dual
//! form on `H^∨` and negative linear forms.

mod spinor;

pub use spinor::{
    in_o_sharp, reflection, reflection_decomposition, spinor_norm_sign,
    spinor_norm_sign_with_order, Isometry, Reflection,
};

use nalgebra::{DMatrix, DVector};
use num::bigint::BigInt;
use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, inertia, Inertia, Rat, RatMatrix};

/// Free abelian group `Z^rank` with an integral symmetric nondegenerate form.
#[derive(Debug, Clone)]
pub struct QuadLattice {
    gram: Vec<Vec<i64>>,
    gram_rat: RatMatrix,
    gram_inv: RatMatrix,
    gram_f64: DMatrix<f64>,
    signature: (usize, usize),
}

impl PartialEq for QuadLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

/// Exact inertia `(p, m)` of a nondegenerate integral Gram matrix.
pub fn signature(gram: &[Vec<i64>]) -> Result<(usize, usize)> {
    let i = inertia(&rational::int_matrix_to_rat(gram));
    if i.zero > 0 {
        return Err(Error::DegenerateForm);
    }
    Ok((i.positive, i.negative))
}

impl QuadLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::Invalid("empty Gram matrix".into()));
        }
        for row in &gram {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let signature = signature(&gram)?;
        let gram_rat = rational::int_matrix_to_rat(&gram);
        let gram_inv = rational::inverse(&gram_rat).ok_or(Error::DegenerateForm)?;
        let gram_f64 = DMatrix::from_fn(n, n, |i, j| gram[i][j] as f64);
        Ok(Self {
            gram,
            gram_rat,
            gram_inv,
            gram_f64,
            signature,
        })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn gram_rat(&self) -> &RatMatrix {
        &self.gram_rat
    }

    /// Exact inverse Gram matrix, the Gram matrix of `q^∨` on `H^∨`.
    pub fn gram_inverse(&self) -> &RatMatrix {
        &self.gram_inv
    }

    pub fn gram_f64(&self) -> &DMatrix<f64> {
        &self.gram_f64
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn det(&self) -> BigInt {
        rational::det_int(&self.gram)
    }

    pub fn bilinear(&self, x: &[Rat], y: &[Rat]) -> Rat {
        rational::bilinear(&self.gram_rat, x, y)
    }

    pub fn q(&self, x: &[Rat]) -> Rat {
        self.bilinear(x, x)
    }

    pub fn q_int(&self, x: &[i64]) -> i128 {
        let n = self.rank();
        let mut s = 0i128;
        for i in 0..n {
            for j in 0..n {
                s += x[i] as i128 * self.gram[i][j] as i128 * x[j] as i128;
            }
        }
        s
    }

    pub fn bilinear_f64(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.gram_f64 * y))
    }

    pub fn q_f64(&self, x: &DVector<f64>) -> f64 {
        self.bilinear_f64(x, x)
    }

    /// The hyperbolic plane `[[0,1],[1,0]]`.
    pub fn u() -> Self {
        Self::new(vec![vec![0, 1], vec![1, 0]]).expect("U is nondegenerate")
    }

    /// The positive definite E8 root lattice (Cartan matrix).
    pub fn e8() -> Self {
        const EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (a, b) in EDGES {
            g[a][b] = -1;
            g[b][a] = -1;
        }
        Self::new(g).expect("E8 is unimodular")
    }

    /// `⟨k⟩`, the rank one lattice with Gram `[[k]]`.
    pub fn rank1(k: i64) -> Result<Self> {
        Self::new(vec![vec![k]])
    }

    pub fn direct_sum(parts: &[QuadLattice]) -> Result<Self> {
        let n: usize = parts.iter().map(QuadLattice::rank).sum();
        let mut g = vec![vec![0i64; n]; n];
        let mut off = 0;
        for p in parts {
            for (i, row) in p.gram.iter().enumerate() {
                g[off + i][off..off + row.len()].copy_from_slice(row);
            }
            off += p.rank();
        }
        Self::new(g)
    }

    /// `L(s)`: the Gram matrix multiplied by `s`.
    pub fn rescale(&self, s: i64) -> Result<Self> {
        if s == 0 {
            return Err(Error::Invalid("rescale by 0".into()));
        }
        Self::new(
            self.gram
                .iter()
                .map(|r| r.iter().map(|x| x * s).collect())
                .collect(),
        )
    }

    /// `U³ ⊕ E8(−1)²`, the K3 lattice of signature (3, 19).
    pub fn k3() -> Self {
        let u = Self::u();
        let e = Self::e8().rescale(-1).expect("nonzero scale");
        Self::direct_sum(&[u.clone(), u.clone(), u, e.clone(), e]).expect("unimodular")
    }

    /// `U^k`.
    pub fn u_power(k: usize) -> Self {
        Self::direct_sum(&vec![Self::u(); k]).expect("unimodular")
    }

    /// Builds a lattice from a short name such as `"K3"`, `"U^3"`, `"E8(-1)"`,
    /// `"<-2>"` or sums of those joined by `+` (e.g. `"U^2+<-2>"`).
    pub fn standard(name: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown lattice name {name:?}"));
        let mut parts = Vec::new();
        for term in name.split('+') {
            let mut t = term.trim();
            let mut power = 1usize;
            if let Some((base, p)) = t.rsplit_once('^') {
                power = p.trim().parse().map_err(|_| bad())?;
                t = base.trim();
            }
            let mut scale = 1i64;
            if t.ends_with(')') && !t.starts_with('<') {
                let open = t.find('(').ok_or_else(bad)?;
                scale = t[open + 1..t.len() - 1].trim().parse().map_err(|_| bad())?;
                t = t[..open].trim();
            }
            let base = match t {
                "U" => Self::u(),
                "E8" => Self::e8(),
                "K3" => Self::k3(),
                _ if t.starts_with('<') && t.ends_with('>') => {
                    let k: i64 = t[1..t.len() - 1].trim().parse().map_err(|_| bad())?;
                    Self::rank1(k)?
                }
                _ => return Err(bad()),
            };
            let base = if scale == 1 {
                base
            } else {
                base.rescale(scale)?
            };
            parts.extend(std::iter::repeat_n(base, power));
        }
        Self::direct_sum(&parts)
    }
}

/// A linear form `δ ∈ H^∨`, `δ(v) = coords · v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WallForm {
    pub coords: Vec<Rat>,
}

impl WallForm {
    pub fn new(coords: Vec<Rat>) -> Self {
        Self { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self {
            coords: rational::int_vec_to_rat(coords),
        }
    }

    /// `b(v, ·)` for a lattice vector `v`.
    pub fn dual_to(lattice: &QuadLattice, v: &[Rat]) -> Self {
        Self {
            coords: rational::mat_vec(lattice.gram_rat(), v),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, v: &[Rat]) -> Rat {
        rational::dot(&self.coords, v)
    }

    pub fn coords_f64(&self) -> DVector<f64> {
        DVector::from_iterator(self.coords.len(), self.coords.iter().map(rational::to_f64))
    }

    pub fn eval_f64(&self, v: &DVector<f64>) -> f64 {
        self.coords_f64().dot(v)
    }

    /// Integral with coprime coordinates, i.e. a primitive element of `Hom(H, Z)`.
    pub fn is_indivisible(&self) -> bool {
        if !self.coords.iter().all(|c| c.is_integer()) {
            return false;
        }
        let ints: Vec<BigInt> = self.coords.iter().map(|c| c.to_integer()).collect();
        rational::gcd_all(&ints) == BigInt::from(1)
    }

    pub fn negated(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// `q^∨(δ) = δ · gram⁻¹ · δᵀ`, exact.
pub fn dual_value(lattice: &QuadLattice, form: &WallForm) -> Result<Rat> {
    if form.coords.len() != lattice.rank() {
        return Err(Error::Dimension {
            expected: lattice.rank(),
            got: form.coords.len(),
        });
    }
    Ok(rational::bilinear(
        lattice.gram_inverse(),
        &form.coords,
        &form.coords,
    ))
}

/// Outcome of the two-route negativity test for a linear form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegativeFormReport {
    pub negative: bool,
    #[serde(serialize_with = "crate::json::ser_rat")]
    pub dual_value: Rat,
    pub kernel_inertia: Inertia,
}

/// Tests `q^∨(δ) < 0` and, independently, that `q` restricted to `ker δ` has
/// inertia `(p, m − 1)`; the two must agree.
pub fn negative_form_check(lattice: &QuadLattice, form: &WallForm) -> Result<NegativeFormReport> {
    if form.is_zero() {
        return Err(Error::ZeroForm);
    }
    let dv = dual_value(lattice, form)?;
    let n = lattice.rank();
    let basis = rational::kernel(&[form.coords.clone()], n);
    let restricted: RatMatrix = basis
        .iter()
        .map(|x| basis.iter().map(|y| lattice.bilinear(x, y)).collect())
        .collect();
    let kernel_inertia = inertia(&restricted);
    let (p, m) = lattice.signature();
    let by_kernel = m >= 1
        && kernel_inertia
            == Inertia {
                positive: p,
                negative: m - 1,
                zero: 0,
            };
    let by_dual = dv.is_negative();
    if by_kernel != by_dual {
        return Err(Error::Inconsistent(format!(
            "q^∨ sign and kernel inertia {kernel_inertia:?} disagree"
        )));
    }
    Ok(NegativeFormReport {
        negative: by_dual,
        dual_value: dv,
        kernel_inertia,
    })
}

pub fn is_negative_form(lattice: &QuadLattice, form: &WallForm) -> Result<bool> {
    negative_form_check(lattice, form).map(|r| r.negative)
}
