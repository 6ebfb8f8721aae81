//! Lefschetz operators `e_η`, `h`, `f_η` on a cohomology ring.
//!
//! Conventions: `e_η` is cup product with `η` (cohomological degree +2), `h`
//! acts by `2m − k` on `H^k`, and the triple satisfies
//! `[h, e] = −2e`, `[h, f] = 2f`, `[e, f] = −h`.

use nalgebra::DMatrix;
use num::Zero;

use super::ring::CohomologyRing;
use crate::error::{Error, Result};
use crate::lattice::QuadLattice;
use crate::rational::{self, Rat, RatMatrix};

/// Operator on the total basis, homogeneous of degree `shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOperator {
    pub matrix: DMatrix<f64>,
    pub shift: i32,
}

impl GradedOperator {
    pub fn new(matrix: DMatrix<f64>, shift: i32) -> Self {
        Self { matrix, shift }
    }

    pub fn bracket(&self, other: &Self) -> Self {
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Self::new(m, self.shift + other.shift)
    }

    /// Largest entry outside the blocks allowed by the shift.
    pub fn grading_defect(&self, ring: &CohomologyRing) -> f64 {
        let deg = ring.degrees();
        let mut worst = 0.0_f64;
        for (j, &dj) in deg.iter().enumerate() {
            for (k, &dk) in deg.iter().enumerate() {
                if dk as i64 != dj as i64 + self.shift as i64 {
                    worst = worst.max(self.matrix[(k, j)].abs());
                }
            }
        }
        worst
    }

    pub fn scale(&self, t: f64) -> Self {
        Self::new(&self.matrix * t, self.shift)
    }
}

/// Exact counterpart of [`GradedOperator`].
#[derive(Debug, Clone, PartialEq)]
pub struct RatOperator {
    pub matrix: RatMatrix,
    pub shift: i32,
}

impl RatOperator {
    pub fn to_f64(&self) -> GradedOperator {
        let n = self.matrix.len();
        GradedOperator::new(
            DMatrix::from_fn(n, n, |i, j| rational::to_f64(&self.matrix[i][j])),
            self.shift,
        )
    }

    pub fn bracket(&self, other: &Self) -> Self {
        let ab = rational::mat_mul(&self.matrix, &other.matrix);
        let ba = rational::mat_mul(&other.matrix, &self.matrix);
        let matrix = ab
            .into_iter()
            .zip(ba)
            .map(|(r, s)| r.into_iter().zip(s).map(|(x, y)| x - y).collect())
            .collect();
        Self {
            matrix,
            shift: self.shift + other.shift,
        }
    }
}

/// Spectral norm.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Residuals `‖[h,e]+2e‖`, `‖[h,f]−2f‖`, `‖[e,f]+h‖` in operator norm.
pub fn sl2_residuals(e: &GradedOperator, h: &GradedOperator, f: &GradedOperator) -> [f64; 3] {
    [
        operator_norm(&(h.bracket(e).matrix + &e.matrix * 2.0)),
        operator_norm(&(h.bracket(f).matrix - &f.matrix * 2.0)),
        operator_norm(&(e.bracket(f).matrix + &h.matrix)),
    ]
}

fn check_eta<T>(ring: &CohomologyRing, eta: &[T]) -> Result<()> {
    let r = ring.lattice_block().lattice.rank();
    if eta.len() != r {
        return Err(Error::Dimension {
            expected: r,
            got: eta.len(),
        });
    }
    Ok(())
}

/// Matrix of `x ↦ η ∪ x`, `η` in lattice coordinates of the degree-2 block.
pub fn lefschetz_e(ring: &CohomologyRing, eta: &[f64]) -> Result<GradedOperator> {
    check_eta(ring, eta)?;
    let n = ring.dim();
    let mut m = DMatrix::zeros(n, n);
    for (&idx, &c) in ring.lattice_block().indices.iter().zip(eta) {
        if c == 0.0 {
            continue;
        }
        for j in 0..n {
            for &(k, s) in ring.product(idx, j) {
                m[(k, j)] += c * s as f64;
            }
        }
    }
    Ok(GradedOperator::new(m, 2))
}

pub fn lefschetz_e_exact(ring: &CohomologyRing, eta: &[Rat]) -> Result<RatOperator> {
    check_eta(ring, eta)?;
    let n = ring.dim();
    let mut m = vec![vec![Rat::zero(); n]; n];
    for (&idx, c) in ring.lattice_block().indices.iter().zip(eta) {
        if c.is_zero() {
            continue;
        }
        for j in 0..n {
            for &(k, s) in ring.product(idx, j) {
                m[k][j] += c * rational::rat(s);
            }
        }
    }
    Ok(RatOperator {
        matrix: m,
        shift: 2,
    })
}

fn h_eigenvalue(ring: &CohomologyRing, k: usize) -> i64 {
    2 * ring.m() as i64 - ring.degrees()[k] as i64
}

/// Diagonal grading operator, `2m − k` on `H^k`.
pub fn grading_h(ring: &CohomologyRing) -> GradedOperator {
    let n = ring.dim();
    GradedOperator::new(
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                h_eigenvalue(ring, i) as f64
            } else {
                0.0
            }
        }),
        0,
    )
}

pub fn grading_h_exact(ring: &CohomologyRing) -> RatOperator {
    let n = ring.dim();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        rational::rat(h_eigenvalue(ring, i))
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect();
    RatOperator { matrix, shift: 0 }
}

/// Unknown entries `(k, j)` of a degree −2 operator.
fn lowering_slots(ring: &CohomologyRing) -> Vec<(usize, usize)> {
    let deg = ring.degrees();
    let mut slots = Vec::new();
    for (j, &dj) in deg.iter().enumerate() {
        for (k, &dk) in deg.iter().enumerate() {
            if dk + 2 == dj {
                slots.push((k, j));
            }
        }
    }
    slots
}

/// Linear system for `[e, F] = −h`: one column per slot, rows indexed by
/// the flattened `n × n` matrix (row-major).
fn bracket_system<T: Clone + Zero>(
    n: usize,
    slots: &[(usize, usize)],
    e: impl Fn(usize, usize) -> T,
) -> Vec<Vec<T>>
where
    T: std::ops::Sub<Output = T>,
{
    let mut a = vec![vec![T::zero(); slots.len()]; n * n];
    for (col, &(k, j)) in slots.iter().enumerate() {
        // (e·F)[r][j] += e[r][k]
        for r in 0..n {
            let v = e(r, k);
            if !v.is_zero() {
                a[r * n + j][col] = a[r * n + j][col].clone() + v;
            }
        }
        // (F·e)[k][c] += e[j][c]
        for c in 0..n {
            let v = e(j, c);
            if !v.is_zero() {
                a[k * n + c][col] = a[k * n + c][col].clone() - v;
            }
        }
    }
    a
}

/// The degree −2 operator completing `(e_η, h)` to an sl₂ triple, by
/// least squares on `[e_η, f] = −h`.
pub fn lefschetz_f(ring: &CohomologyRing, eta: &[f64]) -> Result<GradedOperator> {
    let e = lefschetz_e(ring, eta)?;
    let h = grading_h(ring);
    let n = ring.dim();
    let slots = lowering_slots(ring);
    let rows = bracket_system(n, &slots, |r, c| e.matrix[(r, c)]);
    let a = DMatrix::from_fn(n * n, slots.len(), |i, j| rows[i][j]);
    let b = DMatrix::from_fn(n * n, 1, |i, _| -h.matrix[(i / n, i % n)]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-12 * smax.max(1.0);
    let mut x = svd.solve(&b, eps).map_err(|s| Error::Numerical(s.into()))?;
    // iterative refinement: near-isotropic η makes f large and the SVD
    // solution loses digits in proportion
    for _ in 0..2 {
        let r = &b - &a * &x;
        x += svd.solve(&r, eps).map_err(|s| Error::Numerical(s.into()))?;
    }
    let residual = (&a * &x - &b).norm() / b.norm().max(1.0);
    if !(residual < 1e-8) {
        return Err(Error::HardLefschetzFails { residual });
    }
    let mut f = DMatrix::zeros(n, n);
    for (&(k, j), v) in slots.iter().zip(x.iter()) {
        f[(k, j)] = *v;
    }
    Ok(GradedOperator::new(f, -2))
}

pub fn lefschetz_f_exact(ring: &CohomologyRing, eta: &[Rat]) -> Result<RatOperator> {
    let e = lefschetz_e_exact(ring, eta)?;
    let h = grading_h_exact(ring);
    let n = ring.dim();
    let slots = lowering_slots(ring);
    let mut aug = bracket_system(n, &slots, |r, c| e.matrix[r][c].clone());
    for (i, row) in aug.iter_mut().enumerate() {
        row.push(-h.matrix[i / n][i % n].clone());
    }
    aug.retain(|row| row.iter().any(|x| !x.is_zero()));
    let pivots = rational::rref(&mut aug);
    if pivots.last() == Some(&slots.len()) {
        return Err(Error::HardLefschetzFails {
            residual: f64::INFINITY,
        });
    }
    let mut f = vec![vec![Rat::zero(); n]; n];
    for (r, &p) in pivots.iter().enumerate() {
        let (k, j) = slots[p];
        f[k][j] = aug[r][slots.len()].clone();
    }
    Ok(RatOperator {
        matrix: f,
        shift: -2,
    })
}

/// `(e_η, f_η)` for each `η`; together with `h` these generate the LLV algebra.
pub fn lefschetz_generators(
    ring: &CohomologyRing,
    etas: &[Vec<f64>],
) -> Result<Vec<GradedOperator>> {
    let mut out = Vec::with_capacity(2 * etas.len());
    for eta in etas {
        out.push(lefschetz_e(ring, eta)?);
        out.push(lefschetz_f(ring, eta)?);
    }
    Ok(out)
}

pub fn lefschetz_generators_exact(
    ring: &CohomologyRing,
    etas: &[Vec<Rat>],
) -> Result<Vec<RatOperator>> {
    let mut out = Vec::with_capacity(2 * etas.len());
    for eta in etas {
        out.push(lefschetz_e_exact(ring, eta)?);
        out.push(lefschetz_f_exact(ring, eta)?);
    }
    Ok(out)
}

/// A basis of the lattice made of classes with `q ≠ 0`: coordinate vectors,
/// with each isotropic one replaced by `e_i + t·e_j` for a partner `j`.
pub fn lefschetz_basis(lattice: &QuadLattice) -> Vec<Vec<i64>> {
    let r = lattice.rank();
    let g = lattice.gram();
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(r);
    let spans_more = |chosen: &[Vec<i64>], v: &[i64]| {
        let mut rows: Vec<Vec<i64>> = chosen.to_vec();
        rows.push(v.to_vec());
        rational::rank(&rational::int_matrix_to_rat(&rows)) == rows.len()
    };
    for i in 0..r {
        let mut e = vec![0; r];
        e[i] = 1;
        let candidates = std::iter::once(e.clone()).chain(
            (0..r).filter(|&j| j != i && g[i][j] != 0).flat_map(|j| {
                [1, -1, 2, -2].map(|t| {
                    let mut v = e.clone();
                    v[j] = t;
                    v
                })
            }),
        );
        if let Some(v) = candidates
            .filter(|v| lattice.q_int(v) != 0)
            .find(|v| spans_more(&chosen, v))
        {
            chosen.push(v);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k3_eta(pairs: &[(usize, f64)]) -> Vec<f64> {
        let mut v = vec![0.0; 22];
        for &(i, c) in pairs {
            v[i] = c;
        }
        v
    }

    #[test]
    fn e_on_k3() {
        let ring = CohomologyRing::k3();
        let e = lefschetz_e(&ring, &k3_eta(&[(0, 1.0), (1, 1.0)])).unwrap();
        // 1 ↦ η
        assert_eq!(e.matrix[(1, 0)], 1.0);
        assert_eq!(e.matrix[(2, 0)], 1.0);
        // e₁ ↦ b(η, e₁) pt = 1·pt, η ↦ 2 pt
        assert_eq!(e.matrix[(23, 1)], 1.0);
        assert_eq!(e.matrix[(23, 1)] + e.matrix[(23, 2)], 2.0);
        // pt ↦ 0
        assert_eq!(e.matrix.column(23).norm(), 0.0);
        assert_eq!(e.grading_defect(&ring), 0.0);
        let zero = lefschetz_e(&ring, &[0.0; 22]).unwrap();
        assert_eq!(zero.matrix.norm(), 0.0);
    }

    #[test]
    fn e_is_linear() {
        let ring = CohomologyRing::k3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a: Vec<f64> = (0..22).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..22).map(|_| rng.random_range(-3.0..3.0)).collect();
            let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lhs = lefschetz_e(&ring, &s).unwrap().matrix;
            let rhs =
                lefschetz_e(&ring, &a).unwrap().matrix + lefschetz_e(&ring, &b).unwrap().matrix;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn h_on_k3() {
        let ring = CohomologyRing::k3();
        let h = grading_h(&ring);
        assert_eq!(h.matrix[(0, 0)], 2.0);
        assert_eq!(h.matrix[(5, 5)], 0.0);
        assert_eq!(h.matrix[(23, 23)], -2.0);
        assert_eq!(h.matrix.trace(), 0.0);
    }

    #[test]
    fn f_completes_the_triple() {
        let ring = CohomologyRing::k3();
        let eta = k3_eta(&[(0, 1.0), (1, 1.0)]);
        let e = lefschetz_e(&ring, &eta).unwrap();
        let f = lefschetz_f(&ring, &eta).unwrap();
        let h = grading_h(&ring);
        for r in sl2_residuals(&e, &h, &f) {
            assert!(r < 1e-10, "{r}");
        }
        assert!(f.grading_defect(&ring) == 0.0);
        // closed form: f(x) = (2 b(η,x)/q(η))·1, f(pt) = (2/q(η))·η
        assert!((f.matrix[(0, 1)] - 1.0).abs() < 1e-12);
        assert!((f.matrix[(1, 23)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_scales_inversely() {
        let ring = CohomologyRing::k3();
        let eta = k3_eta(&[(0, 1.0), (1, 2.0), (6, 0.5)]);
        let f = lefschetz_f(&ring, &eta).unwrap();
        for t in [0.5, -3.0, 7.0] {
            let teta: Vec<f64> = eta.iter().map(|x| x * t).collect();
            let ft = lefschetz_f(&ring, &teta).unwrap();
            assert!((ft.matrix - f.matrix.clone() / t).norm() < 1e-9);
        }
    }

    #[test]
    fn isotropic_eta_fails() {
        let ring = CohomologyRing::k3();
        let err = lefschetz_f(&ring, &k3_eta(&[(0, 1.0)])).unwrap_err();
        assert!(matches!(err, Error::HardLefschetzFails { .. }), "{err:?}");
        let eta: Vec<Rat> = k3_eta(&[(0, 1.0)])
            .iter()
            .map(|&x| rational::rat(x as i64))
            .collect();
        assert!(matches!(
            lefschetz_f_exact(&ring, &eta),
            Err(Error::HardLefschetzFails { .. })
        ));
    }

    #[test]
    fn lefschetz_basis_spans() {
        for lattice in [
            QuadLattice::k3(),
            QuadLattice::u_power(3),
            QuadLattice::standard("U^2+<-2>").unwrap(),
        ] {
            let basis = lefschetz_basis(&lattice);
            assert_eq!(basis.len(), lattice.rank());
            assert!(basis.iter().all(|v| lattice.q_int(v) != 0));
        }
    }

    #[test]
    fn exact_and_float_agree() {
        let ring = CohomologyRing::from_lattice(&QuadLattice::u_power(3));
        let eta = [1, 1, 0, 0, 2, 1];
        let fx = lefschetz_f_exact(&ring, &rational::int_vec_to_rat(&eta)).unwrap();
        let ff = lefschetz_f(&ring, &eta.map(|x| x as f64)).unwrap();
        assert!((fx.to_f64().matrix - ff.matrix).norm() < 1e-12);
        let e = lefschetz_e_exact(&ring, &rational::int_vec_to_rat(&eta)).unwrap();
        let h = grading_h_exact(&ring);
        // [e, f] = −h exactly
        let ef = e.bracket(&fx);
        for (r, s) in ef.matrix.iter().zip(&h.matrix) {
            for (x, y) in r.iter().zip(s) {
                assert_eq!(x, &-y.clone());
            }
        }
    }
}
