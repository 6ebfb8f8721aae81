//! Graded cohomology rings given by integer structure constants.

use num::bigint::BigInt;
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::LatticeJson;
use crate::lattice::QuadLattice;
use crate::rational;

/// The degree-2 classes identified with a quadratic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBlock {
    /// Basis indices of the degree-2 classes, in lattice-coordinate order.
    pub indices: Vec<usize>,
    pub lattice: QuadLattice,
}

/// `H^•(M)` of a compact manifold of real dimension `4m`, with cup product
/// `e_i ∪ e_j = Σ_k c_{ijk} e_k` and integration on degree `4m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyRing {
    m: usize,
    degrees: Vec<usize>,
    /// products[i][j] = sparse expansion of e_i ∪ e_j
    products: Vec<Vec<Vec<(usize, i64)>>>,
    integration: Vec<i64>,
    block: LatticeBlock,
}

/// Ring file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingJson {
    pub m: usize,
    pub degrees: Vec<usize>,
    /// Sparse triples `[i, j, k, c]`: the coefficient of `e_k` in `e_i ∪ e_j`.
    pub structure_constants: Vec<[i64; 4]>,
    pub integration: Vec<i64>,
    pub lattice_block: LatticeBlockJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBlockJson {
    pub indices: Vec<usize>,
    pub lattice: LatticeJson,
}

impl CohomologyRing {
    /// Validates grading, graded commutativity, associativity on all basis
    /// triples and nondegeneracy of the Poincaré pairing.
    pub fn new(
        m: usize,
        degrees: Vec<usize>,
        structure_constants: &[[i64; 4]],
        integration: Vec<i64>,
        block: LatticeBlock,
    ) -> Result<Self> {
        let n = degrees.len();
        let top = 4 * m;
        if m == 0 || n == 0 {
            return Err(Error::Invalid(
                "ring needs m ≥ 1 and a nonempty basis".into(),
            ));
        }
        if let Some(&d) = degrees.iter().find(|&&d| d > top) {
            return Err(Error::Invalid(format!("degree {d} exceeds 4m = {top}")));
        }
        if integration.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: integration.len(),
            });
        }
        if integration
            .iter()
            .zip(&degrees)
            .any(|(&c, &d)| c != 0 && d != top)
        {
            return Err(Error::Invalid(
                "integration must vanish below the top degree".into(),
            ));
        }
        if block.indices.len() != block.lattice.rank() {
            return Err(Error::Dimension {
                expected: block.lattice.rank(),
                got: block.indices.len(),
            });
        }
        if block.indices.iter().any(|&i| i >= n || degrees[i] != 2) {
            return Err(Error::Invalid(
                "lattice block must index degree-2 classes".into(),
            ));
        }
        let mut products = vec![vec![Vec::<(usize, i64)>::new(); n]; n];
        for &[i, j, k, c] in structure_constants {
            let (i, j, k) = (to_index(i, n)?, to_index(j, n)?, to_index(k, n)?);
            if c == 0 {
                continue;
            }
            if degrees[i] + degrees[j] != degrees[k] {
                return Err(Error::Invalid(format!(
                    "product e_{i} e_{j} has a term in the wrong degree"
                )));
            }
            match products[i][j].iter_mut().find(|(kk, _)| *kk == k) {
                Some(entry) => entry.1 += c,
                None => products[i][j].push((k, c)),
            }
        }
        for row in products.iter_mut() {
            for p in row.iter_mut() {
                p.retain(|&(_, c)| c != 0);
                p.sort_unstable();
            }
        }
        let ring = Self {
            m,
            degrees,
            products,
            integration,
            block,
        };
        ring.check_commutativity()?;
        ring.check_associativity()?;
        ring.check_poincare()?;
        Ok(ring)
    }

    /// The ring `1 ⊕ L ⊕ pt` of a surface-type manifold (`m = 1`) whose
    /// degree-2 cup product is the form of `lattice`, `∫ pt = 1`.
    pub fn from_lattice(lattice: &QuadLattice) -> Self {
        let r = lattice.rank();
        let n = r + 2;
        let pt = n - 1;
        let mut degrees = vec![2; n];
        degrees[0] = 0;
        degrees[pt] = 4;
        let mut sc = Vec::new();
        for j in 0..n {
            sc.push([0, j as i64, j as i64, 1]);
            if j != 0 {
                sc.push([j as i64, 0, j as i64, 1]);
            }
        }
        for i in 0..r {
            for j in 0..r {
                let g = lattice.gram()[i][j];
                if g != 0 {
                    sc.push([i as i64 + 1, j as i64 + 1, pt as i64, g]);
                }
            }
        }
        let mut integration = vec![0; n];
        integration[pt] = 1;
        let block = LatticeBlock {
            indices: (1..=r).collect(),
            lattice: lattice.clone(),
        };
        Self::new(1, degrees, &sc, integration, block).expect("surface-type ring is valid")
    }

    /// The K3 ring: `{1} ∪ {22 classes with cup product the K3 form} ∪ {pt}`.
    pub fn k3() -> Self {
        Self::from_lattice(&QuadLattice::k3())
    }

    pub fn from_json(j: &RingJson) -> Result<Self> {
        let lattice = j.lattice_block.lattice.build()?;
        let block = LatticeBlock {
            indices: j.lattice_block.indices.clone(),
            lattice,
        };
        Self::new(
            j.m,
            j.degrees.clone(),
            &j.structure_constants,
            j.integration.clone(),
            block,
        )
    }

    pub fn to_json(&self) -> RingJson {
        let mut sc = Vec::new();
        for (i, row) in self.products.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                for &(k, c) in p {
                    sc.push([i as i64, j as i64, k as i64, c]);
                }
            }
        }
        RingJson {
            m: self.m,
            degrees: self.degrees.clone(),
            structure_constants: sc,
            integration: self.integration.clone(),
            lattice_block: LatticeBlockJson {
                indices: self.block.indices.clone(),
                lattice: LatticeJson::from(&self.block.lattice),
            },
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn integration(&self) -> &[i64] {
        &self.integration
    }

    pub fn lattice_block(&self) -> &LatticeBlock {
        &self.block
    }

    /// Sparse expansion of `e_i ∪ e_j`.
    pub fn product(&self, i: usize, j: usize) -> &[(usize, i64)] {
        &self.products[i][j]
    }

    /// Copy with the integration functional multiplied by `factor`.
    pub fn with_scaled_integration(&self, factor: i64) -> Result<Self> {
        let mut r = self.clone();
        r.integration.iter_mut().for_each(|c| *c *= factor);
        r.check_poincare()?;
        Ok(r)
    }

    /// Cup product of integer classes.
    pub fn multiply(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let n = self.dim();
        let mut out = vec![BigInt::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let xy = xi * yj;
                for &(k, c) in &self.products[i][j] {
                    out[k] += &xy * c;
                }
            }
        }
        out
    }

    pub fn integrate(&self, x: &[BigInt]) -> BigInt {
        x.iter()
            .zip(&self.integration)
            .fold(BigInt::zero(), |acc, (a, &c)| acc + a * c)
    }

    /// Embeds lattice coordinates into the ring basis.
    pub fn embed_degree2<T: Clone + Zero>(&self, coords: &[T]) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim()];
        for (&idx, c) in self.block.indices.iter().zip(coords) {
            v[idx] = c.clone();
        }
        v
    }

    fn basis_vec(&self, i: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dim()];
        v[i] = BigInt::from(1);
        v
    }

    fn check_commutativity(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..i {
                let sign = if (self.degrees[i] * self.degrees[j]) % 2 == 0 {
                    1
                } else {
                    -1
                };
                let swapped: Vec<(usize, i64)> = self.products[j][i]
                    .iter()
                    .map(|&(k, c)| (k, sign * c))
                    .collect();
                if self.products[i][j] != swapped {
                    return Err(Error::Invalid(format!(
                        "e_{i} e_{j} violates graded commutativity"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.dim();
        let basis: Vec<Vec<BigInt>> = (0..n).map(|i| self.basis_vec(i)).collect();
        for i in 0..n {
            for j in 0..n {
                let ij = self.multiply(&basis[i], &basis[j]);
                for k in 0..n {
                    if self.degrees[i] + self.degrees[j] + self.degrees[k] > 4 * self.m {
                        continue;
                    }
                    let left = self.multiply(&ij, &basis[k]);
                    let jk = self.multiply(&basis[j], &basis[k]);
                    let right = self.multiply(&basis[i], &jk);
                    if left != right {
                        return Err(Error::Invalid(format!(
                            "associativity fails on (e_{i}, e_{j}, e_{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `∫ e_i ∪ e_j`.
    pub fn pairing_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.products[i][j]
                            .iter()
                            .map(|&(k, c)| c * self.integration[k])
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    fn check_poincare(&self) -> Result<()> {
        if rational::det_int(&self.pairing_matrix()).is_zero() {
            return Err(Error::Invalid("Poincaré pairing is degenerate".into()));
        }
        Ok(())
    }
}

fn to_index(i: i64, n: usize) -> Result<usize> {
    usize::try_from(i)
        .ok()
        .filter(|&i| i < n)
        .ok_or_else(|| Error::Invalid(format!("basis index {i} out of range")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_ring_is_valid() {
        let r = CohomologyRing::k3();
        assert_eq!(r.dim(), 24);
        assert_eq!(r.m(), 1);
        assert_eq!(r.degrees()[0], 0);
        assert_eq!(r.degrees()[23], 4);
        // η = e₁ + f₁: η ∪ η = 2 pt
        let eta = r.embed_degree2(
            &[1, 1]
                .iter()
                .chain([0; 20].iter())
                .map(|&x| BigInt::from(x))
                .collect::<Vec<_>>(),
        );
        let sq = r.multiply(&eta, &eta);
        assert_eq!(sq[23], BigInt::from(2));
        assert_eq!(r.integrate(&sq), BigInt::from(2));
    }

    #[test]
    fn json_round_trip() {
        let r = CohomologyRing::from_lattice(&QuadLattice::u_power(3));
        let back = CohomologyRing::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn broken_rings_are_rejected() {
        let r = CohomologyRing::from_lattice(&QuadLattice::u());
        let mut j = r.to_json();
        // non-commutative: perturb e_1 e_2 only
        j.structure_constants.push([1, 2, 3, 1]);
        assert!(CohomologyRing::from_json(&j).is_err());
        let mut j = r.to_json();
        j.structure_constants.push([1, 1, 1, 1]);
        assert!(CohomologyRing::from_json(&j).is_err(), "wrong degree");
        let mut j = r.to_json();
        j.integration = vec![0; 4];
        assert!(CohomologyRing::from_json(&j).is_err(), "degenerate pairing");
    }

    #[test]
    fn associativity_violation_is_detected() {
        // degrees 0, 2, 2, 4 with e_1 ∪ e_1 = e_2, which is not degree-compatible ... use m = 2
        let lattice = QuadLattice::rank1(1).unwrap();
        let block = LatticeBlock {
            indices: vec![1],
            lattice,
        };
        // basis 1, x (deg 2), y (deg 4), w (deg 6), pt (deg 8); x² = y, xy = 2w (but x·x² should be x²·x)
        let degrees = vec![0, 2, 4, 6, 8];
        let mut sc = Vec::new();
        for j in 0..5 {
            sc.push([0, j, j, 1]);
            if j != 0 {
                sc.push([j, 0, j, 1]);
            }
        }
        sc.extend([
            [1, 1, 2, 1],
            [1, 2, 3, 1],
            [2, 1, 3, 1],
            [1, 3, 4, 1],
            [3, 1, 4, 1],
            [2, 2, 4, 2],
        ]);
        let r = CohomologyRing::new(2, degrees, &sc, vec![0, 0, 0, 0, 1], block);
        assert!(
            matches!(r, Err(Error::Invalid(ref s)) if s.contains("associativity")),
            "{r:?}"
        );
    }
}
