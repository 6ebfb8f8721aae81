//! Čech cochains of a finite nerve with coefficients in a finite abelian
//! group, written additively.
//!
//! Cochains live on sorted simplices and extend to other vertex orders by
//! the sign of the permutation.

mod snf;
mod solve;

pub use snf::{smith, Smith};
pub use solve::{
    cohomology, correct_transitions, invariant_factors, solve_coboundary, GluingReplay,
    Obstruction, SolveOutcome,
};

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest simplex dimension kept in a nerve.
pub const MAX_DIM: usize = 3;

/// A finite simplicial complex, closed under faces, of dimension ≤ 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    vertices: Vec<usize>,
    /// simplices[d] = sorted list of d-simplices (as sorted vertex labels)
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveJson {
    pub vertices: Vec<usize>,
    pub simplices: Vec<Vec<usize>>,
}

impl Nerve {
    /// Builds the face closure of the given simplices; every vertex is a
    /// 0-simplex.
    pub fn new(vertices: &[usize], simplices: &[Vec<usize>]) -> Result<Self> {
        let vset: BTreeSet<usize> = vertices.iter().copied().collect();
        if vset.len() != vertices.len() {
            return Err(Error::Invalid("duplicate vertex".into()));
        }
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); MAX_DIM + 1];
        for &v in &vset {
            by_dim[0].insert(vec![v]);
        }
        for s in simplices {
            let mut s = s.clone();
            s.sort_unstable();
            if s.is_empty() {
                return Err(Error::Invalid("empty simplex".into()));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid(format!("simplex {s:?} repeats a vertex")));
            }
            if s.len() > MAX_DIM + 1 {
                return Err(Error::Invalid(format!(
                    "simplex {s:?} exceeds dimension {MAX_DIM}"
                )));
            }
            if let Some(v) = s.iter().find(|v| !vset.contains(v)) {
                return Err(Error::Invalid(format!("unknown vertex {v}")));
            }
            // all nonempty subsets
            let k = s.len();
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| s[i])
                    .collect();
                by_dim[face.len() - 1].insert(face);
            }
        }
        let simplices: Vec<Vec<Vec<usize>>> = by_dim
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let index = simplices
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();
        Ok(Self {
            vertices: vset.into_iter().collect(),
            simplices,
            index,
        })
    }

    pub fn from_json(j: &NerveJson) -> Result<Self> {
        Self::new(&j.vertices, &j.simplices)
    }

    pub fn to_json(&self) -> NerveJson {
        NerveJson {
            vertices: self.vertices.clone(),
            simplices: self.simplices[1..].iter().flatten().cloned().collect(),
        }
    }

    /// Boundary of the octahedron, a triangulated 2-sphere.
    pub fn octahedron() -> Self {
        // poles 0, 5; equator 1, 2, 3, 4
        let mut faces = Vec::new();
        for (a, b) in [(1, 2), (2, 3), (3, 4), (4, 1)] {
            faces.push(vec![0, a, b]);
            faces.push(vec![5, a, b]);
        }
        Self::new(&[0, 1, 2, 3, 4, 5], &faces).expect("octahedron")
    }

    /// The full simplex on `n` vertices (faces of dimension ≤ 3).
    pub fn simplex(n: usize) -> Self {
        let verts: Vec<usize> = (0..n).collect();
        let mut top = Vec::new();
        let k = n.min(MAX_DIM + 1);
        let mut choose = |s: Vec<usize>| top.push(s);
        combinations(&verts, k, &mut Vec::new(), 0, &mut choose);
        Self::new(&verts, &top).expect("simplex")
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn simplices(&self, d: usize) -> &[Vec<usize>] {
        self.simplices.get(d).map_or(&[], |s| s.as_slice())
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn position(&self, simplex: &[usize]) -> Option<usize> {
        self.index
            .get(simplex.len().checked_sub(1)?)?
            .get(simplex)
            .copied()
    }

    /// Integer matrix of the coboundary `C^d → C^{d+1}`: rows are
    /// `(d+1)`-simplices, columns `d`-simplices.
    pub fn coboundary_matrix(&self, d: usize) -> Vec<Vec<i64>> {
        let cols = self.count(d);
        self.simplices(d + 1)
            .iter()
            .map(|s| {
                let mut row = vec![0; cols];
                for i in 0..s.len() {
                    let face: Vec<usize> = s
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &v)| v)
                        .collect();
                    let c = self.position(&face).expect("face-closed");
                    row[c] += if i % 2 == 0 { 1 } else { -1 };
                }
                row
            })
            .collect()
    }
}

fn combinations(
    items: &[usize],
    k: usize,
    cur: &mut Vec<usize>,
    start: usize,
    out: &mut impl FnMut(Vec<usize>),
) {
    if cur.len() == k {
        out(cur.clone());
        return;
    }
    for i in start..items.len() {
        cur.push(items[i]);
        combinations(items, k, cur, i + 1, out);
        cur.pop();
    }
}

/// `Z/k_1 ⊕ … ⊕ Z/k_r` with `k_1 | k_2 | … | k_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::Invalid("invariant factors must be positive".into()));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Invalid(
                "invariant factors must form a divisibility chain".into(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn cyclic(k: u64) -> Self {
        Self::new(vec![k]).expect("positive order")
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&k| k as u128).product()
    }

    pub fn reduce(&self, x: &[i64]) -> Result<Vec<u64>> {
        if x.len() != self.factors.len() {
            return Err(Error::Dimension {
                expected: self.factors.len(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.factors)
            .map(|(&v, &k)| v.rem_euclid(k as i64) as u64)
            .collect())
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((a, b), k)| (a + b) % k)
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.factors)
            .map(|(a, k)| (k - a % k) % k)
            .collect()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.factors.len()]
    }
}

/// A `d`-cochain: one group element per `d`-simplex, in the nerve's order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    values: Vec<Vec<u64>>,
}

/// Entries `[simplex, value]`; simplices in any vertex order, missing ones
/// are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainJson {
    pub degree: usize,
    pub values: Vec<(Vec<usize>, Vec<i64>)>,
}

/// Sorts `s` in place and returns the permutation sign.
fn sort_with_sign(s: &mut [usize]) -> i8 {
    let mut sign = 1;
    for i in 1..s.len() {
        let mut j = i;
        while j > 0 && s[j - 1] > s[j] {
            s.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

impl Cochain {
    pub fn zero(nerve: &Nerve, group: &FiniteAbelianGroup, degree: usize) -> Self {
        Self {
            degree,
            values: vec![group.zero(); nerve.count(degree)],
        }
    }

    pub fn new(
        nerve: &Nerve,
        group: &FiniteAbelianGroup,
        degree: usize,
        values: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if values.len() != nerve.count(degree) {
            return Err(Error::Dimension {
                expected: nerve.count(degree),
                got: values.len(),
            });
        }
        let values = values
            .iter()
            .map(|v| group.reduce(&v.iter().map(|&x| x as i64).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        Ok(Self { degree, values })
    }

    pub fn from_json(nerve: &Nerve, group: &FiniteAbelianGroup, j: &CochainJson) -> Result<Self> {
        if j.degree > MAX_DIM {
            return Err(Error::DegreeOverflow(j.degree));
        }
        let mut c = Self::zero(nerve, group, j.degree);
        let mut seen = vec![false; c.values.len()];
        for (s, v) in &j.values {
            let mut s = s.clone();
            if s.len() != j.degree + 1 {
                return Err(Error::Invalid(format!(
                    "simplex {s:?} has the wrong dimension"
                )));
            }
            let sign = sort_with_sign(&mut s);
            let i = nerve
                .position(&s)
                .ok_or_else(|| Error::Invalid(format!("simplex {s:?} is not in the nerve")))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Invalid(format!("simplex {s:?} given twice")));
            }
            let v = group.reduce(v)?;
            c.values[i] = if sign > 0 { v } else { group.neg(&v) };
        }
        Ok(c)
    }

    pub fn to_json(&self, nerve: &Nerve) -> CochainJson {
        CochainJson {
            degree: self.degree,
            values: nerve
                .simplices(self.degree)
                .iter()
                .zip(&self.values)
                .map(|(s, v)| (s.clone(), v.iter().map(|&x| x as i64).collect()))
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[Vec<u64>] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|&x| x == 0)
    }

    /// Value on an ordered simplex, using the alternation rule.
    pub fn value_on(
        &self,
        nerve: &Nerve,
        group: &FiniteAbelianGroup,
        simplex: &[usize],
    ) -> Option<Vec<u64>> {
        let mut s = simplex.to_vec();
        let sign = sort_with_sign(&mut s);
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Some(group.zero());
        }
        let v = &self.values[nerve.position(&s)?];
        Some(if sign > 0 { v.clone() } else { group.neg(v) })
    }

    pub fn add(&self, group: &FiniteAbelianGroup, other: &Self) -> Self {
        Self {
            degree: self.degree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| group.add(a, b))
                .collect(),
        }
    }

    pub fn neg(&self, group: &FiniteAbelianGroup) -> Self {
        Self {
            degree: self.degree,
            values: self.values.iter().map(|a| group.neg(a)).collect(),
        }
    }
}

/// `(δc)(s) = Σ_i (−1)^i c(s with the i-th vertex dropped)`.
pub fn coboundary(nerve: &Nerve, group: &FiniteAbelianGroup, c: &Cochain) -> Result<Cochain> {
    let d = c.degree + 1;
    if d > MAX_DIM {
        return Err(Error::DegreeOverflow(d));
    }
    let m = nerve.coboundary_matrix(c.degree);
    let values = m
        .iter()
        .map(|row| {
            let mut acc = group.zero();
            for (j, &e) in row.iter().enumerate() {
                if e != 0 {
                    let v = if e > 0 {
                        c.values[j].clone()
                    } else {
                        group.neg(&c.values[j])
                    };
                    acc = group.add(&acc, &v);
                }
            }
            acc
        })
        .collect();
    Ok(Cochain { degree: d, values })
}

/// `δc = 0` on every 3-simplex; vacuous without 3-simplices.
pub fn is_cocycle(nerve: &Nerve, group: &FiniteAbelianGroup, c: &Cochain) -> Result<bool> {
    Ok(coboundary(nerve, group, c)?.is_zero())
}
