//! Lie algebra generated by graded operators.
//!
//! The generated algebra is the smallest subspace containing the generators
//! and stable under `ad_s` for every generator `s` (right-normed brackets
//! span it), so each new basis element only needs bracketing against the
//! generator span.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num::Zero;
use serde::{Deserialize, Serialize};

use super::ops::{GradedOperator, RatOperator};
use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureOptions {
    /// A bracket is new when its relative distance to the span exceeds this.
    pub tau: f64,
    pub max_dim: usize,
    pub workers: usize,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self {
            tau: 1e-8,
            max_dim: 5000,
            workers: 1,
        }
    }
}

/// A basis of the closure, Frobenius-orthonormal within each degree.
#[derive(Debug, Clone, Serialize)]
pub struct LieClosure {
    #[serde(skip)]
    basis: Vec<GradedOperator>,
    pub dimension: usize,
    pub by_degree: BTreeMap<i32, usize>,
    /// Largest relative residual among brackets judged to lie in the span.
    pub residual: f64,
}

impl LieClosure {
    pub fn basis(&self) -> &[GradedOperator] {
        &self.basis
    }

    pub fn degree(&self, d: i32) -> impl Iterator<Item = &GradedOperator> {
        self.basis.iter().filter(move |b| b.shift == d)
    }

    /// Coordinates of `x` in the degree-`x.shift` part and the relative
    /// norm of what is left over.
    pub fn coordinates(&self, x: &GradedOperator) -> (Vec<f64>, f64) {
        let mut r = x.matrix.clone();
        let coords: Vec<f64> = self
            .basis
            .iter()
            .map(|b| {
                if b.shift != x.shift {
                    return 0.0;
                }
                let c = b.matrix.dot(&x.matrix);
                r -= &b.matrix * c;
                c
            })
            .collect();
        (coords, r.norm() / x.matrix.norm().max(f64::MIN_POSITIVE))
    }

    /// Inertia `(positive, negative, zero)` of the Killing form
    /// `K(X, Y) = tr(ad X ∘ ad Y)`.
    pub fn killing_signature(&self) -> (usize, usize, usize) {
        let d = self.dimension;
        let ad: Vec<DMatrix<f64>> = self
            .basis
            .iter()
            .map(|x| {
                let mut a = DMatrix::zeros(d, d);
                for (j, y) in self.basis.iter().enumerate() {
                    let (c, _) = self.coordinates(&x.bracket(y));
                    for (k, v) in c.into_iter().enumerate() {
                        a[(k, j)] = v;
                    }
                }
                a
            })
            .collect();
        let k = DMatrix::from_fn(d, d, |i, j| (&ad[i] * &ad[j]).trace());
        let eig = SymmetricEigen::new(k).eigenvalues;
        let scale = eig.amax().max(1.0);
        let pos = eig.iter().filter(|&&x| x > 1e-8 * scale).count();
        let neg = eig.iter().filter(|&&x| x < -1e-8 * scale).count();
        (pos, neg, d - pos - neg)
    }
}

/// Per-degree orthonormal basis of flattened operators.
#[derive(Default)]
struct Span {
    elements: Vec<GradedOperator>,
}

impl Span {
    fn project_out(&self, x: &mut DMatrix<f64>, shift: i32, from: usize) {
        for b in self.elements[from..].iter().filter(|b| b.shift == shift) {
            let c = b.matrix.dot(x);
            *x -= &b.matrix * c;
        }
    }

    /// Two passes of classical Gram–Schmidt against the elements from
    /// index `from` on.
    fn reduce(&self, x: &mut DMatrix<f64>, shift: i32, from: usize) {
        self.project_out(x, shift, from);
        self.project_out(x, shift, from);
    }
}

enum Outcome {
    Added,
    Rejected(f64),
    Zero,
}

/// Reduces against elements added after the snapshot, then decides.
/// `scale` bounds the norm of the unreduced operator; it is `‖s‖·‖b‖` for
/// a bracket `[s, b]`, so an exactly vanishing bracket computed with
/// rounding noise is not mistaken for a new direction.
fn settle(
    span: &mut Span,
    mut x: DMatrix<f64>,
    shift: i32,
    scale: f64,
    snapshot: usize,
    tau: f64,
) -> Outcome {
    if scale <= 1e-300 {
        return Outcome::Zero;
    }
    span.reduce(&mut x, shift, snapshot);
    let rel = x.norm() / scale;
    if rel > tau {
        let n = x.norm();
        span.elements.push(GradedOperator::new(x / n, shift));
        Outcome::Added
    } else {
        Outcome::Rejected(rel)
    }
}

/// Brackets `[s, b]` for all `s`, fully reduced against `span`.
fn brackets(
    span: &Span,
    gens: &[GradedOperator],
    b: &GradedOperator,
    workers: usize,
) -> Vec<(DMatrix<f64>, i32, f64)> {
    let job = |s: &GradedOperator| {
        let br = s.bracket(b);
        let n0 = s.matrix.norm() * b.matrix.norm();
        let mut x = br.matrix;
        span.reduce(&mut x, br.shift, 0);
        (x, br.shift, n0)
    };
    if workers <= 1 || gens.len() < 2 {
        return gens.iter().map(job).collect();
    }
    let chunk = gens.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = gens
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(job).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("bracket worker panicked"))
            .collect()
    })
}

/// Float closure. The result does not depend on `workers`: every bracket is
/// reduced against the same snapshot and settled in generator order.
pub fn lie_closure(generators: &[GradedOperator], opts: &ClosureOptions) -> Result<LieClosure> {
    if let Some(g) = generators
        .windows(2)
        .find(|w| w[0].matrix.shape() != w[1].matrix.shape())
    {
        return Err(Error::Dimension {
            expected: g[0].matrix.nrows(),
            got: g[1].matrix.nrows(),
        });
    }
    let mut span = Span::default();
    let mut residual = 0.0_f64;
    for g in generators {
        let n0 = g.matrix.norm();
        let snapshot = span.elements.len();
        let mut x = g.matrix.clone();
        span.reduce(&mut x, g.shift, 0);
        if let Outcome::Rejected(r) = settle(&mut span, x, g.shift, n0, snapshot, opts.tau) {
            residual = residual.max(r);
        }
    }
    let gens = span.elements.clone();
    let mut next = 0;
    while next < span.elements.len() {
        let b = span.elements[next].clone();
        let snapshot = span.elements.len();
        for (x, shift, n0) in brackets(&span, &gens, &b, opts.workers.max(1)) {
            if let Outcome::Rejected(r) = settle(&mut span, x, shift, n0, snapshot, opts.tau) {
                residual = residual.max(r);
            }
        }
        if span.elements.len() > opts.max_dim {
            return Err(Error::ClosureCap(opts.max_dim));
        }
        next += 1;
    }
    let mut basis = span.elements;
    basis.sort_by_key(|b| b.shift);
    let mut by_degree = BTreeMap::new();
    for b in &basis {
        *by_degree.entry(b.shift).or_insert(0) += 1;
    }
    Ok(LieClosure {
        dimension: basis.len(),
        basis,
        by_degree,
        residual,
    })
}

/// Dimensions of an exactly computed closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactClosure {
    pub dimension: usize,
    pub by_degree: BTreeMap<i32, usize>,
}

/// Incremental echelon basis over the rationals.
#[derive(Default)]
struct Echelon {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Echelon {
    fn insert(&mut self, mut x: Vec<Rat>) -> bool {
        for (p, r) in &self.rows {
            if !x[*p].is_zero() {
                let c = x[*p].clone();
                for (xi, ri) in x.iter_mut().zip(r) {
                    if !ri.is_zero() {
                        *xi -= &c * ri;
                    }
                }
            }
        }
        match x.iter().position(|v| !v.is_zero()) {
            Some(p) => {
                let c = x[p].clone();
                x.iter_mut().for_each(|v| *v /= &c);
                self.rows.push((p, x));
                true
            }
            None => false,
        }
    }
}

/// Exact closure of rational operators.
pub fn lie_closure_exact(generators: &[RatOperator], max_dim: usize) -> Result<ExactClosure> {
    let flat = |op: &RatOperator| op.matrix.iter().flatten().cloned().collect::<Vec<Rat>>();
    let mut spans: BTreeMap<i32, Echelon> = BTreeMap::new();
    let mut elements: Vec<RatOperator> = Vec::new();
    for g in generators {
        if spans.entry(g.shift).or_default().insert(flat(g)) {
            elements.push(g.clone());
        }
    }
    let gens = elements.clone();
    let mut next = 0;
    while next < elements.len() {
        let b = elements[next].clone();
        for s in &gens {
            let br = s.bracket(&b);
            if spans.entry(br.shift).or_default().insert(flat(&br)) {
                elements.push(br);
            }
        }
        if elements.len() > max_dim {
            return Err(Error::ClosureCap(max_dim));
        }
        next += 1;
    }
    let by_degree: BTreeMap<i32, usize> = spans
        .into_iter()
        .filter(|(_, e)| !e.rows.is_empty())
        .map(|(d, e)| (d, e.rows.len()))
        .collect();
    Ok(ExactClosure {
        dimension: elements.len(),
        by_degree,
    })
}
