//! Solving `δx = c` and computing cohomology through Smith normal forms.

use num::bigint::BigInt;
use num::{Integer, ToPrimitive, Zero};
use serde::Serialize;

use super::snf::{smith, Smith};
use super::{coboundary, is_cocycle, Cochain, FiniteAbelianGroup, Nerve, MAX_DIM};
use crate::error::{Error, Result};

/// The class of a cocycle in `coker(δ ⊗ Z/k)`, factor by factor, with the
/// trivial summands dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub coordinates: Vec<u64>,
    pub moduli: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(Cochain),
    Obstructed(Obstruction),
}

fn modulo(x: &BigInt, k: u64) -> u64 {
    x.mod_floor(&BigInt::from(k))
        .to_u64()
        .expect("reduced below k")
}

/// Inverse of `a` modulo `m` for coprime `a`, `m`.
fn inverse_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m));
    modulo(&e.x, m)
}

/// Solves `δx = c` for a `d`-cocycle `c` with `d ≥ 1`, factor by factor:
/// with `U·D·V` the Smith form of the integer coboundary, `D y ≡ U c (mod k)`
/// and `x = V y`.
pub fn solve_coboundary(
    nerve: &Nerve,
    group: &FiniteAbelianGroup,
    c: &Cochain,
) -> Result<SolveOutcome> {
    let d = c.degree();
    if d == 0 {
        return Err(Error::Invalid(
            "degree-0 cochains are never coboundaries".into(),
        ));
    }
    if d < MAX_DIM && !is_cocycle(nerve, group, c)? {
        return Err(Error::NotCocycle);
    }
    let s = smith(&nerve.coboundary_matrix(d - 1), nerve.count(d - 1));
    let (rows, cols) = (s.rows, s.cols);
    let mut solution = vec![vec![0u64; group.factors().len()]; cols];
    let mut obstruction = Obstruction {
        coordinates: Vec::new(),
        moduli: Vec::new(),
    };
    for (f, &k) in group.factors().iter().enumerate() {
        let ck: Vec<BigInt> = c.values().iter().map(|v| BigInt::from(v[f])).collect();
        let cu: Vec<BigInt> = (0..rows)
            .map(|i| {
                s.u[i]
                    .iter()
                    .zip(&ck)
                    .fold(BigInt::zero(), |a, (u, x)| a + u * x)
            })
            .collect();
        let mut y = vec![BigInt::zero(); cols];
        for i in 0..rows {
            let target = modulo(&cu[i], k);
            if i < s.rank() {
                let di = modulo(&s.diagonal[i], k);
                let g = di.gcd(&k);
                if g > 1 {
                    obstruction.coordinates.push(target % g);
                    obstruction.moduli.push(g);
                }
                if target % g == 0 {
                    let m = k / g;
                    y[i] = BigInt::from(
                        (target / g) as u128 * inverse_mod((di / g) % m.max(1), m) as u128
                            % m.max(1) as u128,
                    );
                }
            } else if k > 1 {
                obstruction.coordinates.push(target);
                obstruction.moduli.push(k);
            }
        }
        for (j, x) in solution.iter_mut().enumerate() {
            let v = s.v[j]
                .iter()
                .zip(&y)
                .fold(BigInt::zero(), |a, (vj, yj)| a + vj * yj);
            x[f] = modulo(&v, k);
        }
    }
    if obstruction.coordinates.iter().any(|&x| x != 0) {
        return Ok(SolveOutcome::Obstructed(obstruction));
    }
    let x = Cochain::new(nerve, group, d - 1, solution)?;
    debug_assert_eq!(coboundary(nerve, group, &x)?, *c);
    Ok(SolveOutcome::Solved(x))
}

/// Invariant factors of `⊕ Z/n_i`, trivial ones dropped.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let n = orders.len();
    let diag: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { orders[i] as i64 } else { 0 })
                .collect()
        })
        .collect();
    let s = smith(&diag, n);
    s.diagonal
        .iter()
        .map(|x| x.to_u64().expect("small factor"))
        .filter(|&x| x != 1)
        .collect()
}

fn diagonal_u64(s: &Smith) -> Vec<u64> {
    s.diagonal
        .iter()
        .map(|x| x.to_u64().unwrap_or(u64::MAX))
        .collect()
}

/// Invariant factors of `Ȟ^d(nerve; A)` from the universal coefficient
/// theorem: `H^d(C; Z) ⊗ Z/k ⊕ Tor(H^{d+1}(C; Z), Z/k)` for each factor.
pub fn cohomology(nerve: &Nerve, group: &FiniteAbelianGroup, degree: usize) -> Result<Vec<u64>> {
    if degree > 2 {
        return Err(Error::DegreeOverflow(degree));
    }
    let incoming = if degree == 0 {
        Vec::new()
    } else {
        diagonal_u64(&smith(
            &nerve.coboundary_matrix(degree - 1),
            nerve.count(degree - 1),
        ))
    };
    let outgoing = diagonal_u64(&smith(
        &nerve.coboundary_matrix(degree),
        nerve.count(degree),
    ));
    let free = nerve.count(degree) - incoming.len() - outgoing.len();
    let mut cyclic = Vec::new();
    for &k in group.factors() {
        cyclic.extend(std::iter::repeat_n(k, free));
        cyclic.extend(incoming.iter().chain(&outgoing).map(|&a| a.gcd(&k)));
    }
    Ok(invariant_factors(&cyclic))
}

/// Replays the gluing step: the defect `c = δf` of transition data `f`
/// (`c_{αβγ} = f_{βγ} + f_{γα} + f_{αβ}`) is solved as `c = δx`, and the
/// corrected transitions `f − x` have vanishing defect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingReplay {
    pub defect: Cochain,
    pub correction: Cochain,
    pub corrected: Cochain,
    pub corrected_defect_vanishes: bool,
}

pub fn correct_transitions(
    nerve: &Nerve,
    group: &FiniteAbelianGroup,
    f: &Cochain,
) -> Result<GluingReplay> {
    if f.degree() != 1 {
        return Err(Error::Invalid("transition data must be a 1-cochain".into()));
    }
    let defect = coboundary(nerve, group, f)?;
    let correction = match solve_coboundary(nerve, group, &defect)? {
        SolveOutcome::Solved(x) => x,
        SolveOutcome::Obstructed(_) => {
            return Err(Error::Inconsistent(
                "defect of transition data is not a coboundary".into(),
            ))
        }
    };
    let corrected = f.add(group, &correction.neg(group));
    let corrected_defect_vanishes = coboundary(nerve, group, &corrected)?.is_zero();
    Ok(GluingReplay {
        defect,
        correction,
        corrected,
        corrected_defect_vanishes,
    })
}
