//! Exact rational helpers: parsing, formatting and small dense linear algebra
//! over `BigRational`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type RatMatrix = Vec<Vec<Rat>>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` (optionally signed).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator too large for a direct conversion
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn int_matrix_to_rat(m: &[Vec<i64>]) -> RatMatrix {
    m.iter()
        .map(|row| row.iter().map(|&x| rat(x)).collect())
        .collect()
}

pub fn int_vec_to_rat(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn mat_vec(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> RatMatrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(Rat::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<Rat>]) -> RatMatrix {
    let n = a.first().map_or(0, Vec::len);
    (0..n)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

/// Bilinear form `xᵀ·gram·y`.
pub fn bilinear(gram: &[Vec<Rat>], x: &[Rat], y: &[Rat]) -> Rat {
    dot(x, &mat_vec(gram, y))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of the right kernel `{x : m·x = 0}`.
pub fn kernel(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); cols];
            x[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -a[r][f].clone();
            }
            x
        })
        .collect()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &[Vec<Rat>]) -> Option<RatMatrix> {
    let n = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Exact determinant of an integer matrix (fraction-free Bareiss elimination).
pub fn det_int(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact inertia of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Inertia by symmetric (congruence) elimination; exact.
pub fn inertia(gram: &[Vec<Rat>]) -> Inertia {
    let mut a = gram.to_vec();
    let mut out = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    let mut active: Vec<usize> = (0..a.len()).collect();
    while !active.is_empty() {
        let pivot = match active.iter().position(|&i| !a[i][i].is_zero()) {
            Some(p) => active[p],
            None => {
                // all diagonal entries vanish: use e_i + e_j on a nonzero off-diagonal entry
                let pair = active.iter().enumerate().find_map(|(s, &i)| {
                    active[s + 1..]
                        .iter()
                        .find(|&&j| !a[i][j].is_zero())
                        .map(|&j| (i, j))
                });
                let Some((i, j)) = pair else {
                    out.zero += active.len();
                    break;
                };
                // row/column operation: v_i <- v_i + v_j
                for &k in &active {
                    let t = a[j][k].clone();
                    a[i][k] += t;
                }
                for &k in &active {
                    let t = a[k][j].clone();
                    a[k][i] += t;
                }
                i
            }
        };
        let d = a[pivot][pivot].clone();
        if d.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
        active.retain(|&i| i != pivot);
        for &i in &active {
            if a[i][pivot].is_zero() {
                continue;
            }
            let f = &a[i][pivot] / &d;
            for &j in &active {
                let t = &f * &a[pivot][j];
                a[i][j] -= t;
            }
        }
        for &i in &active {
            a[i][pivot] = Rat::zero();
            a[pivot][i] = Rat::zero();
        }
    }
    out
}

/// Greatest common divisor of the entries (0 for the zero vector).
pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Clears denominators: returns the primitive integer vector on the same ray
/// as `v`, or `None` when `v` is zero.
pub fn primitive_integer(v: &[Rat]) -> Option<Vec<BigInt>> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_integer(l.clone())).to_integer())
        .collect();
    let g = gcd_all(&ints);
    if g.is_zero() {
        return None;
    }
    Some(ints.into_iter().map(|x| x / &g).collect())
}
