//! Smith normal form over the integers.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | … | d_r`, `d_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Smith {
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub diagonal: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// row_i ← row_i − q·row_j
fn row_axpy(m: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (src, dst) = if i < j {
        let (a, b) = m.split_at_mut(j);
        (&b[0], &mut a[i])
    } else {
        let (a, b) = m.split_at_mut(i);
        (&a[j], &mut b[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// col_i ← col_i − q·col_j
fn col_axpy(m: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[j].is_zero() {
            let t = q * &row[j];
            row[i] -= t;
        }
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

fn negate_row(m: &mut [Vec<BigInt>], i: usize) {
    for x in m[i].iter_mut() {
        *x = -std::mem::take(x);
    }
}

pub fn smith(a: &[Vec<i64>], cols: usize) -> Smith {
    let rows = a.len();
    let mut d: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut u = identity(rows);
    // V is tracked through its transpose so column operations become row operations
    let mut vt = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero in the trailing block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !d[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| d[i][j].abs().cmp(&d[k][l].abs()));
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        vt.swap(t, pj);
        loop {
            let mut done = true;
            for i in t + 1..rows {
                if !d[i][t].is_zero() {
                    let q = d[i][t].div_floor(&d[t][t]);
                    row_axpy(&mut d, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    if !d[i][t].is_zero() {
                        d.swap(t, i);
                        u.swap(t, i);
                        done = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !d[t][j].is_zero() {
                    let q = d[t][j].div_floor(&d[t][t]);
                    col_axpy(&mut d, j, t, &q);
                    row_axpy(&mut vt, j, t, &q);
                    if !d[t][j].is_zero() {
                        swap_cols(&mut d, t, j);
                        vt.swap(t, j);
                        done = false;
                    }
                }
            }
            if !done {
                continue;
            }
            // divisibility of the trailing block
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !d[i][j].is_multiple_of(&d[t][t])));
            match bad {
                Some(i) => {
                    row_axpy(&mut d, t, i, &-BigInt::one());
                    row_axpy(&mut u, t, i, &-BigInt::one());
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    let diagonal = (0..t).map(|i| d[i][i].clone()).collect();
    let v = (0..cols)
        .map(|i| (0..cols).map(|j| vt[j][i].clone()).collect())
        .collect();
    Smith {
        u,
        v,
        diagonal,
        rows,
        cols,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> Vec<Vec<BigInt>> {
        a.iter()
            .map(|r| {
                (0..cols)
                    .map(|j| (0..inner).fold(BigInt::zero(), |s, k| s + &r[k] * &b[k][j]))
                    .collect()
            })
            .collect()
    }

    fn check(a: &[Vec<i64>], cols: usize) -> Smith {
        let s = smith(a, cols);
        let big: Vec<Vec<BigInt>> = a
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let uav = mul(&mul(&s.u, &big, a.len(), cols), &s.v, cols, cols);
        for (i, row) in uav.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j && i < s.rank() {
                    s.diagonal[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(x, &want);
            }
        }
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.diagonal.iter().all(|x| x.is_positive()));
        s
    }

    #[test]
    fn known_forms() {
        let s = check(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        assert_eq!(
            s.diagonal,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        let s = check(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        let s = check(&[vec![0, 0], vec![0, 0]], 2);
        assert_eq!(s.rank(), 0);
        let s = check(&[], 3);
        assert_eq!(s.rank(), 0);
    }

    proptest! {
        #[test]
        fn random_matrices(m in prop::collection::vec(prop::collection::vec(-4i64..5, 5), 0..6)) {
            check(&m, 5);
        }
    }
}
