//! Exact integral LLL reduction (all-integer variant with subdeterminants
//! `d_i` and scaled Gram–Schmidt coefficients `λ_{ij}`).

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Nearest integer to `n / d` for `d > 0`.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

/// LLL-reduces linearly independent integer row vectors in place with
/// Lovász parameter 99/100. Panics if the rows are dependent.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    // d[0] = 1, d[i] = det Gram(b_1..b_i) for i ≥ 1 (1-based)
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = dot(&basis[0], &basis[0]);
    assert!(d[1].is_positive(), "zero basis vector");
    let mut k = 1usize; // 0-based index of the vector being processed
    let mut kmax = 0usize;

    let red =
        |k: usize, l: usize, basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt]| {
            let two_lam = &lam[k][l] * BigInt::from(2);
            if two_lam.abs() > d[l + 1] {
                let q = round_div(&lam[k][l], &d[l + 1]);
                let bl = basis[l].clone();
                for (x, y) in basis[k].iter_mut().zip(&bl) {
                    *x -= &q * y;
                }
                lam[k][l] -= &q * &d[l + 1];
                for i in 0..l {
                    let t = &q * &lam[l][i];
                    lam[k][i] -= t;
                }
            }
        };

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&basis[k], &basis[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(u.is_positive(), "LLL input is linearly dependent");
                    d[k + 1] = u;
                }
            }
        }
        red(k, k - 1, basis, &mut lam, &d);
        // Lovász: d_k d_{k-2} < δ d_{k-1}² − λ² (1-based), δ = 99/100
        let lhs = BigInt::from(100) * &d[k + 1] * &d[k - 1];
        let rhs =
            BigInt::from(99) * &d[k] * &d[k] - BigInt::from(100) * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            basis.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let l = lam[k][k - 1].clone();
            let b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
                lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k + 1];
            }
            d[k] = b;
            if k > 1 {
                k -= 1;
            }
        } else {
            for l in (0..k - 1).rev() {
                red(k, l, basis, &mut lam, &d);
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn det3(m: &[Vec<BigInt>]) -> BigInt {
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    #[test]
    fn reduces_a_skewed_basis() {
        let mut b = big(&[&[1, 0, 0], &[4, 1, 0], &[7, 5, 1]]);
        let before = det3(&b).abs();
        lll_reduce(&mut b);
        assert_eq!(det3(&b).abs(), before);
        for row in &b {
            assert!(dot(row, row) <= BigInt::from(2), "{row:?}");
        }
    }

    #[test]
    fn finds_a_planted_relation() {
        // x = 1, y = 3: relation (3, -1)
        let c = 1_000_000_000i64;
        let mut b = big(&[&[1, 0, c], &[0, 1, 3 * c]]);
        lll_reduce(&mut b);
        assert_eq!(b[0][2], BigInt::zero());
        assert_eq!(b[0][0].abs(), BigInt::from(3));
        assert_eq!(b[0][1].abs(), BigInt::from(1));
    }
}
