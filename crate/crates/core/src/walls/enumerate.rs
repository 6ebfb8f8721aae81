//! Complete enumeration of negative walls of bounded dual-majorant norm.

use nalgebra::{DMatrix, DVector};
use num::{FromPrimitive, Signed};
use serde::{Deserialize, Serialize};

use super::majorant::MajorantForm;
use crate::error::{Error, Result};
use crate::lattice::{dual_value, QuadLattice, WallForm};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationOptions {
    pub max_rank: usize,
    /// Cap on visited search-tree nodes.
    pub max_nodes: u64,
    pub workers: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            max_rank: 24,
            max_nodes: 200_000_000,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WallEnumeration {
    /// One representative per `±δ`, first nonzero coordinate positive, sorted.
    pub walls: Vec<WallForm>,
    pub dual_value: Rat,
    pub radius: f64,
    pub nodes: u64,
}

/// Upper-triangular `U` with `Q = UᵀU`.
fn cholesky_upper(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let c = q
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("dual majorant is not positive definite".into()))?;
    Ok(c.l().transpose())
}

struct Search<'a> {
    u: &'a DMatrix<f64>,
    slack: f64,
    nodes: u64,
    cap: u64,
    out: Vec<Vec<i64>>,
}

impl Search<'_> {
    /// Chooses `x[i]` given `x[i+1..]`, with `rem` left of the budget.
    fn descend(&mut self, i: usize, x: &mut [i64], rem: f64) -> Result<()> {
        let n = x.len();
        let c: f64 = (i + 1..n).map(|j| self.u[(i, j)] * x[j] as f64).sum();
        let d = self.u[(i, i)];
        let t = rem.max(0.0).sqrt() / d;
        let centre = -c / d;
        let lo = (centre - t - 1e-9).ceil() as i64;
        let hi = (centre + t + 1e-9).floor() as i64;
        for xi in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(Error::EnumerationCap(format!(
                    "more than {} search nodes; reduce R",
                    self.cap
                )));
            }
            let val = (d * xi as f64 + c).powi(2);
            if val > rem + self.slack {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                self.out.push(x.to_vec());
            } else {
                self.descend(i - 1, x, rem - val)?;
            }
        }
        x[i] = 0;
        Ok(())
    }
}

/// All integral `x` with `xᵀ Q x ≤ bound` (up to a relative slack), by
/// Fincke–Pohst descent from the last coordinate. Top-level values are
/// split between workers and merged in order.
pub fn short_vectors(
    q: &DMatrix<f64>,
    bound: f64,
    max_nodes: u64,
    workers: usize,
) -> Result<(Vec<Vec<i64>>, u64)> {
    let n = q.nrows();
    if n == 0 {
        return Ok((vec![vec![]], 0));
    }
    let u = cholesky_upper(q)?;
    let slack = 1e-9 * bound.max(1.0);
    let last = n - 1;
    let d = u[(last, last)];
    let t = (bound + slack).sqrt() / d;
    let top: Vec<i64> = ((-t - 1e-9).ceil() as i64..=(t + 1e-9).floor() as i64).collect();
    let run = |values: &[i64]| -> Result<(Vec<Vec<i64>>, u64)> {
        let mut s = Search {
            u: &u,
            slack,
            nodes: 0,
            cap: max_nodes,
            out: Vec::new(),
        };
        for &v in values {
            let val = (d * v as f64).powi(2);
            if val > bound + slack {
                continue;
            }
            let mut x = vec![0; n];
            x[last] = v;
            if last == 0 {
                s.out.push(x);
            } else {
                s.descend(last - 1, &mut x, bound + slack - val)?;
            }
        }
        Ok((s.out, s.nodes))
    };
    if workers <= 1 || top.len() < 2 {
        return run(&top);
    }
    let chunk = top.len().div_ceil(workers);
    let parts: Vec<Result<(Vec<Vec<i64>>, u64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = top
            .chunks(chunk)
            .map(|c| scope.spawn(move || run(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration worker panicked"))
            .collect()
    });
    let mut out = Vec::new();
    let mut nodes = 0;
    for p in parts {
        let (v, k) = p?;
        out.extend(v);
        nodes += k;
    }
    if nodes > max_nodes {
        return Err(Error::EnumerationCap(format!(
            "more than {max_nodes} search nodes; reduce R"
        )));
    }
    Ok((out, nodes))
}

fn canonical(x: &[i64]) -> bool {
    x.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Every indivisible `δ ∈ H^∨` with `q^∨(δ) = d` and dual-majorant norm at
/// most `radius`, one per `±` pair.
pub fn enumerate_walls_near(
    lattice: &QuadLattice,
    majorant: &MajorantForm,
    d: &Rat,
    radius: f64,
    opts: &EnumerationOptions,
) -> Result<WallEnumeration> {
    if !d.is_negative() {
        return Err(Error::Invalid(format!(
            "wall value d = {d} must be negative"
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::Invalid("radius must be positive".into()));
    }
    if lattice.rank() > opts.max_rank {
        return Err(Error::EnumerationCap(format!(
            "rank {} exceeds the enumeration cap {}; reduce R or raise the cap",
            lattice.rank(),
            opts.max_rank
        )));
    }
    let (candidates, nodes) =
        short_vectors(majorant.dual_gram(), radius, opts.max_nodes, opts.workers)?;
    let exact_radius = Rat::from_f64(radius).expect("finite radius");
    let mut walls = Vec::new();
    for x in candidates.iter().filter(|x| canonical(x)) {
        let w = WallForm::from_ints(x);
        if dual_value(lattice, &w)? != *d || !w.is_indivisible() {
            continue;
        }
        let inside = match majorant.dual_norm_exact(&w) {
            Some(n) => n <= exact_radius,
            None => majorant.dual_norm(&w) <= radius * (1.0 + 1e-12),
        };
        if inside {
            walls.push(w);
        }
    }
    walls.sort();
    Ok(WallEnumeration {
        walls,
        dual_value: d.clone(),
        radius,
        nodes,
    })
}

/// Reference search over the box `|x_i| ≤ bound`; exponential, for tests
/// and small checks.
pub fn enumerate_walls_box(
    lattice: &QuadLattice,
    majorant: &MajorantForm,
    d: &Rat,
    radius: f64,
    bound: i64,
) -> Result<Vec<WallForm>> {
    let n = lattice.rank();
    let mut x = vec![-bound; n];
    let mut out = Vec::new();
    let exact_radius = Rat::from_f64(radius).expect("finite radius");
    loop {
        let coarse = {
            let c = DVector::from_iterator(n, x.iter().map(|&v| v as f64));
            c.dot(&(majorant.dual_gram() * &c)) <= radius * (1.0 + 1e-6) + 1e-9
        };
        if coarse && canonical(&x) {
            let w = WallForm::from_ints(&x);
            let inside = match majorant.dual_norm_exact(&w) {
                Some(v) => v <= exact_radius,
                None => majorant.dual_norm(&w) <= radius * (1.0 + 1e-12),
            };
            if inside && dual_value(lattice, &w)? == *d && w.is_indivisible() {
                out.push(w);
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                out.sort();
                return Ok(out);
            }
            if x[k] < bound {
                x[k] += 1;
                break;
            }
            x[k] = -bound;
            k += 1;
        }
    }
}

/// `|x_i| ≤ ⌈√(R·(Q⁻¹)_ii)⌉` bounds every solution of `xᵀQx ≤ R`.
pub fn box_bound(majorant: &MajorantForm, radius: f64) -> i64 {
    // Q⁻¹ of the dual majorant is the majorant itself
    let g = majorant.gram();
    (0..g.nrows())
        .map(|i| (radius * g[(i, i)]).sqrt().ceil() as i64)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{self, rat};

    fn diagonal_frame(lattice: &QuadLattice) -> Vec<Vec<Rat>> {
        // e_i + f_i of the hyperbolic planes
        let p = lattice.signature().0;
        (0..p)
            .map(|i| {
                let mut v = vec![0; lattice.rank()];
                v[2 * i] = 1;
                v[2 * i + 1] = 1;
                rational::int_vec_to_rat(&v)
            })
            .collect()
    }

    #[test]
    fn short_vectors_match_a_box_count() {
        let q = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (v, _) = short_vectors(&q, 6.0, 1_000_000, 1).unwrap();
        let mut count = 0;
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                if 2 * a * a + 2 * a * b + 2 * b * b <= 6 {
                    count += 1;
                }
            }
        }
        assert_eq!(v.len(), count);
    }

    #[test]
    fn u3_example_matches_box_oracle() {
        let l = QuadLattice::u_power(3);
        let m = MajorantForm::exact(&l, &diagonal_frame(&l)).unwrap();
        let found =
            enumerate_walls_near(&l, &m, &rat(-2), 4.0, &EnumerationOptions::default()).unwrap();
        let oracle = enumerate_walls_box(&l, &m, &rat(-2), 4.0, 6).unwrap();
        assert_eq!(found.walls, oracle);
        assert!(!found.walls.is_empty());
        assert!(found
            .walls
            .contains(&WallForm::from_ints(&[1, -1, 0, 0, 0, 0])));
    }

    #[test]
    fn completeness_over_parameters() {
        for lattice in [
            QuadLattice::u_power(3),
            QuadLattice::standard("U^2+<-2>").unwrap(),
        ] {
            let m = MajorantForm::exact(&lattice, &diagonal_frame(&lattice)).unwrap();
            for d in [-2, -4] {
                for r in [2.0, 4.0, 8.0] {
                    let found = enumerate_walls_near(
                        &lattice,
                        &m,
                        &rat(d),
                        r,
                        &EnumerationOptions::default(),
                    )
                    .unwrap();
                    let oracle =
                        enumerate_walls_box(&lattice, &m, &rat(d), r, box_bound(&m, r)).unwrap();
                    assert_eq!(found.walls, oracle, "d = {d}, R = {r}");
                    let par = enumerate_walls_near(
                        &lattice,
                        &m,
                        &rat(d),
                        r,
                        &EnumerationOptions {
                            workers: 3,
                            ..Default::default()
                        },
                    )
                    .unwrap();
                    assert_eq!(par.walls, found.walls);
                }
            }
        }
    }

    #[test]
    fn float_majorant_on_tilted_plane() {
        let l = QuadLattice::u_power(3);
        let mut frame: Vec<DVector<f64>> = diagonal_frame(&l)
            .iter()
            .map(|v| DVector::from_iterator(6, v.iter().map(rational::to_f64)))
            .collect();
        frame[0][1] += 0.3;
        frame[1][5] -= 0.2;
        let m = MajorantForm::new(&l, &frame).unwrap();
        let found =
            enumerate_walls_near(&l, &m, &rat(-2), 6.0, &EnumerationOptions::default()).unwrap();
        let oracle = enumerate_walls_box(&l, &m, &rat(-2), 6.0, box_bound(&m, 6.0)).unwrap();
        assert_eq!(found.walls, oracle);
    }

    #[test]
    fn small_radius_gives_nothing() {
        let l = QuadLattice::u_power(3);
        let m = MajorantForm::exact(&l, &diagonal_frame(&l)).unwrap();
        // |q^∨(δ)| ≤ majorant norm, so radius < 2 cannot reach d = −2
        let found =
            enumerate_walls_near(&l, &m, &rat(-2), 1.9, &EnumerationOptions::default()).unwrap();
        assert!(found.walls.is_empty());
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let l = QuadLattice::u_power(3);
        let m = MajorantForm::exact(&l, &diagonal_frame(&l)).unwrap();
        assert!(
            enumerate_walls_near(&l, &m, &rat(2), 4.0, &EnumerationOptions::default()).is_err()
        );
        assert!(
            enumerate_walls_near(&l, &m, &rat(-2), 0.0, &EnumerationOptions::default()).is_err()
        );
        let capped = EnumerationOptions {
            max_rank: 4,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_walls_near(&l, &m, &rat(-2), 4.0, &capped),
            Err(Error::EnumerationCap(_))
        ));
    }
}
