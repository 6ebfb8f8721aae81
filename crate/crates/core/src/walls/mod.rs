//! Walls of negative linear forms on the Grassmannian of positive 3-planes:
//! majorants, bounded enumeration, wall avoidance and Kähler-chamber tests.

mod enumerate;
mod majorant;

pub use enumerate::{
    box_bound, enumerate_walls_box, enumerate_walls_near, short_vectors, EnumerationOptions,
    WallEnumeration,
};
pub use majorant::{in_u_eps, split, MajorantForm};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::VectorJson;
use crate::lattice::{is_negative_form, QuadLattice, WallForm};
use crate::period::{PeriodDomain, PeriodPoint};

/// Default tolerance on wall restrictions.
pub const WALL_TOL: f64 = 1e-8;

/// Finite set of indivisible negative forms, pairwise non-proportional.
///
/// When `oriented`, each form is signed so that the chamber side is `δ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WallSet {
    lattice: QuadLattice,
    walls: Vec<WallForm>,
    oriented: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallJson {
    pub coords: VectorJson,
    #[serde(default = "plus")]
    pub sign: i8,
}

fn plus() -> i8 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallSetJson {
    pub walls: Vec<WallJson>,
    #[serde(default = "yes")]
    pub oriented: bool,
}

impl WallSet {
    pub fn new(lattice: &QuadLattice, walls: Vec<WallForm>, oriented: bool) -> Result<Self> {
        for (i, w) in walls.iter().enumerate() {
            if w.coords.len() != lattice.rank() {
                return Err(Error::Dimension {
                    expected: lattice.rank(),
                    got: w.coords.len(),
                });
            }
            if !w.is_indivisible() {
                return Err(Error::Invalid(format!(
                    "wall {i} is not an indivisible integral form"
                )));
            }
            if !is_negative_form(lattice, w)? {
                return Err(Error::Invalid(format!("wall {i} is not a negative form")));
            }
            // indivisible forms are proportional only up to sign
            if walls[..i].iter().any(|v| v == w || *v == w.negated()) {
                return Err(Error::Invalid(format!(
                    "wall {i} is proportional to an earlier wall"
                )));
            }
        }
        Ok(Self {
            lattice: lattice.clone(),
            walls,
            oriented,
        })
    }

    pub fn empty(lattice: &QuadLattice) -> Self {
        Self {
            lattice: lattice.clone(),
            walls: Vec::new(),
            oriented: true,
        }
    }

    pub fn from_json(lattice: &QuadLattice, j: &WallSetJson) -> Result<Self> {
        let mut walls = Vec::with_capacity(j.walls.len());
        for w in &j.walls {
            let coords = w
                .coords
                .exact()
                .ok_or_else(|| Error::Invalid("wall coordinates must be exact".into()))?;
            let form = WallForm::new(coords);
            walls.push(match w.sign {
                1 => form,
                -1 => form.negated(),
                s => return Err(Error::Invalid(format!("wall sign must be ±1, got {s}"))),
            });
        }
        Self::new(lattice, walls, j.oriented)
    }

    pub fn to_json(&self) -> WallSetJson {
        WallSetJson {
            walls: self
                .walls
                .iter()
                .map(|w| WallJson {
                    coords: VectorJson::from_rat(&w.coords),
                    sign: 1,
                })
                .collect(),
            oriented: self.oriented,
        }
    }

    pub fn lattice(&self) -> &QuadLattice {
        &self.lattice
    }

    pub fn walls(&self) -> &[WallForm] {
        &self.walls
    }

    pub fn is_oriented(&self) -> bool {
        self.oriented
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }
}

/// q-orthonormal copy of a positive frame.
fn orthonormalize(lattice: &QuadLattice, frame: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(frame.len());
    for v in frame {
        if v.len() != lattice.rank() {
            return Err(Error::Dimension {
                expected: lattice.rank(),
                got: v.len(),
            });
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                w -= e * lattice.bilinear_f64(e, &w);
            }
        }
        let q = lattice.q_f64(&w);
        if !(q > 0.0) {
            return Err(Error::NotPositive { min_eigenvalue: q });
        }
        out.push(w / q.sqrt());
    }
    Ok(out)
}

/// Euclidean norm of `(δ(p_1), …, δ(p_k))`.
fn restriction(form: &WallForm, frame: &[DVector<f64>]) -> f64 {
    let c = form.coords_f64();
    frame.iter().map(|p| c.dot(p).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvoidanceReport {
    pub avoids: bool,
    pub nearest: Option<WallForm>,
    /// `min_δ ‖δ|_P‖` on a q-orthonormal frame; infinite for an empty set.
    pub min_restriction: f64,
}

/// Whether the positive 3-plane spanned by `frame` lies off every wall:
/// `‖δ|_P‖ > τ` for all `δ`, with the restriction taken on a q-orthonormal
/// frame.
pub fn wall_avoidance(
    frame: &[DVector<f64>],
    walls: &WallSet,
    tau: f64,
) -> Result<AvoidanceReport> {
    let frame = orthonormalize(walls.lattice(), frame)?;
    let nearest = walls
        .walls()
        .iter()
        .map(|w| (w, restriction(w, &frame)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    Ok(match nearest {
        None => AvoidanceReport {
            avoids: true,
            nearest: None,
            min_restriction: f64::INFINITY,
        },
        Some((w, r)) => AvoidanceReport {
            avoids: r > tau,
            nearest: Some(w.clone()),
            min_restriction: r,
        },
    })
}

/// Walls vanishing on `Π_z`, i.e. of type (1,1) for `z`.
pub fn relevant_walls(z: &PeriodPoint, walls: &WallSet, tau: f64) -> Vec<WallForm> {
    let frame = [z.re().clone(), z.im().clone()];
    walls
        .walls()
        .iter()
        .filter(|w| restriction(w, &frame) < tau)
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChamberReport {
    pub inside: bool,
    pub in_positive_cone: bool,
    /// A relevant wall with `δ(κ) ≤ τ‖κ‖`.
    pub witness: Option<WallForm>,
}

/// Whether `κ` lies in the positive cone of `z` and on the positive side of
/// every relevant wall.
pub fn kahler_chamber_contains(
    domain: &PeriodDomain,
    z: &PeriodPoint,
    walls: &WallSet,
    kappa: &DVector<f64>,
    tau: f64,
) -> Result<ChamberReport> {
    if walls.lattice() != domain.lattice() {
        return Err(Error::Invalid(
            "wall set and period domain use different lattices".into(),
        ));
    }
    if !walls.is_oriented() && !walls.is_empty() {
        return Err(Error::Invalid(
            "chamber tests need an oriented wall set".into(),
        ));
    }
    let in_positive_cone = domain.positive_cone_contains(z, kappa)?;
    if !in_positive_cone {
        return Ok(ChamberReport {
            inside: false,
            in_positive_cone,
            witness: None,
        });
    }
    let scale = kappa.norm();
    let witness = relevant_walls(z, walls, tau)
        .into_iter()
        .find(|w| w.eval_f64(kappa) <= tau * scale);
    Ok(ChamberReport {
        inside: witness.is_none(),
        in_positive_cone,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn u3() -> QuadLattice {
        QuadLattice::u_power(3)
    }

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    fn diagonals() -> Vec<DVector<f64>> {
        vec![
            v(&[1., 1., 0., 0., 0., 0.]),
            v(&[0., 0., 1., 1., 0., 0.]),
            v(&[0., 0., 0., 0., 1., 1.]),
        ]
    }

    fn dual(l: &QuadLattice, x: &[i64]) -> WallForm {
        WallForm::dual_to(l, &crate::rational::int_vec_to_rat(x))
    }

    fn domain() -> PeriodDomain {
        PeriodDomain::new(u3()).unwrap()
    }

    /// z spanned by (e₁+f₁, e₂+f₂).
    fn z12(d: &PeriodDomain) -> PeriodPoint {
        d.point(&v(&[1., 1., 0., 0., 0., 0.]), &v(&[0., 0., 1., 1., 0., 0.]))
            .unwrap()
    }

    #[test]
    fn wall_set_validation() {
        let l = u3();
        let w = dual(&l, &[1, -1, 0, 0, 0, 0]);
        assert!(WallSet::new(&l, vec![w.clone()], true).is_ok());
        assert!(WallSet::new(&l, vec![w.clone(), w.negated()], true).is_err());
        // positive form
        assert!(WallSet::new(&l, vec![dual(&l, &[1, 1, 0, 0, 0, 0])], true).is_err());
        // divisible
        assert!(WallSet::new(&l, vec![dual(&l, &[2, -2, 0, 0, 0, 0])], true).is_err());
        let j = WallSet::new(&l, vec![w], true).unwrap().to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: WallSetJson = serde_json::from_str(&text).unwrap();
        assert_eq!(
            WallSet::from_json(&l, &back).unwrap().walls()[0],
            dual(&l, &[1, -1, 0, 0, 0, 0])
        );
    }

    #[test]
    fn avoidance_examples() {
        let l = u3();
        let empty = WallSet::empty(&l);
        assert!(
            wall_avoidance(&diagonals(), &empty, WALL_TOL)
                .unwrap()
                .avoids
        );
        let on = WallSet::new(&l, vec![dual(&l, &[1, -1, 0, 0, 0, 0])], true).unwrap();
        let r = wall_avoidance(&diagonals(), &on, WALL_TOL).unwrap();
        assert!(!r.avoids);
        assert_eq!(r.nearest, Some(dual(&l, &[1, -1, 0, 0, 0, 0])));
        assert!(r.min_restriction < 1e-12);
        // tilting P off the kernel
        let mut tilted = diagonals();
        tilted[0][0] += 0.5;
        assert!(wall_avoidance(&tilted, &on, WALL_TOL).unwrap().avoids);
    }

    #[test]
    fn relevance_examples() {
        let l = u3();
        let d = domain();
        let z = z12(&d);
        let ws = WallSet::new(
            &l,
            vec![
                dual(&l, &[0, 0, 0, 0, 1, -1]),
                dual(&l, &[1, -1, 1, 0, 0, 0]),
            ],
            true,
        )
        .unwrap();
        let rel = relevant_walls(&z, &ws, WALL_TOL);
        assert_eq!(rel, vec![dual(&l, &[0, 0, 0, 0, 1, -1])]);
    }

    #[test]
    fn chamber_examples() {
        let l = u3();
        let d = domain();
        let z = z12(&d);
        let kappa = v(&[0., 0., 0., 0., 1., 1.]);
        let empty = WallSet::empty(&l);
        assert!(
            kahler_chamber_contains(&d, &z, &empty, &kappa, WALL_TOL)
                .unwrap()
                .inside
        );
        // δ = b(e₃ − f₃, ·) up to sign, q^∨(δ) = −2
        let delta = WallForm::from_ints(&[0, 0, 0, 0, 1, -1]);
        assert_eq!(delta, dual(&l, &[0, 0, 0, 0, -1, 1]));
        assert_eq!(crate::lattice::dual_value(&l, &delta).unwrap(), rat(-2));
        let wrong = kappa.clone() + v(&[0., 0., 0., 0., 0.2, -0.2]);
        let ws = WallSet::new(&l, vec![WallForm::from_ints(&[0, 0, 0, 0, -1, 1])], true).unwrap();
        let r = kahler_chamber_contains(&d, &z, &ws, &wrong, WALL_TOL).unwrap();
        assert!(r.in_positive_cone && !r.inside);
        assert_eq!(
            r.witness.unwrap(),
            WallForm::from_ints(&[0, 0, 0, 0, -1, 1])
        );
        // on the wall itself: δ(κ) = 0 is outside the open half-space
        let r = kahler_chamber_contains(&d, &z, &ws, &kappa, WALL_TOL).unwrap();
        assert!(!r.inside);
        // κ outside Π_z^⊥
        assert!(
            kahler_chamber_contains(&d, &z, &ws, &v(&[1., 1., 0., 0., 1., 1.]), WALL_TOL).is_err()
        );
    }

    proptest! {
        #[test]
        fn chamber_is_a_convex_cone(a in 0.05f64..0.9, b in 0.05f64..0.9, s in 0.1f64..10.0, t in 0.0f64..1.0) {
            let l = u3();
            let d = domain();
            let z = z12(&d);
            let ws = WallSet::new(&l, vec![WallForm::from_ints(&[0, 0, 0, 0, -1, 1])], true).unwrap();
            // members: (x₅, x₆) = (1 − a, 1 + a)
            let k1 = v(&[0., 0., 0., 0., 1. - a, 1. + a]);
            let k2 = v(&[0., 0., 0., 0., 1. - b, 1. + b]);
            prop_assert!(kahler_chamber_contains(&d, &z, &ws, &k1, WALL_TOL).unwrap().inside);
            prop_assert!(kahler_chamber_contains(&d, &z, &ws, &(k1.clone() * s), WALL_TOL).unwrap().inside);
            let mix = k1 * t + k2 * (1.0 - t);
            prop_assert!(kahler_chamber_contains(&d, &z, &ws, &mix, WALL_TOL).unwrap().inside);
        }

        #[test]
        fn avoidance_is_open(e in prop::collection::vec(-1.0f64..1.0, 18)) {
            let l = u3();
            let ws = WallSet::new(&l, vec![dual(&l, &[1, -1, 0, 0, 0, 0]), dual(&l, &[0, 0, 1, -1, 1, 0])], true).unwrap();
            let mut base = diagonals();
            base[0][0] += 0.4;
            base[1][2] -= 0.3;
            let r0 = wall_avoidance(&base, &ws, WALL_TOL).unwrap();
            prop_assert!(r0.avoids);
            // perturbations much smaller than the restriction gap keep avoidance
            let h = 1e-3 * r0.min_restriction;
            let moved: Vec<DVector<f64>> = base.iter().enumerate()
                .map(|(i, p)| p + DVector::from_iterator(6, e[6 * i..6 * i + 6].iter().map(|x| x * h)))
                .collect();
            prop_assert!(wall_avoidance(&moved, &ws, WALL_TOL).unwrap().avoids);
        }
    }
}
