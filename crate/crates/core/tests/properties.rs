//! Cross-module properties over random inputs.

use nalgebra::DVector;
use num::Zero;
use proptest::prelude::*;

use torelli_core::cech::{
    coboundary, is_cocycle, solve_coboundary, Cochain, FiniteAbelianGroup, Nerve, SolveOutcome,
};
use torelli_core::lattice::{dual_value, QuadLattice, WallForm};
use torelli_core::llv::{
    grading_h, grading_h_exact, lefschetz_e, lefschetz_e_exact, lefschetz_f, lefschetz_f_exact,
    sl2_residuals, CohomologyRing,
};
use torelli_core::period::PeriodDomain;
use torelli_core::rational::{self, Rat};
use torelli_core::walls::{enumerate_walls_near, EnumerationOptions, MajorantForm};

fn k3_vector(range: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-range..=range, 22)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn exact_triples_close_on_the_k3_ring(eta in k3_vector(3)) {
        let ring = CohomologyRing::k3();
        prop_assume!(ring.lattice_block().lattice.q_int(&eta) != 0);
        let eta = rational::int_vec_to_rat(&eta);
        let e = lefschetz_e_exact(&ring, &eta).unwrap();
        let f = lefschetz_f_exact(&ring, &eta).unwrap();
        let h = grading_h_exact(&ring);
        let scaled = |x: &[Vec<Rat>], t: i64| -> Vec<Vec<Rat>> {
            x.iter().map(|r| r.iter().map(|v| v * rational::rat(t)).collect()).collect()
        };
        prop_assert_eq!(h.bracket(&e).matrix, scaled(&e.matrix, -2));
        prop_assert_eq!(h.bracket(&f).matrix, scaled(&f.matrix, 2));
        prop_assert_eq!(e.bracket(&f).matrix, scaled(&h.matrix, -1));
    }

    #[test]
    fn float_triples_match_exact_ones(eta in k3_vector(4)) {
        let ring = CohomologyRing::k3();
        prop_assume!(ring.lattice_block().lattice.q_int(&eta) != 0);
        let x: Vec<f64> = eta.iter().map(|&v| v as f64).collect();
        let e = lefschetz_e(&ring, &x).unwrap();
        let f = lefschetz_f(&ring, &x).unwrap();
        let r = sl2_residuals(&e, &grading_h(&ring), &f);
        prop_assert!(r.iter().all(|&v| v < 1e-9), "{:?}", r);
        let fx = lefschetz_f_exact(&ring, &rational::int_vec_to_rat(&eta)).unwrap().to_f64();
        prop_assert!((&f.matrix - &fx.matrix).amax() < 1e-9);
    }

    #[test]
    fn period_points_ignore_complex_scaling(seed in 0u64..1000, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re.hypot(im) > 1e-2);
        let domain = PeriodDomain::new(QuadLattice::u_power(3)).unwrap();
        let z = domain.sample_period_point(seed);
        // λσ for λ = re + i·im
        let a: DVector<f64> = z.re() * re - z.im() * im;
        let b: DVector<f64> = z.re() * im + z.im() * re;
        let w = domain.point(&a, &b).unwrap();
        prop_assert!(z.distance(&w) < 1e-9);
    }

    #[test]
    fn enumerated_walls_are_sound(t in -1i64..=1, d in prop::sample::select(vec![-2i64, -4, -6])) {
        // a rational plane tilted away from the hyperbolic diagonals, positive for |t| < 2
        let lattice = QuadLattice::u_power(3);
        let frame = vec![
            rational::int_vec_to_rat(&[1, 1, 0, 0, t, 0]),
            rational::int_vec_to_rat(&[0, 0, 1, 1, 0, 0]),
            rational::int_vec_to_rat(&[0, 0, 0, 0, 1, 1]),
        ];
        let majorant = MajorantForm::exact(&lattice, &frame).unwrap();
        let e = enumerate_walls_near(&lattice, &majorant, &rational::rat(d), 6.0, &EnumerationOptions::default())
            .unwrap();
        for w in &e.walls {
            prop_assert_eq!(dual_value(&lattice, w).unwrap(), rational::rat(d));
            prop_assert!(w.is_indivisible());
            prop_assert!(majorant.dual_norm_exact(w).unwrap() <= rational::rat(6));
            let first = w.coords.iter().find(|c| !c.is_zero()).unwrap();
            prop_assert!(*first > Rat::zero());
        }
        let mut sorted = e.walls.clone();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), e.walls.len());
        let negated: Vec<WallForm> = e.walls.iter().map(WallForm::negated).collect();
        prop_assert!(negated.iter().all(|w| !e.walls.contains(w)));
    }

    #[test]
    fn coboundaries_solve_back(values in prop::collection::vec(0u64..4, 15), k in prop::sample::select(vec![2u64, 3, 4])) {
        let nerve = Nerve::simplex(6);
        let group = FiniteAbelianGroup::cyclic(k);
        let x: Vec<Vec<u64>> = values.iter().map(|&v| vec![v % k]).collect();
        let x = Cochain::new(&nerve, &group, 1, x).unwrap();
        let c = coboundary(&nerve, &group, &x).unwrap();
        prop_assert!(is_cocycle(&nerve, &group, &c).unwrap());
        match solve_coboundary(&nerve, &group, &c).unwrap() {
            SolveOutcome::Solved(y) => prop_assert_eq!(coboundary(&nerve, &group, &y).unwrap(), c),
            SolveOutcome::Obstructed(o) => prop_assert!(false, "obstructed: {:?}", o),
        }
    }
}
