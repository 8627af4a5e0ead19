//! Property-based checks of metric and measure invariants.

use proptest::prelude::*;
use w2net::measures::{entropy, grid_to_discrete, DiscreteMeasure, GridMeasure};
use w2net::multimarginal::{star_cost, StarWeights};
use w2net::transport::{displacement_interpolate, solve_ot_exact, w2, CostSpec};

fn measure_strategy(dim: usize, max_points: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec(
        (
            prop::collection::vec(-5.0..5.0f64, dim),
            0.05..1.0f64,
        ),
        1..=max_points,
    )
    .prop_map(move |atoms| {
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        let (points, weights) = atoms
            .into_iter()
            .map(|(p, w)| (p, w / total))
            .unzip();
        DiscreteMeasure::new(dim, points, weights).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // W2 between a measure and its translate is the translation length
    #[test]
    fn translate_distance_is_translation_length(
        mu in measure_strategy(2, 6),
        vx in -3.0..3.0f64,
        vy in -3.0..3.0f64,
    ) {
        let v = [vx, vy];
        let d = w2(&mu, &mu.translate(&v)).unwrap();
        let len = (vx * vx + vy * vy).sqrt();
        prop_assert!((d - len).abs() < 1e-9, "{d} vs {len}");
    }

    // geodesic endpoints reproduce the marginals
    #[test]
    fn interpolation_endpoints_match_marginals(
        mu in measure_strategy(2, 5),
        nu in measure_strategy(2, 5),
    ) {
        let plan = solve_ot_exact(&mu, &nu, &CostSpec::SquaredEuclidean).unwrap();
        let g0 = displacement_interpolate(&plan, 0.0).unwrap();
        let g1 = displacement_interpolate(&plan, 1.0).unwrap();
        // the optimal cost is exact to ~1e-14 at these coordinate
        // scales, which the square root turns into ~1e-7 on distances
        prop_assert!(w2(&mu, &g0).unwrap() < 1e-6);
        prop_assert!(w2(&nu, &g1).unwrap() < 1e-6);
    }

    // W2 is symmetric and vanishes on the diagonal
    #[test]
    fn metric_axioms_on_random_pairs(
        mu in measure_strategy(3, 5),
        nu in measure_strategy(3, 5),
    ) {
        prop_assert!(w2(&mu, &mu).unwrap() < 1e-6);
        let ab = w2(&mu, &nu).unwrap();
        let ba = w2(&nu, &mu).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
    }

    // star cost is nonnegative and vanishes when all points coincide
    #[test]
    fn star_cost_nonnegative(
        sig in prop::collection::vec(0.1..2.0f64, 3..6),
        p in prop::collection::vec(-5.0..5.0f64, 2),
    ) {
        let w = StarWeights::new(sig.clone()).unwrap();
        let same: Vec<&[f64]> = (0..sig.len()).map(|_| p.as_slice()).collect();
        prop_assert!(star_cost(&same, &w).unwrap().abs() < 1e-12);
    }

    // uniform densities: entropy equals the log of the support volume
    #[test]
    fn uniform_grid_entropy_is_log_volume(
        w1 in 0.2..4.0f64,
        w2_ in 0.2..4.0f64,
        res in 2..10usize,
    ) {
        let g = GridMeasure::uniform(vec![(0.0, w1), (0.0, w2_)], vec![res, res]).unwrap();
        let h = entropy(&g);
        prop_assert!((h - (w1 * w2_).ln()).abs() < 1e-9, "{h}");
        // and the discrete view conserves mass
        let d = grid_to_discrete(&g);
        prop_assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
