use proptest::prelude::*;

use qmeixner::charfun::{bose_cf, bose_cf_grid, fermi_cf_grid, linspace};
use qmeixner::dist::{classify_bose, classify_fermi, dist_cf, moments, DistributionSpec};

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.05f64, 0.05..3.0f64]
}

fn squeezing() -> impl Strategy<Value = f64> {
    0.05..3.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fermi_cf_is_a_characteristic_function(alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let ts = linspace(-5.0, 5.0, 201);
        let g = fermi_cf_grid(alpha, beta, &ts).unwrap();
        prop_assert!(g.max_excess_modulus() <= 1e-12);
        prop_assert!(g.hermitian_defect() <= 1e-12);
    }

    #[test]
    fn bose_cf_is_bounded_and_hermitian(alpha in squeezing(), beta in coupling()) {
        let ts = linspace(-5.0, 5.0, 401);
        let g = bose_cf_grid(alpha, beta, &ts).unwrap();
        prop_assert!(g.max_excess_modulus() <= 1e-10);
        prop_assert!(g.hermitian_defect() <= 1e-10);
    }

    #[test]
    fn classified_law_reproduces_the_cf(alpha in squeezing(), beta in coupling(), t in -5.0..5.0f64) {
        let law = classify_bose(alpha, beta).unwrap().dist;
        prop_assert!((dist_cf(&law, t) - bose_cf(alpha, beta, t).unwrap()).norm() <= 1e-10);
    }

    #[test]
    fn vacuum_moments(alpha in squeezing(), beta in coupling()) {
        let m = moments(&classify_bose(alpha, beta).unwrap().dist, 2).unwrap();
        prop_assert!(m[0].abs() <= 1e-9);
        prop_assert!((m[1] - alpha * alpha / 2.0).abs() <= 1e-8 * (1.0 + alpha * alpha));
    }

    #[test]
    fn fermi_atoms_are_symmetric(alpha in -3.0..3.0f64, beta in coupling()) {
        if let DistributionSpec::TwoAtom { x1, p1, x2, p2 } = classify_fermi(alpha, beta).unwrap().dist {
            prop_assert!((p1 + p2 - 1.0).abs() <= 1e-12);
            prop_assert!((p1 * x1 + p2 * x2).abs() <= 1e-12 * (1.0 + x1.abs() + x2.abs()));
        }
    }
}
