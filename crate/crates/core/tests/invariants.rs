use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;

use pbt_core::diagrams::{enumerate, HeightCap, YoungDiagram};
use pbt_core::protocol::{lower_bound_fidelity, optimal_fidelity, sqrt_measurement_fidelity};
use pbt_core::spectral::PowerConfig;
use pbt_core::telemat::{gram_g, teleportation_matrix, LabeledIntMatrix, MatrixKind};

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn diagram() -> impl Strategy<Value = YoungDiagram> {
    (1usize..=12).prop_flat_map(|n| {
        let all = enumerate(n, HeightCap::UNBOUNDED).entries().to_vec();
        proptest::sample::select(all)
    })
}

proptest! {
    #[test]
    fn diagram_text_round_trips(mu in diagram()) {
        let back: YoungDiagram = mu.to_string().parse().unwrap();
        prop_assert_eq!(back, mu);
    }

    #[test]
    fn conjugation_is_an_involution_preserving_dimension(mu in diagram()) {
        let c = mu.conjugate();
        prop_assert_eq!(c.conjugate(), mu.clone());
        prop_assert_eq!(c.irrep_dim(), mu.irrep_dim());
    }

    #[test]
    fn box_moves_conserve_size(mu in diagram()) {
        for nu in mu.remove_box() {
            prop_assert_eq!(nu.boxes() + 1, mu.boxes());
            prop_assert!(nu.add_box(HeightCap::UNBOUNDED).contains(&mu));
        }
    }

    #[test]
    fn branching_rule_holds(mu in diagram()) {
        let below: BigUint = mu.remove_box().iter().map(YoungDiagram::irrep_dim).sum();
        prop_assert_eq!(below, mu.irrep_dim());
    }

    #[test]
    fn schur_weyl_dimension_count(n in 1usize..=9, d in 1usize..=5) {
        let total: BigUint = enumerate(n, HeightCap::at_most(d))
            .iter()
            .map(|mu| mu.irrep_dim() * mu.multiplicity(d))
            .sum();
        prop_assert_eq!(total, BigUint::from(d).pow(n as u32));
    }

    #[test]
    fn teleportation_matrix_is_symmetric_and_nonnegative(n in 1usize..=9, d in 2usize..=6) {
        let m = teleportation_matrix(n, d).unwrap();
        prop_assert!(m.matrix().is_symmetric());
        prop_assert!(m.matrix().is_nonnegative());
        prop_assert!((0..m.matrix().nrows()).all(|i| m.matrix().get(i, i) >= 1));
    }

    #[test]
    fn csv_round_trip(n in 2usize..=8, d in 2usize..=5) {
        let g = gram_g(n, d).unwrap();
        let text = g.to_csv_string();
        let back = LabeledIntMatrix::read_csv(MatrixKind::MF, n, d, text.as_bytes()).unwrap();
        prop_assert_eq!(back.to_dense(), g.to_dense());
    }

    #[test]
    fn fidelities_are_ordered(n in 1usize..=14, d in 2usize..=7) {
        let lo = lower_bound_fidelity(n, d).unwrap().fidelity;
        let sq = sqrt_measurement_fidelity(n, d).unwrap().fidelity;
        let op = optimal_fidelity(n, d, PowerConfig::default()).unwrap().fidelity;
        prop_assert!(lo <= sq + 1e-10);
        prop_assert!(sq <= op + 1e-10);
        prop_assert!(op <= 1.0 + 1e-10);
        prop_assert!(op >= 1.0 / (d * d) as f64 - 1e-12);
    }
}

#[test]
fn plancherel_identity() {
    for n in 1..=10 {
        let sum: BigUint = enumerate(n, HeightCap::UNBOUNDED)
            .iter()
            .map(|mu| mu.irrep_dim().pow(2))
            .sum();
        assert_eq!(sum, factorial(n), "N={n}");
    }
}
