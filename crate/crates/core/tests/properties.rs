use nbrefute::instances::{fourier_decompose, parse_instance, row_signs, Instance, XorInstance};
use nbrefute::linalg::SymWeightedMatrix;
use nbrefute::nonbacktracking::ihara_bass_residual;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = SymWeightedMatrix> {
    (2usize..7).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(prop_oneof![Just(0.0), -2.0..2.0f64], pairs).prop_map(move |w| {
            let mut it = w.into_iter();
            let mut t = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let x = it.next().unwrap();
                    if x != 0.0 {
                        t.push((u, v, x));
                    }
                }
            }
            SymWeightedMatrix::from_entries(n, t).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_identity_holds(a in matrix(), u in -0.9..0.9f64) {
        prop_assert!(ihara_bass_residual(&a, u).unwrap() <= 1e-8);
    }

    #[test]
    fn fourier_expansion_reproduces_table(table in prop::collection::vec(0u8..2, 8)) {
        let f = fourier_decompose(&table).unwrap();
        for (row, &bit) in table.iter().enumerate() {
            prop_assert!((f.evaluate(&row_signs(3, row)) - f64::from(bit)).abs() <= 1e-12);
        }
    }

    #[test]
    fn xor_instances_round_trip(
        clauses in prop::collection::btree_set(prop::collection::btree_set(0usize..8, 3), 0..10),
        signs in prop::collection::vec(any::<bool>(), 10),
    ) {
        let list = clauses.into_iter().zip(signs).map(|(s, b)| (s.into_iter().collect(), if b { 1.0 } else { -1.0 }));
        let inst = Instance::Xor(XorInstance::new(8, 3, list).unwrap());
        let back = parse_instance(&inst.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), inst.to_json());
    }
}
