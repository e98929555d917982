mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use saecula::coeff::Coeff;
use saecula::diagram::Interval;
use saecula::fingroup::{coset_barcode, GroupDiagram};
use saecula::homology::homology_barcode;
use saecula::json::{parse_diagram, Int};
use saecula::random::{random_complex, random_torsion_diagram, ComplexParams};
use saecula::saecular::barcode;

const PARAMS: ComplexParams = ComplexParams {
    max_cells: 30,
    max_dim: 3,
    grades: 5,
    multipliers: &[1, 2, 3, 4, 6],
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_oracle_over_f3(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, PARAMS, Coeff::Integers)
            .and_then(|x| x.with_coeff(Coeff::Prime(3)))
            .unwrap();
        let oracle = common::oracle::standard_bars(&x, 3);
        for m in 0..=x.max_dim() {
            let got: BTreeMap<(usize, usize, usize), usize> = homology_barcode(&x, m)
                .unwrap()
                .bars
                .into_iter()
                .map(|(i, f)| ((m, i.p, i.q), f.shape.free_rank))
                .collect();
            let want: BTreeMap<_, _> = oracle.iter().filter(|(k, _)| k.0 == m).map(|(k, v)| (*k, *v)).collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn rational_bars_are_the_free_part_of_integer_bars(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, PARAMS, Coeff::Integers).unwrap();
        let q = x.with_coeff(Coeff::Rationals).unwrap();
        for m in 0..=x.max_dim() {
            let free: BTreeMap<Interval, usize> = homology_barcode(&x, m)
                .unwrap()
                .bars
                .into_iter()
                .filter(|(_, f)| f.shape.free_rank > 0)
                .map(|(i, f)| (i, f.shape.free_rank))
                .collect();
            let rational: BTreeMap<Interval, usize> = homology_barcode(&q, m)
                .unwrap()
                .bars
                .into_iter()
                .map(|(i, f)| (i, f.shape.free_rank))
                .collect();
            prop_assert_eq!(free, rational);
        }
    }

    #[test]
    fn cayley_tables_reproduce_abelian_factor_orders(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_torsion_diagram(&mut rng, 3, 2);
        let sizes: Vec<usize> = (1..=d.len()).map(|a| {
            let s = d.object(a).shape();
            s.invariant_factors.iter().map(|x| x.to_string().parse::<usize>().unwrap()).product()
        }).collect();
        prop_assume!(sizes.iter().all(|&k| k <= 128));
        let abelian: BTreeMap<Interval, BigInt> = barcode(&d)
            .unwrap()
            .into_iter()
            .map(|(i, f)| (i, f.shape.order().unwrap()))
            .collect();
        let g = GroupDiagram::from_abelian(&d).unwrap();
        let cosets: BTreeMap<Interval, BigInt> = coset_barcode(&g)
            .unwrap()
            .into_iter()
            .map(|(i, f)| (i, BigInt::from(f.cardinalities[i.p - 1])))
            .collect();
        prop_assert_eq!(abelian, cosets);
    }

    #[test]
    fn integers_survive_json(digits in "-?[1-9][0-9]{0,40}") {
        let x: BigInt = digits.parse().unwrap();
        let text = serde_json::to_string(&Int(x.clone())).unwrap();
        let back: Int = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.0, x);
    }

    #[test]
    fn cyclic_chains_parse_and_decompose(orders in prop::collection::vec(1i64..12, 1..5)) {
        let n = orders.len();
        let objects: Vec<String> = orders.iter().map(|d| format!(r#"{{"rank":1,"relations":[[{d}]]}}"#)).collect();
        // multiply by the target order over gcd, which is always well defined
        let maps: Vec<String> = orders
            .windows(2)
            .map(|w| {
                let g = num_integer::gcd(w[0], w[1]);
                format!("[[{}]]", w[1] / g)
            })
            .collect();
        let text = format!(r#"{{"objects":[{}],"maps":[{}]}}"#, objects.join(","), maps.join(","));
        let d = parse_diagram(&text, None).unwrap();
        let total: BigInt = barcode(&d)
            .unwrap()
            .into_iter()
            .filter(|(i, _)| i.p == 1)
            .map(|(_, f)| f.shape.order().unwrap())
            .product();
        prop_assert_eq!(total, BigInt::from(orders[0]));
        prop_assert_eq!(d.len(), n);
    }
}
