mod common;

use hubo_gas::boolpoly::*;
use proptest::prelude::*;

fn fits(m: usize, min: i64, max: i64) -> bool {
    let half = 1i128 << (m - 1);
    -half <= min as i128 && (max as i128) < half
}

proptest! {
    #[test]
    fn expansion_preserves_values(p in (1usize..=10).prop_flat_map(|n| common::polynomial(n, 8))) {
        let e = p.expand().unwrap();
        prop_assert!(e.is_expanded());
        for x in 0..1u64 << p.num_vars() {
            prop_assert_eq!(e.evaluate_index(x).unwrap(), common::naive_eval(&p, x));
        }
    }

    #[test]
    fn canonical_form_ignores_term_order(p in common::polynomial(6, 10), seed in any::<u64>()) {
        let mut terms = p.terms().to_vec();
        // deterministic shuffle
        let len = terms.len();
        for i in (1..len).rev() {
            let j = (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize;
            terms.swap(i, j);
        }
        let q = Polynomial::new(p.num_vars(), terms, p.constant()).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn bounds_agree_with_naive_scan(p in (1usize..=12).prop_flat_map(|n| common::polynomial(n, 12))) {
        let values: Vec<i64> = (0..1u64 << p.num_vars()).map(|x| common::naive_eval(&p, x)).collect();
        let naive = (*values.iter().min().unwrap(), *values.iter().max().unwrap());
        prop_assert_eq!(p.bounds().unwrap(), naive);
        let (lo, hi) = p.interval_bounds().unwrap();
        prop_assert!(lo <= naive.0 && naive.1 <= hi);
    }

    #[test]
    fn register_width_is_minimal(min in -5000i64..=5000, span in 0i64..5000) {
        let max = min + span;
        let m = value_register_width(min, max);
        prop_assert!(fits(m, min, max));
        prop_assert!(m == 1 || !fits(m - 1, min, max));
    }

    #[test]
    fn text_round_trip(p in common::polynomial(7, 10)) {
        let back: Polynomial = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn shifting_moves_the_negative_set(p in common::polynomial(6, 8), y in -6i64..=6) {
        let s = p.shift(y).unwrap();
        for x in 0..1u64 << 6 {
            let below = common::naive_eval(&p, x) < y;
            prop_assert_eq!(s.evaluate_index(x).unwrap() < 0, below);
        }
    }
}

#[test]
fn overflow_is_an_error() {
    let big = FactoredTerm::new(i64::MAX, vec![Literal::positive(0)]).unwrap();
    let also = FactoredTerm::new(1, vec![Literal::positive(0)]).unwrap();
    assert!(matches!(
        Polynomial::new(1, [big.clone(), also], 0),
        Err(hubo_gas::Error::Overflow(_))
    ));
    let p = Polynomial::new(1, [big], i64::MAX).unwrap();
    assert!(p.shift(-1).is_err());
    assert!(p.expand().is_ok());
}

#[test]
fn enumeration_cap() {
    let p = Polynomial::constant_only(30, 1);
    assert!(matches!(
        p.bounds(),
        Err(hubo_gas::Error::EnumerationCap { num_vars: 30, .. })
    ));
    assert!(Polynomial::constant_only(20, 1).bounds_with_cap(16).is_err());
}
