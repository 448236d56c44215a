use proptest::prelude::*;
use selberg_core::ExtendedLog;

fn value() -> impl Strategy<Value = ExtendedLog> {
    prop_oneof![
        (-800.0..800.0f64).prop_map(ExtendedLog::finite),
        (-50.0..1000.0f64).prop_map(ExtendedLog::from_exponent),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn order_is_total_and_transitive(a in value(), b in value(), c in value()) {
        let ab = a.partial_cmp(&b);
        prop_assert!(ab.is_some());
        prop_assert_eq!(ab.map(|o| o.reverse()), b.partial_cmp(&a));
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        if a < b && b < c {
            prop_assert!(a < c);
        }
    }

    #[test]
    fn combine_is_commutative_with_unit(a in value(), b in value()) {
        prop_assert_eq!(a.combine(b), b.combine(a));
        prop_assert_eq!(a.combine(ExtendedLog::finite(0.0)), a);
    }

    #[test]
    fn shift_is_monotone(a in value(), c in 0.0..100.0f64) {
        prop_assert!(a.shift(c) >= a);
    }
}

#[test]
fn exponent_saturates_above_threshold() {
    assert!(!ExtendedLog::from_exponent(700.0).is_saturated());
    assert!(ExtendedLog::from_exponent(700.5).is_saturated());
    assert!(ExtendedLog::from_exponent(701.0) > ExtendedLog::finite(f64::MAX));
    assert!(ExtendedLog::from_exponent(701.0).bounds(1e300));
}
