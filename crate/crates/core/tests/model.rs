//! History sets against naive reference implementations.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use probnetkat::model::{histset_from_json, histset_to_json};
use probnetkat::HistSet;

fn naive(a: &HistSet) -> BTreeSet<probnetkat::History> {
    a.iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn set_operations_match_btreeset(a in common::hist_set(), b in common::hist_set()) {
        let (na, nb) = (naive(&a), naive(&b));
        prop_assert_eq!(naive(&a.union(&b)), &na | &nb);
        prop_assert_eq!(naive(&a.intersection(&b)), &na & &nb);
        prop_assert_eq!(naive(&a.difference(&b)), &na - &nb);
        prop_assert_eq!(a.is_subset(&b), na.is_subset(&nb));
        prop_assert!(a.iter().zip(a.iter().skip(1)).all(|(x, y)| x < y));
    }

    #[test]
    fn canonical_order_is_total(a in common::hist_set(), b in common::hist_set()) {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => prop_assert_eq!(&a, &b),
            Less => prop_assert_eq!(b.cmp(&a), Greater),
            Greater => prop_assert_eq!(b.cmp(&a), Less),
        }
    }

    #[test]
    fn serializations_round_trip(a in common::hist_set()) {
        let s = common::small_schema();
        prop_assert_eq!(HistSet::from_canonical_bytes(&a.canonical_bytes()).unwrap(), a.clone());
        prop_assert_eq!(histset_from_json(&s, &histset_to_json(&s, &a)).unwrap(), a);
    }

    #[test]
    fn distribution_json_round_trips(mu in common::dist(4)) {
        let s = common::small_schema();
        prop_assert_eq!(probnetkat::Dist::from_json(&s, &mu.to_json(&s)).unwrap(), mu);
    }
}
