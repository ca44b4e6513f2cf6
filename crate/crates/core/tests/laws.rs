//! Algebraic laws of the distribution monad, parallel composition and the
//! order on distributions.

mod common;

use proptest::prelude::*;

use probnetkat::fixtures;
use probnetkat::measure::measure_of_basic_open;
use probnetkat::prob::{leq, ratio};
use probnetkat::semantics::eval;
use probnetkat::{Dist, HistSet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn monad_laws(mu in common::dist(4), a in common::hist_set(),
                  p in common::program(3, false, true), q in common::program(3, false, true)) {
        let schema = common::small_schema();
        let f = |s: &HistSet| eval(&schema, &p, s).unwrap();
        let g = |s: &HistSet| eval(&schema, &q, s).unwrap();
        prop_assert_eq!(Dist::dirac(a.clone()).bind(f), f(&a));
        prop_assert_eq!(mu.bind(|s| Dist::dirac(s.clone())), mu.clone());
        prop_assert_eq!(mu.bind(f).bind(g), mu.bind(|s| f(s).bind(g)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parallel_is_a_commutative_monoid(a in common::dist(3), b in common::dist(3), c in common::dist(3)) {
        prop_assert_eq!(a.par(&b).par(&c), a.par(&b.par(&c)));
        prop_assert_eq!(a.par(&b), b.par(&a));
        prop_assert_eq!(a.par(&Dist::dirac(HistSet::empty())), a.clone());
        prop_assert!(a.par(&a).support().all(|s| a.support().any(|t| t.is_subset(s))));
    }

    #[test]
    fn convex_combination_endpoints(a in common::dist(3), b in common::dist(3)) {
        prop_assert_eq!(Dist::convex(&ratio(1, 1), &a, &b).unwrap(), a.clone());
        prop_assert_eq!(Dist::convex(&ratio(0, 1), &a, &b).unwrap(), b.clone());
        prop_assert_eq!(Dist::convex(&ratio(1, 2), &a, &b).unwrap(), Dist::convex(&ratio(1, 2), &b, &a).unwrap());
    }

    #[test]
    fn order_matches_the_up_set_oracle((mu, nu) in common::dist_pair(5)) {
        prop_assert_eq!(leq(&mu, &nu).unwrap(), common::leq_oracle(&mu, &nu));
        prop_assert_eq!(leq(&nu, &mu).unwrap(), common::leq_oracle(&nu, &mu));
    }

    #[test]
    fn order_is_a_partial_order((mu, nu) in common::dist_pair(4), extra in common::hist_set()) {
        prop_assert!(leq(&mu, &mu).unwrap());
        if leq(&mu, &nu).unwrap() && leq(&nu, &mu).unwrap() {
            prop_assert_eq!(&mu, &nu);
        }
        let grown = nu.map(|s| s.union(&extra));
        if leq(&mu, &nu).unwrap() {
            prop_assert!(leq(&mu, &grown).unwrap());
        }
        prop_assert!(leq(&nu, &grown).unwrap());
    }

    #[test]
    fn parallel_is_an_upper_bound((mu, nu) in common::dist_pair(4)) {
        let both = mu.par(&nu);
        prop_assert!(leq(&mu, &both).unwrap());
        prop_assert!(leq(&nu, &both).unwrap());
    }

    #[test]
    fn bottom_is_least(mu in common::dist(5)) {
        prop_assert!(leq(&Dist::dirac(HistSet::empty()), &mu).unwrap());
    }
}

/// The three "upper bounds" dominate every `μ_j` on each basic open
/// `B_a = {c : a ⊆ c}`, but not on the open union `B_π ∪ B_σ`, so they are
/// not upper bounds in the order over all Scott-open sets.
#[test]
fn three_measures_dominated_only_on_basic_opens() {
    let (mus, nus) = fixtures::semilattice_counterexample();
    let packets = fixtures::three_packets();
    let subsets: Vec<HistSet> = (0..8u32)
        .map(|m| (0..3).filter(|i| m >> i & 1 == 1).map(|i| packets[i].clone()).collect())
        .collect();
    for mu in &mus {
        for nu in &nus {
            for a in &subsets {
                assert!(measure_of_basic_open(mu, a) <= measure_of_basic_open(nu, a));
            }
            assert_eq!(leq(mu, nu).unwrap(), common::leq_oracle(mu, nu));
        }
    }
    let union = |d: &Dist| d.probability(|s| s.contains(&packets[0]) || s.contains(&packets[1]));
    assert_eq!(union(&mus[0]), ratio(1, 1));
    assert_eq!(union(&nus[0]), ratio(1, 2));
    assert!(!leq(&mus[0], &nus[0]).unwrap());
    // A common upper bound does exist: every set holds two of the packets.
    let pair = |i: usize, j: usize| [packets[i].clone(), packets[j].clone()].into_iter().collect::<HistSet>();
    let upper = Dist::from_weights([(pair(0, 1), ratio(1, 2)), (pair(1, 2), ratio(1, 2))]).unwrap();
    assert!(leq(&mus[0], &upper).unwrap() && leq(&mus[1], &upper).unwrap());
}
