//! Generators and brute-force oracles shared by the property suites and
//! the acceptance target.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use probnetkat::prob::ratio;
use probnetkat::{Dist, FieldSchema, HistSet, History, Packet, Program, Rational};

/// Two binary fields `sw` and `pt`: four packets.
pub fn small_schema() -> FieldSchema {
    FieldSchema::from_ranges(&[("sw", 0, 1), ("pt", 0, 1)]).unwrap()
}

pub fn packet() -> impl Strategy<Value = Packet> {
    (0u32..2, 0u32..2).prop_map(|(a, b)| Packet::new(&small_schema(), vec![a, b]).unwrap())
}

pub fn history() -> impl Strategy<Value = History> {
    prop::collection::vec(packet(), 1..=3).prop_map(|ps| History::new(&ps).unwrap())
}

pub fn hist_set() -> impl Strategy<Value = HistSet> {
    prop::collection::vec(history(), 0..=4).prop_map(HistSet::from_histories)
}

/// Sets drawn from a small pool so that random sets often share members.
pub fn pooled_set(pool: Vec<History>) -> impl Strategy<Value = HistSet> {
    let n = pool.len();
    prop::collection::vec(any::<bool>(), n).prop_map(move |keep| {
        pool.iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(h, _)| h.clone())
            .collect()
    })
}

pub fn history_pool() -> impl Strategy<Value = Vec<History>> {
    prop::collection::btree_set(history(), 1..=5).prop_map(|s| s.into_iter().collect())
}

/// A distribution with up to `max_support` atoms and small integer weights.
pub fn dist_over(sets: impl Strategy<Value = HistSet>, max_support: usize) -> impl Strategy<Value = Dist> {
    prop::collection::vec((sets, 1i64..=6), 1..=max_support).prop_map(|entries| {
        let mut merged: std::collections::BTreeMap<HistSet, i64> = Default::default();
        for (s, w) in entries {
            *merged.entry(s).or_default() += w;
        }
        let total: i64 = merged.values().sum();
        Dist::from_weights(merged.into_iter().map(|(s, w)| (s, ratio(w, total)))).unwrap()
    })
}

pub fn dist(max_support: usize) -> impl Strategy<Value = Dist> {
    dist_over(hist_set(), max_support)
}

/// A pool of histories with two distributions whose supports draw on it.
pub fn dist_pair(max_support: usize) -> impl Strategy<Value = (Dist, Dist)> {
    history_pool().prop_flat_map(move |pool| {
        (
            dist_over(pooled_set(pool.clone()), max_support),
            dist_over(pooled_set(pool), max_support),
        )
    })
}

fn probability() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![ratio(1, 2), ratio(1, 3), ratio(1, 4), ratio(2, 3), ratio(9, 10)])
}

fn field() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["sw", "pt"])
}

pub fn predicate() -> impl Strategy<Value = Program> {
    let leaf = prop_oneof![
        Just(Program::Drop),
        Just(Program::Skip),
        (field(), 0u64..2).prop_map(|(f, v)| Program::test(f, v)),
    ];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Program::neg),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Program::par(p, q)),
            (inner.clone(), inner).prop_map(|(p, q)| Program::seq(p, q)),
        ]
    })
}

/// Programs of depth at most `depth` over [`small_schema`], with or
/// without Kleene star and probabilistic choice.
pub fn program(depth: u32, with_star: bool, with_choice: bool) -> BoxedStrategy<Program> {
    let leaf = prop_oneof![
        predicate(),
        (field(), 0u64..2).prop_map(|(f, v)| Program::modify(f, v)),
        Just(Program::Dup),
    ];
    leaf.prop_recursive(depth, 12, 2, move |inner| {
        let mut options: Vec<BoxedStrategy<Program>> = vec![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Program::par(p, q)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Program::seq(p, q)).boxed(),
        ];
        if with_choice {
            options.push(
                (probability(), inner.clone(), inner.clone())
                    .prop_map(|(r, p, q)| Program::choice(r, p, q))
                    .boxed(),
            );
        }
        if with_star {
            options.push(inner.prop_map(Program::star).boxed());
        }
        prop::strategy::Union::new(options)
    })
    .boxed()
}

/// A fixed-seed runner so every run sees the same instances.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// `μ ⊑ ν` by enumerating every up-closed family of the joint support.
pub fn leq_oracle(mu: &Dist, nu: &Dist) -> bool {
    let mut points: Vec<HistSet> = mu.support().chain(nu.support()).cloned().collect();
    points.sort();
    points.dedup();
    let n = points.len();
    assert!(n <= 16, "oracle limited to 16 points");
    (0u32..1 << n).all(|family| {
        let up_closed = (0..n).all(|i| {
            family >> i & 1 == 0 || (0..n).all(|j| !points[i].is_subset(&points[j]) || family >> j & 1 == 1)
        });
        if !up_closed {
            return true;
        }
        let mass = |d: &Dist| {
            (0..n)
                .filter(|&i| family >> i & 1 == 1)
                .fold(ratio(0, 1), |acc, i| acc + d.weight(&points[i]))
        };
        mass(mu) <= mass(nu)
    })
}
