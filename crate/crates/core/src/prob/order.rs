//! Decision procedure for the order `μ ⊑ ν` on finite discrete measures.
//!
//! `μ ⊑ ν` holds iff `μ(B) ≤ ν(B)` for every Scott-open `B`. Both measures
//! put all of their mass on the finite combined support `S`, so only
//! `B ∩ S` matters. Every Scott-open set is up-closed under `⊆`, so `B ∩ S`
//! is an up-set of the poset `(S, ⊆)`. Conversely, for an up-set `U` of
//! `(S, ⊆)` the union of basic opens `⋃_{u∈U} B_u` is Scott-open and meets
//! `S` in exactly `U`. Hence it suffices to compare the two measures on the
//! up-sets of the support poset, which is what [`leq`] enumerates.

use super::dist::Dist;
use super::weight::Weight;
use crate::error::{Error, Result};
use crate::model::HistSet;

pub const DEFAULT_SUPPORT_BOUND: usize = 20;

pub fn leq<W: Weight>(mu: &Dist<W>, nu: &Dist<W>) -> Result<bool> {
    leq_bounded(mu, nu, DEFAULT_SUPPORT_BOUND)
}

/// [`leq`] with an explicit bound on the combined support size.
pub fn leq_bounded<W: Weight>(mu: &Dist<W>, nu: &Dist<W>, bound: usize) -> Result<bool> {
    let points = combined_support(mu, nu);
    let n = points.len();
    if n > bound.min(64) {
        return Err(Error::Capacity {
            what: "combined support size",
            got: n,
            bound: bound.min(64),
        });
    }
    // slack[i] = ν(s_i) − μ(s_i); a violating up-set has negative total slack.
    let slack: Vec<W> = points
        .iter()
        .map(|s| nu.weight(s).sub(&mu.weight(s)))
        .collect();

    // Decide larger sets first so every strict superset of an element is
    // already decided when the element is reached.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| points[j].len().cmp(&points[i].len()).then(j.cmp(&i)));
    let supersets: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && points[i].is_subset(&points[j]))
                .fold(0u64, |m, j| m | (1 << j))
        })
        .collect();
    // Most negative total any completion could still add.
    let mut remaining_neg = vec![W::zero(); n + 1];
    for k in (0..n).rev() {
        let s = &slack[order[k]];
        remaining_neg[k] = if *s < W::zero() {
            remaining_neg[k + 1].add(s)
        } else {
            remaining_neg[k + 1].clone()
        };
    }

    let search = UpsetSearch {
        order: &order,
        supersets: &supersets,
        slack: &slack,
        remaining_neg: &remaining_neg,
    };
    Ok(!search.violation(0, 0, &W::zero()))
}

struct UpsetSearch<'a, W> {
    order: &'a [usize],
    supersets: &'a [u64],
    slack: &'a [W],
    remaining_neg: &'a [W],
}

impl<W: Weight> UpsetSearch<'_, W> {
    /// Whether some up-set extending the partial choice `chosen` has
    /// negative total slack.
    fn violation(&self, k: usize, chosen: u64, sum: &W) -> bool {
        if sum.add(&self.remaining_neg[k]) >= W::zero() {
            return false;
        }
        if k == self.order.len() {
            return *sum < W::zero();
        }
        let i = self.order[k];
        let can_include = self.supersets[i] & !chosen == 0;
        if can_include && self.violation(k + 1, chosen | (1 << i), &sum.add(&self.slack[i])) {
            return true;
        }
        self.violation(k + 1, chosen, sum)
    }
}

pub(crate) fn combined_support<W: Weight>(mu: &Dist<W>, nu: &Dist<W>) -> Vec<HistSet> {
    let mut points: Vec<HistSet> = mu.support().chain(nu.support()).cloned().collect();
    points.sort();
    points.dedup();
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FieldSchema, History, Packet};
    use crate::prob::weight::{ratio, Rational};

    fn sets() -> (HistSet, HistSet, HistSet) {
        let s = FieldSchema::from_ranges(&[("sw", 0, 3), ("pt", 0, 0)]).unwrap();
        let h = |sw| History::singleton(&Packet::from_pairs(&s, &[("sw", sw)]).unwrap());
        (
            HistSet::singleton(h(0)),
            HistSet::singleton(h(1)),
            HistSet::from_histories(vec![h(0), h(1)]),
        )
    }

    #[test]
    fn bottom_and_top() {
        let (a, b, ab) = sets();
        let mu: Dist<Rational> = Dist::from_weights([(a.clone(), ratio(1, 3)), (b, ratio(2, 3))]).unwrap();
        assert!(leq(&Dist::dirac(HistSet::empty()), &mu).unwrap());
        assert!(leq(&mu, &Dist::dirac(ab.clone())).unwrap());
        assert!(!leq(&Dist::dirac(ab), &mu).unwrap());
    }

    #[test]
    fn incomparable_point_masses() {
        let (a, b, _) = sets();
        let (da, db): (Dist, Dist) = (Dist::dirac(a), Dist::dirac(b));
        assert!(!leq(&da, &db).unwrap());
        assert!(!leq(&db, &da).unwrap());
        assert!(leq(&da, &da).unwrap());
    }

    #[test]
    fn capacity_error() {
        let (a, b, ab) = sets();
        let mu: Dist = Dist::from_weights([(a, ratio(1, 3)), (b, ratio(2, 3))]).unwrap();
        let nu: Dist = Dist::dirac(ab);
        assert!(matches!(leq_bounded(&mu, &nu, 2), Err(Error::Capacity { .. })));
    }
}
