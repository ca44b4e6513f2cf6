use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::weight::{check_probability, parse_probability, Extended, Rational, Weight};
use crate::error::{Error, Result};
use crate::model::{histset_from_json, histset_to_json, FieldSchema, HistSet};

/// A finite discrete probability measure on history sets.
///
/// Weights are strictly positive (zero entries are pruned) and sum to one,
/// so two distributions are equal exactly when their weight maps are.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist<W: Weight = Rational> {
    weights: BTreeMap<HistSet, W>,
}

impl<W: Weight> Dist<W> {
    /// The point mass `δ_a`.
    pub fn dirac(a: HistSet) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(a, W::one());
        Dist { weights }
    }

    /// Builds a distribution, merging repeated sets and pruning zeros.
    pub fn from_weights(entries: impl IntoIterator<Item = (HistSet, W)>) -> Result<Self> {
        let mut weights: BTreeMap<HistSet, W> = BTreeMap::new();
        for (a, w) in entries {
            if w < W::zero() {
                return Err(Error::InvalidDist(format!("negative weight {w:?}")));
            }
            accumulate(&mut weights, a, &w);
        }
        weights.retain(|_, w| !w.is_zero());
        let total = weights.values().fold(W::zero(), |acc, w| acc.add(w));
        if !total.is_unit_total() {
            return Err(Error::InvalidDist(format!(
                "weights sum to {}, not 1",
                total.to_prob_string()
            )));
        }
        Ok(Dist { weights })
    }

    pub(crate) fn from_accumulated(mut weights: BTreeMap<HistSet, W>) -> Self {
        weights.retain(|_, w| !w.is_zero());
        Dist { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Entries in canonical order of their sets.
    pub fn iter(&self) -> impl Iterator<Item = (&HistSet, &W)> {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &HistSet> {
        self.weights.keys()
    }

    /// Weight of the single set `a` (zero when unsupported).
    pub fn weight(&self, a: &HistSet) -> W {
        self.weights.get(a).cloned().unwrap_or_else(W::zero)
    }

    pub fn total(&self) -> W {
        self.weights.values().fold(W::zero(), |acc, w| acc.add(w))
    }

    /// `μ >>= f`: the weight of `b` is `Σ_a μ(a)·f(a)(b)`.
    pub fn bind(&self, mut f: impl FnMut(&HistSet) -> Dist<W>) -> Dist<W> {
        self.try_bind(|a| Ok::<_, std::convert::Infallible>(f(a)))
            .unwrap_or_else(|e| match e {})
    }

    pub fn try_bind<E>(&self, mut f: impl FnMut(&HistSet) -> Result<Dist<W>, E>) -> Result<Dist<W>, E> {
        if self.weights.len() == 1 {
            let (a, w) = self.weights.iter().next().expect("one entry");
            if w.is_unit_total() && W::is_exact() {
                return f(a);
            }
        }
        let mut acc = BTreeMap::new();
        for (a, w) in &self.weights {
            let inner = f(a)?;
            for (b, v) in &inner.weights {
                accumulate(&mut acc, b.clone(), &w.mul(v));
            }
        }
        Ok(Dist::from_accumulated(acc))
    }

    /// Pushforward along a function on sets.
    pub fn map(&self, mut f: impl FnMut(&HistSet) -> HistSet) -> Dist<W> {
        let mut acc = BTreeMap::new();
        for (a, w) in &self.weights {
            accumulate(&mut acc, f(a), w);
        }
        Dist::from_accumulated(acc)
    }

    /// `μ & ν`: the weight of `c` is the total product weight of pairs
    /// `(a, b)` with `a ∪ b = c`.
    pub fn par(&self, other: &Dist<W>) -> Dist<W> {
        if let Some(a) = other.as_point_mass() {
            return self.map(|b| b.union(a));
        }
        if let Some(a) = self.as_point_mass() {
            return other.map(|b| a.union(b));
        }
        let mut acc = BTreeMap::new();
        for (a, w) in &self.weights {
            for (b, v) in &other.weights {
                accumulate(&mut acc, a.union(b), &w.mul(v));
            }
        }
        Dist::from_accumulated(acc)
    }

    /// `r·μ + (1−r)·ν`.
    pub fn convex(r: &Rational, mu: &Dist<W>, nu: &Dist<W>) -> Result<Dist<W>> {
        check_probability(r)?;
        let rw = W::from_rational(r);
        Ok(Self::convex_weight(&rw, mu, nu))
    }

    pub(crate) fn convex_weight(r: &W, mu: &Dist<W>, nu: &Dist<W>) -> Dist<W> {
        let s = W::one().sub(r);
        let mut acc = BTreeMap::new();
        if !r.is_zero() {
            for (a, w) in &mu.weights {
                accumulate(&mut acc, a.clone(), &w.mul(r));
            }
        }
        if !s.is_zero() {
            for (a, w) in &nu.weights {
                accumulate(&mut acc, a.clone(), &w.mul(&s));
            }
        }
        Dist::from_accumulated(acc)
    }

    /// `Σ_a Q(a)·μ(a)`, infinite when any supported set has infinite value.
    pub fn expectation(&self, mut q: impl FnMut(&HistSet) -> Extended<W>) -> Extended<W> {
        let mut total = Extended::zero();
        for (a, w) in &self.weights {
            total = total.add(&q(a).scale(w));
        }
        total
    }

    /// Total weight of the supported sets satisfying `pred`.
    pub fn probability(&self, mut pred: impl FnMut(&HistSet) -> bool) -> W {
        self.weights
            .iter()
            .filter(|(a, _)| pred(a))
            .fold(W::zero(), |acc, (_, w)| acc.add(w))
    }

    pub fn as_point_mass(&self) -> Option<&HistSet> {
        if self.weights.len() == 1 {
            self.weights.keys().next()
        } else {
            None
        }
    }

    /// JSON array of `{"set": [...], "prob": "num/den"}` in canonical order.
    pub fn to_json(&self, schema: &FieldSchema) -> Value {
        Value::Array(
            self.weights
                .iter()
                .map(|(a, w)| json!({"set": histset_to_json(schema, a), "prob": w.to_prob_string()}))
                .collect(),
        )
    }
}

impl Dist<Rational> {
    pub fn from_json(schema: &FieldSchema, v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Format("distribution must be a JSON array".into()))?;
        let mut entries = Vec::with_capacity(arr.len());
        for e in arr {
            let set = histset_from_json(
                schema,
                e.get("set")
                    .ok_or_else(|| Error::Format("distribution entry lacks `set`".into()))?,
            )?;
            let prob = match e.get("prob") {
                Some(Value::String(s)) => parse_probability(s)?,
                Some(Value::Number(n)) => parse_probability(&n.to_string())?,
                _ => return Err(Error::Format("distribution entry lacks `prob`".into())),
            };
            entries.push((set, prob));
        }
        Dist::from_weights(entries)
    }

    /// Converts to floating mode.
    pub fn to_float(&self) -> Dist<f64> {
        Dist {
            weights: self
                .weights
                .iter()
                .map(|(a, w)| (a.clone(), f64::from_rational(w)))
                .collect(),
        }
    }
}

fn accumulate<W: Weight>(acc: &mut BTreeMap<HistSet, W>, key: HistSet, w: &W) {
    match acc.get_mut(&key) {
        Some(v) => *v = v.add(w),
        None => {
            acc.insert(key, w.clone());
        }
    }
}
