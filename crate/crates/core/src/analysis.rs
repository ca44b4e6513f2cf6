//! Random variables on history sets, their expectations under network
//! output distributions, and the convergence driver over the iteration
//! bound `n`.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use log::info;
use serde_json::{json, Value};

use crate::dsl::Program;
use crate::error::{Error, Result};
use crate::model::{FieldSchema, HistSet, History};
use crate::netgen::{DirectedLink, Endpoint, NetworkModel, RoutingScheme, Topology, TrafficMatrix};
use crate::prob::{format_rational, Dist, Extended, Rational, Weight};
use crate::semantics::{deterministic_filter, Compiled};

/// Field positions of `sw` and `pt`.
#[derive(Debug, Clone, Copy)]
struct Locator {
    sw: usize,
    pt: usize,
}

impl Locator {
    fn new(schema: &FieldSchema) -> Self {
        Locator {
            sw: schema.index_of("sw").expect("schemas always have `sw`"),
            pt: schema.index_of("pt").expect("schemas always have `pt`"),
        }
    }

    fn is_at(&self, entry: &[u32], e: Endpoint) -> bool {
        entry[self.sw] as usize == e.sw + 1 && entry[self.pt] == e.pt
    }
}

fn traversals(loc: Locator, link: &DirectedLink, h: &History) -> usize {
    // Tail entries run from most recent to oldest, so in each adjacent
    // pair the second one is the earlier record.
    let tail: Vec<&[u32]> = h.tail().collect();
    tail.windows(2)
        .filter(|w| loc.is_at(w[1], link.from) && loc.is_at(w[0], link.to))
        .count()
}

/// `#_l` summed over the set: the number of logged traversals of the
/// directed link `l`.
pub fn link_congestion(schema: &FieldSchema, link: &DirectedLink, a: &HistSet) -> usize {
    let loc = Locator::new(schema);
    a.iter().map(|h| traversals(loc, link, h)).sum()
}

/// Average of `|h|/2 + 1` (integer division) over the histories of `a`;
/// zero for the empty set.
pub fn mean_latency(a: &HistSet) -> Rational {
    if a.is_empty() {
        return Rational::zero();
    }
    let total: usize = a.iter().map(|h| h.len() / 2 + 1).sum();
    Rational::new(total.into(), a.len().into())
}

/// Number of histories of `a` satisfying the predicate `out`.
pub fn throughput(schema: &FieldSchema, a: &HistSet, out: &Program) -> Result<usize> {
    Ok(deterministic_filter(schema, out, a)?.len())
}

/// Whether some history logged the same `(sw, pt)` location twice.
pub fn loop_check(schema: &FieldSchema, a: &HistSet) -> bool {
    let loc = Locator::new(schema);
    a.iter().any(|h| {
        let mut seen = HashSet::new();
        h.tail().any(|e| !seen.insert((e[loc.sw], e[loc.pt])))
    })
}

type QueryImpl = dyn Fn(&HistSet) -> Extended<Rational> + Send + Sync;

/// A named random variable `Q : 2^H → [0, ∞]`.
#[derive(Clone)]
pub struct QueryFn {
    pub name: String,
    /// Declared Scott-continuity; see [`QueryFn::monotonicity_witness`].
    pub scott_continuous: bool,
    f: Arc<QueryImpl>,
}

impl fmt::Debug for QueryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QueryFn")
            .field("name", &self.name)
            .field("scott_continuous", &self.scott_continuous)
            .finish()
    }
}

impl QueryFn {
    pub fn new(
        name: &str,
        scott_continuous: bool,
        f: impl Fn(&HistSet) -> Extended<Rational> + Send + Sync + 'static,
    ) -> Self {
        QueryFn {
            name: name.to_string(),
            scott_continuous,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, a: &HistSet) -> Extended<Rational> {
        (self.f)(a)
    }

    /// `E[Q](ν)`.
    pub fn expectation<W: Weight>(&self, nu: &Dist<W>) -> Extended<W> {
        nu.expectation(|a| match self.eval(a) {
            Extended::Finite(r) => Extended::Finite(W::from_rational(&r)),
            Extended::Infinite => Extended::Infinite,
        })
    }

    /// A pair `(a, b)` from `samples` with `a ⊆ b` but `Q(a) > Q(b)`.
    /// Scott-continuous functions are monotone, so a witness refutes a
    /// continuity declaration.
    pub fn monotonicity_witness(&self, samples: &[HistSet]) -> Option<(HistSet, HistSet)> {
        for a in samples {
            for b in samples {
                if a.is_subset(b) && self.eval(a) > self.eval(b) {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
        None
    }

    /// Accepts the declaration unless it claims continuity and the
    /// samples show a monotonicity violation.
    pub fn check_declaration(&self, samples: &[HistSet]) -> bool {
        !self.scott_continuous || self.monotonicity_witness(samples).is_none()
    }
}

/// `|a|`.
pub fn cardinality() -> QueryFn {
    QueryFn::new("cardinality", true, |a| Extended::Finite(<Rational as Weight>::from_count(a.len())))
}

/// `2^-k` where `k` is the length of the shortest history over `schema`
/// that is missing from `a`. Antitone, hence not Scott-continuous; it is
/// declared continuous here only so the spot check has something to
/// reject.
pub fn smallest_missing_length(schema: &FieldSchema) -> QueryFn {
    let packets: u128 = schema
        .fields()
        .iter()
        .map(|f| (f.max - f.min) as u128 + 1)
        .fold(1u128, |acc, n| acc.saturating_mul(n));
    QueryFn::new("smallest-missing", true, move |a| {
        let mut k = 1usize;
        let mut per_length = packets;
        loop {
            let present = a.iter().filter(|h| h.len() == k).count() as u128;
            if present < per_length {
                break;
            }
            k += 1;
            per_length = per_length.saturating_mul(packets);
        }
        let mut r = Rational::one();
        for _ in 0..k {
            r /= Rational::from_integer(2.into());
        }
        Extended::Finite(r)
    })
}

/// The case-study queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Query {
    /// Maximum over directed links of expected traversals, in demand units.
    MaxCongestion,
    /// Expected fraction of the demand delivered.
    Throughput,
    /// Expected mean path length of delivered histories.
    Latency,
    /// Probability that some history revisits a location.
    Loops,
}

impl Query {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "maxcong" => Ok(Query::MaxCongestion),
            "throughput" => Ok(Query::Throughput),
            "latency" => Ok(Query::Latency),
            "loops" => Ok(Query::Loops),
            _ => Err(Error::Format(format!(
                "unknown query `{s}` (expected maxcong, throughput, latency or loops)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Query::MaxCongestion => "maxcong",
            Query::Throughput => "throughput",
            Query::Latency => "latency",
            Query::Loops => "loops",
        }
    }

    /// Whether the underlying random variable is Scott-continuous, so
    /// that its convergence series must be nondecreasing.
    pub fn scott_continuous(self) -> bool {
        !matches!(self, Query::Latency)
    }

    /// `(with_dup, keep_out)` of the network model the query is
    /// evaluated on.
    fn model_kind(self) -> (bool, bool) {
        match self {
            Query::Throughput => (false, true),
            Query::MaxCongestion | Query::Latency => (true, true),
            Query::Loops => (true, false),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expected traversals of every directed link, scaled by `scale`.
pub fn expected_link_loads<W: Weight>(
    schema: &FieldSchema,
    links: &[DirectedLink],
    nu: &Dist<W>,
    scale: &W,
) -> Vec<W> {
    let loc = Locator::new(schema);
    let mut loads = vec![W::zero(); links.len()];
    for (a, w) in nu.iter() {
        for (i, l) in links.iter().enumerate() {
            let c: usize = a.iter().map(|h| traversals(loc, l, h)).sum();
            if c > 0 {
                loads[i] = loads[i].add(&w.mul(&W::from_count(c)));
            }
        }
    }
    loads.into_iter().map(|x| x.mul(scale)).collect()
}

/// The most loaded directed link; ties go to the first link in canonical
/// order.
fn argmax<W: Weight>(links: &[DirectedLink], loads: &[W]) -> Option<(DirectedLink, W)> {
    let mut best: Option<(DirectedLink, W)> = None;
    for (l, v) in links.iter().zip(loads) {
        if best.as_ref().is_none_or(|(_, b)| v > b) {
            best = Some((*l, v.clone()));
        }
    }
    best
}

/// Evaluates `model`'s network program at bound `n` on the traffic input.
pub fn network_output<W: Weight>(
    model: &NetworkModel,
    input: &Dist<W>,
    n: u32,
    keep_out: bool,
) -> Result<Dist<W>> {
    let program = model.network_program(n, keep_out);
    Ok(Compiled::new(model.schema(), &program)?.eval_dist(input))
}

/// `(argmax link, aggregate · E[#_l](ν_n))` maximized over directed links.
pub fn max_congestion(
    topo: &Topology,
    scheme: &RoutingScheme,
    tm: &TrafficMatrix,
    n: u32,
) -> Result<(DirectedLink, Rational)> {
    let model = NetworkModel::new(topo, scheme, true)?;
    let nu = network_output(&model, &model.traffic_input(tm)?, n, true)?;
    let links = topo.directed_links();
    let loads = expected_link_loads(model.schema(), &links, &nu, &tm.aggregate());
    argmax(&links, &loads).ok_or_else(|| Error::Topology("topology has no links".into()))
}

/// Delivered demand and its fraction of the aggregate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Throughput {
    pub delivered: Rational,
    pub fraction: Rational,
}

pub fn delivered_throughput(
    topo: &Topology,
    scheme: &RoutingScheme,
    tm: &TrafficMatrix,
    n: u32,
) -> Result<Throughput> {
    let model = NetworkModel::new(topo, scheme, false)?;
    let nu = network_output(&model, &model.traffic_input(tm)?, n, true)?;
    let out = crate::netgen::edge_predicate(topo);
    let out = Compiled::new(model.schema(), &out)?;
    let fraction = nu.expectation(|a| {
        let c = out.apply_deterministic(a).expect("predicate").len();
        Extended::Finite(<Rational as Weight>::from_count(c))
    });
    let fraction = fraction.finite().cloned().expect("counts are finite");
    Ok(Throughput {
        delivered: &fraction * tm.aggregate(),
        fraction,
    })
}

/// One value of a convergence series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub n: u32,
    /// Exact value; `None` in floating mode.
    pub exact: Option<Rational>,
    pub float: f64,
}

/// `E[Q](ν_n)` for `n = 0, 1, …` until stabilization or the bound.
#[derive(Debug, Clone)]
pub struct ConvergenceSeries {
    pub query: String,
    pub rows: Vec<SeriesRow>,
    pub stabilized: bool,
    /// First `n` of the final run of equal values, when stabilized.
    pub stabilized_at: Option<u32>,
    /// Equality tolerance: zero in exact mode.
    pub tolerance: f64,
    pub scott_continuous: bool,
    /// Most loaded link at the last row, for congestion queries.
    pub argmax_link: Option<DirectedLink>,
}

impl ConvergenceSeries {
    fn new(query: &str, scott_continuous: bool, tolerance: f64) -> Self {
        ConvergenceSeries {
            query: query.to_string(),
            rows: Vec::new(),
            stabilized: false,
            stabilized_at: None,
            tolerance,
            scott_continuous,
            argmax_link: None,
        }
    }

    fn same(&self, a: &SeriesRow, b: &SeriesRow) -> bool {
        match (&a.exact, &b.exact) {
            (Some(x), Some(y)) => x == y,
            _ => (a.float - b.float).abs() <= self.tolerance,
        }
    }

    fn push(&mut self, row: SeriesRow, window: usize, min_n: u32) {
        let n = row.n;
        self.rows.push(row);
        let window = window.max(2);
        let k = self.rows.len();
        if k >= window && n >= min_n {
            let tail = &self.rows[k - window..];
            if tail.windows(2).all(|w| self.same(&w[0], &w[1])) {
                self.stabilized = true;
                let mut start = k - window;
                while start > 0 && self.same(&self.rows[start - 1], &self.rows[start]) {
                    start -= 1;
                }
                self.stabilized_at = Some(self.rows[start].n);
            }
        }
    }

    pub fn last(&self) -> Option<&SeriesRow> {
        self.rows.last()
    }

    /// Whether consecutive values never decrease by more than `tol`
    /// (exact comparison when both rows are exact).
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| match (&w[0].exact, &w[1].exact) {
            (Some(a), Some(b)) => a <= b,
            _ => w[1].float >= w[0].float - tol,
        })
    }

    /// Whether every step strictly increases.
    pub fn is_strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| match (&w[0].exact, &w[1].exact) {
            (Some(a), Some(b)) => a < b,
            _ => w[1].float > w[0].float,
        })
    }
}

/// Options of [`converge`].
#[derive(Debug, Clone)]
pub struct ConvergeOptions {
    pub n_max: u32,
    /// Number of consecutive equal values that counts as stabilized.
    pub window: usize,
    /// Use `f64` weights instead of exact rationals.
    pub float: bool,
    /// No series counts as stabilized before this bound. Defaults to the
    /// number of switches, so that a run of zeros before traffic reaches
    /// its first link or loop is not mistaken for the limit.
    pub min_n: Option<u32>,
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        ConvergeOptions {
            n_max: 16,
            window: 2,
            float: false,
            min_n: None,
        }
    }
}

pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Runs every query for `n = 0..=n_max`, stopping once all series have
/// stabilized.
pub fn converge(
    topo: &Topology,
    scheme: &RoutingScheme,
    tm: &TrafficMatrix,
    queries: &[Query],
    opts: &ConvergeOptions,
) -> Result<Vec<ConvergenceSeries>> {
    if opts.float {
        converge_in::<f64>(topo, scheme, tm, queries, opts)
    } else {
        converge_in::<Rational>(topo, scheme, tm, queries, opts)
    }
}

fn to_row<W: Weight>(n: u32, v: &W) -> SeriesRow {
    SeriesRow {
        n,
        exact: v.as_rational(),
        float: v.to_f64(),
    }
}

fn converge_in<W: Weight>(
    topo: &Topology,
    scheme: &RoutingScheme,
    tm: &TrafficMatrix,
    queries: &[Query],
    opts: &ConvergeOptions,
) -> Result<Vec<ConvergenceSeries>> {
    let tolerance = if W::is_exact() { 0.0 } else { FLOAT_TOLERANCE };
    let mut series: Vec<ConvergenceSeries> = queries
        .iter()
        .map(|q| ConvergenceSeries::new(q.name(), q.scott_continuous(), tolerance))
        .collect();

    let mut models: Vec<((bool, bool), NetworkModel, Dist<W>)> = Vec::new();
    for q in queries {
        let kind = q.model_kind();
        if models.iter().all(|(k, _, _)| k.0 != kind.0) {
            let m = NetworkModel::new(topo, scheme, kind.0)?;
            let input = to_weight(&m.traffic_input(tm)?);
            models.push((kind, m, input));
        }
    }
    let aggregate = W::from_rational(&tm.aggregate());
    let links = topo.directed_links();
    let out = crate::netgen::edge_predicate(topo);
    let min_n = opts.min_n.unwrap_or(topo.switches().len() as u32);

    for n in 0..=opts.n_max {
        let mut outputs: Vec<((bool, bool), Dist<W>)> = Vec::new();
        for (qi, q) in queries.iter().enumerate() {
            if series[qi].stabilized {
                continue;
            }
            let kind = q.model_kind();
            if !outputs.iter().any(|(k, _)| *k == kind) {
                let (_, model, input) = models.iter().find(|(k, _, _)| k.0 == kind.0).expect("model built");
                outputs.push((kind, network_output(model, input, n, kind.1)?));
            }
            let nu = &outputs.iter().find(|(k, _)| *k == kind).expect("evaluated").1;
            let schema = models.iter().find(|(k, _, _)| k.0 == kind.0).expect("model built").1.schema();
            let value = match q {
                Query::MaxCongestion => {
                    let loads = expected_link_loads(schema, &links, nu, &aggregate);
                    let (link, v) = argmax(&links, &loads).unwrap_or((
                        DirectedLink {
                            from: Endpoint { sw: 0, pt: 0 },
                            to: Endpoint { sw: 0, pt: 0 },
                        },
                        W::zero(),
                    ));
                    series[qi].argmax_link = Some(link);
                    v
                }
                Query::Throughput => {
                    let out = Compiled::new(schema, &out)?;
                    finite(nu.expectation(|a| {
                        let c = out.apply_deterministic(a).expect("predicate").len();
                        Extended::Finite(W::from_count(c))
                    }))
                }
                Query::Latency => finite(nu.expectation(|a| Extended::Finite(W::from_rational(&mean_latency(a))))),
                Query::Loops => nu.probability(|a| loop_check(schema, a)),
            };
            info!("{} n={n}: {}", q.name(), value.to_prob_string());
            series[qi].push(to_row(n, &value), opts.window, min_n);
        }
        if series.iter().all(|s| s.stabilized) {
            break;
        }
    }
    Ok(series)
}

fn finite<W: Weight>(e: Extended<W>) -> W {
    e.finite().cloned().expect("case-study queries are finite")
}

fn to_weight<W: Weight>(d: &Dist) -> Dist<W> {
    Dist::from_weights(d.iter().map(|(a, w)| (a.clone(), W::from_rational(w))))
        .expect("conversion preserves total mass")
}

/// Writes one CSV file per series: `n,query,value_num,value_den,value_float,stabilized`.
pub fn write_series_csv(series: &ConvergenceSeries, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "query", "value_num", "value_den", "value_float", "stabilized"])?;
    for row in &series.rows {
        let (num, den) = match &row.exact {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let stable = series.stabilized_at.is_some_and(|s| row.n >= s);
        w.write_record([
            row.n.to_string(),
            series.query.clone(),
            num,
            den,
            format!("{}", row.float),
            stable.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// JSON summary of a set of series.
pub fn summary_json(topo: &Topology, scheme: &RoutingScheme, opts: &ConvergeOptions, series: &[ConvergenceSeries]) -> Value {
    let queries: Vec<Value> = series
        .iter()
        .map(|s| {
            let last = s.last();
            let mut v = json!({
                "query": s.query,
                "final": last.and_then(|r| r.exact.as_ref()).map(format_rational),
                "final_float": last.map(|r| r.float),
                "rows": s.rows.len(),
                "stabilized": s.stabilized,
                "stabilized_at": s.stabilized_at,
                "scott_continuous": s.scott_continuous,
                "nondecreasing": s.is_nondecreasing(s.tolerance),
            });
            if let Some(l) = &s.argmax_link {
                v["argmax_link"] = json!(topo.link_name(l));
            }
            v
        })
        .collect();
    json!({
        "scheme": scheme.to_string(),
        "n_max": opts.n_max,
        "window": opts.window,
        "min_n": opts.min_n,
        "mode": if opts.float { "float" } else { "exact" },
        "queries": queries,
    })
}

/// Writes `<query>.csv` for every series and `summary.json` into `dir`.
pub fn write_reports(
    dir: &Path,
    topo: &Topology,
    scheme: &RoutingScheme,
    opts: &ConvergeOptions,
    series: &[ConvergenceSeries],
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for s in series {
        write_series_csv(s, &dir.join(format!("{}.csv", s.query)))?;
    }
    let path = dir.join("summary.json");
    let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let text = serde_json::to_string_pretty(&summary_json(topo, scheme, opts, series))?;
    writeln!(f, "{text}").map_err(|e| Error::io(&path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Packet;
    use crate::prob::ratio;

    fn schema() -> FieldSchema {
        FieldSchema::from_ranges(&[("sw", 0, 4), ("pt", 0, 4)]).unwrap()
    }

    fn hist(s: &FieldSchema, locs: &[(u32, u32)]) -> History {
        let ps: Vec<Packet> = locs
            .iter()
            .map(|&(sw, pt)| Packet::from_pairs(s, &[("sw", sw), ("pt", pt)]).unwrap())
            .collect();
        History::new(&ps).unwrap()
    }

    fn link() -> DirectedLink {
        DirectedLink {
            from: Endpoint { sw: 0, pt: 2 },
            to: Endpoint { sw: 1, pt: 1 },
        }
    }

    #[test]
    fn congestion_counts_logged_traversals() {
        let s = schema();
        assert_eq!(link_congestion(&s, &link(), &HistSet::empty()), 0);
        // head, then (S2,1) logged after (S1,2)
        let once = hist(&s, &[(2, 3), (2, 1), (1, 2), (1, 1)]);
        assert_eq!(link_congestion(&s, &link(), &HistSet::singleton(once.clone())), 1);
        // the reverse direction does not count
        let back = hist(&s, &[(1, 2), (1, 2), (2, 1)]);
        assert_eq!(link_congestion(&s, &link(), &HistSet::singleton(back)), 0);
        // the head is not a logged record
        let head_only = hist(&s, &[(2, 1), (1, 2)]);
        assert_eq!(link_congestion(&s, &link(), &HistSet::singleton(head_only)), 0);
    }

    #[test]
    fn latency_values() {
        let s = schema();
        assert_eq!(mean_latency(&HistSet::empty()), ratio(0, 1));
        assert_eq!(mean_latency(&HistSet::singleton(hist(&s, &[(1, 1)]))), ratio(1, 1));
        assert_eq!(mean_latency(&HistSet::singleton(hist(&s, &[(1, 1), (1, 1), (1, 1)]))), ratio(2, 1));
        let two: HistSet = [hist(&s, &[(1, 1)]), hist(&s, &[(1, 1), (1, 2), (1, 3)])].into_iter().collect();
        assert_eq!(mean_latency(&two), ratio(3, 2));
    }

    #[test]
    fn loops() {
        let s = schema();
        assert!(!loop_check(&s, &HistSet::singleton(hist(&s, &[(1, 1)]))));
        assert!(!loop_check(&s, &HistSet::singleton(hist(&s, &[(1, 1), (1, 2), (2, 1)]))));
        assert!(loop_check(&s, &HistSet::singleton(hist(&s, &[(1, 1), (1, 2), (2, 1), (1, 2)]))));
    }

    #[test]
    fn throughput_counts_matches() {
        let s = schema();
        let a: HistSet = [hist(&s, &[(1, 1)]), hist(&s, &[(2, 2)]), hist(&s, &[(3, 1)])].into_iter().collect();
        let out = crate::dsl::parse("sw=1; pt=1 & sw=2; pt=2").unwrap();
        assert_eq!(throughput(&s, &a, &out).unwrap(), 2);
        assert!(throughput(&s, &a, &crate::dsl::parse("pt:=1").unwrap()).is_err());
    }

    #[test]
    fn declared_continuity_spot_check() {
        let s = FieldSchema::from_ranges(&[("sw", 0, 1), ("pt", 0, 0)]).unwrap();
        let h0 = hist(&s, &[(0, 0)]);
        let h1 = hist(&s, &[(1, 0)]);
        let samples = vec![
            HistSet::empty(),
            HistSet::singleton(h0.clone()),
            [h0.clone(), h1.clone()].into_iter().collect(),
            [h0.clone(), h1, h0.dup()].into_iter().collect(),
        ];
        assert!(cardinality().check_declaration(&samples));
        let f = smallest_missing_length(&s);
        assert_eq!(f.eval(&HistSet::empty()), Extended::Finite(ratio(1, 2)));
        assert_eq!(f.eval(&samples[2]), Extended::Finite(ratio(1, 4)));
        assert!(!f.check_declaration(&samples));
        let (a, b) = f.monotonicity_witness(&samples).unwrap();
        assert!(a.is_subset(&b));
    }

    #[test]
    fn series_stabilization() {
        let mut s = ConvergenceSeries::new("q", true, 0.0);
        for (n, v) in [(0, 1), (1, 2), (2, 2)] {
            s.push(
                SeriesRow {
                    n,
                    exact: Some(ratio(v, 1)),
                    float: v as f64,
                },
                2,
                0,
            );
        }
        assert!(s.stabilized);
        assert_eq!(s.stabilized_at, Some(1));
        assert!(s.is_nondecreasing(0.0));
        assert!(!s.is_strictly_increasing());
    }
}
