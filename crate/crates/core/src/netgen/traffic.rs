use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::topology::Topology;
use crate::error::{Error, Result};
use crate::prob::{parse_rational, Rational};

/// Demands between ordered host pairs. Host indices follow the topology's
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficMatrix {
    demands: BTreeMap<(usize, usize), Rational>,
}

impl TrafficMatrix {
    pub fn new(demands: BTreeMap<(usize, usize), Rational>) -> Result<Self> {
        for (&(u, v), d) in &demands {
            if d.is_negative() {
                return Err(Error::Traffic(format!("negative demand for pair ({u}, {v})")));
            }
            if u == v && !d.is_zero() {
                return Err(Error::Traffic(format!("nonzero demand from host {u} to itself")));
            }
        }
        let tm = TrafficMatrix {
            demands: demands.into_iter().filter(|(_, d)| !d.is_zero()).collect(),
        };
        if tm.aggregate().is_zero() {
            return Err(Error::Traffic("aggregate demand is zero".into()));
        }
        Ok(tm)
    }

    /// The same demand between every ordered pair of distinct hosts.
    pub fn uniform(topo: &Topology, demand: Rational) -> Result<Self> {
        let n = topo.hosts().len();
        TrafficMatrix::new(
            (0..n)
                .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
                .map(|pair| (pair, demand.clone()))
                .collect(),
        )
    }

    /// Reads CSV with header `src,dst,demand`; demands are rationals
    /// (`1/8`) or decimals (`0.125`). Repeated pairs are rejected.
    pub fn from_csv(topo: &Topology, text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["src", "dst", "demand"] {
            return Err(Error::Traffic(format!(
                "expected header `src,dst,demand`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut demands = BTreeMap::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let (src, dst, demand) = (&record[0], &record[1], &record[2]);
            let pair = (topo.host_index(src)?, topo.host_index(dst)?);
            let d = parse_rational(demand)
                .map_err(|e| Error::Traffic(format!("row {}: {e}", line + 2)))?;
            if demands.insert(pair, d).is_some() {
                return Err(Error::Traffic(format!("row {}: repeated pair {src},{dst}", line + 2)));
            }
        }
        TrafficMatrix::new(demands)
    }

    /// Sum of all demands.
    pub fn aggregate(&self) -> Rational {
        self.demands.values().fold(Rational::zero(), |acc, d| acc + d)
    }

    /// Nonzero demands in (src, dst) order.
    pub fn demands(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.demands.iter().map(|(&(u, v), d)| (u, v, d))
    }

    pub fn demand(&self, src: usize, dst: usize) -> Rational {
        self.demands.get(&(src, dst)).cloned().unwrap_or_else(Rational::zero)
    }
}
