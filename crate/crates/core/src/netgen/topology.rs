use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::prob::{format_rational, parse_probability, Rational};

/// A switch port: switch index (declaration order) and port number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub sw: usize,
    pub pt: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Host {
    pub id: String,
    pub at: Endpoint,
}

/// A bidirectional link with an independent per-traversal drop
/// probability for each direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub a: Endpoint,
    pub b: Endpoint,
    pub fail_ab: Rational,
    pub fail_ba: Rational,
}

/// One direction of a link. Ordered by `(from.sw, from.pt, to.sw, to.pt)`,
/// which is the canonical order used for tie-breaking in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedLink {
    pub from: Endpoint,
    pub to: Endpoint,
}

/// Switches, host attachment points and links.
///
/// Switch `i` (0-based declaration index) is encoded in packets as
/// `sw = i + 1`; host `j` as `src`/`dst` value `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    switches: Vec<String>,
    hosts: Vec<Host>,
    links: Vec<Link>,
}

impl Topology {
    pub fn new(switches: Vec<String>, hosts: Vec<Host>, links: Vec<Link>) -> Result<Self> {
        let topo = Topology {
            switches,
            hosts,
            links,
        };
        topo.validate()?;
        Ok(topo)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (i, s) in self.switches.iter().enumerate() {
            if seen.insert(s.as_str(), i).is_some() {
                return Err(Error::Topology(format!("duplicate switch `{s}`")));
            }
        }
        let mut ids = HashMap::new();
        for h in &self.hosts {
            if ids.insert(h.id.as_str(), ()).is_some() {
                return Err(Error::Topology(format!("duplicate host `{}`", h.id)));
            }
        }
        let mut used: HashMap<Endpoint, String> = HashMap::new();
        let mut claim = |e: Endpoint, what: String| -> Result<()> {
            if e.sw >= self.switches.len() {
                return Err(Error::Topology(format!("{what} refers to an unknown switch")));
            }
            if let Some(prev) = used.insert(e, what.clone()) {
                return Err(Error::Topology(format!(
                    "port {} is used by both {prev} and {what}",
                    self.endpoint_name(e)
                )));
            }
            Ok(())
        };
        for h in &self.hosts {
            claim(h.at, format!("host `{}`", h.id))?;
        }
        for (i, l) in self.links.iter().enumerate() {
            if l.a.sw == l.b.sw {
                return Err(Error::Topology(format!("link {i} is a self-loop")));
            }
            for f in [&l.fail_ab, &l.fail_ba] {
                if *f < Rational::zero() || *f > Rational::one() {
                    return Err(Error::Topology(format!("link {i}: failure probability outside [0, 1]")));
                }
            }
            claim(l.a, format!("link {i}"))?;
            claim(l.b, format!("link {i}"))?;
        }
        Ok(())
    }

    /// Parses the JSON topology format:
    ///
    /// ```json
    /// {"switches": ["S1", "S2"],
    ///  "hosts": [{"id": "h1", "sw": "S1", "pt": 1}],
    ///  "links": [{"a": ["S1", 2], "b": ["S2", 1], "fail": "1/10"}]}
    /// ```
    ///
    /// `fail` applies to both directions; `fail_ab` / `fail_ba` override
    /// one direction (`a → b` or `b → a`).
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let switches: Vec<String> = v
            .get("switches")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Topology("missing `switches` array".into()))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Topology("switch ids must be strings".into()))
            })
            .collect::<Result<_>>()?;
        let index: HashMap<&str, usize> = switches.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let sw_of = |name: &Value| -> Result<usize> {
            let name = name
                .as_str()
                .ok_or_else(|| Error::Topology("switch references must be strings".into()))?;
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Topology(format!("unknown switch `{name}`")))
        };
        let port = |v: Option<&Value>| -> Result<u32> {
            v.and_then(Value::as_u64)
                .and_then(|p| u32::try_from(p).ok())
                .ok_or_else(|| Error::Topology("ports must be natural numbers".into()))
        };

        let mut hosts = Vec::new();
        for h in v.get("hosts").and_then(Value::as_array).into_iter().flatten() {
            let id = h
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Topology("host without string `id`".into()))?;
            let sw = sw_of(h.get("sw").unwrap_or(&Value::Null))?;
            hosts.push(Host {
                id: id.to_string(),
                at: Endpoint {
                    sw,
                    pt: port(h.get("pt"))?,
                },
            });
        }

        let mut links = Vec::new();
        for l in v.get("links").and_then(Value::as_array).into_iter().flatten() {
            let end = |key: &str| -> Result<Endpoint> {
                let pair = l
                    .get(key)
                    .and_then(Value::as_array)
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::Topology(format!("link endpoint `{key}` must be [switch, port]")))?;
                Ok(Endpoint {
                    sw: sw_of(&pair[0])?,
                    pt: port(pair.get(1))?,
                })
            };
            let prob = |key: &str| -> Result<Option<Rational>> {
                match l.get(key) {
                    None | Some(Value::Null) => Ok(None),
                    Some(Value::String(s)) => parse_probability(s).map(Some),
                    Some(Value::Number(n)) => parse_probability(&n.to_string()).map(Some),
                    Some(_) => Err(Error::Topology(format!("`{key}` must be a probability"))),
                }
            };
            let both = prob("fail")?.unwrap_or_else(Rational::zero);
            links.push(Link {
                a: end("a")?,
                b: end("b")?,
                fail_ab: prob("fail_ab")?.unwrap_or_else(|| both.clone()),
                fail_ba: prob("fail_ba")?.unwrap_or(both),
            });
        }
        Topology::new(switches, hosts, links)
    }

    pub fn switches(&self) -> &[String] {
        &self.switches
    }

    pub fn hosts(&self) -> &[Host] {
        &self.hosts
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn switch_index(&self, name: &str) -> Result<usize> {
        self.switches
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Topology(format!("unknown switch `{name}`")))
    }

    pub fn host_index(&self, id: &str) -> Result<usize> {
        self.hosts
            .iter()
            .position(|h| h.id == id)
            .ok_or_else(|| Error::Topology(format!("unknown host `{id}`")))
    }

    /// Largest port number in use.
    pub fn max_port(&self) -> u32 {
        self.hosts
            .iter()
            .map(|h| h.at.pt)
            .chain(self.links.iter().flat_map(|l| [l.a.pt, l.b.pt]))
            .max()
            .unwrap_or(0)
    }

    /// Both directions of every link, in canonical order.
    pub fn directed_links(&self) -> Vec<DirectedLink> {
        let mut out: Vec<DirectedLink> = self
            .links
            .iter()
            .flat_map(|l| {
                [
                    DirectedLink { from: l.a, to: l.b },
                    DirectedLink { from: l.b, to: l.a },
                ]
            })
            .collect();
        out.sort();
        out
    }

    /// Finds the directed link from switch `from` to switch `to`
    /// (lowest port pair if there are several).
    pub fn directed_link(&self, from: &str, to: &str) -> Result<DirectedLink> {
        let (f, t) = (self.switch_index(from)?, self.switch_index(to)?);
        self.directed_links()
            .into_iter()
            .find(|d| d.from.sw == f && d.to.sw == t)
            .ok_or_else(|| Error::Topology(format!("no link from `{from}` to `{to}`")))
    }

    /// Sets the drop probability of traffic sent from `from` to `to`.
    pub fn set_failure(&mut self, from: &str, to: &str, prob: Rational) -> Result<()> {
        let (f, t) = (self.switch_index(from)?, self.switch_index(to)?);
        let mut found = false;
        for l in &mut self.links {
            if l.a.sw == f && l.b.sw == t {
                l.fail_ab = prob.clone();
                found = true;
            } else if l.b.sw == f && l.a.sw == t {
                l.fail_ba = prob.clone();
                found = true;
            }
        }
        if !found {
            return Err(Error::Topology(format!("no link from `{from}` to `{to}`")));
        }
        self.validate()
    }

    /// Neighbouring switches of `sw` in declaration order, each with the
    /// local port of the first (lowest-port) link reaching it.
    pub fn neighbors(&self, sw: usize) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = self
            .directed_links()
            .into_iter()
            .filter(|d| d.from.sw == sw)
            .map(|d| (d.to.sw, d.from.pt))
            .collect();
        out.sort();
        out.dedup_by_key(|(n, _)| *n);
        out
    }

    /// Adjacency lists of the switch graph, neighbours sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.switches.len())
            .map(|s| self.neighbors(s).into_iter().map(|(n, _)| n).collect())
            .collect()
    }

    pub fn endpoint_name(&self, e: Endpoint) -> String {
        format!("{}:{}", self.switches.get(e.sw).map_or("?", String::as_str), e.pt)
    }

    pub fn link_name(&self, d: &DirectedLink) -> String {
        format!("{}->{}", self.endpoint_name(d.from), self.endpoint_name(d.to))
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} <-> {}:{} (drop {} / {})",
            self.a.sw,
            self.a.pt,
            self.b.sw,
            self.b.pt,
            format_rational(&self.fail_ab),
            format_rational(&self.fail_ba)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ratio;

    const SMALL: &str = r#"{
        "switches": ["A", "B", "C"],
        "hosts": [{"id": "x", "sw": "A", "pt": 1}, {"id": "y", "sw": "C", "pt": 1}],
        "links": [
            {"a": ["A", 2], "b": ["B", 1]},
            {"a": ["B", 2], "b": ["C", 2], "fail": "1/10", "fail_ba": 0.5}
        ]
    }"#;

    #[test]
    fn parses_and_indexes() {
        let t = Topology::from_json(SMALL).unwrap();
        assert_eq!(t.switches().len(), 3);
        assert_eq!(t.max_port(), 2);
        assert_eq!(t.links()[1].fail_ab, ratio(1, 10));
        assert_eq!(t.links()[1].fail_ba, ratio(1, 2));
        assert_eq!(t.neighbors(1), vec![(0, 1), (2, 2)]);
        let d = t.directed_link("B", "C").unwrap();
        assert_eq!(t.link_name(&d), "B:2->C:2");
        assert_eq!(t.directed_links().len(), 4);
    }

    #[test]
    fn rejects_port_collisions_and_unknown_names() {
        let clash = SMALL.replace(r#""pt": 1}, {"id": "y""#, r#""pt": 2}, {"id": "y""#);
        assert!(matches!(Topology::from_json(&clash), Err(Error::Topology(_))));
        let unknown = SMALL.replace(r#"["A", 2]"#, r#"["Z", 2]"#);
        assert!(Topology::from_json(&unknown).is_err());
        let bad_prob = SMALL.replace(r#""1/10""#, r#""3/2""#);
        assert!(Topology::from_json(&bad_prob).is_err());
    }

    #[test]
    fn directional_failure() {
        let mut t = Topology::from_json(SMALL).unwrap();
        t.set_failure("B", "A", ratio(1, 1)).unwrap();
        assert_eq!(t.links()[0].fail_ba, ratio(1, 1));
        assert_eq!(t.links()[0].fail_ab, ratio(0, 1));
        assert!(t.set_failure("A", "C", ratio(1, 1)).is_err());
    }
}
