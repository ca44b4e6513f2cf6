//! Compilation of topologies, routing schemes, failure models and traffic
//! matrices into programs.
//!
//! A network is modelled as `in; (p;t)^(n); p; out` where `p` is the
//! routing program, `t` the topology program (one guarded rewrite per link
//! direction), and `in` / `out` match the host attachment points. Packets
//! carry the fields `sw`, `pt`, `src`, `dst` and, for tagged-path schemes,
//! `path`.

mod paths;
mod routing;
mod topology;
mod traffic;

pub use paths::{hop_distances, k_shortest_paths, shortest_next_hops, shortest_path};
pub use routing::{
    parse_path_distribution, routing_program, uniform_choice, weighted_choice, Routing, RoutingScheme,
    WeightedPath,
};
pub use topology::{DirectedLink, Endpoint, Host, Link, Topology};
pub use traffic::TrafficMatrix;

use num_traits::{One, Zero};

use crate::dsl::Program;
use crate::error::{Error, Result};
use crate::model::{FieldSchema, HistSet, History, Packet};
use crate::prob::{Dist, Rational};
use routing::{host_value, sw_value};

fn at(e: Endpoint) -> [Program; 2] {
    [
        Program::test("sw", sw_value(e.sw)),
        Program::test("pt", e.pt as u64),
    ]
}

fn move_to(e: Endpoint) -> [Program; 2] {
    [
        Program::modify("sw", sw_value(e.sw)),
        Program::modify("pt", e.pt as u64),
    ]
}

fn direction(from: Endpoint, to: Endpoint, fail: &Rational, with_dup: bool) -> Program {
    let logged = |step: [Program; 2]| {
        let mut v = step.to_vec();
        if with_dup {
            v.push(Program::Dup);
        }
        v
    };
    let mut parts = logged(at(from));
    let hop = logged(move_to(to));
    if fail.is_zero() {
        parts.extend(hop);
    } else {
        parts.push(Program::choice(Rational::one() - fail, Program::seq_all(hop), Program::Drop));
    }
    Program::seq_all(parts)
}

/// Both directions of `link`: `sw=a;pt=p;dup; sw:=b;pt:=q;dup`, with the
/// rewrite wrapped as `(…) ⊕_{1−f} drop` when the direction drops
/// packets with probability `f > 0`.
pub fn link_program(link: &Link, with_dup: bool) -> Program {
    Program::par(
        direction(link.a, link.b, &link.fail_ab, with_dup),
        direction(link.b, link.a, &link.fail_ba, with_dup),
    )
}

/// The topology program `t`: all links in parallel.
pub fn topology_program(topo: &Topology, with_dup: bool) -> Program {
    Program::par_all(topo.links().iter().map(|l| link_program(l, with_dup)))
}

/// The predicate matching every host attachment point; used for both
/// `in` and `out`.
pub fn edge_predicate(topo: &Topology) -> Program {
    Program::par_all(topo.hosts().iter().map(|h| Program::seq_all(at(h.at))))
}

/// Routing and topology programs for one topology and scheme, with the
/// packet schema they are written against.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    topo: Topology,
    schema: FieldSchema,
    routing: Program,
    links: Program,
    with_dup: bool,
}

impl NetworkModel {
    /// `with_dup = false` omits the `dup` records from link traversals;
    /// histories then stay single packets, which is enough for
    /// throughput but not for congestion, latency or loop queries.
    pub fn new(topo: &Topology, scheme: &RoutingScheme, with_dup: bool) -> Result<Self> {
        let Routing { program, path_tags } = routing_program(topo, scheme)?;
        let (switches, hosts) = (topo.switches().len() as u32, topo.hosts().len() as u32);
        let mut fields = vec![
            ("sw", 0, switches),
            ("pt", 0, topo.max_port()),
            ("src", 0, hosts),
            ("dst", 0, hosts),
        ];
        if scheme.uses_path_tags() {
            fields.push(("path", 0, path_tags));
        }
        Ok(NetworkModel {
            topo: topo.clone(),
            schema: FieldSchema::from_ranges(&fields)?,
            routing: program,
            links: topology_program(topo, with_dup),
            with_dup,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn schema(&self) -> &FieldSchema {
        &self.schema
    }

    pub fn with_dup(&self) -> bool {
        self.with_dup
    }

    /// The routing program `p`.
    pub fn routing_program(&self) -> &Program {
        &self.routing
    }

    /// The topology program `t`.
    pub fn topology_program(&self) -> &Program {
        &self.links
    }

    /// `in; (p;t)^(n); p; out`, or without the final `out` when
    /// `keep_out` is false (for loop detection, where packets still in
    /// flight matter).
    pub fn network_program(&self, n: u32, keep_out: bool) -> Program {
        let edge = edge_predicate(&self.topo);
        let mut parts = vec![
            edge.clone(),
            Program::bounded_star(n, Program::seq(self.routing.clone(), self.links.clone())),
            self.routing.clone(),
        ];
        if keep_out {
            parts.push(edge);
        }
        Program::seq_all(parts)
    }

    /// The input distribution: one packet at `u`'s attachment point with
    /// `src=u, dst=v`, drawn with probability `demand(u,v) / aggregate`.
    pub fn traffic_input(&self, tm: &TrafficMatrix) -> Result<Dist> {
        let hosts = self.topo.hosts();
        let adj = self.topo.adjacency();
        let aggregate = tm.aggregate();
        let mut entries = Vec::new();
        for (u, v, d) in tm.demands() {
            let (hu, hv) = match (hosts.get(u), hosts.get(v)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Traffic(format!("host index out of range in pair ({u}, {v})"))),
            };
            if hop_distances(&adj, hv.at.sw)[hu.at.sw].is_none() {
                return Err(Error::Routing(format!("no path from {} to {}", hu.id, hv.id)));
            }
            let packet = Packet::from_pairs(
                &self.schema,
                &[
                    ("sw", sw_value(hu.at.sw) as u32),
                    ("pt", hu.at.pt),
                    ("src", host_value(u) as u32),
                    ("dst", host_value(v) as u32),
                ],
            )?;
            entries.push((HistSet::singleton(History::singleton(&packet)), d / &aggregate));
        }
        Dist::from_weights(entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::pretty;
    use crate::fixtures;
    use crate::prob::ratio;

    fn square() -> Topology {
        Topology::from_json(fixtures::SQUARE_TOPOLOGY).unwrap()
    }

    #[test]
    fn link_shapes() {
        let t = square();
        let l = &t.links()[0];
        assert_eq!(
            pretty(&link_program(l, true)),
            "sw=1; pt=2; dup; sw:=2; pt:=1; dup & sw=2; pt=1; dup; sw:=1; pt:=2; dup"
        );
        assert_eq!(
            pretty(&link_program(l, false)),
            "sw=1; pt=2; sw:=2; pt:=1 & sw=2; pt=1; sw:=1; pt:=2"
        );
        let mut failing = l.clone();
        failing.fail_ab = ratio(1, 10);
        assert_eq!(
            pretty(&link_program(&failing, true)),
            "sw=1; pt=2; dup; (sw:=2; pt:=1; dup +[9/10] drop) & sw=2; pt=1; dup; sw:=1; pt:=2; dup"
        );
    }

    #[test]
    fn uniform_traffic_input() {
        let t = square();
        let m = NetworkModel::new(&t, &RoutingScheme::Ecmp, true).unwrap();
        let tm = TrafficMatrix::uniform(&t, ratio(1, 1)).unwrap();
        let d = m.traffic_input(&tm).unwrap();
        assert_eq!(d.len(), 12);
        assert!(d.iter().all(|(_, w)| *w == ratio(1, 12)));
    }

    #[test]
    fn square_traffic_input() {
        let t = square();
        let m = NetworkModel::new(&t, &RoutingScheme::Spf, true).unwrap();
        let tm = TrafficMatrix::from_csv(&t, fixtures::SQUARE_TRAFFIC).unwrap();
        let d = m.traffic_input(&tm).unwrap();
        let s = m.schema();
        let h13 = Packet::from_pairs(s, &[("sw", 1), ("pt", 1), ("src", 1), ("dst", 3)]).unwrap();
        assert_eq!(d.weight(&HistSet::singleton(History::singleton(&h13))), ratio(4, 15));
        assert_eq!(d.iter().filter(|(_, w)| **w == ratio(1, 15)).count(), 11);
    }

    #[test]
    fn single_pair_is_point_mass() {
        let t = square();
        let m = NetworkModel::new(&t, &RoutingScheme::Spf, false).unwrap();
        let tm = TrafficMatrix::from_csv(&t, "src,dst,demand\nh2,h4,3/4\n").unwrap();
        assert!(m.traffic_input(&tm).unwrap().as_point_mass().is_some());
    }

    #[test]
    fn network_program_shape() {
        let t = square();
        let m = NetworkModel::new(&t, &RoutingScheme::Spf, true).unwrap();
        let p = m.network_program(0, true);
        assert!(p.is_star_free());
        let Program::Seq(front, out) = &p else { panic!() };
        assert_eq!(**out, edge_predicate(&t));
        assert!(matches!(**front, Program::Seq(..)));
        let loops = m.network_program(3, false);
        let Program::Seq(_, last) = &loops else { panic!() };
        assert_eq!(**last, *m.routing_program());
    }
}
