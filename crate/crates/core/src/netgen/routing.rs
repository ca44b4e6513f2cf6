use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use log::warn;
use num_traits::{One, Zero};
use serde_json::Value;

use super::paths::{hop_distances, k_shortest_paths, shortest_next_hops};
use super::topology::Topology;
use crate::dsl::Program;
use crate::error::{Error, Result};
use crate::prob::{parse_probability, Rational};

/// One entry of an oblivious-routing path distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPath {
    pub src: String,
    pub dst: String,
    /// Switch names from the source's switch to the destination's switch.
    pub path: Vec<String>,
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoutingScheme {
    /// One shortest path; ties go to the neighbour declared first.
    Spf,
    /// Uniform choice among all shortest-path next hops at every switch.
    Ecmp,
    /// Uniform choice at ingress among the `k` shortest paths.
    Ksp(usize),
    /// Uniform choice at every hop among next hops on any of the `k`
    /// shortest paths from that switch.
    Multi(usize),
    /// Precomputed per-pair path distributions.
    Oblivious(Vec<WeightedPath>),
    /// Uniform choice among all neighbours until the destination switch.
    RandomWalk,
}

impl RoutingScheme {
    /// Parses `spf`, `ecmp`, `ksp:K`, `multi:K`, `oblivious:FILE` or
    /// `randomwalk`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, arg) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        let k = || -> Result<usize> {
            arg.and_then(|a| a.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Routing(format!("`{text}` needs a path count k ≥ 1, as in `{name}:2`")))
        };
        match (name, arg) {
            ("spf", None) => Ok(RoutingScheme::Spf),
            ("ecmp", None) => Ok(RoutingScheme::Ecmp),
            ("randomwalk", None) => Ok(RoutingScheme::RandomWalk),
            ("ksp", _) => Ok(RoutingScheme::Ksp(k()?)),
            ("multi", _) => Ok(RoutingScheme::Multi(k()?)),
            ("oblivious", Some(file)) => {
                let text = std::fs::read_to_string(file).map_err(|e| Error::io(Path::new(file), e))?;
                Ok(RoutingScheme::Oblivious(parse_path_distribution(&text)?))
            }
            _ => Err(Error::Routing(format!("unknown routing scheme `{text}`"))),
        }
    }

    pub(crate) fn uses_path_tags(&self) -> bool {
        matches!(self, RoutingScheme::Ksp(_) | RoutingScheme::Oblivious(_))
    }
}

impl fmt::Display for RoutingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoutingScheme::Spf => write!(f, "spf"),
            RoutingScheme::Ecmp => write!(f, "ecmp"),
            RoutingScheme::Ksp(k) => write!(f, "ksp:{k}"),
            RoutingScheme::Multi(k) => write!(f, "multi:{k}"),
            RoutingScheme::Oblivious(_) => write!(f, "oblivious"),
            RoutingScheme::RandomWalk => write!(f, "randomwalk"),
        }
    }
}

/// Parses `[{"src": "h1", "dst": "h3", "path": ["S1", "S2", "S3"], "prob": "1/2"}, …]`.
pub fn parse_path_distribution(text: &str) -> Result<Vec<WeightedPath>> {
    let v: Value = serde_json::from_str(text)?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Routing("path distribution must be a JSON array".into()))?;
    let field = |e: &Value, key: &str| -> Result<String> {
        e.get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::Routing(format!("path entry lacks string `{key}`")))
    };
    arr.iter()
        .map(|e| {
            let path = e
                .get("path")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Routing("path entry lacks `path` array".into()))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Routing("path switches must be strings".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            let prob = match e.get("prob") {
                Some(Value::String(s)) => parse_probability(s)?,
                Some(Value::Number(n)) => parse_probability(&n.to_string())?,
                _ => return Err(Error::Routing("path entry lacks `prob`".into())),
            };
            Ok(WeightedPath {
                src: field(e, "src")?,
                dst: field(e, "dst")?,
                path,
                prob,
            })
        })
        .collect()
}

/// Uniform choice among `ps` as a right-nested chain of binary choices
/// with probabilities `1/n, 1/(n−1), …`. `drop` when empty.
pub fn uniform_choice(ps: Vec<Program>) -> Program {
    let n = ps.len();
    let weighted = ps
        .into_iter()
        .map(|p| (Rational::new(1.into(), n.into()), p))
        .collect();
    weighted_choice(weighted)
}

/// Choice with the given weights, encoded as `p1 ⊕_{r1} (p2 ⊕_{r2} …)`
/// with `r_i = w_i / (w_i + … + w_n)`. Zero-weight options are dropped.
pub fn weighted_choice(ps: Vec<(Rational, Program)>) -> Program {
    let mut ps: Vec<(Rational, Program)> = ps.into_iter().filter(|(w, _)| !w.is_zero()).collect();
    let Some((mut tail_mass, last)) = ps.pop() else {
        return Program::Drop;
    };
    let mut acc = last;
    for (w, p) in ps.into_iter().rev() {
        tail_mass += &w;
        acc = Program::choice(w / &tail_mass, p, acc);
    }
    acc
}

/// The routing program `&_s (sw=s; &_v (dst=v; rule_{s,v}))` together
/// with the number of `path` tags it uses (zero for untagged schemes).
pub struct Routing {
    pub program: Program,
    pub path_tags: u32,
}

pub(crate) fn sw_value(sw: usize) -> u64 {
    sw as u64 + 1
}

pub(crate) fn host_value(h: usize) -> u64 {
    h as u64 + 1
}

pub fn routing_program(topo: &Topology, scheme: &RoutingScheme) -> Result<Routing> {
    match scheme {
        RoutingScheme::Ksp(k) => ksp_program(topo, *k),
        RoutingScheme::Oblivious(paths) => oblivious_program(topo, paths),
        _ => Ok(Routing {
            program: per_hop_program(topo, scheme),
            path_tags: 0,
        }),
    }
}

fn forward(pt: u32) -> Program {
    Program::modify("pt", pt as u64)
}

/// Schemes whose decision depends only on the current switch and the
/// destination.
fn per_hop_program(topo: &Topology, scheme: &RoutingScheme) -> Program {
    let adj = topo.adjacency();
    let mut per_switch = Vec::new();
    for s in 0..topo.switches().len() {
        let ports: BTreeMap<usize, u32> = topo.neighbors(s).into_iter().collect();
        let mut rules = Vec::new();
        for (v, host) in topo.hosts().iter().enumerate() {
            let t = host.at.sw;
            let action = if s == t {
                forward(host.at.pt)
            } else {
                let hops: Vec<usize> = match scheme {
                    RoutingScheme::Spf | RoutingScheme::Ecmp => {
                        let dist = hop_distances(&adj, t);
                        let hops = shortest_next_hops(&adj, &dist, s);
                        if *scheme == RoutingScheme::Spf {
                            hops.into_iter().take(1).collect()
                        } else {
                            hops
                        }
                    }
                    RoutingScheme::Multi(k) => {
                        let mut hops: Vec<usize> = k_shortest_paths(&adj, s, t, *k)
                            .into_iter()
                            .map(|p| p[1])
                            .collect();
                        hops.sort_unstable();
                        hops.dedup();
                        hops
                    }
                    RoutingScheme::RandomWalk => adj[s].clone(),
                    RoutingScheme::Ksp(_) | RoutingScheme::Oblivious(_) => unreachable!(),
                };
                if hops.is_empty() {
                    warn!(
                        "no route from {} to host {}; packets are dropped",
                        topo.switches()[s],
                        host.id
                    );
                }
                uniform_choice(hops.iter().map(|n| forward(ports[n])).collect())
            };
            rules.push(Program::seq(Program::test("dst", host_value(v)), action));
        }
        per_switch.push(Program::seq(
            Program::test("sw", sw_value(s)),
            Program::par_all(rules),
        ));
    }
    Program::par_all(per_switch)
}

/// Tagged-path routing: a packet with `path=0` is tagged with one of the
/// candidate paths for its (ingress, destination) pair; afterwards every
/// switch forwards by tag alone and the last switch delivers by `dst`.
struct TaggedPaths<'t> {
    topo: &'t Topology,
    /// Tag `i + 1` names `paths[i]`.
    paths: Vec<Vec<usize>>,
    /// Per switch: tagging rules applied to untagged packets.
    tagging: Vec<Vec<Program>>,
}

impl<'t> TaggedPaths<'t> {
    fn new(topo: &'t Topology) -> Self {
        TaggedPaths {
            topo,
            paths: Vec::new(),
            tagging: vec![Vec::new(); topo.switches().len()],
        }
    }

    /// Registers `paths` with probabilities and returns the choice among
    /// their tags.
    fn tag_choice(&mut self, paths: Vec<(Rational, Vec<usize>)>) -> Program {
        let mut options = Vec::new();
        for (w, p) in paths {
            let id = match self.paths.iter().position(|q| *q == p) {
                Some(i) => i,
                None => {
                    self.paths.push(p);
                    self.paths.len() - 1
                }
            };
            options.push((w, Program::modify("path", id as u64 + 1)));
        }
        weighted_choice(options)
    }

    fn finish(self) -> Routing {
        let mut per_switch = Vec::new();
        for s in 0..self.topo.switches().len() {
            let ports: BTreeMap<usize, u32> = self.topo.neighbors(s).into_iter().collect();
            let mut rules = Vec::new();
            for (v, host) in self.topo.hosts().iter().enumerate() {
                if host.at.sw == s {
                    rules.push(Program::seq(
                        Program::test("dst", host_value(v)),
                        forward(host.at.pt),
                    ));
                }
            }
            for (i, p) in self.paths.iter().enumerate() {
                if let Some(pos) = p.iter().position(|&x| x == s) {
                    if pos + 1 < p.len() {
                        rules.push(Program::seq(
                            Program::test("path", i as u64 + 1),
                            forward(ports[&p[pos + 1]]),
                        ));
                    }
                }
            }
            let forwarding = Program::par_all(rules);
            let tagging = Program::par(
                Program::seq(Program::test("path", 0), Program::par_all(self.tagging[s].clone())),
                Program::neg(Program::test("path", 0)),
            );
            per_switch.push(Program::seq_all([
                Program::test("sw", sw_value(s)),
                tagging,
                forwarding,
            ]));
        }
        Routing {
            program: Program::par_all(per_switch),
            path_tags: self.paths.len() as u32,
        }
    }
}

fn ksp_program(topo: &Topology, k: usize) -> Result<Routing> {
    let adj = topo.adjacency();
    let mut tagged = TaggedPaths::new(topo);
    let ingress: Vec<usize> = {
        let mut v: Vec<usize> = topo.hosts().iter().map(|h| h.at.sw).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    for &s in &ingress {
        for (v, host) in topo.hosts().iter().enumerate() {
            let t = host.at.sw;
            if s == t {
                continue;
            }
            let paths = k_shortest_paths(&adj, s, t, k);
            if paths.is_empty() {
                warn!("no route from {} to host {}; packets are dropped", topo.switches()[s], host.id);
                continue;
            }
            if paths.len() < k {
                warn!(
                    "only {} of {k} requested paths from {} to host {}",
                    paths.len(),
                    topo.switches()[s],
                    host.id
                );
            }
            let w = Rational::new(1.into(), paths.len().into());
            let choice = tagged.tag_choice(paths.into_iter().map(|p| (w.clone(), p)).collect());
            tagged.tagging[s].push(Program::seq(Program::test("dst", host_value(v)), choice));
        }
    }
    Ok(tagged.finish())
}

/// Weighted switch paths per (src host, dst host).
type PathsByPair = BTreeMap<(usize, usize), Vec<(Rational, Vec<usize>)>>;

fn oblivious_program(topo: &Topology, entries: &[WeightedPath]) -> Result<Routing> {
    let mut by_pair = PathsByPair::new();
    for e in entries {
        let (u, v) = (topo.host_index(&e.src)?, topo.host_index(&e.dst)?);
        let path = e
            .path
            .iter()
            .map(|s| topo.switch_index(s))
            .collect::<Result<Vec<_>>>()?;
        check_path(topo, &path, u, v, e)?;
        by_pair.entry((u, v)).or_default().push((e.prob.clone(), path));
    }
    let mut tagged = TaggedPaths::new(topo);
    for ((u, v), paths) in by_pair {
        let total = paths.iter().fold(Rational::zero(), |acc, (w, _)| acc + w);
        if !total.is_one() {
            return Err(Error::Routing(format!(
                "path probabilities for {} -> {} sum to {total}, not 1",
                topo.hosts()[u].id,
                topo.hosts()[v].id
            )));
        }
        let s = topo.hosts()[u].at.sw;
        let choice = tagged.tag_choice(paths);
        tagged.tagging[s].push(Program::seq_all([
            Program::test("src", host_value(u)),
            Program::test("dst", host_value(v)),
            choice,
        ]));
    }
    for (u, hu) in topo.hosts().iter().enumerate() {
        for (v, hv) in topo.hosts().iter().enumerate() {
            let pair_given = entries.iter().any(|e| e.src == hu.id && e.dst == hv.id);
            if u != v && hu.at.sw != hv.at.sw && !pair_given {
                warn!("no path distribution for {} -> {}; packets are dropped", hu.id, hv.id);
            }
        }
    }
    Ok(tagged.finish())
}

fn check_path(topo: &Topology, path: &[usize], u: usize, v: usize, e: &WeightedPath) -> Result<()> {
    let adj = topo.adjacency();
    let bad = |why: &str| Err(Error::Routing(format!("path {:?} for {} -> {}: {why}", e.path, e.src, e.dst)));
    if path.first() != Some(&topo.hosts()[u].at.sw) || path.last() != Some(&topo.hosts()[v].at.sw) {
        return bad("must start at the source's switch and end at the destination's switch");
    }
    if path.windows(2).any(|w| !adj[w[0]].contains(&w[1])) {
        return bad("consecutive switches must be linked");
    }
    let mut sorted = path.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != path.len() {
        return bad("paths must not revisit a switch");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{typecheck, Kind};
    use crate::prob::ratio;

    #[test]
    fn uniform_chain_weights() {
        let ps: Vec<Program> = (1..=3).map(|i| Program::modify("pt", i)).collect();
        let c = uniform_choice(ps.clone());
        assert_eq!(
            c,
            Program::choice(
                ratio(1, 3),
                ps[0].clone(),
                Program::choice(ratio(1, 2), ps[1].clone(), ps[2].clone())
            )
        );
        assert_eq!(uniform_choice(vec![ps[0].clone()]), ps[0]);
        assert_eq!(uniform_choice(vec![]), Program::Drop);
    }

    #[test]
    fn weighted_chain_renormalizes() {
        let ps: Vec<Program> = (1..=3).map(|i| Program::modify("pt", i)).collect();
        let c = weighted_choice(vec![
            (ratio(1, 2), ps[0].clone()),
            (ratio(1, 4), ps[1].clone()),
            (ratio(0, 1), Program::Dup),
            (ratio(1, 4), ps[2].clone()),
        ]);
        assert_eq!(
            c,
            Program::choice(
                ratio(1, 2),
                ps[0].clone(),
                Program::choice(ratio(1, 2), ps[1].clone(), ps[2].clone())
            )
        );
    }

    #[test]
    fn scheme_names() {
        assert_eq!(RoutingScheme::parse("ksp:3").unwrap(), RoutingScheme::Ksp(3));
        assert_eq!(RoutingScheme::parse("multi:2").unwrap(), RoutingScheme::Multi(2));
        assert!(RoutingScheme::parse("ksp").is_err());
        assert!(RoutingScheme::parse("ksp:0").is_err());
        assert!(RoutingScheme::parse("ospf").is_err());
        assert_eq!(RoutingScheme::parse("ecmp").unwrap().to_string(), "ecmp");
    }

    #[test]
    fn generated_programs_are_star_free_commands() {
        let topo = Topology::from_json(crate::fixtures::SQUARE_TOPOLOGY).unwrap();
        for scheme in [
            RoutingScheme::Spf,
            RoutingScheme::Ecmp,
            RoutingScheme::Ksp(2),
            RoutingScheme::Multi(2),
            RoutingScheme::RandomWalk,
        ] {
            let r = routing_program(&topo, &scheme).unwrap();
            assert!(r.program.is_star_free());
            assert_eq!(typecheck(&r.program).unwrap(), Kind::Command, "{scheme}");
        }
    }

    #[test]
    fn oblivious_validation() {
        let topo = Topology::from_json(crate::fixtures::SQUARE_TOPOLOGY).unwrap();
        let good = parse_path_distribution(
            r#"[{"src":"h1","dst":"h3","path":["S1","S2","S3"],"prob":"1/3"},
                {"src":"h1","dst":"h3","path":["S1","S4","S3"],"prob":"2/3"}]"#,
        )
        .unwrap();
        let r = routing_program(&topo, &RoutingScheme::Oblivious(good.clone())).unwrap();
        assert_eq!(r.path_tags, 2);
        let mut short = good.clone();
        short[1].prob = ratio(1, 3);
        assert!(routing_program(&topo, &RoutingScheme::Oblivious(short)).is_err());
        let mut broken = good;
        broken[0].path = vec!["S1".into(), "S3".into()];
        assert!(routing_program(&topo, &RoutingScheme::Oblivious(broken)).is_err());
    }
}
