//! Bundled inputs: the four-switch example network with its traffic
//! matrix, and an Abilene-shaped backbone with synthetic demands.

/// Four switches in a cycle, one host per switch.
pub const SQUARE_TOPOLOGY: &str = include_str!("../fixtures/square_topology.json");

/// Demand 1/2 from h1 to h3 and 1/8 between every other ordered pair.
pub const SQUARE_TRAFFIC: &str = include_str!("../fixtures/square_traffic.csv");

/// Eleven switches and fourteen links shaped like the Abilene backbone.
pub const ABILENE_TOPOLOGY: &str = include_str!("../fixtures/abilene_topology.json");

/// Deterministic synthetic demands for [`ABILENE_TOPOLOGY`].
pub const ABILENE_TRAFFIC: &str = include_str!("../fixtures/abilene_traffic.csv");

use crate::model::{FieldSchema, HistSet, History, Packet};
use crate::prob::{format_rational, ratio, Dist, Rational};
use crate::Program;

/// `sw ∈ {0,1,2}` and a constant `pt`; the packets π, σ, τ are `sw=0`,
/// `sw=1`, `sw=2`.
pub fn three_packet_schema() -> FieldSchema {
    FieldSchema::from_ranges(&[("sw", 0, 2), ("pt", 0, 0)]).expect("valid schema")
}

/// `{π}`, `{σ}`, `{τ}` as single-history sets, plus helpers to combine them.
pub fn three_packets() -> [History; 3] {
    let s = three_packet_schema();
    [0, 1, 2].map(|v| History::singleton(&Packet::from_pairs(&s, &[("sw", v), ("pt", 0)]).expect("in range")))
}

fn half_half(a: &[usize], b: &[usize]) -> Dist {
    let ps = three_packets();
    let set = |ix: &[usize]| ix.iter().map(|&i| ps[i].clone()).collect::<HistSet>();
    Dist::from_weights([(set(a), ratio(1, 2)), (set(b), ratio(1, 2))]).expect("sums to one")
}

/// Three measures with three common upper bounds but no least upper bound
/// for the first two: `μ1 = ½{π} + ½{σ}`, …, `ν1 = ½{τ} + ½{π,σ}`, ….
pub fn semilattice_counterexample() -> ([Dist; 3], [Dist; 3]) {
    (
        [half_half(&[0], &[1]), half_half(&[1], &[2]), half_half(&[2], &[0])],
        [half_half(&[2], &[0, 1]), half_half(&[0], &[1, 2]), half_half(&[1], &[2, 0])],
    )
}

/// `(σ! ⊕_r τ!) & (τ! ⊕_r σ!)` over [`three_packet_schema`]. On a nonempty
/// input it yields `{σ}` and `{τ}` with probability `r(1−r)` each and
/// `{σ,τ}` otherwise.
pub fn choice_kernel_text(r: &Rational) -> String {
    let r = format_rational(r);
    format!("(sw:=1 +[{r}] sw:=2) & (sw:=2 +[{r}] sw:=1)")
}

pub fn choice_kernel(r: &Rational) -> Program {
    crate::dsl::parse(&choice_kernel_text(r)).expect("kernel text parses")
}
