//! Interpreter and analysis toolkit for probabilistic NetKAT.
//!
//! Programs denote Markov kernels on sets of packet histories. This crate
//! evaluates them exactly (rational arithmetic) at finite approximants of
//! iteration, checks the finite measure-theoretic structure behind the
//! semantics, and compiles network topologies, routing schemes and traffic
//! matrices into programs for congestion, throughput, latency and loop
//! queries.

pub mod dsl;
pub mod error;
pub mod model;
pub mod prob;
pub mod semantics;
pub mod measure;
pub mod netgen;
pub mod fixtures;
pub mod analysis;

pub use dsl::{parse, pretty, typecheck, Kind, Program};
pub use error::{Error, Result};
pub use model::{FieldSchema, HistSet, History, Packet};
pub use prob::{Dist, Rational};
