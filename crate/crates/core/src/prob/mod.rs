//! Finite discrete probability measures over history sets: the probability
//! monad (`dirac`, `bind`), parallel product, convex combination,
//! expectation, and the `⊑` order.

mod dist;
mod order;
mod weight;

pub use dist::Dist;
pub use order::{leq, leq_bounded, DEFAULT_SUPPORT_BOUND};
pub use weight::{
    check_probability, format_rational, parse_probability, parse_rational, ratio, Extended, Rational, Weight,
};

