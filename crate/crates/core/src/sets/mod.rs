//! Exact scalars, directed enclosures and interval-set algebra.

pub mod directed;
pub mod interval;
pub mod rational;
pub mod set;
pub mod stream;

pub use directed::{Bracket, DirectedReal, Dyadic, Rounding, Truth};
pub use interval::{Endpoint, Interval};
pub use rational::Rational;
pub use set::IntervalSet;
pub use stream::{LazyIntervalStream, TailBound, TailKind};
