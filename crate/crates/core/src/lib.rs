//! Constructions and certified checks for progression-avoiding sets.

pub mod analysis;
pub mod constructions;
pub mod error;
pub mod sets;
pub mod transforms;
pub mod verdict;
pub mod witness;

pub use error::{Error, Result};
pub use verdict::Label;
pub use sets::{Bracket, Endpoint, Interval, IntervalSet, LazyIntervalStream, Rational, TailBound, TailKind, Truth};
