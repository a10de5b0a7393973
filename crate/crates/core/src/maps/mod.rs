//! Spaces, exact piecewise-linear maps and non-autonomous sequences.

pub mod construct;
mod interval_union;
mod nds;
mod plmap;
mod space;

pub use construct::{
    build_fm, build_rotation_sequence, build_transitive_zero_entropy, dyadic_intervals, identity,
    rotation, tent, TransitiveConstruction,
};
pub use interval_union::IntervalUnion;
pub use nds::{NdsSpec, Tail};
pub use plmap::PLMap;
pub use space::{Point, ProductPoint, Space};
