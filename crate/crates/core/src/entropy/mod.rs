//! Topological entropy estimates from separated and spanning sets.

mod candidates;
mod estimate;
mod separated;
mod system;

pub use candidates::candidates;
pub use estimate::{
    entropy_estimate, lap_count_entropy, least_squares_slope, EntropyRow, EntropySeries, EstimateConfig, LapSeries,
    Summary,
};
pub use separated::{separated_count, separated_scan, spanning_count, ScanResult};
pub use system::{
    arcs_system, fuzzy_system, hyper_system, power_system, product_system, FuzzyMetric, State, SystemHandle,
    SystemKind,
};
