//! Shared fixtures for the benchmarks in `benches/`.

use frobcirc::circulant::isomorphism_classes;
use frobcirc::FrobeniusCirculant;

/// The first isomorphism class of each order, for orders that have one.
pub fn fixtures(orders: &[u64]) -> Vec<FrobeniusCirculant> {
    orders
        .iter()
        .filter_map(|&n| isomorphism_classes(n).ok()?.into_iter().next())
        .collect()
}
