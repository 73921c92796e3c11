//! Reference networks shipped with the crate, in edge-list format.

use crate::network::{parse_network_file, Network};

/// `(name, file contents)` for the six reference social/field/crossover
/// networks.
pub const NETWORK_FIXTURES: [(&str, &str); 6] = [
    ("example1", include_str!("../fixtures/example1.edges")),
    ("example2", include_str!("../fixtures/example2.edges")),
    ("example3", include_str!("../fixtures/example3.edges")),
    ("example4", include_str!("../fixtures/example4.edges")),
    ("example5", include_str!("../fixtures/example5.edges")),
    ("example6", include_str!("../fixtures/example6.edges")),
];

/// Reference network `k` (1-based).
///
/// # Panics
/// If `k` is not in `1..=6`.
pub fn example(k: usize) -> Network {
    let (name, text) = NETWORK_FIXTURES[k - 1];
    parse_network_file(text, None, None).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}
