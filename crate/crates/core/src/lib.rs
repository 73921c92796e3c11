//! Optimal design of experiments on networks.
//!
//! Experiments are modelled as [`Network`]s of units; designs are scored with
//! the linear network effects model ([`lnem`]) and searched exhaustively or by
//! coordinate descent ([`search`]). Network automorphisms ([`automorph`])
//! collapse each orbit of equivalent designs to a single evaluation.
//! Blocked, row-column and crossover layouts become networks through the
//! constructors in [`network`].

pub mod automorph;
pub mod fixtures;
pub mod lnem;
pub mod network;
pub mod search;

pub use automorph::{count_orbits_bruteforce, find_automorphisms, AutomorphError, Automorphism, AutomorphismGroup};
pub use lnem::{
    build_model_matrix, criterion_for_design, evaluate_criterion, information_matrix, Criterion, CriterionValue,
    Design, Evaluator, InformationMatrix, ModelError, ModelSpec, Validity,
};
pub use network::{
    augment_blocks, augment_crossover, augment_row_column, parse_edge_list, parse_network_file, write_network,
    EdgeList, Network, NetworkError, NodeRole,
};
pub use search::{
    coordinate_descent, exhaustive_search, run_with_plugins, search, Algorithm, SearchConfig, SearchError, SearchReport,
};
