//! Design search: the generic candidate loop with pluggable `next`/`stop`
//! rules, exhaustive lexicographic search, and cyclic coordinate descent.
//!
//! All three share the same orbit pruning: with automorphisms enabled a
//! candidate is only evaluated when it is the lexicographically smallest
//! design in its orbit (coordinate descent instead keys its evaluation cache
//! on that smallest design, so moves are never blocked).

mod descent;
mod enumerate;
mod exhaustive;
mod framework;

pub use descent::{coordinate_descent, coordinate_descent_from};
pub use enumerate::{design_space_size, is_label_canonical, lexicographic_successor, DesignEnumerator};
pub use exhaustive::exhaustive_search;
pub use framework::{plugins, run_with_plugins, History, Outcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorph::{find_automorphisms_with_cap, AutomorphError, AutomorphismGroup, DEFAULT_GROUP_CAP};
use crate::lnem::{Design, ModelError, ModelSpec};
use crate::network::Network;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automorph(#[from] AutomorphError),
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("failed to start worker pool: {0}")]
    Workers(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Exhaustive,
    CoordinateDescent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub use_automorphisms: bool,
    /// Enumerate only first-occurrence label forms. Exhaustive search only;
    /// coordinate descent starts from uniform raw assignments.
    pub use_label_symmetry: bool,
    /// Random starts for coordinate descent.
    pub restarts: usize,
    pub seed: u64,
    /// Also count non-estimable designs in `num_eval`.
    pub count_invalid_as_eval: bool,
    /// Cap on candidates considered; the report is flagged partial when hit.
    pub max_designs: Option<u64>,
    /// Worker threads; `None` uses every core.
    pub workers: Option<usize>,
    pub automorphism_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            algorithm: Algorithm::Exhaustive,
            use_automorphisms: true,
            use_label_symmetry: true,
            restarts: 100,
            seed: 0,
            count_invalid_as_eval: false,
            max_designs: None,
            workers: None,
            automorphism_cap: DEFAULT_GROUP_CAP,
        }
    }
}

impl SearchConfig {
    pub fn exhaustive() -> Self {
        SearchConfig::default()
    }

    pub fn coordinate_descent(restarts: usize, seed: u64) -> Self {
        SearchConfig {
            algorithm: Algorithm::CoordinateDescent,
            restarts,
            seed,
            ..SearchConfig::default()
        }
    }

    pub fn with_automorphisms(mut self, on: bool) -> Self {
        self.use_automorphisms = on;
        self
    }

    pub fn with_label_symmetry(mut self, on: bool) -> Self {
        self.use_label_symmetry = on;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.restarts == 0 {
            return Err(SearchError::Config("restarts must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(SearchError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    fn group(&self, net: &Network) -> Result<AutomorphismGroup, SearchError> {
        if self.use_automorphisms {
            Ok(find_automorphisms_with_cap(net, self.automorphism_cap)?)
        } else {
            Ok(AutomorphismGroup::trivial(net))
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool, SearchError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            builder = builder.num_threads(w);
        }
        builder.build().map_err(|e| SearchError::Workers(e.to_string()))
    }
}

/// Outcome of a search run.
///
/// With `count_invalid_as_eval` off,
/// `num_considered = num_eval + num_skipped_noncanonical + num_invalid`.
/// For coordinate descent `num_eval`/`num_invalid` count distinct designs
/// (up to automorphism when enabled) and `num_skipped_noncanonical` counts
/// candidates answered from the evaluation cache.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub best_design: Option<Design>,
    pub best_value: Option<f64>,
    pub num_eval: u64,
    pub num_considered: u64,
    pub num_skipped_noncanonical: u64,
    pub num_invalid: u64,
    pub wall_time: f64,
    pub seed: u64,
    pub efficiency: Option<f64>,
    /// Set when `max_designs` stopped the run early.
    pub partial: bool,
}

impl SearchReport {
    /// Fills `efficiency` as `reference / best_value` (both lower-is-better).
    pub fn with_reference(mut self, reference: f64) -> Self {
        self.efficiency = self.best_value.map(|v| reference / v);
        self
    }

    /// Copy with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        SearchReport {
            wall_time: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the configured algorithm.
pub fn search(net: &Network, spec: &ModelSpec, config: &SearchConfig) -> Result<SearchReport, SearchError> {
    match config.algorithm {
        Algorithm::Exhaustive => exhaustive_search(net, spec, config),
        Algorithm::CoordinateDescent => coordinate_descent(net, spec, config),
    }
}

/// Running counters and incumbent, merged across workers in enumeration
/// order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    pub num_eval: u64,
    pub num_considered: u64,
    pub num_skipped: u64,
    pub num_invalid: u64,
    pub best: Option<(f64, Vec<u8>)>,
}

impl Tally {
    pub fn offer(&mut self, value: f64, x: &[u8]) {
        match &mut self.best {
            Some((best, design)) if value < *best => {
                *best = value;
                design.clear();
                design.extend_from_slice(x);
            }
            Some(_) => {}
            None => self.best = Some((value, x.to_vec())),
        }
    }

    /// Merges a later chunk; earlier incumbents win ties.
    pub fn absorb(&mut self, later: Tally) {
        self.num_eval += later.num_eval;
        self.num_considered += later.num_considered;
        self.num_skipped += later.num_skipped;
        self.num_invalid += later.num_invalid;
        if let Some((value, design)) = later.best {
            self.offer(value, &design);
        }
    }

    pub fn into_report(self, seed: u64, wall_time: f64, partial: bool) -> SearchReport {
        let (best_value, best_design) = match self.best {
            Some((v, d)) => (Some(v), Some(Design::new(d))),
            None => (None, None),
        };
        SearchReport {
            best_design,
            best_value,
            num_eval: self.num_eval,
            num_considered: self.num_considered,
            num_skipped_noncanonical: self.num_skipped,
            num_invalid: self.num_invalid,
            wall_time,
            seed,
            efficiency: None,
            partial,
        }
    }
}
