use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{SearchConfig, SearchError, SearchReport};
use crate::automorph::AutomorphismGroup;
use crate::lnem::{CriterionValue, Design, Evaluator, ModelError, ModelSpec};
use crate::network::Network;

struct Descent<'a> {
    evaluator: &'a Evaluator,
    group: &'a AutomorphismGroup,
    m: u8,
}

struct Trajectory {
    design: Vec<u8>,
    value: CriterionValue,
    considered: u64,
    cache: HashMap<Vec<u8>, CriterionValue>,
}

impl Descent<'_> {
    /// One cyclic pass-until-stable run from `start`. Keys of the cache are
    /// orbit representatives, so automorphic candidates share one evaluation.
    fn run(&self, start: Vec<u8>) -> Result<Trajectory, ModelError> {
        let mut cache: HashMap<Vec<u8>, CriterionValue> = HashMap::new();
        let mut considered = 0u64;
        let mut lookup = |x: &[u8]| -> Result<CriterionValue, ModelError> {
            considered += 1;
            let key = self.group.canonical_image_slice(x);
            if let Some(&v) = cache.get(&key) {
                return Ok(v);
            }
            let v = self.evaluator.evaluate(x)?;
            cache.insert(key, v);
            Ok(v)
        };

        let mut current = start;
        let mut value = lookup(&current)?;
        'sweep: loop {
            for i in 0..current.len() {
                let original = current[i];
                for t in 0..self.m {
                    if t == original {
                        continue;
                    }
                    current[i] = t;
                    let candidate = lookup(&current)?;
                    if candidate.better_than(value) {
                        value = candidate;
                        continue 'sweep;
                    }
                }
                current[i] = original;
            }
            break;
        }
        Ok(Trajectory {
            design: current,
            value,
            considered,
            cache,
        })
    }
}

fn random_start(seed: u64, restart: usize, n: usize, m: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..n).map(|_| rng.random_range(0..m) as u8).collect()
}

fn pool_trajectories(trajectories: Vec<Trajectory>, config: &SearchConfig, elapsed: f64) -> SearchReport {
    let mut valid: HashSet<Vec<u8>> = HashSet::new();
    let mut invalid: HashSet<Vec<u8>> = HashSet::new();
    let mut considered = 0u64;
    let mut best: Option<(CriterionValue, Vec<u8>)> = None;
    for t in trajectories {
        considered += t.considered;
        for (key, v) in t.cache {
            if v.is_valid() {
                valid.insert(key);
            } else {
                invalid.insert(key);
            }
        }
        let better = match &best {
            None => true,
            Some((incumbent, _)) => t.value.better_than(*incumbent),
        };
        if better {
            best = Some((t.value, t.design));
        }
    }
    let num_invalid = invalid.len() as u64;
    let mut num_eval = valid.len() as u64;
    if config.count_invalid_as_eval {
        num_eval += num_invalid;
    }
    let (best_value, best_design) = match best {
        Some((CriterionValue::Valid(v), d)) => (Some(v), Some(Design::new(d))),
        _ => (None, None),
    };
    let distinct = valid.len() as u64 + num_invalid;
    SearchReport {
        best_design,
        best_value,
        num_eval,
        num_considered: considered,
        num_skipped_noncanonical: considered - distinct,
        num_invalid,
        wall_time: elapsed,
        seed: config.seed,
        efficiency: None,
        partial: false,
    }
}

/// Cyclic coordinate descent from `config.restarts` seeded random starts.
///
/// Restart `r` draws its start from a ChaCha stream selected by `r`, so every
/// trajectory is fixed by `(seed, r)` whatever the worker count. The pooled
/// best keeps the earliest restart on ties.
pub fn coordinate_descent(net: &Network, spec: &ModelSpec, config: &SearchConfig) -> Result<SearchReport, SearchError> {
    config.validate()?;
    let start = Instant::now();
    let group = config.group(net)?;
    let evaluator = Evaluator::new(net, spec);
    let m = spec.treatments();
    let n = net.design_count();
    let descent = Descent {
        evaluator: &evaluator,
        group: &group,
        m: m as u8,
    };
    let pool = config.pool()?;
    let runs: Vec<Result<Trajectory, ModelError>> = pool.install(|| {
        (0..config.restarts)
            .into_par_iter()
            .map(|r| descent.run(random_start(config.seed, r, n, m)))
            .collect()
    });
    let trajectories = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(pool_trajectories(trajectories, config, start.elapsed().as_secs_f64()))
}

/// Single coordinate-descent run from a given start.
pub fn coordinate_descent_from(
    net: &Network,
    spec: &ModelSpec,
    start: &Design,
    config: &SearchConfig,
) -> Result<SearchReport, SearchError> {
    start.validate(net, spec.treatments())?;
    let clock = Instant::now();
    let group = config.group(net)?;
    let evaluator = Evaluator::new(net, spec);
    let descent = Descent {
        evaluator: &evaluator,
        group: &group,
        m: spec.treatments() as u8,
    };
    let trajectory = descent.run(start.as_slice().to_vec())?;
    Ok(pool_trajectories(
        vec![trajectory],
        config,
        clock.elapsed().as_secs_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lnem::Criterion;
    use crate::network::parse_edge_list;

    #[test]
    fn starts_are_reproducible_and_distinct() {
        assert_eq!(random_start(7, 3, 12, 3), random_start(7, 3, 12, 3));
        assert_ne!(random_start(7, 3, 12, 3), random_start(7, 4, 12, 3));
        assert!(random_start(1, 0, 50, 3).iter().all(|&t| t < 3));
    }

    #[test]
    fn starting_at_optimum_takes_one_sweep() {
        let net = parse_edge_list("1-7, 2-7, 3-6, 4-5, 6-9, 9-10", 10, false).unwrap();
        let spec = ModelSpec::new(&net, 2, Criterion::As).unwrap();
        let best = super::super::exhaustive_search(&net, &spec, &SearchConfig::exhaustive()).unwrap();
        let optimum = best.best_design.clone().unwrap();
        for autos in [false, true] {
            let config = SearchConfig::coordinate_descent(1, 0).with_automorphisms(autos);
            let report = coordinate_descent_from(&net, &spec, &optimum, &config).unwrap();
            assert_eq!(report.best_value, best.best_value);
            assert_eq!(report.best_design.as_ref(), Some(&optimum));
            // one full sweep: the start plus n * (m - 1) neighbours
            assert_eq!(report.num_considered, 11);
            assert!(report.num_eval <= 11);
        }
    }

    #[test]
    fn zero_restarts_rejected() {
        let net = parse_edge_list("1-2", 2, false).unwrap();
        let spec = ModelSpec::new(&net, 2, Criterion::As).unwrap();
        let config = SearchConfig::coordinate_descent(0, 0);
        assert!(matches!(
            coordinate_descent(&net, &spec, &config),
            Err(SearchError::Config(_))
        ));
    }
}
