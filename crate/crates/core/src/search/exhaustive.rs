use std::time::Instant;

use rayon::prelude::*;

use super::enumerate::{design_space_size, DesignEnumerator};
use super::{SearchConfig, SearchError, SearchReport, Tally};
use crate::automorph::AutomorphismGroup;
use crate::lnem::{CriterionValue, Evaluator, ModelSpec};
use crate::network::Network;

/// Target number of work chunks for the parallel split.
const CHUNK_TARGET: u128 = 256;

struct Scan<'a> {
    evaluator: &'a Evaluator,
    group: &'a AutomorphismGroup,
    count_invalid_as_eval: bool,
}

impl Scan<'_> {
    fn visit(&self, x: &[u8], tally: &mut Tally) -> Result<(), SearchError> {
        tally.num_considered += 1;
        if !self.group.is_canonical_slice(x) {
            tally.num_skipped += 1;
            return Ok(());
        }
        match self.evaluator.evaluate(x)? {
            CriterionValue::Valid(v) => {
                tally.num_eval += 1;
                tally.offer(v, x);
            }
            CriterionValue::Invalid => {
                tally.num_invalid += 1;
                if self.count_invalid_as_eval {
                    tally.num_eval += 1;
                }
            }
        }
        Ok(())
    }

    fn run(&self, mut designs: DesignEnumerator, budget: Option<u64>) -> Result<Tally, SearchError> {
        let mut tally = Tally::default();
        while let Some(x) = designs.next_slice() {
            if budget.is_some_and(|b| tally.num_considered >= b) {
                break;
            }
            self.visit(x, &mut tally)?;
        }
        Ok(tally)
    }
}

/// Shortest prefix length giving at least `CHUNK_TARGET` chunks.
fn split_depth(n: usize, m: usize, label_symmetry: bool) -> usize {
    (1..=n)
        .find(|&d| design_space_size(d, m, label_symmetry) >= CHUNK_TARGET)
        .unwrap_or(n)
}

/// Evaluates every design of the space in lexicographic order, skipping
/// non-canonical ones when automorphisms are enabled. Ties keep the earliest
/// design.
pub fn exhaustive_search(net: &Network, spec: &ModelSpec, config: &SearchConfig) -> Result<SearchReport, SearchError> {
    config.validate()?;
    let start = Instant::now();
    let group = config.group(net)?;
    let evaluator = Evaluator::new(net, spec);
    let n = net.design_count();
    let m = spec.treatments();
    let sym = config.use_label_symmetry;
    let scan = Scan {
        evaluator: &evaluator,
        group: &group,
        count_invalid_as_eval: config.count_invalid_as_eval,
    };

    let space = design_space_size(n, m, sym);
    let budgeted = config.max_designs.filter(|&b| (b as u128) < space);
    let tally = if let Some(budget) = budgeted {
        scan.run(DesignEnumerator::new(n, m, sym), Some(budget))?
    } else {
        let depth = split_depth(n, m, sym);
        let prefixes: Vec<Vec<u8>> = DesignEnumerator::new(depth, m, sym).map(|d| d.into_inner()).collect();
        let pool = config.pool()?;
        let chunks: Vec<Result<Tally, SearchError>> = pool.install(|| {
            prefixes
                .par_iter()
                .map(|prefix| scan.run(DesignEnumerator::with_prefix(prefix, n, m, sym), None))
                .collect()
        });
        let mut total = Tally::default();
        for chunk in chunks {
            total.absorb(chunk?);
        }
        total
    };
    Ok(tally.into_report(config.seed, start.elapsed().as_secs_f64(), budgeted.is_some()))
}
