use std::time::Instant;

use super::{SearchConfig, SearchError, SearchReport, Tally};
use crate::lnem::{CriterionValue, Design, Evaluator, ModelSpec};
use crate::network::Network;

/// Guard against `next` rules that never end when no budget is configured.
pub const SAFETY_BUDGET: u64 = 1_000_000_000;

/// What happened to a candidate in the search loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Evaluated(CriterionValue),
    /// Not the smallest design in its orbit; not evaluated.
    Skipped,
}

/// Candidates seen so far with their outcomes, in order.
#[derive(Clone, Debug, Default)]
pub struct History {
    designs: Vec<Design>,
    outcomes: Vec<Outcome>,
}

impl History {
    pub fn designs(&self) -> &[Design] {
        &self.designs
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn last(&self) -> Option<(&Design, Outcome)> {
        self.designs.last().zip(self.outcomes.last().copied())
    }
}

/// Generic candidate loop.
///
/// `next` proposes the first candidate from an empty history and every later
/// one from the history so far (`None` ends the run). Each candidate is
/// evaluated only when it is the smallest design in its orbit, then `stop`
/// sees the updated history and the evaluation count.
pub fn run_with_plugins<N, S>(
    net: &Network,
    spec: &ModelSpec,
    mut next: N,
    mut stop: S,
    config: &SearchConfig,
) -> Result<SearchReport, SearchError>
where
    N: FnMut(&History) -> Option<Design>,
    S: FnMut(&History, u64) -> bool,
{
    config.validate()?;
    let clock = Instant::now();
    let group = config.group(net)?;
    let evaluator = Evaluator::new(net, spec);
    let budget = config.max_designs.unwrap_or(SAFETY_BUDGET);
    let mut history = History::default();
    let mut tally = Tally::default();
    let mut partial = false;

    let mut candidate = next(&history);
    while let Some(x) = candidate {
        x.validate(net, spec.treatments())?;
        tally.num_considered += 1;
        let outcome = if group.is_canonical_slice(x.as_slice()) {
            let value = evaluator.evaluate(x.as_slice())?;
            match value {
                CriterionValue::Valid(v) => {
                    tally.num_eval += 1;
                    tally.offer(v, x.as_slice());
                }
                CriterionValue::Invalid => {
                    tally.num_invalid += 1;
                    if config.count_invalid_as_eval {
                        tally.num_eval += 1;
                    }
                }
            }
            Outcome::Evaluated(value)
        } else {
            tally.num_skipped += 1;
            Outcome::Skipped
        };
        history.designs.push(x);
        history.outcomes.push(outcome);
        if stop(&history, tally.num_eval) {
            break;
        }
        if tally.num_considered >= budget {
            partial = true;
            break;
        }
        candidate = next(&history);
    }
    Ok(tally.into_report(config.seed, clock.elapsed().as_secs_f64(), partial))
}

/// Ready-made `next` and `stop` rules.
pub mod plugins {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::{History, Outcome};
    use crate::lnem::{CriterionValue, Design};
    use crate::search::enumerate::lexicographic_successor;

    /// Lexicographic walk from the all-first-treatment design.
    pub fn lexicographic(n: usize, m: usize, label_symmetry: bool) -> impl FnMut(&History) -> Option<Design> {
        move |history: &History| match history.last() {
            None => Some(Design::new(vec![0; n])),
            Some((x, _)) => lexicographic_successor(x, m, label_symmetry),
        }
    }

    /// Uniform random designs from a seeded stream.
    pub fn random_uniform(n: usize, m: usize, seed: u64) -> impl FnMut(&History) -> Option<Design> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        move |_: &History| Some(Design::new((0..n).map(|_| rng.random_range(0..m) as u8).collect()))
    }

    /// Cyclic coordinate descent from `start`: try each other treatment at
    /// each position in turn, move to the first strict improvement and start
    /// over from position 0; end after a full pass without improvement.
    pub fn coordinate_descent(start: Design, m: usize) -> impl FnMut(&History) -> Option<Design> {
        let mut incumbent: Option<(Design, CriterionValue)> = None;
        let mut position = 0usize;
        let mut treatment = 0u8;
        move |history: &History| {
            let Some((last, outcome)) = history.last() else {
                return Some(start.clone());
            };
            let value = match outcome {
                Outcome::Evaluated(v) => v,
                Outcome::Skipped => CriterionValue::Invalid,
            };
            match &incumbent {
                None => incumbent = Some((last.clone(), value)),
                Some((_, best)) if value.better_than(*best) => {
                    incumbent = Some((last.clone(), value));
                    position = 0;
                    treatment = 0;
                }
                Some(_) => {}
            }
            let (current, _) = incumbent.as_ref().expect("set above");
            let x = current.as_slice();
            while position < x.len() {
                while (treatment as usize) < m {
                    let t = treatment;
                    treatment += 1;
                    if t != x[position] {
                        let mut moved = x.to_vec();
                        moved[position] = t;
                        return Some(Design::new(moved));
                    }
                }
                position += 1;
                treatment = 0;
            }
            None
        }
    }

    /// Stop once `target` has been processed.
    pub fn stop_at(target: Design) -> impl FnMut(&History, u64) -> bool {
        move |history: &History, _| history.last().is_some_and(|(x, _)| *x == target)
    }

    /// Stop once `budget` evaluations have been made.
    pub fn eval_budget(budget: u64) -> impl FnMut(&History, u64) -> bool {
        move |_: &History, evals| evals >= budget
    }

    pub fn never() -> impl FnMut(&History, u64) -> bool {
        |_: &History, _| false
    }
}
