use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bruteforce::MaskOracle;
use crate::error::{Error, Result};
use crate::matching::matching_transform;
use crate::model::{InfluencerSet, Labelling, Protocol};
use crate::oracle::oracle_examples;
use crate::subsets::LexSubsets;
use crate::waterfall::{waterfall, TieBreak, WaterfallConfig};

use super::{thread_pool, workers_override};

pub const MAX_EXHAUSTIVE_AGENTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveOptions {
    pub n: usize,
    pub max_sample_size: usize,
    pub tie_break: TieBreak,
    /// Skip the empty influencer set.
    pub nonempty_only: bool,
    /// Stop after this many runs; the report then carries partial coverage.
    pub budget: Option<u64>,
    pub workers: usize,
}

impl ExhaustiveOptions {
    pub fn new(n: usize, max_sample_size: usize) -> Self {
        ExhaustiveOptions {
            n,
            max_sample_size,
            tie_break: TieBreak::default(),
            nonempty_only: false,
            budget: None,
            workers: std::thread::available_parallelism().map_or(1, |w| w.get()),
        }
    }
}

/// One run: the true influencer set and the labellings (as bit patterns,
/// bit `j` set when agent `j` disagrees) in the sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveCase {
    pub influencers: InfluencerSet,
    pub sample: Vec<u64>,
    pub returned: Option<InfluencerSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveReport {
    pub n: usize,
    pub max_sample_size: usize,
    pub runs: u64,
    pub total_runs: u64,
    pub coverage: f64,
    pub failures: u64,
    /// Runs whose sample admits a feasible set of at most two agents.
    pub small_feasible_runs: u64,
    pub small_feasible_failures: u64,
    /// Successful runs returning more agents than the true influencer set.
    pub size_violations: u64,
    /// Up to `CASE_LIMIT` failing runs, in enumeration order.
    pub failure_cases: Vec<ExhaustiveCase>,
    /// Up to `CASE_LIMIT` oversized results, in enumeration order.
    pub violation_cases: Vec<ExhaustiveCase>,
}

const CASE_LIMIT: usize = 10;

#[derive(Default)]
struct Tally {
    runs: u64,
    failures: u64,
    small: u64,
    small_failures: u64,
    violations: u64,
    failure_cases: Vec<ExhaustiveCase>,
    violation_cases: Vec<ExhaustiveCase>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.runs += other.runs;
        self.failures += other.failures;
        self.small += other.small;
        self.small_failures += other.small_failures;
        self.violations += other.violations;
        self.failure_cases.extend(other.failure_cases);
        self.failure_cases.truncate(CASE_LIMIT);
        self.violation_cases.extend(other.violation_cases);
        self.violation_cases.truncate(CASE_LIMIT);
        self
    }
}

/// Every labelling sample of size `1..=max` over `n` agents, as index sets
/// into the `2^n` labellings.
fn all_samples(n: usize, max: usize) -> Vec<Vec<u64>> {
    let count = 1usize << n;
    (1..=max.min(count))
        .flat_map(|size| LexSubsets::new(count, size))
        .map(|s| s.into_iter().map(|b| b as u64).collect())
        .collect()
}

fn run_case(
    n: usize,
    truth: &InfluencerSet,
    sample: &[u64],
    tie_break: TieBreak,
    run_index: u64,
    tally: &mut Tally,
) -> Result<()> {
    let labellings: Vec<Labelling> = sample.iter().map(|&b| Labelling::from_bits(n, b)).collect();
    let examples = oracle_examples(truth, Protocol::MAJORITY, &labellings)?;
    let m = matching_transform(n, &examples)?;
    let tie_break = match tie_break {
        TieBreak::UniformRandom { seed } => TieBreak::UniformRandom {
            seed: seed.wrapping_add(run_index),
        },
        other => other,
    };
    let result = waterfall(&m, &WaterfallConfig::majority(tie_break))?;
    let oracle = MaskOracle::new(&m, Protocol::MAJORITY)?;
    let small = (0..=2.min(n)).any(|k| oracle.find_of_size(k).is_some());

    let case = || ExhaustiveCase {
        influencers: truth.clone(),
        sample: sample.to_vec(),
        returned: result.influencers().cloned(),
    };
    tally.runs += 1;
    tally.small += u64::from(small);
    match result.influencers() {
        None => {
            tally.failures += 1;
            tally.small_failures += u64::from(small);
            if tally.failure_cases.len() < CASE_LIMIT {
                tally.failure_cases.push(case());
            }
        }
        Some(found) if found.len() > truth.len() => {
            tally.violations += 1;
            if tally.violation_cases.len() < CASE_LIMIT {
                tally.violation_cases.push(case());
            }
        }
        Some(_) => {}
    }
    Ok(())
}

/// Runs the Waterfall on every influencer set and every labelling sample
/// up to `max_sample_size`, against the majority oracle.
///
/// Random tie-breaks use `seed + run_index`, so reports are reproducible.
pub fn run_exhaustive_smalln(options: &ExhaustiveOptions) -> Result<ExhaustiveReport> {
    let n = options.n;
    if n == 0 || n > MAX_EXHAUSTIVE_AGENTS {
        return Err(Error::InvalidParameter(format!(
            "exhaustive mode needs 1 <= n <= {MAX_EXHAUSTIVE_AGENTS}, got {n}"
        )));
    }
    if options.max_sample_size == 0 {
        return Err(Error::InvalidParameter("max_sample_size must be positive".into()));
    }
    let samples = all_samples(n, options.max_sample_size);
    let first = u64::from(options.nonempty_only);
    let influencer_sets: Vec<InfluencerSet> = (first..1u64 << n).map(InfluencerSet::from_mask).collect();
    let per_set = samples.len() as u64;
    let total_runs = per_set * influencer_sets.len() as u64;
    let budget = options.budget.unwrap_or(total_runs).min(total_runs);

    let pool = thread_pool(workers_override().unwrap_or(options.workers).max(1))?;
    let tally = pool.install(|| {
        influencer_sets
            .par_iter()
            .enumerate()
            .map(|(g, truth)| {
                let start = g as u64 * per_set;
                let take = budget.saturating_sub(start).min(per_set) as usize;
                let mut tally = Tally::default();
                for (s, sample) in samples.iter().take(take).enumerate() {
                    run_case(n, truth, sample, options.tie_break, start + s as u64, &mut tally)?;
                }
                Ok(tally)
            })
            .collect::<Result<Vec<Tally>>>()
    })?;
    let tally = tally.into_iter().fold(Tally::default(), Tally::merge);

    Ok(ExhaustiveReport {
        n,
        max_sample_size: options.max_sample_size,
        runs: tally.runs,
        total_runs,
        coverage: if total_runs == 0 { 1.0 } else { tally.runs as f64 / total_runs as f64 },
        failures: tally.failures,
        small_feasible_runs: tally.small,
        small_feasible_failures: tally.small_failures,
        size_violations: tally.violations,
        failure_cases: tally.failure_cases,
        violation_cases: tally.violation_cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_agents_every_sample() {
        // 4 labellings, 15 nonempty samples, 4 influencer sets
        let report = run_exhaustive_smalln(&ExhaustiveOptions::new(2, 4)).unwrap();
        assert_eq!(report.total_runs, 60);
        assert_eq!(report.runs, 60);
        assert_eq!(report.failures, 0);
        assert_eq!(report.small_feasible_runs, 60);
        assert_eq!(report.coverage, 1.0);
    }

    #[test]
    fn three_agents_pairs() {
        let report = run_exhaustive_smalln(&ExhaustiveOptions::new(3, 2)).unwrap();
        assert_eq!(report.total_runs, 8 * (8 + 28));
        assert_eq!(report.failures, 0);
    }

    #[test]
    fn budget_gives_partial_coverage() {
        let options = ExhaustiveOptions {
            budget: Some(50),
            ..ExhaustiveOptions::new(3, 2)
        };
        let report = run_exhaustive_smalln(&options).unwrap();
        assert_eq!(report.runs, 50);
        assert!((report.coverage - 50.0 / 288.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_n() {
        assert!(run_exhaustive_smalln(&ExhaustiveOptions::new(6, 1)).is_err());
        assert!(run_exhaustive_smalln(&ExhaustiveOptions::new(3, 0)).is_err());
    }

    #[test]
    fn reproducible_with_random_ties() {
        let options = ExhaustiveOptions {
            tie_break: TieBreak::UniformRandom { seed: 4 },
            ..ExhaustiveOptions::new(3, 3)
        };
        assert_eq!(run_exhaustive_smalln(&options).unwrap(), run_exhaustive_smalln(&options).unwrap());
    }
}
