//! The Waterfall heuristic for τ-margin (by default majority) dynamics.
//!
//! From every source agent the search grows a candidate set greedily: while
//! some row is inconsistent, it adds the outside agent that matches the most
//! rows needing rescue. A candidate is only returned after a consistency
//! check, so `Found` is never a false positive; `NotFound` may be a false
//! negative.

mod filters;
mod rescue;
mod streams;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::tau_row_consistent;
use crate::matching::MatchingTransform;
use crate::model::InfluencerSet;

pub use filters::filters_tiebreak;
pub use rescue::{needs_rescue, rescue_set};
pub use streams::{build_waterfall_streams, stream_feasible, StreamWaterfall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TieBreak {
    UniformRandom { seed: u64 },
    Filters,
    FirstIndex,
}

impl Default for TieBreak {
    fn default() -> Self {
        TieBreak::UniformRandom { seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WaterfallConfig {
    #[serde(default)]
    pub tau: u32,
    #[serde(default)]
    pub tie_break: TieBreak,
    /// Sources to try, in order. `None` means `0..n`.
    #[serde(default)]
    pub source_order: Option<Vec<usize>>,
}

impl WaterfallConfig {
    pub fn majority(tie_break: TieBreak) -> Self {
        WaterfallConfig {
            tau: 0,
            tie_break,
            source_order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WaterfallOutcome {
    Found {
        influencers: InfluencerSet,
        /// `None` when the empty set or the full agent set was returned.
        source: Option<usize>,
        /// Agents in the order they entered the set, source first.
        additions: Vec<usize>,
    },
    NotFound,
}

/// State of the candidate set at one consistency check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationPoint {
    pub set_size: usize,
    pub margins: Vec<i64>,
    pub inconsistent_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaterfallResult {
    #[serde(flatten)]
    pub outcome: WaterfallOutcome,
    /// Checks made along the trajectory that produced the outcome.
    pub validation_points: Vec<ValidationPoint>,
    pub sources_tried: usize,
}

impl WaterfallResult {
    pub fn influencers(&self) -> Option<&InfluencerSet> {
        match &self.outcome {
            WaterfallOutcome::Found { influencers, .. } => Some(influencers),
            WaterfallOutcome::NotFound => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self.outcome, WaterfallOutcome::Found { .. })
    }
}

enum Chooser {
    Random(ChaCha8Rng),
    Filters,
    First,
}

impl Chooser {
    fn new(tie_break: TieBreak) -> Self {
        match tie_break {
            TieBreak::UniformRandom { seed } => Chooser::Random(ChaCha8Rng::seed_from_u64(seed)),
            TieBreak::Filters => Chooser::Filters,
            TieBreak::FirstIndex => Chooser::First,
        }
    }
}

/// Per-agent bitsets over rows: bit `k` of column `j` is set when agent `j`
/// is in the matching set of row `k`.
struct Columns {
    words: usize,
    bits: Vec<u64>,
}

impl Columns {
    fn new(m: &MatchingTransform) -> Self {
        let words = m.m().div_ceil(64);
        let mut bits = vec![0u64; words * m.n()];
        for (k, row) in m.rows().enumerate() {
            for (j, _) in row.iter().enumerate().filter(|&(_, &e)| e == 1) {
                bits[j * words + k / 64] |= 1 << (k % 64);
            }
        }
        Columns { words, bits }
    }

    fn column(&self, j: usize) -> &[u64] {
        &self.bits[j * self.words..(j + 1) * self.words]
    }
}

/// Candidate set with incrementally maintained row margins.
struct Growth<'a> {
    m: &'a MatchingTransform,
    columns: &'a Columns,
    tau: u32,
    margins: Vec<i64>,
    member: Vec<bool>,
    size: usize,
    additions: Vec<usize>,
    rescue: Vec<u64>,
}

impl<'a> Growth<'a> {
    fn new(m: &'a MatchingTransform, columns: &'a Columns, tau: u32) -> Self {
        Growth {
            m,
            columns,
            tau,
            margins: vec![0; m.m()],
            member: vec![false; m.n()],
            size: 0,
            additions: Vec::new(),
            rescue: vec![0; columns.words],
        }
    }

    fn add(&mut self, j: usize) {
        debug_assert!(!self.member[j]);
        self.member[j] = true;
        self.size += 1;
        self.additions.push(j);
        let column = self.columns.column(j);
        for (k, margin) in self.margins.iter_mut().enumerate() {
            *margin += if column[k / 64] >> (k % 64) & 1 == 1 { 1 } else { -1 };
        }
    }

    fn inconsistent_rows(&self) -> usize {
        self.margins
            .iter()
            .zip(self.m.predictions())
            .filter(|&(&margin, &changed)| !tau_row_consistent(margin, changed, self.tau))
            .count()
    }

    fn checkpoint(&self) -> ValidationPoint {
        ValidationPoint {
            set_size: self.size,
            margins: self.margins.clone(),
            inconsistent_rows: self.inconsistent_rows(),
        }
    }

    fn set(&self) -> InfluencerSet {
        (0..self.m.n()).filter(|&j| self.member[j]).collect()
    }

    /// Outside agents matching the most rows that need rescue, ascending.
    fn best_rescuers(&mut self) -> Vec<usize> {
        self.rescue.iter_mut().for_each(|w| *w = 0);
        for (k, (&margin, &changed)) in self.margins.iter().zip(self.m.predictions()).enumerate() {
            if needs_rescue(margin, changed, self.tau) {
                self.rescue[k / 64] |= 1 << (k % 64);
            }
        }
        let count = |j: usize| -> u32 {
            self.columns
                .column(j)
                .iter()
                .zip(&self.rescue)
                .map(|(c, r)| (c & r).count_ones())
                .sum()
        };
        let mut best = 0;
        let mut tied = Vec::new();
        for j in (0..self.m.n()).filter(|&j| !self.member[j]) {
            let c = count(j);
            if c > best || tied.is_empty() {
                best = c;
                tied.clear();
            }
            if c == best {
                tied.push(j);
            }
        }
        tied
    }

    fn choose(&mut self, chooser: &mut Chooser) -> usize {
        let tied = self.best_rescuers();
        if tied.len() == 1 {
            return tied[0];
        }
        match chooser {
            Chooser::First => tied[0],
            Chooser::Random(rng) => tied[rng.gen_range(0..tied.len())],
            Chooser::Filters => filters::select(self.m, &self.margins, tied, self.tau),
        }
    }

    fn is_consistent(&self) -> bool {
        self.margins
            .iter()
            .zip(self.m.predictions())
            .all(|(&margin, &changed)| tau_row_consistent(margin, changed, self.tau))
    }

    /// Runs the greedy loop until the set is consistent or holds every agent.
    /// Returns `true` when a consistent set was reached before exhaustion.
    fn run(&mut self, chooser: &mut Chooser) -> bool {
        while self.size < self.m.n() {
            if self.is_consistent() {
                return true;
            }
            let next = self.choose(chooser);
            self.add(next);
        }
        false
    }

    /// Validation points along the trajectory that built this set.
    fn trail(&self) -> Vec<ValidationPoint> {
        let mut replay = Growth::new(self.m, self.columns, self.tau);
        self.additions
            .iter()
            .map(|&j| {
                replay.add(j);
                replay.checkpoint()
            })
            .collect()
    }
}

fn validate_sources(n: usize, order: &[usize]) -> Result<()> {
    match order.iter().find(|&&s| s >= n) {
        Some(&agent) => Err(Error::AgentOutOfBounds { agent, n }),
        None => Ok(()),
    }
}

/// Runs the Waterfall search.
///
/// Fails only if `config.source_order` names an agent outside `0..n`.
pub fn waterfall(m: &MatchingTransform, config: &WaterfallConfig) -> Result<WaterfallResult> {
    let n = m.n();
    let default_order: Vec<usize>;
    let order = match &config.source_order {
        Some(order) => {
            validate_sources(n, order)?;
            order.as_slice()
        }
        None => {
            default_order = (0..n).collect();
            &default_order
        }
    };
    let columns = Columns::new(m);
    let mut chooser = Chooser::new(config.tie_break);

    let empty = Growth::new(m, &columns, config.tau);
    let point = empty.checkpoint();
    if point.inconsistent_rows == 0 {
        return Ok(WaterfallResult {
            outcome: WaterfallOutcome::Found {
                influencers: InfluencerSet::empty(),
                source: None,
                additions: Vec::new(),
            },
            validation_points: vec![point],
            sources_tried: 0,
        });
    }

    // an agent in every matching set, when it alone is consistent
    for j in (0..n).filter(|&j| (0..m.m()).all(|k| m.matches(k, j))) {
        let mut single = Growth::new(m, &columns, config.tau);
        single.add(j);
        let point = single.checkpoint();
        if point.inconsistent_rows == 0 {
            return Ok(WaterfallResult {
                outcome: WaterfallOutcome::Found {
                    influencers: InfluencerSet::new([j]),
                    source: Some(j),
                    additions: vec![j],
                },
                validation_points: vec![point],
                sources_tried: 0,
            });
        }
    }

    for (tried, &source) in order.iter().enumerate() {
        let mut growth = Growth::new(m, &columns, config.tau);
        growth.add(source);
        if growth.run(&mut chooser) {
            let influencers = growth.set();
            let validation_points = growth.trail();
            debug_assert!(crate::feasibility::is_feasible(
                m,
                &influencers,
                crate::model::Protocol::TauMargin { tau: config.tau }
            ));
            return Ok(WaterfallResult {
                outcome: WaterfallOutcome::Found {
                    influencers,
                    source: Some(source),
                    additions: growth.additions,
                },
                validation_points,
                sources_tried: tried + 1,
            });
        }
    }

    let mut everyone = Growth::new(m, &columns, config.tau);
    (0..n).for_each(|j| everyone.add(j));
    let point = everyone.checkpoint();
    let outcome = if point.inconsistent_rows == 0 {
        WaterfallOutcome::Found {
            influencers: InfluencerSet::full(n),
            source: None,
            additions: (0..n).collect(),
        }
    } else {
        WaterfallOutcome::NotFound
    };
    Ok(WaterfallResult {
        outcome,
        validation_points: vec![point],
        sources_tried: order.len(),
    })
}

/// Greedy growth from an arbitrary starting set, without source restarts.
///
/// Returns the consistent set reached, or `None` if growth exhausted every
/// agent first. Useful for steering the search through a chosen trajectory.
pub fn grow_from(
    m: &MatchingTransform,
    start: &InfluencerSet,
    config: &WaterfallConfig,
) -> Result<Option<(InfluencerSet, Vec<usize>)>> {
    start.check_bounds(m.n())?;
    let columns = Columns::new(m);
    let mut growth = Growth::new(m, &columns, config.tau);
    start.iter().for_each(|j| growth.add(j));
    let mut chooser = Chooser::new(config.tie_break);
    let reached = growth.run(&mut chooser) || growth.is_consistent();
    Ok(reached.then(|| (growth.set(), growth.additions)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruteforce::MaskOracle;
    use crate::feasibility::is_feasible;
    use crate::matching::matching_transform;
    use crate::model::{Labelling, Protocol};
    use crate::oracle::oracle_examples;
    use crate::subsets::LexSubsets;

    fn sets(n: usize, rows: &[&[usize]], predictions: Vec<bool>) -> MatchingTransform {
        let sets: Vec<_> = rows.iter().map(|r| InfluencerSet::new(r.iter().copied())).collect();
        MatchingTransform::from_matching_sets(n, &sets, predictions).unwrap()
    }

    const ALL_TIE_BREAKS: [TieBreak; 3] = [TieBreak::FirstIndex, TieBreak::Filters, TieBreak::UniformRandom { seed: 5 }];

    #[test]
    fn no_changes_returns_the_empty_set() {
        let m = sets(4, &[&[0, 1], &[], &[3]], vec![false; 3]);
        for tb in ALL_TIE_BREAKS {
            let r = waterfall(&m, &WaterfallConfig::majority(tb)).unwrap();
            assert_eq!(r.influencers(), Some(&InfluencerSet::empty()));
            assert_eq!(r.sources_tried, 0);
        }
    }

    #[test]
    fn common_agent_is_found_as_a_singleton() {
        let m = sets(4, &[&[1, 2], &[2, 3], &[0, 2]], vec![true, true, false]);
        let config = WaterfallConfig {
            source_order: Some(vec![2, 0, 1, 3]),
            ..WaterfallConfig::majority(TieBreak::FirstIndex)
        };
        let r = waterfall(&m, &config).unwrap();
        assert_eq!(
            r.outcome,
            WaterfallOutcome::Found {
                influencers: InfluencerSet::new([2]),
                source: Some(2),
                additions: vec![2],
            }
        );
    }

    #[test]
    fn grows_past_a_tie() {
        // Example 1: source 0 is inconsistent on row 0; agents 2, 3 and 4 rescue it.
        let m = crate::fixtures::example_one_transform();
        let r = waterfall(&m, &WaterfallConfig::majority(TieBreak::FirstIndex)).unwrap();
        let f = r.influencers().unwrap();
        assert!(is_feasible(&m, f, Protocol::MAJORITY));
        let last = r.validation_points.last().unwrap();
        assert_eq!(last.inconsistent_rows, 0);
        assert_eq!(last.set_size, f.len());
    }

    #[test]
    fn bad_source_order_is_rejected() {
        let m = sets(2, &[&[0]], vec![true]);
        let config = WaterfallConfig {
            source_order: Some(vec![2]),
            ..Default::default()
        };
        assert!(waterfall(&m, &config).is_err());
    }

    #[test]
    fn contradictory_sample_is_not_found() {
        let m = MatchingTransform::from_rows(1, &[vec![1], vec![-1]], vec![true, true]).unwrap();
        let r = waterfall(&m, &WaterfallConfig::default()).unwrap();
        assert_eq!(r.outcome, WaterfallOutcome::NotFound);
    }

    #[test]
    fn full_set_fallback() {
        // every proper subset fails somewhere, the full set passes
        let m = sets(3, &[&[0, 1], &[1, 2], &[0, 2]], vec![true, true, true]);
        let r = waterfall(&m, &WaterfallConfig::majority(TieBreak::FirstIndex)).unwrap();
        assert!(r.is_found());
        assert!(is_feasible(&m, r.influencers().unwrap(), Protocol::MAJORITY));
    }

    #[test]
    fn seeded_random_runs_are_reproducible() {
        let ls = crate::oracle::generate_labellings(12, 14, crate::oracle::SamplerConfig::uniform_unique(4)).unwrap();
        let ex = oracle_examples(&InfluencerSet::new([1, 4, 5, 8, 9]), Protocol::MAJORITY, &ls).unwrap();
        let m = matching_transform(12, &ex).unwrap();
        let config = WaterfallConfig::majority(TieBreak::UniformRandom { seed: 77 });
        assert_eq!(waterfall(&m, &config).unwrap(), waterfall(&m, &config).unwrap());
    }

    #[test]
    fn tau_margin_results_are_consistent() {
        let ls = crate::oracle::generate_labellings(9, 12, crate::oracle::SamplerConfig::uniform_unique(8)).unwrap();
        for tau in 0..3 {
            let g = InfluencerSet::new([0, 2, 3, 5, 7, 8]);
            let ex = oracle_examples(&g, Protocol::TauMargin { tau }, &ls).unwrap();
            let m = matching_transform(9, &ex).unwrap();
            let config = WaterfallConfig {
                tau,
                ..WaterfallConfig::majority(TieBreak::Filters)
            };
            if let Some(f) = waterfall(&m, &config).unwrap().influencers() {
                assert!(is_feasible(&m, f, Protocol::TauMargin { tau }));
            }
        }
    }

    /// Prop. 5.3 shape: growth from one agent short of a feasible set
    /// completes in a single addition.
    #[test]
    fn one_short_of_feasible_completes_in_one_step() {
        let n = 4;
        let labellings: Vec<_> = (0..16u64).map(|b| Labelling::from_bits(n, b)).collect();
        let mut checked = 0;
        for size in 1..=3 {
            for sample in LexSubsets::new(16, size) {
                let ls: Vec<_> = sample.iter().map(|&i| labellings[i].clone()).collect();
                for g in 0..16u64 {
                    let ex = oracle_examples(&InfluencerSet::from_mask(g), Protocol::MAJORITY, &ls).unwrap();
                    let m = matching_transform(n, &ex).unwrap();
                    let oracle = MaskOracle::new(&m, Protocol::MAJORITY).unwrap();
                    for f in (1..16u64).filter(|&f| oracle.is_feasible(f)) {
                        let target = InfluencerSet::from_mask(f);
                        for j in target.iter() {
                            let mut start = target.clone();
                            start.remove(j);
                            for tb in ALL_TIE_BREAKS {
                                let (found, _) = grow_from(&m, &start, &WaterfallConfig::majority(tb))
                                    .unwrap()
                                    .expect("one agent short always completes");
                                assert!(is_feasible(&m, &found, Protocol::MAJORITY));
                                let expected = if oracle.is_feasible(f & !(1 << j)) {
                                    target.len() - 1
                                } else {
                                    target.len()
                                };
                                assert_eq!(found.len(), expected);
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 1000);
    }
}
