//! Exhaustive feasibility search over every subset of agents.
//!
//! Subsets are `u64` bitmasks, so the hard ceiling is 63 agents; the
//! default guard is far lower because the search is `2^n`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feasibility::row_consistent_counts;
use crate::matching::MatchingTransform;
use crate::model::{InfluencerSet, Protocol};

pub const DEFAULT_MAX_AGENTS: usize = 20;
const HARD_MAX_AGENTS: usize = 63;

/// Bitmask view of a transform specialised for repeated feasibility checks.
#[derive(Debug, Clone)]
pub struct MaskOracle {
    n: usize,
    rows: Vec<u64>,
    predictions: Vec<bool>,
    protocol: Protocol,
}

impl MaskOracle {
    pub fn new(m: &MatchingTransform, protocol: Protocol) -> Result<Self> {
        let rows = m.row_masks().filter(|_| m.n() <= HARD_MAX_AGENTS).ok_or(Error::TooManyAgents {
            n: m.n(),
            max: HARD_MAX_AGENTS,
        })?;
        Ok(MaskOracle {
            n: m.n(),
            rows,
            predictions: m.predictions().to_vec(),
            protocol,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_feasible(&self, set: u64) -> bool {
        let size = set.count_ones() as usize;
        self.rows.iter().zip(&self.predictions).all(|(&row, &changed)| {
            let matching = (row & set).count_ones() as usize;
            row_consistent_counts(matching, size - matching, changed, self.protocol)
        })
    }

    /// Any feasible subset of exactly `size` agents.
    pub fn find_of_size(&self, size: usize) -> Option<u64> {
        if size > self.n {
            return None;
        }
        let subsets: Vec<u64> = Combinations::new(self.n, size).collect();
        subsets.into_par_iter().find_first(|&s| self.is_feasible(s))
    }
}

/// `size`-subsets of `0..n` as bitmasks, in increasing numeric order.
#[derive(Debug, Clone)]
pub struct Combinations {
    next: Option<u64>,
    limit: u64,
}

impl Combinations {
    pub fn new(n: usize, size: usize) -> Self {
        assert!(n <= HARD_MAX_AGENTS);
        let next = (size <= n).then(|| if size == 0 { 0 } else { (1u64 << size) - 1 });
        Combinations { next, limit: 1u64 << n }
    }
}

impl Iterator for Combinations {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = (((ripple ^ cur) >> 2) / low) | ripple;
            (succ < self.limit).then_some(succ)
        };
        Some(cur)
    }
}

fn check_guard(n: usize, max_agents: usize) -> Result<()> {
    let cap = max_agents.min(HARD_MAX_AGENTS);
    if n > cap {
        Err(Error::TooManyAgents { n, max: cap })
    } else {
        Ok(())
    }
}

/// Every feasible subset, ordered by size and then lexicographically by
/// sorted agent list. `max_agents` is the enumeration guard; pass a larger
/// value to override [`DEFAULT_MAX_AGENTS`].
pub fn all_feasible_sets(m: &MatchingTransform, protocol: Protocol, max_agents: usize) -> Result<Vec<InfluencerSet>> {
    check_guard(m.n(), max_agents)?;
    let oracle = MaskOracle::new(m, protocol)?;
    let mut found: Vec<u64> = (0..1u64 << m.n())
        .into_par_iter()
        .filter(|&s| oracle.is_feasible(s))
        .collect();
    // lexicographic on index lists == the lowest differing bit belongs to the smaller set
    found.sort_by(|a, b| {
        a.count_ones()
            .cmp(&b.count_ones())
            .then_with(|| b.reverse_bits().cmp(&a.reverse_bits()))
    });
    Ok(found.into_iter().map(InfluencerSet::from_mask).collect())
}

/// Smallest feasible cardinality, or `None` when no subset is feasible.
pub fn min_feasible_size(m: &MatchingTransform, protocol: Protocol, max_agents: usize) -> Result<Option<usize>> {
    Ok(min_feasible_set(m, protocol, max_agents)?.map(|s| s.len()))
}

/// A feasible set of minimum cardinality.
pub fn min_feasible_set(m: &MatchingTransform, protocol: Protocol, max_agents: usize) -> Result<Option<InfluencerSet>> {
    check_guard(m.n(), max_agents)?;
    let oracle = MaskOracle::new(m, protocol)?;
    Ok((0..=m.n())
        .find_map(|size| oracle.find_of_size(size))
        .map(InfluencerSet::from_mask))
}
