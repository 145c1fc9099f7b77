//! Multi-filter tie-breaking.
//!
//! Candidates are first ranked by how many rescue rows they match. While
//! ties remain, the most consistent margin level still in play is dropped
//! (BC rows first, then margin 0, -1, ...) and the survivors are re-ranked
//! on the rows that are left.

use crate::error::{Error, Result};
use crate::feasibility::row_margins;
use crate::matching::MatchingTransform;
use crate::model::InfluencerSet;

use super::rescue::needs_rescue;

/// Picks one agent outside `ambit` for the next addition.
pub fn filters_tiebreak(m: &MatchingTransform, ambit: &InfluencerSet, tau: u32) -> Result<usize> {
    let available: Vec<usize> = (0..m.n()).filter(|&j| !ambit.contains(j)).collect();
    if available.is_empty() {
        return Err(Error::InvalidParameter(
            "filters tie-break needs at least one agent outside the ambit".into(),
        ));
    }
    let margins = row_margins(m, ambit);
    Ok(select(m, &margins, available, tau))
}

/// `candidates` must be non-empty and sorted ascending.
pub(crate) fn select(m: &MatchingTransform, margins: &[i64], mut candidates: Vec<usize>, tau: u32) -> usize {
    debug_assert!(!candidates.is_empty());
    let rescue: Vec<(usize, i64)> = margins
        .iter()
        .zip(m.predictions())
        .enumerate()
        .filter(|&(_, (&margin, &changed))| needs_rescue(margin, changed, tau))
        .map(|(k, (&margin, _))| (k, margin))
        .collect();
    let mut levels: Vec<i64> = rescue.iter().map(|&(_, margin)| margin).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();

    let mut counts = vec![0usize; candidates.len()];
    for level in levels {
        counts.iter_mut().for_each(|c| *c = 0);
        for &(k, margin) in &rescue {
            if margin <= level {
                let row = m.row(k);
                for (c, &j) in counts.iter_mut().zip(&candidates) {
                    if row[j] == 1 {
                        *c += 1;
                    }
                }
            }
        }
        let best = counts.iter().copied().max().unwrap_or(0);
        let mut keep = counts.iter().map(|&c| c == best);
        candidates.retain(|_| keep.next().unwrap_or(false));
        counts.truncate(candidates.len());
        if candidates.len() == 1 {
            break;
        }
    }
    candidates[0]
}
