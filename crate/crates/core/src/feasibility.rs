//! Row margins, row states and the feasibility check shared by every solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::MatchingTransform;
use crate::model::{InfluencerSet, Protocol};

/// Consistency class of one example row under a candidate influencer set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowState {
    /// Consistent.
    C,
    /// Barely consistent: changed, margin exactly 1.
    BC,
    /// Consistent tie: unchanged, margin 0.
    CT,
    /// Inconsistent tie: changed, margin 0.
    IT,
    /// Inconsistent: negative margin.
    I,
}

impl RowState {
    pub fn is_inconsistent(self) -> bool {
        matches!(self, RowState::I | RowState::IT)
    }

    /// Rows that cannot absorb one more non-matching agent.
    pub fn needs_rescue(self) -> bool {
        !matches!(self, RowState::C)
    }
}

/// Majority-dynamics classification. `BC` wins over `C` at margin 1 on changed rows.
pub fn row_state(margin: i64, changed: bool) -> RowState {
    match (margin, changed) {
        (m, _) if m < 0 => RowState::I,
        (0, true) => RowState::IT,
        (0, false) => RowState::CT,
        (1, true) => RowState::BC,
        _ => RowState::C,
    }
}

/// `|M(l_k) ∩ F| - |M(l_k)^c ∩ F|`.
pub fn row_margin(m: &MatchingTransform, influencers: &InfluencerSet, k: usize) -> Result<i64> {
    if k >= m.m() {
        return Err(Error::RowOutOfBounds { row: k, m: m.m() });
    }
    influencers.check_bounds(m.n())?;
    Ok(margin_unchecked(m, influencers, k))
}

pub(crate) fn margin_unchecked(m: &MatchingTransform, influencers: &InfluencerSet, k: usize) -> i64 {
    let row = m.row(k);
    influencers.iter().map(|j| i64::from(row[j])).sum()
}

/// Margins of every row.
///
/// # Panics
///
/// If an agent in `influencers` is out of bounds for `m`.
pub fn row_margins(m: &MatchingTransform, influencers: &InfluencerSet) -> Vec<i64> {
    assert!(
        influencers.check_bounds(m.n()).is_ok(),
        "influencer set {influencers} out of bounds for {} agents",
        m.n()
    );
    (0..m.m()).map(|k| margin_unchecked(m, influencers, k)).collect()
}

/// Whether a row with this margin and prediction is reproduced under `protocol`.
///
/// For all-but-κ the margin alone is not enough; use [`row_consistent_counts`].
pub fn tau_row_consistent(margin: i64, changed: bool, tau: u32) -> bool {
    let tau = i64::from(tau);
    if changed {
        margin > tau
    } else {
        margin >= -tau
    }
}

/// Consistency of a row given how many influencers match (`matching`) and
/// how many do not (`other`).
pub fn row_consistent_counts(matching: usize, other: usize, changed: bool, protocol: Protocol) -> bool {
    match protocol {
        Protocol::TauMargin { tau } => tau_row_consistent(matching as i64 - other as i64, changed, tau),
        Protocol::AllButK { kappa } => {
            let kappa = kappa as usize;
            if changed {
                // the non-matching influencers are the agreeing ones
                other <= kappa
            } else {
                matching > kappa
            }
        }
    }
}

/// Whether `influencers` reproduces every prediction in `m` under `protocol`.
///
/// # Panics
///
/// If an agent in `influencers` is out of bounds for `m`.
pub fn is_feasible(m: &MatchingTransform, influencers: &InfluencerSet, protocol: Protocol) -> bool {
    assert!(
        influencers.check_bounds(m.n()).is_ok(),
        "influencer set {influencers} out of bounds for {} agents",
        m.n()
    );
    let size = influencers.len();
    (0..m.m()).all(|k| {
        let row = m.row(k);
        let matching = influencers.iter().filter(|&j| row[j] == 1).count();
        row_consistent_counts(matching, size - matching, m.predictions()[k], protocol)
    })
}

/// Sample size `ceil((c / eps) * ((n + 1) + ln(1 / delta)))` sufficient for
/// (eps, delta)-PAC learning a threshold concept over `n` agents. The
/// constant `c` is not determined by the asymptotic bound and defaults to 1
/// in callers.
pub fn sample_size(epsilon: f64, delta: f64, n: usize, c: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1/2)")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1/2)")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale {c} must be positive")));
    }
    let raw = c / epsilon * ((n as f64 + 1.0) + (1.0 / delta).ln());
    Ok(raw.ceil() as usize)
}
