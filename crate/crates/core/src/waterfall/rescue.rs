use crate::feasibility::row_margins;
use crate::matching::MatchingTransform;
use crate::model::InfluencerSet;

/// Whether a row can take one more non-matching agent and stay consistent
/// under the τ-margin rule. At τ = 0 this is exactly the states I, IT, CT
/// and BC.
pub fn needs_rescue(margin: i64, changed: bool, tau: u32) -> bool {
    let tau = i64::from(tau);
    if changed {
        margin <= tau + 1
    } else {
        margin <= -tau
    }
}

/// Rows of `m` that need rescuing under `influencers`, ascending.
pub fn rescue_set(m: &MatchingTransform, influencers: &InfluencerSet, tau: u32) -> Vec<usize> {
    row_margins(m, influencers)
        .into_iter()
        .zip(m.predictions())
        .enumerate()
        .filter(|&(_, (margin, &changed))| needs_rescue(margin, changed, tau))
        .map(|(k, _)| k)
        .collect()
}
