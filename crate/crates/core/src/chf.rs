//! Exact consistent hypothesis finders for all-but-κ dynamics.
//!
//! All three finders verify their answer with [`is_feasible`] before
//! returning it; `None` means no consistent influencer set was found.

use crate::error::{Error, Result};
use crate::feasibility::is_feasible;
use crate::matching::MatchingTransform;
use crate::model::{InfluencerSet, Protocol};
use crate::subsets::LexSubsets;

/// Unanimity finder: intersects the matching sets of all changed rows.
///
/// With no changed rows the intersection is every agent. If any
/// unanimity-consistent set exists, this one is, since every consistent set
/// lies inside the intersection and supersets keep unchanged rows satisfied.
pub fn chf_unanimity(m: &MatchingTransform) -> Option<InfluencerSet> {
    let mut keep = vec![true; m.n()];
    for (k, &changed) in m.predictions().iter().enumerate() {
        if changed {
            for (j, &e) in m.row(k).iter().enumerate() {
                keep[j] &= e == 1;
            }
        }
    }
    let candidate: InfluencerSet = (0..m.n()).filter(|&j| keep[j]).collect();
    is_feasible(m, &candidate, Protocol::UNANIMITY).then_some(candidate)
}

/// All-but-κ finder for samples where every prediction is "changed".
///
/// Searches subsets of size κ+1 down to 1 for one that meets every matching
/// set, then falls back to the empty set. Output size is at most κ+1.
pub fn chf_allbutk_always_changing(m: &MatchingTransform, kappa: u32) -> Result<Option<InfluencerSet>> {
    if let Some(row) = m.predictions().iter().position(|&c| !c) {
        return Err(Error::NotAlwaysChanging { row });
    }
    let protocol = Protocol::AllButK { kappa };
    let top = (kappa as usize + 1).min(m.n());
    for size in (1..=top).rev() {
        for subset in LexSubsets::new(m.n(), size) {
            let hits_every_row = (0..m.m()).all(|k| subset.iter().any(|&j| m.matches(k, j)));
            if hits_every_row {
                let candidate = InfluencerSet::new(subset);
                if is_feasible(m, &candidate, protocol) {
                    return Ok(Some(candidate));
                }
            }
        }
    }
    let empty = InfluencerSet::empty();
    Ok(is_feasible(m, &empty, protocol).then_some(empty))
}

/// General all-but-κ finder: the first feasible set in size-major,
/// lexicographic order, considering sizes up to `max_size` (default `n`).
///
/// On a sample generated by `G`, the search stops at size `|G|` at the latest.
pub fn chf_allbutk(m: &MatchingTransform, kappa: u32, max_size: Option<usize>) -> Option<InfluencerSet> {
    let protocol = Protocol::AllButK { kappa };
    let cap = max_size.unwrap_or(m.n()).min(m.n());
    (0..=cap)
        .flat_map(|size| LexSubsets::new(m.n(), size))
        .map(InfluencerSet::new)
        .find(|candidate| is_feasible(m, candidate, protocol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruteforce::{min_feasible_size, MaskOracle};
    use crate::matching::matching_transform;
    use crate::model::Labelling;
    use crate::oracle::oracle_examples;

    fn sets(n: usize, rows: &[&[usize]], predictions: Vec<bool>) -> MatchingTransform {
        let sets: Vec<_> = rows.iter().map(|r| InfluencerSet::new(r.iter().copied())).collect();
        MatchingTransform::from_matching_sets(n, &sets, predictions).unwrap()
    }

    #[test]
    fn unanimity_single_row() {
        let m = sets(4, &[&[1, 2]], vec![true]);
        assert_eq!(chf_unanimity(&m), Some(InfluencerSet::new([1, 2])));
    }

    #[test]
    fn unanimity_intersection() {
        let m = sets(5, &[&[1, 2, 3], &[2, 3, 4]], vec![true, true]);
        assert_eq!(chf_unanimity(&m), Some(InfluencerSet::new([2, 3])));
    }

    #[test]
    fn unanimity_without_changed_rows_takes_everyone() {
        let m = sets(3, &[&[0], &[2]], vec![false, false]);
        assert_eq!(chf_unanimity(&m), Some(InfluencerSet::full(3)));
        // an unchanged row matched by nobody cannot be satisfied
        let m = sets(3, &[&[], &[2]], vec![false, false]);
        assert_eq!(chf_unanimity(&m), None);
    }

    #[test]
    fn always_changing_kappa_zero_picks_a_common_agent() {
        let m = sets(5, &[&[1, 3], &[3, 4], &[0, 3]], vec![true; 3]);
        assert_eq!(chf_allbutk_always_changing(&m, 0).unwrap(), Some(InfluencerSet::new([3])));
    }

    #[test]
    fn always_changing_kappa_one_lexicographic() {
        // 1-based {1,2},{2,3},{1,3}; every pair meets every row
        let m = sets(3, &[&[0, 1], &[1, 2], &[0, 2]], vec![true; 3]);
        assert_eq!(chf_allbutk_always_changing(&m, 1).unwrap(), Some(InfluencerSet::new([0, 1])));
    }

    #[test]
    fn always_changing_rejects_unchanged_rows() {
        let m = sets(3, &[&[0], &[1]], vec![true, false]);
        assert!(matches!(chf_allbutk_always_changing(&m, 1), Err(Error::NotAlwaysChanging { row: 1 })));
    }

    #[test]
    fn allbutk_on_empty_sample_returns_empty_set() {
        assert_eq!(chf_allbutk(&MatchingTransform::empty(4), 2, None), Some(InfluencerSet::empty()));
    }

    #[test]
    fn allbutk_respects_max_size() {
        // only {0,1,2} meets the unchanged row at kappa = 2
        let m = sets(3, &[&[0, 1, 2]], vec![false]);
        assert_eq!(chf_allbutk(&m, 2, Some(2)), None);
        assert_eq!(chf_allbutk(&m, 2, None), Some(InfluencerSet::full(3)));
    }

    fn all_labellings(n: usize) -> Vec<Labelling> {
        (0..1u64 << n).map(|b| Labelling::from_bits(n, b)).collect()
    }

    /// Every sample of 1..=max distinct labellings, as index lists.
    fn samples(total: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
        (1..=max).flat_map(move |size| LexSubsets::new(total, size))
    }

    #[test]
    fn always_changing_matches_brute_force_exhaustively() {
        for n in 1..=4usize {
            let labellings = all_labellings(n);
            for kappa in 0..=2u32 {
                let protocol = Protocol::AllButK { kappa };
                for sample in samples(labellings.len(), 2) {
                    let examples: Vec<_> = sample
                        .iter()
                        .map(|&i| crate::model::Example::new(labellings[i].clone(), true))
                        .collect();
                    let m = matching_transform(n, &examples).unwrap();
                    let got = chf_allbutk_always_changing(&m, kappa).unwrap();
                    let oracle = MaskOracle::new(&m, protocol).unwrap();
                    let exists = (0..1u64 << n).any(|s| oracle.is_feasible(s));
                    assert_eq!(got.is_some(), exists);
                    if let Some(f) = got {
                        assert!(f.len() <= kappa as usize + 1);
                        assert!(is_feasible(&m, &f, protocol));
                    }
                }
            }
        }
    }

    #[test]
    fn allbutk_size_bound_on_oracle_samples() {
        let n = 4;
        let labellings = all_labellings(n);
        for kappa in 0..=1u32 {
            let protocol = Protocol::AllButK { kappa };
            for g in 0..1u64 << n {
                let g = InfluencerSet::from_mask(g);
                for sample in samples(labellings.len(), 2) {
                    let ls: Vec<_> = sample.iter().map(|&i| labellings[i].clone()).collect();
                    let m = matching_transform(n, &oracle_examples(&g, protocol, &ls).unwrap()).unwrap();
                    let f = chf_allbutk(&m, kappa, None).expect("oracle sample has a consistent set");
                    assert!(f.len() <= g.len());
                    assert_eq!(Some(f.len()), min_feasible_size(&m, protocol, 20).unwrap());
                }
            }
        }
    }

    #[test]
    fn unanimity_and_allbutk_zero_agree_on_verdicts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let n = rng.gen_range(1..=5);
            let m = rng.gen_range(0..=5);
            let rows: Vec<Vec<i8>> = (0..m)
                .map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect())
                .collect();
            let preds = (0..m).map(|_| rng.gen_bool(0.5)).collect();
            let mt = MatchingTransform::from_rows(n, &rows, preds).unwrap();
            assert_eq!(chf_unanimity(&mt).is_some(), chf_allbutk(&mt, 0, None).is_some());
        }
    }
}
