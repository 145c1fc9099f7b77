//! Streams and waterfalls: a row-wise view of majority feasibility.
//!
//! A stream picks one matching agent per row; a waterfall is a family of
//! streams that never share an agent on the same row. A set `F` is
//! majority-feasible exactly when a waterfall of at least `ceil(|F|/2)`
//! streams fits inside `F`, where an even `|F|` with a row matched by exactly
//! half of `F` is only allowed on unchanged rows.

use serde::Serialize;

use crate::matching::MatchingTransform;
use crate::model::InfluencerSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StreamWaterfall {
    /// Number of streams.
    pub size: usize,
    /// `streams[v][k]` is the agent stream `v` passes through on row `k`.
    pub streams: Vec<Vec<usize>>,
    /// `|M(l_k) ∩ F|` per row.
    pub row_widths: Vec<usize>,
}

impl StreamWaterfall {
    /// Agents used by any stream.
    pub fn ambit(&self) -> InfluencerSet {
        self.streams.iter().flatten().copied().collect()
    }
}

/// Builds the widest waterfall over the columns of `influencers`: stream `v`
/// takes the `v`-th matching agent (by index) of every row.
///
/// With no rows nothing constrains the streams, and the size is `|F|`.
pub fn build_waterfall_streams(m: &MatchingTransform, influencers: &InfluencerSet) -> StreamWaterfall {
    let per_row: Vec<Vec<usize>> = (0..m.m())
        .map(|k| influencers.iter().filter(|&j| m.matches(k, j)).collect())
        .collect();
    let row_widths: Vec<usize> = per_row.iter().map(Vec::len).collect();
    let size = row_widths.iter().copied().min().unwrap_or(influencers.len());
    let streams = if m.m() == 0 {
        Vec::new()
    } else {
        (0..size).map(|v| per_row.iter().map(|row| row[v]).collect()).collect()
    };
    StreamWaterfall {
        size,
        streams,
        row_widths,
    }
}

/// Majority feasibility decided through the waterfall size condition.
pub fn stream_feasible(m: &MatchingTransform, influencers: &InfluencerSet) -> bool {
    let wf = build_waterfall_streams(m, influencers);
    let f = influencers.len();
    if wf.size < f.div_ceil(2) {
        return false;
    }
    if f % 2 == 0 && wf.size == f / 2 {
        return wf
            .row_widths
            .iter()
            .zip(m.predictions())
            .all(|(&width, &changed)| width != f / 2 || !changed);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_one_transform;

    #[test]
    fn empty_row_intersection_gives_no_streams() {
        let m = example_one_transform();
        let wf = build_waterfall_streams(&m, &InfluencerSet::new([0, 1]));
        assert_eq!(wf.size, 0);
        assert!(wf.streams.is_empty());
    }

    #[test]
    fn example_one_waterfall() {
        let m = example_one_transform();
        let f = InfluencerSet::new([2, 3, 4]);
        let wf = build_waterfall_streams(&m, &f);
        // row intersections {2,3,4} and {2,3}
        assert_eq!(wf.row_widths, vec![3, 2]);
        assert_eq!(wf.size, 2);
        assert_eq!(wf.streams, vec![vec![2, 2], vec![3, 3]]);
        assert!(wf.ambit().is_subset(&f));
        assert!(stream_feasible(&m, &f));
    }

    #[test]
    fn streams_are_row_disjoint_and_matching() {
        let m = MatchingTransform::from_rows(
            4,
            &[vec![1, 1, -1, 1], vec![-1, 1, 1, 1], vec![1, -1, 1, 1]],
            vec![true, false, true],
        )
        .unwrap();
        let f = InfluencerSet::full(4);
        let wf = build_waterfall_streams(&m, &f);
        assert_eq!(wf.size, 3);
        for k in 0..m.m() {
            let mut seen: Vec<usize> = wf.streams.iter().map(|s| s[k]).collect();
            assert!(seen.iter().all(|&j| m.matches(k, j)));
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), wf.size);
        }
    }

    #[test]
    fn even_tie_only_on_unchanged_rows() {
        let m = MatchingTransform::from_rows(2, &[vec![1, -1]], vec![false]).unwrap();
        assert!(stream_feasible(&m, &InfluencerSet::full(2)));
        let m = MatchingTransform::from_rows(2, &[vec![1, -1]], vec![true]).unwrap();
        assert!(!stream_feasible(&m, &InfluencerSet::full(2)));
    }

    #[test]
    fn no_rows_is_vacuously_feasible() {
        let m = MatchingTransform::empty(3);
        let wf = build_waterfall_streams(&m, &InfluencerSet::new([0, 2]));
        assert_eq!(wf.size, 2);
        assert!(stream_feasible(&m, &InfluencerSet::new([0, 2])));
    }
}
