//! Matching sets and the ±1 matching transform.
//!
//! Row `k` of the transform marks with `+1` the agents whose label agrees with
//! the oracle's prediction for example `k`: disagreers on changed examples,
//! agreers on unchanged ones.

use crate::error::{Error, Result};
use crate::model::{Example, InfluencerSet, Label, Labelling};

/// Agents whose label matches the example's prediction.
pub fn matching_set(example: &Example) -> InfluencerSet {
    let wanted = matching_label(example.changed);
    example
        .labelling
        .iter()
        .enumerate()
        .filter(|&(_, l)| l == wanted)
        .map(|(j, _)| j)
        .collect()
}

fn matching_label(changed: bool) -> Label {
    if changed {
        Label::Disagree
    } else {
        Label::Agree
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingTransform {
    n: usize,
    // row-major, m * n
    entries: Vec<i8>,
    predictions: Vec<bool>,
}

impl MatchingTransform {
    /// Builds a transform from explicit `±1` rows.
    pub fn from_rows(n: usize, rows: &[Vec<i8>], predictions: Vec<bool>) -> Result<Self> {
        if rows.len() != predictions.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows but {} predictions",
                rows.len(),
                predictions.len()
            )));
        }
        let mut entries = Vec::with_capacity(rows.len() * n);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    row: k,
                    expected: n,
                    found: row.len(),
                });
            }
            if let Some(bad) = row.iter().find(|&&e| e != 1 && e != -1) {
                return Err(Error::Parse(format!("entry {bad} in row {k} is not +1 or -1")));
            }
            entries.extend_from_slice(row);
        }
        Ok(MatchingTransform {
            n,
            entries,
            predictions,
        })
    }

    /// Transform whose row `k` has `+1` exactly on `sets[k]`.
    pub fn from_matching_sets(n: usize, sets: &[InfluencerSet], predictions: Vec<bool>) -> Result<Self> {
        let rows = sets
            .iter()
            .map(|s| {
                s.check_bounds(n)?;
                Ok((0..n).map(|j| if s.contains(j) { 1 } else { -1 }).collect())
            })
            .collect::<Result<Vec<Vec<i8>>>>()?;
        MatchingTransform::from_rows(n, &rows, predictions)
    }

    pub fn empty(n: usize) -> Self {
        MatchingTransform {
            n,
            entries: Vec::new(),
            predictions: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.predictions.len()
    }

    pub fn predictions(&self) -> &[bool] {
        &self.predictions
    }

    pub fn row(&self, k: usize) -> &[i8] {
        &self.entries[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> + '_ {
        (0..self.m()).map(move |k| self.row(k))
    }

    pub fn entry(&self, k: usize, j: usize) -> i8 {
        self.entries[k * self.n + j]
    }

    pub fn matches(&self, k: usize, j: usize) -> bool {
        self.entry(k, j) == 1
    }

    pub fn matching_set(&self, k: usize) -> InfluencerSet {
        self.row(k)
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e == 1)
            .map(|(j, _)| j)
            .collect()
    }

    /// Per-row matching sets as bitmasks, or `None` when `n > 64`.
    pub fn row_masks(&self) -> Option<Vec<u64>> {
        (self.n <= 64).then(|| {
            self.rows()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(_, &e)| e == 1)
                        .fold(0u64, |acc, (j, _)| acc | 1 << j)
                })
                .collect()
        })
    }

    /// Recovers the examples this transform encodes.
    pub fn to_examples(&self) -> Vec<Example> {
        (0..self.m())
            .map(|k| {
                let changed = self.predictions[k];
                let on_match = matching_label(changed);
                let labels = self
                    .row(k)
                    .iter()
                    .map(|&e| if e == 1 { on_match } else { on_match.negate() })
                    .collect();
                Example::new(Labelling::new(labels), changed)
            })
            .collect()
    }
}

/// Encodes a sample as its matching transform.
pub fn matching_transform(n: usize, examples: &[Example]) -> Result<MatchingTransform> {
    let mut entries = Vec::with_capacity(examples.len() * n);
    for (k, ex) in examples.iter().enumerate() {
        if ex.labelling.len() != n {
            return Err(Error::LengthMismatch {
                row: k,
                expected: n,
                found: ex.labelling.len(),
            });
        }
        let wanted = matching_label(ex.changed);
        entries.extend(ex.labelling.iter().map(|l| if l == wanted { 1i8 } else { -1 }));
    }
    Ok(MatchingTransform {
        n,
        entries,
        predictions: examples.iter().map(|e| e.changed).collect(),
    })
}
