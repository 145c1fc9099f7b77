//! Worked instances shared by unit tests. Indices are 0-based.

use crate::matching::{matching_transform, MatchingTransform};
use crate::model::{Example, Label::*, Labelling};
use crate::reduction::HittingSetInstance;

/// Two labellings over five agents: the first changes the target, the second does not.
pub fn example_one() -> Vec<Example> {
    vec![
        Example::new(Labelling::new(vec![Agree, Agree, Disagree, Disagree, Disagree]), true),
        Example::new(Labelling::new(vec![Disagree, Disagree, Agree, Agree, Disagree]), false),
    ]
}

pub fn example_one_transform() -> MatchingTransform {
    matching_transform(5, &example_one()).unwrap()
}

/// Budget 2 over s1..s5 with S1={s2,s3,s4,s5}, S2={s1,s4}, S3={s1,s5}, S4={s2}.
pub fn figure_two_instance() -> HittingSetInstance {
    let e = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    HittingSetInstance::new(
        e(&["s1", "s2", "s3", "s4", "s5"]),
        vec![
            e(&["s2", "s3", "s4", "s5"]),
            e(&["s1", "s4"]),
            e(&["s1", "s5"]),
            e(&["s2"]),
        ],
        2,
    )
    .unwrap()
}
