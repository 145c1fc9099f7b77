//! Learning who influences whom from observed threshold opinion updates.
//!
//! A target agent updates its opinion according to a protocol evaluated on
//! the labels of its (unknown) influencers. Given labelled examples, the
//! crate finds influencer sets consistent with every example: exactly for
//! unanimity and all-but-κ protocols, heuristically (the Waterfall) for
//! majority and other margin protocols, and by exhaustive search for
//! verification. It also encodes Hitting Set instances as majority samples
//! and runs the false-negative-rate experiments on random networks.

pub mod bruteforce;
pub mod chf;
pub mod error;
pub mod experiments;
pub mod feasibility;
pub mod graphs;
pub mod io;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod reduction;
pub mod subsets;
pub mod waterfall;

#[cfg(test)]
mod fixtures;

pub use error::{Error, Result};
pub use feasibility::{is_feasible, row_margin, row_margins, row_state, sample_size, RowState};
pub use matching::{matching_set, matching_transform, MatchingTransform};
pub use model::{apply_protocol, Example, InfluencerSet, Label, Labelling, Protocol};
pub use waterfall::{waterfall, TieBreak, WaterfallConfig, WaterfallOutcome, WaterfallResult};
