//! Labels, labellings, diffusion protocols and influencer sets.
//!
//! Every opinion is stored relative to the target agent: [`Label::Agree`]
//! means the agent currently holds the target's opinion. Agents are indexed
//! from 0.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Agree,
    Disagree,
}

impl Label {
    pub fn negate(self) -> Self {
        match self {
            Label::Agree => Label::Disagree,
            Label::Disagree => Label::Agree,
        }
    }

    /// `+1` for agreement, `-1` for disagreement.
    pub fn sign(self) -> i8 {
        match self {
            Label::Agree => 1,
            Label::Disagree => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Label::Agree),
            -1 => Some(Label::Disagree),
            _ => None,
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.sign())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let sign = i64::deserialize(deserializer)?;
        Label::from_sign(sign)
            .ok_or_else(|| serde::de::Error::custom(format!("label must be +1 or -1, got {sign}")))
    }
}

/// One opinion per non-target agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Labelling(Vec<Label>);

impl Labelling {
    pub fn new(labels: Vec<Label>) -> Self {
        Labelling(labels)
    }

    pub fn uniform(n: usize, label: Label) -> Self {
        Labelling(vec![label; n])
    }

    /// Builds the labelling whose agent `j` disagrees iff bit `j` of `bits` is set.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Labelling(
            (0..n)
                .map(|j| {
                    if bits >> j & 1 == 1 {
                        Label::Disagree
                    } else {
                        Label::Agree
                    }
                })
                .collect(),
        )
    }

    pub fn from_signs(signs: &[i64]) -> Result<Self> {
        signs
            .iter()
            .map(|&s| Label::from_sign(s).ok_or_else(|| Error::Parse(format!("label {s} is not +1 or -1"))))
            .collect::<Result<Vec<_>>>()
            .map(Labelling)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, agent: usize) -> Option<Label> {
        self.0.get(agent).copied()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        self.0.iter().copied()
    }
}

impl std::ops::Index<usize> for Labelling {
    type Output = Label;

    fn index(&self, agent: usize) -> &Label {
        &self.0[agent]
    }
}

/// Threshold rule deciding whether the target agent changes opinion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protocol {
    /// Change unless more than `kappa` influencers agree.
    AllButK { kappa: u32 },
    /// Change when disagreeing influencers outnumber agreeing ones by more than `tau`.
    TauMargin { tau: u32 },
}

impl Protocol {
    pub const MAJORITY: Protocol = Protocol::TauMargin { tau: 0 };
    pub const UNANIMITY: Protocol = Protocol::AllButK { kappa: 0 };
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::AllButK { kappa } => write!(f, "all-but-{kappa}"),
            Protocol::TauMargin { tau } => write!(f, "{tau}-margin"),
        }
    }
}

/// A labelling together with the oracle's change/no-change prediction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Example {
    #[serde(rename = "labels")]
    pub labelling: Labelling,
    pub changed: bool,
}

impl Example {
    pub fn new(labelling: Labelling, changed: bool) -> Self {
        Example { labelling, changed }
    }
}

/// A set of agent indices, kept sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct InfluencerSet(Vec<usize>);

impl InfluencerSet {
    pub fn new(agents: impl IntoIterator<Item = usize>) -> Self {
        let mut agents: Vec<usize> = agents.into_iter().collect();
        agents.sort_unstable();
        agents.dedup();
        InfluencerSet(agents)
    }

    pub fn empty() -> Self {
        InfluencerSet(Vec::new())
    }

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        InfluencerSet((0..n).collect())
    }

    pub fn from_mask(mask: u64) -> Self {
        InfluencerSet((0..64).filter(|&j| mask >> j & 1 == 1).collect())
    }

    /// Bitmask form; `None` if any agent index is 64 or above.
    pub fn to_mask(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, &j| (j < 64).then(|| acc | 1 << j))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.0.binary_search(&agent).is_ok()
    }

    /// Returns `false` if the agent was already present.
    pub fn insert(&mut self, agent: usize) -> bool {
        match self.0.binary_search(&agent) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, agent);
                true
            }
        }
    }

    pub fn remove(&mut self, agent: usize) -> bool {
        match self.0.binary_search(&agent) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_subset(&self, other: &InfluencerSet) -> bool {
        self.iter().all(|j| other.contains(j))
    }

    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&agent) if agent >= n => Err(Error::AgentOutOfBounds { agent, n }),
            _ => Ok(()),
        }
    }
}

impl<'de> Deserialize<'de> for InfluencerSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Vec::<usize>::deserialize(deserializer).map(InfluencerSet::new)
    }
}

impl FromIterator<usize> for InfluencerSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        InfluencerSet::new(iter)
    }
}

impl fmt::Display for InfluencerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// Evaluates the protocol for a target whose influencers are `influencers`.
pub fn apply_protocol(protocol: Protocol, labelling: &Labelling, influencers: &InfluencerSet) -> Result<bool> {
    influencers.check_bounds(labelling.len())?;
    let agree = influencers
        .iter()
        .filter(|&j| labelling[j] == Label::Agree)
        .count() as i64;
    let disagree = influencers.len() as i64 - agree;
    Ok(match protocol {
        Protocol::AllButK { kappa } => agree <= i64::from(kappa),
        Protocol::TauMargin { tau } => disagree - agree > i64::from(tau),
    })
}
