//! Hitting Set to majority-feasibility reduction.
//!
//! A Hitting Set instance with sets `S_1..S_m` and budget `d` becomes a
//! sample of `m + d + 2` always-changing examples over `|∪S_k| + d + 1`
//! agents. Agents `0..=d` are auxiliary ("a-agents"); the remaining
//! "b-agents" stand for universe elements in universe order. Feasible
//! influencer sets are exactly the a-agents plus the b-agents of a size-`d`
//! hitting set.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::MatchingTransform;
use crate::model::InfluencerSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HittingSetInstance {
    universe: Vec<String>,
    sets: Vec<Vec<String>>,
    budget: usize,
}

impl HittingSetInstance {
    /// Validates and normalises an instance. Duplicate members of a set are
    /// merged; the universe must list each element once and equal the union
    /// of the sets.
    pub fn new(universe: Vec<String>, sets: Vec<Vec<String>>, budget: usize) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidInstance("budget must be at least 1".into()));
        }
        let mut position = HashMap::with_capacity(universe.len());
        for (i, e) in universe.iter().enumerate() {
            if position.insert(e.as_str(), i).is_some() {
                return Err(Error::InvalidInstance(format!("element {e:?} listed twice in the universe")));
            }
        }
        let mut covered = vec![false; universe.len()];
        let mut normalised = Vec::with_capacity(sets.len());
        for (k, set) in sets.iter().enumerate() {
            let mut idx = BTreeSet::new();
            for e in set {
                let &i = position
                    .get(e.as_str())
                    .ok_or_else(|| Error::InvalidInstance(format!("set {k} contains {e:?}, not in the universe")))?;
                idx.insert(i);
                covered[i] = true;
            }
            normalised.push(idx.into_iter().map(|i| universe[i].clone()).collect());
        }
        if let Some(i) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidInstance(format!(
                "universe element {:?} belongs to no set",
                universe[i]
            )));
        }
        Ok(HittingSetInstance {
            universe,
            sets: normalised,
            budget,
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn sets(&self) -> &[Vec<String>] {
        &self.sets
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Whether `chosen` meets every set.
    pub fn is_hit_by(&self, chosen: &[String]) -> bool {
        self.sets.iter().all(|s| s.iter().any(|e| chosen.contains(e)))
    }
}

/// Agent index layout of an encoded instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLayout {
    pub budget: usize,
    /// `d + 1` auxiliary agents.
    pub a_agents: Vec<usize>,
    /// One agent per universe element.
    pub b_agents: Vec<usize>,
    /// `elements[i]` is the element represented by `b_agents[i]`.
    pub elements: Vec<String>,
}

impl ReductionLayout {
    pub fn n(&self) -> usize {
        self.a_agents.len() + self.b_agents.len()
    }

    /// Checks that the layout could have come from an encoding.
    pub fn validate(&self) -> Result<()> {
        if self.a_agents.len() != self.budget + 1 {
            return Err(Error::Parse(format!(
                "{} auxiliary agents for budget {}",
                self.a_agents.len(),
                self.budget
            )));
        }
        if self.elements.len() != self.b_agents.len() {
            return Err(Error::Parse(format!(
                "{} elements for {} element agents",
                self.elements.len(),
                self.b_agents.len()
            )));
        }
        let mut agents: Vec<usize> = self.a_agents.iter().chain(&self.b_agents).copied().collect();
        agents.sort_unstable();
        if agents.iter().enumerate().any(|(i, &j)| i != j) {
            return Err(Error::Parse("agent indices must be exactly 0..n".into()));
        }
        Ok(())
    }
}

/// Builds the always-changing sample whose feasible sets encode size-`d`
/// hitting sets.
pub fn encode_hitting_set(instance: &HittingSetInstance) -> (MatchingTransform, ReductionLayout) {
    let d = instance.budget;
    let universe_size = instance.universe.len();
    let n = universe_size + d + 1;
    let m = instance.sets.len();
    let a = |t: usize| t;
    let b = |i: usize| d + 1 + i;
    let index: HashMap<&str, usize> = instance
        .universe
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_str(), i))
        .collect();

    let mut rows = Vec::with_capacity(m + d + 2);
    // one row per set: every a-agent but the first, plus the set's elements
    for set in &instance.sets {
        let mut row = vec![-1i8; n];
        (1..=d).for_each(|t| row[a(t)] = 1);
        set.iter().for_each(|e| row[b(index[e.as_str()])] = 1);
        rows.push(row);
    }
    // d + 1 rows: a single a-agent plus every b-agent
    for t in 0..=d {
        let mut row = vec![1i8; n];
        (0..=d).filter(|&u| u != t).for_each(|u| row[a(u)] = -1);
        rows.push(row);
    }
    // all a-agents, no b-agents
    rows.push((0..n).map(|j| if j <= d { 1 } else { -1 }).collect());

    let predictions = vec![true; rows.len()];
    let transform = MatchingTransform::from_rows(n, &rows, predictions).expect("rows are well-formed by construction");
    let layout = ReductionLayout {
        budget: d,
        a_agents: (0..=d).map(a).collect(),
        b_agents: (0..universe_size).map(b).collect(),
        elements: instance.universe.clone(),
    };
    (transform, layout)
}

/// Reads a hitting set off a feasible influencer set of an encoding.
///
/// Feasible sets always consist of every a-agent and exactly `d` b-agents;
/// any other shape is reported as [`Error::NonConforming`].
pub fn decode_feasible_set(influencers: &InfluencerSet, layout: &ReductionLayout) -> Result<Vec<String>> {
    if let Some(missing) = layout.a_agents.iter().find(|&&a| !influencers.contains(a)) {
        return Err(Error::NonConforming(format!("auxiliary agent {missing} is missing")));
    }
    let b_position: HashMap<usize, usize> = layout.b_agents.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    let mut chosen = Vec::new();
    for j in influencers.iter() {
        if layout.a_agents.contains(&j) {
            continue;
        }
        let &i = b_position
            .get(&j)
            .ok_or_else(|| Error::NonConforming(format!("agent {j} is not part of the layout")))?;
        let element = layout
            .elements
            .get(i)
            .ok_or_else(|| Error::NonConforming(format!("agent {j} has no element")))?;
        chosen.push(element.clone());
    }
    if chosen.len() != layout.budget {
        return Err(Error::NonConforming(format!(
            "{} element agents chosen, budget is {}",
            chosen.len(),
            layout.budget
        )));
    }
    Ok(chosen)
}

/// Error bound `1 / (m + d + 3)`, strictly below one example's weight under
/// the uniform distribution on the `m + d + 2` encoded examples.
pub fn reduction_epsilon(m: usize, d: usize) -> Result<f64> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidParameter("m and d must be at least 1".into()));
    }
    Ok(1.0 / (m + d + 3) as f64)
}
