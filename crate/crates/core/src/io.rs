//! File formats: examples and instances as JSON, matching transforms as CSV.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;
use crate::graphs::DirectedGraph;
use crate::matching::{matching_transform, MatchingTransform};
use crate::model::{Example, InfluencerSet};
use crate::reduction::{HittingSetInstance, ReductionLayout};
use crate::waterfall::WaterfallResult;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplesFile {
    pub n: usize,
    pub examples: Vec<Example>,
}

impl ExamplesFile {
    pub fn new(n: usize, examples: Vec<Example>) -> Result<Self> {
        let file = ExamplesFile { n, examples };
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<()> {
        for (row, e) in self.examples.iter().enumerate() {
            if e.labelling.len() != self.n {
                return Err(Error::LengthMismatch {
                    row,
                    expected: self.n,
                    found: e.labelling.len(),
                });
            }
        }
        Ok(())
    }

    pub fn matching_transform(&self) -> Result<MatchingTransform> {
        matching_transform(self.n, &self.examples)
    }
}

pub fn parse_examples(text: &str) -> Result<ExamplesFile> {
    let file: ExamplesFile = serde_json::from_str(text)?;
    file.validate()?;
    Ok(file)
}

pub fn write_examples(file: &ExamplesFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}

/// Header `0,1,...,n-1,changed`; entries `±1`, `changed` as `0`/`1`.
pub fn write_transform_csv(m: &MatchingTransform) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..m.n()).map(|j| j.to_string()).collect();
    header.push("changed".into());
    w.write_record(&header)?;
    for (row, &changed) in m.rows().zip(m.predictions()) {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(u8::from(changed).to_string());
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_transform_csv(text: &str) -> Result<MatchingTransform> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.iter().last() != Some("changed") {
        return Err(Error::Parse("last column must be \"changed\"".into()));
    }
    let n = header.len() - 1;
    let mut rows = Vec::new();
    let mut predictions = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != n + 1 {
            return Err(Error::LengthMismatch {
                row: k,
                expected: n + 1,
                found: record.len(),
            });
        }
        let row = record
            .iter()
            .take(n)
            .map(|v| match v.trim() {
                "1" | "+1" => Ok(1i8),
                "-1" => Ok(-1i8),
                other => Err(Error::Parse(format!("row {k}: entry {other:?} is not ±1"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        let changed = match record[n].trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(Error::Parse(format!("row {k}: changed flag {other:?}"))),
        };
        rows.push(row);
        predictions.push(changed);
    }
    MatchingTransform::from_rows(n, &rows, predictions)
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum Element {
    Name(String),
    Index(i64),
}

impl Element {
    fn into_name(self) -> String {
        match self {
            Element::Name(s) => s,
            Element::Index(i) => i.to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    universe: Vec<Element>,
    sets: Vec<Vec<Element>>,
    budget: usize,
}

/// `{"universe": [...], "sets": [[...], ...], "budget": d}`; elements are
/// strings or integers.
pub fn parse_instance(text: &str) -> Result<HittingSetInstance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    HittingSetInstance::new(
        file.universe.into_iter().map(Element::into_name).collect(),
        file.sets
            .into_iter()
            .map(|s| s.into_iter().map(Element::into_name).collect())
            .collect(),
        file.budget,
    )
}

pub fn write_instance(instance: &HittingSetInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(instance)?)
}

pub fn parse_layout(text: &str) -> Result<ReductionLayout> {
    let layout: ReductionLayout = serde_json::from_str(text)?;
    layout.validate()?;
    Ok(layout)
}

pub fn write_layout(layout: &ReductionLayout) -> Result<String> {
    Ok(serde_json::to_string_pretty(layout)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InfluencerFile {
    Bare(InfluencerSet),
    Wrapped { influencers: InfluencerSet },
}

/// A bare array `[0, 2]` or an object with an `"influencers"` array, such
/// as a Waterfall result.
pub fn parse_influencers(text: &str) -> Result<InfluencerSet> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match serde_json::from_value::<InfluencerFile>(value) {
        Ok(InfluencerFile::Bare(s) | InfluencerFile::Wrapped { influencers: s }) => Ok(s),
        Err(_) => Err(Error::Parse(
            "expected an array of agent indices or an object with an \"influencers\" array".into(),
        )),
    }
}

#[derive(Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

pub fn parse_graph(text: &str) -> Result<DirectedGraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    DirectedGraph::new(file.n, file.edges)
}

pub fn write_graph(graph: &DirectedGraph) -> Result<String> {
    Ok(serde_json::to_string(graph)?)
}

pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

pub fn write_waterfall_result(result: &WaterfallResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}
