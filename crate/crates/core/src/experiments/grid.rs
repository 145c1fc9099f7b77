use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{generate_graph, GraphModel, GraphSpec};
use crate::matching::matching_transform;
use crate::model::{Labelling, Protocol};
use crate::oracle::{generate_labellings, oracle_examples, SamplerConfig};
use crate::waterfall::{waterfall, TieBreak, WaterfallConfig};

use super::{thread_pool, workers_override};

/// Overrides `ExperimentConfig::workers` when set to a positive integer.
pub const WORKERS_ENV: &str = "NETINFER_WORKERS";

fn default_sizes() -> Vec<usize> {
    vec![10, 20, 30, 40, 50]
}

fn default_models() -> Vec<GraphModel> {
    GraphModel::ALL.to_vec()
}

fn default_p_values() -> Vec<f64> {
    vec![0.1, 0.25, 0.5, 0.75, 0.9]
}

fn default_networks() -> usize {
    40
}

fn default_samples() -> usize {
    50
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_sizes")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_sizes")]
    pub m_values: Vec<usize>,
    #[serde(default = "default_models")]
    pub models: Vec<GraphModel>,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<f64>,
    /// Networks per `(n, m, p)` point, divided evenly among `models`.
    #[serde(default = "default_networks")]
    pub networks_per_cell: usize,
    #[serde(default = "default_samples")]
    pub samples_per_cell: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_values: default_sizes(),
            m_values: default_sizes(),
            models: default_models(),
            p_values: default_p_values(),
            networks_per_cell: default_networks(),
            samples_per_cell: default_samples(),
            master_seed: 0,
            workers: default_workers(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_values.is_empty() || self.m_values.is_empty() || self.models.is_empty() || self.p_values.is_empty() {
            return bad("grid axes must be nonempty".into());
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 3) {
            return bad(format!("n = {n} below 3"));
        }
        if self.m_values.contains(&0) {
            return bad("m must be positive".into());
        }
        if let Some(p) = self.p_values.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return bad(format!("density {p} not in (0, 1)"));
        }
        if self.samples_per_cell == 0 || self.workers == 0 {
            return bad("samples_per_cell and workers must be positive".into());
        }
        if self.networks_per_cell == 0 || self.networks_per_cell % self.models.len() != 0 {
            return bad(format!(
                "networks_per_cell {} does not split evenly over {} models",
                self.networks_per_cell,
                self.models.len()
            ));
        }
        Ok(())
    }

    pub fn networks_per_model(&self) -> usize {
        self.networks_per_cell / self.models.len()
    }

    /// Worker count after applying the environment override.
    pub fn effective_workers(&self) -> usize {
        workers_override().unwrap_or(self.workers)
    }
}

/// One CSV line: a `(n, m, model, p)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnrRow {
    pub n: usize,
    pub m: usize,
    pub model: GraphModel,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub fnr: f64,
}

/// A network or sample that could not be produced; its trials are missing
/// from the corresponding row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub n: usize,
    pub m: usize,
    pub model: Option<GraphModel>,
    pub p: Option<f64>,
    pub network: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnrSummary {
    pub trials: u64,
    pub failures: u64,
    /// Fraction of `(network, agent, sample)` trials that found a set.
    pub trial_success_rate: f64,
    /// Fraction of `(network, sample)` runs in which every agent succeeded.
    pub run_success_rate: f64,
    pub mean_fnr: f64,
    pub fnr_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnrReport {
    pub rows: Vec<FnrRow>,
    pub errors: Vec<CellError>,
    pub summary: FnrSummary,
}

impl FnrReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "m", "model", "p", "trials", "failures", "fnr"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.m.to_string(),
                r.model.code().to_string(),
                r.p.to_string(),
                r.trials.to_string(),
                r.failures.to_string(),
                r.fnr.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// Human-readable error listing, one line per failed job.
    pub fn error_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.errors {
            let _ = write!(out, "n={} m={}", e.n, e.m);
            if let Some(model) = e.model {
                let _ = write!(out, " model={model}");
            }
            if let Some(p) = e.p {
                let _ = write!(out, " p={p}");
            }
            if let Some(k) = e.network {
                let _ = write!(out, " network={k}");
            }
            let _ = writeln!(out, ": {}", e.message);
        }
        out
    }
}

const SAMPLE_STREAM: u64 = 1;
const GRAPH_STREAM: u64 = 2;
const TIE_STREAM: u64 = 3;

/// `master_seed + task` on a purpose-specific ChaCha stream, folded back to
/// a 64-bit seed for the consumers that take one.
fn task_seed(master: u64, stream: u64, task: u64) -> u64 {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(master.wrapping_add(task));
    rng.set_stream(stream);
    rng.next_u64()
}

struct NetworkJob {
    cell: usize,
    network: usize,
    spec: GraphSpec,
    /// Index of the `(n, m)` pair whose shared samples this job uses.
    pair: usize,
    task: u64,
}

#[derive(Default)]
struct JobOutcome {
    trials: u64,
    failures: u64,
    runs: u64,
    clean_runs: u64,
}

fn run_network(
    job: &NetworkJob,
    samples: &[Vec<Labelling>],
    master: u64,
    tie_base: u64,
) -> Result<JobOutcome> {
    let graph = generate_graph(&job.spec)?;
    let influencers = graph.all_influencers();
    let n = job.spec.n;
    let mut out = JobOutcome::default();
    for (s, sample) in samples.iter().enumerate() {
        let mut clean = true;
        for (agent, truth) in influencers.iter().enumerate() {
            let examples = oracle_examples(truth, Protocol::MAJORITY, sample)?;
            let m = matching_transform(n, &examples)?;
            let tie_task = tie_base + (s * n + agent) as u64;
            let config = WaterfallConfig::majority(TieBreak::UniformRandom {
                seed: task_seed(master, TIE_STREAM, tie_task),
            });
            let result = waterfall(&m, &config)?;
            out.trials += 1;
            if !result.is_found() {
                out.failures += 1;
                clean = false;
            }
        }
        out.runs += 1;
        out.clean_runs += u64::from(clean);
    }
    Ok(out)
}

/// Runs the grid. Output is identical for identical configs regardless of
/// the worker count: every task derives its seeds from its own index.
pub fn run_fnr_grid(config: &ExperimentConfig) -> Result<FnrReport> {
    config.validate()?;
    let pool = thread_pool(config.effective_workers())?;
    let master = config.master_seed;

    let pairs: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| config.m_values.iter().map(move |&m| (n, m)))
        .collect();

    let per_model = config.networks_per_model();
    let mut cells = Vec::new();
    let mut jobs = Vec::new();
    for (pair, &(n, m)) in pairs.iter().enumerate() {
        for &model in &config.models {
            for &p in &config.p_values {
                let cell = cells.len();
                cells.push((n, m, model, p));
                for network in 0..per_model {
                    let task = jobs.len() as u64;
                    jobs.push(NetworkJob {
                        cell,
                        network,
                        spec: GraphSpec {
                            model,
                            n,
                            p,
                            seed: task_seed(master, GRAPH_STREAM, task),
                        },
                        pair,
                        task,
                    });
                }
            }
        }
    }

    let samples_per = config.samples_per_cell;
    let max_n = config.n_values.iter().copied().max().unwrap_or(0) as u64;
    let tie_span = samples_per as u64 * max_n;

    let (samples, outcomes) = pool.install(|| {
        let samples: Vec<Result<Vec<Vec<Labelling>>>> = pairs
            .par_iter()
            .enumerate()
            .map(|(pair, &(n, m))| {
                (0..samples_per)
                    .map(|s| {
                        let task = (pair * samples_per + s) as u64;
                        let seed = task_seed(master, SAMPLE_STREAM, task);
                        generate_labellings(n, m, SamplerConfig::uniform_unique(seed))
                    })
                    .collect()
            })
            .collect();
        let outcomes: Vec<Result<JobOutcome>> = jobs
            .par_iter()
            .map(|job| match &samples[job.pair] {
                Ok(shared) => run_network(job, shared, master, job.task * tie_span),
                Err(e) => Err(Error::InvalidParameter(format!("shared samples unavailable: {e}"))),
            })
            .collect();
        (samples, outcomes)
    });

    let mut errors = Vec::new();
    for (pair, result) in samples.iter().enumerate() {
        if let Err(e) = result {
            let (n, m) = pairs[pair];
            errors.push(CellError {
                n,
                m,
                model: None,
                p: None,
                network: None,
                message: e.to_string(),
            });
        }
    }

    let mut totals: Vec<JobOutcome> = cells.iter().map(|_| JobOutcome::default()).collect();
    for (job, outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(o) => {
                let t = &mut totals[job.cell];
                t.trials += o.trials;
                t.failures += o.failures;
                t.runs += o.runs;
                t.clean_runs += o.clean_runs;
            }
            Err(e) if samples[job.pair].is_ok() => {
                let (n, m, model, p) = cells[job.cell];
                errors.push(CellError {
                    n,
                    m,
                    model: Some(model),
                    p: Some(p),
                    network: Some(job.network),
                    message: e.to_string(),
                });
            }
            Err(_) => {}
        }
    }

    let rows: Vec<FnrRow> = cells
        .iter()
        .zip(&totals)
        .map(|(&(n, m, model, p), t)| FnrRow {
            n,
            m,
            model,
            p,
            trials: t.trials,
            failures: t.failures,
            fnr: if t.trials == 0 { 0.0 } else { t.failures as f64 / t.trials as f64 },
        })
        .collect();

    let summary = summarise(&rows, &totals);
    Ok(FnrReport { rows, errors, summary })
}

fn summarise(rows: &[FnrRow], totals: &[JobOutcome]) -> FnrSummary {
    let trials: u64 = totals.iter().map(|t| t.trials).sum();
    let failures: u64 = totals.iter().map(|t| t.failures).sum();
    let runs: u64 = totals.iter().map(|t| t.runs).sum();
    let clean: u64 = totals.iter().map(|t| t.clean_runs).sum();
    let measured: Vec<f64> = rows.iter().filter(|r| r.trials > 0).map(|r| r.fnr).collect();
    let k = measured.len() as f64;
    let mean = if measured.is_empty() { 0.0 } else { measured.iter().sum::<f64>() / k };
    let variance = if measured.is_empty() {
        0.0
    } else {
        measured.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / k
    };
    let ratio = |a: u64, b: u64| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    FnrSummary {
        trials,
        failures,
        trial_success_rate: ratio(trials - failures, trials),
        run_success_rate: ratio(clean, runs),
        mean_fnr: mean,
        fnr_variance: variance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            n_values: vec![6, 8],
            m_values: vec![4, 12],
            models: GraphModel::ALL.to_vec(),
            p_values: vec![0.25, 0.75],
            networks_per_cell: 4,
            samples_per_cell: 3,
            master_seed: 11,
            workers: 2,
        }
    }

    #[test]
    fn grid_shape_and_counts() {
        let report = run_fnr_grid(&tiny()).unwrap();
        assert!(report.errors.is_empty(), "{}", report.error_lines());
        assert_eq!(report.rows.len(), 2 * 2 * 4 * 2);
        for r in &report.rows {
            // one network per model, three samples, every agent
            assert_eq!(r.trials, (3 * r.n) as u64);
            assert!(r.failures <= r.trials);
        }
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("n,m,model,p,trials,failures,fnr\n"));
        assert_eq!(csv.lines().count(), 1 + report.rows.len());
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let a = run_fnr_grid(&tiny()).unwrap().to_csv().unwrap();
        let b = run_fnr_grid(&ExperimentConfig { workers: 1, ..tiny() }).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn all_found_cell_reports_zero() {
        // with every labelling present the sample pins down a feasible set quickly
        let cfg = ExperimentConfig {
            n_values: vec![3],
            m_values: vec![8],
            models: vec![GraphModel::ErdosRenyi],
            p_values: vec![0.5],
            networks_per_cell: 1,
            samples_per_cell: 2,
            master_seed: 0,
            workers: 1,
        };
        let report = run_fnr_grid(&cfg).unwrap();
        assert_eq!(report.rows[0].failures, 0);
        assert_eq!(report.rows[0].fnr, 0.0);
    }

    #[test]
    fn impossible_samples_are_reported() {
        let cfg = ExperimentConfig {
            n_values: vec![3],
            m_values: vec![9],
            models: vec![GraphModel::ErdosRenyi],
            p_values: vec![0.5],
            networks_per_cell: 1,
            samples_per_cell: 1,
            master_seed: 0,
            workers: 1,
        };
        let report = run_fnr_grid(&cfg).unwrap();
        assert_eq!(report.rows[0].trials, 0);
        assert_eq!(report.errors.len(), 1);
        assert!(report.error_lines().contains("n=3 m=9"));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        assert!(ExperimentConfig { networks_per_cell: 6, ..tiny() }.validate().is_err());
        assert!(ExperimentConfig { p_values: vec![1.0], ..tiny() }.validate().is_err());
        assert!(ExperimentConfig { n_values: vec![2], ..tiny() }.validate().is_err());
    }

    #[test]
    fn config_defaults_from_json() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"master_seed": 5, "workers": 3}"#).unwrap();
        assert_eq!(cfg.n_values, vec![10, 20, 30, 40, 50]);
        assert_eq!(cfg.networks_per_model(), 10);
        assert_eq!(cfg.samples_per_cell, 50);
    }
}
