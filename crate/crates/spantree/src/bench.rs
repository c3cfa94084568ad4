//! Benchmark harness: case definitions, multi-run statistics, α sweeps,
//! timing reports, and CSV/JSON exports.
//!
//! A case bundles a design domain, a seed configuration, member properties,
//! search defaults, and a run count. Cases load from TOML files; a set of
//! built-in cases ships with the crate. Benchmarks fan a master seed out to
//! the individual runs (`run i` uses `master_seed + i`), so a report is
//! reproducible run-for-run while the runs stay independent.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{EnvError, TrussEnv};
use crate::geometry::Point;
use crate::mcts::{train, MctsError, RunResult, SearchConfig};
use crate::model::{
    Configuration, DesignDomain, Element, ElementProperties, ModelError,
};
use crate::oracle::{objective_ratio, percentile_score, SearchSpaceSummary};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("schema error in {source_name}: {message}")]
    Schema { source_name: String, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Mcts(#[from] MctsError),
}

/// A fully resolved benchmark case.
#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub name: String,
    pub domain: DesignDomain,
    pub properties: ElementProperties,
    pub seed: Configuration,
    pub search: SearchConfig,
    pub runs: u32,
    /// Objective of the best design published for this benchmark's original
    /// geometry. Shipped seeds are nominal reconstructions of drawings, so
    /// this is reported for orientation, never asserted.
    pub reference_objective: Option<f64>,
}

impl CaseSpec {
    /// Builds the environment for this case, validating the whole bundle.
    pub fn env(&self) -> Result<TrussEnv, EnvError> {
        TrussEnv::new(self.domain.clone(), self.properties, self.seed.clone())
    }
}

fn default_runs() -> u32 {
    10
}

#[derive(Deserialize)]
struct CaseFile {
    name: String,
    #[serde(default = "default_runs")]
    runs: u32,
    #[serde(default)]
    reference_objective: Option<f64>,
    domain: DesignDomain,
    properties: ElementProperties,
    seed: SeedDef,
    #[serde(default)]
    search: SearchConfig,
}

#[derive(Deserialize)]
struct SeedDef {
    #[serde(default)]
    nodes: Vec<[i64; 2]>,
    elements: Vec<[[i64; 2]; 2]>,
}

/// Parses a case from TOML text. `source_name` labels schema errors.
pub fn parse_case(text: &str, source_name: &str) -> Result<CaseSpec, BenchError> {
    let schema = |message: String| BenchError::Schema {
        source_name: source_name.to_string(),
        message,
    };
    let file: CaseFile = toml::from_str(text).map_err(|e| schema(e.to_string()))?;

    let mut nodes: Vec<Point> =
        file.seed.nodes.iter().map(|[x, y]| Point::new(*x, *y)).collect();
    let mut elements = Vec::with_capacity(file.seed.elements.len());
    for [[ax, ay], [bx, by]] in &file.seed.elements {
        let a = Point::new(*ax, *ay);
        let b = Point::new(*bx, *by);
        nodes.push(a);
        nodes.push(b);
        elements.push(Element::new(a, b).map_err(|e| schema(e.to_string()))?);
    }
    let seed = Configuration::new(nodes, elements).map_err(|e| schema(e.to_string()))?;

    let spec = CaseSpec {
        name: file.name,
        domain: file.domain,
        properties: file.properties,
        seed,
        search: file.search,
        runs: file.runs,
        reference_objective: file.reference_objective,
    };
    // Cross-field validation happens where it all comes together.
    spec.env().map_err(|e| schema(e.to_string()))?;
    Ok(spec)
}

/// Loads a case from a TOML file.
pub fn load_case(path: impl AsRef<Path>) -> Result<CaseSpec, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_case(&text, &path.display().to_string())
}

macro_rules! builtin_cases {
    ($($name:literal => $file:literal),* $(,)?) => {
        /// Names of the cases compiled into the crate.
        pub fn builtin_case_names() -> &'static [&'static str] {
            &[$($name),*]
        }

        /// Returns a built-in case by name.
        pub fn builtin_case(name: &str) -> Option<CaseSpec> {
            let text = match name {
                $($name => include_str!(concat!("cases/", $file)),)*
                _ => return None,
            };
            Some(parse_case(text, name).expect("built-in case must parse"))
        }
    };
}

builtin_cases! {
    "case1" => "case1.toml",
    "case2" => "case2.toml",
    "case3" => "case3.toml",
    "case4" => "case4.toml",
    "case5" => "case5.toml",
    "case6" => "case6.toml",
    "cantilever" => "cantilever.toml",
    "cantilever_small" => "cantilever_small.toml",
    "bridge" => "bridge.toml",
}

/// Resolves a case argument: a built-in name first, a TOML path otherwise.
pub fn resolve_case(name_or_path: &str) -> Result<CaseSpec, BenchError> {
    match builtin_case(name_or_path) {
        Some(spec) => Ok(spec),
        None => load_case(name_or_path),
    }
}

/// Aggregated outcome of `runs` independent trainings of one case.
#[derive(Clone, Debug)]
pub struct BenchReport {
    pub case_name: String,
    pub master_seed: u64,
    pub runs: Vec<RunResult>,
    /// Mean and sample standard deviation of the best-so-far objective,
    /// per episode, across runs.
    pub curve_mean: Vec<f64>,
    pub curve_std: Vec<f64>,
    pub mean_best_objective: f64,
    pub std_best_objective: f64,
    /// FE evaluations required to achieve each run's final best design,
    /// averaged over runs. This is the cost-to-achieve statistic that
    /// benchmark tables usually quote.
    pub mean_fe_runs: f64,
    pub std_fe_runs: f64,
    /// FE evaluations over the whole episode budget, averaged over runs.
    pub mean_fe_total: f64,
    pub std_fe_total: f64,
    /// Per-run percentile scores against the oracle distribution, when one
    /// was supplied. Runs without a stable design score zero.
    pub percentiles: Option<Vec<f64>>,
    pub mean_percentile: Option<f64>,
    pub std_percentile: Option<f64>,
    /// Per-run `100 · optimal / achieved` ratios, when an oracle was given.
    pub mean_objective_ratio: Option<f64>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Trains `spec.runs` independent searches with seeds `master_seed + i` and
/// aggregates the statistics. Pass an oracle summary to add percentile and
/// objective-ratio columns.
pub fn run_benchmark(
    spec: &CaseSpec,
    oracle: Option<&SearchSpaceSummary>,
) -> Result<BenchReport, BenchError> {
    let master_seed = spec.search.rng_seed;
    let runs: Vec<RunResult> = (0..spec.runs)
        .into_par_iter()
        .map(|i| -> Result<RunResult, BenchError> {
            let env = spec.env()?;
            let cfg = SearchConfig {
                rng_seed: master_seed + i as u64,
                ..spec.search
            };
            Ok(train(&env, &cfg)?)
        })
        .collect::<Result<_, _>>()?;

    let episodes = spec.search.episodes as usize;
    let mut curve_mean = Vec::with_capacity(episodes);
    let mut curve_std = Vec::with_capacity(episodes);
    for e in 0..episodes {
        let at_e: Vec<f64> = runs.iter().map(|r| r.episodes[e].best_objective).collect();
        let (m, s) = mean_std(&at_e);
        curve_mean.push(m);
        curve_std.push(s);
    }

    let finals: Vec<f64> = runs
        .iter()
        .map(|r| r.best.as_ref().map_or(f64::INFINITY, |b| b.objective))
        .collect();
    let (mean_best_objective, std_best_objective) = mean_std(&finals);
    let fe_to_best: Vec<f64> = runs.iter().map(|r| r.fe_evals_to_best as f64).collect();
    let (mean_fe_runs, std_fe_runs) = mean_std(&fe_to_best);
    let fe_total: Vec<f64> = runs.iter().map(|r| r.fe_evals as f64).collect();
    let (mean_fe_total, std_fe_total) = mean_std(&fe_total);

    let mut percentiles = None;
    let mut mean_percentile = None;
    let mut std_percentile = None;
    let mut mean_objective_ratio = None;
    if let Some(summary) = oracle {
        if !summary.samples.is_empty() {
            let per_run: Vec<f64> = finals
                .iter()
                .map(|best| {
                    if best.is_finite() {
                        percentile_score(*best, summary)
                    } else {
                        0.0
                    }
                })
                .collect();
            let (m, s) = mean_std(&per_run);
            percentiles = Some(per_run);
            mean_percentile = Some(m);
            std_percentile = Some(s);
            if let Some(optimal) = summary.best_objective() {
                let ratios: Vec<f64> = finals
                    .iter()
                    .filter(|b| b.is_finite())
                    .map(|b| objective_ratio(optimal, *b))
                    .collect();
                if !ratios.is_empty() {
                    mean_objective_ratio = Some(mean_std(&ratios).0);
                }
            }
        }
    }

    Ok(BenchReport {
        case_name: spec.name.clone(),
        master_seed,
        runs,
        curve_mean,
        curve_std,
        mean_best_objective,
        std_best_objective,
        mean_fe_runs,
        std_fe_runs,
        mean_fe_total,
        std_fe_total,
        percentiles,
        mean_percentile,
        std_percentile,
        mean_objective_ratio,
    })
}

/// One row of an α sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub mean_percentile: Option<f64>,
    pub std_percentile: Option<f64>,
    /// Mean FE evaluations required to achieve the per-run best designs.
    pub mean_fe_runs: f64,
    pub std_fe_runs: f64,
    /// Mean FE evaluations over the full episode budget.
    pub mean_fe_total: f64,
    pub mean_best_objective: f64,
}

/// Runs the benchmark once per α value, holding everything else fixed.
pub fn alpha_sweep(
    spec: &CaseSpec,
    alphas: &[f64],
    oracle: Option<&SearchSpaceSummary>,
) -> Result<Vec<SweepRow>, BenchError> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut swept = spec.clone();
        swept.search.alpha = alpha;
        let report = run_benchmark(&swept, oracle)?;
        rows.push(SweepRow {
            alpha,
            mean_percentile: report.mean_percentile,
            std_percentile: report.std_percentile,
            mean_fe_runs: report.mean_fe_runs,
            std_fe_runs: report.std_fe_runs,
            mean_fe_total: report.mean_fe_total,
            mean_best_objective: report.mean_best_objective,
        });
    }
    Ok(rows)
}

/// Per-phase timing table of one run.
#[derive(Clone, Debug)]
pub struct TimingTable {
    /// `(phase, seconds, percentage)` rows; percentages sum to 100.
    pub rows: Vec<(&'static str, f64, f64)>,
    pub total_seconds: f64,
    pub covers_node_calls: u64,
    pub covers_node_seconds: f64,
}

impl TimingTable {
    pub fn simulation_share(&self) -> f64 {
        self.rows
            .iter()
            .find(|(name, _, _)| *name == "simulation")
            .map(|(_, _, pct)| *pct)
            .unwrap_or(0.0)
    }
}

impl std::fmt::Display for TimingTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<16} {:>12} {:>9}", "phase", "seconds", "share")?;
        for (name, secs, pct) in &self.rows {
            writeln!(f, "{name:<16} {secs:>12.4} {pct:>8.2}%")?;
        }
        writeln!(f, "{:<16} {:>12.4} {:>8.2}%", "total", self.total_seconds, 100.0)?;
        writeln!(
            f,
            "covers-node calls: {} ({:.4} s measured)",
            self.covers_node_calls, self.covers_node_seconds
        )
    }
}

/// Breaks a run's wall time into the four phases plus `other`, and reports
/// the node-coverage hot-path counters.
pub fn timing_report(result: &RunResult) -> TimingTable {
    let t = &result.timings;
    let total = t.total.as_secs_f64();
    let pct = |secs: f64| if total > 0.0 { 100.0 * secs / total } else { 0.0 };
    let rows = vec![
        ("selection", t.selection.as_secs_f64(), pct(t.selection.as_secs_f64())),
        ("expansion", t.expansion.as_secs_f64(), pct(t.expansion.as_secs_f64())),
        ("simulation", t.simulation.as_secs_f64(), pct(t.simulation.as_secs_f64())),
        (
            "backpropagation",
            t.backpropagation.as_secs_f64(),
            pct(t.backpropagation.as_secs_f64()),
        ),
        ("other", t.other().as_secs_f64(), pct(t.other().as_secs_f64())),
    ];
    TimingTable {
        rows,
        total_seconds: total,
        covers_node_calls: result.covers_node.calls,
        covers_node_seconds: result.covers_node.time().as_secs_f64(),
    }
}

// ---------------------------------------------------------------------------
// Serialization: per-episode CSV, summary JSON, distribution CSV, sweep CSV.
// ---------------------------------------------------------------------------

/// Writes the per-episode learning curve: `episode,best_objective,fe_evals`.
pub fn write_episode_csv<W: Write>(out: &mut W, result: &RunResult) -> io::Result<()> {
    writeln!(out, "episode,best_objective,fe_evals")?;
    for rec in &result.episodes {
        writeln!(out, "{},{},{}", rec.episode, rec.best_objective, rec.fe_evals)?;
    }
    Ok(())
}

/// Writes the oracle's objective distribution, one sample per row.
pub fn write_distribution_csv<W: Write>(
    out: &mut W,
    summary: &SearchSpaceSummary,
) -> io::Result<()> {
    writeln!(out, "objective")?;
    for d in &summary.samples {
        writeln!(out, "{d}")?;
    }
    Ok(())
}

/// Writes an α-sweep table.
pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(
        out,
        "alpha,mean_percentile,std_percentile,mean_fe_runs,std_fe_runs,mean_fe_total,mean_best_objective"
    )?;
    for r in rows {
        let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.alpha,
            fmt_opt(r.mean_percentile),
            fmt_opt(r.std_percentile),
            r.mean_fe_runs,
            r.std_fe_runs,
            r.mean_fe_total,
            r.mean_best_objective
        )?;
    }
    Ok(())
}

/// JSON-friendly design: nodes and elements as coordinate arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignRecord {
    pub objective: f64,
    pub nodes: Vec<[i64; 2]>,
    pub elements: Vec<[[i64; 2]; 2]>,
    #[serde(default)]
    pub actions: Vec<String>,
}

impl DesignRecord {
    pub fn from_best(best: &crate::mcts::BestDesign) -> Self {
        DesignRecord {
            objective: best.objective,
            nodes: best.config.active_nodes().map(|p| [p.x, p.y]).collect(),
            elements: best
                .config
                .elements()
                .map(|e| [[e.a().x, e.a().y], [e.b().x, e.b().y]])
                .collect(),
            actions: best.actions.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn configuration(&self) -> Result<Configuration, ModelError> {
        let nodes = self.nodes.iter().map(|[x, y]| Point::new(*x, *y));
        let elements = self
            .elements
            .iter()
            .map(|[[ax, ay], [bx, by]]| {
                Element::new(Point::new(*ax, *ay), Point::new(*bx, *by))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Configuration::new(nodes, elements)
    }
}

/// Per-run slice of a summary record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub rng_seed: u64,
    pub best_objective: Option<f64>,
    pub fe_evals: u64,
    #[serde(default)]
    pub fe_evals_to_best: u64,
    pub tree_size: usize,
    pub timings_seconds: BTreeMap<String, f64>,
    pub covers_node_calls: u64,
}

/// The JSON summary written next to the per-episode CSVs. Self-contained:
/// it embeds the domain so a stored best design can be re-rendered.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub case: String,
    pub master_seed: u64,
    pub runs: u32,
    pub alpha: f64,
    pub beta: f64,
    pub uct: String,
    pub episodes: u32,
    pub domain: DesignDomain,
    pub properties: ElementProperties,
    pub mean_best_objective: f64,
    pub std_best_objective: f64,
    pub mean_fe_runs: f64,
    pub std_fe_runs: f64,
    #[serde(default)]
    pub mean_fe_total: f64,
    #[serde(default)]
    pub std_fe_total: f64,
    #[serde(default)]
    pub mean_percentile: Option<f64>,
    #[serde(default)]
    pub std_percentile: Option<f64>,
    #[serde(default)]
    pub mean_objective_ratio: Option<f64>,
    #[serde(default)]
    pub reference_objective: Option<f64>,
    #[serde(default)]
    pub best: Option<DesignRecord>,
    pub per_run: Vec<RunRecord>,
}

/// Assembles the summary record for a finished benchmark.
pub fn summary_record(spec: &CaseSpec, report: &BenchReport) -> SummaryRecord {
    let best = report
        .runs
        .iter()
        .filter_map(|r| r.best.as_ref())
        .min_by(|a, b| a.objective.partial_cmp(&b.objective).unwrap())
        .map(DesignRecord::from_best);
    let per_run = report
        .runs
        .iter()
        .map(|r| {
            let t = &r.timings;
            let timings_seconds = BTreeMap::from([
                ("selection".to_string(), t.selection.as_secs_f64()),
                ("expansion".to_string(), t.expansion.as_secs_f64()),
                ("simulation".to_string(), t.simulation.as_secs_f64()),
                ("backpropagation".to_string(), t.backpropagation.as_secs_f64()),
                ("other".to_string(), t.other().as_secs_f64()),
                ("total".to_string(), t.total.as_secs_f64()),
            ]);
            RunRecord {
                rng_seed: r.config.rng_seed,
                best_objective: r.best.as_ref().map(|b| b.objective),
                fe_evals: r.fe_evals,
                fe_evals_to_best: r.fe_evals_to_best,
                tree_size: r.tree_size,
                timings_seconds,
                covers_node_calls: r.covers_node.calls,
            }
        })
        .collect();
    SummaryRecord {
        case: spec.name.clone(),
        master_seed: report.master_seed,
        runs: spec.runs,
        alpha: spec.search.alpha,
        beta: spec.search.beta,
        uct: format!("{:?}", spec.search.uct).to_lowercase(),
        episodes: spec.search.episodes,
        domain: spec.domain.clone(),
        properties: spec.properties,
        mean_best_objective: report.mean_best_objective,
        std_best_objective: report.std_best_objective,
        mean_fe_runs: report.mean_fe_runs,
        std_fe_runs: report.std_fe_runs,
        mean_fe_total: report.mean_fe_total,
        std_fe_total: report.std_fe_total,
        mean_percentile: report.mean_percentile,
        std_percentile: report.std_percentile,
        mean_objective_ratio: report.mean_objective_ratio,
        reference_objective: spec.reference_objective,
        best,
        per_run,
    }
}

pub fn write_summary_json<W: Write>(out: &mut W, record: &SummaryRecord) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, record)?;
    writeln!(out)
}

pub fn read_summary_json(path: impl AsRef<Path>) -> Result<SummaryRecord, BenchError> {
    let text = std::fs::read_to_string(path.as_ref())?;
    serde_json::from_str(&text).map_err(|e| BenchError::Schema {
        source_name: path.as_ref().display().to_string(),
        message: e.to_string(),
    })
}

/// Disk form of an oracle summary, so exhaustive enumerations can be cached.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleRecord {
    pub case: String,
    pub raw_terminal_sequences: u64,
    pub unique_terminals: u64,
    pub unstable_terminals: u64,
    pub dead_end_terminals: u64,
    pub truncated: bool,
    pub best: Option<DesignRecord>,
    pub samples: Vec<f64>,
}

impl OracleRecord {
    pub fn from_summary(case: &str, summary: &SearchSpaceSummary) -> Self {
        OracleRecord {
            case: case.to_string(),
            raw_terminal_sequences: summary.raw_terminal_sequences,
            unique_terminals: summary.unique_terminals,
            unstable_terminals: summary.unstable_terminals,
            dead_end_terminals: summary.dead_end_terminals,
            truncated: summary.truncated,
            best: summary.best.as_ref().map(|(config, objective)| DesignRecord {
                objective: *objective,
                nodes: config.active_nodes().map(|p| [p.x, p.y]).collect(),
                elements: config
                    .elements()
                    .map(|e| [[e.a().x, e.a().y], [e.b().x, e.b().y]])
                    .collect(),
                actions: Vec::new(),
            }),
            samples: summary.samples.clone(),
        }
    }

    pub fn into_summary(self) -> Result<SearchSpaceSummary, BenchError> {
        let best = match self.best {
            Some(design) => {
                Some((design.configuration()?, design.objective))
            }
            None => None,
        };
        Ok(SearchSpaceSummary {
            raw_terminal_sequences: self.raw_terminal_sequences,
            unique_terminals: self.unique_terminals,
            unstable_terminals: self.unstable_terminals,
            dead_end_terminals: self.dead_end_terminals,
            samples: self.samples,
            best,
            truncated: self.truncated,
        })
    }
}

pub fn write_oracle_json<W: Write>(out: &mut W, record: &OracleRecord) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, record)?;
    writeln!(out)
}

pub fn read_oracle_json(path: impl AsRef<Path>) -> Result<OracleRecord, BenchError> {
    let text = std::fs::read_to_string(path.as_ref())?;
    serde_json::from_str(&text).map_err(|e| BenchError::Schema {
        source_name: path.as_ref().display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_cases_all_parse_and_validate() {
        for name in builtin_case_names() {
            let spec = builtin_case(name).unwrap_or_else(|| panic!("missing case {name}"));
            assert_eq!(&spec.name, name);
            spec.env().unwrap();
        }
    }

    #[test]
    fn case1_matches_its_published_settings() {
        let spec = builtin_case("case1").unwrap();
        assert_eq!((spec.domain.width, spec.domain.height), (4, 3));
        assert_eq!(spec.domain.horizon, Some(2));
        assert_eq!(spec.domain.v_max, Some(160.0));
        assert_eq!(spec.properties.young_modulus, 1000.0);
        assert_eq!(spec.properties.area, 1.0);
        assert_eq!(spec.runs, 10);
    }

    #[test]
    fn bridge_has_a_central_passive_region() {
        let spec = builtin_case("bridge").unwrap();
        assert_eq!((spec.domain.width, spec.domain.height), (80, 30));
        assert!(!spec.domain.passive_regions.is_empty());
        assert!(spec.domain.target_node.is_some());
        assert!(spec.domain.self_weight_density > 0.0);
    }

    #[test]
    fn malformed_case_is_a_schema_error() {
        let err = parse_case("name = \"broken\"\n", "broken").unwrap_err();
        assert!(matches!(err, BenchError::Schema { .. }));

        // Structurally valid TOML, structurally invalid seed.
        let text = r#"
            name = "bad-seed"
            [domain]
            width = 3
            height = 3
            horizon = 1
            supports = [{ at = { x = 0, y = 0 }, fix_x = true, fix_y = true }]
            [properties]
            young_modulus = 1000.0
            area = 1.0
            [seed]
            elements = [[[0, 0], [2, 0]], [[2, 0], [0, 1]], [[0, 1], [0, 0]], [[1, 0], [0, 1]]]
        "#;
        let err = parse_case(text, "bad-seed").unwrap_err();
        assert!(matches!(err, BenchError::Schema { .. }));
    }

    #[test]
    fn single_run_benchmark_equals_the_run() {
        let mut spec = builtin_case("case1").unwrap();
        spec.runs = 1;
        spec.search.episodes = 10;
        spec.search.rng_seed = 42;
        let report = run_benchmark(&spec, None).unwrap();
        assert_eq!(report.runs.len(), 1);
        let run = &report.runs[0];
        assert_eq!(
            report.mean_best_objective,
            run.best.as_ref().map_or(f64::INFINITY, |b| b.objective)
        );
        assert_eq!(report.std_best_objective, 0.0);
        assert_eq!(report.mean_fe_runs, run.fe_evals_to_best as f64);
        assert_eq!(report.mean_fe_total, run.fe_evals as f64);
    }

    #[test]
    fn episode_csv_round_trips_deterministically() {
        let mut spec = builtin_case("case1").unwrap();
        spec.runs = 2;
        spec.search.episodes = 15;
        spec.search.rng_seed = 7;
        let a = run_benchmark(&spec, None).unwrap();
        let b = run_benchmark(&spec, None).unwrap();
        for (ra, rb) in a.runs.iter().zip(&b.runs) {
            let mut ca = Vec::new();
            let mut cb = Vec::new();
            write_episode_csv(&mut ca, ra).unwrap();
            write_episode_csv(&mut cb, rb).unwrap();
            assert_eq!(ca, cb);
        }
    }

    #[test]
    fn timing_percentages_sum_to_one_hundred() {
        let mut spec = builtin_case("case1").unwrap();
        spec.runs = 1;
        spec.search.episodes = 10;
        let report = run_benchmark(&spec, None).unwrap();
        let table = timing_report(&report.runs[0]);
        let sum: f64 = table.rows.iter().map(|(_, _, pct)| pct).sum();
        assert!((sum - 100.0).abs() < 0.1);

        // A zero-episode run renders an all-zero table.
        let empty = RunResult::empty(SearchConfig::default());
        let table = timing_report(&empty);
        assert!(table.rows.iter().all(|(_, secs, pct)| *secs == 0.0 && *pct == 0.0));
    }

    #[test]
    fn sweep_with_single_alpha_is_one_row() {
        let mut spec = builtin_case("case1").unwrap();
        spec.runs = 2;
        spec.search.episodes = 10;
        let rows = alpha_sweep(&spec, &[0.3], None).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].alpha, 0.3);
    }
}
