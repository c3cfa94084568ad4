//! Command-line benchmark harness: train searches on built-in or custom
//! cases, sweep the exploration weight, enumerate design spaces, render
//! designs, and report phase timings.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spantree::bench::{
    self, builtin_case_names, resolve_case, BenchReport, CaseSpec, OracleRecord,
};
use spantree::mcts::UctVariant;
use spantree::oracle::{exhaustive_enumerate, SearchSpaceSummary};
use spantree::render::render_design_to_file;

#[derive(Parser)]
#[command(
    name = "spantree",
    about = "Truss design synthesis by grammar-constrained tree search",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum UctArg {
    Standard,
    Extended,
}

#[derive(Args)]
struct SearchArgs {
    /// Exploitation-exploration weight in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Mean-vs-best blend for the extended rule.
    #[arg(long)]
    beta: Option<f64>,
    /// Selection rule.
    #[arg(long, value_enum)]
    uct: Option<UctArg>,
    /// Episodes per training run.
    #[arg(long)]
    episodes: Option<u32>,
    /// Independent training runs.
    #[arg(long)]
    runs: Option<u32>,
    /// Master RNG seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
}

impl SearchArgs {
    fn apply(&self, spec: &mut CaseSpec) {
        if let Some(alpha) = self.alpha {
            spec.search.alpha = alpha;
        }
        if let Some(beta) = self.beta {
            spec.search.beta = beta;
        }
        if let Some(uct) = self.uct {
            spec.search.uct = match uct {
                UctArg::Standard => UctVariant::Standard,
                UctArg::Extended => UctVariant::Extended,
            };
        }
        if let Some(episodes) = self.episodes {
            spec.search.episodes = episodes;
        }
        if let Some(runs) = self.runs {
            spec.runs = runs;
        }
        if let Some(seed) = self.seed {
            spec.search.rng_seed = seed;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train one case over several independent runs and export the results.
    Run {
        /// Built-in case name or path to a case TOML file.
        case: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Output directory (a per-case subdirectory is created).
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
        /// Percentile scoring: "auto" enumerates (and caches) the design
        /// space, or give a path to an oracle JSON produced by `exhaustive`.
        #[arg(long)]
        oracle: Option<String>,
    },
    /// Benchmark a case across a list of exploration weights.
    Sweep {
        case: String,
        /// Comma-separated α values, e.g. --alphas 0.1,0.2,0.3,0.4,0.5
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        oracle: Option<String>,
    },
    /// Exhaustively enumerate a case's design space.
    Exhaustive {
        case: String,
        /// Stop after this many unique stable designs.
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
    },
    /// Render a design to SVG: pass a case (seed) or a run summary (best).
    Render {
        /// Built-in case name, case TOML, or summary.json from `run`.
        input: String,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Print the phase-timing table of a finished run.
    Timing {
        /// summary.json produced by `run`.
        summary: PathBuf,
    },
    /// List built-in cases.
    Cases,
}

fn main() {
    if let Err(err) = dispatch(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { case, search, out, oracle } => run(&case, &search, &out, oracle.as_deref()),
        Command::Sweep { case, alphas, search, out, oracle } => {
            sweep(&case, &alphas, &search, &out, oracle.as_deref())
        }
        Command::Exhaustive { case, cap, out } => exhaustive(&case, cap, &out),
        Command::Render { input, output } => render(&input, &output),
        Command::Timing { summary } => timing(&summary),
        Command::Cases => {
            for name in builtin_case_names() {
                let spec = bench::builtin_case(name).expect("built-in");
                println!(
                    "{name:<18} {}x{} grid, {} runs, alpha {}",
                    spec.domain.width, spec.domain.height, spec.runs, spec.search.alpha
                );
            }
            Ok(())
        }
    }
}

fn case_dir(out: &Path, name: &str) -> Result<PathBuf> {
    let dir = out.join(name);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Loads or computes the oracle summary per the --oracle flag.
fn load_oracle(
    arg: Option<&str>,
    spec: &CaseSpec,
    dir: &Path,
) -> Result<Option<SearchSpaceSummary>> {
    match arg {
        None => Ok(None),
        Some("auto") => {
            let cache = dir.join("oracle.json");
            if cache.is_file() {
                let record = bench::read_oracle_json(&cache)?;
                return Ok(Some(record.into_summary()?));
            }
            eprintln!("enumerating design space for {} ...", spec.name);
            let summary = exhaustive_enumerate(&spec.env()?, None)?;
            write_oracle(&summary, spec, dir)?;
            Ok(Some(summary))
        }
        Some(path) => {
            let record = bench::read_oracle_json(path)?;
            Ok(Some(record.into_summary()?))
        }
    }
}

fn write_oracle(summary: &SearchSpaceSummary, spec: &CaseSpec, dir: &Path) -> Result<()> {
    let record = OracleRecord::from_summary(&spec.name, summary);
    let mut file = BufWriter::new(File::create(dir.join("oracle.json"))?);
    bench::write_oracle_json(&mut file, &record)?;
    let mut dist = BufWriter::new(File::create(dir.join("distribution.csv"))?);
    bench::write_distribution_csv(&mut dist, summary)?;
    Ok(())
}

fn print_report(spec: &CaseSpec, report: &BenchReport) {
    println!(
        "case {}: {} runs x {} episodes, alpha {}",
        spec.name, spec.runs, spec.search.episodes, spec.search.alpha
    );
    println!(
        "best objective: mean {:.6} (std {:.6})",
        report.mean_best_objective, report.std_best_objective
    );
    if let Some(reference) = spec.reference_objective {
        println!("reference objective (original geometry): {reference}");
    }
    println!(
        "FE runs to best design: mean {:.1} (std {:.1}); full budget: mean {:.1}",
        report.mean_fe_runs, report.std_fe_runs, report.mean_fe_total
    );
    if let (Some(mean), Some(std)) = (report.mean_percentile, report.std_percentile) {
        println!("percentile score: mean {mean:.2}% (std {std:.2})");
    }
    if let Some(ratio) = report.mean_objective_ratio {
        println!("objective ratio: {ratio:.2}%");
    }
}

fn run(case: &str, search: &SearchArgs, out: &Path, oracle_arg: Option<&str>) -> Result<()> {
    let mut spec = resolve_case(case)?;
    search.apply(&mut spec);
    let dir = case_dir(out, &spec.name)?;
    let oracle = load_oracle(oracle_arg, &spec, &dir)?;

    let report = bench::run_benchmark(&spec, oracle.as_ref())?;
    for (i, result) in report.runs.iter().enumerate() {
        let path = dir.join(format!("run_{i:02}.csv"));
        let mut file = BufWriter::new(File::create(path)?);
        bench::write_episode_csv(&mut file, result)?;
    }
    let record = bench::summary_record(&spec, &report);
    let mut file = BufWriter::new(File::create(dir.join("summary.json"))?);
    bench::write_summary_json(&mut file, &record)?;

    if let Some(best) = &record.best {
        let config = best.configuration()?;
        render_design_to_file(&config, &spec.domain, dir.join("best_design.svg"))?;
    }

    print_report(&spec, &report);
    println!("{}", bench::timing_report(&report.runs[0]));
    println!("results written to {}", dir.display());
    Ok(())
}

fn sweep(
    case: &str,
    alphas: &[f64],
    search: &SearchArgs,
    out: &Path,
    oracle_arg: Option<&str>,
) -> Result<()> {
    let mut spec = resolve_case(case)?;
    search.apply(&mut spec);
    let dir = case_dir(out, &spec.name)?;
    let oracle = load_oracle(oracle_arg, &spec, &dir)?;

    let rows = bench::alpha_sweep(&spec, alphas, oracle.as_ref())?;
    let mut file = BufWriter::new(File::create(dir.join("sweep.csv"))?);
    bench::write_sweep_csv(&mut file, &rows)?;

    println!(
        "{:>6} {:>16} {:>14} {:>20}",
        "alpha", "mean percentile", "mean FE runs", "mean best objective"
    );
    for r in &rows {
        let pct = r
            .mean_percentile
            .map(|p| format!("{p:.2}%"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>6} {:>16} {:>14.1} {:>20.6}",
            r.alpha, pct, r.mean_fe_runs, r.mean_best_objective
        );
    }
    println!("sweep written to {}", dir.join("sweep.csv").display());
    Ok(())
}

fn exhaustive(case: &str, cap: Option<u64>, out: &Path) -> Result<()> {
    let spec = resolve_case(case)?;
    let dir = case_dir(out, &spec.name)?;
    let summary = exhaustive_enumerate(&spec.env()?, cap)?;
    write_oracle(&summary, &spec, &dir)?;
    println!(
        "{}: {} terminal sequences, {} unique terminals ({} unstable, {} dead-end), truncated: {}",
        spec.name,
        summary.raw_terminal_sequences,
        summary.unique_terminals,
        summary.unstable_terminals,
        summary.dead_end_terminals,
        summary.truncated
    );
    if let Some(best) = summary.best_objective() {
        println!("best objective: {best:.6}");
    }
    println!("oracle written to {}", dir.join("oracle.json").display());
    Ok(())
}

fn render(input: &str, output: &Path) -> Result<()> {
    // A summary.json renders its best design; a case renders its seed.
    if input.ends_with(".json") {
        let record = bench::read_summary_json(input)?;
        let Some(best) = &record.best else {
            bail!("summary {input} holds no stable best design");
        };
        let config = best.configuration()?;
        render_design_to_file(&config, &record.domain, output)
            .with_context(|| format!("writing {}", output.display()))?;
    } else {
        let spec = resolve_case(input)?;
        render_design_to_file(&spec.seed, &spec.domain, output)
            .with_context(|| format!("writing {}", output.display()))?;
    }
    println!("rendered {input} to {}", output.display());
    Ok(())
}

fn timing(summary_path: &Path) -> Result<()> {
    let record = bench::read_summary_json(summary_path)?;
    println!("case {}: {} runs", record.case, record.per_run.len());
    for (i, run) in record.per_run.iter().enumerate() {
        let total = run.timings_seconds.get("total").copied().unwrap_or(0.0);
        println!("run {i:02} (seed {}): total {total:.4} s", run.rng_seed);
        for phase in ["selection", "expansion", "simulation", "backpropagation", "other"] {
            let secs = run.timings_seconds.get(phase).copied().unwrap_or(0.0);
            let pct = if total > 0.0 { 100.0 * secs / total } else { 0.0 };
            println!("  {phase:<16} {secs:>12.4} {pct:>8.2}%");
        }
        println!("  covers-node calls: {}", run.covers_node_calls);
    }
    Ok(())
}
