//! Command implementations behind the `fibm` binary: sample, select, sweep,
//! validate, report.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use crate::config::{BetaSpec, NegativeSeedSpec, RunConfig};
use crate::diffusion;
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, top_degree_seeds, Graph, NodeId, WeightMode};
use crate::optimize::{select, Solution};
use crate::partition::{load_communities, CommunityPartition};
use crate::problem::ProblemInstance;
use crate::report::{
    emit_plot_data, write_front_csv, write_timings, write_trace_csv, FrontRecord,
    RepetitionRecord, RunReport, SolutionRecord,
};
use crate::rng::repetition_seed;
use crate::sweep::sweep_beta;
use crate::validate::{check_supplied_instance, run_builtin_suite, ValidationReport};
use crate::vrr::{sample_vrr, VrrIndex};

pub struct LoadedInputs {
    pub graph: Arc<Graph>,
    pub partition: Arc<CommunityPartition>,
    pub negative_seeds: BTreeSet<NodeId>,
}

pub fn load_inputs(config: &RunConfig) -> Result<LoadedInputs> {
    let graph_path = config
        .graph_path
        .as_ref()
        .ok_or_else(|| Error::Config("graph path is required (--graph PATH)".into()))?;
    let mode = match config.weight_mode.as_str() {
        "uniform" => WeightMode::UniformInDegree,
        _ => WeightMode::ExplicitColumn,
    };
    let graph = load_edge_list(graph_path, config.directed, mode)?;
    for warning in graph.warnings() {
        eprintln!("warning: {}: {}", graph_path.display(), warning);
    }
    let partition = match &config.communities_path {
        Some(path) => load_communities(path, &graph)?,
        None => CommunityPartition::single_community(graph.node_count()),
    };
    let negative_seeds: BTreeSet<NodeId> = match &config.negative_seeds {
        NegativeSeedSpec::TopDegree { size } => {
            top_degree_seeds(&graph, *size)?.into_iter().collect()
        }
        NegativeSeedSpec::Explicit { ids } => ids
            .iter()
            .map(|&external| {
                graph.internal_id(external).ok_or_else(|| {
                    Error::InvalidInput(format!("negative seed {} not in the graph", external))
                })
            })
            .collect::<Result<_>>()?,
    };
    Ok(LoadedInputs {
        graph: Arc::new(graph),
        partition: Arc::new(partition),
        negative_seeds,
    })
}

fn out_dir(config: &RunConfig) -> Result<PathBuf> {
    let dir = config
        .out_dir
        .clone()
        .ok_or_else(|| Error::Config("output directory is required (--out DIR)".into()))?;
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn dump_path(dir: &std::path::Path, rng_seed: u64) -> PathBuf {
    dir.join(format!("vrr-index-{}.dump", rng_seed))
}

/// Load a matching index dump when one exists, otherwise sample fresh. A key
/// mismatch is reported as a cache miss and falls back to sampling.
fn index_for(
    inputs: &LoadedInputs,
    config: &RunConfig,
    rng_seed: u64,
    dir: Option<&std::path::Path>,
) -> Result<VrrIndex> {
    if let Some(dir) = dir {
        let path = dump_path(dir, rng_seed);
        if path.exists() {
            let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
            match VrrIndex::load_dump(
                BufReader::new(file),
                &inputs.graph,
                &inputs.partition,
                &inputs.negative_seeds,
                config.vrr_samples_per_root,
                rng_seed,
            ) {
                Ok(index) => return Ok(index),
                Err(Error::CacheMiss(msg)) => {
                    eprintln!("warning: {}: cache miss ({}); resampling", path.display(), msg);
                }
                Err(other) => return Err(other),
            }
        }
    }
    sample_vrr(
        &inputs.graph,
        &inputs.partition,
        &inputs.negative_seeds,
        config.vrr_samples_per_root,
        rng_seed,
    )
}

fn problem_for(inputs: &LoadedInputs, config: &RunConfig, beta: f64) -> Result<ProblemInstance> {
    let mut problem = ProblemInstance::new(
        inputs.graph.clone(),
        inputs.partition.clone(),
        inputs.negative_seeds.clone(),
        config.require_budget()?,
        config.mu,
        config.alpha,
        beta,
    )?;
    problem.kappa_budget = config.kappa_budget.unwrap_or(f64::INFINITY);
    problem.batch = config.batch;
    problem.threads = config.threads;
    Ok(problem)
}

/// Sample the VRR index and persist it keyed by (graph, S_N, R, seed).
pub fn cmd_sample(config: &RunConfig) -> Result<PathBuf> {
    config.validate()?;
    let inputs = load_inputs(config)?;
    let dir = out_dir(config)?;
    let index = sample_vrr(
        &inputs.graph,
        &inputs.partition,
        &inputs.negative_seeds,
        config.vrr_samples_per_root,
        config.rng_seed,
    )?;
    let path = dump_path(&dir, config.rng_seed);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut writer = BufWriter::new(file);
    index
        .write_dump(&mut writer)
        .map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Run the configured selector at a single β, `repetitions` times with
/// derived seeds, and write the averaged report.
pub fn cmd_select(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let beta = match config.beta {
        BetaSpec::Single(b) => b,
        BetaSpec::Grid { .. } => {
            return Err(Error::Config(
                "a beta grid was given; use the sweep command for grids".into(),
            ))
        }
    };
    let inputs = load_inputs(config)?;
    let dir = out_dir(config)?;
    let problem = problem_for(&inputs, config, beta)?;
    let mut repetitions = Vec::new();
    let mut timings = Vec::new();
    for rep in 0..config.repetitions {
        let rep_seed = repetition_seed(config.rng_seed, rep);
        let started = Instant::now();
        let mut index = index_for(&inputs, config, rep_seed, Some(&dir))?;
        let solution: Solution = select(&mut index, &problem, config.selector)?;
        timings.push(started.elapsed().as_millis());
        repetitions.push(RepetitionRecord {
            rng_seed: rep_seed,
            solutions: vec![SolutionRecord::from_solution(&solution, &inputs.graph)],
            front: None,
        });
    }
    let report = RunReport::assemble("select", config, repetitions);
    let selector = config.selector.name();
    report.save(dir.join(format!("select-{}.json", selector)))?;
    write_trace_csv(&report, dir.join(format!("trace-select-{}.csv", selector)))?;
    write_timings(&timings, dir.join(format!("timings-select-{}.txt", selector)))?;
    Ok(report)
}

/// Sweep the β grid on one shared index per repetition and write the Pareto
/// front with μ-feasibility flags.
pub fn cmd_sweep(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let grid = config.beta.values()?;
    let inputs = load_inputs(config)?;
    let dir = out_dir(config)?;
    let problem = problem_for(&inputs, config, 0.0)?;
    let mut repetitions = Vec::new();
    let mut timings = Vec::new();
    for rep in 0..config.repetitions {
        let rep_seed = repetition_seed(config.rng_seed, rep);
        let started = Instant::now();
        let mut index = index_for(&inputs, config, rep_seed, Some(&dir))?;
        let front = sweep_beta(&mut index, &problem, &grid, config.selector)?;
        timings.push(started.elapsed().as_millis());
        repetitions.push(RepetitionRecord {
            rng_seed: rep_seed,
            solutions: front
                .solutions
                .iter()
                .map(|s| SolutionRecord::from_solution(s, &inputs.graph))
                .collect(),
            front: Some(FrontRecord::from_front(&front, &inputs.graph)),
        });
    }
    let report = RunReport::assemble("sweep", config, repetitions);
    let selector = config.selector.name();
    report.save(dir.join(format!("sweep-{}.json", selector)))?;
    if let Some(front) = report.repetitions.first().and_then(|r| r.front.as_ref()) {
        write_front_csv(front, dir.join(format!("front-{}.csv", selector)))?;
    }
    write_trace_csv(&report, dir.join(format!("trace-sweep-{}.csv", selector)))?;
    write_timings(&timings, dir.join(format!("timings-sweep-{}.txt", selector)))?;
    Ok(report)
}

/// Run the validation harness. With a configured graph the supplied instance
/// is cross-checked against the exact oracle, which requires the graph to be
/// within the enumeration guard.
pub fn cmd_validate(config: &RunConfig) -> Result<ValidationReport> {
    config.validate()?;
    let mut report = run_builtin_suite(
        config.rng_seed,
        config.mc_runs,
        config.vrr_samples_per_root,
    );
    if config.graph_path.is_some() {
        let inputs = load_inputs(config)?;
        if !diffusion::exact_enumerable(&inputs.graph) {
            return Err(Error::InvalidInput(format!(
                "supplied graph exceeds the exact enumeration guard ({} configurations max); \
                 validate requires an enumerable graph",
                diffusion::EXACT_ENUMERATION_GUARD
            )));
        }
        report.checks.push(check_supplied_instance(
            &inputs.graph,
            &inputs.partition,
            &inputs.negative_seeds,
            config.vrr_samples_per_root,
            config.rng_seed,
        ));
    }
    Ok(report)
}

/// Aggregate the reports in the output directory into plot-ready CSVs.
pub fn cmd_report(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = config
        .out_dir
        .clone()
        .ok_or_else(|| Error::Config("run directory is required (--out DIR)".into()))?;
    emit_plot_data(&dir, &dir)
}
