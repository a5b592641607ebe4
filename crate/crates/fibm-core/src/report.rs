//! Run reports: self-describing JSON plus plot-ready CSV emission.
//!
//! Every emitted JSON/CSV file is a pure function of (config, rng seed,
//! inputs); wall-clock timings go to a plain-text sidecar so reruns stay
//! byte-identical. Node ids in all outputs are the input's external ids.

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::optimize::Solution;
use crate::sweep::ParetoFront;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IterationRow {
    pub node: u64,
    pub gain: f64,
    pub k: f64,
    pub w: f64,
    pub f: f64,
    pub dp_gap: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolutionRecord {
    pub selector: String,
    pub beta: f64,
    pub seeds: Vec<u64>,
    pub eps_max: f64,
    pub psi_k: f64,
    pub short: bool,
    pub compensation_checks: u64,
    pub compensation_violations: u64,
    pub iterations: Vec<IterationRow>,
}

impl SolutionRecord {
    pub fn from_solution(solution: &Solution, graph: &Graph) -> Self {
        SolutionRecord {
            selector: solution.selector.name().into(),
            beta: solution.beta,
            seeds: solution
                .seeds
                .iter()
                .map(|&v| graph.external_id(v))
                .collect(),
            eps_max: solution.eps_max,
            psi_k: solution.psi_k,
            short: solution.short,
            compensation_checks: solution.compensation_checks,
            compensation_violations: solution.compensation_violations.len() as u64,
            iterations: solution
                .iterations
                .iter()
                .map(|r| IterationRow {
                    node: graph.external_id(r.node),
                    gain: r.gain,
                    k: r.objective.k,
                    w: r.objective.w,
                    f: r.objective.f,
                    dp_gap: r.objective.dp_gap,
                    epsilon: r.epsilon_observed,
                    kappa: r.kappa_observed,
                    evaluations: r.evaluations,
                })
                .collect(),
        }
    }

    pub fn lambda_total(&self) -> u64 {
        self.iterations.iter().map(|r| r.evaluations).sum()
    }

    pub fn final_f(&self) -> f64 {
        self.iterations.last().map(|r| r.f).unwrap_or(0.0)
    }

    pub fn final_w(&self) -> f64 {
        self.iterations.last().map(|r| r.w).unwrap_or(0.0)
    }

    pub fn final_k(&self) -> f64 {
        self.iterations.last().map(|r| r.k).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrontPointRecord {
    pub beta: f64,
    pub f: f64,
    pub w: f64,
    pub k: f64,
    pub dp_gap: f64,
    pub feasible: bool,
    pub dominated: bool,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrontRecord {
    pub reference_f: f64,
    pub mu: f64,
    pub points: Vec<FrontPointRecord>,
}

impl FrontRecord {
    pub fn from_front(front: &ParetoFront, graph: &Graph) -> Self {
        FrontRecord {
            reference_f: front.reference_f,
            mu: front.mu,
            points: front
                .points
                .iter()
                .map(|p| FrontPointRecord {
                    beta: p.beta,
                    f: p.f,
                    w: p.w,
                    k: p.k,
                    dp_gap: p.dp_gap,
                    feasible: p.feasible,
                    dominated: p.dominated,
                    seeds: p.seeds.iter().map(|&v| graph.external_id(v)).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RepetitionRecord {
    pub rng_seed: u64,
    pub solutions: Vec<SolutionRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub front: Option<FrontRecord>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Averages {
    pub f: f64,
    pub w: f64,
    pub k: f64,
    pub psi_k: f64,
    pub lambda_total: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub repetitions: Vec<RepetitionRecord>,
    pub averages: Averages,
}

impl RunReport {
    pub fn assemble(command: &str, config: &RunConfig, repetitions: Vec<RepetitionRecord>) -> Self {
        let averages = compute_averages(&repetitions);
        RunReport {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            repetitions,
            averages,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidInput(format!("report serialization: {}", e)))?;
        json.push('\n');
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: not a run report: {}", path.display(), e)))
    }

    /// All solutions across repetitions, flattened.
    pub fn all_solutions(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.repetitions.iter().flat_map(|r| r.solutions.iter())
    }
}

/// Arithmetic mean over every recorded solution (repetitions × grid points).
pub fn compute_averages(repetitions: &[RepetitionRecord]) -> Averages {
    let mut count = 0usize;
    let mut sums = Averages {
        f: 0.0,
        w: 0.0,
        k: 0.0,
        psi_k: 0.0,
        lambda_total: 0.0,
    };
    for rep in repetitions {
        for sol in &rep.solutions {
            sums.f += sol.final_f();
            sums.w += sol.final_w();
            sums.k += sol.final_k();
            sums.psi_k += sol.psi_k;
            sums.lambda_total += sol.lambda_total() as f64;
            count += 1;
        }
    }
    if count > 0 {
        let n = count as f64;
        sums.f /= n;
        sums.w /= n;
        sums.k /= n;
        sums.psi_k /= n;
        sums.lambda_total /= n;
    }
    sums
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Per-iteration trace CSV across repetitions.
pub fn write_trace_csv(report: &RunReport, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(
        "repetition,selector,beta,iteration,node,gain,k,w,f,dp_gap,epsilon,kappa,evaluations\n",
    );
    for (rep_idx, rep) in report.repetitions.iter().enumerate() {
        for sol in &rep.solutions {
            for (i, row) in sol.iterations.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    rep_idx,
                    sol.selector,
                    sol.beta,
                    i + 1,
                    row.node,
                    row.gain,
                    row.k,
                    row.w,
                    row.f,
                    row.dp_gap,
                    row.epsilon,
                    row.kappa,
                    row.evaluations
                ));
            }
        }
    }
    write_text(path.as_ref(), &out)
}

/// The sweep's own front CSV: β, F, W, feasibility, seeds.
pub fn write_front_csv(front: &FrontRecord, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("beta,f,w,k,dp_gap,feasible,dominated,seeds\n");
    for p in &front.points {
        let seeds = p
            .seeds
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},\"{}\"\n",
            p.beta, p.f, p.w, p.k, p.dp_gap, p.feasible, p.dominated, seeds
        ));
    }
    write_text(path.as_ref(), &out)
}

/// Wall-clock sidecar; deliberately plain text, not JSON/CSV, so timing noise
/// never breaks output determinism.
pub fn write_timings(per_repetition_ms: &[u128], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for (i, ms) in per_repetition_ms.iter().enumerate() {
        out.push_str(&format!("repetition {}: {} ms\n", i, ms));
    }
    out.push_str(&format!(
        "total: {} ms\n",
        per_repetition_ms.iter().sum::<u128>()
    ));
    write_text(path.as_ref(), &out)
}

/// Plot-ready aggregation of every report in a run directory:
/// `pareto.csv` (F, W per method), `evals.csv` (Λ_i per selector), and
/// `psi.csv` (ψ_k per selector).
pub fn emit_plot_data(run_dir: impl AsRef<Path>, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let run_dir = run_dir.as_ref();
    let out_dir = out_dir.as_ref();
    let mut reports: Vec<(String, RunReport)> = Vec::new();
    let entries = std::fs::read_dir(run_dir).map_err(|e| Error::io(run_dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    for path in paths {
        if let Ok(report) = RunReport::load(&path) {
            if report.schema == SCHEMA_VERSION {
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                reports.push((stem, report));
            }
        }
    }
    if reports.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: no run reports found; expected select-*.json or sweep-*.json emitted by \
             'fibm select' or 'fibm sweep'",
            run_dir.display()
        )));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    // pareto.csv: every method contributes its (F, W) points.
    let mut pareto = String::from("method,beta,f,w,feasible,dominated\n");
    for (stem, report) in &reports {
        if report.command == "sweep" {
            if let Some(front) = report.repetitions.first().and_then(|r| r.front.as_ref()) {
                for p in &front.points {
                    pareto.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        stem, p.beta, p.f, p.w, p.feasible, p.dominated
                    ));
                }
            }
        } else {
            let avg = &report.averages;
            let beta = report
                .all_solutions()
                .next()
                .map(|s| s.beta)
                .unwrap_or(0.0);
            pareto.push_str(&format!(
                "{},{},{},{},true,false\n",
                stem, beta, avg.f, avg.w
            ));
        }
    }
    let pareto_path = out_dir.join("pareto.csv");
    write_text(&pareto_path, &pareto)?;

    // evals.csv / psi.csv: per-iteration Λ and ψ prefixes for single-β runs,
    // averaged across repetitions.
    let select_reports: Vec<&(String, RunReport)> = reports
        .iter()
        .filter(|(_, r)| r.command == "select")
        .collect();
    let mut evals = String::from("iteration");
    let mut psi = String::from("k");
    let mut columns: Vec<(Vec<f64>, Vec<f64>)> = Vec::new(); // (mean Λ_i, mean ψ_k)
    let mut max_len = 0usize;
    for (stem, report) in &select_reports {
        evals.push_str(&format!(",{}", stem));
        psi.push_str(&format!(",{}", stem));
        let solutions: Vec<&SolutionRecord> = report.all_solutions().collect();
        let len = solutions
            .iter()
            .map(|s| s.iterations.len())
            .max()
            .unwrap_or(0);
        max_len = max_len.max(len);
        let mut lambda_means = vec![0.0f64; len];
        let mut psi_means = vec![0.0f64; len];
        for i in 0..len {
            let mut lambda_sum = 0.0;
            let mut psi_sum = 0.0;
            let mut n = 0.0;
            for s in &solutions {
                if i < s.iterations.len() {
                    lambda_sum += s.iterations[i].evaluations as f64;
                    let prefix: f64 = s.iterations[..=i]
                        .iter()
                        .map(|r| r.epsilon + r.kappa)
                        .sum();
                    psi_sum += (1.0 - 1.0 / std::f64::consts::E) * prefix;
                    n += 1.0;
                }
            }
            lambda_means[i] = lambda_sum / n;
            psi_means[i] = psi_sum / n;
        }
        columns.push((lambda_means, psi_means));
    }
    evals.push('\n');
    psi.push('\n');
    for i in 0..max_len {
        evals.push_str(&(i + 1).to_string());
        psi.push_str(&(i + 1).to_string());
        for (lambda_means, psi_means) in &columns {
            match lambda_means.get(i) {
                Some(v) => evals.push_str(&format!(",{}", v)),
                None => evals.push(','),
            }
            match psi_means.get(i) {
                Some(v) => psi.push_str(&format!(",{}", v)),
                None => psi.push(','),
            }
        }
        evals.push('\n');
        psi.push('\n');
    }
    let evals_path = out_dir.join("evals.csv");
    let psi_path = out_dir.join("psi.csv");
    write_text(&evals_path, &evals)?;
    write_text(&psi_path, &psi)?;
    Ok(vec![pareto_path, evals_path, psi_path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn sample_record(psi: f64) -> SolutionRecord {
        SolutionRecord {
            selector: "celf-r".into(),
            beta: 0.5,
            seeds: vec![33, 2],
            eps_max: 0.0,
            psi_k: psi,
            short: false,
            compensation_checks: 4,
            compensation_violations: 0,
            iterations: vec![
                IterationRow {
                    node: 33,
                    gain: 0.4,
                    k: 0.4,
                    w: 0.5,
                    f: 0.3,
                    dp_gap: 0.2,
                    epsilon: 0.0,
                    kappa: 0.0,
                    evaluations: 10,
                },
                IterationRow {
                    node: 2,
                    gain: 0.2,
                    k: 0.6,
                    w: 0.7,
                    f: 0.5,
                    dp_gap: 0.1,
                    epsilon: 0.01,
                    kappa: 0.0,
                    evaluations: 3,
                },
            ],
        }
    }

    #[test]
    fn json_round_trip_preserves_averages() {
        let reps = vec![
            RepetitionRecord {
                rng_seed: 42,
                solutions: vec![sample_record(0.01)],
                front: None,
            },
            RepetitionRecord {
                rng_seed: 43,
                solutions: vec![sample_record(0.03)],
                front: None,
            },
        ];
        let report = RunReport::assemble("select", &RunConfig::default(), reps);
        assert!((report.averages.psi_k - 0.02).abs() < 1e-15);
        assert!((report.averages.lambda_total - 13.0).abs() < 1e-15);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("select-celf-r.json");
        report.save(&path).unwrap();
        let loaded = RunReport::load(&path).unwrap();
        assert_eq!(loaded, report);
        // Averages are reproducible from the repetition records alone.
        let recomputed = compute_averages(&loaded.repetitions);
        assert_eq!(recomputed, loaded.averages);
    }

    #[test]
    fn plot_emission_from_a_run_dir() {
        let dir = tempfile::tempdir().unwrap();
        let report = RunReport::assemble(
            "select",
            &RunConfig::default(),
            vec![RepetitionRecord {
                rng_seed: 1,
                solutions: vec![sample_record(0.02)],
                front: None,
            }],
        );
        report.save(dir.path().join("select-celf-r.json")).unwrap();
        let files = emit_plot_data(dir.path(), dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let psi = std::fs::read_to_string(dir.path().join("psi.csv")).unwrap();
        let rows: Vec<&str> = psi.lines().collect();
        assert_eq!(rows[0], "k,select-celf-r");
        assert_eq!(rows.len(), 3); // header + k=1,2
        // ψ prefixes are nondecreasing.
        let parse = |row: &str| row.split(',').nth(1).unwrap().parse::<f64>().unwrap();
        assert!(parse(rows[1]) <= parse(rows[2]));
    }

    #[test]
    fn empty_run_dir_is_an_error_listing_expectations() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_plot_data(dir.path(), dir.path()).unwrap_err();
        assert!(err.to_string().contains("select-*.json"), "{err}");
    }
}
