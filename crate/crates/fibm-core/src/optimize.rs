//! Seed selection: full computation, CELF, and CELF-R.
//!
//! All three selectors maximize the same marginal gains over the VRR index.
//! Full computation (FC) re-evaluates every remaining candidate each
//! iteration. CELF keeps cached gains as lazy upper bounds, which is sound
//! only under exact submodularity. CELF-R additionally tracks an empirical
//! bound ε_max on observed submodularity violations (increases in a winner's
//! marginal gain across consecutive states) and compensates every stale
//! cached gain by ε_max per iteration, restoring the upper-bound property up
//! to the largest violation seen so far.
//!
//! Evaluation counts Λ are algorithmic: speculative batch evaluations used
//! to parallelize the lazy loop never change the committed sequence and are
//! not counted.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::objective::{
    baseline_objective, combined_k, dp_gap, effectiveness_f, fairness_w, BaselineKind,
    FairnessConfig, ObjectiveValue,
};
use crate::parallel;
use crate::problem::ProblemInstance;
use crate::vrr::{MarginalDelta, VrrIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorKind {
    CelfR,
    Celf,
    Fc,
}

impl SelectorKind {
    pub fn name(&self) -> &'static str {
        match self {
            SelectorKind::CelfR => "celf-r",
            SelectorKind::Celf => "celf",
            SelectorKind::Fc => "fc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "celf-r" => Ok(SelectorKind::CelfR),
            "celf" => Ok(SelectorKind::Celf),
            "fc" => Ok(SelectorKind::Fc),
            other => Err(Error::Config(format!(
                "unknown selector '{}', expected celf-r|celf|fc",
                other
            ))),
        }
    }
}

/// What the selector maximizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    /// K = β·W + (1−β)·F over the VRR estimates.
    Scalarized { beta: f64 },
    /// One of the comparison objectives, greedily maximized the same way.
    Baseline(BaselineKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub node: NodeId,
    /// The winner's recomputed marginal gain at selection time.
    pub gain: f64,
    /// Objective components on the index state after this selection.
    pub objective: ObjectiveValue,
    /// Observed submodularity violation for this iteration (0 if unobserved).
    pub epsilon_observed: f64,
    /// Observed monotonicity violation: max(0, −gain).
    pub kappa_observed: f64,
    /// Λ_i: marginal-gain evaluations charged to this iteration.
    pub evaluations: u64,
}

/// A recompute whose stale compensated bound failed to cover the fresh value;
/// surfaced rather than hidden (it means ε_max was an underestimate).
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationViolation {
    pub iteration: usize,
    pub node: NodeId,
    pub stale_value: f64,
    pub eps_max: f64,
    pub recomputed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub selector: SelectorKind,
    pub beta: f64,
    pub seeds: Vec<NodeId>,
    pub iterations: Vec<IterationRecord>,
    pub eps_max: f64,
    pub psi_k: f64,
    /// True when selection stopped before reaching the budget.
    pub short: bool,
    pub compensation_checks: u64,
    pub compensation_violations: Vec<CompensationViolation>,
}

impl Solution {
    pub fn lambda_total(&self) -> u64 {
        self.iterations.iter().map(|r| r.evaluations).sum()
    }

    pub fn final_objective(&self) -> ObjectiveValue {
        self.iterations
            .last()
            .map(|r| r.objective.clone())
            .unwrap_or(ObjectiveValue {
                w: 0.0,
                f: 0.0,
                k: 0.0,
                x: Vec::new(),
                dp_gap: 0.0,
            })
    }
}

/// ψ_k = (1 − 1/e) · Σ_{i≤k} (ε_i + κ_i), nondecreasing in k.
pub fn empirical_psi(iterations: &[IterationRecord], k: usize) -> f64 {
    let take = k.min(iterations.len());
    let sum: f64 = iterations[..take]
        .iter()
        .map(|r| r.epsilon_observed + r.kappa_observed)
        .sum();
    (1.0 - 1.0 / E) * sum
}

/// Tracks blocked masses and evaluates the chosen objective from them. All
/// mass arithmetic is integer; floats appear only at the final division, so
/// identical states always produce bit-identical values.
struct ObjectiveState {
    kind: ObjectiveKind,
    fairness: FairnessConfig,
    baseline_float: Vec<f64>,
    baseline_total_float: f64,
    samples_per_root: f64,
    blocked_mass: Vec<u64>,
}

impl ObjectiveState {
    fn new(index: &VrrIndex, alpha: f64, kind: ObjectiveKind) -> Result<Self> {
        if let ObjectiveKind::Scalarized { beta } = kind {
            if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
                return Err(Error::InvalidInput(format!("beta {} outside [0,1]", beta)));
            }
        }
        let (baseline_total_float, baseline_float) = index.estimate_negative_spread();
        let fairness = FairnessConfig::from_baseline(alpha, &baseline_float)?;
        Ok(ObjectiveState {
            kind,
            fairness,
            baseline_float,
            baseline_total_float,
            samples_per_root: index.samples_per_root() as f64,
            blocked_mass: index.blocked_mass_per_community(),
        })
    }

    fn blocked_float(&self, mass: &[u64]) -> Vec<f64> {
        mass.iter()
            .map(|&m| m as f64 / self.samples_per_root)
            .collect()
    }

    fn value_of(&self, mass: &[u64]) -> f64 {
        let blocked = self.blocked_float(mass);
        match self.kind {
            ObjectiveKind::Scalarized { beta } => {
                let w = if beta == 0.0 {
                    0.0 // multiplied by β = 0; skip the powf work
                } else {
                    fairness_w(&blocked, &self.fairness).expect("dims agree").0
                };
                let f = if beta == 1.0 {
                    0.0 // multiplied by (1-β) = 0
                } else {
                    effectiveness_f(blocked.iter().sum(), self.baseline_total_float)
                        .expect("baseline positive")
                };
                beta * w + (1.0 - beta) * f
            }
            ObjectiveKind::Baseline(kind) => {
                baseline_objective(&kind, &blocked, &self.baseline_float)
                    .expect("baseline positive")
            }
        }
    }

    fn current_value(&self) -> f64 {
        self.value_of(&self.blocked_mass)
    }

    fn gain(&self, delta: &MarginalDelta) -> f64 {
        let mut mass = self.blocked_mass.clone();
        for (m, d) in mass.iter_mut().zip(&delta.per_community_mass) {
            *m += d;
        }
        self.value_of(&mass) - self.current_value()
    }

    fn apply(&mut self, delta: &MarginalDelta) {
        for (m, d) in self.blocked_mass.iter_mut().zip(&delta.per_community_mass) {
            *m += d;
        }
    }

    /// Full objective components at the current state (for the trace).
    fn components(&self, trace_beta: f64) -> ObjectiveValue {
        let blocked = self.blocked_float(&self.blocked_mass);
        let (w, x) = fairness_w(&blocked, &self.fairness).expect("dims agree");
        let f = effectiveness_f(blocked.iter().sum(), self.baseline_total_float)
            .expect("baseline positive");
        let k = match self.kind {
            ObjectiveKind::Scalarized { .. } => {
                combined_k(w, f, trace_beta).expect("beta in range")
            }
            ObjectiveKind::Baseline(_) => self.current_value(),
        };
        let gap = dp_gap(&blocked, &self.baseline_float).unwrap_or(0.0);
        ObjectiveValue {
            w,
            f,
            k,
            x,
            dp_gap: gap,
        }
    }
}

/// Run the chosen selector on the scalarized objective K with the problem's β.
pub fn select(
    index: &mut VrrIndex,
    problem: &ProblemInstance,
    selector: SelectorKind,
) -> Result<Solution> {
    select_with_objective(
        index,
        problem,
        selector,
        ObjectiveKind::Scalarized {
            beta: problem.tradeoff_beta,
        },
    )
}

/// Run the chosen selector on an arbitrary objective (scalarized or one of
/// the comparison objectives). The index must have been sampled for the
/// problem's negative seed set.
pub fn select_with_objective(
    index: &mut VrrIndex,
    problem: &ProblemInstance,
    selector: SelectorKind,
    objective: ObjectiveKind,
) -> Result<Solution> {
    if index.negative_seeds() != &problem.negative_seeds {
        return Err(Error::InvalidInput(
            "index was sampled for a different negative seed set".into(),
        ));
    }
    let trace_beta = match objective {
        ObjectiveKind::Scalarized { beta } => beta,
        ObjectiveKind::Baseline(_) => problem.tradeoff_beta,
    };
    let state = ObjectiveState::new(index, problem.fairness_alpha, objective)?;
    let threads = parallel::thread_count(problem.threads);
    match selector {
        SelectorKind::Fc => run_fc(index, problem, state, trace_beta, threads),
        SelectorKind::Celf => run_lazy(index, problem, state, trace_beta, threads, false),
        SelectorKind::CelfR => run_lazy(index, problem, state, trace_beta, threads, true),
    }
}

/// Objective components of an explicit seed set, evaluated on top of the
/// index's current state (the state is snapshotted and restored).
pub fn evaluate_set(
    index: &mut VrrIndex,
    problem: &ProblemInstance,
    seeds: &[NodeId],
) -> Result<ObjectiveValue> {
    let snapshot = index.snapshot();
    let mut result = Ok(());
    for &v in seeds {
        result = index.invalidate(v);
        if result.is_err() {
            break;
        }
    }
    let value = result.map(|()| {
        let state = ObjectiveState::new(
            index,
            problem.fairness_alpha,
            ObjectiveKind::Scalarized {
                beta: problem.tradeoff_beta,
            },
        );
        state.map(|s| s.components(problem.tradeoff_beta))
    });
    index.restore(&snapshot)?;
    value?
}

fn argmax_gain(gains: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (pos, gain) in gains {
        match best {
            // Strictly-greater keeps the lowest position on ties; positions
            // are ordered by ascending node id.
            Some((_, bg)) if gain <= bg => {}
            _ => best = Some((pos, gain)),
        }
    }
    best
}

fn run_fc(
    index: &mut VrrIndex,
    problem: &ProblemInstance,
    mut state: ObjectiveState,
    trace_beta: f64,
    threads: usize,
) -> Result<Solution> {
    let pool = index.candidates();
    let mut active: Vec<NodeId> = pool;
    let mut prev_gains: Vec<f64> = Vec::new();
    let mut prev_nodes: Vec<NodeId> = Vec::new();
    let mut solution = Solution {
        selector: SelectorKind::Fc,
        beta: trace_beta,
        seeds: Vec::new(),
        iterations: Vec::new(),
        eps_max: 0.0,
        psi_k: 0.0,
        short: false,
        compensation_checks: 0,
        compensation_violations: Vec::new(),
    };
    for i in 1..=problem.budget {
        if active.is_empty() {
            solution.short = true;
            break;
        }
        let gains: Vec<f64> = parallel::par_map_indexed(active.len(), threads, |pos| {
            let delta = index.marginal_delta(active[pos]).expect("candidate valid");
            state.gain(&delta)
        });
        let (winner_pos, winner_gain) =
            argmax_gain(gains.iter().copied().enumerate()).expect("nonempty");
        let winner = active[winner_pos];
        let epsilon_observed = if i > 2 {
            prev_nodes
                .iter()
                .position(|&v| v == winner)
                .map(|p| (winner_gain - prev_gains[p]).max(0.0))
                .unwrap_or(0.0)
        } else {
            0.0
        };
        let kappa_observed = (-winner_gain).max(0.0);
        if winner_gain < -problem.kappa_budget {
            solution.short = true;
            break;
        }
        solution.eps_max = solution.eps_max.max(epsilon_observed);
        let delta = index.marginal_delta(winner)?;
        state.apply(&delta);
        index.invalidate(winner)?;
        solution.seeds.push(winner);
        solution.iterations.push(IterationRecord {
            node: winner,
            gain: winner_gain,
            objective: state.components(trace_beta),
            epsilon_observed,
            kappa_observed,
            evaluations: active.len() as u64,
        });
        prev_nodes = active.clone();
        prev_gains = gains;
        active.remove(winner_pos);
    }
    solution.short = solution.short || solution.seeds.len() < problem.budget;
    solution.psi_k = empirical_psi(&solution.iterations, problem.budget);
    Ok(solution)
}

fn run_lazy(
    index: &mut VrrIndex,
    problem: &ProblemInstance,
    mut state: ObjectiveState,
    trace_beta: f64,
    threads: usize,
    compensate: bool,
) -> Result<Solution> {
    let pool = index.candidates(); // ascending node id
    let mut solution = Solution {
        selector: if compensate {
            SelectorKind::CelfR
        } else {
            SelectorKind::Celf
        },
        beta: trace_beta,
        seeds: Vec::new(),
        iterations: Vec::new(),
        eps_max: 0.0,
        psi_k: 0.0,
        short: false,
        compensation_checks: 0,
        compensation_violations: Vec::new(),
    };
    if problem.budget == 0 || pool.is_empty() {
        solution.short = problem.budget > 0;
        return Ok(solution);
    }

    let n = pool.len();
    let mut cached: Vec<f64> = vec![0.0; n];
    let mut active: Vec<bool> = vec![true; n];
    // (iteration, gain) of the two most recent exact evaluations per candidate.
    let mut last_eval: Vec<(usize, f64)> = vec![(0, 0.0); n];
    let mut prev_eval: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut eps_max = 0.0f64;
    let batch = problem.batch.max(1);

    // Iteration 1 evaluates every candidate, exactly like FC.
    let first_gains: Vec<f64> = parallel::par_map_indexed(n, threads, |pos| {
        let delta = index.marginal_delta(pool[pos]).expect("candidate valid");
        state.gain(&delta)
    });
    for (pos, &g) in first_gains.iter().enumerate() {
        cached[pos] = g;
        last_eval[pos] = (1, g);
    }
    let (first_pos, first_gain) =
        argmax_gain(first_gains.iter().copied().enumerate()).expect("nonempty");
    if first_gain < -problem.kappa_budget {
        solution.short = true;
        solution.psi_k = 0.0;
        return Ok(solution);
    }
    commit_selection(
        index,
        problem,
        &mut state,
        &mut solution,
        trace_beta,
        pool[first_pos],
        first_gain,
        0.0,
        n as u64,
    )?;
    active[first_pos] = false;

    for i in 2..=problem.budget {
        if !active.iter().any(|&a| a) {
            solution.short = true;
            break;
        }
        let mut updated: Vec<bool> = vec![false; n];
        let mut speculative: Vec<Option<f64>> = vec![None; n];
        let mut evaluations_this_iter = 0u64;
        let winner_pos = loop {
            let (top, _) = argmax_gain(
                cached
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|(pos, _)| active[*pos]),
            )
            .expect("active candidate exists");
            if updated[top] {
                break top;
            }
            // Speculative batch evaluation: gains are pure reads of the
            // frozen index state, so precomputing the top stale candidates
            // in parallel cannot change the committed sequence.
            let fresh = match speculative[top].take() {
                Some(g) => g,
                None => {
                    if threads > 1 && batch > 1 {
                        let mut targets: Vec<usize> = (0..n)
                            .filter(|&p| active[p] && !updated[p] && speculative[p].is_none())
                            .collect();
                        targets.sort_by(|&a, &b| {
                            cached[b].partial_cmp(&cached[a]).unwrap().then(a.cmp(&b))
                        });
                        targets.truncate(batch);
                        debug_assert!(targets.contains(&top));
                        let gains: Vec<f64> =
                            parallel::par_map_indexed(targets.len(), threads, |ti| {
                                let delta = index
                                    .marginal_delta(pool[targets[ti]])
                                    .expect("candidate valid");
                                state.gain(&delta)
                            });
                        for (ti, g) in targets.iter().zip(gains) {
                            speculative[*ti] = Some(g);
                        }
                        speculative[top].take().expect("just filled")
                    } else {
                        let delta = index.marginal_delta(pool[top]).expect("candidate valid");
                        state.gain(&delta)
                    }
                }
            };
            evaluations_this_iter += 1;
            if compensate {
                solution.compensation_checks += 1;
                if cached[top] + eps_max + 1e-9 < fresh {
                    solution.compensation_violations.push(CompensationViolation {
                        iteration: i,
                        node: pool[top],
                        stale_value: cached[top],
                        eps_max,
                        recomputed: fresh,
                    });
                }
            }
            prev_eval[top] = Some(last_eval[top]);
            last_eval[top] = (i, fresh);
            cached[top] = fresh;
            updated[top] = true;
        };

        let winner = pool[winner_pos];
        let winner_gain = cached[winner_pos];
        // ε is observable only when the winner was also evaluated at the
        // previous state; lazily skipped states yield no observation.
        let epsilon_observed = if compensate && i > 2 {
            match prev_eval[winner_pos] {
                Some((at, prev_gain)) if at == i - 1 => (winner_gain - prev_gain).max(0.0),
                _ => 0.0,
            }
        } else {
            0.0
        };
        if compensate {
            eps_max = eps_max.max(epsilon_observed);
            solution.eps_max = eps_max;
        }
        if winner_gain < -problem.kappa_budget {
            solution.short = true;
            break;
        }
        if compensate && eps_max > 0.0 {
            for pos in 0..n {
                if active[pos] && !updated[pos] && pos != winner_pos {
                    cached[pos] += eps_max;
                }
            }
        }
        commit_selection(
            index,
            problem,
            &mut state,
            &mut solution,
            trace_beta,
            winner,
            winner_gain,
            epsilon_observed,
            evaluations_this_iter,
        )?;
        active[winner_pos] = false;
    }

    solution.short = solution.short || solution.seeds.len() < problem.budget;
    solution.psi_k = empirical_psi(&solution.iterations, problem.budget);
    Ok(solution)
}

#[allow(clippy::too_many_arguments)]
fn commit_selection(
    index: &mut VrrIndex,
    _problem: &ProblemInstance,
    state: &mut ObjectiveState,
    solution: &mut Solution,
    trace_beta: f64,
    winner: NodeId,
    winner_gain: f64,
    epsilon_observed: f64,
    evaluations: u64,
) -> Result<()> {
    let delta = index.marginal_delta(winner)?;
    state.apply(&delta);
    index.invalidate(winner)?;
    debug_assert_eq!(state.blocked_mass, index.blocked_mass_per_community());
    solution.seeds.push(winner);
    solution.iterations.push(IterationRecord {
        node: winner,
        gain: winner_gain,
        objective: state.components(trace_beta),
        epsilon_observed,
        kappa_observed: (-winner_gain).max(0.0),
        evaluations,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use crate::synth;
    use crate::vrr::sample_vrr;

    fn instance(
        nodes: usize,
        communities: usize,
        seed: u64,
        k: usize,
        beta: f64,
    ) -> (ProblemInstance, VrrIndex) {
        let (g, p) = synth::random_instance(nodes, communities, seed);
        let sn: BTreeSet<NodeId> = [0].into_iter().collect();
        let problem = ProblemInstance::new(
            Arc::new(g),
            Arc::new(p),
            sn.clone(),
            k,
            0.5,
            0.5,
            beta,
        )
        .unwrap();
        let index = sample_vrr(
            &problem.graph,
            &problem.partition,
            &sn,
            400,
            seed ^ 0xabcd,
        )
        .unwrap();
        (problem, index)
    }

    /// Independent weighted maximum-coverage greedy over the raw path store;
    /// the β = 0 oracle for every selector.
    fn coverage_greedy_oracle(index: &VrrIndex, k: usize) -> Vec<NodeId> {
        let paths: Vec<(Vec<NodeId>, u64)> = index
            .paths()
            .map(|(_, nodes, mult)| (nodes.to_vec(), mult))
            .collect();
        let mut covered = vec![false; paths.len()];
        let mut chosen: Vec<NodeId> = Vec::new();
        let candidates = index.candidates();
        for _ in 0..k {
            let mut best: Option<(u64, NodeId)> = None;
            for &u in &candidates {
                if chosen.contains(&u) {
                    continue;
                }
                let gain: u64 = paths
                    .iter()
                    .enumerate()
                    .filter(|(i, (nodes, _))| !covered[*i] && nodes.contains(&u))
                    .map(|(_, (_, mult))| *mult)
                    .sum();
                match best {
                    Some((bg, _)) if gain <= bg => {}
                    _ => best = Some((gain, u)),
                }
            }
            let Some((_, u)) = best else { break };
            for (i, (nodes, _)) in paths.iter().enumerate() {
                if nodes.contains(&u) {
                    covered[i] = true;
                }
            }
            chosen.push(u);
        }
        chosen
    }

    #[test]
    fn beta_zero_matches_coverage_greedy_oracle() {
        for seed in 0..6u64 {
            let (problem, mut index) = instance(8, 3, seed, 3, 0.0);
            let expected = coverage_greedy_oracle(&index, 3);
            let snap = index.snapshot();
            for selector in [SelectorKind::CelfR, SelectorKind::Celf, SelectorKind::Fc] {
                index.restore(&snap).unwrap();
                let sol = select(&mut index, &problem, selector).unwrap();
                assert_eq!(sol.seeds, expected, "selector {:?} seed {}", selector, seed);
            }
        }
    }

    #[test]
    fn budget_one_is_identical_across_selectors() {
        for seed in 0..6u64 {
            let (problem, mut index) = instance(8, 3, 50 + seed, 1, 0.7);
            if index.candidates().is_empty() {
                continue; // nothing reaches S_N on this draw
            }
            let snap = index.snapshot();
            let mut seeds = Vec::new();
            for selector in [SelectorKind::Fc, SelectorKind::Celf, SelectorKind::CelfR] {
                index.restore(&snap).unwrap();
                let sol = select(&mut index, &problem, selector).unwrap();
                assert_eq!(sol.iterations[0].evaluations, index.candidates().len() as u64);
                seeds.push(sol.seeds.clone());
            }
            assert_eq!(seeds[0], seeds[1]);
            assert_eq!(seeds[0], seeds[2]);
        }
    }

    #[test]
    fn fc_evaluation_counts_are_exhaustive() {
        let (problem, mut index) = instance(9, 2, 11, 3, 0.5);
        let pool = index.candidates().len() as u64;
        let sol = select(&mut index, &problem, SelectorKind::Fc).unwrap();
        let lambdas: Vec<u64> = sol.iterations.iter().map(|r| r.evaluations).collect();
        assert_eq!(lambdas, vec![pool, pool - 1, pool - 2]);
        assert_eq!(sol.lambda_total(), pool + (pool - 1) + (pool - 2));
    }

    #[test]
    fn lazy_never_evaluates_more_than_fc_per_iteration() {
        for seed in 0..6u64 {
            let (problem, mut index) = instance(10, 3, 70 + seed, 4, 0.5);
            let snap = index.snapshot();
            let fc = select(&mut index, &problem, SelectorKind::Fc).unwrap();
            index.restore(&snap).unwrap();
            let celf_r = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
            for (a, b) in celf_r.iterations.iter().zip(&fc.iterations) {
                assert!(a.evaluations <= b.evaluations);
            }
            assert!(celf_r.lambda_total() <= fc.lambda_total());
        }
    }

    #[test]
    fn celf_r_stays_close_to_fc_on_small_instances() {
        // With no observed deviation CELF-R is exactly lazy-greedy-correct
        // and matches FC. With deviations the compensation is empirical: a
        // violation on a never-popped candidate is unobservable, so there is
        // no strict k·ε_max guarantee; quality stays within a few percent.
        for seed in 0..12u64 {
            for beta in [0.0, 0.5, 1.0] {
                let (problem, mut index) = instance(6, 3, 100 + seed, 3, beta);
                let snap = index.snapshot();
                let fc = select(&mut index, &problem, SelectorKind::Fc).unwrap();
                index.restore(&snap).unwrap();
                let celf_r = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
                let k_fc = fc.final_objective().k;
                let k_cr = celf_r.final_objective().k;
                if celf_r.eps_max == 0.0 && celf_r.compensation_violations.is_empty() {
                    assert!(
                        (k_cr - k_fc).abs() <= 1e-9,
                        "seed {seed} beta {beta}: {k_cr} vs {k_fc}"
                    );
                } else {
                    assert!(
                        k_cr >= 0.95 * k_fc,
                        "seed {seed} beta {beta}: {k_cr} vs {k_fc}"
                    );
                }
            }
        }
    }

    #[test]
    fn celf_never_beats_celf_r() {
        // Exhaustive-style sweep over random 6-node instances; CELF assumes
        // strict submodularity and can stall on stale bounds when W's gains
        // increase, while CELF-R compensates.
        let mut strict = 0;
        for seed in 0..60u64 {
            let (problem, mut index) = instance(6, 3, 200 + seed, 3, 0.9);
            let snap = index.snapshot();
            let celf = select(&mut index, &problem, SelectorKind::Celf).unwrap();
            index.restore(&snap).unwrap();
            let celf_r = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
            let k_celf = celf.final_objective().k;
            let k_celf_r = celf_r.final_objective().k;
            assert!(
                k_celf <= k_celf_r + 1e-9,
                "seed {seed}: celf {k_celf} > celf-r {k_celf_r}"
            );
            if k_celf + 1e-12 < k_celf_r {
                strict += 1;
            }
        }
        let _ = strict; // strict separation depends on the instance batch
    }

    #[test]
    fn compensation_is_sound_at_beta_zero() {
        for seed in 0..6u64 {
            let (problem, mut index) = instance(10, 2, 300 + seed, 5, 0.0);
            if index.candidates().len() < 2 {
                continue;
            }
            let sol = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
            assert!(sol.compensation_checks >= 1);
            assert!(sol.compensation_violations.is_empty());
            assert_eq!(sol.eps_max, 0.0);
        }
    }

    #[test]
    fn psi_is_zero_without_deviations_and_nondecreasing() {
        let (problem, mut index) = instance(10, 2, 17, 5, 0.0);
        let sol = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
        assert_eq!(sol.psi_k, 0.0);
        let mut last = 0.0;
        for k in 1..=sol.iterations.len() {
            let psi = empirical_psi(&sol.iterations, k);
            assert!(psi >= last);
            last = psi;
        }
    }

    #[test]
    fn batch_speculation_matches_sequential() {
        for seed in 0..4u64 {
            let (mut problem, mut index) = instance(12, 3, 400 + seed, 5, 0.6);
            let snap = index.snapshot();
            problem.batch = 1;
            problem.threads = Some(1);
            let sequential = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
            index.restore(&snap).unwrap();
            problem.batch = 16;
            problem.threads = Some(4);
            let batched = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
            assert_eq!(sequential.seeds, batched.seeds);
            assert_eq!(sequential.iterations, batched.iterations);
        }
    }

    #[test]
    fn exhausted_pool_marks_solution_short() {
        let (g, p) = synth::random_instance(5, 2, 999);
        let sn: BTreeSet<NodeId> = [0].into_iter().collect();
        let problem =
            ProblemInstance::new(Arc::new(g), Arc::new(p), sn.clone(), 4, 0.5, 0.5, 0.5).unwrap();
        let mut index = sample_vrr(&problem.graph, &problem.partition, &sn, 100, 1).unwrap();
        let pool = index.candidates().len();
        let sol = select(&mut index, &problem, SelectorKind::CelfR).unwrap();
        if pool < 4 {
            assert!(sol.short);
            assert_eq!(sol.seeds.len(), pool);
        } else {
            assert!(!sol.short);
        }
    }

    #[test]
    fn selecting_every_candidate_reaches_the_same_final_f() {
        // Order varies across selectors, but the final set is the whole
        // pool, so the blocking effectiveness must coincide.
        let (g, p) = synth::random_instance(8, 2, 77);
        let sn: BTreeSet<NodeId> = [0].into_iter().collect();
        let mut index = sample_vrr(&g, &p, &sn, 300, 2).unwrap();
        let pool = index.candidates().len();
        if pool == 0 {
            return;
        }
        let problem =
            ProblemInstance::new(Arc::new(g), Arc::new(p), sn, pool, 0.5, 0.5, 0.8).unwrap();
        let snap = index.snapshot();
        let mut finals = Vec::new();
        for selector in [SelectorKind::Fc, SelectorKind::Celf, SelectorKind::CelfR] {
            index.restore(&snap).unwrap();
            let sol = select(&mut index, &problem, selector).unwrap();
            assert_eq!(sol.seeds.len(), pool);
            finals.push(sol.final_objective().f);
        }
        assert_eq!(finals[0], finals[1]);
        assert_eq!(finals[0], finals[2]);
    }

    #[test]
    fn zero_budget_yields_empty_solution() {
        let (problem, mut index) = instance(6, 2, 5, 0, 0.5);
        for selector in [SelectorKind::Fc, SelectorKind::Celf, SelectorKind::CelfR] {
            let sol = select(&mut index, &problem, selector).unwrap();
            assert!(sol.seeds.is_empty());
            assert!(!sol.short);
            assert_eq!(sol.final_objective().f, 0.0);
        }
    }

    #[test]
    fn greedy_meets_theorem_bound_against_brute_force() {
        for seed in [3u64, 14] {
            for beta in [0.0, 0.5, 1.0] {
                let (problem, mut index) = instance(9, 3, 500 + seed, 3, beta);
                let fresh = index.snapshot();
                let sol = select(&mut index, &problem, SelectorKind::Fc).unwrap();
                index.restore(&fresh).unwrap();
                let k_greedy = sol.final_objective().k;
                let pool = index.candidates();
                let mut opt = 0.0f64;
                for a in 0..pool.len() {
                    for b in (a + 1)..pool.len() {
                        for c in (b + 1)..pool.len() {
                            let val = evaluate_set(
                                &mut index,
                                &problem,
                                &[pool[a], pool[b], pool[c]],
                            )
                            .unwrap()
                            .k;
                            opt = opt.max(val);
                        }
                    }
                }
                let bound = (1.0 - 1.0 / E) * opt - sol.psi_k;
                assert!(
                    k_greedy >= bound - 1e-9,
                    "seed {seed} beta {beta}: greedy {k_greedy} < bound {bound}"
                );
            }
        }
    }

    #[test]
    fn baseline_objectives_run_through_the_selector() {
        let (problem, mut index) = instance(10, 3, 8, 3, 0.5);
        let snap = index.snapshot();
        for kind in [
            BaselineKind::MaxMin,
            BaselineKind::welfare_power(),
            BaselineKind::welfare_log2(),
        ] {
            index.restore(&snap).unwrap();
            let sol = select_with_objective(
                &mut index,
                &problem,
                SelectorKind::Fc,
                ObjectiveKind::Baseline(kind),
            )
            .unwrap();
            assert_eq!(sol.seeds.len(), 3);
            // Trace still records W/F components for reporting.
            assert!(sol.final_objective().f > 0.0);
        }
    }

    #[test]
    fn kappa_budget_stops_short() {
        // With a κ budget of zero, selection stops at the first negative
        // recomputed best gain. Search a few instances at β = 1 where W must
        // eventually decrease.
        let mut stopped = false;
        for seed in 0..30u64 {
            let (mut problem, mut index) = instance(7, 3, 600 + seed, 4, 1.0);
            problem.kappa_budget = 0.0;
            let sol = select(&mut index, &problem, SelectorKind::Fc).unwrap();
            if sol.short && !sol.seeds.is_empty() {
                stopped = true;
                break;
            }
        }
        assert!(stopped, "no instance triggered the kappa budget");
    }
}
