//! β-sweep Pareto front construction with μ-feasibility filtering.
//!
//! One index is sampled once and snapshot/restored across β values, so the
//! whole trade-off curve shares a single probability space.

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::optimize::{select, SelectorKind, Solution};
use crate::problem::ProblemInstance;
use crate::vrr::VrrIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub beta: f64,
    pub seeds: Vec<NodeId>,
    pub f: f64,
    pub w: f64,
    pub k: f64,
    pub dp_gap: f64,
    /// 1 − F/F(S_P^#) ≤ μ, relative to the β = 0 reference.
    pub feasible: bool,
    /// Dominated by some other grid point in (F, W).
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    /// Every evaluated grid point (ascending β), dominance-flagged.
    pub points: Vec<ParetoPoint>,
    /// F of the β = 0 reference solution S_P^#.
    pub reference_f: f64,
    pub reference_seeds: Vec<NodeId>,
    pub mu: f64,
    /// Full per-β solutions, aligned with `points`.
    pub solutions: Vec<Solution>,
}

impl ParetoFront {
    /// The retained rank-1 subset.
    pub fn nondominated(&self) -> Vec<&ParetoPoint> {
        self.points.iter().filter(|p| !p.dominated).collect()
    }
}

/// Indices of points not dominated by any other: dominance is ≥ in both
/// coordinates with at least one strict. Duplicate points are all retained.
pub fn nondominated_indices(points: &[(f64, f64)]) -> Vec<usize> {
    let dominates = |a: (f64, f64), b: (f64, f64)| {
        a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
    };
    (0..points.len())
        .filter(|&i| !points.iter().any(|&other| dominates(other, points[i])))
        .collect()
}

/// Run the selector once per grid β on a shared restored index and assemble
/// the front. β = 0 is prepended when absent: its solution is the
/// effectiveness-only reference S_P^# that anchors the μ constraint.
pub fn sweep_beta(
    index: &mut VrrIndex,
    problem: &ProblemInstance,
    grid: &[f64],
    selector: SelectorKind,
) -> Result<ParetoFront> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty beta grid".into()));
    }
    let mut betas: Vec<f64> = grid.to_vec();
    for &b in &betas {
        if !(0.0..=1.0).contains(&b) || !b.is_finite() {
            return Err(Error::InvalidInput(format!("beta {} outside [0,1]", b)));
        }
    }
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    betas.dedup();
    if betas[0] != 0.0 {
        betas.insert(0, 0.0);
    }

    let base = index.snapshot();
    let mut solutions = Vec::with_capacity(betas.len());
    for &beta in &betas {
        index.restore(&base)?;
        let sub_problem = problem.with_beta(beta)?;
        solutions.push(select(index, &sub_problem, selector)?);
    }
    index.restore(&base)?;

    let reference = &solutions[0];
    let reference_f = reference.final_objective().f;
    let reference_seeds = reference.seeds.clone();

    let coords: Vec<(f64, f64)> = solutions
        .iter()
        .map(|s| {
            let o = s.final_objective();
            (o.f, o.w)
        })
        .collect();
    let rank1 = nondominated_indices(&coords);

    let points = betas
        .iter()
        .zip(&solutions)
        .enumerate()
        .map(|(i, (&beta, solution))| {
            let o = solution.final_objective();
            // With a zero reference nothing can be lost, so every point is
            // feasible by convention.
            let feasible = if reference_f > 0.0 {
                1.0 - o.f / reference_f <= problem.tolerance_mu + 1e-12
            } else {
                true
            };
            ParetoPoint {
                beta,
                seeds: solution.seeds.clone(),
                f: o.f,
                w: o.w,
                k: o.k,
                dp_gap: o.dp_gap,
                feasible,
                dominated: !rank1.contains(&i),
            }
        })
        .collect();

    Ok(ParetoFront {
        points,
        reference_f,
        reference_seeds,
        mu: problem.tolerance_mu,
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use crate::problem::ProblemInstance;
    use crate::synth;
    use crate::vrr::sample_vrr;

    #[test]
    fn nondominated_sort_cases() {
        assert_eq!(nondominated_indices(&[(0.3, 0.4)]), vec![0]);
        assert_eq!(
            nondominated_indices(&[(1.0, 0.0), (0.0, 1.0), (0.5, 0.5)]),
            vec![0, 1, 2]
        );
        assert_eq!(nondominated_indices(&[(0.5, 0.5), (0.6, 0.6)]), vec![1]);
        // Duplicates of a rank-1 value are all retained.
        assert_eq!(
            nondominated_indices(&[(0.6, 0.6), (0.6, 0.6), (0.2, 0.2)]),
            vec![0, 1]
        );
    }

    fn sweep_setup(seed: u64, k: usize) -> (ProblemInstance, VrrIndex) {
        let (g, p) = synth::random_instance(10, 3, seed);
        let sn: BTreeSet<u32> = [0].into_iter().collect();
        let problem =
            ProblemInstance::new(Arc::new(g), Arc::new(p), sn.clone(), k, 0.4, 0.5, 0.5).unwrap();
        let index = sample_vrr(&problem.graph, &problem.partition, &sn, 300, seed).unwrap();
        (problem, index)
    }

    #[test]
    fn single_zero_grid_is_one_feasible_point() {
        let (problem, mut index) = sweep_setup(42, 2);
        let front = sweep_beta(&mut index, &problem, &[0.0], SelectorKind::CelfR).unwrap();
        assert_eq!(front.points.len(), 1);
        assert!(front.points[0].feasible);
        assert!(!front.points[0].dominated);
        assert_eq!(front.points[0].seeds, front.reference_seeds);
    }

    #[test]
    fn retained_points_never_dominate_each_other() {
        let (problem, mut index) = sweep_setup(7, 3);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let front = sweep_beta(&mut index, &problem, &grid, SelectorKind::CelfR).unwrap();
        let kept = front.nondominated();
        for a in &kept {
            for b in &kept {
                let dominates =
                    a.f >= b.f && a.w >= b.w && (a.f > b.f || a.w > b.w);
                assert!(!dominates || std::ptr::eq(*a, *b));
            }
        }
    }

    #[test]
    fn restore_sweep_equals_independent_rebuilds() {
        let (problem, mut index) = sweep_setup(19, 3);
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let front = sweep_beta(&mut index, &problem, &grid, SelectorKind::CelfR).unwrap();
        for (i, &beta) in grid.iter().enumerate() {
            let mut rebuilt = sample_vrr(
                &problem.graph,
                &problem.partition,
                &problem.negative_seeds,
                300,
                19,
            )
            .unwrap();
            let sub = problem.with_beta(beta).unwrap();
            let sol = crate::optimize::select(&mut rebuilt, &sub, SelectorKind::CelfR).unwrap();
            assert_eq!(sol.seeds, front.solutions[i].seeds, "beta {}", beta);
            assert_eq!(sol.iterations, front.solutions[i].iterations);
        }
    }

    #[test]
    fn mu_zero_keeps_only_reference_effectiveness() {
        let (mut problem, mut index) = sweep_setup(23, 3);
        problem.tolerance_mu = 0.0;
        let grid = [0.0, 0.5, 1.0];
        let front = sweep_beta(&mut index, &problem, &grid, SelectorKind::CelfR).unwrap();
        for p in &front.points {
            assert_eq!(p.feasible, p.f >= front.reference_f - 1e-12, "beta {}", p.beta);
        }
        assert!(front.points[0].feasible);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let (problem, mut index) = sweep_setup(3, 2);
        assert!(sweep_beta(&mut index, &problem, &[], SelectorKind::CelfR).is_err());
        assert!(sweep_beta(&mut index, &problem, &[1.5], SelectorKind::CelfR).is_err());
    }
}
