//! Problem instance: graph, partition, negative seeds, and parameters.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::partition::CommunityPartition;

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub graph: Arc<Graph>,
    pub partition: Arc<CommunityPartition>,
    pub negative_seeds: BTreeSet<NodeId>,
    /// Positive seed budget k.
    pub budget: usize,
    /// Allowable loss in blocking effectiveness, μ in `[0,1]`.
    pub tolerance_mu: f64,
    /// Fairness exponent α, strictly inside (0,1).
    pub fairness_alpha: f64,
    /// Scalarization weight β in `[0,1]` (1 = all fairness).
    pub tradeoff_beta: f64,
    /// Stop selection early when a recomputed best gain falls below -κ_budget.
    pub kappa_budget: f64,
    /// Lazy-loop batch size for speculative gain evaluation.
    pub batch: usize,
    /// Worker thread request; resolved against FIBM_THREADS.
    pub threads: Option<usize>,
}

impl ProblemInstance {
    pub fn new(
        graph: Arc<Graph>,
        partition: Arc<CommunityPartition>,
        negative_seeds: BTreeSet<NodeId>,
        budget: usize,
        tolerance_mu: f64,
        fairness_alpha: f64,
        tradeoff_beta: f64,
    ) -> Result<Self> {
        if partition.node_count() != graph.node_count() {
            return Err(Error::InvalidInput(
                "partition does not cover the graph".into(),
            ));
        }
        if negative_seeds.is_empty() {
            return Err(Error::InvalidInput("negative seed set is empty".into()));
        }
        if let Some(&v) = negative_seeds.iter().next_back() {
            if v as usize >= graph.node_count() {
                return Err(Error::InvalidInput(format!(
                    "negative seed {} outside the graph",
                    v
                )));
            }
        }
        if budget > graph.node_count() - negative_seeds.len() {
            return Err(Error::InvalidInput(format!(
                "budget {} exceeds |V| - |S_N| = {}",
                budget,
                graph.node_count() - negative_seeds.len()
            )));
        }
        if !(fairness_alpha > 0.0 && fairness_alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha {} must lie strictly inside (0,1)",
                fairness_alpha
            )));
        }
        for (name, v) in [("mu", tolerance_mu), ("beta", tradeoff_beta)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{} {} outside [0,1]", name, v)));
            }
        }
        Ok(ProblemInstance {
            graph,
            partition,
            negative_seeds,
            budget,
            tolerance_mu,
            fairness_alpha,
            tradeoff_beta,
            kappa_budget: f64::INFINITY,
            batch: 16,
            threads: None,
        })
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
            return Err(Error::InvalidInput(format!("beta {} outside [0,1]", beta)));
        }
        let mut p = self.clone();
        p.tradeoff_beta = beta;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_edge_list, WeightMode};

    fn parts() -> (Arc<Graph>, Arc<CommunityPartition>) {
        let g = parse_edge_list("0 1\n1 2\n2 3\n", "t", true, WeightMode::UniformInDegree).unwrap();
        let p = CommunityPartition::single_community(g.node_count());
        (Arc::new(g), Arc::new(p))
    }

    #[test]
    fn validates_ranges() {
        let (g, p) = parts();
        let seeds: BTreeSet<NodeId> = [0].into_iter().collect();
        assert!(
            ProblemInstance::new(g.clone(), p.clone(), seeds.clone(), 2, 0.5, 0.5, 0.5).is_ok()
        );
        assert!(
            ProblemInstance::new(g.clone(), p.clone(), BTreeSet::new(), 2, 0.5, 0.5, 0.5).is_err()
        );
        assert!(
            ProblemInstance::new(g.clone(), p.clone(), seeds.clone(), 4, 0.5, 0.5, 0.5).is_err()
        );
        assert!(
            ProblemInstance::new(g.clone(), p.clone(), seeds.clone(), 2, 0.5, 0.0, 0.5).is_err()
        );
        assert!(
            ProblemInstance::new(g.clone(), p.clone(), seeds.clone(), 2, 0.5, 1.0, 0.5).is_err()
        );
        assert!(
            ProblemInstance::new(g.clone(), p.clone(), seeds.clone(), 2, 1.5, 0.5, 0.5).is_err()
        );
        assert!(ProblemInstance::new(g, p, seeds, 2, 0.5, 0.5, -0.1).is_err());
    }
}
