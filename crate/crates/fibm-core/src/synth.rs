//! Deterministic synthetic instances for validation and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Graph, GraphArc, NodeId};
use crate::partition::CommunityPartition;
use crate::rng::{substream, STREAM_SYNTH};

/// Random LT-admissible directed graph on `nodes` nodes with a random
/// community partition of at most `communities` parts. Arc weights are drawn
/// so that every in-weight sum stays at or below 1.
pub fn random_instance(nodes: usize, communities: usize, seed: u64) -> (Graph, CommunityPartition) {
    assert!(nodes >= 2);
    let mut rng = substream(seed, STREAM_SYNTH, 0);
    let mut arcs: Vec<GraphArc> = Vec::new();
    for v in 0..nodes as NodeId {
        let max_in = (nodes - 1).min(3);
        let in_degree = rng.gen_range(0..=max_in);
        let mut sources: Vec<NodeId> = (0..nodes as NodeId).filter(|&u| u != v).collect();
        sources.shuffle(&mut rng);
        sources.truncate(in_degree);
        sources.sort_unstable();
        if sources.is_empty() {
            continue;
        }
        // Random weights scaled to sum to at most 1.
        let budget: f64 = rng.gen_range(0.3..=1.0);
        let raw: Vec<f64> = sources.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for (u, w) in sources.iter().zip(raw) {
            arcs.push(GraphArc {
                source: *u,
                target: v,
                weight: (w / total * budget).min(1.0),
            });
        }
    }
    if arcs.is_empty() {
        arcs.push(GraphArc {
            source: 0,
            target: 1,
            weight: 0.5,
        });
    }
    arcs.sort_by_key(|a| (a.source, a.target));
    let external: Vec<u64> = (0..nodes as u64).collect();
    let graph = Graph::from_arcs(nodes, external, arcs, Vec::new()).expect("admissible synth");

    let mut community_rng = substream(seed, STREAM_SYNTH, 1);
    let parts = communities.clamp(1, nodes);
    let assignment: Vec<u32> = (0..nodes)
        .map(|v| {
            if v < parts {
                v as u32 // every community nonempty
            } else {
                community_rng.gen_range(0..parts as u32)
            }
        })
        .collect();
    let partition = CommunityPartition::from_assignment(assignment).expect("nonempty");
    (graph, partition)
}

/// Desk-scale benchmark graph: `nodes` nodes, each with 2..=6 uniformly
/// weighted in-arcs (p = 1/in-degree), and a skewed community assignment.
pub fn benchmark_instance(
    nodes: usize,
    communities: usize,
    seed: u64,
) -> (Graph, CommunityPartition) {
    assert!(nodes >= 8);
    let mut rng = substream(seed, STREAM_SYNTH, 2);
    let mut arcs: Vec<GraphArc> = Vec::new();
    for v in 0..nodes as NodeId {
        let in_degree = rng.gen_range(2..=6usize);
        let mut sources = Vec::with_capacity(in_degree);
        while sources.len() < in_degree {
            let u = rng.gen_range(0..nodes as NodeId);
            if u != v && !sources.contains(&u) {
                sources.push(u);
            }
        }
        sources.sort_unstable();
        let w = 1.0 / in_degree as f64;
        for u in sources {
            arcs.push(GraphArc {
                source: u,
                target: v,
                weight: w,
            });
        }
    }
    arcs.sort_by_key(|a| (a.source, a.target));
    let external: Vec<u64> = (0..nodes as u64).collect();
    let graph = Graph::from_arcs(nodes, external, arcs, Vec::new()).expect("admissible bench");

    let parts = communities.clamp(1, nodes);
    let mut community_rng = substream(seed, STREAM_SYNTH, 3);
    // Skewed sizes: community c gets weight proportional to c + 1.
    let weight_sum: usize = (1..=parts).sum();
    let assignment: Vec<u32> = (0..nodes)
        .map(|v| {
            if v < parts {
                v as u32
            } else {
                let mut pick = community_rng.gen_range(0..weight_sum);
                let mut c = 0u32;
                for size in 1..=parts {
                    if pick < size {
                        c = (size - 1) as u32;
                        break;
                    }
                    pick -= size;
                }
                c
            }
        })
        .collect();
    let partition = CommunityPartition::from_assignment(assignment).expect("nonempty");
    (graph, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LT_WEIGHT_SLACK;

    #[test]
    fn random_instances_are_admissible_and_deterministic() {
        let (g1, p1) = random_instance(6, 3, 42);
        let (g2, p2) = random_instance(6, 3, 42);
        assert_eq!(g1.fingerprint(), g2.fingerprint());
        assert_eq!(p1.assignment(), p2.assignment());
        for v in 0..g1.node_count() as NodeId {
            assert!(g1.in_weight_sum(v) <= 1.0 + LT_WEIGHT_SLACK);
        }
    }

    #[test]
    fn benchmark_instance_has_uniform_in_degree_weights() {
        let (g, p) = benchmark_instance(50, 4, 9);
        assert_eq!(g.node_count(), 50);
        assert_eq!(p.community_count(), 4);
        for v in 0..g.node_count() as NodeId {
            let d = g.in_degree(v);
            assert!(d >= 2);
            assert!((g.in_weight_sum(v) - 1.0).abs() <= LT_WEIGHT_SLACK);
        }
    }
}
