//! Ground-truth linear-threshold diffusion.
//!
//! LT diffusion is sampled through its live-edge equivalence: each node keeps
//! at most one incoming arc, chosen with probability `p_{u,v}` (none with the
//! residual probability), and spread reduces to reachability on the sampled
//! subgraph. The Monte Carlo estimator and the exact enumerator below share
//! that probability space with the VRR sampler, so all three are directly
//! comparable.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::parallel;
use crate::partition::CommunityPartition;
use crate::rng::{substream, STREAM_MC};

/// Configurations enumerable by `lt_spread_exact`: Π (in-degree + 1) over all
/// nodes must stay below this guard.
pub const EXACT_ENUMERATION_GUARD: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadResult {
    /// Expected activated node count, seeds included.
    pub total: f64,
    /// Expected activated count per community.
    pub per_community: Vec<f64>,
    /// Standard error of the Monte Carlo estimate; 0 for exact results.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockedSpread {
    /// σ⁻(S_P) = σ(S_N, G) − σ(S_N, G \ S_P).
    pub blocked_total: f64,
    pub blocked_per_community: Vec<f64>,
    /// σ(S_N, G), the unblocked baseline.
    pub baseline_total: f64,
    pub baseline_per_community: Vec<f64>,
    /// Standard error of the blocked-total estimate; 0 for exact results.
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpreadMethod {
    MonteCarlo { runs: u64 },
    Exact,
}

fn check_disjoint(a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>, what: &str) -> Result<()> {
    if let Some(v) = a.intersection(b).next() {
        return Err(Error::InvalidInput(format!(
            "{} overlap at node {}",
            what, v
        )));
    }
    Ok(())
}

/// Sample one live-edge configuration: `config[v]` is the surviving in-arc
/// source of `v`, if any. Consumes exactly one draw per node with in-arcs,
/// in node order, so the configuration is independent of later removals.
fn sample_live_config(graph: &Graph, rng: &mut impl Rng, config: &mut Vec<Option<NodeId>>) {
    config.clear();
    for v in 0..graph.node_count() as NodeId {
        if graph.in_degree(v) == 0 {
            config.push(None);
        } else {
            let x: f64 = rng.gen();
            config.push(graph.choose_in_arc(v, x));
        }
    }
}

/// Count nodes reachable from `seeds` along live arcs, with `removed` nodes
/// (and their incident live arcs) deleted first. Returns (total, per community).
fn reach_counts(
    graph: &Graph,
    partition: &CommunityPartition,
    config: &[Option<NodeId>],
    seeds: &BTreeSet<NodeId>,
    removed: &[bool],
) -> (u64, Vec<u64>) {
    let n = graph.node_count();
    // children[u] = nodes whose live in-arc comes from u
    let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (v, &choice) in config.iter().enumerate() {
        if removed[v] {
            continue;
        }
        if let Some(u) = choice {
            if !removed[u as usize] {
                children[u as usize].push(v as NodeId);
            }
        }
    }
    let mut active = vec![false; n];
    let mut queue: Vec<NodeId> = Vec::new();
    for &s in seeds {
        debug_assert!(!removed[s as usize]);
        if !active[s as usize] {
            active[s as usize] = true;
            queue.push(s);
        }
    }
    let mut total = 0u64;
    let mut per_community = vec![0u64; partition.community_count()];
    while let Some(u) = queue.pop() {
        total += 1;
        per_community[partition.community_of(u) as usize] += 1;
        for &v in &children[u as usize] {
            if !active[v as usize] {
                active[v as usize] = true;
                queue.push(v);
            }
        }
    }
    (total, per_community)
}

fn removed_mask(graph: &Graph, removed: &BTreeSet<NodeId>) -> Result<Vec<bool>> {
    let mut mask = vec![false; graph.node_count()];
    for &v in removed {
        if v as usize >= graph.node_count() {
            return Err(Error::InvalidInput(format!(
                "removed node {} outside the graph",
                v
            )));
        }
        mask[v as usize] = true;
    }
    Ok(mask)
}

/// (total, per-community) reachability counts of one Monte Carlo run.
type RunCounts = (u64, Vec<u64>);

/// Monte Carlo estimate of σ(seeds, G \ removed). Deterministic for a fixed
/// `rng_seed`: run `i` always draws from the same derived substream.
pub fn lt_spread_mc(
    graph: &Graph,
    partition: &CommunityPartition,
    seeds: &BTreeSet<NodeId>,
    removed: &BTreeSet<NodeId>,
    runs: u64,
    rng_seed: u64,
) -> Result<SpreadResult> {
    let raw = mc_counts(
        graph,
        partition,
        seeds,
        std::slice::from_ref(removed),
        runs,
        rng_seed,
    )?;
    Ok(summarize_runs(
        &raw.iter().map(|r| r[0].clone()).collect::<Vec<_>>(),
        partition.community_count(),
        runs,
    ))
}

/// Per-run reachability counts for several removal variants computed on
/// shared live-edge configurations (common random numbers).
fn mc_counts(
    graph: &Graph,
    partition: &CommunityPartition,
    seeds: &BTreeSet<NodeId>,
    removal_variants: &[BTreeSet<NodeId>],
    runs: u64,
    rng_seed: u64,
) -> Result<Vec<Vec<RunCounts>>> {
    if runs == 0 {
        return Err(Error::InvalidInput("zero Monte Carlo runs".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidInput("empty seed set".into()));
    }
    if partition.node_count() != graph.node_count() {
        return Err(Error::InvalidInput(
            "partition does not cover the graph".into(),
        ));
    }
    let mut masks = Vec::with_capacity(removal_variants.len());
    for removed in removal_variants {
        check_disjoint(seeds, removed, "seeds and removed")?;
        masks.push(removed_mask(graph, removed)?);
    }
    let threads = parallel::thread_count(None);
    let per_run = parallel::par_map_indexed(runs as usize, threads, |run| {
        let mut rng = substream(rng_seed, STREAM_MC, run as u64);
        let mut config = Vec::with_capacity(graph.node_count());
        sample_live_config(graph, &mut rng, &mut config);
        masks
            .iter()
            .map(|mask| reach_counts(graph, partition, &config, seeds, mask))
            .collect::<Vec<_>>()
    });
    Ok(per_run)
}

fn summarize_runs(per_run: &[RunCounts], community_count: usize, runs: u64) -> SpreadResult {
    let mut sum = 0u64;
    let mut sum_sq = 0u128;
    let mut community_sums = vec![0u64; community_count];
    for (total, per_community) in per_run {
        sum += total;
        sum_sq += (*total as u128) * (*total as u128);
        for (acc, c) in community_sums.iter_mut().zip(per_community) {
            *acc += c;
        }
    }
    let n = runs as f64;
    let mean = sum as f64 / n;
    let stderr = if runs > 1 {
        let var = (sum_sq as f64 - (sum as f64) * (sum as f64) / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    } else {
        0.0
    };
    SpreadResult {
        total: mean,
        per_community: community_sums.iter().map(|&s| s as f64 / n).collect(),
        stderr,
    }
}

/// Whether the graph is small enough for exact live-edge enumeration.
pub fn exact_enumerable(graph: &Graph) -> bool {
    let mut guard = 1.0f64;
    for v in 0..graph.node_count() as NodeId {
        guard *= (graph.in_degree(v) + 1) as f64;
        if guard > EXACT_ENUMERATION_GUARD {
            return false;
        }
    }
    true
}

/// Exact σ(seeds, G \ removed) by enumerating every live-edge configuration.
pub fn lt_spread_exact(
    graph: &Graph,
    partition: &CommunityPartition,
    seeds: &BTreeSet<NodeId>,
    removed: &BTreeSet<NodeId>,
) -> Result<SpreadResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidInput("empty seed set".into()));
    }
    if partition.node_count() != graph.node_count() {
        return Err(Error::InvalidInput(
            "partition does not cover the graph".into(),
        ));
    }
    check_disjoint(seeds, removed, "seeds and removed")?;
    let mask = removed_mask(graph, removed)?;

    if !exact_enumerable(graph) {
        return Err(Error::InvalidInput(format!(
            "graph exceeds exact enumeration guard ({:.0} configurations max)",
            EXACT_ENUMERATION_GUARD
        )));
    }

    // In-arc choices of seeds and removed nodes cannot change reachability
    // (seeds are already active, removed nodes are deleted), so only the
    // remaining nodes with in-arcs are branched on.
    let branch_nodes: Vec<NodeId> = (0..graph.node_count() as NodeId)
        .filter(|&v| !seeds.contains(&v) && !mask[v as usize] && graph.in_degree(v) > 0)
        .collect();

    let mut config: Vec<Option<NodeId>> = vec![None; graph.node_count()];
    let mut total = 0.0f64;
    let mut per_community = vec![0.0f64; partition.community_count()];
    enumerate_configs(
        graph,
        partition,
        seeds,
        &mask,
        &branch_nodes,
        0,
        1.0,
        &mut config,
        &mut total,
        &mut per_community,
    );
    Ok(SpreadResult {
        total,
        per_community,
        stderr: 0.0,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_configs(
    graph: &Graph,
    partition: &CommunityPartition,
    seeds: &BTreeSet<NodeId>,
    mask: &[bool],
    branch_nodes: &[NodeId],
    depth: usize,
    prob: f64,
    config: &mut Vec<Option<NodeId>>,
    total: &mut f64,
    per_community: &mut [f64],
) {
    if prob == 0.0 {
        return;
    }
    if depth == branch_nodes.len() {
        let (t, pc) = reach_counts(graph, partition, config, seeds, mask);
        *total += prob * t as f64;
        for (acc, c) in per_community.iter_mut().zip(pc) {
            *acc += prob * c as f64;
        }
        return;
    }
    let v = branch_nodes[depth];
    let residual = 1.0 - graph.in_weight_sum(v);
    if residual > 0.0 {
        config[v as usize] = None;
        enumerate_configs(
            graph,
            partition,
            seeds,
            mask,
            branch_nodes,
            depth + 1,
            prob * residual,
            config,
            total,
            per_community,
        );
    }
    for &(u, w) in graph.in_arcs(v) {
        config[v as usize] = Some(u);
        enumerate_configs(
            graph,
            partition,
            seeds,
            mask,
            branch_nodes,
            depth + 1,
            prob * w,
            config,
            total,
            per_community,
        );
    }
    config[v as usize] = None;
}

/// Blocking effect of immunizing `positive_seeds`: both spread terms are
/// computed on shared randomness and subtracted, per community and in total.
pub fn blocked_spread(
    graph: &Graph,
    partition: &CommunityPartition,
    negative_seeds: &BTreeSet<NodeId>,
    positive_seeds: &BTreeSet<NodeId>,
    method: SpreadMethod,
    rng_seed: u64,
) -> Result<BlockedSpread> {
    check_disjoint(negative_seeds, positive_seeds, "S_N and S_P")?;
    match method {
        SpreadMethod::Exact => {
            let base = lt_spread_exact(graph, partition, negative_seeds, &BTreeSet::new())?;
            let reduced = lt_spread_exact(graph, partition, negative_seeds, positive_seeds)?;
            Ok(BlockedSpread {
                blocked_total: base.total - reduced.total,
                blocked_per_community: base
                    .per_community
                    .iter()
                    .zip(&reduced.per_community)
                    .map(|(b, r)| b - r)
                    .collect(),
                baseline_total: base.total,
                baseline_per_community: base.per_community,
                stderr: 0.0,
            })
        }
        SpreadMethod::MonteCarlo { runs } => {
            let variants = [BTreeSet::new(), positive_seeds.clone()];
            let raw = mc_counts(graph, partition, negative_seeds, &variants, runs, rng_seed)?;
            let c = partition.community_count();
            let base =
                summarize_runs(&raw.iter().map(|r| r[0].clone()).collect::<Vec<_>>(), c, runs);
            // Per-run differences give the common-random-numbers stderr.
            let diffs: Vec<RunCounts> = raw
                .iter()
                .map(|r| {
                    let d = r[0].0 - r[1].0;
                    let dc = r[0]
                        .1
                        .iter()
                        .zip(&r[1].1)
                        .map(|(a, b)| a - b)
                        .collect::<Vec<u64>>();
                    (d, dc)
                })
                .collect();
            let blocked = summarize_runs(&diffs, c, runs);
            Ok(BlockedSpread {
                blocked_total: blocked.total,
                blocked_per_community: blocked.per_community,
                baseline_total: base.total,
                baseline_per_community: base.per_community,
                stderr: blocked.stderr,
            })
        }
    }
}
