//! Directed weighted graph with linear-threshold admissible arc weights.
//!
//! Graphs are immutable after construction and safe to share across threads.
//! Node ids are remapped to the contiguous range `0..node_count` (ascending
//! by external id); the original external ids are retained so every emitted
//! report can be expressed in the input's id space.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Slack allowed on the per-node in-weight sum (LT admissibility).
pub const LT_WEIGHT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphArc {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Every arc into `v` gets weight `1 / in-degree(v)`.
    UniformInDegree,
    /// Weights come from the third input column and must satisfy LT admissibility.
    ExplicitColumn,
}

#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    arcs: Vec<GraphArc>,
    out_arcs: Vec<Vec<(NodeId, f64)>>,
    in_arcs: Vec<Vec<(NodeId, f64)>>,
    in_weight_sum: Vec<f64>,
    external_ids: Vec<u64>,
    external_to_internal: HashMap<u64, NodeId>,
    warnings: Vec<String>,
}

impl Graph {
    /// Build a graph from arcs over internal ids `0..node_count` with external
    /// ids supplied per node. Rejects self-loops, duplicate ordered pairs,
    /// weights outside `[0,1]`, and LT-inadmissible in-weight sums.
    pub fn from_arcs(
        node_count: usize,
        external_ids: Vec<u64>,
        mut arcs: Vec<GraphArc>,
        warnings: Vec<String>,
    ) -> Result<Self> {
        if external_ids.len() != node_count {
            return Err(Error::InvalidInput(
                "external id table length must equal node count".into(),
            ));
        }
        if node_count > u32::MAX as usize {
            return Err(Error::InvalidInput("too many nodes".into()));
        }
        if arcs.is_empty() {
            return Err(Error::InvalidInput("no arcs".into()));
        }
        arcs.sort_by_key(|a| (a.source, a.target));
        for pair in arcs.windows(2) {
            if pair[0].source == pair[1].source && pair[0].target == pair[1].target {
                return Err(Error::InvalidInput(format!(
                    "duplicate arc ({}, {})",
                    pair[0].source, pair[0].target
                )));
            }
        }
        let mut out_arcs = vec![Vec::new(); node_count];
        let mut in_arcs = vec![Vec::new(); node_count];
        for arc in &arcs {
            if arc.source == arc.target {
                return Err(Error::InvalidInput(format!("self-loop at {}", arc.source)));
            }
            if (arc.source as usize) >= node_count || (arc.target as usize) >= node_count {
                return Err(Error::InvalidInput(format!(
                    "arc endpoint out of range: ({}, {})",
                    arc.source, arc.target
                )));
            }
            if !(0.0..=1.0).contains(&arc.weight) || !arc.weight.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "weight {} outside [0,1] on arc ({}, {})",
                    arc.weight, arc.source, arc.target
                )));
            }
            out_arcs[arc.source as usize].push((arc.target, arc.weight));
            in_arcs[arc.target as usize].push((arc.source, arc.weight));
        }
        let mut in_weight_sum = vec![0.0; node_count];
        for (v, arcs_in) in in_arcs.iter().enumerate() {
            let sum: f64 = arcs_in.iter().map(|(_, w)| w).sum();
            if sum > 1.0 + LT_WEIGHT_SLACK {
                return Err(Error::InvalidInput(format!(
                    "LT admissibility violated at node {}: in-weight sum {:.12} > 1",
                    external_ids[v], sum
                )));
            }
            in_weight_sum[v] = sum;
        }
        let external_to_internal = external_ids
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as NodeId))
            .collect();
        Ok(Graph {
            node_count,
            arcs,
            out_arcs,
            in_arcs,
            in_weight_sum,
            external_ids,
            external_to_internal,
            warnings,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[GraphArc] {
        &self.arcs
    }

    pub fn out_arcs(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.out_arcs[v as usize]
    }

    pub fn in_arcs(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.in_arcs[v as usize]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_arcs[v as usize].len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_arcs[v as usize].len()
    }

    pub fn total_degree(&self, v: NodeId) -> usize {
        self.in_degree(v) + self.out_degree(v)
    }

    pub fn in_weight_sum(&self, v: NodeId) -> f64 {
        self.in_weight_sum[v as usize]
    }

    pub fn external_id(&self, v: NodeId) -> u64 {
        self.external_ids[v as usize]
    }

    pub fn internal_id(&self, external: u64) -> Option<NodeId> {
        self.external_to_internal.get(&external).copied()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Sample the live in-arc for `v` given a uniform draw `x` in `[0,1)`.
    /// Returns `None` with the residual probability `1 - Σ p_{u,v}`.
    pub fn choose_in_arc(&self, v: NodeId, x: f64) -> Option<NodeId> {
        let mut cum = 0.0;
        for &(u, w) in &self.in_arcs[v as usize] {
            cum += w;
            if x < cum {
                return Some(u);
            }
        }
        None
    }

    /// Structural fingerprint over node count, arcs, weights, and id mapping.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.node_count as u64);
        for arc in &self.arcs {
            h.write_u64(arc.source as u64);
            h.write_u64(arc.target as u64);
            h.write_u64(arc.weight.to_bits());
        }
        for &e in &self.external_ids {
            h.write_u64(e);
        }
        h.finish()
    }
}

/// FNV-1a, used for stable structural fingerprints in dump headers.
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Load an edge list: whitespace-separated `u v [w]` lines, `#` comments and
/// blank lines allowed. Undirected inputs produce two arcs per edge.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool, mode: WeightMode) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, &path.display().to_string(), directed, mode)
}

/// Parse an edge list from text. `source_name` labels parse errors.
pub fn parse_edge_list(
    text: &str,
    source_name: &str,
    directed: bool,
    mode: WeightMode,
) -> Result<Graph> {
    let mut warnings = Vec::new();
    // (external source, external target, weight) in file order, both
    // directions already materialized for undirected inputs.
    let mut raw: Vec<(u64, u64, f64)> = Vec::new();
    let mut mentioned: Vec<u64> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse {
                path: source_name.into(),
                line: line_no,
                message: format!("expected 'u v [w]', got {} fields", tokens.len()),
            });
        }
        let parse_id = |tok: &str| -> Result<u64> {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                path: source_name.into(),
                line: line_no,
                message: format!("invalid node id '{}'", tok),
            })
        };
        let u = parse_id(tokens[0])?;
        let v = parse_id(tokens[1])?;
        let weight = match mode {
            WeightMode::UniformInDegree => 1.0, // replaced after materialization
            WeightMode::ExplicitColumn => {
                if tokens.len() < 3 {
                    return Err(Error::Parse {
                        path: source_name.into(),
                        line: line_no,
                        message: "explicit weight mode requires a third column".into(),
                    });
                }
                let w: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                    path: source_name.into(),
                    line: line_no,
                    message: format!("invalid weight '{}'", tokens[2]),
                })?;
                if !(0.0..=1.0).contains(&w) || !w.is_finite() {
                    return Err(Error::Parse {
                        path: source_name.into(),
                        line: line_no,
                        message: format!("weight {} outside [0,1]", w),
                    });
                }
                w
            }
        };
        mentioned.push(u);
        mentioned.push(v);
        if u == v {
            warnings.push(format!("line {}: self-loop at {} dropped", line_no, u));
            continue;
        }
        raw.push((u, v, weight));
        if !directed {
            raw.push((v, u, weight));
        }
    }

    if raw.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no arcs", source_name)));
    }

    mentioned.sort_unstable();
    mentioned.dedup();
    let external_ids = mentioned;
    let index_of: HashMap<u64, NodeId> = external_ids
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as NodeId))
        .collect();
    let node_count = external_ids.len();

    // Keep the first occurrence of each ordered pair, in file order.
    let mut seen: HashMap<(NodeId, NodeId), ()> = HashMap::new();
    let mut arcs: Vec<GraphArc> = Vec::with_capacity(raw.len());
    for (u, v, w) in raw {
        let s = index_of[&u];
        let t = index_of[&v];
        if seen.insert((s, t), ()).is_some() {
            warnings.push(format!("duplicate arc ({}, {}) ignored", u, v));
            continue;
        }
        arcs.push(GraphArc {
            source: s,
            target: t,
            weight: w,
        });
    }

    if let WeightMode::UniformInDegree = mode {
        let mut in_degree = vec![0usize; node_count];
        for arc in &arcs {
            in_degree[arc.target as usize] += 1;
        }
        for arc in &mut arcs {
            arc.weight = 1.0 / in_degree[arc.target as usize] as f64;
        }
    }

    Graph::from_arcs(node_count, external_ids, arcs, warnings)
}

/// The `size` nodes of highest total degree (in + out); ties go to the lower
/// node id.
pub fn top_degree_seeds(graph: &Graph, size: usize) -> Result<Vec<NodeId>> {
    if size > graph.node_count() {
        return Err(Error::InvalidInput(format!(
            "requested {} seeds from a {}-node graph",
            size,
            graph.node_count()
        )));
    }
    let mut nodes: Vec<NodeId> = (0..graph.node_count() as NodeId).collect();
    nodes.sort_by_key(|&v| (std::cmp::Reverse(graph.total_degree(v)), v));
    let mut seeds: Vec<NodeId> = nodes.into_iter().take(size).collect();
    seeds.sort_unstable();
    Ok(seeds)
}
