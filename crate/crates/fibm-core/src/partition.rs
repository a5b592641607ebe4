//! Disjoint community partition covering every node of a graph.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone)]
pub struct CommunityPartition {
    assignment: Vec<u32>,
    members: Vec<Vec<NodeId>>,
    labels: Vec<String>,
}

impl CommunityPartition {
    /// Build from a per-node label assignment; labels are remapped to
    /// contiguous community ids in lexicographic label order.
    pub fn from_labels(labels_per_node: Vec<String>) -> Result<Self> {
        if labels_per_node.is_empty() {
            return Err(Error::InvalidInput("empty partition".into()));
        }
        let mut labels: Vec<String> = labels_per_node.clone();
        labels.sort();
        labels.dedup();
        let index_of: HashMap<&str, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let assignment: Vec<u32> = labels_per_node
            .iter()
            .map(|l| index_of[l.as_str()])
            .collect();
        let mut members = vec![Vec::new(); labels.len()];
        for (node, &c) in assignment.iter().enumerate() {
            members[c as usize].push(node as NodeId);
        }
        Ok(CommunityPartition {
            assignment,
            members,
            labels,
        })
    }

    /// Build from numeric community ids (tests and synthetic instances).
    pub fn from_assignment(assignment: Vec<u32>) -> Result<Self> {
        Self::from_labels(assignment.iter().map(|c| format!("{:08}", c)).collect())
    }

    /// Everything in one community.
    pub fn single_community(node_count: usize) -> Self {
        Self::from_assignment(vec![0; node_count]).expect("nonempty")
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn community_count(&self) -> usize {
        self.members.len()
    }

    pub fn community_of(&self, v: NodeId) -> u32 {
        self.assignment[v as usize]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn members(&self, community: u32) -> &[NodeId] {
        &self.members[community as usize]
    }

    pub fn label(&self, community: u32) -> &str {
        &self.labels[community as usize]
    }
}

/// Load a community file: `node_id label` per line, `#` comments and blank
/// lines allowed. Every graph node must appear exactly once.
pub fn load_communities(path: impl AsRef<Path>, graph: &Graph) -> Result<CommunityPartition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_communities(&text, &path.display().to_string(), graph)
}

/// Parse a community assignment from text. `source_name` labels parse errors.
pub fn parse_communities(
    text: &str,
    source_name: &str,
    graph: &Graph,
) -> Result<CommunityPartition> {
    let mut labels_per_node: Vec<Option<String>> = vec![None; graph.node_count()];
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                path: source_name.into(),
                line: line_no,
                message: format!("expected 'node_id label', got {} fields", tokens.len()),
            });
        }
        let external: u64 = tokens[0].parse().map_err(|_| Error::Parse {
            path: source_name.into(),
            line: line_no,
            message: format!("invalid node id '{}'", tokens[0]),
        })?;
        let node = graph.internal_id(external).ok_or_else(|| Error::Parse {
            path: source_name.into(),
            line: line_no,
            message: format!("unknown node id {}", external),
        })?;
        if labels_per_node[node as usize].is_some() {
            return Err(Error::Parse {
                path: source_name.into(),
                line: line_no,
                message: format!("duplicate assignment for node {}", external),
            });
        }
        labels_per_node[node as usize] = Some(tokens[1].to_string());
    }
    for (node, label) in labels_per_node.iter().enumerate() {
        if label.is_none() {
            return Err(Error::InvalidInput(format!(
                "{}: node {} has no community",
                source_name,
                graph.external_id(node as NodeId)
            )));
        }
    }
    CommunityPartition::from_labels(labels_per_node.into_iter().map(|l| l.unwrap()).collect())
}
