//! Valid reverse-reachable (VRR) path index.
//!
//! For every root `v ∉ S_N` the sampler performs `R` independent reverse
//! walks through the live-edge space: from the current node, one in-arc is
//! kept with its LT weight (none with the residual probability). A walk is
//! valid when it reaches a negative seed and invalid on a no-selection, a
//! dead end, or a revisit. Since every node keeps at most one live in-arc,
//! the reverse chain from `v` is exactly `v`'s activation path, so the valid
//! fraction is an unbiased estimate of `v`'s activation probability and a
//! walk is blocked precisely when an immunized node lies on it.
//!
//! The index maintains the tuple `(M, D, L)`: `L` is the surviving
//! multiplicity per deduplicated path, `D[u]` the paths containing `u`, and
//! `M[u][v]` the surviving multiplicity of root-`v` paths through `u`. All
//! masses are integers; division by `R` happens only at the query boundary,
//! which keeps estimates exact and independent of iteration order.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Fnv1a, Graph, NodeId};
use crate::parallel;
use crate::partition::CommunityPartition;
use crate::rng::{substream, STREAM_VRR};

static BUILD_COUNTER: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, PartialEq)]
pub struct BlockEstimate {
    /// σ̂⁻: estimated blocked spread under the invalidations applied so far.
    pub blocked_total: f64,
    pub blocked_per_community: Vec<f64>,
    /// σ̂(S_N, G): estimated unblocked negative spread (seeds included).
    pub baseline_total: f64,
    pub baseline_per_community: Vec<f64>,
}

/// Increase in blocked mass if one node were selected, in integer mass units
/// (divide by `samples_per_root` for spread units).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalDelta {
    pub per_community_mass: Vec<u64>,
    pub total_mass: u64,
}

#[derive(Debug, Clone)]
pub struct IndexSnapshot {
    build_id: u64,
    live_multiplicity: Vec<u64>,
}

#[derive(Debug)]
pub struct VrrIndex {
    node_count: usize,
    community_count: usize,
    community_of: Vec<u32>,
    negative_seeds: BTreeSet<NodeId>,
    is_negative: Vec<bool>,
    samples_per_root: u64,
    rng_seed: u64,
    graph_fingerprint: u64,
    negative_fingerprint: u64,
    build_id: u64,

    // Immutable deduplicated path store; nodes[0] is the root and negative
    // seeds never appear on a path.
    path_root: Vec<NodeId>,
    path_nodes: Vec<Vec<NodeId>>,
    initial_multiplicity: Vec<u64>,
    containing_paths: Vec<Vec<u32>>,

    initial_root_mass: Vec<u64>,
    initial_node_mass: Vec<u64>,
    baseline_mass_per_community: Vec<u64>,
    baseline_mass_total: u64,

    // Mutable selection state.
    live_multiplicity: Vec<u64>,
    node_root_mass: Vec<HashMap<NodeId, u64>>,
    current_root_mass: Vec<u64>,
}

fn negative_fingerprint(negative_seeds: &BTreeSet<NodeId>) -> u64 {
    let mut h = Fnv1a::new();
    for &v in negative_seeds {
        h.write_u64(v as u64);
    }
    h.finish()
}

fn reverse_walk(
    graph: &Graph,
    is_negative: &[bool],
    root: NodeId,
    rng: &mut impl Rng,
) -> Option<Vec<NodeId>> {
    let mut nodes = vec![root];
    let mut current = root;
    loop {
        if graph.in_degree(current) == 0 {
            return None; // dead end
        }
        let x: f64 = rng.gen();
        // A residual no-selection ends the walk invalid.
        let u = graph.choose_in_arc(current, x)?;
        if is_negative[u as usize] {
            return Some(nodes);
        }
        if nodes.contains(&u) {
            return None; // cycle: can never reach S_N
        }
        nodes.push(u);
        current = u;
    }
}

/// Build the index with `samples_per_root` reverse walks from every root in
/// `V \ S_N`. Deterministic in `(graph, negative_seeds, samples_per_root,
/// rng_seed)`; walks for different roots use independent substreams.
pub fn sample_vrr(
    graph: &Graph,
    partition: &CommunityPartition,
    negative_seeds: &BTreeSet<NodeId>,
    samples_per_root: u64,
    rng_seed: u64,
) -> Result<VrrIndex> {
    if samples_per_root == 0 {
        return Err(Error::InvalidInput("samples_per_root must be >= 1".into()));
    }
    if negative_seeds.is_empty() {
        return Err(Error::InvalidInput("negative seed set is empty".into()));
    }
    if partition.node_count() != graph.node_count() {
        return Err(Error::InvalidInput(
            "partition does not cover the graph".into(),
        ));
    }
    let n = graph.node_count();
    let mut is_negative = vec![false; n];
    for &v in negative_seeds {
        if v as usize >= n {
            return Err(Error::InvalidInput(format!(
                "negative seed {} outside the graph",
                v
            )));
        }
        is_negative[v as usize] = true;
    }

    // Paths from different roots are distinct by construction (nodes[0] is
    // the root), so deduplication is local to each root and the per-root
    // stores concatenate deterministically.
    let threads = parallel::thread_count(None);
    let per_root: Vec<Vec<(Vec<NodeId>, u64)>> = parallel::par_map_indexed(n, threads, |root| {
        if is_negative[root] {
            return Vec::new();
        }
        let root = root as NodeId;
        let mut rng = substream(rng_seed, STREAM_VRR, root as u64);
        let mut order: Vec<(Vec<NodeId>, u64)> = Vec::new();
        let mut seen: HashMap<Vec<NodeId>, usize> = HashMap::new();
        for _ in 0..samples_per_root {
            if let Some(nodes) = reverse_walk(graph, &is_negative, root, &mut rng) {
                match seen.get(&nodes) {
                    Some(&i) => order[i].1 += 1,
                    None => {
                        seen.insert(nodes.clone(), order.len());
                        order.push((nodes, 1));
                    }
                }
            }
        }
        order
    });

    let mut path_root = Vec::new();
    let mut path_nodes = Vec::new();
    let mut initial_multiplicity = Vec::new();
    for (root, local) in per_root.into_iter().enumerate() {
        for (nodes, mult) in local {
            path_root.push(root as NodeId);
            path_nodes.push(nodes);
            initial_multiplicity.push(mult);
        }
    }

    VrrIndex::assemble(
        graph,
        partition,
        negative_seeds.clone(),
        is_negative,
        samples_per_root,
        rng_seed,
        path_root,
        path_nodes,
        initial_multiplicity,
    )
}

impl VrrIndex {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        graph: &Graph,
        partition: &CommunityPartition,
        negative_seeds: BTreeSet<NodeId>,
        is_negative: Vec<bool>,
        samples_per_root: u64,
        rng_seed: u64,
        path_root: Vec<NodeId>,
        path_nodes: Vec<Vec<NodeId>>,
        initial_multiplicity: Vec<u64>,
    ) -> Result<VrrIndex> {
        let n = graph.node_count();
        if path_root.len() > u32::MAX as usize {
            return Err(Error::InvalidInput("too many paths".into()));
        }
        let mut containing_paths = vec![Vec::new(); n];
        let mut initial_root_mass = vec![0u64; n];
        let mut initial_node_mass = vec![0u64; n];
        let mut node_root_mass: Vec<HashMap<NodeId, u64>> = vec![HashMap::new(); n];
        for (pid, nodes) in path_nodes.iter().enumerate() {
            let root = path_root[pid];
            let mult = initial_multiplicity[pid];
            initial_root_mass[root as usize] += mult;
            for &w in nodes {
                containing_paths[w as usize].push(pid as u32);
                initial_node_mass[w as usize] += mult;
                *node_root_mass[w as usize].entry(root).or_insert(0) += mult;
            }
        }
        let community_count = partition.community_count();
        let mut baseline_mass_per_community = vec![0u64; community_count];
        for v in 0..n {
            let c = partition.community_of(v as NodeId) as usize;
            if is_negative[v] {
                baseline_mass_per_community[c] += samples_per_root;
            } else {
                baseline_mass_per_community[c] += initial_root_mass[v];
            }
        }
        let baseline_mass_total = baseline_mass_per_community.iter().sum();
        let current_root_mass = initial_root_mass.clone();
        let live_multiplicity = initial_multiplicity.clone();
        Ok(VrrIndex {
            node_count: n,
            community_count,
            community_of: partition.assignment().to_vec(),
            negative_fingerprint: negative_fingerprint(&negative_seeds),
            negative_seeds,
            is_negative,
            samples_per_root,
            rng_seed,
            graph_fingerprint: graph.fingerprint(),
            build_id: BUILD_COUNTER.fetch_add(1, Ordering::Relaxed),
            path_root,
            path_nodes,
            initial_multiplicity,
            containing_paths,
            initial_root_mass,
            initial_node_mass,
            baseline_mass_per_community,
            baseline_mass_total,
            live_multiplicity,
            node_root_mass,
            current_root_mass,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn community_of(&self, v: NodeId) -> u32 {
        self.community_of[v as usize]
    }

    pub fn samples_per_root(&self) -> u64 {
        self.samples_per_root
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn negative_seeds(&self) -> &BTreeSet<NodeId> {
        &self.negative_seeds
    }

    pub fn path_count(&self) -> usize {
        self.path_root.len()
    }

    /// Read-only view of the immutable path store:
    /// `(root, nodes, initial multiplicity)` per deduplicated path.
    pub fn paths(&self) -> impl Iterator<Item = (NodeId, &[NodeId], u64)> + '_ {
        (0..self.path_root.len()).map(move |pid| {
            (
                self.path_root[pid],
                self.path_nodes[pid].as_slice(),
                self.initial_multiplicity[pid],
            )
        })
    }

    /// Nodes eligible for selection: outside `S_N` and lying on at least one
    /// valid path (zero-mass nodes can never improve any estimate).
    pub fn candidates(&self) -> Vec<NodeId> {
        (0..self.node_count as NodeId)
            .filter(|&v| !self.is_negative[v as usize] && self.initial_node_mass[v as usize] > 0)
            .collect()
    }

    /// σ̂(S_N, G) and its per-community split. Negative seeds count toward
    /// their own community; every root contributes its valid-walk fraction.
    pub fn estimate_negative_spread(&self) -> (f64, Vec<f64>) {
        let r = self.samples_per_root as f64;
        (
            self.baseline_mass_total as f64 / r,
            self.baseline_mass_per_community
                .iter()
                .map(|&m| m as f64 / r)
                .collect(),
        )
    }

    /// Integer blocked mass per community under the current invalidations.
    pub fn blocked_mass_per_community(&self) -> Vec<u64> {
        let mut blocked = vec![0u64; self.community_count];
        for v in 0..self.node_count {
            if self.is_negative[v] {
                continue;
            }
            let gone = self.initial_root_mass[v] - self.current_root_mass[v];
            blocked[self.community_of[v] as usize] += gone;
        }
        blocked
    }

    pub fn baseline_mass_per_community(&self) -> &[u64] {
        &self.baseline_mass_per_community
    }

    pub fn baseline_mass_total(&self) -> u64 {
        self.baseline_mass_total
    }

    /// σ̂⁻ and σ̂ baselines under the invalidations applied so far.
    pub fn blocked_estimate(&self) -> BlockEstimate {
        let r = self.samples_per_root as f64;
        let blocked = self.blocked_mass_per_community();
        BlockEstimate {
            blocked_total: blocked.iter().sum::<u64>() as f64 / r,
            blocked_per_community: blocked.iter().map(|&m| m as f64 / r).collect(),
            baseline_total: self.baseline_mass_total as f64 / r,
            baseline_per_community: self
                .baseline_mass_per_community
                .iter()
                .map(|&m| m as f64 / r)
                .collect(),
        }
    }

    /// Blocked-mass increase per community if `u` were selected now, without
    /// mutating the index. Exactly matches the effect of `invalidate(u)`.
    pub fn marginal_delta(&self, u: NodeId) -> Result<MarginalDelta> {
        if u as usize >= self.node_count {
            return Err(Error::InvalidInput(format!("node {} outside graph", u)));
        }
        if self.is_negative[u as usize] {
            return Err(Error::InvalidInput(format!(
                "node {} is a negative seed",
                u
            )));
        }
        let mut per_community_mass = vec![0u64; self.community_count];
        let mut total_mass = 0u64;
        for (&root, &mass) in &self.node_root_mass[u as usize] {
            per_community_mass[self.community_of[root as usize] as usize] += mass;
            total_mass += mass;
        }
        Ok(MarginalDelta {
            per_community_mass,
            total_mass,
        })
    }

    /// Invalidate every surviving path through `u`. Idempotent.
    pub fn invalidate(&mut self, u: NodeId) -> Result<()> {
        if u as usize >= self.node_count {
            return Err(Error::InvalidInput(format!("node {} outside graph", u)));
        }
        if self.is_negative[u as usize] {
            return Err(Error::InvalidInput(format!(
                "node {} is a negative seed",
                u
            )));
        }
        let pids = self.containing_paths[u as usize].clone();
        for pid in pids {
            let mult = self.live_multiplicity[pid as usize];
            if mult == 0 {
                continue;
            }
            let root = self.path_root[pid as usize];
            for &w in &self.path_nodes[pid as usize] {
                let map = &mut self.node_root_mass[w as usize];
                let entry = map.get_mut(&root).expect("mass entry present");
                *entry -= mult;
                if *entry == 0 {
                    map.remove(&root);
                }
            }
            self.current_root_mass[root as usize] -= mult;
            self.live_multiplicity[pid as usize] = 0;
        }
        #[cfg(debug_assertions)]
        {
            // Full recount is O(total path length); keep it to small indices.
            if self.path_root.len() <= 20_000 {
                self.consistency_check().expect("M consistency");
            }
        }
        Ok(())
    }

    pub fn snapshot(&self) -> IndexSnapshot {
        IndexSnapshot {
            build_id: self.build_id,
            live_multiplicity: self.live_multiplicity.clone(),
        }
    }

    /// Return `L` and `M` exactly to the snapshotted state. The path store
    /// and `D` are shared, never copied.
    pub fn restore(&mut self, snapshot: &IndexSnapshot) -> Result<()> {
        if snapshot.build_id != self.build_id {
            return Err(Error::InvalidInput(
                "stale snapshot: index was rebuilt since the token was taken".into(),
            ));
        }
        if snapshot.live_multiplicity.len() != self.live_multiplicity.len() {
            return Err(Error::InvalidInput("snapshot length mismatch".into()));
        }
        self.live_multiplicity.clone_from(&snapshot.live_multiplicity);
        for map in &mut self.node_root_mass {
            map.clear();
        }
        self.current_root_mass.iter_mut().for_each(|m| *m = 0);
        for (pid, nodes) in self.path_nodes.iter().enumerate() {
            let mult = self.live_multiplicity[pid];
            if mult == 0 {
                continue;
            }
            let root = self.path_root[pid];
            self.current_root_mass[root as usize] += mult;
            for &w in nodes {
                *self.node_root_mass[w as usize].entry(root).or_insert(0) += mult;
            }
        }
        Ok(())
    }

    /// Recount `M`, `current root mass`, and `L` bounds from scratch and
    /// compare with the maintained state.
    pub fn consistency_check(&self) -> Result<()> {
        let mut expected_mass: Vec<HashMap<NodeId, u64>> = vec![HashMap::new(); self.node_count];
        let mut expected_root = vec![0u64; self.node_count];
        for (pid, nodes) in self.path_nodes.iter().enumerate() {
            let mult = self.live_multiplicity[pid];
            if mult > self.initial_multiplicity[pid] {
                return Err(Error::Validation(format!(
                    "path {} live multiplicity exceeds its initial value",
                    pid
                )));
            }
            if mult == 0 {
                continue;
            }
            let root = self.path_root[pid];
            expected_root[root as usize] += mult;
            for &w in nodes {
                *expected_mass[w as usize].entry(root).or_insert(0) += mult;
            }
        }
        if expected_root != self.current_root_mass {
            return Err(Error::Validation("root mass out of sync with L".into()));
        }
        for (v, expected) in expected_mass.iter().enumerate() {
            if expected != &self.node_root_mass[v] {
                return Err(Error::Validation(format!(
                    "M entries for node {} out of sync with L",
                    v
                )));
            }
        }
        Ok(())
    }

    /// Deliberately break M-consistency. Test hook for the validation suite.
    #[doc(hidden)]
    pub fn corrupt_for_test(&mut self) {
        for map in self.node_root_mass.iter_mut() {
            if let Some((&root, _)) = map.iter().next() {
                *map.get_mut(&root).unwrap() += 1;
                return;
            }
        }
    }

    /// Persist the sampled index (initial multiplicities), keyed by the
    /// build inputs.
    pub fn write_dump(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "fibm-vrr-index 1")?;
        writeln!(w, "graph {:016x}", self.graph_fingerprint)?;
        writeln!(w, "negative-seeds {:016x}", self.negative_fingerprint)?;
        writeln!(w, "samples-per-root {}", self.samples_per_root)?;
        writeln!(w, "rng-seed {}", self.rng_seed)?;
        writeln!(w, "node-count {}", self.node_count)?;
        writeln!(w, "path-count {}", self.path_root.len())?;
        for (pid, nodes) in self.path_nodes.iter().enumerate() {
            write!(
                w,
                "{} {}",
                self.path_root[pid], self.initial_multiplicity[pid]
            )?;
            for &v in &nodes[1..] {
                write!(w, " {}", v)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Load a dump, verifying it matches the requested build keys. A key
    /// mismatch is reported as a cache miss.
    pub fn load_dump(
        reader: impl BufRead,
        graph: &Graph,
        partition: &CommunityPartition,
        negative_seeds: &BTreeSet<NodeId>,
        samples_per_root: u64,
        rng_seed: u64,
    ) -> Result<VrrIndex> {
        let bad = |msg: &str| Error::InvalidInput(format!("index dump: {}", msg));
        let mut lines = reader.lines();
        let mut next_line = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| bad("truncated header"))?
                .map_err(|e| Error::io("<dump>", e))
        };
        if next_line()? != "fibm-vrr-index 1" {
            return Err(bad("unrecognized header"));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = next_line()?;
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| bad("malformed header field"))?;
            if key != name {
                return Err(bad(&format!("expected header field '{}'", name)));
            }
            Ok(value.to_string())
        };
        let graph_key = u64::from_str_radix(&field("graph")?, 16)
            .map_err(|_| bad("bad graph fingerprint"))?;
        let negative_key = u64::from_str_radix(&field("negative-seeds")?, 16)
            .map_err(|_| bad("bad negative-seed fingerprint"))?;
        let dumped_r: u64 = field("samples-per-root")?
            .parse()
            .map_err(|_| bad("bad samples-per-root"))?;
        let dumped_seed: u64 = field("rng-seed")?.parse().map_err(|_| bad("bad rng-seed"))?;
        let node_count: usize = field("node-count")?
            .parse()
            .map_err(|_| bad("bad node-count"))?;
        let path_count: usize = field("path-count")?
            .parse()
            .map_err(|_| bad("bad path-count"))?;

        let expected_sn = negative_fingerprint(negative_seeds);
        if graph_key != graph.fingerprint()
            || negative_key != expected_sn
            || dumped_r != samples_per_root
            || dumped_seed != rng_seed
            || node_count != graph.node_count()
        {
            return Err(Error::CacheMiss(
                "dump keys do not match (graph, S_N, samples-per-root, rng-seed)".into(),
            ));
        }

        let mut is_negative = vec![false; node_count];
        for &v in negative_seeds {
            is_negative[v as usize] = true;
        }
        let mut path_root = Vec::with_capacity(path_count);
        let mut path_nodes = Vec::with_capacity(path_count);
        let mut initial_multiplicity = Vec::with_capacity(path_count);
        let mut root_totals = vec![0u64; node_count];
        for _ in 0..path_count {
            let line = lines
                .next()
                .ok_or_else(|| bad("truncated path records"))?
                .map_err(|e| Error::io("<dump>", e))?;
            let mut tokens = line.split_whitespace();
            let root: NodeId = tokens
                .next()
                .ok_or_else(|| bad("empty path record"))?
                .parse()
                .map_err(|_| bad("bad root"))?;
            let mult: u64 = tokens
                .next()
                .ok_or_else(|| bad("missing multiplicity"))?
                .parse()
                .map_err(|_| bad("bad multiplicity"))?;
            if mult == 0 {
                return Err(bad("zero multiplicity"));
            }
            let mut nodes = vec![root];
            for tok in tokens {
                nodes.push(tok.parse().map_err(|_| bad("bad path node"))?);
            }
            for &v in &nodes {
                if v as usize >= node_count {
                    return Err(bad("path node outside graph"));
                }
                if is_negative[v as usize] {
                    return Err(bad("negative seed on a path"));
                }
            }
            root_totals[root as usize] += mult;
            if root_totals[root as usize] > samples_per_root {
                return Err(bad("root mass exceeds samples-per-root"));
            }
            path_root.push(root);
            path_nodes.push(nodes);
            initial_multiplicity.push(mult);
        }

        VrrIndex::assemble(
            graph,
            partition,
            negative_seeds.clone(),
            is_negative,
            samples_per_root,
            rng_seed,
            path_root,
            path_nodes,
            initial_multiplicity,
        )
    }
}
