//! C ABI for the fair influence blocking maximization toolkit.
//!
//! Opaque handles wrap the core types; every fallible call returns a
//! `FibmStatus` and leaves a human-readable message retrievable through
//! `fibm_last_error_message` (thread-local). Node ids crossing the boundary
//! are always the input file's external ids.
//!
//! The C header is generated into `include/fibm.h` at build time.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::sync::Arc;

use fibm_core::graph::{load_edge_list, top_degree_seeds, Graph, WeightMode};
use fibm_core::optimize::{select, SelectorKind};
use fibm_core::partition::{load_communities, CommunityPartition};
use fibm_core::problem::ProblemInstance;
use fibm_core::vrr::{sample_vrr, VrrIndex};
use fibm_core::{diffusion, Error};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    IoError = 5,
    BufferTooSmall = 6,
    ValidationFailed = 7,
}

/// Seed selection strategy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibmSelector {
    CelfR = 0,
    Celf = 1,
    Fc = 2,
}

/// Summary metrics of a selection run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FibmMetrics {
    /// Blocking effectiveness F of the final seed set.
    pub effectiveness: f64,
    /// Fairness objective W of the final seed set.
    pub fairness: f64,
    /// Scalarized objective K = beta*W + (1-beta)*F.
    pub objective: f64,
    /// Demographic parity gap (max - min blocked ratio).
    pub dp_gap: f64,
    /// Empirical approximation-degradation bound psi_k.
    pub psi: f64,
    /// Largest observed submodularity violation.
    pub eps_max: f64,
    /// Total marginal-gain evaluations.
    pub evaluations: u64,
    /// True when selection stopped before reaching the budget.
    pub stopped_early: bool,
}

pub struct FibmGraph {
    inner: Arc<Graph>,
}

pub struct FibmPartition {
    inner: Arc<CommunityPartition>,
}

pub struct FibmIndex {
    graph: Arc<Graph>,
    partition: Arc<CommunityPartition>,
    negative: BTreeSet<u32>,
    index: VrrIndex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> FibmStatus {
    match err {
        Error::Parse { .. } => FibmStatus::ParseError,
        Error::InvalidInput(_) | Error::Config(_) | Error::CacheMiss(_) => {
            FibmStatus::InvalidInput
        }
        Error::Io { .. } => FibmStatus::IoError,
        Error::Validation(_) => FibmStatus::ValidationFailed,
    }
}

fn fail(err: Error) -> FibmStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Last error message for this thread, valid until the next failing call.
#[no_mangle]
pub extern "C" fn fibm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fibm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn path_from(ptr: *const c_char) -> Result<String, FibmStatus> {
    if ptr.is_null() {
        set_error("null path");
        return Err(FibmStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(s.to_owned()),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(FibmStatus::InvalidUtf8)
        }
    }
}

/// Load an edge list (`u v [w]` lines). With `uniform_weights` every arc into
/// `v` gets weight `1/in-degree(v)`; otherwise the third column is required.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer. On
/// success `*out` owns a graph that must be released with `fibm_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn fibm_graph_load(
    path: *const c_char,
    directed: bool,
    uniform_weights: bool,
    out: *mut *mut FibmGraph,
) -> FibmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return FibmStatus::NullArgument;
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let mode = if uniform_weights {
        WeightMode::UniformInDegree
    } else {
        WeightMode::ExplicitColumn
    };
    match load_edge_list(&path, directed, mode) {
        Ok(graph) => {
            *out = Box::into_raw(Box::new(FibmGraph {
                inner: Arc::new(graph),
            }));
            FibmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `graph` must come from `fibm_graph_load` and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn fibm_graph_free(graph: *mut FibmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle (or null, which yields 0).
#[no_mangle]
pub unsafe extern "C" fn fibm_graph_node_count(graph: *const FibmGraph) -> u64 {
    graph
        .as_ref()
        .map(|g| g.inner.node_count() as u64)
        .unwrap_or(0)
}

/// # Safety
/// `graph` must be a live handle (or null, which yields 0).
#[no_mangle]
pub unsafe extern "C" fn fibm_graph_arc_count(graph: *const FibmGraph) -> u64 {
    graph
        .as_ref()
        .map(|g| g.inner.arc_count() as u64)
        .unwrap_or(0)
}

/// Load a community file (`node_id label` lines) covering every graph node.
///
/// # Safety
/// `path` must be NUL-terminated, `graph` a live handle, `out` valid. On
/// success `*out` must be released with `fibm_partition_free`.
#[no_mangle]
pub unsafe extern "C" fn fibm_partition_load(
    path: *const c_char,
    graph: *const FibmGraph,
    out: *mut *mut FibmPartition,
) -> FibmStatus {
    if graph.is_null() || out.is_null() {
        set_error("null argument");
        return FibmStatus::NullArgument;
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match load_communities(&path, &(*graph).inner) {
        Ok(partition) => {
            *out = Box::into_raw(Box::new(FibmPartition {
                inner: Arc::new(partition),
            }));
            FibmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `partition` must come from `fibm_partition_load` and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn fibm_partition_free(partition: *mut FibmPartition) {
    if !partition.is_null() {
        drop(Box::from_raw(partition));
    }
}

/// # Safety
/// `partition` must be a live handle (or null, which yields 0).
#[no_mangle]
pub unsafe extern "C" fn fibm_partition_community_count(partition: *const FibmPartition) -> u64 {
    partition
        .as_ref()
        .map(|p| p.inner.community_count() as u64)
        .unwrap_or(0)
}

/// The `size` highest-total-degree nodes (ties to the lower id), written as
/// external ids into `out_ids`.
///
/// # Safety
/// `graph` must be live and `out_ids` must point to at least `capacity`
/// writable u64 slots; `written` receives the count when non-null.
#[no_mangle]
pub unsafe extern "C" fn fibm_top_degree_seeds(
    graph: *const FibmGraph,
    size: u64,
    out_ids: *mut u64,
    capacity: usize,
    written: *mut usize,
) -> FibmStatus {
    if graph.is_null() || out_ids.is_null() {
        set_error("null argument");
        return FibmStatus::NullArgument;
    }
    let g = &(*graph).inner;
    let seeds = match top_degree_seeds(g, size as usize) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if seeds.len() > capacity {
        set_error("output buffer too small");
        return FibmStatus::BufferTooSmall;
    }
    for (i, &v) in seeds.iter().enumerate() {
        *out_ids.add(i) = g.external_id(v);
    }
    if !written.is_null() {
        *written = seeds.len();
    }
    FibmStatus::Ok
}

fn internal_seed_set(graph: &Graph, ids: &[u64]) -> Result<BTreeSet<u32>, Error> {
    ids.iter()
        .map(|&external| {
            graph
                .internal_id(external)
                .ok_or_else(|| Error::InvalidInput(format!("node {} not in the graph", external)))
        })
        .collect()
}

/// Sample the VRR path index for the given negative seeds (external ids).
///
/// # Safety
/// `graph` and `partition` must be live handles built from the same inputs,
/// `negative_ids` must point to `negative_count` readable u64 values, and
/// `out` must be valid. On success `*out` must be released with
/// `fibm_index_free`.
#[no_mangle]
pub unsafe extern "C" fn fibm_index_build(
    graph: *const FibmGraph,
    partition: *const FibmPartition,
    negative_ids: *const u64,
    negative_count: usize,
    samples_per_root: u64,
    rng_seed: u64,
    out: *mut *mut FibmIndex,
) -> FibmStatus {
    if graph.is_null() || partition.is_null() || negative_ids.is_null() || out.is_null() {
        set_error("null argument");
        return FibmStatus::NullArgument;
    }
    let g = (*graph).inner.clone();
    let p = (*partition).inner.clone();
    let ids = std::slice::from_raw_parts(negative_ids, negative_count);
    let negative = match internal_seed_set(&g, ids) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match sample_vrr(&g, &p, &negative, samples_per_root, rng_seed) {
        Ok(index) => {
            *out = Box::into_raw(Box::new(FibmIndex {
                graph: g,
                partition: p,
                negative,
                index,
            }));
            FibmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `index` must come from `fibm_index_build` and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn fibm_index_free(index: *mut FibmIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// Estimated negative spread σ̂(S_N, G) of the sampled index.
///
/// # Safety
/// `index` must be live; `out_total` receives the estimate when non-null.
#[no_mangle]
pub unsafe extern "C" fn fibm_index_negative_spread(
    index: *const FibmIndex,
    out_total: *mut f64,
) -> FibmStatus {
    if index.is_null() {
        set_error("null argument");
        return FibmStatus::NullArgument;
    }
    let (total, _) = (*index).index.estimate_negative_spread();
    if !out_total.is_null() {
        *out_total = total;
    }
    FibmStatus::Ok
}

/// Select up to `budget` positive seeds maximizing K = beta*W + (1-beta)*F.
/// The index state is snapshotted and restored, so the handle can be reused
/// across calls (one sampling, many selections). Seeds are written as
/// external ids.
///
/// # Safety
/// `index` must be live and not used concurrently from other threads;
/// `out_seeds` must point to at least `capacity` writable u64 slots;
/// `out_len` and `out_metrics` receive results when non-null.
#[no_mangle]
pub unsafe extern "C" fn fibm_select(
    index: *mut FibmIndex,
    budget: u64,
    alpha: f64,
    beta: f64,
    selector: FibmSelector,
    out_seeds: *mut u64,
    capacity: usize,
    out_len: *mut usize,
    out_metrics: *mut FibmMetrics,
) -> FibmStatus {
    if index.is_null() || out_seeds.is_null() {
        set_error("null argument");
        return FibmStatus::NullArgument;
    }
    let handle = &mut *index;
    let problem = match ProblemInstance::new(
        handle.graph.clone(),
        handle.partition.clone(),
        handle.negative.clone(),
        budget as usize,
        1.0,
        alpha,
        beta,
    ) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let kind = match selector {
        FibmSelector::CelfR => SelectorKind::CelfR,
        FibmSelector::Celf => SelectorKind::Celf,
        FibmSelector::Fc => SelectorKind::Fc,
    };
    let snapshot = handle.index.snapshot();
    let outcome = select(&mut handle.index, &problem, kind);
    if let Err(e) = handle.index.restore(&snapshot) {
        return fail(e);
    }
    let solution = match outcome {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if solution.seeds.len() > capacity {
        set_error("output buffer too small");
        return FibmStatus::BufferTooSmall;
    }
    for (i, &v) in solution.seeds.iter().enumerate() {
        *out_seeds.add(i) = handle.graph.external_id(v);
    }
    if !out_len.is_null() {
        *out_len = solution.seeds.len();
    }
    if !out_metrics.is_null() {
        let objective = solution.final_objective();
        *out_metrics = FibmMetrics {
            effectiveness: objective.f,
            fairness: objective.w,
            objective: objective.k,
            dp_gap: objective.dp_gap,
            psi: solution.psi_k,
            eps_max: solution.eps_max,
            evaluations: solution.lambda_total(),
            stopped_early: solution.short,
        };
    }
    FibmStatus::Ok
}

/// Monte Carlo blocked spread σ⁻(S_P) with common random numbers; also
/// reports the unblocked baseline σ(S_N, G).
///
/// # Safety
/// `graph` and `partition` must be live and consistent; the id arrays must
/// point to the stated numbers of readable u64 values; output pointers
/// receive results when non-null.
#[no_mangle]
pub unsafe extern "C" fn fibm_blocked_spread_mc(
    graph: *const FibmGraph,
    partition: *const FibmPartition,
    negative_ids: *const u64,
    negative_count: usize,
    positive_ids: *const u64,
    positive_count: usize,
    runs: u64,
    rng_seed: u64,
    out_blocked: *mut f64,
    out_baseline: *mut f64,
) -> FibmStatus {
    if graph.is_null() || partition.is_null() || negative_ids.is_null() {
        set_error("null argument");
        return FibmStatus::NullArgument;
    }
    if positive_ids.is_null() && positive_count > 0 {
        set_error("null positive seed array");
        return FibmStatus::NullArgument;
    }
    let g = &(*graph).inner;
    let p = &(*partition).inner;
    let negative =
        match internal_seed_set(g, std::slice::from_raw_parts(negative_ids, negative_count)) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
    let positive = if positive_count == 0 {
        BTreeSet::new()
    } else {
        match internal_seed_set(g, std::slice::from_raw_parts(positive_ids, positive_count)) {
            Ok(s) => s,
            Err(e) => return fail(e),
        }
    };
    match diffusion::blocked_spread(
        g,
        p,
        &negative,
        &positive,
        diffusion::SpreadMethod::MonteCarlo { runs },
        rng_seed,
    ) {
        Ok(result) => {
            if !out_blocked.is_null() {
                *out_blocked = result.blocked_total;
            }
            if !out_baseline.is_null() {
                *out_baseline = result.baseline_total;
            }
            FibmStatus::Ok
        }
        Err(e) => fail(e),
    }
}
