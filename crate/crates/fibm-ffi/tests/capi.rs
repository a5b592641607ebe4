//! Exercises the C ABI through the exported extern "C" functions.

use std::ffi::{CStr, CString};
use std::ptr;

use fibm_ffi::*;

fn write_chain(dir: &std::path::Path) -> (CString, CString) {
    let graph = dir.join("chain.edges");
    let comms = dir.join("chain.comms");
    std::fs::write(&graph, "0 1\n1 2\n2 3\n").unwrap();
    std::fs::write(&comms, "0 a\n1 a\n2 b\n3 b\n").unwrap();
    (
        CString::new(graph.to_str().unwrap()).unwrap(),
        CString::new(comms.to_str().unwrap()).unwrap(),
    )
}

#[test]
fn version_is_exposed() {
    let version = unsafe { CStr::from_ptr(fibm_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn full_pipeline_through_the_c_abi() {
    let tmp = tempfile::tempdir().unwrap();
    let (graph_path, comms_path) = write_chain(tmp.path());

    unsafe {
        let mut graph: *mut FibmGraph = ptr::null_mut();
        let status = fibm_graph_load(graph_path.as_ptr(), true, true, &mut graph);
        assert_eq!(status, FibmStatus::Ok);
        assert_eq!(fibm_graph_node_count(graph), 4);
        assert_eq!(fibm_graph_arc_count(graph), 3);

        let mut partition: *mut FibmPartition = ptr::null_mut();
        let status = fibm_partition_load(comms_path.as_ptr(), graph, &mut partition);
        assert_eq!(status, FibmStatus::Ok);
        assert_eq!(fibm_partition_community_count(partition), 2);

        let mut top = [0u64; 2];
        let mut written = 0usize;
        let status = fibm_top_degree_seeds(graph, 1, top.as_mut_ptr(), top.len(), &mut written);
        assert_eq!(status, FibmStatus::Ok);
        assert_eq!(written, 1);
        // Chain 0->1->2->3: node 1 and 2 tie at total degree 2; lower id wins.
        assert_eq!(top[0], 1);

        let negative = [0u64];
        let mut index: *mut FibmIndex = ptr::null_mut();
        let status = fibm_index_build(
            graph,
            partition,
            negative.as_ptr(),
            negative.len(),
            200,
            7,
            &mut index,
        );
        assert_eq!(status, FibmStatus::Ok);

        let mut sigma = 0.0f64;
        assert_eq!(
            fibm_index_negative_spread(index, &mut sigma),
            FibmStatus::Ok
        );
        assert_eq!(sigma, 4.0); // deterministic chain, every walk valid

        let mut seeds = [0u64; 4];
        let mut len = 0usize;
        let mut metrics = FibmMetrics {
            effectiveness: 0.0,
            fairness: 0.0,
            objective: 0.0,
            dp_gap: 0.0,
            psi: 0.0,
            eps_max: 0.0,
            evaluations: 0,
            stopped_early: false,
        };
        let status = fibm_select(
            index,
            1,
            0.5,
            0.0,
            FibmSelector::CelfR,
            seeds.as_mut_ptr(),
            seeds.len(),
            &mut len,
            &mut metrics,
        );
        assert_eq!(status, FibmStatus::Ok);
        assert_eq!(len, 1);
        assert_eq!(seeds[0], 1); // immunizing node 1 blocks 1, 2, and 3
        assert!((metrics.effectiveness - 0.75).abs() < 1e-12);
        assert!(!metrics.stopped_early);
        assert!(metrics.evaluations >= 1);

        // The handle was restored: a second run gives the same answer.
        let status = fibm_select(
            index,
            2,
            0.5,
            0.5,
            FibmSelector::Fc,
            seeds.as_mut_ptr(),
            seeds.len(),
            &mut len,
            ptr::null_mut(),
        );
        assert_eq!(status, FibmStatus::Ok);
        assert_eq!(len, 2);
        assert_eq!(seeds[0], 1);

        let mut blocked = 0.0f64;
        let mut baseline = 0.0f64;
        let positive = [1u64];
        let status = fibm_blocked_spread_mc(
            graph,
            partition,
            negative.as_ptr(),
            negative.len(),
            positive.as_ptr(),
            positive.len(),
            500,
            3,
            &mut blocked,
            &mut baseline,
        );
        assert_eq!(status, FibmStatus::Ok);
        assert_eq!(baseline, 4.0);
        assert_eq!(blocked, 3.0);

        fibm_index_free(index);
        fibm_partition_free(partition);
        fibm_graph_free(graph);
    }
}

#[test]
fn error_paths_set_status_and_message() {
    unsafe {
        let mut graph: *mut FibmGraph = ptr::null_mut();
        // Null path.
        assert_eq!(
            fibm_graph_load(ptr::null(), true, true, &mut graph),
            FibmStatus::NullArgument
        );
        // Missing file.
        let bogus = CString::new("/nonexistent/file.edges").unwrap();
        assert_eq!(
            fibm_graph_load(bogus.as_ptr(), true, true, &mut graph),
            FibmStatus::IoError
        );
        let message = CStr::from_ptr(fibm_last_error_message());
        assert!(message.to_str().unwrap().contains("io error"));

        // Malformed content.
        let tmp = tempfile::tempdir().unwrap();
        let bad = tmp.path().join("bad.edges");
        std::fs::write(&bad, "0 1\nnot an edge\n").unwrap();
        let bad_c = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(
            fibm_graph_load(bad_c.as_ptr(), true, true, &mut graph),
            FibmStatus::ParseError
        );

        // Buffer too small and unknown seed ids.
        let (graph_path, _) = write_chain(tmp.path());
        assert_eq!(
            fibm_graph_load(graph_path.as_ptr(), true, true, &mut graph),
            FibmStatus::Ok
        );
        let mut one = [0u64; 1];
        assert_eq!(
            fibm_top_degree_seeds(graph, 3, one.as_mut_ptr(), 1, ptr::null_mut()),
            FibmStatus::BufferTooSmall
        );
        let mut index: *mut FibmIndex = ptr::null_mut();
        let mut partition: *mut FibmPartition = ptr::null_mut();
        let comms = tmp.path().join("chain.comms");
        let comms_c = CString::new(comms.to_str().unwrap()).unwrap();
        assert_eq!(
            fibm_partition_load(comms_c.as_ptr(), graph, &mut partition),
            FibmStatus::Ok
        );
        let unknown = [99u64];
        assert_eq!(
            fibm_index_build(graph, partition, unknown.as_ptr(), 1, 100, 0, &mut index),
            FibmStatus::InvalidInput
        );
        let message = CStr::from_ptr(fibm_last_error_message());
        assert!(message.to_str().unwrap().contains("99"));

        fibm_partition_free(partition);
        fibm_graph_free(graph);
        // Frees tolerate null.
        fibm_graph_free(ptr::null_mut());
        fibm_index_free(ptr::null_mut());
        fibm_partition_free(ptr::null_mut());
    }
}
