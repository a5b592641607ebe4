//! Estimator-versus-oracle validation harness.
//!
//! Each check returns a pass/fail line; the CLI exits nonzero when any
//! tolerance fails. The random suites are seeded and deterministic.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diffusion::{blocked_spread, lt_spread_exact, lt_spread_mc, SpreadMethod};
use crate::graph::{Graph, NodeId};
use crate::objective::{alpha_sensitivity_bound, fairness_w, FairnessConfig};
use crate::partition::CommunityPartition;
use crate::rng::substream;
use crate::synth;
use crate::vrr::{sample_vrr, VrrIndex};

const STREAM_VALIDATE: u64 = 0x5641;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail,
        }
    }

    pub fn render(&self) -> String {
        format!(
            "[{}] {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn set(ids: &[NodeId]) -> BTreeSet<NodeId> {
    ids.iter().copied().collect()
}

/// The deterministic chain A→B→C with S_N = {A}: every estimator must agree
/// with the hand-computed values exactly.
pub fn check_chain_suite() -> CheckResult {
    let run = || -> crate::Result<String> {
        let g = crate::graph::parse_edge_list(
            "0 1\n1 2\n",
            "chain",
            true,
            crate::graph::WeightMode::UniformInDegree,
        )?;
        let p = CommunityPartition::single_community(3);
        let sn = set(&[0]);
        let exact = lt_spread_exact(&g, &p, &sn, &BTreeSet::new())?;
        if exact.total != 3.0 {
            return Err(crate::Error::Validation(format!(
                "exact chain spread {} != 3",
                exact.total
            )));
        }
        let blocked = blocked_spread(&g, &p, &sn, &set(&[1]), SpreadMethod::Exact, 0)?;
        if blocked.blocked_total != 2.0 {
            return Err(crate::Error::Validation(format!(
                "exact chain blocking {} != 2",
                blocked.blocked_total
            )));
        }
        let mut index = sample_vrr(&g, &p, &sn, 100, 0)?;
        let (sigma, _) = index.estimate_negative_spread();
        if sigma != 3.0 {
            return Err(crate::Error::Validation(format!(
                "vrr chain spread {} != 3",
                sigma
            )));
        }
        index.invalidate(1)?;
        let est = index.blocked_estimate();
        if est.blocked_total != 2.0 {
            return Err(crate::Error::Validation(format!(
                "vrr chain blocking {} != 2",
                est.blocked_total
            )));
        }
        Ok("chain oracle values reproduced with zero error".into())
    };
    match run() {
        Ok(detail) => CheckResult::new("chain-suite", true, detail),
        Err(e) => CheckResult::new("chain-suite", false, e.to_string()),
    }
}

/// Monte Carlo vs exact enumeration on random small graphs: the MC estimate
/// must fall within 4 standard errors of the exact value in ≥ 19/20 cases.
pub fn check_oracle_agreement(rng_seed: u64, runs: u64) -> CheckResult {
    let trials = 20u64;
    let mut hits = 0;
    for t in 0..trials {
        let (g, p) = synth::random_instance(6, 2, rng_seed.wrapping_add(t));
        let sn = set(&[0]);
        let exact = lt_spread_exact(&g, &p, &sn, &BTreeSet::new()).expect("small graph");
        let mc = lt_spread_mc(&g, &p, &sn, &BTreeSet::new(), runs, rng_seed ^ t).expect("runs");
        if (mc.total - exact.total).abs() <= 4.0 * mc.stderr + 1e-9 {
            hits += 1;
        }
    }
    CheckResult::new(
        "oracle-agreement",
        hits >= 19,
        format!("{}/{} graphs within 4 standard errors ({} runs)", hits, trials, runs),
    )
}

/// VRR spread estimates within 5% of the exact oracle on ≥ 18/20 graphs.
pub fn check_vrr_spread_fidelity(rng_seed: u64, samples_per_root: u64) -> CheckResult {
    let trials = 20u64;
    let mut hits = 0;
    for t in 0..trials {
        let (g, p) = synth::random_instance(6, 2, rng_seed.wrapping_add(1000 + t));
        let sn = set(&[0]);
        let exact = lt_spread_exact(&g, &p, &sn, &BTreeSet::new()).expect("small graph");
        let index = sample_vrr(&g, &p, &sn, samples_per_root, rng_seed ^ t).expect("samples");
        let (sigma, _) = index.estimate_negative_spread();
        if (sigma - exact.total).abs() <= 0.05 * exact.total {
            hits += 1;
        }
    }
    CheckResult::new(
        "vrr-spread-fidelity",
        hits >= 18,
        format!(
            "{}/{} graphs within 5% of exact spread (R = {})",
            hits, trials, samples_per_root
        ),
    )
}

/// VRR blocked estimates for random 2-node positive sets within 7% of the
/// exact baseline spread on ≥ 18/20 graphs.
pub fn check_vrr_blocked_fidelity(rng_seed: u64, samples_per_root: u64) -> CheckResult {
    let trials = 20u64;
    let mut hits = 0;
    let mut rng = substream(rng_seed, STREAM_VALIDATE, 1);
    for t in 0..trials {
        let (g, p) = synth::random_instance(6, 2, rng_seed.wrapping_add(2000 + t));
        let sn = set(&[0]);
        let mut candidates: Vec<NodeId> = (1..g.node_count() as NodeId).collect();
        candidates.shuffle(&mut rng);
        candidates.truncate(2);
        let sp: BTreeSet<NodeId> = candidates.into_iter().collect();
        let oracle =
            blocked_spread(&g, &p, &sn, &sp, SpreadMethod::Exact, 0).expect("small graph");
        let mut index = sample_vrr(&g, &p, &sn, samples_per_root, rng_seed ^ t).expect("samples");
        for &v in &sp {
            index.invalidate(v).expect("candidate");
        }
        let est = index.blocked_estimate();
        if (est.blocked_total - oracle.blocked_total).abs() <= 0.07 * oracle.baseline_total {
            hits += 1;
        }
    }
    CheckResult::new(
        "vrr-blocked-fidelity",
        hits >= 18,
        format!(
            "{}/{} random 2-node positive sets within 7% of exact (R = {})",
            hits, trials, samples_per_root
        ),
    )
}

/// The blocked estimate as a set function is a weighted coverage function:
/// exhaustively verify monotonicity and submodularity on small indices.
pub fn check_coverage_submodularity(rng_seed: u64, indices: usize) -> CheckResult {
    let mut violations = 0u64;
    let mut pairs_checked = 0u64;
    for t in 0..indices as u64 {
        let (g, p) = synth::random_instance(6, 2, rng_seed.wrapping_add(3000 + t));
        let sn = set(&[0]);
        let mut index = sample_vrr(&g, &p, &sn, 200, rng_seed ^ t).expect("samples");
        let fresh = index.snapshot();
        let pool = index.candidates();
        let n = pool.len().min(6);
        let mut value = vec![0u64; 1 << n];
        for bits in 0..(1u32 << n) {
            index.restore(&fresh).expect("token fresh");
            for (i, &v) in pool.iter().take(n).enumerate() {
                if bits >> i & 1 == 1 {
                    index.invalidate(v).expect("candidate");
                }
            }
            value[bits as usize] = index.blocked_mass_per_community().iter().sum();
        }
        for x in 0..(1u32 << n) {
            for y in 0..(1u32 << n) {
                if x & y != x {
                    continue;
                }
                for v in 0..n {
                    if y >> v & 1 == 1 {
                        continue;
                    }
                    let bit = 1u32 << v;
                    pairs_checked += 1;
                    if value[(x | bit) as usize] < value[x as usize] {
                        violations += 1;
                    }
                    let gain_x = value[(x | bit) as usize] - value[x as usize];
                    let gain_y = value[(y | bit) as usize] - value[y as usize];
                    if gain_x < gain_y {
                        violations += 1;
                    }
                }
            }
        }
    }
    CheckResult::new(
        "coverage-submodularity",
        violations == 0,
        format!(
            "{} violations over {} subset pairs on {} indices",
            violations, pairs_checked, indices
        ),
    )
}

/// W range, parity detection, alignment monotonicity, and the α-sensitivity
/// bound on random share vectors.
pub fn check_w_invariants(rng_seed: u64, trials: usize) -> CheckResult {
    let mut rng = substream(rng_seed, STREAM_VALIDATE, 2);
    let random_shares = |c: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let raw: Vec<f64> = (0..c).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    };
    let mut failures = Vec::new();
    for i in 0..trials {
        let c = rng.gen_range(2..=8);
        let n = random_shares(c, &mut rng);
        let x = random_shares(c, &mut rng);
        let alpha = rng.gen_range(0.05..0.95);
        let cfg = FairnessConfig::new(alpha, n.clone()).expect("valid shares");
        let (w, shares) = fairness_w(&x, &cfg).expect("dims");
        if !(0.0..=1.0).contains(&w) {
            failures.push(format!("trial {}: W {} out of range", i, w));
            break;
        }
        let parity = shares
            .iter()
            .zip(&n)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            < 1e-12;
        if ((w - 1.0).abs() <= 1e-12) != parity {
            failures.push(format!("trial {}: parity detection mismatch (W {})", i, w));
            break;
        }
        let (w_at_n, _) = fairness_w(&n, &cfg).expect("dims");
        if (w_at_n - 1.0).abs() > 1e-12 {
            failures.push(format!("trial {}: W at parity {} != 1", i, w_at_n));
            break;
        }
        // Alignment path.
        let spread = shares
            .iter()
            .zip(&n)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if spread >= 1e-3 {
            let mut last = w;
            let mut ok = true;
            for t in [0.25, 0.5, 0.75, 1.0] {
                let xt: Vec<f64> = x
                    .iter()
                    .zip(&n)
                    .map(|(a, b)| (1.0 - t) * a + t * b)
                    .collect();
                let (wt, _) = fairness_w(&xt, &cfg).expect("dims");
                if wt <= last {
                    ok = false;
                    break;
                }
                last = wt;
            }
            if !ok {
                failures.push(format!("trial {}: alignment path not increasing", i));
                break;
            }
        }
    }
    // α-sensitivity bound at φ = 0.05.
    let phi = 0.05;
    let mut alpha_checked = 0;
    while alpha_checked < 200 && failures.is_empty() {
        let c = rng.gen_range(2..=6);
        let n = random_shares(c, &mut rng);
        let raw: Vec<f64> = n
            .iter()
            .map(|&v| v * (1.0 + rng.gen_range(-phi / 2.5..phi / 2.5)))
            .collect();
        let total: f64 = raw.iter().sum();
        let x: Vec<f64> = raw.into_iter().map(|v| v / total).collect();
        let spread = x
            .iter()
            .zip(&n)
            .map(|(a, b)| (a / b - 1.0).abs())
            .fold(0.0f64, f64::max);
        if spread >= phi {
            continue;
        }
        let a1 = rng.gen_range(0.05..0.95);
        let a2 = rng.gen_range(0.05..0.95);
        let w1 = fairness_w(&x, &FairnessConfig::new(a1, n.clone()).unwrap())
            .unwrap()
            .0;
        let w2 = fairness_w(&x, &FairnessConfig::new(a2, n.clone()).unwrap())
            .unwrap()
            .0;
        let bound = alpha_sensitivity_bound(phi, a1, a2).unwrap() + 10.0 * phi.powi(3);
        if (w1 - w2).abs() > bound {
            failures.push(format!(
                "alpha bound violated: |{} - {}| > {}",
                w1, w2, bound
            ));
        }
        alpha_checked += 1;
    }
    match failures.first() {
        None => CheckResult::new(
            "w-invariants",
            true,
            format!("{} random vectors + {} alpha pairs clean", trials, alpha_checked),
        ),
        Some(f) => CheckResult::new("w-invariants", false, f.clone()),
    }
}

/// Index bookkeeping recount plus exact agreement of `marginal_delta` with
/// the realized blocked-estimate difference.
pub fn check_index_integrity(index: &mut VrrIndex) -> CheckResult {
    if let Err(e) = index.consistency_check() {
        return CheckResult::new("index-integrity", false, e.to_string());
    }
    let snapshot = index.snapshot();
    let mut detail = "M recount clean".to_string();
    let mut passed = true;
    let candidates = index.candidates();
    for &u in candidates.iter().take(8) {
        let before = index.blocked_mass_per_community();
        let delta = match index.marginal_delta(u) {
            Ok(d) => d,
            Err(e) => {
                passed = false;
                detail = e.to_string();
                break;
            }
        };
        if index.invalidate(u).is_err() {
            passed = false;
            detail = "invalidate failed".into();
            break;
        }
        let after = index.blocked_mass_per_community();
        for c in 0..after.len() {
            if after[c] - before[c] != delta.per_community_mass[c] {
                passed = false;
                detail = format!("marginal delta mismatch at node {}", u);
            }
        }
        if !passed {
            break;
        }
    }
    if index.restore(&snapshot).is_err() {
        return CheckResult::new("index-integrity", false, "restore failed".into());
    }
    if passed {
        detail.push_str("; marginal deltas match realized differences exactly");
    }
    CheckResult::new("index-integrity", passed, detail)
}

/// The built-in validation suite (no input files required).
pub fn run_builtin_suite(rng_seed: u64, mc_runs: u64, samples_per_root: u64) -> ValidationReport {
    let mut report = ValidationReport::default();
    report.checks.push(check_chain_suite());
    report
        .checks
        .push(check_oracle_agreement(rng_seed, mc_runs.max(1)));
    report
        .checks
        .push(check_vrr_spread_fidelity(rng_seed, samples_per_root.max(1)));
    report
        .checks
        .push(check_vrr_blocked_fidelity(rng_seed, samples_per_root.max(1)));
    report.checks.push(check_coverage_submodularity(rng_seed, 10));
    report.checks.push(check_w_invariants(rng_seed, 2000));
    let (g, p) = synth::random_instance(8, 3, rng_seed.wrapping_add(4000));
    let mut index = sample_vrr(&g, &p, &set(&[0]), 300, rng_seed).expect("samples");
    index.invalidate(2).expect("candidate");
    report.checks.push(check_index_integrity(&mut index));
    report
}

/// Cross-check a supplied instance against the exact oracle, when it is
/// small enough to enumerate.
pub fn check_supplied_instance(
    graph: &Graph,
    partition: &CommunityPartition,
    negative_seeds: &BTreeSet<NodeId>,
    samples_per_root: u64,
    rng_seed: u64,
) -> CheckResult {
    let exact = match lt_spread_exact(graph, partition, negative_seeds, &BTreeSet::new()) {
        Ok(r) => r,
        Err(e) => {
            return CheckResult::new(
                "supplied-instance",
                false,
                format!("exact oracle unavailable: {}", e),
            )
        }
    };
    let index = match sample_vrr(graph, partition, negative_seeds, samples_per_root, rng_seed) {
        Ok(i) => i,
        Err(e) => return CheckResult::new("supplied-instance", false, e.to_string()),
    };
    let (sigma, _) = index.estimate_negative_spread();
    let within = (sigma - exact.total).abs() <= 0.05 * exact.total;
    CheckResult::new(
        "supplied-instance",
        within,
        format!(
            "estimated spread {:.4} vs exact {:.4} (tolerance 5%)",
            sigma, exact.total
        ),
    )
}
