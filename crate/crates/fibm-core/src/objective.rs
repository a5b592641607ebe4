//! Fairness and effectiveness objectives.
//!
//! `W` is the concave fairness surrogate Σ_c r_c x_c^α with r_c = n_c^{1-α},
//! where n_c is each community's share of the negative exposure and x_c its
//! share of the blocked mass. `F` is the normalized blocking measure, and `K`
//! their linear scalarization. W = 1 exactly at demographic parity (x = n).

use crate::error::{Error, Result};

/// Fairness exponent, exposure targets n_c, and weights r_c = n_c^{1-α}.
/// Communities with n_c = 0 carry zero weight and are excluded everywhere.
#[derive(Debug, Clone)]
pub struct FairnessConfig {
    pub alpha: f64,
    pub targets: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FairnessConfig {
    /// Build from exposure shares that already sum to 1 over the positive
    /// entries.
    pub fn new(alpha: f64, targets: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha {} must lie strictly inside (0,1)",
                alpha
            )));
        }
        if targets.is_empty() {
            return Err(Error::InvalidInput("no communities".into()));
        }
        let mut sum = 0.0;
        for &n in &targets {
            if !(0.0..=1.0).contains(&n) || !n.is_finite() {
                return Err(Error::InvalidInput(format!("target share {} invalid", n)));
            }
            sum += n;
        }
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "target shares sum to {}, expected 1",
                sum
            )));
        }
        let weights = targets.iter().map(|&n| n.powf(1.0 - alpha)).collect();
        Ok(FairnessConfig {
            alpha,
            targets,
            weights,
        })
    }

    /// Derive targets from per-community baseline exposure σ̂_c(S_N, G).
    pub fn from_baseline(alpha: f64, baseline_per_community: &[f64]) -> Result<Self> {
        let total: f64 = baseline_per_community.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("zero baseline spread".into()));
        }
        Self::new(
            alpha,
            baseline_per_community.iter().map(|&b| b / total).collect(),
        )
    }

    pub fn community_count(&self) -> usize {
        self.targets.len()
    }
}

/// Evaluated objective components at one selection state.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ObjectiveValue {
    pub w: f64,
    pub f: f64,
    pub k: f64,
    pub x: Vec<f64>,
    pub dp_gap: f64,
}

/// W(S_P) and the blocked shares x_c. With zero blocked mass the objective is
/// defined as 0 with all shares 0, which keeps first-iteration marginal gains
/// well defined.
pub fn fairness_w(blocked_per_community: &[f64], config: &FairnessConfig) -> Result<(f64, Vec<f64>)> {
    if blocked_per_community.len() != config.community_count() {
        return Err(Error::InvalidInput(format!(
            "blocked vector has {} communities, config has {}",
            blocked_per_community.len(),
            config.community_count()
        )));
    }
    let total: f64 = blocked_per_community.iter().sum();
    if total <= 0.0 {
        return Ok((0.0, vec![0.0; config.community_count()]));
    }
    let x: Vec<f64> = blocked_per_community.iter().map(|&b| b / total).collect();
    let mut w = 0.0;
    for (xc, rc) in x.iter().zip(&config.weights) {
        if *rc > 0.0 && *xc > 0.0 {
            w += rc * xc.powf(config.alpha);
        }
    }
    // Hölder gives W <= 1; clamp away float noise at the parity point.
    Ok((w.clamp(0.0, 1.0), x))
}

/// F(S_P) = σ̂⁻ / σ̂(S_N, G), clamped into `[0,1]`.
pub fn effectiveness_f(blocked_total: f64, baseline_total: f64) -> Result<f64> {
    if baseline_total <= 0.0 {
        return Err(Error::InvalidInput("zero baseline spread".into()));
    }
    Ok((blocked_total / baseline_total).clamp(0.0, 1.0))
}

/// K = β·W + (1-β)·F.
pub fn combined_k(w: f64, f: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("beta {} outside [0,1]", beta)));
    }
    Ok(beta * w + (1.0 - beta) * f)
}

/// Demographic-parity gap: max − min of the per-community blocked ratios
/// σ̂⁻_c / σ̂_c. Communities with zero exposure are excluded.
pub fn dp_gap(blocked_per_community: &[f64], baseline_per_community: &[f64]) -> Result<f64> {
    if blocked_per_community.len() != baseline_per_community.len() {
        return Err(Error::InvalidInput("community dimension mismatch".into()));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (&b, &base) in blocked_per_community.iter().zip(baseline_per_community) {
        if base > 0.0 {
            let ratio = b / base;
            min = min.min(ratio);
            max = max.max(ratio);
        }
    }
    if !min.is_finite() {
        return Err(Error::InvalidInput(
            "no community has positive exposure".into(),
        ));
    }
    Ok(max - min)
}

/// Leading-order bound on |W_{α1} − W_{α2}| when every ratio x_c/n_c lies
/// within φ of 1: |(α1−α2)(α1+α2−1)|/2 · φ².
pub fn alpha_sensitivity_bound(phi: f64, alpha1: f64, alpha2: f64) -> Result<f64> {
    if phi < 0.0 || !phi.is_finite() {
        return Err(Error::InvalidInput(format!("phi {} must be >= 0", phi)));
    }
    for a in [alpha1, alpha2] {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha {} must lie strictly inside (0,1)",
                a
            )));
        }
    }
    Ok(((alpha1 - alpha2) * (alpha1 + alpha2 - 1.0)).abs() / 2.0 * phi * phi)
}

/// Closed-form deviation bounds for W at a given state:
/// ε = 2α(1−α)·δ_max·δ^u_max·Σ_c 1/n_c and κ = ε/2.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationBound {
    pub epsilon: f64,
    pub kappa: f64,
    pub delta_max: f64,
    pub delta_u_max: f64,
}

pub fn analytic_deviation_bounds(
    x: &[f64],
    n: &[f64],
    delta_u: &[f64],
    alpha: f64,
) -> Result<DeviationBound> {
    if x.len() != n.len() || delta_u.len() != n.len() {
        return Err(Error::InvalidInput("community dimension mismatch".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha {} must lie strictly inside (0,1)",
            alpha
        )));
    }
    let mut delta_max = 0.0f64;
    let mut delta_u_max = 0.0f64;
    let mut inv_n_sum = 0.0f64;
    for ((&xc, &nc), &dc) in x.iter().zip(n).zip(delta_u) {
        if nc <= 0.0 {
            return Err(Error::InvalidInput(
                "community with zero exposure included".into(),
            ));
        }
        delta_max = delta_max.max((xc - nc).abs());
        delta_u_max = delta_u_max.max(dc.abs());
        inv_n_sum += 1.0 / nc;
    }
    let epsilon = 2.0 * alpha * (1.0 - alpha) * delta_max * delta_u_max * inv_n_sum;
    Ok(DeviationBound {
        epsilon,
        kappa: epsilon / 2.0,
        delta_max,
        delta_u_max,
    })
}

/// Concave utility transforms for the welfare-style baselines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ConcaveTransform {
    /// g(x) = x^exponent with exponent in (0,1).
    Power { exponent: f64 },
    /// g(x) = log2(x^exponent + 1).
    Log2Power { exponent: f64 },
}

impl ConcaveTransform {
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            ConcaveTransform::Power { exponent } => {
                if x == 0.0 {
                    0.0
                } else {
                    x.powf(*exponent)
                }
            }
            ConcaveTransform::Log2Power { exponent } => {
                let p = if x == 0.0 { 0.0 } else { x.powf(*exponent) };
                (p + 1.0).log2()
            }
        }
    }
}

/// Comparison objectives evaluated on per-community blocked ratios.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum BaselineKind {
    /// Maximize the minimum blocked ratio across communities.
    MaxMin,
    /// Exposure-weighted concave welfare: Σ_c σ̂_c · g(σ̂⁻_c / σ̂_c).
    Welfare(ConcaveTransform),
}

impl BaselineKind {
    /// The welfare transform used by the WF comparison (power 0.1).
    pub fn welfare_power() -> Self {
        BaselineKind::Welfare(ConcaveTransform::Power { exponent: 0.1 })
    }

    /// The welfare transform used by the CFF comparison (log2(x^0.01 + 1)).
    pub fn welfare_log2() -> Self {
        BaselineKind::Welfare(ConcaveTransform::Log2Power { exponent: 0.01 })
    }
}

/// Evaluate a comparison objective. Communities with zero exposure are
/// excluded; it is an error to have none left.
pub fn baseline_objective(
    kind: &BaselineKind,
    blocked_per_community: &[f64],
    baseline_per_community: &[f64],
) -> Result<f64> {
    if blocked_per_community.len() != baseline_per_community.len() {
        return Err(Error::InvalidInput("community dimension mismatch".into()));
    }
    let included: Vec<(f64, f64)> = blocked_per_community
        .iter()
        .zip(baseline_per_community)
        .filter(|(_, &base)| base > 0.0)
        .map(|(&b, &base)| (b, base))
        .collect();
    if included.is_empty() {
        return Err(Error::InvalidInput(
            "no community has positive exposure".into(),
        ));
    }
    Ok(match kind {
        BaselineKind::MaxMin => included
            .iter()
            .map(|(b, base)| b / base)
            .fold(f64::INFINITY, f64::min),
        BaselineKind::Welfare(g) => included
            .iter()
            .map(|(b, base)| base * g.eval(b / base))
            .sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::rng::substream;

    fn config(alpha: f64, n: &[f64]) -> FairnessConfig {
        FairnessConfig::new(alpha, n.to_vec()).unwrap()
    }

    /// Random positive share vector of `c` entries summing to 1.
    fn random_shares(c: usize, rng: &mut impl Rng) -> Vec<f64> {
        let raw: Vec<f64> = (0..c).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }

    #[test]
    fn parity_yields_w_of_one() {
        let cfg = config(0.5, &[0.6, 0.3, 0.1]);
        let (w, x) = fairness_w(&[0.6, 0.3, 0.1], &cfg).unwrap();
        assert!((w - 1.0).abs() <= 1e-12);
        for (got, want) in x.iter().zip([0.6, 0.3, 0.1]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_blocking_yields_zero_w() {
        let cfg = config(0.5, &[0.5, 0.5]);
        let (w, x) = fairness_w(&[0.0, 0.0], &cfg).unwrap();
        assert_eq!(w, 0.0);
        assert_eq!(x, vec![0.0, 0.0]);
    }

    #[test]
    fn concentrated_blocking_matches_formula() {
        let cfg = config(0.5, &[0.5, 0.5]);
        let (w, _) = fairness_w(&[1.0, 0.0], &cfg).unwrap();
        assert!((w - 0.5f64.sqrt()).abs() < 1e-12, "w = {w}");
    }

    #[test]
    fn dimension_mismatch_errors() {
        let cfg = config(0.5, &[0.5, 0.5]);
        assert!(fairness_w(&[1.0], &cfg).is_err());
    }

    #[test]
    fn effectiveness_bounds() {
        assert_eq!(effectiveness_f(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(effectiveness_f(3.0, 3.0).unwrap(), 1.0);
        assert!((effectiveness_f(2.0, 3.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(effectiveness_f(1.0, 0.0).is_err());
    }

    #[test]
    fn scalarization_is_exact_affine() {
        assert_eq!(combined_k(0.8, 0.6, 0.0).unwrap(), 0.6);
        assert_eq!(combined_k(0.8, 0.6, 1.0).unwrap(), 0.8);
        assert!((combined_k(0.8, 0.6, 0.5).unwrap() - 0.7).abs() < 1e-15);
        assert!(combined_k(0.5, 0.5, 1.1).is_err());
    }

    #[test]
    fn dp_gap_cases() {
        assert_eq!(dp_gap(&[0.5, 0.25], &[1.0, 0.5]).unwrap(), 0.0);
        assert_eq!(dp_gap(&[1.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        // Zero-exposure community excluded.
        assert_eq!(dp_gap(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(dp_gap(&[0.0], &[0.0]).is_err());
    }

    #[test]
    fn w_equal_one_implies_zero_gap() {
        let mut rng = substream(5, 0x5745, 0);
        for _ in 0..50 {
            let c = rng.gen_range(2..6);
            let n = random_shares(c, &mut rng);
            let cfg = config(0.5, &n);
            let scale: f64 = rng.gen_range(0.1..5.0);
            let blocked: Vec<f64> = n.iter().map(|v| v * scale).collect();
            let (w, _) = fairness_w(&blocked, &cfg).unwrap();
            assert!((w - 1.0).abs() <= 1e-12);
            // Baselines proportional to n: blocked ratios all equal scale·σ̂⁻/σ̂.
            let gap = dp_gap(&blocked, &n).unwrap();
            assert!(gap.abs() < 1e-9);
        }
    }

    #[test]
    fn alpha_bound_formula() {
        assert_eq!(alpha_sensitivity_bound(0.1, 0.4, 0.4).unwrap(), 0.0);
        assert_eq!(alpha_sensitivity_bound(0.1, 0.3, 0.7).unwrap(), 0.0);
        let b = alpha_sensitivity_bound(0.1, 0.3, 0.9).unwrap();
        assert!((b - 0.0006).abs() < 1e-12, "bound {b}");
        assert!(alpha_sensitivity_bound(-0.1, 0.5, 0.5).is_err());
        assert!(alpha_sensitivity_bound(0.1, 0.0, 0.5).is_err());
    }

    #[test]
    fn deviation_bounds_formula() {
        let b = analytic_deviation_bounds(&[0.5, 0.5], &[0.5, 0.5], &[0.0, 0.0], 0.5).unwrap();
        assert_eq!(b.epsilon, 0.0);
        assert_eq!(b.kappa, 0.0);
        // 2·α(1−α)·δ_max·δ^u_max·Σ1/n = 2·0.25·0.1·0.05·4 = 0.01, κ half that.
        let b = analytic_deviation_bounds(&[0.6, 0.4], &[0.5, 0.5], &[0.05, -0.05], 0.5).unwrap();
        assert!((b.epsilon - 0.01).abs() < 1e-12, "eps {}", b.epsilon);
        assert!((b.kappa - 0.005).abs() < 1e-12);
        assert!(analytic_deviation_bounds(&[0.5], &[0.0], &[0.0], 0.5).is_err());
    }

    #[test]
    fn baseline_objectives() {
        // Equal ratios r -> maxmin = r.
        let v = baseline_objective(&BaselineKind::MaxMin, &[0.2, 0.1], &[1.0, 0.5]).unwrap();
        assert!((v - 0.2).abs() < 1e-15);
        // Zero blocking -> 0 for both built-ins.
        for kind in [BaselineKind::welfare_power(), BaselineKind::welfare_log2()] {
            let v = baseline_objective(&kind, &[0.0, 0.0], &[1.0, 0.5]).unwrap();
            assert_eq!(v, 0.0);
        }
        assert!(baseline_objective(&BaselineKind::MaxMin, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn welfare_transforms_are_concave_on_random_inputs() {
        let mut rng = substream(11, 0x5745, 1);
        for kind in [
            ConcaveTransform::Power { exponent: 0.1 },
            ConcaveTransform::Log2Power { exponent: 0.01 },
        ] {
            for _ in 0..500 {
                let a: f64 = rng.gen_range(0.0..1.0);
                let b: f64 = rng.gen_range(0.0..1.0);
                let t: f64 = rng.gen_range(0.0..1.0);
                let lhs = kind.eval(t * a + (1.0 - t) * b);
                let rhs = t * kind.eval(a) + (1.0 - t) * kind.eval(b);
                assert!(lhs >= rhs - 1e-12, "{kind:?} not concave at {a},{b},{t}");
            }
        }
    }

    #[test]
    fn w_stays_in_unit_interval_and_detects_parity() {
        let mut rng = substream(3, 0x5745, 2);
        for _ in 0..2000 {
            let c = rng.gen_range(2..=8);
            let n = random_shares(c, &mut rng);
            let x_raw = random_shares(c, &mut rng);
            let alpha: f64 = rng.gen_range(0.05..0.95);
            let cfg = config(alpha, &n);
            let (w, x) = fairness_w(&x_raw, &cfg).unwrap();
            assert!((0.0..=1.0).contains(&w));
            let parity = x
                .iter()
                .zip(&n)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
                < 1e-12;
            assert_eq!((w - 1.0).abs() <= 1e-12, parity, "w {w} vs parity {parity}");
        }
    }

    #[test]
    fn alignment_path_strictly_increases_w() {
        let mut rng = substream(4, 0x5745, 3);
        for _ in 0..300 {
            let c = rng.gen_range(2..=6);
            let n = random_shares(c, &mut rng);
            let x = random_shares(c, &mut rng);
            let spread = x
                .iter()
                .zip(&n)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if spread < 1e-3 {
                continue;
            }
            let cfg = config(0.5, &n);
            let mut last = fairness_w(&x, &cfg).unwrap().0;
            for t in [0.25, 0.5, 0.75, 1.0] {
                let xt: Vec<f64> = x
                    .iter()
                    .zip(&n)
                    .map(|(a, b)| (1.0 - t) * a + t * b)
                    .collect();
                let (w, _) = fairness_w(&xt, &cfg).unwrap();
                assert!(w > last, "W not increasing along alignment path");
                last = w;
            }
            assert!((last - 1.0).abs() <= 1e-12);
        }
    }

    proptest::proptest! {
        /// Arbitrary nonnegative blocked masses (zeros included) against
        /// arbitrary positive-source targets: W stays in [0,1] and hits 1
        /// exactly on proportional vectors.
        #[test]
        fn w_bounds_hold_on_arbitrary_masses(
            raw_n in proptest::collection::vec(0.0f64..1.0, 2..6),
            blocked in proptest::collection::vec(0.0f64..1e6, 2..6),
            alpha in 0.01f64..0.99,
            scale in 0.001f64..1000.0,
        ) {
            let c = raw_n.len().min(blocked.len());
            let total: f64 = raw_n[..c].iter().sum();
            proptest::prop_assume!(total > 1e-6);
            let n: Vec<f64> = raw_n[..c].iter().map(|v| v / total).collect();
            let cfg = config(alpha, &n);
            let (w, x) = fairness_w(&blocked[..c], &cfg).unwrap();
            proptest::prop_assert!((0.0..=1.0).contains(&w));
            proptest::prop_assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
            // Proportional blocking is exact parity.
            let proportional: Vec<f64> = n.iter().map(|v| v * scale).collect();
            let (w_prop, _) = fairness_w(&proportional, &cfg).unwrap();
            proptest::prop_assert!((w_prop - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn alpha_sensitivity_holds_empirically() {
        let mut rng = substream(6, 0x5745, 4);
        let phi = 0.05;
        let mut checked = 0;
        while checked < 1000 {
            let c = rng.gen_range(2..=6);
            let n = random_shares(c, &mut rng);
            // Perturb within φ/2.5 and renormalize so the shares sum to 1;
            // the premise |x_c/n_c - 1| < φ is then verified explicitly.
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
            let a1: f64 = rng.gen_range(0.05..0.95);
            let a2: f64 = rng.gen_range(0.05..0.95);
            let w1 = fairness_w(&x, &config(a1, &n)).unwrap().0;
            let w2 = fairness_w(&x, &config(a2, &n)).unwrap().0;
            let bound = alpha_sensitivity_bound(phi, a1, a2).unwrap() + 10.0 * phi.powi(3);
            assert!(
                (w1 - w2).abs() <= bound,
                "|{w1} - {w2}| > {bound} at alphas {a1},{a2}"
            );
            checked += 1;
        }
    }
}
