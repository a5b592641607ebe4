//! Run configuration: flat key-value files plus command-line overrides.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::optimize::SelectorKind;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeSeedSpec {
    /// The `size` highest-total-degree nodes.
    TopDegree { size: usize },
    /// Explicit external node ids.
    Explicit { ids: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSpec {
    Single(f64),
    Grid { start: f64, stop: f64, step: f64 },
}

impl BetaSpec {
    /// Expand into explicit β values (inclusive of `stop`, rounded to 1e-9
    /// to keep grid labels clean).
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            BetaSpec::Single(b) => Ok(vec![b]),
            BetaSpec::Grid { start, stop, step } => {
                if step <= 0.0 {
                    return Err(Error::Config(format!("grid step {} must be > 0", step)));
                }
                if stop < start {
                    return Err(Error::Config(format!(
                        "grid stop {} below start {}",
                        stop, start
                    )));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Ok((0..count)
                    .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub graph_path: Option<PathBuf>,
    pub communities_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub directed: bool,
    /// `uniform` (p = 1/in-degree) or `explicit` third-column weights.
    pub weight_mode: String,
    pub negative_seeds: NegativeSeedSpec,
    pub budget_k: Option<usize>,
    pub mu: f64,
    pub alpha: f64,
    pub beta: BetaSpec,
    pub vrr_samples_per_root: u64,
    pub mc_runs: u64,
    pub rng_seed: u64,
    pub selector: SelectorKind,
    pub repetitions: u64,
    /// `None` means unlimited (never stop on negative gains).
    pub kappa_budget: Option<f64>,
    pub batch: usize,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph_path: None,
            communities_path: None,
            out_dir: None,
            directed: false,
            weight_mode: "uniform".into(),
            negative_seeds: NegativeSeedSpec::TopDegree { size: 50 },
            budget_k: None,
            mu: 1.0,
            alpha: 0.5,
            beta: BetaSpec::Single(0.5),
            vrr_samples_per_root: 1000,
            mc_runs: 10_000,
            rng_seed: 42,
            selector: SelectorKind::CelfR,
            repetitions: 5,
            kappa_budget: None,
            batch: 16,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn load_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = RunConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected 'key = value'",
                    path.display(),
                    idx + 1
                ))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Apply one key-value setting; command-line flags funnel through here so
    /// the override precedence is uniform (flag wins over file).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad =
            |what: &str| Error::Config(format!("invalid value '{}' for key '{}'", what, key));
        match key {
            "graph" => self.graph_path = Some(PathBuf::from(value)),
            "communities" => self.communities_path = Some(PathBuf::from(value)),
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "directed" => {
                self.directed = value.parse().map_err(|_| bad(value))?;
            }
            "weight_mode" => {
                if value != "uniform" && value != "explicit" {
                    return Err(bad(value));
                }
                self.weight_mode = value.into();
            }
            "negative_seeds" => {
                self.negative_seeds = parse_negative_seeds(value)?;
            }
            "k" => self.budget_k = Some(value.parse().map_err(|_| bad(value))?),
            "mu" => self.mu = value.parse().map_err(|_| bad(value))?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad(value))?,
            "beta" => {
                self.beta = BetaSpec::Single(value.parse().map_err(|_| bad(value))?);
            }
            "beta_grid" => {
                self.beta = parse_beta_grid(value)?;
            }
            "vrr_samples" => {
                self.vrr_samples_per_root = value.parse().map_err(|_| bad(value))?;
            }
            "mc_runs" => self.mc_runs = value.parse().map_err(|_| bad(value))?,
            "seed" => self.rng_seed = value.parse().map_err(|_| bad(value))?,
            "selector" => self.selector = SelectorKind::parse(value)?,
            "repetitions" => self.repetitions = value.parse().map_err(|_| bad(value))?,
            "kappa_budget" => {
                self.kappa_budget = if value == "inf" {
                    None
                } else {
                    Some(value.parse().map_err(|_| bad(value))?)
                };
            }
            "batch" => self.batch = value.parse().map_err(|_| bad(value))?,
            "threads" => self.threads = Some(value.parse().map_err(|_| bad(value))?),
            other => return Err(Error::Config(format!("unknown config key '{}'", other))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::Config(format!("mu {} outside [0,1]", self.mu)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha {} must lie strictly inside (0,1)",
                self.alpha
            )));
        }
        for b in self.beta.values()? {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::Config(format!("beta {} outside [0,1]", b)));
            }
        }
        if self.vrr_samples_per_root == 0 {
            return Err(Error::Config("vrr_samples must be >= 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        Ok(())
    }

    pub fn require_budget(&self) -> Result<usize> {
        self.budget_k
            .ok_or_else(|| Error::Config("budget k is required (set k = N)".into()))
    }
}

fn parse_negative_seeds(value: &str) -> Result<NegativeSeedSpec> {
    if let Some(rest) = value.strip_prefix("top-degree:") {
        let size = rest
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad top-degree size '{}'", rest)))?;
        return Ok(NegativeSeedSpec::TopDegree { size });
    }
    if let Some(rest) = value.strip_prefix("explicit:") {
        let mut ids = Vec::new();
        for tok in rest.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            ids.push(
                tok.parse()
                    .map_err(|_| Error::Config(format!("bad seed id '{}'", tok)))?,
            );
        }
        if ids.is_empty() {
            return Err(Error::Config("explicit seed list is empty".into()));
        }
        return Ok(NegativeSeedSpec::Explicit { ids });
    }
    Err(Error::Config(format!(
        "negative_seeds must be 'top-degree:N' or 'explicit:id,id,...', got '{}'",
        value
    )))
}

pub fn parse_beta_grid(value: &str) -> Result<BetaSpec> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "beta grid must be START:STOP:STEP, got '{}'",
            value
        )));
    }
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad grid number '{}'", s)))
    };
    Ok(BetaSpec::Grid {
        start: parse(parts[0])?,
        stop: parse(parts[1])?,
        step: parse(parts[2])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expansion_is_inclusive_and_clean() {
        let grid = parse_beta_grid("0:1:0.1").unwrap().values().unwrap();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[3], 0.3);
        assert_eq!(grid[10], 1.0);
        assert!(parse_beta_grid("0:1:0").unwrap().values().is_err());
        assert!(parse_beta_grid("1:0:0.1").unwrap().values().is_err());
    }

    #[test]
    fn file_parsing_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# demo\ngraph = g.edges\nk = 3\nseed = 7\nnegative_seeds = top-degree:1\nbeta_grid = 0:1:0.5\n",
        )
        .unwrap();
        let mut config = RunConfig::load_file(&path).unwrap();
        assert_eq!(config.budget_k, Some(3));
        assert_eq!(config.rng_seed, 7);
        assert_eq!(config.beta.values().unwrap(), vec![0.0, 0.5, 1.0]);
        // Flag override wins.
        config.set("seed", "9").unwrap();
        assert_eq!(config.rng_seed, 9);
    }

    #[test]
    fn unknown_keys_and_bad_values_error() {
        let mut config = RunConfig::default();
        assert!(config.set("bogus", "1").is_err());
        assert!(config.set("mu", "abc").is_err());
        assert!(config.set("negative_seeds", "top:5").is_err());
        assert!(config.set("selector", "magic").is_err());
        config.set("negative_seeds", "explicit:33,12").unwrap();
        assert_eq!(
            config.negative_seeds,
            NegativeSeedSpec::Explicit { ids: vec![33, 12] }
        );
    }

    #[test]
    fn validation_bounds() {
        let mut config = RunConfig::default();
        config.validate().unwrap();
        config.mu = 1.4;
        assert!(config.validate().is_err());
        config.mu = 0.2;
        config.alpha = 1.0;
        assert!(config.validate().is_err());
        config.alpha = 0.5;
        config.repetitions = 0;
        assert!(config.validate().is_err());
        assert!(RunConfig::default().require_budget().is_err());
    }
}
