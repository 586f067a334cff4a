//! Benchmark configuration, read from TOML.
//!
//! ```toml
//! name = "monk1"
//! objective = "accuracy"
//! seeds = [0, 1, 2, 3, 4]
//! budget_seconds = 300
//!
//! [data]
//! builtin = "monk1"      # or: path = "data.csv"
//! label = "class"
//! positive = "1"
//!
//! [grid]
//! depth = [1, 2, 3, 4]
//! alpha = ["0.001", "0.01"]
//! f_max = [3, 5]
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::objective::ObjectiveKind;
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    /// CSV file, relative paths resolved against the config file.
    pub path: Option<PathBuf>,
    /// `monk1` or `example1`.
    pub builtin: Option<String>,
    #[serde(default = "default_label")]
    pub label: String,
    pub positive: Option<String>,
    /// Feature columns are already 0/1 and are used without binarization.
    #[serde(default)]
    pub binary: bool,
}

fn default_label() -> String {
    "class".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub depth: Vec<usize>,
    /// Decimal or `p/q` strings, kept exact.
    pub alpha: Vec<String>,
    pub f_max: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    #[serde(default = "default_objective")]
    objective: String,
    seeds: Vec<u64>,
    budget_seconds: Option<f64>,
    #[serde(default = "default_one")]
    workers: usize,
    #[serde(default)]
    no_split: bool,
    #[serde(default = "default_one")]
    s_min: usize,
    data: DataSource,
    grid: Grid,
}

fn default_objective() -> String {
    "accuracy".into()
}

fn default_one() -> usize {
    1
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub name: String,
    pub objective: ObjectiveKind,
    pub seeds: Vec<u64>,
    /// Per grid point; `None` picks the size-tier default.
    pub budget: Option<Duration>,
    pub workers: usize,
    /// Use every row for training, validation and test.
    pub no_split: bool,
    pub s_min: usize,
    pub data: DataSource,
    pub depths: Vec<usize>,
    pub alphas: Vec<Rational>,
    pub f_maxes: Vec<usize>,
}

impl BenchmarkConfig {
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let objective: ObjectiveKind = raw.objective.parse()?;
        let alphas = raw
            .grid
            .alpha
            .iter()
            .map(|a| parse_rational(a).ok_or_else(|| Error::Config(format!("bad alpha '{a}'"))))
            .collect::<Result<Vec<_>>>()?;
        let budget = match raw.budget_seconds {
            None => None,
            Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
            Some(s) => {
                return Err(Error::Config(format!(
                    "budget_seconds must be positive, got {s}"
                )))
            }
        };
        let mut data = raw.data;
        match (&data.path, &data.builtin) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(Error::Config(
                    "[data] needs exactly one of 'path' or 'builtin'".into(),
                ))
            }
        }
        if let (Some(p), Some(base)) = (&data.path, base_dir) {
            if p.is_relative() {
                data.path = Some(base.join(p));
            }
        }
        let cfg = BenchmarkConfig {
            name: raw.name,
            objective,
            seeds: raw.seeds,
            budget,
            workers: raw.workers.max(1),
            no_split: raw.no_split,
            s_min: raw.s_min,
            data,
            depths: raw.grid.depth,
            alphas,
            f_maxes: raw.grid.f_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent())
    }

    fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("'seeds' is empty".into()));
        }
        if self.depths.is_empty() || self.alphas.is_empty() || self.f_maxes.is_empty() {
            return Err(Error::Config(
                "every grid axis needs at least one value".into(),
            ));
        }
        if self.depths.iter().any(|&d| d == 0 || d > 20) {
            return Err(Error::Config("grid depths must lie in 1..=20".into()));
        }
        if self.f_maxes.contains(&0) {
            return Err(Error::Config("grid f_max values must be at least 1".into()));
        }
        if self
            .alphas
            .iter()
            .any(|a| *a < Rational::from_integer(0.into()))
        {
            return Err(Error::Config(
                "grid alpha values must be non-negative".into(),
            ));
        }
        if let Some(b) = &self.data.builtin {
            if !matches!(b.as_str(), "monk1" | "example1") {
                return Err(Error::Config(format!("unknown builtin dataset '{b}'")));
            }
        }
        Ok(())
    }
}

/// Budget per solve by training-set size: 5 minutes below 1000 rows,
/// 15 minutes up to 5000 rows, 30 minutes above.
pub fn default_budget(rows: usize) -> Duration {
    let secs = match rows {
        0..=999 => 300,
        1000..=5000 => 900,
        _ => 1800,
    };
    Duration::from_secs(secs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const MONK: &str = r#"
name = "monk1"
seeds = [0, 1]
budget_seconds = 30

[data]
builtin = "monk1"
positive = "1"

[grid]
depth = [1, 2]
alpha = ["0.001", "1/100"]
f_max = [3, 5]
"#;

    #[test]
    fn parses_grid_exactly() {
        let cfg = BenchmarkConfig::parse(MONK, None).unwrap();
        assert_eq!(cfg.alphas, vec![ratio(1, 1000), ratio(1, 100)]);
        assert_eq!(cfg.objective, ObjectiveKind::Accuracy);
        assert_eq!(cfg.budget, Some(Duration::from_secs(30)));
        assert_eq!(cfg.data.label, "class");
        assert_eq!(cfg.s_min, 1);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_sources() {
        let unknown = MONK.replace("seeds = [0, 1]", "seeds = [0, 1]\nseedz = 3");
        assert!(matches!(
            BenchmarkConfig::parse(&unknown, None),
            Err(Error::Config(_))
        ));
        let both = MONK.replace(
            "builtin = \"monk1\"",
            "builtin = \"monk1\"\npath = \"x.csv\"",
        );
        assert!(matches!(
            BenchmarkConfig::parse(&both, None),
            Err(Error::Config(_))
        ));
        let zero = MONK.replace("budget_seconds = 30", "budget_seconds = 0");
        assert!(matches!(
            BenchmarkConfig::parse(&zero, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn relative_paths_follow_the_config() {
        let text = MONK.replace("builtin = \"monk1\"", "path = \"data/x.csv\"");
        let cfg = BenchmarkConfig::parse(&text, Some(Path::new("/tmp/run"))).unwrap();
        assert_eq!(cfg.data.path.unwrap(), PathBuf::from("/tmp/run/data/x.csv"));
    }

    #[test]
    fn budget_tiers() {
        assert_eq!(default_budget(432), Duration::from_secs(300));
        assert_eq!(default_budget(1000), Duration::from_secs(900));
        assert_eq!(default_budget(5001), Duration::from_secs(1800));
    }
}
