//! JSON configuration for the `simulate` subcommand.

use serde::Deserialize;

use order_thresh_core::scenario;

use crate::mc::{HanovaStat, HanovaStudy, KChoice, SingleStat, SingleStudy};

fn default_alpha() -> f64 {
    0.05
}

/// Top-level simulate config:
/// {kind, dims, statistics, replicates, seed, output[, scenario, shifts, alpha]}.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub kind: String,
    pub dims: DimsConfig,
    pub statistics: Vec<StatConfig>,
    pub replicates: usize,
    pub seed: u64,
    /// Output CSV path; "-" writes to stdout.
    pub output: String,
    /// Signal scenario: a built-in name or {"eta": [...]}. Absent = null.
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    /// Shifts r of H_r to run; defaults to 1..=len(eta).
    #[serde(default)]
    pub shifts: Option<Vec<usize>>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsConfig {
    #[serde(default)]
    pub a: Option<usize>,
    pub n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ScenarioConfig {
    Named(String),
    Custom { eta: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatConfig {
    pub stat: String,
    #[serde(default)]
    pub k: Option<KConfig>,
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum KConfig {
    Fixed(usize),
    Named(String),
}

/// A validated study ready to run.
pub enum Study {
    Single(SingleStudy),
    Hanova(HanovaStudy),
}

impl SimulateConfig {
    pub fn into_study(self, threads: usize) -> Result<Study, String> {
        let eta: Vec<f64> = match &self.scenario {
            None => Vec::new(),
            Some(ScenarioConfig::Named(name)) => scenario::by_name(name)
                .ok_or_else(|| format!("unknown scenario {name:?}"))?
                .to_vec(),
            Some(ScenarioConfig::Custom { eta }) => eta.clone(),
        };
        let shifts = match &self.shifts {
            Some(s) => s.clone(),
            None => (1..=eta.len()).collect(),
        };
        match self.kind.as_str() {
            "single" => {
                if self.dims.a.is_some() {
                    return Err("single-sequence studies take dims {\"n\": ...} only".into());
                }
                let grid = self
                    .statistics
                    .iter()
                    .map(single_stat)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Study::Single(SingleStudy {
                    n: self.dims.n,
                    eta,
                    shifts,
                    grid,
                    alpha: self.alpha,
                    replicates: self.replicates,
                    seed: self.seed,
                    threads,
                }))
            }
            "hanova" => {
                let a = self.dims.a.ok_or_else(|| {
                    "hanova studies need dims {\"a\": ..., \"n\": ...}".to_string()
                })?;
                let grid = self
                    .statistics
                    .iter()
                    .map(hanova_stat)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Study::Hanova(HanovaStudy {
                    a,
                    n: self.dims.n,
                    eta,
                    shifts,
                    grid,
                    alpha: self.alpha,
                    replicates: self.replicates,
                    seed: self.seed,
                    threads,
                }))
            }
            other => Err(format!(
                "unknown kind {other:?}; expected \"single\" or \"hanova\""
            )),
        }
    }
}

fn k_choice(config: &StatConfig) -> Result<KChoice, String> {
    match &config.k {
        Some(KConfig::Fixed(k)) => Ok(KChoice::Fixed(*k)),
        Some(KConfig::Named(name)) if name == "data-driven" => Ok(KChoice::DataDriven),
        Some(KConfig::Named(other)) => Err(format!(
            "invalid k {other:?}; expected an integer or \"data-driven\""
        )),
        None => Err(format!("statistic {:?} needs a k", config.stat)),
    }
}

fn single_stat(config: &StatConfig) -> Result<SingleStat, String> {
    match config.stat.as_str() {
        "order" => Ok(SingleStat::Order(k_choice(config)?)),
        "order-chisq" => Ok(SingleStat::OrderChiSq(k_choice(config)?)),
        "hard" => {
            let delta = config
                .delta
                .ok_or_else(|| "statistic \"hard\" needs a delta".to_string())?;
            Ok(SingleStat::Hard { delta })
        }
        "simes" => Ok(SingleStat::Simes),
        "chisq" => Ok(SingleStat::ChiSqOmnibus),
        other => Err(format!(
            "unknown single-sequence statistic {other:?}; expected order, order-chisq, hard, simes, or chisq"
        )),
    }
}

fn hanova_stat(config: &StatConfig) -> Result<HanovaStat, String> {
    match config.stat.as_str() {
        "f" => Ok(HanovaStat::FTest),
        "hanova-order" | "order" => Ok(HanovaStat::Order(k_choice(config)?)),
        other => Err(format!(
            "unknown hanova statistic {other:?}; expected f or hanova-order"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let json = r#"{
            "kind": "single",
            "dims": {"n": 500},
            "statistics": [
                {"stat": "order", "k": 22},
                {"stat": "order", "k": "data-driven"},
                {"stat": "hard", "delta": 5.1216},
                {"stat": "simes"},
                {"stat": "chisq"}
            ],
            "scenario": "example3.1",
            "shifts": [1, 3],
            "replicates": 100,
            "seed": 7,
            "output": "-"
        }"#;
        let config: SimulateConfig = serde_json::from_str(json).unwrap();
        match config.into_study(2).unwrap() {
            Study::Single(study) => {
                assert_eq!(study.n, 500);
                assert_eq!(study.grid.len(), 5);
                assert_eq!(study.eta.len(), 30);
                assert_eq!(study.shifts, vec![1, 3]);
                assert_eq!(study.alpha, 0.05);
            }
            _ => panic!("expected a single-sequence study"),
        }
    }

    #[test]
    fn parses_hanova_with_custom_eta() {
        let json = r#"{
            "kind": "hanova",
            "dims": {"a": 100, "n": 3},
            "statistics": [{"stat": "f"}, {"stat": "hanova-order", "k": 10}],
            "scenario": {"eta": [1.0, 2.0]},
            "replicates": 50,
            "seed": 1,
            "output": "out.csv"
        }"#;
        let config: SimulateConfig = serde_json::from_str(json).unwrap();
        match config.into_study(1).unwrap() {
            Study::Hanova(study) => {
                assert_eq!(study.a, 100);
                assert_eq!(study.shifts, vec![1, 2]);
            }
            _ => panic!("expected a hanova study"),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let bad_kind = r#"{"kind": "x", "dims": {"n": 5}, "statistics": [],
            "replicates": 1, "seed": 0, "output": "-"}"#;
        let config: SimulateConfig = serde_json::from_str(bad_kind).unwrap();
        assert!(config.into_study(1).is_err());

        let missing_k = r#"{"kind": "single", "dims": {"n": 5},
            "statistics": [{"stat": "order"}],
            "replicates": 1, "seed": 0, "output": "-"}"#;
        let config: SimulateConfig = serde_json::from_str(missing_k).unwrap();
        assert!(config.into_study(1).is_err());

        let unknown_field = r#"{"kind": "single", "dims": {"n": 5}, "statistics": [],
            "replicates": 1, "seed": 0, "output": "-", "bogus": 1}"#;
        assert!(serde_json::from_str::<SimulateConfig>(unknown_field).is_err());
    }
}
