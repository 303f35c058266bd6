//! Experiment configuration, loadable from a TOML file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use oexnrule::data::LabelColumn;
use oexnrule::ensemble::SubspaceSize;
use oexnrule::neighbors::DistanceSpec;
use serde::{Deserialize, Serialize};

use crate::error::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    OExNRule,
    Knn,
    Wknn,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::OExNRule, Method::Knn, Method::Wknn];

    pub fn name(self) -> &'static str {
        match self {
            Method::OExNRule => "oexnrule",
            Method::Knn => "knn",
            Method::Wknn => "wknn",
        }
    }

    /// Name as printed in table rows.
    pub fn display_name(self) -> &'static str {
        match self {
            Method::OExNRule => "OExNRule",
            Method::Knn => "kNN",
            Method::Wknn => "WkNN",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::Config(format!("unknown method {s:?} (expected oexnrule, knn or wknn)")))
    }
}

/// One dataset file and how to read its label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSource {
    /// Name used in reports; defaults to the file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub path: PathBuf,
    pub label_column: LabelColumn,
    pub positive_label: String,
}

impl DatasetSource {
    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.path.display().to_string())
        })
    }
}

/// Ensemble settings shared by every OExNRule run. The chain length comes
/// from `k_values` and seeds from the master seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSettings {
    pub n_models: usize,
    pub select_fraction: f64,
    pub subspace: SubspaceSize,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        EnsembleSettings {
            n_models: 500,
            select_fraction: 0.25,
            subspace: SubspaceSize::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSource>,
    pub methods: Vec<Method>,
    pub repeats: usize,
    pub train_fraction: f64,
    pub k_values: Vec<usize>,
    pub ensemble: EnsembleSettings,
    pub distance: DistanceSpec,
    /// Append as many uniform noise columns as there are features.
    pub contrived: bool,
    /// Z-score features with training-part statistics.
    pub standardize: bool,
    pub master_seed: u64,
    /// Worker threads; not part of the results, so not echoed in reports.
    #[serde(skip_serializing)]
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: Vec::new(),
            methods: Method::ALL.to_vec(),
            repeats: 500,
            train_fraction: 0.7,
            k_values: vec![3],
            ensemble: EnsembleSettings::default(),
            distance: DistanceSpec::EUCLIDEAN,
            contrived: false,
            standardize: false,
            master_seed: 1,
            workers: default_workers(),
        }
    }
}

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "OEXNRULE_WORKERS";

/// `$OEXNRULE_WORKERS` if set and positive, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    /// Reads a TOML file; relative dataset paths resolve against the file's
    /// directory.
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for d in &mut cfg.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |m: String| Err(BenchError::Config(m));
        if self.datasets.is_empty() {
            return fail("no datasets configured".into());
        }
        if self.methods.is_empty() {
            return fail("no methods configured".into());
        }
        if self.repeats == 0 {
            return fail("repeats must be at least 1".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return fail(format!("train fraction {} not in (0, 1)", self.train_fraction));
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return fail("k values must be a nonempty list of positive integers".into());
        }
        if self.ensemble.n_models == 0 {
            return fail("ensemble needs at least one base model".into());
        }
        if !(self.ensemble.select_fraction > 0.0 && self.ensemble.select_fraction <= 1.0) {
            return fail(format!(
                "select fraction {} not in (0, 1]",
                self.ensemble.select_fraction
            ));
        }
        let mut ids: Vec<String> = self.datasets.iter().map(DatasetSource::id).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return fail(format!("dataset id {:?} used twice", w[0]));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_protocol() {
        let c = ExperimentConfig::default();
        assert_eq!(c.repeats, 500);
        assert_eq!(c.train_fraction, 0.7);
        assert_eq!(c.k_values, vec![3]);
        assert_eq!(c.ensemble.n_models, 500);
        assert_eq!(c.ensemble.select_fraction, 0.25);
        assert_eq!(c.ensemble.subspace, SubspaceSize::Auto);
        assert_eq!(c.distance, DistanceSpec::EUCLIDEAN);
        assert!(!c.standardize);
    }

    #[test]
    fn parses_toml() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            methods = ["oexnrule", "knn"]
            repeats = 10
            k_values = [3, 5, 7]
            distance = 1.0
            master_seed = 9

            [ensemble]
            n_models = 100
            subspace = 2

            [[datasets]]
            id = "Sleep"
            path = "sleep.csv"
            label_column = "binaryClass"
            positive_label = "P"

            [[datasets]]
            path = "other.csv"
            label_column = 0
            positive_label = "1"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.methods, vec![Method::OExNRule, Method::Knn]);
        assert_eq!(cfg.k_values, vec![3, 5, 7]);
        assert_eq!(cfg.ensemble.n_models, 100);
        assert_eq!(cfg.ensemble.select_fraction, 0.25);
        assert_eq!(cfg.ensemble.subspace, SubspaceSize::Fixed(2));
        assert_eq!(cfg.distance, DistanceSpec::MANHATTAN);
        assert_eq!(cfg.datasets[0].id(), "Sleep");
        assert_eq!(cfg.datasets[1].id(), "other");
        assert_eq!(cfg.datasets[1].label_column, LabelColumn::Index(0));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml("repeats = -1").is_err());
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("distance = 0.5").is_err());
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_err());
        c.datasets.push(DatasetSource {
            id: None,
            path: "a.csv".into(),
            label_column: LabelColumn::Index(0),
            positive_label: "1".into(),
        });
        assert!(c.validate().is_ok());
        c.k_values = vec![0];
        assert!(c.validate().is_err());
        c.k_values = vec![3];
        c.datasets.push(c.datasets[0].clone());
        assert!(c.validate().is_err());
    }

    #[test]
    fn workers_not_echoed() {
        let c = ExperimentConfig {
            workers: 7,
            ..Default::default()
        };
        let json = serde_json::to_string(&c).unwrap();
        assert!(!json.contains("workers"));
    }

    #[test]
    fn shipped_config_parses() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.toml");
        let cfg = ExperimentConfig::from_file(&path).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.repeats, 100);
        assert_eq!(cfg.datasets.len(), 3);
        assert!(cfg.datasets[0].path.ends_with("data/sleep.csv"));
    }

    #[test]
    fn method_names() {
        assert_eq!("WKNN".parse::<Method>().unwrap(), Method::Wknn);
        assert!("rf".parse::<Method>().is_err());
    }
}
