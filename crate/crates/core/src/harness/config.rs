//! Run configuration: a TOML file with nested sections, validated into
//! [`RunConfig`]. The canonical JSON form of the validated config (minus the
//! output directory) is hashed so a populated output directory can refuse
//! inputs it was not built from.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::regression::RegressionSpec;
use crate::synth::{Algorithm, RowTarget, ThresholdMode};

pub const DEFAULT_EPSILONS: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MetricSelection {
    pub marginal: bool,
    pub joint: bool,
    pub correlation: bool,
    pub nist: bool,
}

impl MetricSelection {
    pub fn all() -> Self {
        MetricSelection { marginal: true, joint: true, correlation: true, nist: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NistRegressionColumns {
    pub city: String,
    pub gender: String,
    pub wage: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub codebook: PathBuf,
    pub original: PathBuf,
    pub public: Option<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub epsilons: Vec<f64>,
    pub delta: f64,
    pub replicates: u32,
    pub rows: RowTarget,
    pub threshold: ThresholdMode,
    pub seed: u64,
    pub grouping_threshold: f64,
    pub max_group_size: usize,
    pub max_cells: u64,
    pub metrics: MetricSelection,
    /// Shared CART complexity parameter for the propensity metrics. When
    /// unset it is cross-validated on the first (original, replicate) pair.
    pub cart_cp: Option<f64>,
    pub clustering_reps: usize,
    pub classification_reps: usize,
    pub null_pmse_reps: usize,
    pub regressions: Vec<RegressionSpec>,
    pub nist_regression: Option<NistRegressionColumns>,
    /// Where outputs land. Not part of the config hash: moving a run must
    /// not disown its artifacts.
    #[serde(skip)]
    pub out_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data: RawData,
    synthesis: RawSynthesis,
    #[serde(default)]
    grouping: RawGrouping,
    #[serde(default)]
    metrics: RawMetrics,
    #[serde(default)]
    regression: Vec<RegressionSpec>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    codebook: PathBuf,
    original: PathBuf,
    public: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSynthesis {
    algorithms: Vec<Algorithm>,
    epsilons: Option<Vec<f64>>,
    #[serde(default = "default_delta")]
    delta: f64,
    #[serde(default = "default_replicates")]
    replicates: u32,
    rows: Option<RowsRaw>,
    threshold: Option<ThresholdRaw>,
    #[serde(default = "default_seed")]
    seed: u64,
}

fn default_delta() -> f64 {
    1e-6
}
fn default_replicates() -> u32 {
    3
}
fn default_seed() -> u64 {
    1
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RowsRaw {
    Count(usize),
    Mode(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ThresholdRaw {
    Value(f64),
    Mode(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrouping {
    threshold: Option<f64>,
    max_group_size: Option<usize>,
    max_cells: Option<u64>,
}

impl Default for RawGrouping {
    fn default() -> Self {
        RawGrouping { threshold: None, max_group_size: None, max_cells: None }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetrics {
    enabled: Option<Vec<String>>,
    cart_cp: Option<f64>,
    clustering_reps: Option<usize>,
    classification_reps: Option<usize>,
    null_pmse_reps: Option<usize>,
    nist_regression: Option<NistRegressionColumns>,
}

impl Default for RawMetrics {
    fn default() -> Self {
        RawMetrics {
            enabled: None,
            cart_cp: None,
            clustering_reps: None,
            classification_reps: None,
            null_pmse_reps: None,
            nist_regression: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput { dir: None }
    }
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

impl RunConfig {
    /// Parses and validates a config file. Relative paths inside it resolve
    /// against the file's own directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::from_toml(&text, base)
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<RunConfig> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))?;
        let rows = match raw.synthesis.rows {
            None => RowTarget::MatchOriginal,
            Some(RowsRaw::Count(n)) => RowTarget::Fixed(n),
            Some(RowsRaw::Mode(s)) if s == "match-original" => RowTarget::MatchOriginal,
            Some(RowsRaw::Mode(s)) => {
                return Err(Error::Config(format!(
                    "rows must be \"match-original\" or a count, got \"{s}\""
                )))
            }
        };
        let threshold = match raw.synthesis.threshold {
            None => ThresholdMode::Auto,
            Some(ThresholdRaw::Value(t)) => ThresholdMode::Fixed(t),
            Some(ThresholdRaw::Mode(s)) if s == "auto" => ThresholdMode::Auto,
            Some(ThresholdRaw::Mode(s)) => {
                return Err(Error::Config(format!(
                    "threshold must be \"auto\" or a number, got \"{s}\""
                )))
            }
        };
        let metrics = match raw.metrics.enabled {
            None => MetricSelection::all(),
            Some(names) => {
                let mut sel = MetricSelection {
                    marginal: false,
                    joint: false,
                    correlation: false,
                    nist: false,
                };
                for name in &names {
                    match name.as_str() {
                        "marginal" => sel.marginal = true,
                        "joint" => sel.joint = true,
                        "correlation" => sel.correlation = true,
                        "nist" => sel.nist = true,
                        other => {
                            return Err(Error::Config(format!(
                                "unknown metric family \"{other}\" (expected marginal, joint, correlation or nist)"
                            )))
                        }
                    }
                }
                sel
            }
        };
        let cfg = RunConfig {
            codebook: resolve(base_dir, raw.data.codebook),
            original: resolve(base_dir, raw.data.original),
            public: raw.data.public.map(|p| resolve(base_dir, p)),
            algorithms: raw.synthesis.algorithms,
            epsilons: raw.synthesis.epsilons.unwrap_or_else(|| DEFAULT_EPSILONS.to_vec()),
            delta: raw.synthesis.delta,
            replicates: raw.synthesis.replicates,
            rows,
            threshold,
            seed: raw.synthesis.seed,
            grouping_threshold: raw.grouping.threshold.unwrap_or(0.3),
            max_group_size: raw.grouping.max_group_size.unwrap_or(3),
            max_cells: raw.grouping.max_cells.unwrap_or(1_000_000),
            metrics,
            cart_cp: raw.metrics.cart_cp,
            clustering_reps: raw.metrics.clustering_reps.unwrap_or(100),
            classification_reps: raw.metrics.classification_reps.unwrap_or(300),
            null_pmse_reps: raw.metrics.null_pmse_reps.unwrap_or(100),
            regressions: raw.regression,
            nist_regression: raw.metrics.nist_regression,
            out_dir: resolve(base_dir, raw.output.dir.unwrap_or_else(|| PathBuf::from("out"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("no synthesis algorithms configured".into()));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return Err(Error::Config(format!("algorithm \"{}\" listed twice", a.name())));
            }
        }
        if self.epsilons.is_empty() {
            return Err(Error::Config("epsilon grid is empty".into()));
        }
        for &e in &self.epsilons {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Config(format!("epsilon values must be positive, got {e}")));
            }
        }
        if !self.epsilons.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("epsilon grid must be strictly increasing".into()));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::Config(format!("delta must lie in [0, 1), got {}", self.delta)));
        }
        if self.algorithms.contains(&Algorithm::DpSyn) && self.delta == 0.0 {
            return Err(Error::Config(
                "dpsyn uses Gaussian noise and needs delta > 0".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if let RowTarget::Fixed(0) = self.rows {
            return Err(Error::Config("rows must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.grouping_threshold) {
            return Err(Error::Config(format!(
                "grouping threshold must lie in [0, 1], got {}",
                self.grouping_threshold
            )));
        }
        if self.max_group_size == 0 || self.max_cells == 0 {
            return Err(Error::Config("grouping caps must be positive".into()));
        }
        if self.clustering_reps == 0 || self.classification_reps == 0 || self.null_pmse_reps == 0 {
            return Err(Error::Config("repetition counts must be positive".into()));
        }
        if let Some(cp) = self.cart_cp {
            if !(cp > 0.0 && cp <= 1.0) {
                return Err(Error::Config(format!("cart_cp must lie in (0, 1], got {cp}")));
            }
        }
        for (i, spec) in self.regressions.iter().enumerate() {
            if spec.predictors.is_empty() {
                return Err(Error::Config(format!("regression model {} has no predictors", i + 1)));
            }
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form (sorted keys, output dir
    /// excluded). Any change that could alter results changes the hash.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canon = serde_json::to_string(&value).expect("json renders");
        let mut h = Sha256::new();
        h.update(canon.as_bytes());
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[data]
codebook = "cb.txt"
original = "orig.csv"

[synthesis]
algorithms = ["fieldgroups"]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL, Path::new("/base")).unwrap();
        assert_eq!(cfg.codebook, Path::new("/base/cb.txt"));
        assert_eq!(cfg.epsilons, vec![0.1, 1.0, 10.0]);
        assert_eq!(cfg.replicates, 3);
        assert_eq!(cfg.rows, RowTarget::MatchOriginal);
        assert_eq!(cfg.threshold, ThresholdMode::Auto);
        assert_eq!(cfg.metrics, MetricSelection::all());
        assert_eq!(cfg.out_dir, Path::new("/base/out"));
        assert!(cfg.public.is_none());
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
[data]
codebook = "cb.txt"
original = "orig.csv"
public = "/abs/public.csv"

[synthesis]
algorithms = ["fieldgroups", "dpsyn"]
epsilons = [0.5, 2.0]
delta = 1e-5
replicates = 4
rows = 1234
threshold = 6.5
seed = 99

[grouping]
threshold = 0.25
max_group_size = 2
max_cells = 500

[metrics]
enabled = ["marginal", "nist"]
clustering_reps = 7
classification_reps = 9
null_pmse_reps = 11

[metrics.nist_regression]
city = "city"
gender = "gender"
wage = "wage"

[[regression]]
family = "logistic"
outcome = "employed"
predictors = ["age", "wage"]

[output]
dir = "results"
"#;
        let cfg = RunConfig::from_toml(text, Path::new("/b")).unwrap();
        assert_eq!(cfg.public.as_deref(), Some(Path::new("/abs/public.csv")));
        assert_eq!(cfg.algorithms, vec![Algorithm::FieldGroups, Algorithm::DpSyn]);
        assert_eq!(cfg.rows, RowTarget::Fixed(1234));
        assert_eq!(cfg.threshold, ThresholdMode::Fixed(6.5));
        assert_eq!(cfg.seed, 99);
        assert!(cfg.metrics.marginal && cfg.metrics.nist);
        assert!(!cfg.metrics.joint && !cfg.metrics.correlation);
        assert_eq!(cfg.regressions.len(), 1);
        assert_eq!(cfg.nist_regression.as_ref().unwrap().wage, "wage");
        assert_eq!(cfg.out_dir, Path::new("/b/results"));
    }

    #[test]
    fn bad_grids_are_rejected() {
        let mk = |eps: &str| {
            let text = format!(
                "[data]\ncodebook=\"c\"\noriginal=\"o\"\n[synthesis]\nalgorithms=[\"fieldgroups\"]\nepsilons={eps}\n"
            );
            RunConfig::from_toml(&text, Path::new("."))
        };
        assert!(mk("[1.0, 0.5]").is_err(), "descending grid");
        assert!(mk("[1.0, 1.0]").is_err(), "repeated value");
        assert!(mk("[0.0, 1.0]").is_err(), "zero epsilon");
        assert!(mk("[-1.0]").is_err(), "negative epsilon");
        assert!(mk("[]").is_err(), "empty grid");
        assert!(mk("[0.5, 1.0]").is_ok());
    }

    #[test]
    fn dpsyn_needs_positive_delta() {
        let text = "[data]\ncodebook=\"c\"\noriginal=\"o\"\n[synthesis]\nalgorithms=[\"dpsyn\"]\ndelta=0.0\n";
        let err = RunConfig::from_toml(text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("delta"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "[data]\ncodebook=\"c\"\noriginal=\"o\"\ntypo=\"x\"\n[synthesis]\nalgorithms=[\"fieldgroups\"]\n";
        assert!(RunConfig::from_toml(text, Path::new(".")).is_err());
    }

    #[test]
    fn hash_tracks_content_not_location() {
        let a = RunConfig::from_toml(MINIMAL, Path::new("/base")).unwrap();
        let mut b = a.clone();
        b.out_dir = PathBuf::from("/somewhere/else");
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.seed = 2;
        assert_ne!(a.hash(), c.hash());
        let mut d = a.clone();
        d.epsilons = vec![0.1, 1.0, 9.0];
        assert_ne!(a.hash(), d.hash());
        assert_eq!(a.hash().len(), 64);
        assert_eq!(a.hash(), a.hash());
    }
}
