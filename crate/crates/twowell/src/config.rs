//! TOML experiment configuration.
//!
//! Only `s`, `lambda`, `L` and `N` are required; every table has defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use twowell_core::bogoliubov::BogoliubovMethod;
use twowell_core::grid::{KernelSpec, PotentialSpec};
use twowell_core::meanfield::HartreeOptions;
use twowell_core::twomode::SigmaRule;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize config: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{key} = {value} is out of range; expected {range}")]
    OutOfRange {
        key: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("empty scan: `L` and `N` need at least one value each")]
    EmptyScan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Potential exponent, `V(x) = |x ∓ L/2|^s` near the wells.
    pub s: f64,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub separations: Vec<f64>,
    #[serde(rename = "N")]
    pub particles: Vec<usize>,
    #[serde(default)]
    pub pairing: Pairing,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub bogoliubov: BogoliubovConfig,
    #[serde(default)]
    pub trial: TrialConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// How `L` and `N` values combine into scan points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Every `(L, N)` combination.
    #[default]
    Product,
    /// `L[i]` with `N[i]`; lists must have equal length.
    Zip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub amplitude: f64,
    pub range: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            range: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    /// Overrides `L/2 + max(8, 3R)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 2049, x_max: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Trace,
    Symplectic,
}

impl From<MethodChoice> for BogoliubovMethod {
    fn from(m: MethodChoice) -> Self {
        match m {
            MethodChoice::Trace => BogoliubovMethod::TraceFormula,
            MethodChoice::Symplectic => BogoliubovMethod::Symplectic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BogoliubovConfig {
    pub m_ladder: Vec<usize>,
    pub method: MethodChoice,
}

impl Default for BogoliubovConfig {
    fn default() -> Self {
        Self {
            m_ladder: vec![8, 16, 32],
            method: MethodChoice::Trace,
        }
    }
}

impl BogoliubovConfig {
    pub fn max_cutoff(&self) -> usize {
        self.m_ladder.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaChoice {
    #[default]
    SqrtGapN,
    SqrtN,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialConfig {
    pub sigma_rule: SigmaChoice,
    /// Used only with `sigma_rule = "fixed"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_sq: Option<f64>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            sigma_rule: SigmaChoice::SqrtGapN,
            sigma_sq: None,
        }
    }
}

impl TrialConfig {
    pub fn rule(&self) -> SigmaRule {
        match self.sigma_rule {
            SigmaChoice::SqrtGapN => SigmaRule::SqrtGapN,
            SigmaChoice::SqrtN => SigmaRule::SqrtN,
            SigmaChoice::Fixed => SigmaRule::Fixed(self.sigma_sq.unwrap_or(1.0)),
        }
    }

    /// The rule reported next to the configured one.
    pub fn alternate_rule(&self) -> SigmaRule {
        match self.sigma_rule {
            SigmaChoice::SqrtGapN => SigmaRule::SqrtN,
            _ => SigmaRule::SqrtGapN,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Hartree residual relative to `μ_+`.
    pub hartree: f64,
    pub hartree_max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = HartreeOptions::default();
        Self {
            hartree: d.tol,
            hartree_max_iterations: d.max_iterations,
        }
    }
}

impl Tolerances {
    pub fn hartree_options(&self) -> HartreeOptions {
        HartreeOptions {
            tol: self.hartree,
            max_iterations: self.hartree_max_iterations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub enabled: bool,
    pub modes: usize,
    /// Scan points with more particles skip the oracle.
    pub max_particles: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            modes: 4,
            max_particles: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub csv: String,
    pub timings: String,
    /// Empty disables the plot.
    pub svg: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            csv: "scan.csv".into(),
            timings: "scan_timings.csv".into(),
            svg: "scan.svg".into(),
        }
    }
}

impl ExperimentConfig {
    /// Minimal configuration with every optional table at its default.
    pub fn new(s: f64, lambda: f64, separations: Vec<f64>, particles: Vec<usize>) -> Self {
        Self {
            s,
            lambda,
            separations,
            particles,
            pairing: Pairing::default(),
            kernel: KernelConfig::default(),
            grid: GridConfig::default(),
            bogoliubov: BogoliubovConfig::default(),
            trial: TrialConfig::default(),
            tolerances: Tolerances::default(),
            oracle: OracleConfig::default(),
            output: OutputConfig::default(),
            workers: None,
        }
    }

    pub fn potential(&self, separation: f64) -> PotentialSpec {
        PotentialSpec::new(self.s, separation).expect("validated")
    }

    pub fn kernel_spec(&self) -> KernelSpec {
        KernelSpec::triangle(self.kernel.amplitude, self.kernel.range).expect("validated")
    }

    /// Scan points `(L, N)` sorted by `L`, then `N`, without duplicates.
    pub fn points(&self) -> Vec<(f64, usize)> {
        let mut pts: Vec<(f64, usize)> = match self.pairing {
            Pairing::Product => self
                .separations
                .iter()
                .flat_map(|&l| self.particles.iter().map(move |&n| (l, n)))
                .collect(),
            Pairing::Zip => self.separations.iter().copied().zip(self.particles.iter().copied()).collect(),
        };
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        pts.dedup();
        pts
    }

    /// Distinct separations in increasing order.
    pub fn distinct_separations(&self) -> Vec<f64> {
        let mut ls: Vec<f64> = self.points().iter().map(|p| p.0).collect();
        ls.dedup();
        ls
    }

    /// Modes the mean-field spectrum must provide.
    pub fn spectrum_modes(&self) -> usize {
        let bog = 2 * self.bogoliubov.max_cutoff() + 2;
        let oracle = if self.oracle.enabled { self.oracle.modes + self.oracle.modes % 2 } else { 0 };
        bog.max(oracle).max(4)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.separations.is_empty() || self.particles.is_empty() {
            return Err(ConfigError::EmptyScan);
        }
        if self.s < 2.0 || !self.s.is_finite() {
            return Err(ConfigError::Invalid("s must be ≥ 2".into()));
        }
        range("lambda", self.lambda, self.lambda >= 0.0 && self.lambda.is_finite(), "[0, ∞)")?;
        for &l in &self.separations {
            range("L", l, l > 0.0 && l.is_finite(), "(0, ∞)")?;
        }
        for &n in &self.particles {
            range("N", n, n >= 2, "[2, ∞)")?;
        }
        if self.pairing == Pairing::Zip && self.separations.len() != self.particles.len() {
            return Err(ConfigError::Invalid(
                "pairing = \"zip\" needs `L` and `N` of equal length".into(),
            ));
        }
        let k = &self.kernel;
        range("kernel.amplitude", k.amplitude, k.amplitude >= 0.0 && k.amplitude.is_finite(), "[0, ∞)")?;
        range("kernel.range", k.range, k.range > 0.0 && k.range.is_finite(), "(0, ∞)")?;
        let n = self.grid.n;
        range("grid.n", n, n >= 65 && n % 2 == 1, "odd integers ≥ 65")?;
        if let Some(x) = self.grid.x_max {
            range("grid.x_max", x, x > 0.0 && x.is_finite(), "(0, ∞)")?;
        }
        let ladder = &self.bogoliubov.m_ladder;
        if ladder.is_empty() || ladder.contains(&0) || ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid(
                "bogoliubov.m_ladder must be a non-empty strictly increasing list of positive cutoffs".into(),
            ));
        }
        if self.trial.sigma_rule == SigmaChoice::Fixed {
            match self.trial.sigma_sq {
                Some(v) => range("trial.sigma_sq", v, v >= 1.0 && v.is_finite(), "[1, ∞)")?,
                None => {
                    return Err(ConfigError::Invalid(
                        "trial.sigma_sq is required when sigma_rule = \"fixed\"".into(),
                    ))
                }
            }
        }
        let t = &self.tolerances;
        range("tolerances.hartree", t.hartree, t.hartree > 0.0 && t.hartree < 1.0, "(0, 1)")?;
        range(
            "tolerances.hartree_max_iterations",
            t.hartree_max_iterations,
            t.hartree_max_iterations >= 1,
            "[1, ∞)",
        )?;
        let o = &self.oracle;
        range("oracle.modes", o.modes, (2..=8).contains(&o.modes), "[2, 8]")?;
        range("oracle.max_particles", o.max_particles, o.max_particles >= 2, "[2, ∞)")?;
        if let Some(w) = self.workers {
            range("workers", w, w >= 1, "[1, ∞)")?;
        }
        if self.output.csv.is_empty() || self.output.timings.is_empty() {
            return Err(ConfigError::Invalid("output.csv and output.timings must be non-empty".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }
}

fn range<T: ToString>(key: &'static str, value: T, ok: bool, expected: &'static str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            key,
            value: value.to_string(),
            range: expected,
        })
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ExperimentConfig::from_toml_str(&text)
}
