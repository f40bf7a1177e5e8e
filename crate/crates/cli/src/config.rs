//! The JSON run configuration.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shapeopt_core::llm::LlmConfig;
use shapeopt_core::persist::TimestampMode;
use shapeopt_core::{EsConfig, GaConfig, SelectionConfig};
use shapeopt_geom::airfoil::{CurveConfig, EvaluatorConfig, NUM_POINTS};
use shapeopt_geom::axisym::DEFAULT_SAMPLES;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Airfoil,
    AxisymVolume,
    AxisymArea,
    AnalyticTest,
}

impl ProblemKind {
    pub fn is_axisym(self) -> bool {
        matches!(self, Self::AxisymVolume | Self::AxisymArea)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Llm,
    Mock,
    Ga,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxisymSettings {
    /// Each coefficient lies in `[-coefficient_bound, coefficient_bound]`.
    pub coefficient_bound: f64,
    pub samples: usize,
    pub elements: usize,
    pub quad_order: usize,
    pub penalty: f64,
}

impl Default for AxisymSettings {
    fn default() -> Self {
        Self {
            coefficient_bound: PI,
            samples: DEFAULT_SAMPLES,
            elements: 100,
            quad_order: 8,
            penalty: -1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirfoilSettings {
    pub evaluator: EvaluatorConfig,
    /// Lift-to-drag ratio of the baseline cylinder.
    #[serde(default)]
    pub baseline_ratio: f64,
    /// Which control points move; defaults to the first `free_points`.
    #[serde(default)]
    pub free_indices: Option<Vec<usize>>,
    #[serde(default)]
    pub curve: CurveConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticSettings {
    pub dimension: usize,
    /// Optimum of `-‖x − c‖²`; defaults to 0.3 in every coordinate.
    pub center: Option<Vec<f64>>,
}

impl Default for AnalyticSettings {
    fn default() -> Self {
        Self {
            dimension: 2,
            center: None,
        }
    }
}

/// GA operator settings; population size, seed, and budget come from the
/// enclosing [`RunConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSettings {
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub blend_alpha: f64,
    pub mutation_rate: f64,
    pub mutation_sigma: f64,
    pub elite_count: usize,
}

impl Default for GaSettings {
    fn default() -> Self {
        let d = GaConfig::default();
        Self {
            tournament_size: d.tournament_size,
            crossover_rate: d.crossover_rate,
            blend_alpha: d.blend_alpha,
            mutation_rate: d.mutation_rate,
            mutation_sigma: d.mutation_sigma,
            elite_count: d.elite_count,
        }
    }
}

fn default_population() -> usize {
    8
}
fn default_sigma() -> f64 {
    0.1
}
fn default_n_ini() -> usize {
    2
}
fn default_generations() -> usize {
    30
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_init_fraction() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}
fn default_output() -> PathBuf {
    PathBuf::from("runs")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    /// Legendre mode count `K` (axisymmetric problems).
    #[serde(default)]
    pub modes: Option<usize>,
    /// Number of free control points `n_F` (airfoil).
    #[serde(default)]
    pub free_points: Option<usize>,
    pub optimizer: OptimizerKind,
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_n_ini")]
    pub n_ini: usize,
    #[serde(default)]
    pub selection: SelectionConfig,
    /// Total generations per run, seeded ones included.
    #[serde(default = "default_generations")]
    pub generations: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_init_fraction")]
    pub init_fraction: f64,
    /// Extend seeding past `n_ini` until some design evaluates successfully.
    #[serde(default = "default_true")]
    pub reseed_until_valid: bool,
    #[serde(default)]
    pub llm: Option<LlmConfig>,
    #[serde(default)]
    pub ga: GaSettings,
    #[serde(default)]
    pub axisym: AxisymSettings,
    #[serde(default)]
    pub airfoil: Option<AirfoilSettings>,
    #[serde(default)]
    pub analytic: AnalyticSettings,
    #[serde(default)]
    pub timestamps: TimestampMode,
    /// Evaluate the designs of a generation concurrently.
    #[serde(default = "default_true")]
    pub parallel: bool,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// A minimal configuration for `problem`, mostly for tests and examples.
    pub fn new(problem: ProblemKind, optimizer: OptimizerKind) -> Self {
        Self {
            problem,
            modes: problem.is_axisym().then_some(2),
            free_points: (problem == ProblemKind::Airfoil).then_some(1),
            optimizer,
            population_size: default_population(),
            sigma: default_sigma(),
            n_ini: default_n_ini(),
            selection: SelectionConfig::default(),
            generations: default_generations(),
            seeds: default_seeds(),
            init_fraction: default_init_fraction(),
            reseed_until_valid: true,
            llm: None,
            ga: GaSettings::default(),
            axisym: AxisymSettings::default(),
            airfoil: None,
            analytic: AnalyticSettings::default(),
            timestamps: TimestampMode::default(),
            parallel: true,
            output_dir: default_output(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        match self.problem {
            ProblemKind::AxisymVolume | ProblemKind::AxisymArea => match self.modes {
                Some(k) if (1..=8).contains(&k) => {}
                other => return bad(format!("axisymmetric problems need modes in 1..=8, got {other:?}")),
            },
            ProblemKind::Airfoil => {
                match self.free_points {
                    Some(n) if (1..=NUM_POINTS).contains(&n) => {}
                    other => return bad(format!("airfoil needs free_points in 1..=4, got {other:?}")),
                }
                let Some(a) = &self.airfoil else {
                    return bad("airfoil problem needs an `airfoil` section".into());
                };
                if let Some(idx) = &a.free_indices {
                    let mut sorted = idx.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if Some(idx.len()) != self.free_points
                        || sorted.len() != idx.len()
                        || idx.iter().any(|&i| i >= NUM_POINTS)
                    {
                        return bad(format!("free_indices {idx:?} must list free_points distinct indices below 4"));
                    }
                }
            }
            ProblemKind::AnalyticTest => {
                if self.analytic.dimension == 0 {
                    return bad("analytic dimension must be >= 1".into());
                }
                if let Some(c) = &self.analytic.center {
                    if c.len() != self.analytic.dimension {
                        return bad("analytic center length must equal its dimension".into());
                    }
                }
            }
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.optimizer == OptimizerKind::Llm {
            match &self.llm {
                Some(l) => l.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?,
                None => return bad("optimizer `llm` needs an `llm` section".into()),
            }
        }
        if !(self.axisym.coefficient_bound > 0.0) {
            return bad("coefficient_bound must be positive".into());
        }
        if self.axisym.elements == 0 || self.axisym.quad_order == 0 {
            return bad("elements and quad_order must be positive".into());
        }
        self.es_config(self.seeds[0])
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.optimizer == OptimizerKind::Ga {
            self.ga_config(self.seeds[0])
                .validate()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    pub fn es_config(&self, seed: u64) -> EsConfig {
        EsConfig {
            population_size: self.population_size,
            sigma: self.sigma,
            n_ini: self.n_ini,
            generations: self.generations,
            selection: self.selection,
            seed,
            init_fraction: self.init_fraction,
            parallel: self.parallel,
            reseed_until_valid: self.reseed_until_valid,
        }
    }

    pub fn ga_config(&self, seed: u64) -> GaConfig {
        GaConfig {
            population_size: self.population_size,
            tournament_size: self.ga.tournament_size,
            crossover_rate: self.ga.crossover_rate,
            blend_alpha: self.ga.blend_alpha,
            mutation_rate: self.ga.mutation_rate,
            mutation_sigma: self.ga.mutation_sigma,
            elite_count: self.ga.elite_count,
            seed,
            generations: self.generations,
            init_fraction: self.init_fraction,
            parallel: self.parallel,
        }
    }

    /// Copy describing the single run with `seed`, as stored in its directory.
    pub fn snapshot(&self, seed: u64) -> Self {
        Self {
            seeds: vec![seed],
            ..self.clone()
        }
    }
}
