//! JSON run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use nonint_core::experiments::ExperimentConfig;
use nonint_core::{
    AlphaSequence, FamilyKind, GridSpec, IndexWindow, Interpolation, RvFamily, RvSpec, Spacing,
    Tolerances,
};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_M_MAX: u64 = 1000;
pub const DEFAULT_MC_SEED: u64 = 0x5eed_2021;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_VP_COUNT: usize = 2;
pub const DEFAULT_VP_BUDGET: u64 = 10_000_000;
pub const MAX_GRID_POINTS: usize = 100_000;
pub const MAX_M: u64 = 100_000_000;

/// Law of `|X|`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecConfig {
    ScaledPareto {
        scale: u64,
    },
    ParetoAlpha {
        alpha: f64,
    },
    BernoulliPareto {
        p: f64,
    },
    Degenerate {
        value: f64,
    },
    /// Inline `samples` or a `samples_file` (relative to the config file).
    Empirical {
        #[serde(default)]
        samples: Option<Vec<f64>>,
        #[serde(default)]
        samples_file: Option<PathBuf>,
    },
    Tabulated {
        points: Vec<(f64, f64)>,
        #[serde(default)]
        interpolation: Interpolation,
    },
    Scaled {
        base: Box<SpecConfig>,
        factor: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaConfig {
    Interleaved,
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    ScaledPareto,
    ParetoAlpha {
        #[serde(default)]
        alphas: Option<AlphaConfig>,
    },
    HarmonicMixture,
    Constant {
        spec: SpecConfig,
    },
    Listed {
        specs: Vec<SpecConfig>,
    },
    Rescaled {
        base: Box<FamilyConfig>,
        factor: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub min: u64,
    pub max: u64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { min: 1, max: 1000 }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridConfig {
    fn default_a() -> Self {
        Self {
            min: 1.0,
            max: 1e6,
            points: 61,
            spacing: Spacing::Logarithmic,
        }
    }

    fn default_k() -> Self {
        Self {
            min: 1.0,
            max: 1e3,
            points: 31,
            spacing: Spacing::Logarithmic,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_MC_SEED,
            samples: DEFAULT_MC_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VpConfig {
    pub count: usize,
    pub budget: u64,
}

impl Default for VpConfig {
    fn default() -> Self {
        Self {
            count: DEFAULT_VP_COUNT,
            budget: DEFAULT_VP_BUDGET,
        }
    }
}

fn default_a_grid() -> GridConfig {
    GridConfig::default_a()
}

fn default_k_grid() -> GridConfig {
    GridConfig::default_k()
}

fn default_m_max() -> u64 {
    DEFAULT_M_MAX
}

/// Raw configuration document. Every field except `family` is optional.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub family: Option<FamilyConfig>,
    #[serde(default)]
    pub index_window: WindowConfig,
    #[serde(default = "default_a_grid")]
    pub a_grid: GridConfig,
    #[serde(default = "default_k_grid")]
    pub k_grid: GridConfig,
    #[serde(default = "default_m_max")]
    pub m_max: u64,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub vp: VpConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub family: Option<RvFamily>,
    pub window: IndexWindow,
    pub a_grid: GridSpec,
    pub k_grid: GridSpec,
    pub m_max: u64,
    pub mc_seed: u64,
    pub mc_samples: usize,
    pub tol: Tolerances,
    pub vp: VpConfig,
}

impl Resolved {
    pub fn family(&self) -> Result<&RvFamily, CliError> {
        self.family
            .as_ref()
            .ok_or_else(|| CliError::Config("family: required for this command".into()))
    }

    pub fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            a_grid: self.a_grid,
            k_grid: self.k_grid,
            window: self.window,
            m_max: self.m_max,
            mc_seed: self.mc_seed,
            mc_samples: self.mc_samples,
            alphas: AlphaSequence::Interleaved,
            tol: self.tol,
        }
    }
}

fn field<E: std::fmt::Display>(name: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Config(format!("{name}: {e}"))
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name}: must be finite and positive (got {x})"
        )))
    }
}

fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("samples_file: {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| {
            CliError::Config(format!(
                "samples_file: {}:{}: not a number: {line:?}",
                path.display(),
                i + 1
            ))
        })?;
        out.push(x);
    }
    Ok(out)
}

fn build_spec(c: &SpecConfig, base_dir: &Path, at: &str) -> Result<RvSpec, CliError> {
    let spec = match c {
        SpecConfig::ScaledPareto { scale } => RvSpec::scaled_pareto(*scale),
        SpecConfig::ParetoAlpha { alpha } => RvSpec::pareto_alpha(*alpha),
        SpecConfig::BernoulliPareto { p } => RvSpec::bernoulli_pareto(*p),
        SpecConfig::Degenerate { value } => RvSpec::degenerate(*value),
        SpecConfig::Empirical {
            samples,
            samples_file,
        } => {
            let values = match (samples, samples_file) {
                (Some(s), None) => s.clone(),
                (None, Some(f)) => read_samples(&base_dir.join(f))?,
                _ => {
                    return Err(CliError::Config(format!(
                        "{at}: exactly one of samples, samples_file is required"
                    )))
                }
            };
            RvSpec::empirical(values)
        }
        SpecConfig::Tabulated {
            points,
            interpolation,
        } => RvSpec::tabulated(points.clone(), *interpolation),
        SpecConfig::Scaled { base, factor } => {
            let base = build_spec(base, base_dir, &format!("{at}.base"))?;
            RvSpec::scaled(base, *factor)
        }
    };
    spec.map_err(field(at))
}

fn build_family(c: &FamilyConfig, base_dir: &Path, at: &str) -> Result<FamilyKind, CliError> {
    Ok(match c {
        FamilyConfig::ScaledPareto => FamilyKind::ScaledPareto,
        FamilyConfig::HarmonicMixture => FamilyKind::HarmonicMixture,
        FamilyConfig::ParetoAlpha { alphas } => FamilyKind::ParetoAlpha {
            alphas: match alphas {
                None | Some(AlphaConfig::Interleaved) => AlphaSequence::Interleaved,
                Some(AlphaConfig::Explicit { values }) => {
                    AlphaSequence::explicit(values.clone())
                        .map_err(field(&format!("{at}.alphas")))?
                }
            },
        },
        FamilyConfig::Constant { spec } => FamilyKind::Constant {
            spec: build_spec(spec, base_dir, &format!("{at}.spec"))?,
        },
        FamilyConfig::Listed { specs } => {
            if specs.is_empty() {
                return Err(CliError::Config(format!("{at}.specs: must not be empty")));
            }
            FamilyKind::Listed {
                specs: specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| build_spec(s, base_dir, &format!("{at}.specs[{i}]")))
                    .collect::<Result<_, _>>()?,
            }
        }
        FamilyConfig::Rescaled { base, factor } => {
            positive(&format!("{at}.factor"), *factor)?;
            FamilyKind::Rescaled {
                base: Box::new(build_family(base, base_dir, &format!("{at}.base"))?),
                factor: *factor,
            }
        }
    })
}

fn build_grid(c: &GridConfig, name: &str) -> Result<GridSpec, CliError> {
    if c.points > MAX_GRID_POINTS {
        return Err(CliError::Config(format!(
            "{name}.points: at most {MAX_GRID_POINTS} (got {})",
            c.points
        )));
    }
    GridSpec::new(c.min, c.max, c.points, c.spacing).map_err(|e| {
        // ModelError::BadGrid already names the offending field
        CliError::Config(format!(
            "{name}.{}",
            e.to_string().trim_start_matches("grid: ")
        ))
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, dir))
    }

    /// Checks every field; error messages start with the field path.
    pub fn resolve(&self, base_dir: &Path) -> Result<Resolved, CliError> {
        let window = IndexWindow::new(self.index_window.min, self.index_window.max)
            .map_err(field("index_window"))?;
        let a_grid = build_grid(&self.a_grid, "a_grid")?;
        let k_grid = build_grid(&self.k_grid, "k_grid")?;
        if self.m_max == 0 || self.m_max > MAX_M {
            return Err(CliError::Config(format!(
                "m_max: must be in 1..={MAX_M} (got {})",
                self.m_max
            )));
        }
        if self.mc.samples < nonint_core::truncation::MC_MIN_SAMPLES {
            return Err(CliError::Config(format!(
                "mc.samples: must be at least {} (got {})",
                nonint_core::truncation::MC_MIN_SAMPLES,
                self.mc.samples
            )));
        }
        let t = &self.tolerances;
        positive("tolerances.quad_abs", t.quad_abs)?;
        positive("tolerances.quad_rel", t.quad_rel)?;
        positive("tolerances.invert_rel", t.invert_rel)?;
        if t.invert_rel >= 1e-3 {
            return Err(CliError::Config(format!(
                "tolerances.invert_rel: must be below 1e-3 (got {})",
                t.invert_rel
            )));
        }
        if self.vp.count == 0 || self.vp.count > 64 {
            return Err(CliError::Config(format!(
                "vp.count: must be in 1..=64 (got {})",
                self.vp.count
            )));
        }
        if self.vp.budget < 3 {
            return Err(CliError::Config(format!(
                "vp.budget: must be at least 3 (got {})",
                self.vp.budget
            )));
        }
        let family = match &self.family {
            None => None,
            Some(f) => {
                let kind = build_family(f, base_dir, "family")?;
                Some(RvFamily::new(kind, window).map_err(field("index_window"))?)
            }
        };
        Ok(Resolved {
            family,
            window,
            a_grid,
            k_grid,
            m_max: self.m_max,
            mc_seed: self.mc.seed,
            mc_samples: self.mc.samples,
            tol: self.tolerances,
            vp: self.vp,
        })
    }
}
