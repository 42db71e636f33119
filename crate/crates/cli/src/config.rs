use anyhow::{anyhow, bail, Context, Result};
use euler2c::coords::{cartesian_to_delaunay, delaunay_to_cartesian, DelaunayElements};
use euler2c::dynamics::{Model, RunConfig, SymmetricParams, DEFAULT_GUARD};
use euler2c::{CartesianState, MassParams, Vec3};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TwoCentre,
    Symmetric,
    Sea,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Masses {
    pub m: Option<f64>,
    pub eps: Option<f64>,
    pub mu: Option<f64>,
    pub m_plus: Option<f64>,
    pub m_minus: Option<f64>,
    pub x0: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cartesian {
    pub y: [f64; 3],
    pub x: [f64; 3],
    #[serde(default)]
    pub xprime: [f64; 3],
    #[serde(default)]
    pub yprime: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Cartesian(Cartesian),
    Delaunay(DelaunayElements),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integrator {
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub t_span: Option<[f64; 2]>,
    #[serde(default = "default_guard")]
    pub guard: f64,
    pub sample_dt: Option<f64>,
}

impl Default for Integrator {
    fn default() -> Self {
        Self { tol: default_tol(), t_span: None, guard: default_guard(), sample_dt: None }
    }
}

fn default_tol() -> f64 {
    1e-10
}

fn default_guard() -> f64 {
    DEFAULT_GUARD
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<String>,
    #[serde(default)]
    pub formats: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitSection {
    pub delta: f64,
    pub levels: Option<Vec<f64>>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(rename = "Lambda", default = "one")]
    pub lambda: f64,
}

fn default_points() -> usize {
    400
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecularSection {
    pub samples_per_orbit: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskSection {
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub mode: Option<String>,
    /// Names the subdirectory when the config is part of an array.
    pub name: Option<String>,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default)]
    pub masses: Masses,
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default)]
    pub output: Output,
    pub portrait: Option<PortraitSection>,
    #[serde(default)]
    pub secular: SecularSection,
    #[serde(default)]
    pub risk: RiskSection,
}

fn default_model() -> ModelKind {
    ModelKind::TwoCentre
}

/// A config file holds one document or an array of them.
pub fn parse(text: &str) -> Result<Vec<Config>> {
    let value: serde_json::Value = serde_json::from_str(text).context("config is not valid JSON")?;
    let docs = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    if docs.is_empty() {
        bail!("config array is empty");
    }
    docs.into_iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v).with_context(|| format!("config entry {i}")))
        .collect()
}

impl Config {
    pub fn check_mode(&self, command: &str) -> Result<()> {
        match &self.mode {
            Some(m) if m != command => bail!("config mode '{m}' does not match command '{command}'"),
            _ => Ok(()),
        }
    }

    pub fn mass_params(&self) -> Result<MassParams> {
        let ms = &self.masses;
        Ok(match self.model {
            ModelKind::TwoCentre | ModelKind::Symmetric => MassParams::two_centre(ms.m.unwrap_or(1.0), ms.eps.unwrap_or(0.0))?,
            ModelKind::Sea => {
                let eps = ms.eps.ok_or_else(|| anyhow!("SEA model needs masses.eps"))?;
                MassParams::sea(eps, ms.mu.ok_or_else(|| anyhow!("SEA model needs masses.mu"))?)?
            }
        })
    }

    pub fn model(&self) -> Result<Model> {
        Ok(match self.model {
            ModelKind::TwoCentre => Model::TwoCentre(self.mass_params()?),
            ModelKind::Sea => Model::Sea(self.mass_params()?),
            ModelKind::Symmetric => {
                let ms = &self.masses;
                let sp = SymmetricParams {
                    x0: Vec3::from(ms.x0.ok_or_else(|| anyhow!("symmetric model needs masses.x0"))?),
                    m_plus: ms.m_plus.ok_or_else(|| anyhow!("symmetric model needs masses.m_plus"))?,
                    m_minus: ms.m_minus.ok_or_else(|| anyhow!("symmetric model needs masses.m_minus"))?,
                };
                if !(sp.m_plus >= 0.0 && sp.m_minus >= 0.0) {
                    bail!("symmetric masses must be non-negative");
                }
                Model::Symmetric(sp)
            }
        })
    }

    fn initial(&self) -> Result<&InitialState> {
        self.initial_state.as_ref().ok_or_else(|| anyhow!("config needs initial_state"))
    }

    pub fn cartesian(&self) -> Result<CartesianState> {
        Ok(match self.initial()? {
            InitialState::Cartesian(c) => {
                CartesianState::new(Vec3::from(c.y), Vec3::from(c.x), Vec3::from(c.xprime)).with_yprime(Vec3::from(c.yprime))
            }
            InitialState::Delaunay(d) => delaunay_to_cartesian(d, &self.mass_params()?)?,
        })
    }

    pub fn elements(&self) -> Result<DelaunayElements> {
        Ok(match self.initial()? {
            InitialState::Delaunay(d) => *d,
            InitialState::Cartesian(_) => cartesian_to_delaunay(&self.cartesian()?, &self.mass_params()?)?.orbit_regular()?,
        })
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let [t0, t1] = self.integrator.t_span.ok_or_else(|| anyhow!("config needs integrator.t_span"))?;
        Ok(RunConfig { t_span: (t0, t1), tol: self.integrator.tol, guard: self.integrator.guard, sample_dt: self.integrator.sample_dt })
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.is_empty() || self.output.formats.iter().any(|f| f == format)
    }
}
