//! JSON experiment configuration shared by all subcommands.
//!
//! Every section is optional at parse time; each subcommand asks for the
//! sections it needs and reports a missing one as an invalid configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{IntegrationConfig, Method, Scheme};
use crate::mappings::{named_initial_state, named_to_gm, NamedOptimizerConfig};
use crate::model::{ModelParams, PhaseState};
use crate::objectives::{make_logistic, make_quadratic, ObjectiveSpec, Vector};

/// How to generate the objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObjectiveConfig {
    Quadratic {
        dim: usize,
        mu: f64,
        #[serde(rename = "L")]
        l: f64,
        seed: Option<u64>,
    },
    Logistic {
        dim: usize,
        samples: usize,
        reg: f64,
        seed: Option<u64>,
    },
}

impl ObjectiveConfig {
    /// Builds the objective; `seed_override` (the `--seed` flag) wins over
    /// the configured seed, and one of the two must be present.
    pub fn build(&self, seed_override: Option<u64>) -> Result<ObjectiveSpec> {
        let (configured, family) = match self {
            Self::Quadratic { seed, .. } => (*seed, "quadratic"),
            Self::Logistic { seed, .. } => (*seed, "logistic"),
        };
        let seed = seed_override
            .or(configured)
            .ok_or_else(|| Error::InvalidConfig(format!("{family} objective needs a seed")))?;
        Ok(match *self {
            Self::Quadratic { dim, mu, l, .. } => ObjectiveSpec::Quadratic(make_quadratic(dim, mu, l, seed)?),
            Self::Logistic { dim, samples, reg, .. } => {
                ObjectiveSpec::Logistic(make_logistic(dim, samples, reg, seed)?)
            }
        })
    }
}

/// Explicit initial state; `v` defaults to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub x: Vec<f64>,
    #[serde(default)]
    pub v: Option<Vec<f64>>,
}

/// Direction for `map-params` on raw parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapDirection {
    SieToEe,
    EeToSie,
}

/// Explicit list or Cartesian grid of parameter triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub params: Vec<ModelParams>,
    #[serde(default)]
    pub m: Vec<f64>,
    #[serde(default)]
    pub n: Vec<f64>,
    #[serde(default)]
    pub q: Vec<f64>,
}

impl SweepConfig {
    /// Listed triples followed by the grid in `m`-major order.
    pub fn expand(&self) -> Result<Vec<ModelParams>> {
        let mut out = self.params.clone();
        let grid = [&self.m, &self.n, &self.q];
        let filled = grid.iter().filter(|g| !g.is_empty()).count();
        if filled != 0 && filled != 3 {
            return Err(Error::InvalidConfig("sweep grid needs all of m, n and q".into()));
        }
        for &m in &self.m {
            for &n in &self.n {
                for &q in &self.q {
                    out.push(ModelParams::new(m, n, q)?);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidConfig("sweep is empty".into()));
        }
        Ok(out)
    }
}

/// Family `m = m_scale·√s`, fixed `n` and `q`, evaluated over `s_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub m_scale: f64,
    pub n: f64,
    pub q: f64,
    pub s_grid: Vec<f64>,
}

/// Figures that `reproduce` can regenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub mu: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional subcommand name; must match the invoked one when present.
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub objective: Option<ObjectiveConfig>,
    #[serde(default)]
    pub params: Option<ModelParams>,
    #[serde(default)]
    pub named: Option<NamedOptimizerConfig>,
    /// Scheme for `named` / `check-conditions` when no integration is given.
    #[serde(default)]
    pub scheme: Option<Scheme>,
    /// Step size for `map-params` / `check-conditions`.
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub map: Option<MapDirection>,
    #[serde(default)]
    pub constants: Option<Constants>,
    #[serde(default)]
    pub integration: Option<IntegrationConfig>,
    #[serde(default)]
    pub init: Option<InitConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub truncation: Option<TruncationConfig>,
    /// Burn-in for rate fits; defaults to the first 20% of the run.
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default)]
    pub figure: Option<Figure>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn missing(what: &str) -> Error {
    Error::InvalidConfig(format!("config is missing `{what}`"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn check_kind(&self, command: &str) -> Result<()> {
        match &self.kind {
            Some(kind) if kind != command => Err(Error::InvalidConfig(format!(
                "config is for `{kind}`, not `{command}`"
            ))),
            _ => Ok(()),
        }
    }

    pub fn objective(&self, seed_override: Option<u64>) -> Result<ObjectiveSpec> {
        self.objective
            .as_ref()
            .ok_or_else(|| missing("objective"))?
            .build(seed_override)
    }

    pub fn integration(&self) -> Result<IntegrationConfig> {
        let cfg = self.integration.clone().ok_or_else(|| missing("integration"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Scheme from `integration.method` or, failing that, `scheme`.
    pub fn scheme(&self) -> Result<Scheme> {
        if let Some(cfg) = &self.integration {
            if let Some(scheme) = cfg.method.scheme() {
                return Ok(scheme);
            }
        }
        self.scheme.ok_or_else(|| missing("scheme"))
    }

    /// Step size from `integration.s`, `s` or the named optimizer.
    pub fn step(&self) -> Result<f64> {
        self.integration
            .as_ref()
            .filter(|c| c.method != Method::RungeKutta4)
            .map(|c| c.s)
            .or(self.s)
            .or(self.named.map(|n| n.step_size()))
            .ok_or_else(|| missing("s"))
    }

    /// Flow parameters: `params` directly, or `named` through the scheme in
    /// use (whose step must then agree with the integration step).
    pub fn model_params(&self) -> Result<ModelParams> {
        match (&self.params, &self.named) {
            (Some(p), None) => Ok(*p),
            (None, Some(named)) => {
                if let Some(cfg) = &self.integration {
                    if cfg.method == Method::RungeKutta4 {
                        return Err(Error::InvalidConfig("named optimizers need a Euler integration".into()));
                    }
                    if cfg.s != named.step_size() {
                        return Err(Error::InvalidConfig(format!(
                            "integration step {} differs from the optimizer step {}",
                            cfg.s,
                            named.step_size()
                        )));
                    }
                }
                named_to_gm(named, self.scheme()?)
            }
            (Some(_), Some(_)) => Err(Error::InvalidConfig("give either `params` or `named`, not both".into())),
            (None, None) => Err(missing("params")),
        }
    }

    /// Initial state: `init` when given, otherwise `x₀ = x* + 𝟙`, `v₀ = 0`
    /// (for named optimizers, the velocity matching their first step).
    pub fn initial_state(&self, obj: &ObjectiveSpec) -> Result<PhaseState> {
        use crate::objectives::Objective;
        let dim = obj.dim();
        if let Some(init) = &self.init {
            let x = Vector::from_vec(init.x.clone());
            let v = init.v.clone().map_or_else(|| Vector::zeros(dim), Vector::from_vec);
            let state = PhaseState::new(x, v)?;
            if state.dim() != dim {
                return Err(Error::InvalidDimension(format!(
                    "init has dimension {}, objective has {dim}",
                    state.dim()
                )));
            }
            return Ok(state);
        }
        let x_star = obj.minimizer().ok_or(Error::MissingMinimizer)?;
        let x0 = x_star.add_scalar(1.0);
        match &self.named {
            Some(named) => named_initial_state(named, self.scheme()?, &x0, obj),
            None => Ok(PhaseState::at_rest(x0)),
        }
    }

    pub fn constants(&self, seed_override: Option<u64>) -> Result<Constants> {
        use crate::objectives::Objective;
        if let Some(c) = self.constants {
            return Ok(c);
        }
        let obj = self.objective(seed_override)?;
        Ok(Constants {
            mu: obj.mu(),
            l: obj.lipschitz(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"objective": {"family": "quadratic", "dim": 3, "mu": 0.1, "L": 1, "seed": 0, "extra": 1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn seed_is_required_somewhere() {
        let cfg = ExperimentConfig::from_json(r#"{"objective": {"family": "quadratic", "dim": 3, "mu": 0.1, "L": 1}}"#).unwrap();
        assert!(matches!(cfg.objective(None), Err(Error::InvalidConfig(_))));
        assert!(cfg.objective(Some(4)).is_ok());
    }

    #[test]
    fn named_step_must_match_integration() {
        let cfg = ExperimentConfig::from_json(
            r#"{"named": {"family": "NAG", "s": 0.25, "beta": 0.9},
                "integration": {"method": "SIE", "s": 0.1, "num_steps": 10}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.model_params(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn sweep_grid_expands_in_order() {
        let sweep = SweepConfig {
            params: vec![],
            m: vec![0.1, 0.2],
            n: vec![1.0],
            q: vec![0.3, 0.4],
        };
        let out = sweep.expand().unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!((out[1].m(), out[1].q()), (0.1, 0.4));
        assert_eq!(out[2].m(), 0.2);
    }
}
