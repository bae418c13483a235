//! The three-parameter momentum flow
//!
//! ```text
//! Ẋ = -m ∇f(X) - n V
//! V̇ =    ∇f(X) - q V
//! ```
//!
//! together with its Lyapunov energy and the continuous-time rate `γ₁`.
//! Gradient flow is `n = 0`; the low-resolution Nesterov ODE is
//! `(m, n, q) = (0, 1, 2√μ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{Objective, Vector};

/// Coefficients `(m, n, q)` of the flow, all nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    m: f64,
    n: f64,
    q: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    m: f64,
    n: f64,
    q: f64,
}

impl ModelParams {
    pub fn new(m: f64, n: f64, q: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("n", n), ("q", q)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConstants(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { m, n, q })
    }

    /// Gradient-flow weight.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Momentum coupling.
    pub fn n(&self) -> f64 {
        self.n
    }

    /// Friction.
    pub fn q(&self) -> f64 {
        self.q
    }
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Self::new(r.m, r.n, r.q)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        Self {
            m: p.m,
            n: p.n,
            q: p.q,
        }
    }
}

/// Position/velocity pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub x: Vector,
    pub v: Vector,
}

impl PhaseState {
    pub fn new(x: Vector, v: Vector) -> Result<Self> {
        let state = Self { x, v };
        state.validate(None)?;
        Ok(state)
    }

    /// Position `x` with zero velocity.
    pub fn at_rest(x: Vector) -> Self {
        let v = Vector::zeros(x.len());
        Self { x, v }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.v.iter()).all(|c| c.is_finite())
    }

    pub(crate) fn validate(&self, dim: Option<usize>) -> Result<()> {
        if self.x.len() != self.v.len() {
            return Err(Error::InvalidState(format!(
                "position has dimension {}, velocity {}",
                self.x.len(),
                self.v.len()
            )));
        }
        if let Some(d) = dim {
            if self.x.len() != d {
                return Err(Error::InvalidState(format!(
                    "state has dimension {}, objective {d}",
                    self.x.len()
                )));
            }
        }
        if !self.is_finite() {
            return Err(Error::InvalidState("state has non-finite entries".into()));
        }
        Ok(())
    }
}

pub(crate) fn ensure_finite(g: &Vector, what: &str) -> Result<()> {
    if g.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteInput(format!("{what} is not finite")))
    }
}

/// Time derivative `(Ẋ, V̇)` at `state`.
pub fn gm_ode_rhs(params: &ModelParams, state: &PhaseState, obj: &dyn Objective) -> Result<PhaseState> {
    if state.x.len() != obj.dim() || state.v.len() != obj.dim() {
        return Err(Error::InvalidState(format!(
            "state dimension {} does not match objective dimension {}",
            state.x.len(),
            obj.dim()
        )));
    }
    let g = obj.gradient(&state.x);
    ensure_finite(&g, "gradient")?;
    Ok(rhs_with_gradient(params, state, &g))
}

pub(crate) fn rhs_with_gradient(params: &ModelParams, state: &PhaseState, g: &Vector) -> PhaseState {
    let dx = g * (-params.m) - &state.v * params.n;
    let dv = g - &state.v * params.q;
    PhaseState { x: dx, v: dv }
}

/// `(qm + n)(f(x) - f*) + ¼‖q(x - x*) - n v‖² + (n(qm + n)/4)‖v‖²`.
pub fn continuous_energy(params: &ModelParams, state: &PhaseState, obj: &dyn Objective) -> Result<f64> {
    let (x_star, f_star) = match (obj.minimizer(), obj.min_value()) {
        (Some(x), Some(f)) => (x, f),
        _ => return Err(Error::MissingMinimizer),
    };
    let (m, n, q) = (params.m, params.n, params.q);
    let r2 = q * m + n;
    let gap = obj.value(&state.x) - f_star;
    let mix = (&state.x - x_star) * q - &state.v * n;
    Ok(r2 * gap + 0.25 * mix.norm_squared() + 0.25 * n * r2 * state.v.norm_squared())
}

/// Continuous-time rate `γ₁ = min(μ(n + qm)/(2q), q/2)`.
pub fn gamma1(params: &ModelParams, mu: f64) -> Result<f64> {
    if params.q <= 0.0 {
        return Err(Error::UndefinedRate("gamma1 needs q > 0".into()));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidConstants(format!("mu must be positive, got {mu}")));
    }
    let (m, n, q) = (params.m, params.n, params.q);
    Ok((mu * (n + q * m) / (2.0 * q)).min(q / 2.0))
}

/// Friction maximizing `γ₁` for fixed `(m, n)`: the positive root of
/// `μ(n + qm)/q = q`, i.e. `q = (μm + √(μ²m² + 4μn))/2`.
///
/// For `n = 0` every `q ≥ μm` attains the maximum `μm/2`; the root returned
/// is the smallest of them.
pub fn optimal_q(m: f64, n: f64, mu: f64) -> Result<f64> {
    if !(m.is_finite() && n.is_finite() && m >= 0.0 && n >= 0.0) {
        return Err(Error::InvalidConstants(format!(
            "m and n must be nonnegative, got m={m}, n={n}"
        )));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidConstants(format!("mu must be positive, got {mu}")));
    }
    if m == 0.0 && n == 0.0 {
        return Err(Error::Degenerate("m = n = 0 leaves the flow without gradient".into()));
    }
    let mm = mu * m;
    Ok(0.5 * (mm + (mm * mm + 4.0 * mu * n).sqrt()))
}
