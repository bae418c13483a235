//! Parameter maps between the two Euler discretizations and the classical
//! momentum methods.
//!
//! Semi-implicit Euler on `(m, n, q)` produces the same iterates as explicit
//! Euler on `(m + √s n, (1 - q√s) n, q)`. The two-variable states are related
//! by `v_SIE = √s ∇f(x) + (1 - q√s) v_EE`, which is how trajectories are moved
//! from one scheme to the other.
//!
//! Heavy ball, Nesterov and quasi-hyperbolic momentum are recovered as
//! particular parameter choices; literal implementations of those methods
//! live here too, written against their textbook recurrences so they can
//! serve as independent cross-checks of the integrators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{Method, Scheme, Trajectory};
use crate::model::{ModelParams, PhaseState};
use crate::objectives::{Objective, Vector};

fn sqrt_step(s: f64) -> Result<f64> {
    if s.is_finite() && s > 0.0 {
        Ok(s.sqrt())
    } else {
        Err(Error::InvalidConfig(format!("step must be positive, got {s}")))
    }
}

fn damping_factor(q: f64, h: f64) -> Result<f64> {
    let r1 = 1.0 - q * h;
    if r1 > 0.0 {
        Ok(r1)
    } else {
        Err(Error::InadmissibleMap(format!("need q√s < 1, got q√s = {}", q * h)))
    }
}

/// SIE parameters to the EE parameters generating the same iterates.
pub fn sie_to_ee(params: &ModelParams, s: f64) -> Result<ModelParams> {
    let h = sqrt_step(s)?;
    if params.n() == 0.0 {
        return Ok(*params);
    }
    let r1 = damping_factor(params.q(), h)?;
    ModelParams::new(params.m() + h * params.n(), r1 * params.n(), params.q())
}

/// Inverse of [`sie_to_ee`].
pub fn ee_to_sie(params: &ModelParams, s: f64) -> Result<ModelParams> {
    let h = sqrt_step(s)?;
    if params.n() == 0.0 {
        return Ok(*params);
    }
    let r1 = damping_factor(params.q(), h)?;
    let n = params.n() / r1;
    let m = params.m() - h * n;
    if m < 0.0 {
        // Relative slack for the m = 0 boundary (heavy ball).
        if m > -1e-14 * params.m().max(h * n) {
            return ModelParams::new(0.0, n, params.q());
        }
        return Err(Error::InadmissibleMap(format!(
            "EE parameters map to negative m = {m}"
        )));
    }
    ModelParams::new(m, n, params.q())
}

/// SIE velocity paired with the EE state `(x, v_ee)`, given `grad = ∇f(x)`.
pub fn ee_to_sie_velocity(q: f64, s: f64, v_ee: &Vector, grad: &Vector) -> Result<Vector> {
    let h = sqrt_step(s)?;
    let r1 = damping_factor(q, h)?;
    Ok(grad * h + v_ee * r1)
}

/// EE velocity paired with the SIE state `(x, v_sie)`, given `grad = ∇f(x)`.
pub fn sie_to_ee_velocity(q: f64, s: f64, v_sie: &Vector, grad: &Vector) -> Result<Vector> {
    let h = sqrt_step(s)?;
    let r1 = damping_factor(q, h)?;
    Ok((v_sie - grad * h) / r1)
}

/// Maps an SIE initial state to the EE initial state of the equivalent run.
pub fn sie_to_ee_state(params: &ModelParams, s: f64, state: &PhaseState, obj: &dyn Objective) -> Result<PhaseState> {
    let g = obj.gradient(&state.x);
    Ok(PhaseState {
        x: state.x.clone(),
        v: sie_to_ee_velocity(params.q(), s, &state.v, &g)?,
    })
}

/// Maps an EE initial state to the SIE initial state of the equivalent run.
pub fn ee_to_sie_state(params: &ModelParams, s: f64, state: &PhaseState, obj: &dyn Objective) -> Result<PhaseState> {
    let g = obj.gradient(&state.x);
    Ok(PhaseState {
        x: state.x.clone(),
        v: ee_to_sie_velocity(params.q(), s, &state.v, &g)?,
    })
}

/// Re-expresses an explicit-Euler trajectory as the semi-implicit run it is
/// equivalent to: parameters go through [`ee_to_sie`], velocities through
/// [`ee_to_sie_velocity`]; positions are untouched.
pub fn reinterpret_ee_as_sie(traj: &Trajectory, obj: &dyn Objective) -> Result<Trajectory> {
    if traj.config.method != Method::ExplicitEuler {
        return Err(Error::InvalidConfig("trajectory was not produced by EE".into()));
    }
    let s = traj.config.s;
    let params = ee_to_sie(&traj.params, s)?;
    let states = traj
        .states
        .iter()
        .map(|st| ee_to_sie_state(&traj.params, s, st, obj))
        .collect::<Result<Vec<_>>>()?;
    let mut config = traj.config.clone();
    config.method = Method::SemiImplicitEuler;
    Ok(Trajectory {
        params,
        config,
        states,
        ..traj.clone()
    })
}

/// Classical momentum methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum NamedOptimizerConfig {
    /// `x_{k+1} = x_k + β(x_k - x_{k-1}) - s∇f(x_k)`
    #[serde(rename = "HB")]
    HeavyBall { s: f64, beta: f64 },
    /// Heavy ball plus the gradient correction `-βs(∇f(x_k) - ∇f(x_{k-1}))`.
    #[serde(rename = "NAG")]
    Nesterov { s: f64, beta: f64 },
    /// `g_{k+1} = b g_k + ∇f(x_k)`, `x_{k+1} = x_k - s((1-a)∇f(x_k) + a g_{k+1})`.
    #[serde(rename = "QHM")]
    QuasiHyperbolic { s: f64, a: f64, b: f64 },
}

impl NamedOptimizerConfig {
    pub fn step_size(&self) -> f64 {
        match *self {
            Self::HeavyBall { s, .. } | Self::Nesterov { s, .. } | Self::QuasiHyperbolic { s, .. } => s,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::HeavyBall { .. } => "HB",
            Self::Nesterov { .. } => "NAG",
            Self::QuasiHyperbolic { .. } => "QHM",
        }
    }

    /// Checks ranges: `s > 0`, `β ∈ [0, 1)`, `a ∈ [0, 1]`, `b ∈ [0, 1)`.
    /// Unit momentum is reported as degenerate (it zeroes the friction).
    pub fn validate(&self) -> Result<()> {
        let s = self.step_size();
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidConfig(format!("step size must be positive, got {s}")));
        }
        let decay = match *self {
            Self::HeavyBall { beta, .. } | Self::Nesterov { beta, .. } => beta,
            Self::QuasiHyperbolic { a, b, .. } => {
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::InvalidConfig(format!("QHM a must lie in [0, 1], got {a}")));
                }
                b
            }
        };
        if decay == 1.0 {
            return Err(Error::Degenerate("momentum 1 gives zero friction".into()));
        }
        if !(0.0..1.0).contains(&decay) {
            return Err(Error::InvalidConfig(format!("momentum must lie in [0, 1), got {decay}")));
        }
        Ok(())
    }
}

/// Flow parameters whose `scheme` discretization reproduces `config`.
pub fn named_to_gm(config: &NamedOptimizerConfig, scheme: Scheme) -> Result<ModelParams> {
    config.validate()?;
    let h = config.step_size().sqrt();
    match (*config, scheme) {
        (NamedOptimizerConfig::HeavyBall { beta, .. }, Scheme::SemiImplicitEuler) => {
            ModelParams::new(0.0, 1.0, (1.0 - beta) / h)
        }
        (NamedOptimizerConfig::HeavyBall { beta, .. }, Scheme::ExplicitEuler) => {
            ModelParams::new(h, beta, (1.0 - beta) / h)
        }
        (NamedOptimizerConfig::Nesterov { beta, .. }, Scheme::SemiImplicitEuler) => {
            ModelParams::new(h, beta, (1.0 - beta) / h)
        }
        (NamedOptimizerConfig::Nesterov { beta, .. }, Scheme::ExplicitEuler) => {
            ModelParams::new((1.0 + beta) * h, beta * beta, (1.0 - beta) / h)
        }
        (NamedOptimizerConfig::QuasiHyperbolic { a, b, .. }, Scheme::SemiImplicitEuler) => {
            ModelParams::new((1.0 - a) * h, a, (1.0 - b) / h)
        }
        (NamedOptimizerConfig::QuasiHyperbolic { s, .. }, Scheme::ExplicitEuler) => {
            sie_to_ee(&named_to_gm(config, Scheme::SemiImplicitEuler)?, s)
        }
    }
}

/// History of a heavy-ball or Nesterov run: `x_k`, `x_{k-1}` and `∇f(x_{k-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumHistory {
    pub x: Vector,
    pub x_prev: Option<Vector>,
    pub grad_prev: Option<Vector>,
}

impl MomentumHistory {
    /// Starting history with `x_{-1} = x_0`.
    pub fn start(x0: &Vector, obj: &dyn Objective) -> Self {
        Self {
            x: x0.clone(),
            x_prev: Some(x0.clone()),
            grad_prev: Some(obj.gradient(x0)),
        }
    }
}

/// History of a QHM run: `x_k` and the buffer `g_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QhmHistory {
    pub x: Vector,
    pub g: Option<Vector>,
}

impl QhmHistory {
    /// Starting history with `g_0 = 0`.
    pub fn start(x0: &Vector) -> Self {
        Self {
            x: x0.clone(),
            g: Some(Vector::zeros(x0.len())),
        }
    }
}

fn require<'a>(v: &'a Option<Vector>, dim: usize, what: &str) -> Result<&'a Vector> {
    match v {
        Some(v) if v.len() == dim => Ok(v),
        Some(v) => Err(Error::InvalidHistory(format!(
            "{what} has dimension {}, expected {dim}",
            v.len()
        ))),
        None => Err(Error::InvalidHistory(format!("{what} is missing"))),
    }
}

pub fn hb_step(config: &NamedOptimizerConfig, history: &MomentumHistory, obj: &dyn Objective) -> Result<MomentumHistory> {
    let NamedOptimizerConfig::HeavyBall { s, beta } = *config else {
        return Err(Error::InvalidConfig(format!("hb_step given a {} config", config.family())));
    };
    let x = &history.x;
    let x_prev = require(&history.x_prev, x.len(), "x_{k-1}")?;
    let g = obj.gradient(x);
    let next = x + (x - x_prev) * beta - &g * s;
    Ok(MomentumHistory {
        x: next,
        x_prev: Some(x.clone()),
        grad_prev: Some(g),
    })
}

pub fn nag_step(config: &NamedOptimizerConfig, history: &MomentumHistory, obj: &dyn Objective) -> Result<MomentumHistory> {
    let NamedOptimizerConfig::Nesterov { s, beta } = *config else {
        return Err(Error::InvalidConfig(format!("nag_step given a {} config", config.family())));
    };
    let x = &history.x;
    let x_prev = require(&history.x_prev, x.len(), "x_{k-1}")?;
    let g_prev = require(&history.grad_prev, x.len(), "∇f(x_{k-1})")?;
    let g = obj.gradient(x);
    let next = x + (x - x_prev) * beta - &g * s - (&g - g_prev) * (beta * s);
    Ok(MomentumHistory {
        x: next,
        x_prev: Some(x.clone()),
        grad_prev: Some(g),
    })
}

pub fn qhm_step(config: &NamedOptimizerConfig, history: &QhmHistory, obj: &dyn Objective) -> Result<QhmHistory> {
    let NamedOptimizerConfig::QuasiHyperbolic { s, a, b } = *config else {
        return Err(Error::InvalidConfig(format!("qhm_step given a {} config", config.family())));
    };
    let x = &history.x;
    let g_buf = require(&history.g, x.len(), "g_k")?;
    let grad = obj.gradient(x);
    let g_next = g_buf * b + &grad;
    let next = x - (&grad * (1.0 - a) + &g_next * a) * s;
    Ok(QhmHistory {
        x: next,
        g: Some(g_next),
    })
}

/// Iterates `x_0, …, x_{num_steps}` of the literal method from the starting
/// history convention (`x_{-1} = x_0`, `g_0 = 0`).
pub fn run_named(config: &NamedOptimizerConfig, x0: &Vector, obj: &dyn Objective, num_steps: usize) -> Result<Vec<Vector>> {
    config.validate()?;
    let mut xs = Vec::with_capacity(num_steps + 1);
    xs.push(x0.clone());
    match config {
        NamedOptimizerConfig::QuasiHyperbolic { .. } => {
            let mut h = QhmHistory::start(x0);
            for _ in 0..num_steps {
                h = qhm_step(config, &h, obj)?;
                xs.push(h.x.clone());
            }
        }
        NamedOptimizerConfig::HeavyBall { .. } | NamedOptimizerConfig::Nesterov { .. } => {
            let mut h = MomentumHistory::start(x0, obj);
            for _ in 0..num_steps {
                h = match config {
                    NamedOptimizerConfig::HeavyBall { .. } => hb_step(config, &h, obj)?,
                    _ => nag_step(config, &h, obj)?,
                };
                xs.push(h.x.clone());
            }
        }
    }
    Ok(xs)
}

/// Velocity `v_0` for which the Euler position update from `(x0, v_0)` lands
/// on `x1`: `v_0 = (x0 - x1 - m√s ∇f(x0)) / (n√s)`.
pub fn velocity_for_first_step(params: &ModelParams, s: f64, x0: &Vector, x1: &Vector, grad0: &Vector) -> Result<Vector> {
    let h = sqrt_step(s)?;
    if params.n() == 0.0 {
        return Err(Error::Degenerate("velocity does not enter the update when n = 0".into()));
    }
    Ok((x0 - x1 - grad0 * (params.m() * h)) / (params.n() * h))
}

/// Initial flow state whose `scheme` iteration reproduces the named method
/// started from `x0` with the standard history convention.
pub fn named_initial_state(config: &NamedOptimizerConfig, scheme: Scheme, x0: &Vector, obj: &dyn Objective) -> Result<PhaseState> {
    let params = named_to_gm(config, scheme)?;
    if params.n() == 0.0 {
        return Ok(PhaseState::at_rest(x0.clone()));
    }
    let x1 = run_named(config, x0, obj, 1)?.pop().expect("two iterates");
    let v0 = velocity_for_first_step(&params, config.step_size(), x0, &x1, &obj.gradient(x0))?;
    Ok(PhaseState { x: x0.clone(), v: v0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{integrate, one_line_coefficients, IntegrationConfig};
    use crate::objectives::make_quadratic;
    use approx::assert_relative_eq;

    fn p(m: f64, n: f64, q: f64) -> ModelParams {
        ModelParams::new(m, n, q).unwrap()
    }

    fn assert_params_eq(a: &ModelParams, b: &ModelParams, tol: f64) {
        assert_relative_eq!(a.m(), b.m(), max_relative = tol, epsilon = tol);
        assert_relative_eq!(a.n(), b.n(), max_relative = tol, epsilon = tol);
        assert_relative_eq!(a.q(), b.q(), max_relative = tol, epsilon = tol);
    }

    #[test]
    fn nesterov_sie_maps_to_table_ee_row() {
        let (s, beta) = (0.01_f64, 0.8);
        let h = s.sqrt();
        let ee = sie_to_ee(&p(h, beta, (1.0 - beta) / h), s).unwrap();
        assert_params_eq(&ee, &p(0.18, 0.64, 2.0), 1e-14);
        assert_relative_eq!(ee.m(), (1.0 + beta) * h, epsilon = 1e-15);
        assert_relative_eq!(ee.n(), beta * beta, epsilon = 1e-15);
    }

    #[test]
    fn heavy_ball_sie_maps_to_table_ee_row() {
        let (s, beta) = (0.09_f64, 0.6);
        let h = s.sqrt();
        let ee = sie_to_ee(&p(0.0, 1.0, (1.0 - beta) / h), s).unwrap();
        assert_params_eq(&ee, &p(h, beta, (1.0 - beta) / h), 1e-14);
    }

    #[test]
    fn gradient_descent_is_a_fixed_point_of_the_map() {
        let gd = p(0.7, 0.0, 3.0);
        assert_eq!(sie_to_ee(&gd, 0.5).unwrap(), gd);
        assert_eq!(ee_to_sie(&gd, 0.5).unwrap(), gd);
    }

    #[test]
    fn inverse_map_examples() {
        let sie = ee_to_sie(&p(0.18, 0.64, 2.0), 0.01).unwrap();
        assert_params_eq(&sie, &p(0.1, 0.8, 2.0), 1e-14);

        let (s, n, q) = (0.04_f64, 0.5, 1.5);
        let h = s.sqrt();
        let boundary = ee_to_sie(&p(h * n / (1.0 - q * h), n, q), s).unwrap();
        assert_eq!(boundary.m(), 0.0);

        assert!(matches!(ee_to_sie(&p(0.0, 1.0, 1.0), 0.04), Err(Error::InadmissibleMap(_))));
        assert!(matches!(sie_to_ee(&p(0.1, 1.0, 10.0), 0.04), Err(Error::InadmissibleMap(_))));
    }

    #[test]
    fn maps_compose_to_identity() {
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut unit = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let s = 0.001 + unit();
            let h = s.sqrt();
            let params = p(unit() * 2.0, 0.01 + unit() * 3.0, unit() * 0.99 / h);
            let back = ee_to_sie(&sie_to_ee(&params, s).unwrap(), s).unwrap();
            assert_params_eq(&back, &params, 1e-14);
        }
    }

    #[test]
    fn one_line_coefficients_agree_under_the_map() {
        let s = 0.05;
        let sie = p(0.3, 1.2, 2.0);
        let ee = sie_to_ee(&sie, s).unwrap();
        let a = one_line_coefficients(&sie, s, Scheme::SemiImplicitEuler).unwrap();
        let b = one_line_coefficients(&ee, s, Scheme::ExplicitEuler).unwrap();
        assert_relative_eq!(a.momentum, b.momentum, epsilon = 1e-15);
        assert_relative_eq!(a.grad, b.grad, epsilon = 1e-15);
        assert_relative_eq!(a.prev_grad, b.prev_grad, epsilon = 1e-15);
    }

    #[test]
    fn table_rows() {
        let (s, beta) = (0.25_f64, 0.7);
        let h = s.sqrt();
        let q = (1.0 - beta) / h;
        let hb = NamedOptimizerConfig::HeavyBall { s, beta };
        let nag = NamedOptimizerConfig::Nesterov { s, beta };
        assert_params_eq(&named_to_gm(&hb, Scheme::SemiImplicitEuler).unwrap(), &p(0.0, 1.0, q), 1e-15);
        assert_params_eq(&named_to_gm(&hb, Scheme::ExplicitEuler).unwrap(), &p(h, beta, q), 1e-15);
        assert_params_eq(&named_to_gm(&nag, Scheme::SemiImplicitEuler).unwrap(), &p(h, beta, q), 1e-15);
        let nag_ee = named_to_gm(&nag, Scheme::ExplicitEuler).unwrap();
        assert_params_eq(&nag_ee, &p((1.0 + beta) * h, beta * beta, q), 1e-15);
        let mapped = sie_to_ee(&named_to_gm(&nag, Scheme::SemiImplicitEuler).unwrap(), s).unwrap();
        assert_params_eq(&mapped, &nag_ee, 1e-14);
    }

    #[test]
    fn qhm_with_full_momentum_weight_is_heavy_ball() {
        let (s, beta) = (0.3, 0.85);
        let qhm = named_to_gm(&NamedOptimizerConfig::QuasiHyperbolic { s, a: 1.0, b: beta }, Scheme::SemiImplicitEuler).unwrap();
        let hb = named_to_gm(&NamedOptimizerConfig::HeavyBall { s, beta }, Scheme::SemiImplicitEuler).unwrap();
        assert_eq!(qhm, hb);
    }

    #[test]
    fn nesterov_friction_at_accelerated_momentum() {
        let (mu, s) = (0.01_f64, 0.25_f64);
        let beta = 1.0 - 2.0 * (mu * s).sqrt();
        let params = named_to_gm(&NamedOptimizerConfig::Nesterov { s, beta }, Scheme::SemiImplicitEuler).unwrap();
        assert_relative_eq!(params.q(), 2.0 * mu.sqrt(), epsilon = 1e-14);
        let c = one_line_coefficients(&params, s, Scheme::SemiImplicitEuler).unwrap();
        assert_relative_eq!(c.prev_grad, beta * s, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_and_invalid_configs() {
        let hb = NamedOptimizerConfig::HeavyBall { s: 0.1, beta: 1.0 };
        assert!(matches!(named_to_gm(&hb, Scheme::SemiImplicitEuler), Err(Error::Degenerate(_))));
        let qhm = NamedOptimizerConfig::QuasiHyperbolic { s: 0.1, a: 0.5, b: 1.0 };
        assert!(matches!(named_to_gm(&qhm, Scheme::SemiImplicitEuler), Err(Error::Degenerate(_))));
        let bad = NamedOptimizerConfig::Nesterov { s: -1.0, beta: 0.5 };
        assert!(named_to_gm(&bad, Scheme::ExplicitEuler).is_err());
    }

    #[test]
    fn heavy_ball_without_momentum_is_gradient_descent() {
        let f = make_quadratic(3, 0.1, 1.0, 2).unwrap();
        let cfg = NamedOptimizerConfig::HeavyBall { s: 0.5, beta: 0.0 };
        let h = MomentumHistory {
            x: Vector::from_element(3, 1.0),
            x_prev: Some(Vector::from_element(3, -4.0)),
            grad_prev: None,
        };
        let next = hb_step(&cfg, &h, &f).unwrap();
        let gd = &h.x - f.gradient(&h.x) * 0.5;
        assert_eq!(next.x, gd);
    }

    #[test]
    fn qhm_one_line_form_has_zero_previous_gradient_weight_when_a_is_one() {
        // x_{k+1} = x_k + b(x_k - x_{k-1}) - s∇f(x_k) + sb(1-a)∇f(x_{k-1})
        let f = make_quadratic(4, 0.05, 1.0, 8).unwrap();
        let (s, a, b) = (0.2, 1.0, 0.8);
        let xs = run_named(&NamedOptimizerConfig::QuasiHyperbolic { s, a, b }, &Vector::from_element(4, 1.0), &f, 30).unwrap();
        for k in 1..30 {
            let predicted = &xs[k] + (&xs[k] - &xs[k - 1]) * b - f.gradient(&xs[k]) * s
                + f.gradient(&xs[k - 1]) * (s * b * (1.0 - a));
            assert!((predicted - &xs[k + 1]).norm() < 1e-13);
        }
    }

    #[test]
    fn missing_history_is_rejected() {
        let f = make_quadratic(2, 0.1, 1.0, 0).unwrap();
        let cfg = NamedOptimizerConfig::Nesterov { s: 0.1, beta: 0.5 };
        let h = MomentumHistory {
            x: Vector::zeros(2),
            x_prev: Some(Vector::zeros(2)),
            grad_prev: None,
        };
        assert!(matches!(nag_step(&cfg, &h, &f), Err(Error::InvalidHistory(_))));
        let q = QhmHistory { x: Vector::zeros(2), g: None };
        let qcfg = NamedOptimizerConfig::QuasiHyperbolic { s: 0.1, a: 0.5, b: 0.5 };
        assert!(matches!(qhm_step(&qcfg, &q, &f), Err(Error::InvalidHistory(_))));
        assert!(matches!(hb_step(&qcfg, &h, &f), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn mapped_states_give_identical_iterates() {
        let f = make_quadratic(6, 0.01, 1.0, 12).unwrap();
        let s = 0.09;
        let sie = p(0.4, 0.9, 1.2);
        let ee = sie_to_ee(&sie, s).unwrap();
        let init = PhaseState::at_rest(Vector::from_element(6, 0.5));
        let init_ee = sie_to_ee_state(&sie, s, &init, &f).unwrap();
        let a = integrate(&sie, &IntegrationConfig::euler(Scheme::SemiImplicitEuler, s, 200), &init, &f).unwrap();
        let b = integrate(&ee, &IntegrationConfig::euler(Scheme::ExplicitEuler, s, 200), &init_ee, &f).unwrap();
        for (xa, xb) in a.positions().zip(b.positions()) {
            assert!((xa - xb).norm() <= 1e-12 * xa.norm());
        }
        let back = reinterpret_ee_as_sie(&b, &f).unwrap();
        assert_params_eq(&back.params, &sie, 1e-14);
        for (sa, sb) in a.states.iter().zip(&back.states) {
            assert!((&sa.v - &sb.v).norm() <= 1e-10 * (1.0 + sa.v.norm()));
        }
    }

    #[test]
    fn named_json_shape() {
        let cfg: NamedOptimizerConfig = serde_json::from_str(r#"{"family":"QHM","s":0.25,"a":0.5,"b":0.9}"#).unwrap();
        assert_eq!(cfg, NamedOptimizerConfig::QuasiHyperbolic { s: 0.25, a: 0.5, b: 0.9 });
        assert!(serde_json::from_str::<NamedOptimizerConfig>(r#"{"family":"HB","s":0.1,"beta":0.5,"x":1}"#).is_err());
    }
}
