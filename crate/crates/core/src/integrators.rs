//! Explicit Euler, semi-implicit Euler and classical RK4 steppers for the
//! momentum flow, the velocity-free one-line recurrences, and a trajectory
//! driver.
//!
//! Euler schemes advance by `√s` per step (so `s` plays the role of the
//! optimizer step size); RK4 advances by its own raw step `h`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ensure_finite, rhs_with_gradient, ModelParams, PhaseState};
use crate::objectives::{Objective, Vector};

/// First-order discretization of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "EE")]
    ExplicitEuler,
    #[serde(rename = "SIE")]
    SemiImplicitEuler,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::ExplicitEuler => "EE",
            Scheme::SemiImplicitEuler => "SIE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "EE")]
    ExplicitEuler,
    #[serde(rename = "SIE")]
    SemiImplicitEuler,
    #[serde(rename = "RK4")]
    RungeKutta4,
}

impl Method {
    pub fn scheme(self) -> Option<Scheme> {
        match self {
            Method::ExplicitEuler => Some(Scheme::ExplicitEuler),
            Method::SemiImplicitEuler => Some(Scheme::SemiImplicitEuler),
            Method::RungeKutta4 => None,
        }
    }
}

impl From<Scheme> for Method {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::ExplicitEuler => Method::ExplicitEuler,
            Scheme::SemiImplicitEuler => Method::SemiImplicitEuler,
        }
    }
}

fn default_rk4_step() -> f64 {
    1e-4
}

fn default_threshold() -> f64 {
    1e12
}

fn default_record_every() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    pub method: Method,
    /// Squared Euler step; Euler schemes advance by `√s`. Unused by RK4.
    #[serde(default)]
    pub s: f64,
    /// Raw RK4 step.
    #[serde(default = "default_rk4_step")]
    pub rk4_step: f64,
    pub num_steps: usize,
    #[serde(default = "default_threshold")]
    pub divergence_threshold: f64,
    /// Keep every `record_every`-th state (the last one is always kept).
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

impl IntegrationConfig {
    pub fn euler(scheme: Scheme, s: f64, num_steps: usize) -> Self {
        Self {
            method: scheme.into(),
            s,
            rk4_step: default_rk4_step(),
            num_steps,
            divergence_threshold: default_threshold(),
            record_every: 1,
        }
    }

    /// RK4 with raw step `h`; `s` is set to `h²` so the two step notions agree.
    pub fn rk4(h: f64, num_steps: usize) -> Self {
        Self {
            method: Method::RungeKutta4,
            s: h * h,
            rk4_step: h,
            num_steps,
            divergence_threshold: default_threshold(),
            record_every: 1,
        }
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.divergence_threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.method != Method::RungeKutta4 && !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::InvalidConfig(format!("s must be positive, got {}", self.s)));
        }
        if !(self.rk4_step.is_finite() && self.rk4_step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rk4_step must be positive, got {}",
                self.rk4_step
            )));
        }
        if self.num_steps == 0 {
            return Err(Error::InvalidConfig("num_steps must be at least 1".into()));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::InvalidConfig("divergence_threshold must be positive".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Physical time advanced by one step.
    pub fn time_step(&self) -> f64 {
        match self.method {
            Method::RungeKutta4 => self.rk4_step,
            _ => self.s.sqrt(),
        }
    }
}

fn check_step(s: f64) -> Result<f64> {
    if s.is_finite() && s > 0.0 {
        Ok(s.sqrt())
    } else {
        Err(Error::InvalidConfig(format!("step must be positive, got {s}")))
    }
}

fn divergence_guard(g: &Vector, what: &str) -> Result<()> {
    ensure_finite(g, what).map_err(|_| Error::Divergence(format!("{what} is not finite")))
}

/// Shared position update `x - m√s ∇f(x) - n√s v`.
fn drift(params: &ModelParams, h: f64, state: &PhaseState, g: &Vector) -> Vector {
    let mut x = state.x.clone();
    x.axpy(-params.m() * h, g, 1.0);
    x.axpy(-params.n() * h, &state.v, 1.0);
    x
}

/// One Euler step from `state`, given `grad = ∇f(state.x)`. Returns the new
/// state and `∇f` at the new position, so chained steps cost exactly one
/// gradient evaluation each for both schemes.
pub fn euler_step_cached(
    scheme: Scheme,
    params: &ModelParams,
    s: f64,
    state: &PhaseState,
    grad: &Vector,
    obj: &dyn Objective,
) -> Result<(PhaseState, Vector)> {
    let h = check_step(s)?;
    let x = drift(params, h, state, grad);
    let g_next = obj.gradient(&x);
    divergence_guard(&g_next, "gradient")?;
    let velocity_grad = match scheme {
        Scheme::ExplicitEuler => grad,
        Scheme::SemiImplicitEuler => &g_next,
    };
    let mut v = &state.v * (1.0 - params.q() * h);
    v.axpy(h, velocity_grad, 1.0);
    Ok((PhaseState { x, v }, g_next))
}

/// Explicit Euler: both updates use `∇f(x_k)`.
pub fn ee_step(params: &ModelParams, s: f64, state: &PhaseState, obj: &dyn Objective) -> Result<PhaseState> {
    let h = check_step(s)?;
    let g = obj.gradient(&state.x);
    divergence_guard(&g, "gradient")?;
    let x = drift(params, h, state, &g);
    let mut v = &state.v * (1.0 - params.q() * h);
    v.axpy(h, &g, 1.0);
    Ok(PhaseState { x, v })
}

/// Semi-implicit Euler: the velocity update uses `∇f(x_{k+1})`.
pub fn sie_step(params: &ModelParams, s: f64, state: &PhaseState, obj: &dyn Objective) -> Result<PhaseState> {
    let g = obj.gradient(&state.x);
    divergence_guard(&g, "gradient")?;
    euler_step_cached(Scheme::SemiImplicitEuler, params, s, state, &g, obj).map(|(st, _)| st)
}

/// Classical four-stage Runge–Kutta step of size `h`.
pub fn rk4_step(params: &ModelParams, h: f64, state: &PhaseState, obj: &dyn Objective) -> Result<PhaseState> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidConfig(format!("RK4 step must be positive, got {h}")));
    }
    let stage = |s: &PhaseState| -> Result<PhaseState> {
        let g = obj.gradient(&s.x);
        divergence_guard(&g, "RK4 stage gradient")?;
        Ok(rhs_with_gradient(params, s, &g))
    };
    let shifted = |d: &PhaseState, c: f64| PhaseState {
        x: &state.x + &d.x * c,
        v: &state.v + &d.v * c,
    };
    let k1 = stage(state)?;
    let k2 = stage(&shifted(&k1, 0.5 * h))?;
    let k3 = stage(&shifted(&k2, 0.5 * h))?;
    let k4 = stage(&shifted(&k3, h))?;
    let w = h / 6.0;
    let x = &state.x + (&k1.x + &k2.x * 2.0 + &k3.x * 2.0 + &k4.x) * w;
    let v = &state.v + (&k1.v + &k2.v * 2.0 + &k3.v * 2.0 + &k4.v) * w;
    let next = PhaseState { x, v };
    if !next.is_finite() {
        return Err(Error::Divergence("RK4 state is not finite".into()));
    }
    Ok(next)
}

/// Coefficients of `x_{k+1} = x_k + β̂(x_k - x_{k-1}) + c₀∇f(x_k) + c₁∇f(x_{k-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneLineCoefficients {
    pub momentum: f64,
    pub grad: f64,
    pub prev_grad: f64,
}

/// Eliminates the velocity from an Euler scheme (requires `n ≠ 0`).
pub fn one_line_coefficients(params: &ModelParams, s: f64, scheme: Scheme) -> Result<OneLineCoefficients> {
    let h = check_step(s)?;
    if params.n() == 0.0 {
        return Err(Error::DegenerateOneLine);
    }
    let (m, n, q) = (params.m(), params.n(), params.q());
    let r1 = 1.0 - q * h;
    Ok(match scheme {
        Scheme::ExplicitEuler => OneLineCoefficients {
            momentum: r1,
            grad: -m * h,
            prev_grad: r1 * m * h - n * s,
        },
        Scheme::SemiImplicitEuler => OneLineCoefficients {
            momentum: r1,
            grad: -(m * h + n * s),
            prev_grad: r1 * m * h,
        },
    })
}

/// Runs the one-line recurrence from its first two iterates, returning
/// `x_0, …, x_{num_steps}`.
pub fn one_line_iterate(
    coeffs: &OneLineCoefficients,
    x0: &Vector,
    x1: &Vector,
    obj: &dyn Objective,
    num_steps: usize,
) -> Result<Vec<Vector>> {
    let mut xs = vec![x0.clone(), x1.clone()];
    let mut g_prev = obj.gradient(x0);
    let mut g = obj.gradient(x1);
    for _ in 1..num_steps {
        let (xk, xkm1) = (&xs[xs.len() - 1], &xs[xs.len() - 2]);
        let mut next = xk.clone();
        next.axpy(coeffs.momentum, &(xk - xkm1), 1.0);
        next.axpy(coeffs.grad, &g, 1.0);
        next.axpy(coeffs.prev_grad, &g_prev, 1.0);
        divergence_guard(&next, "one-line iterate")?;
        g_prev = std::mem::replace(&mut g, obj.gradient(&next));
        xs.push(next);
    }
    xs.truncate(num_steps + 1);
    Ok(xs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationReason {
    /// `‖x‖` or `f(x) - f*` exceeded the divergence threshold.
    Threshold,
    /// A state or gradient became non-finite.
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Termination {
    /// Index of the step that triggered termination.
    pub step: usize,
    pub reason: TerminationReason,
}

/// Recorded run of one integrator.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    pub config: IntegrationConfig,
    pub states: Vec<PhaseState>,
    /// Step index of each recorded state.
    pub steps: Vec<usize>,
    /// `f(x_k) - f*` per recorded state; empty when `f*` is unknown.
    pub f_gap: Vec<f64>,
    pub grad_norm: Vec<f64>,
    pub termination: Option<Termination>,
}

impl Trajectory {
    pub fn terminated_early(&self) -> bool {
        self.termination.is_some()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.steps[i] as f64 * self.config.time_step()
    }

    pub fn positions(&self) -> impl Iterator<Item = &Vector> {
        self.states.iter().map(|s| &s.x)
    }

    pub fn last(&self) -> &PhaseState {
        self.states.last().expect("trajectory always holds its initial state")
    }

    /// Writes `k,t,f_gap,grad_norm,v_norm`, plus an `energy` column when
    /// `energy` is given (one value per recorded state).
    pub fn write_csv<W: Write>(&self, out: W, energy: Option<&[f64]>) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k", "t", "f_gap", "grad_norm", "v_norm"];
        if energy.is_some() {
            header.push("energy");
        }
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![
                self.steps[i].to_string(),
                fmt_f64(self.time(i)),
                self.f_gap.get(i).map_or_else(String::new, |v| fmt_f64(*v)),
                fmt_f64(self.grad_norm[i]),
                fmt_f64(self.states[i].v.norm()),
            ];
            if let Some(e) = energy {
                row.push(e.get(i).map_or_else(String::new, |v| fmt_f64(*v)));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip representation; deterministic across runs.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Applies the configured stepper `num_steps` times from `init`.
///
/// Stops early when the state or gradient stops being finite, or when `‖x‖`
/// or the function gap exceeds `divergence_threshold`.
pub fn integrate(
    params: &ModelParams,
    config: &IntegrationConfig,
    init: &PhaseState,
    obj: &dyn Objective,
) -> Result<Trajectory> {
    config.validate()?;
    init.validate(Some(obj.dim()))?;

    let mut traj = Trajectory {
        params: *params,
        config: config.clone(),
        states: Vec::with_capacity(config.num_steps / config.record_every + 2),
        steps: Vec::new(),
        f_gap: Vec::new(),
        grad_norm: Vec::new(),
        termination: None,
    };

    let mut state = init.clone();
    let mut grad = obj.gradient(&state.x);
    ensure_finite(&grad, "initial gradient")?;
    record(&mut traj, 0, &state, &grad, obj);

    for k in 1..=config.num_steps {
        let next = match config.method {
            Method::RungeKutta4 => rk4_step(params, config.rk4_step, &state, obj).and_then(|st| {
                let g = obj.gradient(&st.x);
                divergence_guard(&g, "gradient").map(|_| (st, g))
            }),
            Method::ExplicitEuler | Method::SemiImplicitEuler => {
                let scheme = config.method.scheme().expect("euler method");
                euler_step_cached(scheme, params, config.s, &state, &grad, obj)
            }
        };
        let (next_state, next_grad) = match next {
            Ok(pair) if pair.0.is_finite() => pair,
            Ok(_) | Err(Error::Divergence(_)) => {
                traj.termination = Some(Termination {
                    step: k,
                    reason: TerminationReason::NonFinite,
                });
                break;
            }
            Err(e) => return Err(e),
        };
        state = next_state;
        grad = next_grad;

        let gap = obj.gap(&state.x);
        let exploded = state.x.norm() > config.divergence_threshold
            || gap.is_some_and(|g| !g.is_finite() || g > config.divergence_threshold);
        if exploded || k % config.record_every == 0 || k == config.num_steps {
            record(&mut traj, k, &state, &grad, obj);
        }
        if exploded {
            traj.termination = Some(Termination {
                step: k,
                reason: TerminationReason::Threshold,
            });
            break;
        }
    }
    Ok(traj)
}

fn record(traj: &mut Trajectory, k: usize, state: &PhaseState, grad: &Vector, obj: &dyn Objective) {
    traj.steps.push(k);
    traj.states.push(state.clone());
    traj.grad_norm.push(grad.norm());
    if let Some(gap) = obj.gap(&state.x) {
        traj.f_gap.push(gap);
    }
}
