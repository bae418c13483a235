//! Step-size conditions, discrete convergence rates and per-step energy
//! certification for the Euler discretizations.
//!
//! Under the SIE conditions the energy
//!
//! ```text
//! E(k) = r₁r₂(f(x_k) - f*) - (r₁r₂m√s/2)‖∇f(x_k)‖² + (n r₁² r₂/4)‖v_k‖²
//!        + ¼‖q(x_{k+1} - x*) - n r₁ v_k‖²,   r₁ = 1 - q√s,  r₂ = n + mq
//! ```
//!
//! contracts by `1/(1 + γ₂√s)` every step. EE runs are certified through
//! their SIE image.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrators::{Method, Trajectory};
use crate::mappings::reinterpret_ee_as_sie;
use crate::model::ModelParams;
use crate::objectives::{Objective, Vector};

/// Relative slack on the upper-bound inequalities, so that boundary
/// configurations (e.g. `ns = m√s` exactly) are not rejected by rounding.
const BOUND_SLACK: f64 = 1e-12;

/// Outcome of a step-size condition check; `violations` names each failed
/// inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl ConditionReport {
    fn from_checks(checks: &[(bool, &str)]) -> Self {
        let violations: Vec<String> = checks
            .iter()
            .filter(|(pass, _)| !pass)
            .map(|(_, name)| name.to_string())
            .collect();
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + BOUND_SLACK * b.abs()
}

fn constants_ok(s: f64, l: f64) -> Vec<(bool, &'static str)> {
    vec![
        (s.is_finite() && s > 0.0, "s > 0"),
        (l.is_finite() && l > 0.0, "L > 0"),
    ]
}

/// `0 < m√s ≤ 1/(2L)`, `0 < ns ≤ m√s`, `0 < q√s ≤ 1/2`.
pub fn sie_conditions_ok(params: &ModelParams, s: f64, l: f64) -> ConditionReport {
    let h = s.sqrt();
    let (ms, ns, qs) = (params.m() * h, params.n() * s, params.q() * h);
    let mut checks = constants_ok(s, l);
    checks.extend([
        (ms > 0.0, "0 < m√s"),
        (le(ms, 0.5 / l), "m√s ≤ 1/(2L)"),
        (ns > 0.0, "0 < ns"),
        (le(ns, ms), "ns ≤ m√s"),
        (qs > 0.0, "0 < q√s"),
        (le(qs, 0.5), "q√s ≤ 1/2"),
    ]);
    ConditionReport::from_checks(&checks)
}

/// `0 < m√s - ns/(1-q√s) ≤ 1/(2L)`, `0 < ns ≤ (1-q√s)m√s/2`, `0 < q√s ≤ 1/2`.
pub fn ee_conditions_ok(params: &ModelParams, s: f64, l: f64) -> Result<ConditionReport> {
    let h = s.sqrt();
    let (ms, ns, qs) = (params.m() * h, params.n() * s, params.q() * h);
    let r1 = 1.0 - qs;
    if r1 <= 0.0 {
        return Err(Error::InadmissibleMap(format!("need q√s < 1, got {qs}")));
    }
    let eff = ms - ns / r1;
    let mut checks = constants_ok(s, l);
    checks.extend([
        (eff > 0.0, "0 < m√s - ns/(1-q√s)"),
        (le(eff, 0.5 / l), "m√s - ns/(1-q√s) ≤ 1/(2L)"),
        (ns > 0.0, "0 < ns"),
        (le(ns, 0.5 * r1 * ms), "ns ≤ (1-q√s)m√s/2"),
        (qs > 0.0, "0 < q√s"),
        (le(qs, 0.5), "q√s ≤ 1/2"),
    ]);
    Ok(ConditionReport::from_checks(&checks))
}

fn rate_inputs(params: &ModelParams, mu: f64, l: f64) -> Result<(f64, f64)> {
    if params.n() <= 0.0 || params.q() <= 0.0 {
        return Err(Error::UndefinedRate("discrete rate needs n > 0 and q > 0".into()));
    }
    if !(mu.is_finite() && l.is_finite() && mu > 0.0 && l >= mu) {
        return Err(Error::InvalidConstants(format!("need 0 < μ ≤ L, got μ = {mu}, L = {l}")));
    }
    let (n, q) = (params.n(), params.q());
    Ok((n * mu / q, q / (1.0 + q * q / (n * l))))
}

/// `γ₂ = (1/5) min(nμ/q, q/(1 + q²/(nL)))`.
pub fn gamma2(params: &ModelParams, mu: f64, l: f64) -> Result<f64> {
    let (a, b) = rate_inputs(params, mu, l)?;
    Ok(a.min(b) / 5.0)
}

/// `γ₃ = (1/5) min(nμ/(q(1 - μ√s)), q/(1 + q²/(nL)))`.
pub fn gamma3(params: &ModelParams, mu: f64, l: f64, s: f64) -> Result<f64> {
    let (a, b) = rate_inputs(params, mu, l)?;
    let shrink = 1.0 - mu * s.sqrt();
    if !(s > 0.0 && shrink > 0.0) {
        return Err(Error::UndefinedRate(format!("gamma3 needs 0 < μ√s < 1, got μ√s = {}", mu * s.sqrt())));
    }
    Ok((a / shrink).min(b) / 5.0)
}

/// Discrete energy `E(k)` of an SIE run from `(x_k, v_k)` and `x_{k+1}`.
pub fn discrete_energy_sie(
    params: &ModelParams,
    s: f64,
    obj: &dyn Objective,
    x_k: &Vector,
    x_next: &Vector,
    v_k: &Vector,
) -> Result<f64> {
    let x_star = obj.minimizer().ok_or(Error::MissingMinimizer)?;
    let f_star = obj.min_value().ok_or(Error::MissingMinimizer)?;
    let dim = obj.dim();
    if x_k.len() != dim || x_next.len() != dim || v_k.len() != dim {
        return Err(Error::InvalidDimension(format!("energy expects vectors of dimension {dim}")));
    }
    let (m, n, q) = (params.m(), params.n(), params.q());
    let h = s.sqrt();
    let r1 = 1.0 - q * h;
    let r2 = n + m * q;
    let g = obj.gradient(x_k);
    let gap = obj.value(x_k) - f_star;
    let mix = (x_next - x_star) * q - v_k * (n * r1);
    Ok(r1 * r2 * gap - 0.5 * r1 * r2 * m * h * g.norm_squared()
        + 0.25 * n * r1 * r1 * r2 * v_k.norm_squared()
        + 0.25 * mix.norm_squared())
}

/// Result of checking `E(k+1) ≤ E(k)/(1 + γ√s)` along a run.
#[derive(Debug, Clone, Serialize)]
pub struct RateCertificate {
    /// `γ₂` for SIE runs, `γ₃` (of the EE parameters) for EE runs.
    pub gamma: f64,
    pub per_step_bound: f64,
    /// `(k, E(k+1)/E(k))` for every failed step.
    pub violations: Vec<(usize, f64)>,
    /// `E(0), E(1), …` of the SIE run (the image run for EE input).
    pub energies: Vec<f64>,
    /// SIE parameters the energy was evaluated with.
    pub sie_params: ModelParams,
    pub s: f64,
    /// `r₁r₂(1 - Lm√s)`: `f - f* ≤ E/scale`.
    pub gap_scale: f64,
}

impl RateCertificate {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Function-value bound implied by the certificate after `k` steps.
    pub fn f_gap_bound(&self, k: usize) -> f64 {
        self.energies[0] * self.per_step_bound.powi(k as i32) / self.gap_scale
    }

    /// Steps `k` at which `f_gap[k]` exceeds [`Self::f_gap_bound`] (with the
    /// same `1e-12·E(0)` slack as the decay check).
    pub fn f_gap_bound_violations(&self, f_gap: &[f64]) -> Vec<usize> {
        let slack = 1e-12 * self.energies[0] / self.gap_scale;
        f_gap
            .iter()
            .enumerate()
            .filter(|(k, gap)| **gap > self.f_gap_bound(*k) + slack)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Evaluates the discrete energy along `traj` and records every step where
/// it fails to contract by `1/(1 + γ√s)` (slack `1e-12·E(0)`).
///
/// EE runs are mapped to their SIE image first. The run must be recorded at
/// every step, and the step-size conditions must hold; otherwise the
/// certificate would be vacuous and [`Error::ConditionViolation`] is returned.
pub fn certify_decay(traj: &Trajectory, obj: &dyn Objective) -> Result<RateCertificate> {
    if traj.config.record_every != 1 {
        return Err(Error::InvalidConfig("certification needs every step recorded".into()));
    }
    let s = traj.config.s;
    let (mu, l) = (obj.mu(), obj.lipschitz());
    let (sie_traj, gamma) = match traj.config.method {
        Method::RungeKutta4 => {
            return Err(Error::InvalidConfig("RK4 runs have no discrete certificate".into()));
        }
        Method::SemiImplicitEuler => {
            let report = sie_conditions_ok(&traj.params, s, l);
            if !report.ok {
                return Err(Error::ConditionViolation(report.violations.join(", ")));
            }
            (None, gamma2(&traj.params, mu, l)?)
        }
        Method::ExplicitEuler => {
            let report = ee_conditions_ok(&traj.params, s, l)?;
            if !report.ok {
                return Err(Error::ConditionViolation(report.violations.join(", ")));
            }
            (Some(reinterpret_ee_as_sie(traj, obj)?), gamma3(&traj.params, mu, l, s)?)
        }
    };
    let run = sie_traj.as_ref().unwrap_or(traj);
    let params = run.params;

    let energies = run
        .states
        .windows(2)
        .map(|w| discrete_energy_sie(&params, s, obj, &w[0].x, &w[1].x, &w[0].v))
        .collect::<Result<Vec<_>>>()?;
    if energies.is_empty() {
        return Err(Error::InvalidConfig("certification needs at least one step".into()));
    }

    let per_step_bound = 1.0 / (1.0 + gamma * s.sqrt());
    let slack = 1e-12 * energies[0];
    let violations = energies
        .windows(2)
        .enumerate()
        .filter(|(_, e)| e[1] > e[0] * per_step_bound + slack)
        .map(|(k, e)| (k, e[1] / e[0]))
        .collect();

    let h = s.sqrt();
    let r1 = 1.0 - params.q() * h;
    let r2 = params.n() + params.m() * params.q();
    Ok(RateCertificate {
        gamma,
        per_step_bound,
        violations,
        energies,
        sie_params: params,
        s,
        gap_scale: r1 * r2 * (1.0 - l * params.m() * h),
    })
}

/// `C = max_k f_gap[k]·(1 + γ√s)^k`, the smallest constant making
/// `f_gap[k] ≤ C(1 + γ√s)^{-k}` hold along the run.
pub fn fitted_rate_constant(f_gap: &[f64], gamma: f64, s: f64) -> f64 {
    let growth = 1.0 + gamma * s.sqrt();
    f_gap
        .iter()
        .enumerate()
        .map(|(k, g)| g * growth.powi(k as i32))
        .fold(0.0, f64::max)
}
