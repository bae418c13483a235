//! Regeneration of the three experiment figures as CSV bundles.
//!
//! * `fig2`: continuous flow (RK4, `h = 1e-4`, `T = 100`) on a 10-d quadratic
//!   with `μ = 0.01`, `L = 1`, sweeping `q`, `m` and `n` in turn.
//! * `fig3`: QHM on the same quadratic and on a 10-d logistic regression,
//!   sweeping the mixing weight `a`.
//! * `fig4`: both Euler schemes on a 2-d quadratic with `s = 1` for two
//!   parameter triples, with verdicts and spectral radii.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::commands::{write_columns, write_json, FLOOR};
use super::config::Figure;
use crate::analysis::{
    default_burn_in, empirical_rate, least_squares, spectral_radius_oracle, stability_classify, truncate_at_floor,
    StabilityVerdict,
};
use crate::error::Result;
use crate::integrators::{fmt_f64, integrate, IntegrationConfig, Scheme};
use crate::mappings::{named_initial_state, named_to_gm, NamedOptimizerConfig};
use crate::model::{optimal_q, ModelParams, PhaseState};
use crate::objectives::{make_logistic, make_quadratic, Objective, ObjectiveSpec};

pub const MU: f64 = 0.01;
pub const L: f64 = 1.0;

pub const FIG2_STEP: f64 = 1e-4;
pub const FIG2_HORIZON: f64 = 100.0;
/// RK4 steps between recorded samples (`Δt = 0.1`).
pub const FIG2_RECORD_EVERY: usize = 1000;
pub const FIG2_M_GRID: [f64; 5] = [0.0, 0.1, 0.2, 0.5, 1.0];
pub const FIG2_N_GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 4.0];

pub const FIG3_STEP: f64 = 0.5;
pub const FIG3_A_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 1.0];
pub const FIG3_QUADRATIC_ITERS: usize = 2000;
pub const FIG3_LOGISTIC_ITERS: usize = 3000;
pub const FIG3_LOGISTIC_SAMPLES: usize = 100;
pub const FIG3_LOGISTIC_REG: f64 = 1e-4;

pub const FIG4_STEP: f64 = 1.0;
pub const FIG4_ITERS: usize = 2000;

/// Friction used where a panel keeps `q` fixed: `2√μ`.
pub fn fig2_fixed_q() -> f64 {
    2.0 * MU.sqrt()
}

pub fn fig2_q_grid() -> Vec<f64> {
    vec![0.05, 0.1, optimal_q(0.2, 1.0, MU).expect("valid constants"), 0.5, 1.0]
}

/// Starting point used by every figure: `x* + 𝟙`, at rest.
pub fn default_start(obj: &dyn Objective) -> PhaseState {
    PhaseState::at_rest(obj.minimizer().expect("generated objectives know x*").add_scalar(1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Curve {
    /// `left` (q sweep), `middle` (m sweep) or `right` (n sweep).
    pub panel: &'static str,
    pub value: f64,
    pub params: ModelParams,
    pub times: Vec<f64>,
    pub f_gap: Vec<f64>,
    /// `-d log f_gap / dt` fitted after the first 20% of the horizon.
    pub decay_rate: f64,
}

/// Least-squares exponential decay rate of `values` sampled at `times`,
/// skipping the first fifth and anything below the rounding floor.
pub fn fitted_decay_rate(times: &[f64], values: &[f64]) -> f64 {
    let usable = truncate_at_floor(values, FLOOR);
    let start = default_burn_in(usable.len());
    if usable.len() < start + 2 {
        return f64::NAN;
    }
    let ys: Vec<f64> = usable[start..].iter().map(|v| v.ln()).collect();
    -least_squares(&times[start..usable.len()], &ys).0
}

pub fn fig2_params() -> Vec<(&'static str, f64, ModelParams)> {
    let q_fixed = fig2_fixed_q();
    let mut out = Vec::new();
    for q in fig2_q_grid() {
        out.push(("left", q, ModelParams::new(0.2, 1.0, q).expect("valid")));
    }
    for m in FIG2_M_GRID {
        out.push(("middle", m, ModelParams::new(m, 0.1, q_fixed).expect("valid")));
    }
    for n in FIG2_N_GRID {
        out.push(("right", n, ModelParams::new(0.2, n, q_fixed).expect("valid")));
    }
    out
}

pub fn fig2_curve(panel: &'static str, value: f64, params: ModelParams, obj: &dyn Objective) -> Result<Fig2Curve> {
    let steps = (FIG2_HORIZON / FIG2_STEP).round() as usize;
    let config = IntegrationConfig::rk4(FIG2_STEP, steps).with_record_every(FIG2_RECORD_EVERY);
    let traj = integrate(&params, &config, &default_start(obj), obj)?;
    let times: Vec<f64> = (0..traj.len()).map(|i| traj.time(i)).collect();
    let decay_rate = fitted_decay_rate(&times, &traj.f_gap);
    Ok(Fig2Curve {
        panel,
        value,
        params,
        times,
        f_gap: traj.f_gap,
        decay_rate,
    })
}

pub fn fig2(seed: u64) -> Result<Vec<Fig2Curve>> {
    let obj = make_quadratic(10, MU, L, seed)?;
    fig2_params()
        .into_par_iter()
        .map(|(panel, value, params)| fig2_curve(panel, value, params, &obj))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig3Run {
    /// `quadratic` or `logistic`.
    pub problem: &'static str,
    pub a: f64,
    pub config: NamedOptimizerConfig,
    pub f_gap: Vec<f64>,
    /// Fitted per-iteration factor, `None` if the series cannot be fitted.
    pub rho: Option<f64>,
}

pub fn fig3_run(problem: &'static str, a: f64, obj: &ObjectiveSpec, iters: usize) -> Result<Fig3Run> {
    let s = FIG3_STEP;
    let b = 1.0 - 2.0 * (obj.mu() * s).sqrt();
    let config = NamedOptimizerConfig::QuasiHyperbolic { s, a, b };
    let params = named_to_gm(&config, Scheme::SemiImplicitEuler)?;
    let x0 = default_start(obj).x;
    let init = named_initial_state(&config, Scheme::SemiImplicitEuler, &x0, obj)?;
    let traj = integrate(&params, &IntegrationConfig::euler(Scheme::SemiImplicitEuler, s, iters), &init, obj)?;
    let usable = truncate_at_floor(&traj.f_gap, FLOOR);
    let rho = empirical_rate(usable, default_burn_in(usable.len())).ok();
    Ok(Fig3Run {
        problem,
        a,
        config,
        f_gap: traj.f_gap,
        rho,
    })
}

pub fn fig3(seed: u64) -> Result<Vec<Fig3Run>> {
    let quad = ObjectiveSpec::Quadratic(make_quadratic(10, MU, L, seed)?);
    let logi = ObjectiveSpec::Logistic(make_logistic(10, FIG3_LOGISTIC_SAMPLES, FIG3_LOGISTIC_REG, seed)?);
    let jobs: Vec<(&'static str, f64, &ObjectiveSpec, usize)> = FIG3_A_GRID
        .iter()
        .map(|&a| ("quadratic", a, &quad, FIG3_QUADRATIC_ITERS))
        .chain(FIG3_A_GRID.iter().map(|&a| ("logistic", a, &logi, FIG3_LOGISTIC_ITERS)))
        .collect();
    jobs.into_par_iter()
        .map(|(problem, a, obj, iters)| fig3_run(problem, a, obj, iters))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Run {
    /// `left` or `right`.
    pub panel: &'static str,
    pub scheme: Scheme,
    pub params: ModelParams,
    pub verdict: StabilityVerdict,
    /// Largest per-mode spectral radius over the spectrum `{μ, L}`.
    pub radius: f64,
    pub f_gap: Vec<f64>,
}

pub fn fig4_params() -> [(&'static str, ModelParams); 2] {
    let h = FIG4_STEP.sqrt();
    let q = 2.0 * MU.sqrt();
    [
        ("left", ModelParams::new(h, 1.0, q).expect("valid")),
        ("right", ModelParams::new(2.0 * h, 0.5, q).expect("valid")),
    ]
}

pub fn fig4(seed: u64) -> Result<Vec<Fig4Run>> {
    let obj = make_quadratic(2, MU, L, seed)?;
    let mut runs = Vec::new();
    for (panel, params) in fig4_params() {
        for scheme in [Scheme::SemiImplicitEuler, Scheme::ExplicitEuler] {
            let config = IntegrationConfig::euler(scheme, FIG4_STEP, FIG4_ITERS);
            let traj = integrate(&params, &config, &default_start(&obj), &obj)?;
            let radius = [MU, L]
                .iter()
                .map(|&lam| spectral_radius_oracle(&params, FIG4_STEP, scheme, lam))
                .fold(0.0, f64::max);
            runs.push(Fig4Run {
                panel,
                scheme,
                params,
                verdict: stability_classify(&traj),
                radius,
                f_gap: traj.f_gap,
            });
        }
    }
    Ok(runs)
}

fn label(v: f64) -> String {
    fmt_f64(v)
}

fn write_fig2(dir: &Path, curves: &[Fig2Curve]) -> Result<Value> {
    let dir = dir.join("fig2");
    fs::create_dir_all(&dir)?;
    for c in curves {
        let key = match c.panel {
            "left" => "q",
            "middle" => "m",
            _ => "n",
        };
        write_columns(
            &dir.join(format!("{}_{key}_{}.csv", c.panel, label(c.value))),
            &["t", "f_gap"],
            c.times.iter().zip(&c.f_gap).map(|(t, g)| vec![fmt_f64(*t), fmt_f64(*g)]),
        )?;
    }
    write_columns(
        &dir.join("rates.csv"),
        &["panel", "value", "m", "n", "q", "decay_rate"],
        curves.iter().map(|c| {
            vec![
                c.panel.to_string(),
                fmt_f64(c.value),
                fmt_f64(c.params.m()),
                fmt_f64(c.params.n()),
                fmt_f64(c.params.q()),
                fmt_f64(c.decay_rate),
            ]
        }),
    )?;
    Ok(json!({
        "objective": { "family": "quadratic", "dim": 10, "mu": MU, "L": L },
        "rk4_step": FIG2_STEP,
        "horizon": FIG2_HORIZON,
        "record_every": FIG2_RECORD_EVERY,
        "left": { "m": 0.2, "n": 1.0, "q_grid": fig2_q_grid() },
        "middle": { "n": 0.1, "q": fig2_fixed_q(), "m_grid": FIG2_M_GRID },
        "right": { "m": 0.2, "q": fig2_fixed_q(), "n_grid": FIG2_N_GRID },
    }))
}

fn write_fig3(dir: &Path, runs: &[Fig3Run]) -> Result<Value> {
    let dir = dir.join("fig3");
    fs::create_dir_all(&dir)?;
    for r in runs {
        write_columns(
            &dir.join(format!("{}_a_{}.csv", r.problem, label(r.a))),
            &["k", "f_gap"],
            r.f_gap.iter().enumerate().map(|(k, g)| vec![k.to_string(), fmt_f64(*g)]),
        )?;
    }
    write_columns(
        &dir.join("rates.csv"),
        &["problem", "a", "b", "rho"],
        runs.iter().map(|r| {
            let b = match r.config {
                NamedOptimizerConfig::QuasiHyperbolic { b, .. } => b,
                _ => f64::NAN,
            };
            vec![
                r.problem.to_string(),
                fmt_f64(r.a),
                fmt_f64(b),
                r.rho.map_or_else(String::new, fmt_f64),
            ]
        }),
    )?;
    Ok(json!({
        "step": FIG3_STEP,
        "a_grid": FIG3_A_GRID,
        "quadratic": { "dim": 10, "mu": MU, "L": L, "iterations": FIG3_QUADRATIC_ITERS },
        "logistic": {
            "dim": 10,
            "samples": FIG3_LOGISTIC_SAMPLES,
            "reg": FIG3_LOGISTIC_REG,
            "iterations": FIG3_LOGISTIC_ITERS,
        },
        "b": "1 - 2 sqrt(mu s)",
    }))
}

fn write_fig4(dir: &Path, runs: &[Fig4Run]) -> Result<Value> {
    let dir = dir.join("fig4");
    fs::create_dir_all(&dir)?;
    for r in runs {
        write_columns(
            &dir.join(format!("{}_{}.csv", r.panel, r.scheme.label())),
            &["k", "f_gap"],
            r.f_gap.iter().enumerate().map(|(k, g)| vec![k.to_string(), fmt_f64(*g)]),
        )?;
    }
    let verdicts: Vec<Value> = runs
        .iter()
        .map(|r| {
            json!({
                "panel": r.panel,
                "scheme": r.scheme.label(),
                "m": r.params.m(),
                "n": r.params.n(),
                "q": r.params.q(),
                "verdict": r.verdict.label.as_str(),
                "final_f_gap": r.verdict.final_f_gap,
                "divergence_step": r.verdict.divergence_step,
                "spectral_radius": r.radius,
            })
        })
        .collect();
    write_json(&dir.join("verdicts.json"), &verdicts)?;
    Ok(json!({
        "objective": { "family": "quadratic", "dim": 2, "mu": MU, "L": L },
        "s": FIG4_STEP,
        "iterations": FIG4_ITERS,
        "verdicts": verdicts,
    }))
}

/// Writes the requested figure bundles under `dir` plus `metadata.json`.
pub fn reproduce(figure: Figure, dir: &Path, seed: u64) -> Result<Value> {
    let wanted = |f: Figure| figure == f || figure == Figure::All;
    let mut meta = serde_json::Map::new();
    meta.insert("seed".into(), json!(seed));
    if wanted(Figure::Fig2) {
        meta.insert("fig2".into(), write_fig2(dir, &fig2(seed)?)?);
    }
    if wanted(Figure::Fig3) {
        meta.insert("fig3".into(), write_fig3(dir, &fig3(seed)?)?);
    }
    if wanted(Figure::Fig4) {
        meta.insert("fig4".into(), write_fig4(dir, &fig4(seed)?)?);
    }
    let meta = Value::Object(meta);
    write_json(&dir.join("metadata.json"), &meta)?;
    Ok(meta)
}
