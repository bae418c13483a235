use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, MapDirection};
use super::reproduce;
use super::Outcome;
use crate::analysis::{
    aligned_reference_init, default_burn_in, empirical_rate, error_series, global_decay_check, local_order,
    reference_solution, stability_classify, truncate_at_floor, StabilityLabel, StabilityVerdict,
};
use crate::error::{Error, Result};
use crate::integrators::{fmt_f64, integrate, IntegrationConfig, Method, Scheme, Trajectory};
use crate::lyapunov::{certify_decay, ee_conditions_ok, gamma2, gamma3, sie_conditions_ok, ConditionReport};
use crate::mappings::{ee_to_sie, named_to_gm, sie_to_ee};
use crate::model::{continuous_energy, gamma1, ModelParams, PhaseState};
use crate::objectives::{Objective, ObjectiveSpec};

pub(super) struct Context {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub allow_divergence: bool,
}

impl Context {
    fn dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out)?;
        Ok(&self.out)
    }
}

/// Relative level below which a decaying series is treated as rounding noise.
pub(crate) const FLOOR: f64 = 1e-13;

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Writes a CSV with the given header; values use the shortest
/// round-trip representation.
pub(crate) fn write_columns(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn params_json(p: &ModelParams) -> Value {
    json!({ "m": p.m(), "n": p.n(), "q": p.q() })
}

fn fitted_rho(traj: &Trajectory, burn_in: Option<usize>) -> Option<f64> {
    let usable = truncate_at_floor(&traj.f_gap, FLOOR);
    let burn = burn_in.unwrap_or_else(|| default_burn_in(usable.len()));
    empirical_rate(usable, burn).ok()
}

/// Condition report and discrete rate for a Euler run, `None` for RK4.
fn discrete_summary(params: &ModelParams, scheme: Scheme, s: f64, mu: f64, l: f64) -> Result<Value> {
    let (report, gamma_name, gamma) = match scheme {
        Scheme::SemiImplicitEuler => (sie_conditions_ok(params, s, l), "gamma2", gamma2(params, mu, l).ok()),
        Scheme::ExplicitEuler => (ee_conditions_ok(params, s, l)?, "gamma3", gamma3(params, mu, l, s).ok()),
    };
    Ok(json!({
        "scheme": scheme.label(),
        "s": s,
        "ok": report.ok,
        "violations": report.violations,
        gamma_name: gamma,
    }))
}

fn run_energies(traj: &Trajectory, obj: &ObjectiveSpec) -> Result<(Option<Vec<f64>>, Option<Value>)> {
    match traj.config.method {
        Method::RungeKutta4 => {
            if obj.minimizer().is_none() {
                return Ok((None, None));
            }
            let e = traj
                .states
                .iter()
                .map(|st| continuous_energy(&traj.params, st, obj))
                .collect::<Result<Vec<_>>>()?;
            Ok((Some(e), None))
        }
        _ if traj.config.record_every != 1 => Ok((None, None)),
        _ => match certify_decay(traj, obj) {
            Ok(cert) => {
                let summary = json!({
                    "gamma": cert.gamma,
                    "per_step_bound": cert.per_step_bound,
                    "clean": cert.is_clean(),
                    "violations": cert.violations.len(),
                });
                Ok((Some(cert.energies), Some(summary)))
            }
            Err(Error::ConditionViolation(_) | Error::MissingMinimizer) => Ok((None, None)),
            Err(e) => Err(e),
        },
    }
}

fn verdict_json(v: &StabilityVerdict) -> Value {
    json!({
        "label": v.label.as_str(),
        "final_f_gap": v.final_f_gap,
        "max_f_gap": v.max_f_gap,
        "divergence_step": v.divergence_step,
    })
}

pub(super) fn simulate(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let obj = cfg.objective(ctx.seed)?;
    let integration = cfg.integration()?;
    let params = cfg.model_params()?;
    let init = cfg.initial_state(&obj)?;
    let traj = integrate(&params, &integration, &init, &obj)?;

    let (energy, certificate) = run_energies(&traj, &obj)?;
    let verdict = stability_classify(&traj);
    let discrete = match integration.method.scheme() {
        Some(scheme) => Some(discrete_summary(&params, scheme, integration.s, obj.mu(), obj.lipschitz())?),
        None => None,
    };
    let summary = json!({
        "command": "simulate",
        "method": integration.method,
        "params": params_json(&params),
        "num_steps": integration.num_steps,
        "verdict": verdict_json(&verdict),
        "rho": fitted_rho(&traj, cfg.burn_in),
        "gamma1": gamma1(&params, obj.mu()).ok(),
        "conditions": discrete,
        "certificate": certificate,
    });

    let dir = ctx.dir()?;
    traj.write_csv(BufWriter::new(File::create(dir.join("trajectory.csv"))?), energy.as_deref())?;
    write_json(&dir.join("summary.json"), &summary)?;
    print_json(&summary)?;

    if verdict.label == StabilityLabel::Diverged && !ctx.allow_divergence {
        eprintln!(
            "gmflow: run diverged at step {}",
            verdict.divergence_step.map_or_else(|| "end".to_string(), |k| k.to_string())
        );
        return Ok(Outcome::Diverged);
    }
    Ok(Outcome::Success)
}

pub(super) fn sweep(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    if cfg.named.is_some() || cfg.params.is_some() {
        return Err(Error::InvalidConfig("sweep takes its parameters from `sweep`".into()));
    }
    let obj = cfg.objective(ctx.seed)?;
    let integration = cfg.integration()?;
    let grid = cfg.sweep.as_ref().ok_or_else(|| Error::InvalidConfig("config is missing `sweep`".into()))?.expand()?;
    let init = cfg.initial_state(&obj)?;

    let results = grid
        .par_iter()
        .map(|params| {
            let traj = integrate(params, &integration, &init, &obj)?;
            Ok((stability_classify(&traj), fitted_rho(&traj, cfg.burn_in)))
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = grid.iter().zip(&results).enumerate().map(|(i, (p, (v, rho)))| {
        vec![
            i.to_string(),
            fmt_f64(p.m()),
            fmt_f64(p.n()),
            fmt_f64(p.q()),
            v.label.as_str().to_string(),
            fmt_f64(v.final_f_gap),
            rho.map_or_else(String::new, fmt_f64),
        ]
    });
    let dir = ctx.dir()?;
    write_columns(
        &dir.join("sweep.csv"),
        &["index", "m", "n", "q", "verdict", "final_f_gap", "rho"],
        rows,
    )?;
    let diverged = results.iter().filter(|(v, _)| v.label == StabilityLabel::Diverged).count();
    print_json(&json!({ "command": "sweep", "runs": grid.len(), "diverged": diverged }))?;
    Ok(Outcome::Success)
}

pub(super) fn map_params(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = match (&cfg.named, &cfg.params) {
        (Some(named), None) => {
            let schemes = match cfg.scheme {
                Some(s) => vec![s],
                None => vec![Scheme::SemiImplicitEuler, Scheme::ExplicitEuler],
            };
            let mut map = serde_json::Map::new();
            map.insert("family".into(), json!(named.family()));
            for scheme in schemes {
                map.insert(scheme.label().into(), params_json(&named_to_gm(named, scheme)?));
            }
            Value::Object(map)
        }
        (None, Some(params)) => {
            let s = cfg.s.ok_or_else(|| Error::InvalidConfig("config is missing `s`".into()))?;
            let mapped = match cfg.map.ok_or_else(|| Error::InvalidConfig("config is missing `map`".into()))? {
                MapDirection::SieToEe => sie_to_ee(params, s)?,
                MapDirection::EeToSie => ee_to_sie(params, s)?,
            };
            params_json(&mapped)
        }
        _ => return Err(Error::InvalidConfig("map-params needs exactly one of `params` and `named`".into())),
    };
    print_json(&out)?;
    Ok(Outcome::Success)
}

pub(super) fn check_conditions(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let scheme = cfg.scheme()?;
    let s = cfg.step()?;
    let params = match (&cfg.params, &cfg.named) {
        (Some(p), None) => *p,
        (None, Some(named)) => named_to_gm(named, scheme)?,
        _ => return Err(Error::InvalidConfig("check-conditions needs exactly one of `params` and `named`".into())),
    };
    let c = cfg.constants(ctx.seed)?;
    let report: ConditionReport = match scheme {
        Scheme::SemiImplicitEuler => sie_conditions_ok(&params, s, c.l),
        Scheme::ExplicitEuler => ee_conditions_ok(&params, s, c.l)?,
    };
    let out = json!({
        "scheme": scheme.label(),
        "params": params_json(&params),
        "s": s,
        "mu": c.mu,
        "L": c.l,
        "ok": report.ok,
        "violations": report.violations,
        "gamma1": gamma1(&params, c.mu).ok(),
        "gamma2": gamma2(&params, c.mu, c.l).ok(),
        "gamma3": gamma3(&params, c.mu, c.l, s).ok(),
    });
    print_json(&out)?;
    Ok(if report.ok { Outcome::Success } else { Outcome::Failed })
}

pub(super) fn truncation_order(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let obj = cfg.objective(ctx.seed)?;
    let t = cfg
        .truncation
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("config is missing `truncation`".into()))?;
    let family = |s: f64| ModelParams::new(t.m_scale * s.sqrt(), t.n, t.q).expect("validated below");
    ModelParams::new(t.m_scale, t.n, t.q)?;
    let init = match &cfg.init {
        Some(_) => cfg.initial_state(&obj)?,
        None => PhaseState::at_rest(obj.minimizer().ok_or(Error::MissingMinimizer)?.add_scalar(1.0)),
    };
    let schemes = match cfg.scheme {
        Some(s) => vec![s],
        None => vec![Scheme::SemiImplicitEuler, Scheme::ExplicitEuler],
    };
    let dir = ctx.dir()?;
    let mut slopes = serde_json::Map::new();
    for scheme in schemes {
        let fit = local_order(&family, &obj, &init, &t.s_grid, scheme)?;
        write_columns(
            &dir.join(format!("truncation_order_{}.csv", scheme.label())),
            &["s", "delta1"],
            fit.points.iter().map(|(s, d)| vec![fmt_f64(*s), fmt_f64(*d)]),
        )?;
        slopes.insert(scheme.label().into(), json!(fit.slope));
    }
    print_json(&json!({ "command": "truncation-order", "slopes": slopes }))?;
    Ok(Outcome::Success)
}

pub(super) fn rate_check(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let obj = cfg.objective(ctx.seed)?;
    let integration = cfg.integration()?;
    let scheme = integration
        .method
        .scheme()
        .ok_or_else(|| Error::InvalidConfig("rate-check needs a Euler integration".into()))?;
    if integration.record_every != 1 {
        return Err(Error::InvalidConfig("rate-check needs record_every = 1".into()));
    }
    let params = cfg.model_params()?;
    let init = cfg.initial_state(&obj)?;
    let (mu, l, s) = (obj.mu(), obj.lipschitz(), integration.s);
    let gamma = match scheme {
        Scheme::SemiImplicitEuler => gamma2(&params, mu, l)?,
        Scheme::ExplicitEuler => gamma3(&params, mu, l, s)?,
    };
    let report = decay_report(&params, &integration, &init, &obj, gamma, cfg.burn_in)?;

    let dir = ctx.dir()?;
    write_columns(
        &dir.join("rate_check.csv"),
        &["k", "delta_k"],
        report.deltas.iter().enumerate().map(|(k, d)| vec![k.to_string(), fmt_f64(*d)]),
    )?;
    let summary = json!({
        "command": "rate-check",
        "scheme": scheme.label(),
        "params": params_json(&params),
        "gamma": gamma,
        "decay": report.decay,
        "certificate_clean": report.certificate_clean,
        "passed": report.passed(),
    });
    write_json(&dir.join("rate_check.json"), &summary)?;
    print_json(&summary)?;
    Ok(if report.passed() { Outcome::Success } else { Outcome::Failed })
}

struct DecayReport {
    deltas: Vec<f64>,
    decay: crate::analysis::DecayCheck,
    certificate_clean: bool,
}

impl DecayReport {
    fn passed(&self) -> bool {
        self.decay.passed && self.certificate_clean
    }
}

fn decay_report(
    params: &ModelParams,
    integration: &IntegrationConfig,
    init: &PhaseState,
    obj: &ObjectiveSpec,
    gamma: f64,
    burn_in: Option<usize>,
) -> Result<DecayReport> {
    // Refuse before integrating, so that an inadmissible run reports the
    // violated conditions rather than its divergence.
    let s = integration.s;
    let report = match integration.method {
        Method::SemiImplicitEuler => sie_conditions_ok(params, s, obj.lipschitz()),
        _ => ee_conditions_ok(params, s, obj.lipschitz())?,
    };
    if !report.ok {
        return Err(Error::ConditionViolation(report.violations.join(", ")));
    }
    let traj = integrate(params, integration, init, obj)?;
    if traj.terminated_early() {
        return Err(Error::Divergence("run terminated before the error series was complete".into()));
    }
    let certificate = certify_decay(&traj, obj)?;
    let samples = match traj.config.method {
        Method::SemiImplicitEuler => traj.len() - 2,
        _ => traj.len() - 1,
    };
    let reference = reference_solution(params, obj, &aligned_reference_init(&traj)?, s, samples, s.sqrt() / 1000.0)?;
    let series = error_series(&reference, &traj)?;
    let burn = burn_in.unwrap_or_else(|| default_burn_in(series.deltas.len()));
    let decay = global_decay_check(&series, obj.lipschitz(), gamma, burn)?;
    Ok(DecayReport {
        deltas: series.deltas,
        decay,
        certificate_clean: certificate.is_clean(),
    })
}

pub(super) fn reproduce(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let figure = cfg.figure.ok_or_else(|| Error::InvalidConfig("config is missing `figure`".into()))?;
    let summary = reproduce::reproduce(figure, ctx.dir()?, ctx.seed.unwrap_or(0))?;
    print_json(&summary)?;
    Ok(Outcome::Success)
}
