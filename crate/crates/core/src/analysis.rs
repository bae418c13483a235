//! Discretization error against a fine RK4 reference, truncation-order and
//! rate fits, and stability classification of runs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrators::{integrate, rk4_step, IntegrationConfig, Scheme, TerminationReason, Trajectory};
use crate::lyapunov::{ee_conditions_ok, sie_conditions_ok};
use crate::model::{ModelParams, PhaseState};
use crate::objectives::Objective;

/// Flow samples `X(k√s), V(k√s)` for `k = 0..=k_max`.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub params: ModelParams,
    pub s: f64,
    /// RK4 step actually used (`√s` divided by an integer).
    pub h: f64,
    pub states: Vec<PhaseState>,
}

impl ReferenceSolution {
    pub fn init(&self) -> &PhaseState {
        &self.states[0]
    }
}

/// Integrates the flow with RK4 at step `h` and samples every `√s/h` steps.
///
/// Requires `h ≤ √s/100` and `√s/h` integral (to relative `1e-9`) so that
/// samples fall exactly on the grid `k√s`.
pub fn reference_solution(
    params: &ModelParams,
    obj: &dyn Objective,
    init: &PhaseState,
    s: f64,
    k_max: usize,
    h: f64,
) -> Result<ReferenceSolution> {
    if !(s.is_finite() && s > 0.0 && h.is_finite() && h > 0.0) {
        return Err(Error::InvalidConfig(format!("need s, h > 0, got s = {s}, h = {h}")));
    }
    let ratio = s.sqrt() / h;
    let substeps = ratio.round();
    if ratio < 100.0 * (1.0 - 1e-12) || (ratio - substeps).abs() > 1e-9 * ratio {
        return Err(Error::InvalidConfig(format!(
            "reference step must divide √s into at least 100 equal parts, got √s/h = {ratio}"
        )));
    }
    let substeps = substeps as usize;
    let h = s.sqrt() / substeps as f64;
    let mut states = Vec::with_capacity(k_max + 1);
    let mut state = init.clone();
    states.push(state.clone());
    for _ in 0..k_max {
        for _ in 0..substeps {
            state = rk4_step(params, h, &state, obj)?;
        }
        states.push(state.clone());
    }
    Ok(ReferenceSolution {
        params: *params,
        s,
        h,
        states,
    })
}

/// Flow initial condition matched to a Euler run: `(x₀, v₀)` for EE and
/// `(x₁, v₀)` for SIE, whose error is measured against `x_{k+1}`.
pub fn aligned_reference_init(traj: &Trajectory) -> Result<PhaseState> {
    match traj.config.method.scheme() {
        Some(Scheme::ExplicitEuler) => Ok(traj.states[0].clone()),
        Some(Scheme::SemiImplicitEuler) => {
            if traj.len() < 2 || traj.steps[1] != 1 {
                return Err(Error::InvalidPairing("SIE alignment needs the recorded step x₁".into()));
            }
            Ok(PhaseState {
                x: traj.states[1].x.clone(),
                v: traj.states[0].v.clone(),
            })
        }
        None => Err(Error::InvalidPairing("error series needs a Euler trajectory".into())),
    }
}

/// `Δ_k = ‖X(k√s) - w_k‖` with `w_k = x_k` (EE) or `w_k = x_{k+1}` (SIE).
#[derive(Debug, Clone, Serialize)]
pub struct ErrorSeries {
    pub scheme: Scheme,
    pub params: ModelParams,
    pub s: f64,
    pub deltas: Vec<f64>,
    pub reference_step: f64,
}

pub fn error_series(reference: &ReferenceSolution, traj: &Trajectory) -> Result<ErrorSeries> {
    let scheme = traj
        .config
        .method
        .scheme()
        .ok_or_else(|| Error::InvalidPairing("error series needs a Euler trajectory".into()))?;
    if traj.config.record_every != 1 {
        return Err(Error::InvalidPairing("trajectory must record every step".into()));
    }
    if traj.params != reference.params {
        return Err(Error::InvalidPairing("parameters differ".into()));
    }
    if traj.config.s != reference.s {
        return Err(Error::InvalidPairing(format!(
            "step sizes differ: {} vs {}",
            traj.config.s, reference.s
        )));
    }
    if aligned_reference_init(traj)? != *reference.init() {
        return Err(Error::InvalidPairing("reference does not start from the aligned state".into()));
    }
    let offset = match scheme {
        Scheme::ExplicitEuler => 0,
        Scheme::SemiImplicitEuler => 1,
    };
    let deltas = reference
        .states
        .iter()
        .zip(traj.states.iter().skip(offset))
        .map(|(r, w)| (&r.x - &w.x).norm())
        .collect();
    Ok(ErrorSeries {
        scheme,
        params: traj.params,
        s: traj.config.s,
        deltas,
        reference_step: reference.h,
    })
}

/// Least-squares line `y ≈ intercept + slope·x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log fit of the one-step error against the step size.
#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub scheme: Scheme,
    pub slope: f64,
    pub intercept: f64,
    /// `(s, Δ₁)` per grid point.
    pub points: Vec<(f64, f64)>,
}

/// One-step error `Δ₁` of `scheme` at step `s`, against an RK4 reference
/// with `h = √s/1000` started from the aligned state.
pub fn one_step_error(params: &ModelParams, obj: &dyn Objective, init: &PhaseState, s: f64, scheme: Scheme) -> Result<f64> {
    let steps = match scheme {
        Scheme::ExplicitEuler => 1,
        Scheme::SemiImplicitEuler => 2,
    };
    let traj = integrate(params, &IntegrationConfig::euler(scheme, s, steps), init, obj)?;
    if traj.terminated_early() {
        return Err(Error::Divergence(format!("Euler step diverged at s = {s}")));
    }
    let start = aligned_reference_init(&traj)?;
    let reference = reference_solution(params, obj, &start, s, 1, s.sqrt() / 1000.0)?;
    Ok(error_series(&reference, &traj)?.deltas[1])
}

/// Slope of `log Δ₁` against `log s` over `s_grid`, with `params_family`
/// giving the parameters at each step size.
pub fn local_order(
    params_family: &dyn Fn(f64) -> ModelParams,
    obj: &dyn Objective,
    init: &PhaseState,
    s_grid: &[f64],
    scheme: Scheme,
) -> Result<OrderFit> {
    if s_grid.len() < 4 {
        return Err(Error::InsufficientGrid(format!("need at least 4 step sizes, got {}", s_grid.len())));
    }
    let (lo, hi) = s_grid
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if !(lo > 0.0 && hi / lo >= 100.0 * (1.0 - 1e-12)) {
        return Err(Error::InsufficientGrid("step sizes must be positive and span two decades".into()));
    }
    let points = s_grid
        .iter()
        .map(|&s| one_step_error(&params_family(s), obj, init, s, scheme).map(|d| (s, d)))
        .collect::<Result<Vec<_>>>()?;
    if points.iter().any(|(_, d)| !(*d > 0.0)) {
        return Err(Error::CannotFit("a one-step error is zero".into()));
    }
    let xs: Vec<f64> = points.iter().map(|(s, _)| s.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, d)| d.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(OrderFit {
        scheme,
        slope,
        intercept,
        points,
    })
}

/// Longest prefix whose entries all exceed `rel_floor` times the series
/// maximum; drops the tail once a run reaches rounding level.
pub fn truncate_at_floor(series: &[f64], rel_floor: f64) -> &[f64] {
    let max = series.iter().copied().fold(0.0, f64::max);
    let floor = rel_floor * max;
    let end = series.iter().position(|v| !(*v > floor)).unwrap_or(series.len());
    &series[..end]
}

/// Default burn-in: the first 20% of a series.
pub fn default_burn_in(len: usize) -> usize {
    len / 5
}

/// Per-step factor `ρ = exp(slope)` of a least-squares fit of `log series[k]`
/// against `k` for `k ≥ burn_in`.
pub fn empirical_rate(series: &[f64], burn_in: usize) -> Result<f64> {
    if series.len() < burn_in + 50 {
        return Err(Error::CannotFit(format!(
            "need at least {} entries, got {}",
            burn_in + 50,
            series.len()
        )));
    }
    let tail = &series[burn_in..];
    if let Some(bad) = tail.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::CannotFit(format!("series has nonpositive entry {bad}")));
    }
    let xs: Vec<f64> = (burn_in..series.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&xs, &ys).0.exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCheck {
    pub passed: bool,
    /// `max_{k ≥ burn_in} Δ_k (1 + γ√s)^k`.
    pub constant: f64,
    /// Fitted per-step factor of the error tail.
    pub tail_ratio: f64,
    /// `(1 + γ√s)^{-1}`.
    pub bound: f64,
}

/// Checks that the error series decays like `C(1 + γ√s)^{-k}`: the fitted
/// constant must be finite and the fitted tail factor (beyond `burn_in`,
/// truncated at rounding level) at most `(1 + γ√s)^{-1} + 0.05`.
///
/// Refused with [`Error::ConditionViolation`] unless the run satisfies the
/// step-size conditions of its scheme for the given `lipschitz`.
pub fn global_decay_check(series: &ErrorSeries, lipschitz: f64, gamma: f64, burn_in: usize) -> Result<DecayCheck> {
    let report = match series.scheme {
        Scheme::ExplicitEuler => ee_conditions_ok(&series.params, series.s, lipschitz)?,
        Scheme::SemiImplicitEuler => sie_conditions_ok(&series.params, series.s, lipschitz),
    };
    if !report.ok {
        return Err(Error::ConditionViolation(report.violations.join(", ")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidConstants(format!("gamma must be positive, got {gamma}")));
    }
    let growth = 1.0 + gamma * series.s.sqrt();
    let constant = series
        .deltas
        .iter()
        .enumerate()
        .skip(burn_in)
        .map(|(k, d)| d * growth.powi(k as i32))
        .fold(0.0, f64::max);
    let tail = series.deltas.get(burn_in..).unwrap_or(&[]);
    let tail_ratio = empirical_rate(truncate_at_floor(tail, 1e-13), 0)?;
    let bound = 1.0 / growth;
    Ok(DecayCheck {
        passed: constant.is_finite() && tail_ratio <= bound + 0.05,
        constant,
        tail_ratio,
        bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StabilityLabel {
    Converged,
    Diverged,
    NonConvergent,
}

impl StabilityLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "CONVERGED",
            Self::Diverged => "DIVERGED",
            Self::NonConvergent => "NON_CONVERGENT",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub label: StabilityLabel,
    pub final_f_gap: f64,
    pub max_f_gap: f64,
    pub divergence_step: Option<usize>,
}

/// Threshold on the final gap below which a run counts as converged.
pub const CONVERGED_GAP: f64 = 1e-8;
/// Final gap above which a completed run counts as diverged.
pub const DIVERGED_GAP: f64 = 1e6;

/// Labels a run: early termination or a final gap above `1e6` is
/// `DIVERGED`, a final gap below `1e-8` is `CONVERGED`, anything else is
/// `NON_CONVERGENT`. Without a known `f*` the squared gradient norm stands in
/// for the gap.
pub fn stability_classify(traj: &Trajectory) -> StabilityVerdict {
    let gaps: Vec<f64> = if traj.f_gap.is_empty() {
        traj.grad_norm.iter().map(|g| g * g).collect()
    } else {
        traj.f_gap.clone()
    };
    let final_f_gap = *gaps.last().expect("trajectory always holds its initial state");
    let max_f_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let divergence_step = traj.termination.map(|t| t.step);
    let label = match traj.termination.map(|t| t.reason) {
        Some(TerminationReason::Threshold | TerminationReason::NonFinite) => StabilityLabel::Diverged,
        None if !(final_f_gap <= DIVERGED_GAP) => StabilityLabel::Diverged,
        None if final_f_gap < CONVERGED_GAP => StabilityLabel::Converged,
        None => StabilityLabel::NonConvergent,
    };
    StabilityVerdict {
        label,
        final_f_gap,
        max_f_gap,
        divergence_step,
    }
}

/// Spectral radius of the per-mode Euler update on a quadratic with
/// curvature `eigenvalue`.
///
/// With `a = 1 - m√sλ`, `b = -n√s`, `c = √sλ`, `r = 1 - q√s` the EE matrix is
/// `[[a, b], [c, r]]`; SIE feeds the new position into the velocity row,
/// giving `[[a, b], [ca, cb + r]]`.
pub fn spectral_radius_oracle(params: &ModelParams, s: f64, scheme: Scheme, eigenvalue: f64) -> f64 {
    let h = s.sqrt();
    let a = 1.0 - params.m() * h * eigenvalue;
    let b = -params.n() * h;
    let c = h * eigenvalue;
    let r = 1.0 - params.q() * h;
    let (trace, det) = match scheme {
        Scheme::ExplicitEuler => (a + r, a * r - b * c),
        Scheme::SemiImplicitEuler => (a + c * b + r, a * r),
    };
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        ((trace + root) / 2.0).abs().max(((trace - root) / 2.0).abs())
    } else {
        det.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::sie_to_ee;
    use crate::objectives::{make_quadratic, QuadraticObjective, Vector};
    use approx::assert_relative_eq;

    fn p(m: f64, n: f64, q: f64) -> ModelParams {
        ModelParams::new(m, n, q).unwrap()
    }

    fn scalar(lambda: f64) -> QuadraticObjective {
        QuadraticObjective::diagonal(Vector::from_element(1, lambda), Vector::zeros(1)).unwrap()
    }

    #[test]
    fn reference_matches_gradient_flow_closed_form() {
        let f = scalar(0.7);
        let init = PhaseState::at_rest(Vector::from_element(1, 2.0));
        let s = 0.04;
        let r = reference_solution(&p(1.0, 0.0, 0.0), &f, &init, s, 25, s.sqrt() / 200.0).unwrap();
        assert_eq!(r.states[0], init);
        for (k, st) in r.states.iter().enumerate() {
            let exact = 2.0 * (-0.7 * k as f64 * s.sqrt()).exp();
            assert!((st.x[0] - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn reference_step_must_divide_the_sample_spacing() {
        let f = scalar(1.0);
        let init = PhaseState::at_rest(Vector::from_element(1, 1.0));
        assert!(matches!(reference_solution(&p(1.0, 1.0, 1.0), &f, &init, 0.01, 3, 0.01), Err(Error::InvalidConfig(_))));
        assert!(matches!(reference_solution(&p(1.0, 1.0, 1.0), &f, &init, 0.01, 3, 0.1 / 150.5), Err(Error::InvalidConfig(_))));
        assert!(reference_solution(&p(1.0, 1.0, 1.0), &f, &init, 0.01, 3, 0.1 / 150.0).is_ok());
    }

    #[test]
    fn tiny_steps_track_the_flow() {
        let f = make_quadratic(10, 0.01, 1.0, 0).unwrap();
        let params = p(0.2, 1.0, 0.2);
        let s = 1e-6;
        let init = PhaseState::at_rest(Vector::from_element(10, 0.1_f64.sqrt()));
        for scheme in [Scheme::ExplicitEuler, Scheme::SemiImplicitEuler] {
            let traj = integrate(&params, &IntegrationConfig::euler(scheme, s, 11), &init, &f).unwrap();
            let r = reference_solution(&params, &f, &aligned_reference_init(&traj).unwrap(), s, 10, s.sqrt() / 100.0).unwrap();
            let e = error_series(&r, &traj).unwrap();
            assert_eq!(e.deltas[0], 0.0);
            assert!(e.deltas.iter().all(|d| *d <= 1e-5));
        }
    }

    #[test]
    fn pairing_is_validated() {
        let f = scalar(1.0);
        let init = PhaseState::at_rest(Vector::from_element(1, 1.0));
        let traj = integrate(&p(0.5, 0.5, 0.5), &IntegrationConfig::euler(Scheme::ExplicitEuler, 0.01, 5), &init, &f).unwrap();
        let other = reference_solution(&p(0.5, 0.5, 0.4), &f, &init, 0.01, 5, 0.001).unwrap();
        assert!(matches!(error_series(&other, &traj), Err(Error::InvalidPairing(_))));
        let shifted = PhaseState::at_rest(Vector::from_element(1, 1.1));
        let other = reference_solution(&p(0.5, 0.5, 0.5), &f, &shifted, 0.01, 5, 0.001).unwrap();
        assert!(matches!(error_series(&other, &traj), Err(Error::InvalidPairing(_))));
    }

    #[test]
    fn gradient_descent_has_the_same_error_for_both_schemes() {
        let f = make_quadratic(10, 0.01, 1.0, 0).unwrap();
        let init = PhaseState::at_rest(Vector::from_element(10, 1.0));
        let family = |_s: f64| p(1.0, 0.0, 0.0);
        for s in [1e-4, 1e-3, 1e-2] {
            // With n = 0 the SIE series compares x_{k+1} against a flow
            // started at x₁, which is the EE comparison shifted by one step.
            let ee = one_step_error(&family(s), &f, &init, s, Scheme::ExplicitEuler).unwrap();
            let x1 = integrate(&family(s), &IntegrationConfig::euler(Scheme::ExplicitEuler, s, 1), &init, &f).unwrap();
            let shifted = PhaseState::at_rest(x1.last().x.clone());
            let ee_shifted = one_step_error(&family(s), &f, &shifted, s, Scheme::ExplicitEuler).unwrap();
            let sie = one_step_error(&family(s), &f, &init, s, Scheme::SemiImplicitEuler).unwrap();
            assert_relative_eq!(sie, ee_shifted, max_relative = 1e-12);
            assert!(ee > 0.0);
        }
        let grid = [1e-4, 1e-3, 3e-3, 1e-2];
        let a = local_order(&family, &f, &init, &grid, Scheme::ExplicitEuler).unwrap();
        let b = local_order(&family, &f, &init, &grid, Scheme::SemiImplicitEuler).unwrap();
        assert!((a.slope - 1.0).abs() < 0.05 && (b.slope - 1.0).abs() < 0.05);
    }

    #[test]
    fn order_grid_is_validated() {
        let f = scalar(1.0);
        let init = PhaseState::at_rest(Vector::from_element(1, 1.0));
        let family = |s: f64| p(s.sqrt(), 1.0, 0.2);
        assert!(matches!(local_order(&family, &f, &init, &[1e-4, 1e-3, 1e-2], Scheme::ExplicitEuler), Err(Error::InsufficientGrid(_))));
        assert!(matches!(local_order(&family, &f, &init, &[1e-3, 2e-3, 3e-3, 4e-3], Scheme::ExplicitEuler), Err(Error::InsufficientGrid(_))));
    }

    #[test]
    fn empirical_rate_examples() {
        let series: Vec<f64> = (0..200).map(|k| 3.0 * 0.93_f64.powi(k)).collect();
        assert_relative_eq!(empirical_rate(&series, 40).unwrap(), 0.93, epsilon = 1e-10);

        // One exact minimization step: the gap is zero from k = 1 on.
        let f = scalar(2.0);
        let init = PhaseState::at_rest(Vector::from_element(1, 1.0));
        let traj = integrate(&p(1.0 / 2.0_f64.sqrt(), 0.0, 0.0), &IntegrationConfig::euler(Scheme::ExplicitEuler, 0.5, 100), &init, &f).unwrap();
        assert_eq!(traj.f_gap[1], 0.0);
        assert!(matches!(empirical_rate(truncate_at_floor(&traj.f_gap, 1e-14), 0), Err(Error::CannotFit(_))));
        assert!(matches!(empirical_rate(&traj.f_gap, 0), Err(Error::CannotFit(_))));
    }

    #[test]
    fn truncation_keeps_the_positive_prefix() {
        assert_eq!(truncate_at_floor(&[1.0, 0.1, 1e-20, 1e-3], 1e-14), &[1.0, 0.1]);
        assert_eq!(truncate_at_floor(&[1.0, 0.5], 1e-14), &[1.0, 0.5]);
    }

    #[test]
    fn oracle_examples() {
        let left = p(1.0, 1.0, 0.2);
        let right = p(2.0, 0.5, 0.2);
        assert_relative_eq!(spectral_radius_oracle(&left, 1.0, Scheme::ExplicitEuler, 1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            spectral_radius_oracle(&right, 1.0, Scheme::SemiImplicitEuler, 1.0),
            (0.7 + 3.69_f64.sqrt()) / 2.0,
            epsilon = 1e-15
        );
        for lambda in [0.01, 0.3, 1.0] {
            assert!(spectral_radius_oracle(&left, 1.0, Scheme::SemiImplicitEuler, lambda) < 1.0);
            assert!(spectral_radius_oracle(&right, 1.0, Scheme::ExplicitEuler, lambda) < 1.0);
        }
        let gd = p(0.8, 0.0, 0.3);
        for scheme in [Scheme::ExplicitEuler, Scheme::SemiImplicitEuler] {
            let r = spectral_radius_oracle(&gd, 0.25, scheme, 3.0);
            assert_relative_eq!(r, (1.0_f64 - 1.2).abs().max(1.0 - 0.15), epsilon = 1e-15);
        }
    }

    #[test]
    fn oracle_matches_the_matrix_eigenvalues() {
        for (m, n, q, s, lam) in [(0.3, 0.8, 0.4, 0.5, 0.7), (1.5, 0.2, 1.1, 0.3, 2.0), (0.0, 1.0, 0.1, 1.0, 0.5)] {
            let params = p(m, n, q);
            let h = f64::sqrt(s);
            let (a, b, c, r) = (1.0 - m * h * lam, -n * h, h * lam, 1.0 - q * h);
            for (scheme, mat) in [
                (Scheme::ExplicitEuler, nalgebra::Matrix2::new(a, b, c, r)),
                (Scheme::SemiImplicitEuler, nalgebra::Matrix2::new(a, b, c * a, c * b + r)),
            ] {
                let radius = mat.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert_relative_eq!(spectral_radius_oracle(&params, s, scheme, lam), radius, max_relative = 1e-12);
            }
        }
    }

    fn fig4(params: ModelParams, scheme: Scheme) -> StabilityLabel {
        let f = QuadraticObjective::diagonal(Vector::from_vec(vec![0.01, 1.0]), Vector::zeros(2)).unwrap();
        let init = PhaseState::at_rest(Vector::from_element(2, 1.0));
        let traj = integrate(&params, &IntegrationConfig::euler(scheme, 1.0, 2000), &init, &f).unwrap();
        stability_classify(&traj).label
    }

    #[test]
    fn stability_contrast() {
        assert_eq!(fig4(p(1.0, 1.0, 0.2), Scheme::SemiImplicitEuler), StabilityLabel::Converged);
        assert_eq!(fig4(p(1.0, 1.0, 0.2), Scheme::ExplicitEuler), StabilityLabel::NonConvergent);
        assert_eq!(fig4(p(2.0, 0.5, 0.2), Scheme::ExplicitEuler), StabilityLabel::Converged);
        assert_eq!(fig4(p(2.0, 0.5, 0.2), Scheme::SemiImplicitEuler), StabilityLabel::Diverged);
    }

    #[test]
    fn fixed_point_is_converged() {
        let f = make_quadratic(3, 0.1, 1.0, 4).unwrap();
        let init = PhaseState::at_rest(f.minimizer().unwrap().clone());
        let traj = integrate(&p(1.0, 1.0, 1.0), &IntegrationConfig::euler(Scheme::SemiImplicitEuler, 0.1, 50), &init, &f).unwrap();
        assert_eq!(stability_classify(&traj).label, StabilityLabel::Converged);
    }

    #[test]
    fn equivalent_runs_share_a_verdict() {
        let f = QuadraticObjective::diagonal(Vector::from_vec(vec![0.01, 1.0]), Vector::zeros(2)).unwrap();
        let init = PhaseState::at_rest(Vector::from_element(2, 1.0));
        for params in [p(1.0, 1.0, 0.2), p(2.0, 0.5, 0.2), p(0.3, 0.3, 0.4)] {
            let sie = integrate(&params, &IntegrationConfig::euler(Scheme::SemiImplicitEuler, 1.0, 2000), &init, &f).unwrap();
            let ee_params = sie_to_ee(&params, 1.0).unwrap();
            let ee_init = crate::mappings::sie_to_ee_state(&params, 1.0, &init, &f).unwrap();
            let ee = integrate(&ee_params, &IntegrationConfig::euler(Scheme::ExplicitEuler, 1.0, 2000), &ee_init, &f).unwrap();
            assert_eq!(stability_classify(&sie).label, stability_classify(&ee).label);
        }
    }

    #[test]
    fn diverging_error_grows() {
        let f = QuadraticObjective::diagonal(Vector::from_vec(vec![0.01, 1.0]), Vector::zeros(2)).unwrap();
        let params = p(2.0, 0.5, 0.2);
        let init = PhaseState::at_rest(Vector::from_element(2, 1.0));
        let traj = integrate(&params, &IntegrationConfig::euler(Scheme::SemiImplicitEuler, 1.0, 60), &init, &f).unwrap();
        let r = reference_solution(&params, &f, &aligned_reference_init(&traj).unwrap(), 1.0, 59, 0.01).unwrap();
        let e = error_series(&r, &traj).unwrap();
        let tail = &e.deltas[20..];
        let grows = tail.windows(10).all(|w| w[9] > w[0]);
        assert!(grows);
        assert!(matches!(global_decay_check(&e, 1.0, 0.01, 10), Err(Error::ConditionViolation(_))));
    }
}
