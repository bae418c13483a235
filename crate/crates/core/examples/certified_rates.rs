//! Checks the step-size conditions for Nesterov's method, then certifies the
//! discrete energy decay and the implied function-value bound along a run.

use gmflow::integrators::{integrate, IntegrationConfig, Scheme};
use gmflow::lyapunov::{certify_decay, gamma2, sie_conditions_ok};
use gmflow::mappings::{named_initial_state, named_to_gm, NamedOptimizerConfig};
use gmflow::objectives::{make_quadratic, Objective};

pub fn run() -> gmflow::Result<()> {
    let (mu, l, s) = (0.01, 1.0, 0.25);
    let obj = make_quadratic(10, mu, l, 1)?;
    let beta = (1.0 - (mu * s).sqrt()) / (1.0 + (mu * s).sqrt());
    let named = NamedOptimizerConfig::Nesterov { s, beta };
    let params = named_to_gm(&named, Scheme::SemiImplicitEuler)?;

    let report = sie_conditions_ok(&params, s, l);
    println!("conditions hold: {} {:?}", report.ok, report.violations);
    println!("gamma2 = {:.6}", gamma2(&params, mu, l)?);

    let x0 = obj.minimizer().expect("known minimizer").add_scalar(1.0);
    let init = named_initial_state(&named, Scheme::SemiImplicitEuler, &x0, &obj)?;
    let traj = integrate(&params, &IntegrationConfig::euler(Scheme::SemiImplicitEuler, s, 1000), &init, &obj)?;
    let cert = certify_decay(&traj, &obj)?;
    println!(
        "per-step bound {:.6}, violations {}, E(0) = {:.4e}, E(end) = {:.4e}",
        cert.per_step_bound,
        cert.violations.len(),
        cert.energies[0],
        cert.energies.last().expect("nonempty")
    );
    for k in [0, 250, 500, 999] {
        println!("k = {k:>4}: f - f* = {:.3e} <= {:.3e}", traj.f_gap[k], cert.f_gap_bound(k));
    }
    assert!(cert.is_clean() && cert.f_gap_bound_violations(&traj.f_gap).is_empty());
    Ok(())
}

fn main() -> gmflow::Result<()> {
    run()
}
