//! Heavy ball, Nesterov and QHM written in their usual form agree with the
//! generalized momentum iteration under both schemes.

use gmflow::integrators::{integrate, IntegrationConfig, Scheme};
use gmflow::mappings::{named_initial_state, named_to_gm, run_named, NamedOptimizerConfig};
use gmflow::objectives::{make_quadratic, Objective};

pub fn run() -> gmflow::Result<()> {
    let obj = make_quadratic(8, 0.01, 1.0, 5)?;
    let x0 = obj.minimizer().expect("known minimizer").add_scalar(1.0);
    let s = 0.25;
    let methods = [
        NamedOptimizerConfig::HeavyBall { s, beta: 0.8 },
        NamedOptimizerConfig::Nesterov { s, beta: 0.8 },
        NamedOptimizerConfig::QuasiHyperbolic { s, a: 0.7, b: 0.8 },
    ];
    for named in &methods {
        let reference = run_named(named, &x0, &obj, 300)?;
        for scheme in [Scheme::SemiImplicitEuler, Scheme::ExplicitEuler] {
            let params = named_to_gm(named, scheme)?;
            let init = named_initial_state(named, scheme, &x0, &obj)?;
            let traj = integrate(&params, &IntegrationConfig::euler(scheme, s, 300), &init, &obj)?;
            let worst = traj
                .positions()
                .zip(&reference)
                .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
                .fold(0.0, f64::max);
            println!(
                "{:>3} as {:<3} (m, n, q) = ({:.4}, {:.4}, {:.4}): max deviation {worst:.2e}",
                named.family(),
                scheme.label(),
                params.m(),
                params.n(),
                params.q()
            );
            assert!(worst < 1e-10);
        }
    }
    Ok(())
}

fn main() -> gmflow::Result<()> {
    run()
}
