//! Two parameter triples at a large step: for one only SIE converges, for the
//! other only EE does. The spectral-radius oracle predicts each verdict.

use gmflow::analysis::{spectral_radius_oracle, stability_classify};
use gmflow::integrators::{integrate, IntegrationConfig, Scheme};
use gmflow::model::{ModelParams, PhaseState};
use gmflow::objectives::{make_quadratic, Objective};

pub fn run() -> gmflow::Result<()> {
    let (mu, l, s) = (0.01, 1.0, 1.0);
    let obj = make_quadratic(2, mu, l, 0)?;
    let init = PhaseState::at_rest(obj.minimizer().expect("known minimizer").add_scalar(1.0));
    let q = 2.0 * mu.sqrt();
    for (label, params) in [("left", ModelParams::new(1.0, 1.0, q)?), ("right", ModelParams::new(2.0, 0.5, q)?)] {
        for scheme in [Scheme::SemiImplicitEuler, Scheme::ExplicitEuler] {
            let traj = integrate(&params, &IntegrationConfig::euler(scheme, s, 2000), &init, &obj)?;
            let verdict = stability_classify(&traj);
            let radius = [mu, l]
                .iter()
                .map(|&lam| spectral_radius_oracle(&params, s, scheme, lam))
                .fold(0.0, f64::max);
            println!(
                "{label:>5} {:<3} radius {radius:.6} -> {}",
                scheme.label(),
                verdict.label.as_str()
            );
        }
    }
    Ok(())
}

fn main() -> gmflow::Result<()> {
    run()
}
