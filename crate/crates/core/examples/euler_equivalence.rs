//! An explicit-Euler run and the semi-implicit run with mapped parameters
//! and velocity trace the same positions.

use gmflow::integrators::{integrate, IntegrationConfig, Scheme};
use gmflow::mappings::{ee_to_sie, ee_to_sie_state};
use gmflow::model::{ModelParams, PhaseState};
use gmflow::objectives::{make_logistic, Objective};

pub fn run() -> gmflow::Result<()> {
    let obj = make_logistic(5, 50, 1e-2, 3)?;
    let s = 0.04;
    let ee = ModelParams::new(0.5, 0.6, 1.2)?;
    let sie = ee_to_sie(&ee, s)?;
    println!("EE  (m, n, q) = ({:.4}, {:.4}, {:.4})", ee.m(), ee.n(), ee.q());
    println!("SIE (m, n, q) = ({:.4}, {:.4}, {:.4})", sie.m(), sie.n(), sie.q());

    let init = PhaseState::at_rest(obj.minimizer().expect("known minimizer").add_scalar(1.0));
    let a = integrate(&ee, &IntegrationConfig::euler(Scheme::ExplicitEuler, s, 500), &init, &obj)?;
    let init_sie = ee_to_sie_state(&ee, s, &init, &obj)?;
    let b = integrate(&sie, &IntegrationConfig::euler(Scheme::SemiImplicitEuler, s, 500), &init_sie, &obj)?;

    let worst = a
        .positions()
        .zip(b.positions())
        .map(|(x, y)| (x - y).norm() / x.norm().max(1.0))
        .fold(0.0, f64::max);
    println!("max relative position difference over 500 steps: {worst:.2e}");
    assert!(worst < 1e-9);
    Ok(())
}

fn main() -> gmflow::Result<()> {
    run()
}
