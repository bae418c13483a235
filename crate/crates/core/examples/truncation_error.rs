//! Measures the one-step error of both Euler schemes against a fine RK4
//! reference and fits the log-log slope over a range of step sizes.

use gmflow::analysis::local_order;
use gmflow::integrators::Scheme;
use gmflow::model::{ModelParams, PhaseState};
use gmflow::objectives::{make_quadratic, Objective};

pub fn run() -> gmflow::Result<()> {
    let obj = make_quadratic(5, 0.1, 1.0, 9)?;
    let init = PhaseState::new(
        obj.minimizer().expect("known minimizer").add_scalar(1.0),
        gmflow::objectives::Vector::from_element(5, 0.3),
    )?;
    let family = |s: f64| ModelParams::new(s.sqrt(), 1.0, 1.0).expect("valid");
    let grid = [1e-5, 3e-5, 1e-4, 3e-4, 1e-3];
    for scheme in [Scheme::ExplicitEuler, Scheme::SemiImplicitEuler] {
        let fit = local_order(&family, &obj, &init, &grid, scheme)?;
        println!("{}: slope {:.4}", scheme.label(), fit.slope);
        for (s, delta) in &fit.points {
            println!("    s = {s:.0e}  delta = {delta:.3e}");
        }
    }
    Ok(())
}

fn main() -> gmflow::Result<()> {
    run()
}
