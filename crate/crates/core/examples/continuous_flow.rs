//! Integrates the continuous flow with RK4 and compares the energy with its
//! exponential envelope `e^{-γ₁t}E(0)`.

use gmflow::integrators::{integrate, IntegrationConfig};
use gmflow::model::{continuous_energy, gamma1, optimal_q, ModelParams, PhaseState};
use gmflow::objectives::{make_quadratic, Objective};

pub fn run() -> gmflow::Result<()> {
    let mu = 0.01;
    let obj = make_quadratic(10, mu, 1.0, 7)?;
    let (m, n) = (0.2, 1.0);
    let params = ModelParams::new(m, n, optimal_q(m, n, mu)?)?;
    let rate = gamma1(&params, mu)?;
    let config = IntegrationConfig::rk4(1e-2, 5000).with_record_every(500);
    let init = PhaseState::at_rest(obj.minimizer().expect("known minimizer").add_scalar(1.0));
    let traj = integrate(&params, &config, &init, &obj)?;

    let e0 = continuous_energy(&params, &traj.states[0], &obj)?;
    println!("q = {:.6}, gamma1 = {rate:.6}", params.q());
    println!("{:>6} {:>12} {:>12}", "t", "E(t)", "envelope");
    for (i, state) in traj.states.iter().enumerate() {
        let t = traj.time(i);
        let e = continuous_energy(&params, state, &obj)?;
        let envelope = (-rate * t).exp() * e0;
        println!("{t:>6.1} {e:>12.4e} {envelope:>12.4e}");
        assert!(e <= envelope * (1.0 + 1e-6));
    }
    Ok(())
}

fn main() -> gmflow::Result<()> {
    run()
}
