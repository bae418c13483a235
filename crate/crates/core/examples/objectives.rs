//! Builds both objective families, checks their gradients against finite
//! differences and round-trips one through JSON.

use gmflow::objectives::{grad_check, make_logistic, make_quadratic, Objective, ObjectiveSpec};

pub fn run() -> gmflow::Result<()> {
    let quad = ObjectiveSpec::from(make_quadratic(10, 0.01, 1.0, 42)?);
    let logi = ObjectiveSpec::from(make_logistic(10, 100, 1e-2, 42)?);
    for (name, obj) in [("quadratic", &quad), ("logistic", &logi)] {
        let x = obj.minimizer().expect("known minimizer").add_scalar(0.5);
        let err = grad_check(obj, &x, 1e-6)?;
        println!(
            "{name:>9}: mu = {:.4e}, L = {:.4e}, f* = {:.6}, grad check {err:.2e}",
            obj.mu(),
            obj.lipschitz(),
            obj.min_value().expect("known minimum")
        );
        assert!(err < 1e-6);
    }
    let restored = ObjectiveSpec::from_json(&logi.to_json()?)?;
    assert_eq!(restored, logi);
    println!("logistic objective survives a JSON round trip");
    Ok(())
}

fn main() -> gmflow::Result<()> {
    run()
}
