//! Runs every example's `run()` so that the examples keep compiling and
//! their internal assertions keep holding.

#[allow(dead_code)]
#[path = "../examples/objectives.rs"]
mod objectives;

#[test]
fn objectives_runs() {
    objectives::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/continuous_flow.rs"]
mod continuous_flow;

#[test]
fn continuous_flow_runs() {
    continuous_flow::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/euler_equivalence.rs"]
mod euler_equivalence;

#[test]
fn euler_equivalence_runs() {
    euler_equivalence::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/named_methods.rs"]
mod named_methods;

#[test]
fn named_methods_runs() {
    named_methods::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/certified_rates.rs"]
mod certified_rates;

#[test]
fn certified_rates_runs() {
    certified_rates::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/truncation_error.rs"]
mod truncation_error;

#[test]
fn truncation_error_runs() {
    truncation_error::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/stability_contrast.rs"]
mod stability_contrast;

#[test]
fn stability_contrast_runs() {
    stability_contrast::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/reproduce_figures.rs"]
mod reproduce_figures;

#[test]
fn reproduce_figures_runs() {
    reproduce_figures::run().unwrap();
}
