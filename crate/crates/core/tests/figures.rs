//! Qualitative trends of the regenerated figures.

use gmflow::cli::reproduce::{fig2_curve, fig2_params, fig3, fig4, MU, L};
use gmflow::model::optimal_q;
use gmflow::objectives::make_quadratic;

#[test]
fn optimal_friction_decays_fastest_in_the_q_sweep() {
    let obj = make_quadratic(10, MU, L, 0).unwrap();
    let curves: Vec<_> = fig2_params()
        .into_iter()
        .filter(|(panel, ..)| *panel == "left")
        .map(|(panel, value, params)| fig2_curve(panel, value, params, &obj).unwrap())
        .collect();
    let best = curves.iter().max_by(|a, b| a.decay_rate.total_cmp(&b.decay_rate)).unwrap();
    assert_eq!(best.value, optimal_q(0.2, 1.0, MU).unwrap());
}

#[test]
fn qhm_on_the_quadratic_speeds_up_with_a() {
    let runs = fig3(0).unwrap();
    let rhos: Vec<f64> = runs
        .iter()
        .filter(|r| r.problem == "quadratic")
        .map(|r| r.rho.unwrap())
        .collect();
    assert!(rhos.windows(2).all(|w| w[1] < w[0]), "{rhos:?}");
}

#[test]
fn stability_figure_verdicts() {
    let verdicts: Vec<_> = fig4(0)
        .unwrap()
        .into_iter()
        .map(|r| format!("{}-{}:{}", r.panel, r.scheme.label(), r.verdict.label.as_str()))
        .collect();
    assert_eq!(
        verdicts,
        ["left-SIE:CONVERGED", "left-EE:NON_CONVERGENT", "right-SIE:DIVERGED", "right-EE:CONVERGED"]
    );
}
