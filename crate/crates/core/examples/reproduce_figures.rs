//! Regenerates the QHM and stability figures as CSV bundles in a temporary
//! directory (the continuous-flow figure takes longer; pass `fig2` or `all`
//! as the first argument to include it).

use gmflow::cli::config::Figure;
use gmflow::cli::reproduce::reproduce;

pub fn run_figures(figures: &[Figure]) -> gmflow::Result<()> {
    let dir = std::env::temp_dir().join(format!("gmflow-figures-{}", std::process::id()));
    for &figure in figures {
        let summary = reproduce(figure, &dir, 0)?;
        println!("{}", serde_json::to_string_pretty(&summary)?);
    }
    println!("written to {}", dir.display());
    Ok(())
}

pub fn run() -> gmflow::Result<()> {
    run_figures(&[Figure::Fig3, Figure::Fig4])
}

fn main() -> gmflow::Result<()> {
    match std::env::args().nth(1).as_deref() {
        Some("fig2") => run_figures(&[Figure::Fig2]),
        Some("all") => run_figures(&[Figure::All]),
        _ => run(),
    }
}
