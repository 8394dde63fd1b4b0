//! Driven anharmonic oscillator: chaotic at ε = 3, a rotation at ε = 0.

use bohmsim::analysis::{box_counting_dimension, fit_conic};
use bohmsim::classical::{
    classical_integrator, classical_lcn, classical_section, DrivenOscillatorSpec,
};
use bohmsim::dynamics::{classify_trajectory, LcnThresholds};

fn main() -> bohmsim::Result<()> {
    let cfg = classical_integrator();
    for eps in [3.0, 0.0] {
        let spec = DrivenOscillatorSpec::with_epsilon(eps);
        let s = classical_lcn(&spec, [1.0, 1.0], 1e4, &cfg)?;
        let c = classify_trajectory(&s, &LcnThresholds::default())?;
        let sec = classical_section(&spec, [1.0, 1.0], 2000, &cfg)?;
        let pts: Vec<[f64; 2]> = sec.iter().map(|p| [p.x, p.xdot]).collect();
        let dim = box_counting_dimension(&pts, 2..=6).unwrap_or(f64::NAN);
        let conic = fit_conic(&pts).map_or(f64::NAN, |f| f.max_distance);
        println!(
            "eps = {eps}: {} chi(1e4) = {:.4}, section box dimension {dim:.2}, conic misfit {conic:.1e}",
            c.class,
            s.last().unwrap().1
        );
    }
    Ok(())
}
