//! Finite-time Lyapunov number of two system-A trajectories: one ordered,
//! one chaotic.

use bohmsim::dynamics::{
    classify_trajectory, default_xi0, lcn_series, IntegratorConfig, LcnThresholds,
};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, SystemASpec};

fn main() -> bohmsim::Result<()> {
    let model: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build()?;
    let cfg = IntegratorConfig::default();
    for ic in [[0.75, 0.25], [-1.0, -1.0]] {
        let series = lcn_series(&model, &ic, &default_xi0(2), &0.0, &1e4, &cfg)?;
        let c = classify_trajectory(&series, &LcnThresholds::default())?;
        println!("IC {ic:?}");
        for t in [1e1, 1e2, 1e3, 1e4] {
            let chi = series
                .points
                .iter()
                .find(|p| p.0 >= t)
                .map_or(f64::NAN, |p| p.1);
            println!("  chi({t:>7}) = {chi:+.5e}");
        }
        println!(
            "  {}: trailing slope {:.3}, mean {:.4}",
            c.class, c.slope, c.trailing_mean
        );
    }
    Ok(())
}
