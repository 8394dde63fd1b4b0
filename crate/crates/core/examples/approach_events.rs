//! Close passages of a chaotic system-A trajectory by the nodal point and
//! the change of χ across each.

use bohmsim::dynamics::{default_xi0, integrate_with_deviation, IntegratorConfig};
use bohmsim::npxpc::{approach_events, mean_chi_jump};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, SystemASpec};

fn main() -> bohmsim::Result<()> {
    let m: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build()?;
    let q0 = [1.41, 2.134];
    let (path, _) = integrate_with_deviation(
        &m,
        &q0,
        &default_xi0(2),
        &0.0,
        &500.0,
        &IntegratorConfig::default(),
    )?;
    let events = approach_events(&path, &m, 0.5);
    for e in &events {
        println!(
            "t {:7.2}-{:7.2}  d_node {:.3}  d_X {}  chi {:+.4} -> {:+.4}",
            e.t_start,
            e.t_end,
            e.d_node_min,
            e.d_x_min.map_or("   -".into(), |d| format!("{d:.3}")),
            e.chi_before.unwrap_or(f64::NAN),
            e.chi_after.unwrap_or(f64::NAN),
        );
    }
    println!(
        "{} approaches, mean chi jump {:?}",
        events.len(),
        mean_chi_jump(&events, 0.5)
    );
    Ok(())
}
