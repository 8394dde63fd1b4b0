//! 3-D superpositions with integrals of motion: the pear surface and the
//! pair x² + z², y.

use bohmsim::analysis::{surface_residual, IntegralSurfaceSpec};
use bohmsim::dynamics::{integrate_trajectory, IntegratorConfig};
use bohmsim::wavefunctions::SuperpositionSpec;

fn main() -> bohmsim::Result<()> {
    let cfg = IntegratorConfig::default();
    let cases = [
        (
            "pear",
            SuperpositionSpec::pear(),
            IntegralSurfaceSpec::Pear {
                omega3: "sqrt(3)".into(),
            },
        ),
        (
            "open",
            SuperpositionSpec::open_surface(),
            IntegralSurfaceSpec::Open {
                omega3: "sqrt(3)".into(),
            },
        ),
        (
            "complete",
            SuperpositionSpec::complete_integrable(),
            IntegralSurfaceSpec::CirclePair,
        ),
    ];
    for (name, spec, surface) in cases {
        let m = spec.build::<f64>()?;
        let path = integrate_trajectory(&m, &[1.0, 0.7, 1.0], &0.0, &200.0, &cfg)?;
        let c0 = surface.invariants(&path.samples[0].q, 0.0)?;
        println!(
            "{name:<9} C(0) = {c0:.6?}, max relative drift over [0, 200] = {:.2e}",
            surface_residual(&path, &surface)?
        );
    }
    Ok(())
}
