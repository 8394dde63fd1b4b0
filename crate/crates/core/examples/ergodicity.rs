//! Reduced-size ergodicity comparison at maximal entanglement: one long
//! chaotic trajectory against a short Born ensemble. The full-size run
//! (t = 5·10⁴, 250 particles to t = 10³) lives in the acceptance suite.

use bohmsim::analysis::{ergodicity_test, EnsembleSpec, ErgodicityConfig};
use bohmsim::dynamics::IntegratorConfig;
use bohmsim::wavefunctions::{AnyModel, ModelSpec, QubitSpec};

fn main() -> bohmsim::Result<()> {
    let m: AnyModel<f64> = ModelSpec::Qubit(QubitSpec::default()).build()?;
    let cfg = ErgodicityConfig {
        ic: [2.0, -2.0],
        second_ic: Some([1.0, 1.0]),
        t_long: 5e3,
        ensemble: EnsembleSpec {
            n: 60,
            t_max: 300.0,
            ..EnsembleSpec::default()
        },
        compare_density: true,
        ..ErgodicityConfig::default()
    };
    let r = ergodicity_test(&m, &cfg, &IntegratorConfig::default(), 4)?;
    println!("L1(single, ensemble)     {:.3}", r.d_single_vs_ensemble);
    println!(
        "L1(single, second IC)    {:.3}",
        r.d_mutual.unwrap_or(f64::NAN)
    );
    println!(
        "L1(single, mean |Psi|^2) {:.3}",
        r.d_vs_density.unwrap_or(f64::NAN)
    );
    println!("ensemble classes {:?}", r.ensemble_classes);
    println!("practically the same: {}", r.ergodic);
    Ok(())
}
