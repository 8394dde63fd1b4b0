//! A Born-distributed ensemble stays Born-distributed: histogram of 4000
//! particles at t = 5 against |Ψ(5)|², next to the sampling noise floor.

use bohmsim::analysis::{
    density_histogram, l1_distance, run_ensemble, sample_born, EnsembleSpec, GridSpec,
    HistogramGrid, Sampler,
};
use bohmsim::dynamics::IntegratorConfig;
use bohmsim::wavefunctions::{AnyModel, ModelSpec, QubitSpec};

fn main() -> bohmsim::Result<()> {
    let m: AnyModel<f64> = ModelSpec::Qubit(QubitSpec::default()).build()?;
    let bounds = [-8.0, 8.0, -8.0, 8.0];
    let grid = GridSpec::new(bounds, 40, 40);
    let n = 4000;
    let spec = EnsembleSpec {
        n,
        sampler: Sampler::Born { t0: 0.0, bounds },
        t_max: 5.0,
        grid: grid.clone(),
        lcn: false,
        final_only: true,
        ..EnsembleSpec::default()
    };
    let ens = run_ensemble(&m, &spec, &IntegratorConfig::default(), 4)?;
    let rho = density_histogram(&m, 5.0, &grid)?;
    println!(
        "L1(ensemble, |Psi(5)|^2) = {:.4}",
        l1_distance(&ens.histogram.mass(), &rho)?
    );

    let mut draws = Vec::new();
    for seed in [11, 12] {
        let mut h = HistogramGrid::new(&grid);
        for [x, y] in sample_born(&m, 5.0, n, seed, bounds)? {
            h.add(x, y);
        }
        draws.push(h.mass());
    }
    println!(
        "L1(two fresh draws)     = {:.4}",
        l1_distance(&draws[0], &draws[1])?
    );
    Ok(())
}
