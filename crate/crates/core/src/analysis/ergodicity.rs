//! Long single trajectories against ensembles.

use super::ensemble::{run_ensemble, trajectory_histogram, EnsembleSpec};
use super::histogram::{l1_distance, mean_density_histogram, HistogramGrid};
use crate::dynamics::{Classification, IntegratorConfig, OrderClass};
use crate::error::Result;
use crate::wavefunctions::AnyModel;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErgodicityConfig {
    pub ic: [f64; 2],
    /// a further IC compared with the first
    pub second_ic: Option<[f64; 2]>,
    pub t_long: f64,
    pub ensemble: EnsembleSpec,
    /// also compare with |Ψ|² averaged over the ensemble horizon
    pub compare_density: bool,
    /// distance below which two histograms count as the same
    pub same_below: f64,
}

impl Default for ErgodicityConfig {
    fn default() -> Self {
        Self {
            ic: [2.0, -2.0],
            second_ic: None,
            t_long: 5e4,
            ensemble: EnsembleSpec::default(),
            compare_density: false,
            same_below: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub d_single_vs_ensemble: f64,
    pub d_vs_density: Option<f64>,
    pub d_mutual: Option<f64>,
    pub single_class: Option<Classification>,
    pub second_class: Option<Classification>,
    pub ensemble_classes: Vec<(OrderClass, usize)>,
    pub single_occupied_fraction: f64,
    pub ergodic: bool,
    pub seed: u64,
    pub config: ErgodicityConfig,
    #[serde(skip)]
    pub single: Option<HistogramGrid>,
    #[serde(skip)]
    pub ensemble: Option<HistogramGrid>,
}

pub fn ergodicity_test(
    model: &AnyModel<f64>,
    cfg: &ErgodicityConfig,
    icfg: &IntegratorConfig,
    workers: usize,
) -> Result<ErgodicityReport> {
    let spec = &cfg.ensemble;
    let long = |ic: [f64; 2]| {
        trajectory_histogram(model, &ic, cfg.t_long, spec.dt, &spec.grid, icfg, true)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::error::Error::Config(format!("thread pool: {e}")))?;
    let (single, (second, ens)) = pool.install(|| {
        rayon::join(
            || long(cfg.ic),
            || {
                rayon::join(
                    || cfg.second_ic.map(long),
                    || run_ensemble(model, spec, icfg, workers),
                )
            },
        )
    });
    let (single, lcn) = single?;
    let ens = ens?;
    let second = second.transpose()?;
    let d_single_vs_ensemble = l1_distance(&single.mass(), &ens.histogram.mass())?;
    let d_mutual = match &second {
        Some((h, _)) => Some(l1_distance(&single.mass(), &h.mass())?),
        None => None,
    };
    let d_vs_density = if cfg.compare_density {
        let times: Vec<f64> = (0..=200).map(|k| spec.t_max * k as f64 / 200.0).collect();
        let rho = mean_density_histogram(model, &times, &spec.grid)?;
        Some(l1_distance(&single.mass(), &rho)?)
    } else {
        None
    };
    let ergodic =
        d_single_vs_ensemble < cfg.same_below && d_mutual.is_none_or(|d| d < cfg.same_below);
    Ok(ErgodicityReport {
        d_single_vs_ensemble,
        d_vs_density,
        d_mutual,
        single_class: lcn.and_then(|l| l.0),
        second_class: second.as_ref().and_then(|s| s.1.clone().and_then(|l| l.0)),
        ensemble_classes: ens.class_counts().to_vec(),
        single_occupied_fraction: single.occupied_fraction(),
        ergodic,
        seed: spec.seed,
        config: cfg.clone(),
        single: Some(single),
        ensemble: Some(ens.histogram),
    })
}
