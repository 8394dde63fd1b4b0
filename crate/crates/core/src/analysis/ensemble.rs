//! Parallel ensembles with per-index random streams.

use super::histogram::{GridSpec, HistogramGrid};
use super::sampling::{BornSampler, Sampler};
use super::stream_rng;
use crate::dynamics::{
    classify_trajectory, default_xi0, integrate_observed, lcn_run, Classification,
    IntegratorConfig, LcnThresholds, OrderClass, TangentFlow,
};
use crate::error::{Error, Result};
use crate::wavefunctions::{AnyModel, WavefunctionModel};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fraction of failed trajectories that fails the whole run.
pub const MAX_FAILURE_FRACTION: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleSpec {
    pub n: usize,
    pub sampler: Sampler,
    pub seed: u64,
    /// sampling interval
    pub dt: f64,
    pub t_max: f64,
    pub grid: GridSpec,
    /// co-integrate the deviation vector and classify every trajectory
    pub lcn: bool,
    /// histogram only the position at t_max
    pub final_only: bool,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            n: 250,
            sampler: Sampler::default(),
            seed: 1,
            dt: 0.05,
            t_max: 1000.0,
            grid: GridSpec {
                nx: 90,
                ny: 90,
                ..GridSpec::default()
            },
            lcn: true,
            final_only: false,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("ensemble needs at least one particle".into()));
        }
        if !(self.dt > 0.0) || !(self.t_max > 0.0) {
            return Err(Error::Config("dt and t_max must be positive".into()));
        }
        if let Sampler::Explicit { points } = &self.sampler {
            if points.len() != self.n {
                return Err(Error::Config(format!(
                    "{} explicit points for n = {}",
                    points.len(),
                    self.n
                )));
            }
        }
        self.grid.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub index: usize,
    pub q0: Vec<f64>,
    pub error: Option<String>,
    pub classification: Option<Classification>,
    pub chi_final: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub histogram: HistogramGrid,
    pub summaries: Vec<TrajectorySummary>,
    pub failed: usize,
}

impl EnsembleResult {
    pub fn class_counts(&self) -> [(OrderClass, usize); 3] {
        let count = |c: OrderClass| {
            self.summaries
                .iter()
                .filter(|s| s.classification.as_ref().is_some_and(|k| k.class == c))
                .count()
        };
        [
            (OrderClass::Ordered, count(OrderClass::Ordered)),
            (OrderClass::Chaotic, count(OrderClass::Chaotic)),
            (OrderClass::Undetermined, count(OrderClass::Undetermined)),
        ]
    }
}

/// Class and final χ of one trajectory.
pub type LcnOutcome = (Option<Classification>, f64);

/// Histogram of a single trajectory, with its class and final χ when `lcn`.
pub fn trajectory_histogram(
    model: &AnyModel<f64>,
    q0: &[f64],
    t_max: f64,
    dt: f64,
    grid: &GridSpec,
    cfg: &IntegratorConfig,
    lcn: bool,
) -> Result<(HistogramGrid, Option<LcnOutcome>)> {
    let mut h = HistogramGrid::new(grid);
    h.add(q0[0], q0[1]);
    let cfg = IntegratorConfig {
        sample_dt: dt,
        ..cfg.clone()
    };
    if !lcn {
        integrate_observed(model, q0, &0.0, &t_max, &cfg, |_, q| h.add(q[0], q[1]))?;
        return Ok((h, None));
    }
    lcn_histogram(model, q0, t_max, &cfg, h)
}

fn lcn_histogram(
    model: &AnyModel<f64>,
    q0: &[f64],
    t_max: f64,
    cfg: &IntegratorConfig,
    mut h: HistogramGrid,
) -> Result<(HistogramGrid, Option<LcnOutcome>)> {
    if q0.len() != model.dim() {
        return Err(Error::Config("initial condition dimension".into()));
    }
    if model.near_node(q0, &0.0) {
        return Err(Error::NearNode);
    }
    let d = model.dim();
    let mut y0 = q0.to_vec();
    y0.extend(default_xi0::<f64>(d));
    let (_, series) = lcn_run(
        &TangentFlow { model },
        cfg,
        &0.0,
        &t_max,
        y0,
        d,
        |_, y, _| h.add(y[0], y[1]),
    )?;
    let chi = series.last().map_or(f64::NAN, |p| p.1);
    // short runs stay unclassified
    let class = classify_trajectory(&series, &LcnThresholds::default()).ok();
    Ok((h, Some((class, chi))))
}

/// q(t_max) from q(0) = q0.
pub fn final_position(
    model: &AnyModel<f64>,
    q0: &[f64],
    t_max: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let cfg = IntegratorConfig {
        sample_dt: t_max,
        ..cfg.clone()
    };
    integrate_observed(model, q0, &0.0, &t_max, &cfg, |_, _| ())
}

fn initial_point(
    spec: &EnsembleSpec,
    born: Option<&BornSampler<'_>>,
    index: usize,
) -> Result<Vec<f64>> {
    let mut rng = stream_rng(spec.seed, index as u64);
    match &spec.sampler {
        Sampler::Born { .. } => Ok(born.expect("sampler built").draw(&mut rng)?.to_vec()),
        Sampler::Uniform {
            bounds: [x0, x1, y0, y1],
        } => Ok(vec![rng.gen_range(*x0..*x1), rng.gen_range(*y0..*y1)]),
        Sampler::Explicit { points } => Ok(points[index].clone()),
    }
}

/// Runs all trajectories on `workers` threads (0 = all cores). The grid
/// and summaries do not depend on the worker count.
pub fn run_ensemble(
    model: &AnyModel<f64>,
    spec: &EnsembleSpec,
    cfg: &IntegratorConfig,
    workers: usize,
) -> Result<EnsembleResult> {
    spec.validate()?;
    cfg.validate()?;
    if model.dim() != 2 {
        return Err(Error::Unsupported(
            "ensembles histogram planar models".into(),
        ));
    }
    let born = match &spec.sampler {
        Sampler::Born { t0, bounds } => Some(BornSampler::new(model, *t0, *bounds)?),
        _ => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let one = |index: usize| -> (TrajectorySummary, Option<HistogramGrid>) {
        let q0 = match initial_point(spec, born.as_ref(), index) {
            Ok(q) => q,
            Err(e) => {
                return (
                    TrajectorySummary {
                        index,
                        q0: vec![],
                        error: Some(e.to_string()),
                        classification: None,
                        chi_final: None,
                    },
                    None,
                )
            }
        };
        let run = if spec.final_only {
            final_position(model, &q0, spec.t_max, cfg).map(|q| {
                let mut h = HistogramGrid::new(&spec.grid);
                h.add(q[0], q[1]);
                (h, None)
            })
        } else {
            trajectory_histogram(model, &q0, spec.t_max, spec.dt, &spec.grid, cfg, spec.lcn)
        };
        match run {
            Ok((h, lcn)) => (
                TrajectorySummary {
                    index,
                    q0,
                    error: None,
                    classification: lcn.as_ref().and_then(|l| l.0.clone()),
                    chi_final: lcn.map(|l| l.1),
                },
                Some(h),
            ),
            Err(e) => (
                TrajectorySummary {
                    index,
                    q0,
                    error: Some(e.to_string()),
                    classification: None,
                    chi_final: None,
                },
                None,
            ),
        }
    };
    let empty = HistogramGrid::new(&spec.grid);
    let (mut summaries, histogram) = pool.install(|| {
        (0..spec.n)
            .into_par_iter()
            .map(one)
            .fold(
                || (Vec::new(), empty.clone()),
                |(mut v, mut h), (s, g)| {
                    if let Some(g) = g {
                        h.merge(&g).expect("same geometry");
                    }
                    v.push(s);
                    (v, h)
                },
            )
            // integer addition: the merge order cannot change the result
            .reduce(
                || (Vec::new(), empty.clone()),
                |(mut va, mut ha), (vb, hb)| {
                    ha.merge(&hb).expect("same geometry");
                    va.extend(vb);
                    (va, ha)
                },
            )
    });
    summaries.sort_by_key(|s| s.index);
    let failed = summaries.iter().filter(|s| s.error.is_some()).count();
    if failed as f64 > MAX_FAILURE_FRACTION * spec.n as f64 {
        return Err(Error::EnsembleFailure {
            failed,
            total: spec.n,
        });
    }
    Ok(EnsembleResult {
        histogram,
        summaries,
        failed,
    })
}
