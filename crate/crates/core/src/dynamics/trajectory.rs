use super::integrator::{Dp5, NoHook, OdeSystem, StepControl, StepHook};
use super::lcn::LcnSeries;
use super::velocity::{BohmFlow, TangentFlow};
use crate::error::{Error, Result};
use crate::param::Param;
use crate::scalar::{dist, norm, Real};
use crate::wavefunctions::WavefunctionModel;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: u64,
    /// Decimal digits; `None` runs in hardware precision.
    pub precision: Option<u32>,
    /// ξ is rescaled once |ξ|/|ξ₀| exceeds this.
    pub renorm_threshold: f64,
    pub sample_dt: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.1,
            min_step: 1e-12,
            max_steps: 500_000_000,
            precision: None,
            renorm_threshold: 1e6,
            sample_dt: 0.05,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Config(
                "integrator tolerances must be positive".into(),
            ));
        }
        if !(self.sample_dt > 0.0) {
            return Err(Error::Config("sample interval must be positive".into()));
        }
        if !(self.max_step > 0.0 && self.min_step > 0.0 && self.min_step < self.max_step) {
            return Err(Error::Config("need 0 < min_step < max_step".into()));
        }
        if !(self.renorm_threshold > 1.0) {
            return Err(Error::Config(
                "renormalization threshold must exceed 1".into(),
            ));
        }
        if let Some(d) = self.precision {
            if d < 16 {
                return Err(Error::Config(format!(
                    "extended precision needs at least 16 digits, got {d}"
                )));
            }
        }
        Ok(())
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step,
            min_step: self.min_step,
            max_steps: self.max_steps,
        }
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample<R> {
    pub t: R,
    pub q: Vec<R>,
    pub xi: Option<Vec<R>>,
    pub chi: Option<R>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryPath<R> {
    pub samples: Vec<TrajectorySample<R>>,
}

impl<R: Real> TrajectoryPath<R> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn last(&self) -> Option<&TrajectorySample<R>> {
        self.samples.last()
    }

    /// `t,x,y[,z][,chi]` with full working precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.samples.first().map_or(2, |s| s.q.len());
        let with_chi = self.samples.iter().any(|s| s.chi.is_some());
        let names = ["x", "y", "z"];
        let mut header = String::from("t");
        for n in &names[..dim.min(3)] {
            header.push(',');
            header.push_str(n);
        }
        if with_chi {
            header.push_str(",chi");
        }
        writeln!(w, "{header}")?;
        for s in &self.samples {
            let mut line = s.t.to_sig_string();
            for x in &s.q {
                line.push(',');
                line.push_str(&x.to_sig_string());
            }
            if with_chi {
                line.push(',');
                if let Some(c) = &s.chi {
                    line.push_str(&c.to_sig_string());
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Sample times t₀ + kΔt for k = 1..=n, then t_end if it is off the grid.
pub fn sample_times<R: Real>(t0: &R, t_end: &R, dt: &R) -> Vec<R> {
    let span = (t_end.clone() - t0.clone()).to_f64();
    let dtf = dt.to_f64();
    if span <= 0.0 {
        return Vec::new();
    }
    let n = (span / dtf + 1e-9).floor() as i64;
    let mut v: Vec<R> = (1..=n)
        .map(|k| t0.clone() + dt.clone() * R::from_i64(k))
        .collect();
    let last = v.last().map_or(t0.to_f64(), Real::to_f64);
    if t_end.to_f64() - last > 1e-9 * dtf {
        v.push(t_end.clone());
    }
    v
}

/// Drive `sys` through `times`, calling `obs` after each.
pub fn drive<R, S, H, F>(
    sys: &S,
    ctl: StepControl,
    t0: R,
    y0: Vec<R>,
    times: &[R],
    hook: &mut H,
    mut obs: F,
) -> Result<Vec<R>>
where
    R: Real,
    S: OdeSystem<R>,
    H: StepHook<R>,
    F: FnMut(usize, &R, &[R], &H) -> Result<()>,
{
    let mut dp = Dp5::new(ctl, t0, y0);
    for (k, t) in times.iter().enumerate() {
        dp.advance_to(sys, t, hook)?;
        obs(k, t, &dp.y, hook)?;
    }
    Ok(dp.y)
}

fn require_regular<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q0: &[R],
    t0: &R,
) -> Result<()> {
    if q0.len() != model.dim() {
        return Err(Error::Config(format!(
            "initial condition has {} coordinates, model needs {}",
            q0.len(),
            model.dim()
        )));
    }
    if model.near_node(q0, t0) {
        return Err(Error::NearNode);
    }
    Ok(())
}

/// Integrate and hand every sample (t, q) to `obs` without storing the path.
pub fn integrate_observed<R, M, F>(
    model: &M,
    q0: &[R],
    t0: &R,
    t_end: &R,
    cfg: &IntegratorConfig,
    mut obs: F,
) -> Result<Vec<R>>
where
    R: Real,
    M: WavefunctionModel<R> + ?Sized,
    F: FnMut(&R, &[R]),
{
    require_regular(model, q0, t0)?;
    let times = sample_times(t0, t_end, &R::from_f64(cfg.sample_dt));
    drive(
        &BohmFlow { model },
        cfg.step_control(),
        t0.clone(),
        q0.to_vec(),
        &times,
        &mut NoHook,
        |_, t, y, _| {
            obs(t, y);
            Ok(())
        },
    )
}

/// Plain trajectory sampled every Δt, the initial point included.
pub fn integrate_trajectory<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q0: &[R],
    t0: &R,
    t_end: &R,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryPath<R>> {
    let mut samples = vec![TrajectorySample {
        t: t0.clone(),
        q: q0.to_vec(),
        xi: None,
        chi: None,
    }];
    integrate_observed(model, q0, t0, t_end, cfg, |t, q| {
        samples.push(TrajectorySample {
            t: t.clone(),
            q: q.to_vec(),
            xi: None,
            chi: None,
        })
    })?;
    Ok(TrajectoryPath { samples })
}

/// Rescales the deviation block and keeps the discarded log growth.
pub struct Renormalizer<R> {
    start: usize,
    threshold: f64,
    norm0: R,
    pub log_acc: R,
}

impl<R: Real> Renormalizer<R> {
    pub fn new(start: usize, threshold: f64, xi0: &[R]) -> Self {
        Self {
            start,
            threshold,
            norm0: norm(xi0),
            log_acc: R::zero(),
        }
    }

    /// χ = (acc + ln(|ξ|/|ξ₀|)) / (t − t₀)
    pub fn chi(&self, xi: &[R], elapsed: &R) -> R {
        (self.log_acc.clone() + (norm(xi) / self.norm0.clone()).ln()) / elapsed.clone()
    }
}

impl<R: Real> StepHook<R> for Renormalizer<R> {
    fn after_step(&mut self, _t: &R, y: &mut [R]) -> bool {
        let ratio = norm(&y[self.start..]) / self.norm0.clone();
        if ratio.to_f64() <= self.threshold {
            return false;
        }
        let inv = ratio.recip();
        for v in &mut y[self.start..] {
            *v *= inv.clone();
        }
        self.log_acc += ratio.ln();
        true
    }
}

/// Co-integrates ξ and reports χ at every sample of a generic tangent system
/// whose state is `[q, ξ]` with ξ starting at index `start`.
pub fn lcn_run<R, S, F>(
    sys: &S,
    cfg: &IntegratorConfig,
    t0: &R,
    t_end: &R,
    y0: Vec<R>,
    start: usize,
    mut obs: F,
) -> Result<(Vec<R>, LcnSeries)>
where
    R: Real,
    S: OdeSystem<R>,
    F: FnMut(&R, &[R], &R),
{
    if norm(&y0[start..]).to_f64() == 0.0 {
        return Err(Error::Config("deviation vector must be nonzero".into()));
    }
    let mut renorm = Renormalizer::new(start, cfg.renorm_threshold, &y0[start..]);
    let times = sample_times(t0, t_end, &R::from_f64(cfg.sample_dt));
    let mut series = LcnSeries::default();
    let y = drive(
        sys,
        cfg.step_control(),
        t0.clone(),
        y0,
        &times,
        &mut renorm,
        |_, t, y, h| {
            let elapsed = t.clone() - t0.clone();
            let chi = h.chi(&y[start..], &elapsed);
            series.points.push((t.to_f64(), chi.to_f64()));
            obs(t, y, &chi);
            Ok(())
        },
    )?;
    Ok((y, series))
}

/// Trajectory plus finite-time LCN χ(t) = ln(|ξ|/|ξ₀|)/(t − t₀).
pub fn integrate_with_deviation<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q0: &[R],
    xi0: &[R],
    t0: &R,
    t_end: &R,
    cfg: &IntegratorConfig,
) -> Result<(TrajectoryPath<R>, LcnSeries)> {
    require_regular(model, q0, t0)?;
    let d = model.dim();
    if xi0.len() != d {
        return Err(Error::Config("deviation vector dimension mismatch".into()));
    }
    let mut y0 = q0.to_vec();
    y0.extend_from_slice(xi0);
    let mut samples = vec![TrajectorySample {
        t: t0.clone(),
        q: q0.to_vec(),
        xi: Some(xi0.to_vec()),
        chi: None,
    }];
    let (_, series) = lcn_run(
        &TangentFlow { model },
        cfg,
        t0,
        t_end,
        y0,
        d,
        |t, y, chi| {
            samples.push(TrajectorySample {
                t: t.clone(),
                q: y[..d].to_vec(),
                xi: Some(y[d..].to_vec()),
                chi: Some(chi.clone()),
            })
        },
    )?;
    Ok((TrajectoryPath { samples }, series))
}

/// Only the χ series, without keeping the path.
pub fn lcn_series<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q0: &[R],
    xi0: &[R],
    t0: &R,
    t_end: &R,
    cfg: &IntegratorConfig,
) -> Result<LcnSeries> {
    require_regular(model, q0, t0)?;
    let mut y0 = q0.to_vec();
    y0.extend_from_slice(xi0);
    Ok(lcn_run(
        &TangentFlow { model },
        cfg,
        t0,
        t_end,
        y0,
        model.dim(),
        |_, _, _| {},
    )?
    .1)
}

/// Unit deviation along the first axis.
pub fn default_xi0<R: Real>(dim: usize) -> Vec<R> {
    let mut v = vec![R::zero(); dim];
    v[0] = R::one();
    v
}

/// |q(t₀ + T) − q₀| after one candidate period.
pub fn detect_period<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q0: &[R],
    t0: &R,
    period: &R,
    cfg: &IntegratorConfig,
) -> Result<R> {
    require_regular(model, q0, t0)?;
    let t_end = t0.clone() + period.clone();
    let times = sample_times(t0, &t_end, &R::from_f64(cfg.sample_dt));
    let y = drive(
        &BohmFlow { model },
        cfg.step_control(),
        t0.clone(),
        q0.to_vec(),
        &times,
        &mut NoHook,
        |_, _, _, _| Ok(()),
    )?;
    Ok(dist(&y, q0))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// T = 2πq/ω₁ for ω₂/ω₁ = p/q in lowest terms.
pub fn commensurate_period<R: Real>(omega1: &Param, omega2: &Param) -> Result<R> {
    let not_rational = || {
        Error::Config(format!(
            "frequencies {omega1} and {omega2} are not both rational"
        ))
    };
    let (p1, q1) = omega1.as_rational().ok_or_else(not_rational)?;
    let (p2, q2) = omega2.as_rational().ok_or_else(not_rational)?;
    // ω₂/ω₁ = (p2 q1)/(q2 p1)
    let (num, den) = (p2 * q1, q2 * p1);
    let g = gcd(num, den);
    let q = (den / g).abs();
    Ok(R::pi() * 2.0 * R::from_i64(q) / omega1.eval::<R>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::SystemASpec;

    #[test]
    fn grid_hits_sample_times_exactly() {
        let m = SystemASpec::default().build::<f64>().unwrap();
        let p = integrate_trajectory(&m, &[0.75, 0.25], &0.0, &1.0, &IntegratorConfig::default())
            .unwrap();
        assert_eq!(p.len(), 21);
        for (k, s) in p.samples.iter().enumerate() {
            assert_eq!(s.t, 0.05 * k as f64);
        }
    }

    #[test]
    fn commensurate_periods() {
        let t: f64 = commensurate_period(&1.0.into(), &"3/2".into()).unwrap();
        assert!((t - 4.0 * std::f64::consts::PI).abs() < 1e-15);
        let t: f64 = commensurate_period(&1.0.into(), &"629/676".into()).unwrap();
        assert!((t - 2.0 * std::f64::consts::PI * 676.0).abs() < 1e-9);
        assert!(commensurate_period::<f64>(&1.0.into(), &"1/sqrt(2)".into()).is_err());
    }

    #[test]
    fn csv_header_and_digits() {
        let m = SystemASpec::default().build::<f64>().unwrap();
        let (p, _) = integrate_with_deviation(
            &m,
            &[0.75, 0.25],
            &[1.0, 0.0],
            &0.0,
            &0.1,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x,y,chi"));
        let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 4);
        assert_eq!(
            row[1]
                .split('e')
                .next()
                .unwrap()
                .replace(['.', '-'], "")
                .len(),
            17
        );
    }

    #[test]
    fn starting_on_node_is_rejected() {
        let m = SystemASpec::default().build::<f64>().unwrap();
        let n = m.node(&1.27).unwrap();
        let r = integrate_trajectory(&m, &n, &1.27, &2.0, &IntegratorConfig::default());
        assert!(matches!(r, Err(Error::NearNode)));
    }
}
