//! Driven anharmonic oscillator H = ½(ẋ² + x²) + (εx⁴/4)e^{−x²/2σ²}cos ωt.

use crate::analysis::stroboscopic_section;
use crate::dynamics::{lcn_run, IntegratorConfig, LcnSeries, OdeSystem, Singular};
use crate::error::{Error, Result};
use crate::param::Param;
use serde::{Deserialize, Serialize};
use std::io::Write;

fn eps_default() -> Param {
    Param::Number(3.0)
}
fn omega_default() -> Param {
    Param::Expr("(sqrt(5)-1)/2".into())
}
fn sigma_default() -> Param {
    Param::Number(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrivenOscillatorSpec {
    #[serde(default = "eps_default")]
    pub epsilon: Param,
    #[serde(default = "omega_default")]
    pub omega: Param,
    #[serde(default = "sigma_default")]
    pub sigma: Param,
}

impl Default for DrivenOscillatorSpec {
    fn default() -> Self {
        Self {
            epsilon: eps_default(),
            omega: omega_default(),
            sigma: sigma_default(),
        }
    }
}

impl DrivenOscillatorSpec {
    pub fn with_epsilon(eps: f64) -> Self {
        Self {
            epsilon: eps.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<DrivenOscillator> {
        let (epsilon, omega, sigma) = (
            self.epsilon.value()?,
            self.omega.value()?,
            self.sigma.value()?,
        );
        if !epsilon.is_finite() {
            return Err(Error::Config("epsilon must be finite".into()));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Config(format!(
                "drive frequency omega = {omega} must be positive"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!(
                "envelope width sigma = {sigma} must be positive"
            )));
        }
        Ok(DrivenOscillator {
            epsilon,
            omega,
            sigma,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrivenOscillator {
    pub epsilon: f64,
    pub omega: f64,
    pub sigma: f64,
}

impl DrivenOscillator {
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    /// Driving part of the potential.
    pub fn perturbation(&self, x: f64, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.epsilon * x.powi(4) / 4.0 * (-x * x / (2.0 * s2)).exp() * (self.omega * t).cos()
    }

    pub fn energy(&self, x: f64, v: f64, t: f64) -> f64 {
        0.5 * (v * v + x * x) + self.perturbation(x, t)
    }

    /// ẍ
    pub fn force(&self, x: f64, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let e = (-x * x / (2.0 * s2)).exp();
        -x - self.epsilon * (self.omega * t).cos() * e * (x.powi(3) - x.powi(5) / (4.0 * s2))
    }

    /// ∂ẍ/∂x
    pub fn force_gradient(&self, x: f64, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let e = (-x * x / (2.0 * s2)).exp();
        let p = 3.0 * x * x - 9.0 * x.powi(4) / (4.0 * s2) + x.powi(6) / (4.0 * s2 * s2);
        -1.0 - self.epsilon * (self.omega * t).cos() * e * p
    }

    /// (ẋ, ẍ)
    pub fn rhs(&self, x: f64, v: f64, t: f64) -> (f64, f64) {
        (v, self.force(x, t))
    }
}

/// State (x, ẋ).
pub struct ClassicalFlow(pub DrivenOscillator);

impl OdeSystem<f64> for ClassicalFlow {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, t: &f64, y: &[f64], dy: &mut [f64]) -> std::result::Result<(), Singular> {
        (dy[0], dy[1]) = self.0.rhs(y[0], y[1], *t);
        Ok(())
    }
}

/// State (x, ẋ, δx, δẋ).
pub struct ClassicalTangent(pub DrivenOscillator);

impl OdeSystem<f64> for ClassicalTangent {
    fn dim(&self) -> usize {
        4
    }
    fn rhs(&self, t: &f64, y: &[f64], dy: &mut [f64]) -> std::result::Result<(), Singular> {
        (dy[0], dy[1]) = self.0.rhs(y[0], y[1], *t);
        dy[2] = y[3];
        dy[3] = self.0.force_gradient(y[0], *t) * y[2];
        Ok(())
    }
    fn deviation_start(&self) -> Option<usize> {
        Some(2)
    }
}

/// Tolerances for the oscillator; the looser quantum defaults let the
/// ε = 0 section drift off its ellipse by about 1e-8 per thousand periods.
pub fn classical_integrator() -> IntegratorConfig {
    IntegratorConfig {
        rtol: 1e-12,
        atol: 1e-14,
        ..IntegratorConfig::default()
    }
}

/// χ(t) with ξ₀ = (1, 0).
pub fn classical_lcn(
    spec: &DrivenOscillatorSpec,
    ic: [f64; 2],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<LcnSeries> {
    cfg.validate()?;
    let osc = spec.build()?;
    let y0 = vec![ic[0], ic[1], 1.0, 0.0];
    Ok(lcn_run(
        &ClassicalTangent(osc),
        cfg,
        &0.0,
        &t_end,
        y0,
        2,
        |_, _, _| {},
    )?
    .1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub k: usize,
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
}

/// (x, ẋ) at t = 2πk/ω, k = 1..=count.
pub fn classical_section(
    spec: &DrivenOscillatorSpec,
    ic: [f64; 2],
    count: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<SectionPoint>> {
    cfg.validate()?;
    let osc = spec.build()?;
    let period = osc.period();
    let pts = stroboscopic_section(
        &ClassicalFlow(osc),
        &ic,
        0.0,
        period,
        count,
        cfg.step_control(),
    )?;
    Ok(pts
        .into_iter()
        .enumerate()
        .map(|(i, y)| SectionPoint {
            k: i + 1,
            t: period * (i + 1) as f64,
            x: y[0],
            xdot: y[1],
        })
        .collect())
}

/// Section CSV `k,t,x,xdot`.
pub fn write_section_csv<W: Write>(points: &[SectionPoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "k,t,x,xdot")?;
    for p in points {
        writeln!(w, "{},{:.16e},{:.16e},{:.16e}", p.k, p.t, p.x, p.xdot)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn force_matches_potential_difference() {
        let o = DrivenOscillatorSpec::default().build().unwrap();
        let (x, t, h) = (1.2, 0.7, 1e-5);
        let fd = -(o.energy(x + h, 0.0, t) - o.energy(x - h, 0.0, t)) / (2.0 * h);
        assert!((fd - o.force(x, t)).abs() < 1e-8);
        let fd2 = (o.force(x + h, t) - o.force(x - h, t)) / (2.0 * h);
        assert!((fd2 - o.force_gradient(x, t)).abs() < 1e-8);
    }

    #[test]
    fn origin_is_force_free() {
        let o = DrivenOscillatorSpec::default().build().unwrap();
        for t in [0.0, 1.3, 7.9] {
            assert_eq!(o.force(0.0, t), 0.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = DrivenOscillatorSpec {
            sigma: 0.0.into(),
            ..Default::default()
        };
        assert!(s.validate().is_err());
    }
}
