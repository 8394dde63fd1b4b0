//! Entangled pair of 1-D coherent states, Ψ = c₁Ψ_R(x)Ψ_L(y) + c₂Ψ_L(x)Ψ_R(y).
//!
//! With θᵢ = ωᵢt − σᵢ and κᵢ = √(2mᵢωᵢ) a₀ the closed form is
//! Ψ = N · e^{iΣξᵢ} · e^{−½Σmᵢωᵢqᵢ² − a₀²(cos²θₓ + cos²θᵧ)} · (P + M) with
//! P = c₁e^{F − iG}, M = c₂e^{−F + iG}, F = fₓ − fᵧ, G = gₓ − gᵧ,
//! fᵢ = κᵢqᵢcos θᵢ and gᵢ = κᵢqᵢ sin θᵢ. Units have ħ = 1.

use super::{LogDerivs, WavefunctionModel};
use crate::error::{Error, Result};
use crate::param::Param;
use crate::scalar::{Complex, Real};
use serde::{Deserialize, Serialize};

fn default_a0() -> Param {
    Param::Number(2.5)
}
fn one() -> Param {
    Param::Number(1.0)
}
fn zero() -> Param {
    Param::Number(0.0)
}
fn default_omega_y() -> Param {
    Param::Expr("sqrt(3)".into())
}
fn max_entangled() -> Param {
    Param::Expr("sqrt(2)/2".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitSpec {
    #[serde(default = "default_a0")]
    pub a0: Param,
    #[serde(default = "one")]
    pub omega_x: Param,
    #[serde(default = "default_omega_y")]
    pub omega_y: Param,
    #[serde(default = "one")]
    pub m_x: Param,
    #[serde(default = "one")]
    pub m_y: Param,
    #[serde(default = "zero")]
    pub sigma_x: Param,
    #[serde(default = "zero")]
    pub sigma_y: Param,
    #[serde(default = "max_entangled")]
    pub c1: Param,
    #[serde(default = "max_entangled")]
    pub c2: Param,
}

impl Default for QubitSpec {
    fn default() -> Self {
        Self {
            a0: default_a0(),
            omega_x: one(),
            omega_y: default_omega_y(),
            m_x: one(),
            m_y: one(),
            sigma_x: zero(),
            sigma_y: zero(),
            c1: max_entangled(),
            c2: max_entangled(),
        }
    }
}

impl QubitSpec {
    /// Default parameters with c₁ = √(1 − c₂²).
    pub fn with_c2(c2: f64) -> Self {
        Self {
            c1: Param::Expr(format!("sqrt(1-{c2:?}*{c2:?})")),
            c2: Param::Number(c2),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (c1, c2) = (self.c1.value()?, self.c2.value()?);
        let w = c1 * c1 + c2 * c2;
        if (w - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "qubit coefficients need c1^2 + c2^2 = 1, got {w:.15} (c1 = {}, c2 = {})",
                self.c1, self.c2
            )));
        }
        if self.a0.value()? <= 0.0 {
            return Err(Error::Config(format!(
                "a0 must be positive, got {}",
                self.a0
            )));
        }
        for (name, p) in [
            ("omega_x", &self.omega_x),
            ("omega_y", &self.omega_y),
            ("m_x", &self.m_x),
            ("m_y", &self.m_y),
        ] {
            if p.value()? <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {p}")));
            }
        }
        Ok(())
    }

    pub fn build<R: Real>(&self) -> Result<QubitModel<R>> {
        self.validate()?;
        let a0: R = self.a0.eval()?;
        let w = [self.omega_x.eval::<R>()?, self.omega_y.eval::<R>()?];
        let m = [self.m_x.eval::<R>()?, self.m_y.eval::<R>()?];
        let kappa = [
            (m[0].clone() * w[0].clone() * 2.0).sqrt() * a0.clone(),
            (m[1].clone() * w[1].clone() * 2.0).sqrt() * a0.clone(),
        ];
        let prefactor = (m[0].clone() * w[0].clone() * m[1].clone() * w[1].clone())
            .sqrt()
            .sqrt()
            / R::pi().sqrt();
        Ok(QubitModel {
            a0,
            sigma: [self.sigma_x.eval()?, self.sigma_y.eval()?],
            c1: self.c1.eval()?,
            c2: self.c2.eval()?,
            w,
            m,
            kappa,
            prefactor,
        })
    }
}

#[derive(Clone, Debug)]
pub struct QubitModel<R> {
    a0: R,
    w: [R; 2],
    m: [R; 2],
    sigma: [R; 2],
    c1: R,
    c2: R,
    kappa: [R; 2],
    prefactor: R,
}

/// Shared pieces of one evaluation.
struct Parts<R> {
    theta: [R; 2],
    f: R,
    g: R,
}

impl<R: Real> QubitModel<R> {
    pub fn c1(&self) -> &R {
        &self.c1
    }
    pub fn c2(&self) -> &R {
        &self.c2
    }
    pub fn a0(&self) -> &R {
        &self.a0
    }

    /// θᵢ = ωᵢt − σᵢ
    pub fn theta(&self, t: &R) -> [R; 2] {
        [
            self.w[0].clone() * t.clone() - self.sigma[0].clone(),
            self.w[1].clone() * t.clone() - self.sigma[1].clone(),
        ]
    }

    fn parts(&self, q: &[R], t: &R) -> Parts<R> {
        let theta = self.theta(t);
        let (sx, cx) = theta[0].sin_cos();
        let (sy, cy) = theta[1].sin_cos();
        let kx = self.kappa[0].clone() * q[0].clone();
        let ky = self.kappa[1].clone() * q[1].clone();
        Parts {
            f: kx.clone() * cx - ky.clone() * cy,
            g: kx * sx - ky * sy,
            theta,
        }
    }

    /// P and M scaled by e^{−|F|}, so the larger one has modulus ≤ max(c₁, c₂).
    fn scaled_pm(&self, p: &Parts<R>) -> (Complex<R>, Complex<R>) {
        let af = p.f.abs();
        let pp = Complex::cis(&(-p.g.clone()))
            .scale(&(self.c1.clone() * (p.f.clone() - af.clone()).exp()));
        let mm = Complex::cis(&p.g).scale(&(self.c2.clone() * (-p.f.clone() - af).exp()));
        (pp, mm)
    }

    /// Real exponent of the Gaussian envelope.
    fn envelope_exponent(&self, q: &[R], p: &Parts<R>) -> R {
        let cx = p.theta[0].cos();
        let cy = p.theta[1].cos();
        let quad = self.m[0].clone() * self.w[0].clone() * q[0].clone() * q[0].clone()
            + self.m[1].clone() * self.w[1].clone() * q[1].clone() * q[1].clone();
        -(quad / 2.0) - self.a0.clone() * self.a0.clone() * (cx.clone() * cx + cy.clone() * cy)
    }

    /// Σξᵢ with ξ = ½[a₀² sin 2θ − ωt].
    fn phase(&self, p: &Parts<R>, t: &R) -> R {
        let a2 = self.a0.clone() * self.a0.clone();
        let mut xi = R::zero();
        for i in 0..2 {
            xi += (a2.clone() * (p.theta[i].clone() * 2.0).sin() - self.w[i].clone() * t.clone())
                / 2.0;
        }
        xi
    }

    /// Full P + M and P − M times the envelope, without overflow.
    fn weighted(&self, q: &[R], t: &R) -> (Complex<R>, Complex<R>, Parts<R>) {
        let p = self.parts(q, t);
        let base = self.envelope_exponent(q, &p);
        let common = Complex::cis(&self.phase(&p, t)).scale(&self.prefactor);
        let pp = Complex::cis(&(-p.g.clone()))
            .scale(&(self.c1.clone() * (base.clone() + p.f.clone()).exp()));
        let mm = Complex::cis(&p.g).scale(&(self.c2.clone() * (base - p.f.clone()).exp()));
        let sum = (pp.clone() + mm.clone()) * common.clone();
        let diff = (pp - mm) * common;
        (sum, diff, p)
    }

    /// Closed-form nodal point for branch `k`; `None` at infinity or on the
    /// wrong parity for the sign of c₁c₂, or with no entanglement.
    pub fn node(&self, k: i64, t: &R) -> Option<[R; 2]> {
        if self.c1.to_f64() == 0.0 || self.c2.to_f64() == 0.0 {
            return None;
        }
        let odd = k.rem_euclid(2) == 1;
        let same_sign = (self.c1.to_f64() > 0.0) == (self.c2.to_f64() > 0.0);
        if odd != same_sign {
            return None;
        }
        let th = self.theta(t);
        let den = (th[0].clone() - th[1].clone()).sin();
        if den.abs().to_f64() < 1e-12 {
            return None;
        }
        let l = (self.c1.clone() / self.c2.clone()).abs().ln();
        let kpi = R::pi() * R::from_i64(k);
        let (sx, cx) = th[0].sin_cos();
        let (sy, cy) = th[1].sin_cos();
        let x = (kpi.clone() * cy + l.clone() * sy) / (self.kappa[0].clone() * den.clone() * 2.0);
        let y = (kpi * cx + l * sx) / (self.kappa[1].clone() * den * 2.0);
        Some([x, y])
    }

    /// Branch indices allowed by the parity rule within |k| ≤ k_max.
    pub fn branches(&self, k_max: i64) -> Vec<i64> {
        let same_sign = (self.c1.to_f64() > 0.0) == (self.c2.to_f64() > 0.0);
        (-k_max..=k_max)
            .filter(|k| (k.rem_euclid(2) == 1) == same_sign)
            .collect()
    }
}

impl<R: Real> WavefunctionModel<R> for QubitModel<R> {
    fn dim(&self) -> usize {
        2
    }
    fn hbar(&self) -> R {
        R::one()
    }
    fn mass(&self, i: usize) -> R {
        self.m[i].clone()
    }
    fn frequency(&self, i: usize) -> R {
        self.w[i].clone()
    }

    fn psi(&self, q: &[R], t: &R) -> Complex<R> {
        self.weighted(q, t).0
    }

    fn grad_psi(&self, q: &[R], t: &R) -> Vec<Complex<R>> {
        let (sum, diff, p) = self.weighted(q, t);
        let dx = Complex::cis(&(-p.theta[0].clone())).scale(&self.kappa[0]);
        let dy = -Complex::cis(&(-p.theta[1].clone())).scale(&self.kappa[1]);
        let mwx = self.m[0].clone() * self.w[0].clone() * q[0].clone();
        let mwy = self.m[1].clone() * self.w[1].clone() * q[1].clone();
        vec![
            dx * diff.clone() - sum.scale(&mwx),
            dy * diff - sum.scale(&mwy),
        ]
    }

    fn log_derivs(&self, q: &[R], t: &R, second: bool) -> LogDerivs<R> {
        let p = self.parts(q, t);
        let (pp, mm) = self.scaled_pm(&p);
        let sum = pp.clone() + mm.clone();
        let scale = pp.abs() + mm.abs();
        let rho = (pp - mm) / sum.clone();
        let ex = Complex::cis(&(-p.theta[0].clone()));
        let ey = Complex::cis(&(-p.theta[1].clone()));
        let first = vec![
            (ex.clone() * rho.clone()).scale(&self.kappa[0]),
            -(ey.clone() * rho).scale(&self.kappa[1]),
        ];
        let second = second.then(|| {
            let kx = self.kappa[0].clone();
            let ky = self.kappa[1].clone();
            let xy = -(ex.clone() * ey.clone()).scale(&(kx.clone() * ky.clone()));
            vec![
                (ex.clone() * ex).scale(&(kx.clone() * kx)),
                xy.clone(),
                xy,
                (ey.clone() * ey).scale(&(ky.clone() * ky)),
            ]
        });
        LogDerivs {
            indicator: sum.norm_sqr() / (scale.clone() * scale),
            first,
            second,
        }
    }

    fn closed_form_velocity(&self, q: &[R], t: &R) -> Option<Vec<R>> {
        let p = self.parts(q, t);
        // all three terms carry a common factor e^{−2|F|}
        let af = p.f.abs() * 2.0;
        let f2 = p.f.clone() * 2.0;
        let e_plus = (f2.clone() - af.clone()).exp();
        let e_minus = (-f2 - af.clone()).exp();
        let cc = self.c1.clone() * self.c2.clone() * 2.0;
        let g2 = p.g.clone() * 2.0;
        let c1s = self.c1.clone() * self.c1.clone();
        let c2s = self.c2.clone() * self.c2.clone();
        let a = cc.clone() * g2.sin() * (-af.clone()).exp();
        let b = c1s.clone() * e_plus.clone() - c2s.clone() * e_minus.clone();
        let g = c1s * e_plus + c2s * e_minus + cc * g2.cos() * (-af).exp();
        let (sx, cx) = p.theta[0].sin_cos();
        let (sy, cy) = p.theta[1].sin_cos();
        let vx = -(self.kappa[0].clone() * (a.clone() * cx + b.clone() * sx)
            / (self.m[0].clone() * g.clone()));
        let vy = self.kappa[1].clone() * (a * cy + b * sy) / (self.m[1].clone() * g);
        Some(vec![vx, vy])
    }
}

/// 1-D coherent state of an oscillator with ħ = 1.
pub fn coherent_state_1d<R: Real>(a0: &R, sigma: &R, omega: &R, m: &R, x: &R, t: &R) -> Complex<R> {
    let mw = m.clone() * omega.clone();
    let arg = sigma.clone() - omega.clone() * t.clone();
    let re_a = a0.clone() * arg.cos();
    let im_a = a0.clone() * arg.sin();
    let centre = (R::from_f64(2.0) / mw.clone()).sqrt() * re_a;
    let xi = (a0.clone() * a0.clone() * ((omega.clone() * t.clone() - sigma.clone()) * 2.0).sin()
        - omega.clone() * t.clone())
        / 2.0;
    let d = x.clone() - centre;
    let re = -(mw.clone() * d.clone() * d / 2.0);
    let im = (mw.clone() * 2.0).sqrt() * im_a * x.clone() + xi;
    Complex::cis(&im).scale(&((mw / R::pi()).sqrt().sqrt() * re.exp()))
}

/// Canonical closed-form qubit wavefunction.
pub fn qubit_wavefunction<R: Real>(spec: &QubitSpec, x: &R, y: &R, t: &R) -> Result<Complex<R>> {
    Ok(spec.build::<R>()?.psi(&[x.clone(), y.clone()], t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalised_coefficients() {
        let spec = QubitSpec {
            c2: Param::Number(0.5),
            ..QubitSpec::default()
        };
        let err = spec.validate().unwrap_err().to_string();
        assert!(err.contains("c1^2 + c2^2"), "{err}");
        assert!(QubitSpec::with_c2(0.2).validate().is_ok());
    }

    #[test]
    fn coherent_peak_and_period() {
        let a0 = 2.5;
        let peak = 2.5 * 2f64.sqrt();
        let at = |x: f64, t: f64| coherent_state_1d(&a0, &0.0, &1.0, &1.0, &x, &t).abs();
        assert!(at(peak, 0.0) > at(peak + 1e-3, 0.0) && at(peak, 0.0) > at(peak - 1e-3, 0.0));
        let t = 2.0 * std::f64::consts::PI;
        assert!((at(1.3, t) - at(1.3, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn parity_of_branches() {
        let m = QubitSpec::default().build::<f64>().unwrap();
        assert!(m.branches(9).iter().all(|k| k.rem_euclid(2) == 1));
        let spec = QubitSpec {
            c2: Param::Expr("-sqrt(2)/2".into()),
            ..QubitSpec::default()
        };
        let m = spec.build::<f64>().unwrap();
        assert!(m.branches(9).iter().all(|k| k.rem_euclid(2) == 0));
        assert!(m.node(1, &0.5).is_none());
        assert!(m.node(2, &0.5).is_some());
    }

    #[test]
    fn scaled_velocity_survives_large_f() {
        let m = QubitSpec::default().build::<f64>().unwrap();
        let v = m.closed_form_velocity(&[300.0, -300.0], &0.1).unwrap();
        assert!(v.iter().all(|x| x.is_finite()));
    }
}
