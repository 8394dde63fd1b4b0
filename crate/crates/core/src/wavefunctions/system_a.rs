//! Ψ = Ψ₀₀ + c₁Ψ₁₀ + c₂Ψ₁₁ for two oscillators with ω₁ = 1, m = ħ = 1.
//!
//! With a = √2c₁, b = 2c₂, s = √ω₂ and Ω = 1 + ω₂ the wavefunction factors as
//! Ψ₀₀ · φ with φ = 1 + a x e^{−it} + b s x y e^{−iΩt}.

use super::oscillator::{OscillatorSpec, SuperpositionSpec, Term};
use super::{LogDerivs, WavefunctionModel};
use crate::error::{Error, Result};
use crate::param::Param;
use crate::scalar::{Complex, Real};
use serde::{Deserialize, Serialize};

fn default_omega2() -> Param {
    Param::Expr("1/sqrt(2)".into())
}
fn default_c1() -> Param {
    Param::Expr("1/sqrt(2)".into())
}
fn default_c2() -> Param {
    Param::Number(0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemASpec {
    #[serde(default = "default_omega2")]
    pub omega2: Param,
    #[serde(default = "default_c1")]
    pub c1: Param,
    #[serde(default = "default_c2")]
    pub c2: Param,
}

impl Default for SystemASpec {
    fn default() -> Self {
        Self {
            omega2: default_omega2(),
            c1: default_c1(),
            c2: default_c2(),
        }
    }
}

impl SystemASpec {
    pub fn with_omega2(omega2: impl Into<Param>) -> Self {
        Self {
            omega2: omega2.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega2.value()? <= 0.0 {
            return Err(Error::Config(format!(
                "omega2 must be positive, got {}",
                self.omega2
            )));
        }
        if self.c1.value()? == 0.0 && self.c2.value()? == 0.0 {
            // still a valid ground state, but there is nothing to study
            return Err(Error::Config("c1 and c2 are both zero".into()));
        }
        Ok(())
    }

    pub fn build<R: Real>(&self) -> Result<SystemA<R>> {
        self.validate()?;
        let omega2: R = self.omega2.eval()?;
        let c1: R = self.c1.eval()?;
        let c2: R = self.c2.eval()?;
        let s = omega2.sqrt();
        Ok(SystemA {
            a: c1 * R::from_f64(2.0).sqrt(),
            b: c2 * 2.0,
            prefactor: s.sqrt() / R::pi().sqrt(),
            big_omega: omega2.clone() + 1.0,
            s,
            omega2,
        })
    }

    /// The same wavefunction as a generic oscillator superposition.
    pub fn as_superposition(&self) -> SuperpositionSpec {
        SuperpositionSpec {
            oscillator: OscillatorSpec::unit_mass(&[Param::Number(1.0), self.omega2.clone()]),
            terms: vec![
                Term::real(1.0, &[0, 0]),
                Term {
                    re: self.c1.clone(),
                    im: Param::Number(0.0),
                    mode: vec![1, 0],
                },
                Term {
                    re: self.c2.clone(),
                    im: Param::Number(0.0),
                    mode: vec![1, 1],
                },
            ],
            normalized: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SystemA<R> {
    omega2: R,
    a: R,
    b: R,
    s: R,
    big_omega: R,
    /// ω₂^{1/4}/√π
    prefactor: R,
}

/// Below this |sin| a closed-form node coordinate is treated as infinite.
const NODE_SIN_EPS: f64 = 1e-12;

impl<R: Real> SystemA<R> {
    pub fn omega2(&self) -> &R {
        &self.omega2
    }

    /// φ, ∂ₓφ, ∂ᵧφ and the term-magnitude sum.
    fn reduced(&self, x: &R, y: &R, t: &R) -> (Complex<R>, Complex<R>, Complex<R>, R) {
        let e1 = Complex::cis(&(-t.clone()));
        let e2 = Complex::cis(&(-(self.big_omega.clone() * t.clone())));
        let ax = self.a.clone() * x.clone();
        let bs = self.b.clone() * self.s.clone();
        let sum_abs = R::one() + ax.abs() + (bs.clone() * x.clone() * y.clone()).abs();
        let phi = Complex::from_real(R::one())
            + e1.scale(&ax)
            + e2.scale(&(bs.clone() * x.clone() * y.clone()));
        let phi_x = e1.scale(&self.a) + e2.scale(&(bs.clone() * y.clone()));
        let phi_y = e2.scale(&(bs * x.clone()));
        (phi, phi_x, phi_y, sum_abs)
    }

    /// Denominator G = |φ|² written out in real form.
    pub fn denominator(&self, x: &R, y: &R, t: &R) -> R {
        let (a, b, s) = (self.a.clone(), self.b.clone(), self.s.clone());
        let bs = b.clone() * s.clone();
        let xy = x.clone() * y.clone();
        R::one()
            + a.clone() * a.clone() * x.clone() * x.clone()
            + b.clone() * b * self.omega2.clone() * xy.clone() * xy.clone()
            + a.clone() * x.clone() * t.cos() * 2.0
            + bs.clone() * xy.clone() * (self.big_omega.clone() * t.clone()).cos() * 2.0
            + a * bs * x.clone() * xy * (self.omega2.clone() * t.clone()).cos() * 2.0
    }

    /// Closed-form nodal point, `None` while it is at infinity.
    pub fn node(&self, t: &R) -> Option<[R; 2]> {
        let s2 = (self.omega2.clone() * t.clone()).sin();
        let so = (self.big_omega.clone() * t.clone()).sin();
        if s2.abs().to_f64() < NODE_SIN_EPS
            || so.abs().to_f64() < NODE_SIN_EPS
            || self.a.to_f64() == 0.0
            || self.b.to_f64() == 0.0
        {
            return None;
        }
        let x = -(so.clone() / (self.a.clone() * s2));
        let y = -(self.a.clone() * t.sin() / (self.b.clone() * self.s.clone() * so));
        Some([x, y])
    }

    /// Time derivative of [`SystemA::node`].
    pub fn node_velocity(&self, t: &R) -> Option<[R; 2]> {
        self.node(t)?;
        let w2 = self.omega2.clone();
        let om = self.big_omega.clone();
        let (s2, c2) = (w2.clone() * t.clone()).sin_cos();
        let (so, co) = (om.clone() * t.clone()).sin_cos();
        let (s1, c1) = t.sin_cos();
        let vx = -((om.clone() * co.clone() * s2.clone() - w2 * so.clone() * c2)
            / (self.a.clone() * s2.clone() * s2));
        let vy = -(self.a.clone() * (c1 * so.clone() - om * s1 * co)
            / (self.b.clone() * self.s.clone() * so.clone() * so));
        Some([vx, vy])
    }
}

impl<R: Real> WavefunctionModel<R> for SystemA<R> {
    fn dim(&self) -> usize {
        2
    }
    fn hbar(&self) -> R {
        R::one()
    }
    fn mass(&self, _i: usize) -> R {
        R::one()
    }
    fn frequency(&self, i: usize) -> R {
        if i == 0 {
            R::one()
        } else {
            self.omega2.clone()
        }
    }

    fn psi(&self, q: &[R], t: &R) -> Complex<R> {
        let (phi, _, _, _) = self.reduced(&q[0], &q[1], t);
        phi.scale(&self.envelope(q)) * self.ground_phase(t)
    }

    fn grad_psi(&self, q: &[R], t: &R) -> Vec<Complex<R>> {
        let (phi, px, py, _) = self.reduced(&q[0], &q[1], t);
        let env = Complex::from_real(self.envelope(q)) * self.ground_phase(t);
        vec![
            (px - phi.scale(&q[0])) * env.clone(),
            (py - phi.scale(&(self.omega2.clone() * q[1].clone()))) * env,
        ]
    }

    fn log_derivs(&self, q: &[R], t: &R, second: bool) -> LogDerivs<R> {
        let (phi, px, py, sum_abs) = self.reduced(&q[0], &q[1], t);
        let second = second.then(|| {
            let pxy = Complex::cis(&(-(self.big_omega.clone() * t.clone())))
                .scale(&(self.b.clone() * self.s.clone()))
                / phi.clone();
            vec![Complex::zero(), pxy.clone(), pxy, Complex::zero()]
        });
        LogDerivs {
            indicator: phi.norm_sqr() / (sum_abs.clone() * sum_abs),
            first: vec![px / phi.clone(), py / phi],
            second,
        }
    }

    fn closed_form_velocity(&self, q: &[R], t: &R) -> Option<Vec<R>> {
        let (x, y) = (&q[0], &q[1]);
        let g = self.denominator(x, y, t);
        let bs = self.b.clone() * self.s.clone();
        let so = (self.big_omega.clone() * t.clone()).sin();
        let vx = -((self.a.clone() * t.sin() + bs.clone() * y.clone() * so.clone()) / g.clone());
        let vy = -(bs
            * x.clone()
            * (self.a.clone() * x.clone() * (self.omega2.clone() * t.clone()).sin() + so)
            / g);
        Some(vec![vx, vy])
    }
}

impl<R: Real> SystemA<R> {
    fn envelope(&self, q: &[R]) -> R {
        let e = q[0].clone() * q[0].clone() + self.omega2.clone() * q[1].clone() * q[1].clone();
        self.prefactor.clone() * (-e / 2.0).exp()
    }

    fn ground_phase(&self, t: &R) -> Complex<R> {
        Complex::cis(&(-(self.big_omega.clone() * t.clone()) / 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_generic_superposition() {
        let spec = SystemASpec::default();
        let a = spec.build::<f64>().unwrap();
        let g = spec.as_superposition().build::<f64>().unwrap();
        for &(x, y, t) in &[(0.3, -0.4, 0.2), (-1.0, -1.0, 0.7), (2.0, 1.5, 9.1)] {
            let q = [x, y];
            let pa = a.psi(&q, &t);
            let pg = g.psi(&q, &t);
            let d = (pa.clone() - pg).abs();
            assert!(d < 1e-14 * pa.abs().max(1e-300), "{d} {}", pa.abs());
        }
    }

    #[test]
    fn denominator_is_phi_modulus() {
        let a = SystemASpec::default().build::<f64>().unwrap();
        let (x, y, t) = (-0.7, 1.3, 2.2);
        let (phi, _, _, _) = a.reduced(&x, &y, &t);
        assert!((a.denominator(&x, &y, &t) - phi.norm_sqr()).abs() < 1e-13);
    }

    #[test]
    fn node_velocity_matches_difference() {
        let a = SystemASpec::default().build::<f64>().unwrap();
        let t = 2.25;
        let h = 1e-5;
        let p = a.node(&(t + h)).unwrap();
        let m = a.node(&(t - h)).unwrap();
        let v = a.node_velocity(&t).unwrap();
        for i in 0..2 {
            let fd = (p[i] - m[i]) / (2.0 * h);
            assert!((fd - v[i]).abs() < 1e-6 * v[i].abs());
        }
    }

    #[test]
    fn node_at_infinity_when_sine_vanishes() {
        let a = SystemASpec::default().build::<f64>().unwrap();
        assert!(a.node(&0.0).is_none());
    }
}
