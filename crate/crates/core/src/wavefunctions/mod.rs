//! Analytic wavefunction models.
//!
//! Every model writes Ψ as a positive real envelope, a position-independent
//! phase and a reduced amplitude φ carrying all the nodal structure. The
//! guidance law only needs logarithmic derivatives of φ, so trajectories far
//! out in the Gaussian tail never see an underflowing |Ψ|.

pub mod hermite;
pub mod oscillator;
pub mod qubit;
pub mod system_a;

pub use hermite::{hermite, MAX_DEGREE};
pub use oscillator::{
    eigenstate, energy, superposition_eval, ModeIndex, OscillatorSpec, Superposition,
    SuperpositionSpec, Term,
};
pub use qubit::{coherent_state_1d, qubit_wavefunction, QubitModel, QubitSpec};
pub use system_a::{SystemA, SystemASpec};

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};
use serde::{Deserialize, Serialize};

/// Logarithmic derivatives of the reduced amplitude φ.
#[derive(Clone, Debug)]
pub struct LogDerivs<R> {
    /// |φ|² over the squared sum of its term magnitudes, in [0, 1].
    /// Only a near-cancellation, i.e. a node, makes it small.
    pub indicator: R,
    /// ∂ᵢφ/φ
    pub first: Vec<Complex<R>>,
    /// ∂ᵢ∂ⱼφ/φ, row-major
    pub second: Option<Vec<Complex<R>>>,
}

pub trait WavefunctionModel<R: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn hbar(&self) -> R;
    fn mass(&self, i: usize) -> R;
    fn frequency(&self, i: usize) -> R;

    fn psi(&self, q: &[R], t: &R) -> Complex<R>;

    /// Analytic ∇Ψ. Defined everywhere, nodes included.
    fn grad_psi(&self, q: &[R], t: &R) -> Vec<Complex<R>>;

    fn log_derivs(&self, q: &[R], t: &R, second: bool) -> LogDerivs<R>;

    /// Velocity in the model's own closed form, when it has one.
    fn closed_form_velocity(&self, _q: &[R], _t: &R) -> Option<Vec<R>> {
        None
    }

    /// V = ½Σ mᵢωᵢ²qᵢ²
    fn potential(&self, q: &[R]) -> R {
        let mut v = R::zero();
        for (i, x) in q.iter().enumerate() {
            let w = self.frequency(i);
            v += self.mass(i) * w.clone() * w * x.clone() * x.clone() / 2.0;
        }
        v
    }

    fn near_node(&self, q: &[R], t: &R) -> bool {
        let ind = self.log_derivs(q, t, false).indicator;
        !(ind >= R::singularity_floor())
    }
}

/// JSON-configurable model family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    SystemA(SystemASpec),
    Qubit(QubitSpec),
    Superposition(SuperpositionSpec),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::SystemA(s) => s.validate(),
            ModelSpec::Qubit(s) => s.validate(),
            ModelSpec::Superposition(s) => s.validate(),
        }
    }

    pub fn build<R: Real>(&self) -> Result<AnyModel<R>> {
        Ok(match self {
            ModelSpec::SystemA(s) => AnyModel::SystemA(s.build()?),
            ModelSpec::Qubit(s) => AnyModel::Qubit(s.build()?),
            ModelSpec::Superposition(s) => AnyModel::Superposition(s.build()?),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Superposition(s) => s.oscillator.dim(),
            _ => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub enum AnyModel<R> {
    SystemA(SystemA<R>),
    Qubit(QubitModel<R>),
    Superposition(Superposition<R>),
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            AnyModel::SystemA($m) => $e,
            AnyModel::Qubit($m) => $e,
            AnyModel::Superposition($m) => $e,
        }
    };
}

impl<R: Real> WavefunctionModel<R> for AnyModel<R> {
    fn dim(&self) -> usize {
        dispatch!(self, m => m.dim())
    }
    fn hbar(&self) -> R {
        dispatch!(self, m => m.hbar())
    }
    fn mass(&self, i: usize) -> R {
        dispatch!(self, m => m.mass(i))
    }
    fn frequency(&self, i: usize) -> R {
        dispatch!(self, m => m.frequency(i))
    }
    fn psi(&self, q: &[R], t: &R) -> Complex<R> {
        dispatch!(self, m => m.psi(q, t))
    }
    fn grad_psi(&self, q: &[R], t: &R) -> Vec<Complex<R>> {
        dispatch!(self, m => m.grad_psi(q, t))
    }
    fn log_derivs(&self, q: &[R], t: &R, second: bool) -> LogDerivs<R> {
        dispatch!(self, m => m.log_derivs(q, t, second))
    }
    fn closed_form_velocity(&self, q: &[R], t: &R) -> Option<Vec<R>> {
        dispatch!(self, m => m.closed_form_velocity(q, t))
    }
}

/// |Ψ|²
pub fn density<R: Real, M: WavefunctionModel<R> + ?Sized>(model: &M, q: &[R], t: &R) -> R {
    model.psi(q, t).norm_sqr()
}

/// ∇Ψ, refused within the singularity floor of a node.
pub fn gradient<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
) -> Result<Vec<Complex<R>>> {
    if model.near_node(q, t) {
        return Err(Error::NearNode);
    }
    Ok(model.grad_psi(q, t))
}

fn fd_step<R: Real>(x: &R, base: f64) -> R {
    R::from_f64(base * x.to_f64().abs().max(1.0))
}

/// Central-difference ∇Ψ with step 1e-6·max(1, |qᵢ|).
pub fn fd_gradient<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
) -> Vec<Complex<R>> {
    (0..q.len())
        .map(|i| {
            let h = fd_step(&q[i], 1e-6);
            let mut qp = q.to_vec();
            let mut qm = q.to_vec();
            qp[i] += h.clone();
            qm[i] -= h.clone();
            let d = model.psi(&qp, t) - model.psi(&qm, t);
            d.scale(&(h * 2.0).recip())
        })
        .collect()
}

/// Q = −Σ(ħ²/2mᵢ) ∂ᵢ²|Ψ| / |Ψ| by second differences with step 1e-4·max(1, |qᵢ|).
pub fn quantum_potential<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
) -> Result<R> {
    if model.near_node(q, t) {
        return Err(Error::NearNode);
    }
    let centre = model.psi(q, t).abs();
    let hbar = model.hbar();
    let mut q_val = R::zero();
    for i in 0..q.len() {
        let h = fd_step(&q[i], 1e-4);
        let mut qp = q.to_vec();
        let mut qm = q.to_vec();
        qp[i] += h.clone();
        qm[i] -= h.clone();
        let lap = (model.psi(&qp, t).abs() - centre.clone() * 2.0 + model.psi(&qm, t).abs())
            / (h.clone() * h);
        q_val -= hbar.clone() * hbar.clone() / (model.mass(i) * 2.0) * lap / centre.clone();
    }
    Ok(q_val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_quantum_potential() {
        let m = SuperpositionSpec::ground_state_1d().build::<f64>().unwrap();
        let q0 = quantum_potential(&m, &[0.0], &0.0).unwrap();
        assert!((q0 - 0.5).abs() < 1e-6, "{q0}");
        // Q = ½ − x²/2 for the unit Gaussian
        let q1 = quantum_potential(&m, &[1.3], &0.0).unwrap();
        assert!((q1 - (0.5 - 1.3 * 1.3 / 2.0)).abs() < 1e-6);
    }

    #[test]
    fn stationary_energy_identity() {
        let spec = SuperpositionSpec {
            oscillator: OscillatorSpec::unit_mass(&[1.0.into(), "1/sqrt(2)".into()]),
            terms: vec![Term::real(1.0, &[0, 0])],
            normalized: true,
        };
        let m = spec.build::<f64>().unwrap();
        let e0 = quantum_potential(&m, &[0.0, 0.0], &0.0).unwrap();
        for q in [[0.5, -0.2], [1.1, 0.9], [-1.7, 0.4]] {
            let e = quantum_potential(&m, &q, &0.3).unwrap() + m.potential(&q);
            assert!((e - e0).abs() < 1e-6);
        }
    }

    #[test]
    fn ground_state_gradient_of_modulus_vanishes_at_origin() {
        let m = SuperpositionSpec::ground_state_1d().build::<f64>().unwrap();
        let psi = m.psi(&[0.0], &0.4);
        let g = gradient(&m, &[0.0], &0.4).unwrap();
        // ∂|Ψ| = Re(Ψ̄ ∂Ψ)/|Ψ|
        let d = (psi.conj() * g[0].clone()).re / psi.abs();
        assert!(d.abs() < 1e-15);
    }

    #[test]
    fn gradient_refused_at_node() {
        let a = SystemASpec::default().build::<f64>().unwrap();
        let n = a.node(&1.27).unwrap();
        assert!(matches!(gradient(&a, &n, &1.27), Err(Error::NearNode)));
    }

    #[test]
    fn config_round_trips() {
        let spec = ModelSpec::Qubit(QubitSpec::with_c2(0.5));
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"family\":\"qubit\""));
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let parsed: ModelSpec =
            serde_json::from_str(r#"{"family":"system_a","omega2":"3/2"}"#).unwrap();
        assert!(matches!(parsed, ModelSpec::SystemA(_)));
    }
}
