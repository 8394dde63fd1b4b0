//! Guidance law v = (ħ/m) Im(∇Ψ/Ψ) and its Jacobian.

use super::integrator::{OdeSystem, Singular};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wavefunctions::WavefunctionModel;

fn check<R: Real>(indicator: &R, factor: f64) -> Result<()> {
    if *indicator >= R::singularity_floor() * factor {
        Ok(())
    } else {
        Err(Error::NearNode)
    }
}

/// Bohmian velocity; uses the model's closed form when it has one.
pub fn bohm_velocity<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
) -> Result<Vec<R>> {
    let ld = model.log_derivs(q, t, false);
    check(&ld.indicator, 1.0)?;
    if let Some(v) = model.closed_form_velocity(q, t) {
        return Ok(v);
    }
    Ok(ld
        .first
        .iter()
        .enumerate()
        .map(|(i, d)| model.hbar() * d.im.clone() / model.mass(i))
        .collect())
}

/// (ħ/mᵢ) Im(∂ᵢΨ/Ψ) evaluated directly from Ψ and its analytic gradient.
pub fn generic_velocity<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
) -> Result<Vec<R>> {
    check(&model.log_derivs(q, t, false).indicator, 1.0)?;
    let psi = model.psi(q, t);
    let grad = model.grad_psi(q, t);
    Ok(grad
        .into_iter()
        .enumerate()
        .map(|(i, g)| model.hbar() * (g / psi.clone()).im / model.mass(i))
        .collect())
}

/// Velocity and its Jacobian ∂vᵢ/∂qⱼ (row-major), both analytic.
pub fn velocity_and_jacobian<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
) -> Result<(Vec<R>, Vec<R>)> {
    velocity_and_jacobian_guarded(model, q, t, 1.0)
}

fn velocity_and_jacobian_guarded<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
    factor: f64,
) -> Result<(Vec<R>, Vec<R>)> {
    let d = q.len();
    let ld = model.log_derivs(q, t, true);
    check(&ld.indicator, factor)?;
    let hbar = model.hbar();
    let v = match model.closed_form_velocity(q, t) {
        Some(v) => v,
        None => (0..d)
            .map(|i| hbar.clone() * ld.first[i].im.clone() / model.mass(i))
            .collect(),
    };
    let mut jac = Vec::with_capacity(d * d);
    match &ld.second {
        Some(h) => {
            for i in 0..d {
                let c = hbar.clone() / model.mass(i);
                for j in 0..d {
                    let prod = ld.first[i].clone() * ld.first[j].clone();
                    jac.push(c.clone() * (h[i * d + j].im.clone() - prod.im));
                }
            }
        }
        None => jac = fd_jacobian(model, q, t)?,
    }
    Ok((v, jac))
}

/// Central-difference Jacobian with step 1e-6·max(1, |qⱼ|).
pub fn fd_jacobian<R: Real, M: WavefunctionModel<R> + ?Sized>(
    model: &M,
    q: &[R],
    t: &R,
) -> Result<Vec<R>> {
    let d = q.len();
    let mut jac = vec![R::zero(); d * d];
    for j in 0..d {
        let h = R::from_f64(1e-6 * q[j].to_f64().abs().max(1.0));
        let mut qp = q.to_vec();
        let mut qm = q.to_vec();
        qp[j] += h.clone();
        qm[j] -= h.clone();
        let vp = bohm_velocity(model, &qp, t)?;
        let vm = bohm_velocity(model, &qm, t)?;
        for i in 0..d {
            jac[i * d + j] = (vp[i].clone() - vm[i].clone()) / (h.clone() * 2.0);
        }
    }
    Ok(jac)
}

/// Near-node step control refuses points below this multiple of the floor.
pub const STEP_FLOOR_FACTOR: f64 = 10.0;

/// dq/dt = v(q, t)
pub struct BohmFlow<'a, M: ?Sized> {
    pub model: &'a M,
}

impl<R: Real, M: WavefunctionModel<R> + ?Sized> OdeSystem<R> for BohmFlow<'_, M> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn rhs(&self, t: &R, y: &[R], dy: &mut [R]) -> std::result::Result<(), Singular> {
        let ld = self.model.log_derivs(y, t, false);
        check(&ld.indicator, STEP_FLOOR_FACTOR).map_err(|_| Singular)?;
        match self.model.closed_form_velocity(y, t) {
            Some(v) => dy.clone_from_slice(&v),
            None => {
                for (i, d) in ld.first.iter().enumerate() {
                    dy[i] = self.model.hbar() * d.im.clone() / self.model.mass(i);
                }
            }
        }
        if dy.iter().all(Real::is_finite) {
            Ok(())
        } else {
            Err(Singular)
        }
    }
}

/// (q, ξ) with dq/dt = v and dξ/dt = J ξ.
pub struct TangentFlow<'a, M: ?Sized> {
    pub model: &'a M,
}

impl<R: Real, M: WavefunctionModel<R> + ?Sized> OdeSystem<R> for TangentFlow<'_, M> {
    fn dim(&self) -> usize {
        2 * self.model.dim()
    }
    fn rhs(&self, t: &R, y: &[R], dy: &mut [R]) -> std::result::Result<(), Singular> {
        let d = self.model.dim();
        let (q, xi) = y.split_at(d);
        let (v, jac) = velocity_and_jacobian_guarded(self.model, q, t, STEP_FLOOR_FACTOR)
            .map_err(|_| Singular)?;
        for i in 0..d {
            dy[i] = v[i].clone();
            let mut acc = R::zero();
            for j in 0..d {
                acc += jac[i * d + j].clone() * xi[j].clone();
            }
            dy[d + i] = acc;
        }
        if dy.iter().all(Real::is_finite) {
            Ok(())
        } else {
            Err(Singular)
        }
    }
    fn deviation_start(&self) -> Option<usize> {
        Some(self.model.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::{QubitSpec, SystemASpec};

    fn rel(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-300))
            .fold(0.0, f64::max)
    }

    #[test]
    fn system_a_closed_form_matches_guidance_law() {
        let m = SystemASpec::default().build::<f64>().unwrap();
        let q = [-1.0, -1.0];
        let a = bohm_velocity(&m, &q, &0.7).unwrap();
        let b = generic_velocity(&m, &q, &0.7).unwrap();
        assert!(rel(&a, &b) < 1e-10);
    }

    #[test]
    fn qubit_closed_form_matches_guidance_law() {
        let m = QubitSpec::with_c2(0.5).build::<f64>().unwrap();
        let q = [2.0, -2.0];
        let a = bohm_velocity(&m, &q, &1.3).unwrap();
        let b = generic_velocity(&m, &q, &1.3).unwrap();
        assert!(rel(&a, &b) < 1e-10);
    }

    #[test]
    fn unentangled_centre_moves_classically() {
        let m = QubitSpec::with_c2(0.0).build::<f64>().unwrap();
        let t = 0.8f64;
        let k = 2f64.sqrt() * 2.5;
        let wy = 3f64.sqrt();
        // Ψ_R(x)Ψ_L(y): centres at ±√(2/ω)a₀cos θ
        let centre = [k * t.cos(), -k / wy.sqrt() * (wy * t).cos()];
        let v = bohm_velocity(&m, &centre, &t).unwrap();
        let classical = [-k * t.sin(), k * wy.sqrt() * (wy * t).sin()];
        assert!(rel(&v, &classical) < 1e-12);
    }

    #[test]
    fn analytic_jacobian_matches_difference() {
        let m = SystemASpec::default().build::<f64>().unwrap();
        let q = [0.75, 0.25];
        let (_, j) = velocity_and_jacobian(&m, &q, &2.0).unwrap();
        let fd = fd_jacobian(&m, &q, &2.0).unwrap();
        for (a, b) in j.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()));
        }
        let m = QubitSpec::default().build::<f64>().unwrap();
        let q = [2.0, -2.0];
        let (_, j) = velocity_and_jacobian(&m, &q, &0.4).unwrap();
        let fd = fd_jacobian(&m, &q, &0.4).unwrap();
        for (a, b) in j.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()));
        }
    }
}
