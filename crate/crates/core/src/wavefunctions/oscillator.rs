//! Products of harmonic-oscillator eigenfunctions and their superpositions.

use super::hermite::{hermite, hermite_with_derivs, MAX_DEGREE};
use super::{LogDerivs, WavefunctionModel};
use crate::error::{Error, Result};
use crate::param::Param;
use crate::scalar::{Complex, Real};
use serde::{Deserialize, Serialize};

fn one() -> Param {
    Param::Number(1.0)
}

fn zero() -> Param {
    Param::Number(0.0)
}

/// Masses, frequencies and ħ of a separable oscillator in 1 to 3 dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub masses: Vec<Param>,
    pub frequencies: Vec<Param>,
    #[serde(default = "one")]
    pub hbar: Param,
}

impl OscillatorSpec {
    /// Unit masses and ħ with the given frequencies.
    pub fn unit_mass(frequencies: &[Param]) -> Self {
        Self {
            masses: vec![one(); frequencies.len()],
            frequencies: frequencies.to_vec(),
            hbar: one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.frequencies.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.frequencies.len();
        if !(1..=3).contains(&d) {
            return Err(Error::Config(format!(
                "oscillator needs 1 to 3 frequencies, got {d}"
            )));
        }
        if self.masses.len() != d {
            return Err(Error::Config(format!(
                "oscillator has {} masses but {d} frequencies",
                self.masses.len()
            )));
        }
        for (i, w) in self.frequencies.iter().enumerate() {
            if w.value()? <= 0.0 {
                return Err(Error::Config(format!(
                    "frequency {i} must be positive, got {w}"
                )));
            }
        }
        for (i, m) in self.masses.iter().enumerate() {
            if m.value()? <= 0.0 {
                return Err(Error::Config(format!("mass {i} must be positive, got {m}")));
            }
        }
        if self.hbar.value()? <= 0.0 {
            return Err(Error::Config("hbar must be positive".into()));
        }
        Ok(())
    }

    fn eval<R: Real>(&self) -> Result<(Vec<R>, Vec<R>, R)> {
        self.validate()?;
        let m = self
            .masses
            .iter()
            .map(Param::eval)
            .collect::<Result<Vec<R>>>()?;
        let w = self
            .frequencies
            .iter()
            .map(Param::eval)
            .collect::<Result<Vec<R>>>()?;
        Ok((m, w, self.hbar.eval()?))
    }
}

/// Quantum numbers, one per dimension.
pub type ModeIndex = Vec<u32>;

/// One complex coefficient and its mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub re: Param,
    #[serde(default = "zero")]
    pub im: Param,
    pub mode: ModeIndex,
}

impl Term {
    pub fn real(c: impl Into<Param>, mode: &[u32]) -> Self {
        Self {
            re: c.into(),
            im: zero(),
            mode: mode.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub oscillator: OscillatorSpec,
    pub terms: Vec<Term>,
    /// Require Σ|cᵢ|² = 1 within 1e-12.
    #[serde(default)]
    pub normalized: bool,
}

impl SuperpositionSpec {
    pub fn validate(&self) -> Result<()> {
        self.oscillator.validate()?;
        let d = self.oscillator.dim();
        if self.terms.is_empty() {
            return Err(Error::Config(
                "superposition has no terms; add at least one {re, im, mode} entry".into(),
            ));
        }
        let mut weight = 0.0;
        for (k, term) in self.terms.iter().enumerate() {
            if term.mode.len() != d {
                return Err(Error::Config(format!(
                    "term {k} has a {}-dimensional mode in a {d}-dimensional oscillator",
                    term.mode.len()
                )));
            }
            if let Some(&n) = term.mode.iter().find(|&&n| n > MAX_DEGREE) {
                return Err(Error::DegreeOutOfRange {
                    degree: n,
                    max: MAX_DEGREE,
                });
            }
            let (re, im) = (term.re.value()?, term.im.value()?);
            weight += re * re + im * im;
        }
        if weight == 0.0 {
            return Err(Error::Config(
                "all superposition coefficients are zero".into(),
            ));
        }
        if self.normalized && (weight - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "coefficients are flagged normalized but sum of |c|^2 is {weight}"
            )));
        }
        Ok(())
    }

    pub fn build<R: Real>(&self) -> Result<Superposition<R>> {
        self.validate()?;
        Superposition::new(self)
    }

    fn three_mode(freqs: [Param; 3], modes: [[u32; 3]; 3], coef: &str) -> Self {
        Self {
            oscillator: OscillatorSpec::unit_mass(&freqs),
            terms: modes.iter().map(|m| Term::real(coef, m)).collect(),
            normalized: true,
        }
    }

    /// aΨ₁₀₀ + bΨ₀₁₀ + cΨ₀₀₂ with a = b = c = 1/√3, ω = (1, 1, √3).
    /// Trajectories stay on x² + y² + z²/2 − ln z/(2ω₃) = C.
    pub fn pear() -> Self {
        Self::three_mode(
            [one(), one(), "sqrt(3)".into()],
            [[1, 0, 0], [0, 1, 0], [0, 0, 2]],
            "1/sqrt(3)",
        )
    }

    /// aΨ₀₀₀ + bΨ₁₁₀ + cΨ₁₀₂ with a = b = c = 1/√3, ω = (1, 1, √3).
    /// Trajectories stay on −x² + y² + z²/2 − ln z/(2ω₃) = C.
    pub fn open_surface() -> Self {
        Self::three_mode(
            [one(), one(), "sqrt(3)".into()],
            [[0, 0, 0], [1, 1, 0], [1, 0, 2]],
            "1/sqrt(3)",
        )
    }

    /// aΨ₁₀₀ + bΨ₀₀₁ with a = b = 1/√2: x² + z² and y are both conserved.
    pub fn complete_integrable() -> Self {
        Self {
            oscillator: OscillatorSpec::unit_mass(&[one(), one(), "sqrt(3)".into()]),
            terms: vec![
                Term::real("1/sqrt(2)", &[1, 0, 0]),
                Term::real("1/sqrt(2)", &[0, 0, 1]),
            ],
            normalized: true,
        }
    }

    /// Single eigenstate of a unit 1-D oscillator.
    pub fn ground_state_1d() -> Self {
        Self {
            oscillator: OscillatorSpec::unit_mass(&[one()]),
            terms: vec![Term::real(1.0, &[0])],
            normalized: true,
        }
    }
}

/// E = Σ(nᵢ + ½)ħωᵢ
pub fn energy<R: Real>(spec: &OscillatorSpec, mode: &[u32]) -> Result<R> {
    let (_, w, hbar) = spec.eval::<R>()?;
    if mode.len() != w.len() {
        return Err(Error::Config(
            "mode length differs from oscillator dimension".into(),
        ));
    }
    Ok(mode_energy(&w, &hbar, mode))
}

fn mode_energy<R: Real>(w: &[R], hbar: &R, mode: &[u32]) -> R {
    w.iter().zip(mode).fold(R::zero(), |acc, (wi, &n)| {
        acc + wi.clone() * hbar.clone() * (n as f64 + 0.5)
    })
}

/// Product eigenfunction with its stationary phase e^{−iEt/ħ}.
pub fn eigenstate<R: Real>(
    spec: &OscillatorSpec,
    mode: &[u32],
    q: &[R],
    t: &R,
) -> Result<Complex<R>> {
    let (m, w, hbar) = spec.eval::<R>()?;
    if mode.len() != w.len() || q.len() != w.len() {
        return Err(Error::Config(
            "mode and position must match the oscillator dimension".into(),
        ));
    }
    let mut amp = R::one();
    for i in 0..w.len() {
        let mw = m[i].clone() * w[i].clone() / hbar.clone();
        let s = mw.sqrt();
        let h = hermite(mode[i], &(s * q[i].clone()))?;
        let norm = (mw.clone() / R::pi()).sqrt().sqrt() / R::from_f64(norm_factor(mode[i]));
        amp *= norm * (-(mw * q[i].clone() * q[i].clone()) / 2.0).exp() * h;
    }
    let phase = -(mode_energy(&w, &hbar, mode) * t.clone() / hbar);
    Ok(Complex::cis(&phase).scale(&amp))
}

/// Linear combination of eigenstates.
pub fn superposition_eval<R: Real>(spec: &SuperpositionSpec, q: &[R], t: &R) -> Result<Complex<R>> {
    Ok(spec.build::<R>()?.psi(q, t))
}

/// √(2ⁿ n!)
fn norm_factor(n: u32) -> f64 {
    (0..n)
        .fold(1.0, |acc, k| acc * (2.0 * (k + 1) as f64))
        .sqrt()
}

#[derive(Clone, Debug)]
struct ModeTerm<R> {
    coef: Complex<R>,
    mode: Vec<u32>,
    energy: R,
}

/// φ, ∇φ, optional Hessian and Σ|termₖ|.
type Reduced<R> = (Complex<R>, Vec<Complex<R>>, Option<Vec<Complex<R>>>, R);

/// Evaluatable superposition Σ cₖ Ψₙₖ(q, t).
#[derive(Clone, Debug)]
pub struct Superposition<R> {
    masses: Vec<R>,
    freqs: Vec<R>,
    hbar: R,
    /// √(mω/ħ) per axis
    scale: Vec<R>,
    /// (mω/πħ)^{1/4} per axis
    prefactor: R,
    terms: Vec<ModeTerm<R>>,
}

impl<R: Real> Superposition<R> {
    fn new(spec: &SuperpositionSpec) -> Result<Self> {
        let (masses, freqs, hbar) = spec.oscillator.eval::<R>()?;
        let mut scale = Vec::with_capacity(freqs.len());
        let mut prefactor = R::one();
        for (m, w) in masses.iter().zip(&freqs) {
            let mw = m.clone() * w.clone() / hbar.clone();
            prefactor *= (mw.clone() / R::pi()).sqrt().sqrt();
            scale.push(mw.sqrt());
        }
        let terms = spec
            .terms
            .iter()
            .map(|t| {
                let norm = t.mode.iter().fold(1.0, |acc, &n| acc * norm_factor(n));
                Ok(ModeTerm {
                    coef: Complex::new(t.re.eval::<R>()? / norm, t.im.eval::<R>()? / norm),
                    mode: t.mode.clone(),
                    energy: mode_energy(&freqs, &hbar, &t.mode),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            masses,
            freqs,
            hbar,
            scale,
            prefactor,
            terms,
        })
    }

    pub fn frequencies(&self) -> &[R] {
        &self.freqs
    }

    /// Real Gaussian factor shared by every term.
    fn envelope(&self, q: &[R]) -> R {
        let mut e = R::zero();
        for (s, x) in self.scale.iter().zip(q) {
            let u = s.clone() * x.clone();
            e += u.clone() * u;
        }
        self.prefactor.clone() * (-e / 2.0).exp()
    }

    /// Polynomial part φ, its gradient, optional Hessian and Σ|termₖ|.
    fn reduced(&self, q: &[R], t: &R, second: bool) -> Reduced<R> {
        let d = q.len();
        let mut phi = Complex::zero();
        let mut grad = vec![Complex::zero(); d];
        let mut hess = if second {
            Some(vec![Complex::zero(); d * d])
        } else {
            None
        };
        let mut sum_abs = R::zero();
        let mut h = Vec::with_capacity(d);
        for term in &self.terms {
            h.clear();
            for ((n, s), x) in term.mode.iter().zip(&self.scale).zip(q) {
                h.push(hermite_with_derivs(*n, &(s.clone() * x.clone())));
            }
            let c = term.coef.clone()
                * Complex::cis(&(-(term.energy.clone() * t.clone()) / self.hbar.clone()));
            // product of the selected factor per axis: 0 value, 1 first, 2 second derivative
            let prod = |orders: &[u8]| -> R {
                let mut p = R::one();
                for i in 0..d {
                    let f = match orders[i] {
                        0 => h[i].0.clone(),
                        1 => h[i].1.clone() * self.scale[i].clone(),
                        _ => h[i].2.clone() * self.scale[i].clone() * self.scale[i].clone(),
                    };
                    p *= f;
                }
                p
            };
            let mut orders = vec![0u8; d];
            let v = prod(&orders);
            sum_abs += c.abs() * v.abs();
            phi += c.scale(&v);
            for i in 0..d {
                orders[i] = 1;
                grad[i] += c.scale(&prod(&orders));
                orders[i] = 0;
            }
            if let Some(hs) = hess.as_mut() {
                for i in 0..d {
                    for j in i..d {
                        if i == j {
                            orders[i] = 2;
                        } else {
                            orders[i] = 1;
                            orders[j] = 1;
                        }
                        let val = c.scale(&prod(&orders));
                        orders[i] = 0;
                        orders[j] = 0;
                        hs[i * d + j] += val.clone();
                        if i != j {
                            hs[j * d + i] += val;
                        }
                    }
                }
            }
        }
        (phi, grad, hess, sum_abs)
    }
}

impl<R: Real> WavefunctionModel<R> for Superposition<R> {
    fn dim(&self) -> usize {
        self.freqs.len()
    }
    fn hbar(&self) -> R {
        self.hbar.clone()
    }
    fn mass(&self, i: usize) -> R {
        self.masses[i].clone()
    }
    fn frequency(&self, i: usize) -> R {
        self.freqs[i].clone()
    }

    fn psi(&self, q: &[R], t: &R) -> Complex<R> {
        let (phi, _, _, _) = self.reduced(q, t, false);
        phi.scale(&self.envelope(q))
    }

    fn grad_psi(&self, q: &[R], t: &R) -> Vec<Complex<R>> {
        let (phi, grad, _, _) = self.reduced(q, t, false);
        let env = self.envelope(q);
        grad.into_iter()
            .enumerate()
            .map(|(i, g)| {
                let s2 = self.scale[i].clone() * self.scale[i].clone();
                (g - phi.scale(&(s2 * q[i].clone()))).scale(&env)
            })
            .collect()
    }

    fn log_derivs(&self, q: &[R], t: &R, second: bool) -> LogDerivs<R> {
        let (phi, grad, hess, sum_abs) = self.reduced(q, t, second);
        let indicator = if sum_abs > R::zero() {
            phi.norm_sqr() / (sum_abs.clone() * sum_abs)
        } else {
            R::zero()
        };
        LogDerivs {
            indicator,
            first: grad.into_iter().map(|g| g / phi.clone()).collect(),
            second: hess.map(|h| h.into_iter().map(|g| g / phi.clone()).collect()),
        }
    }
}
