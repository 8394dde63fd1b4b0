//! Rejection sampling of |Ψ(·, t₀)|².

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wavefunctions::{density, AnyModel, WavefunctionModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Acceptance rate below which the envelope is declared wrong.
pub const MIN_ACCEPTANCE: f64 = 0.01;
const ENVELOPE_GRID: usize = 200;
const ENVELOPE_MARGIN: f64 = 1.2;
/// proposals drawn before the acceptance rate is judged
const ACCEPTANCE_PROBE: u64 = 2000;

#[derive(Clone, Debug)]
enum Proposal {
    /// (weight, centre, per-axis σ)
    Mixture(Vec<(f64, [f64; 2], [f64; 2])>),
    Uniform([f64; 4]),
}

impl Proposal {
    fn pdf(&self, p: [f64; 2]) -> f64 {
        match self {
            Proposal::Mixture(parts) => parts
                .iter()
                .map(|(w, c, s)| {
                    let z = ((p[0] - c[0]) / s[0]).powi(2) + ((p[1] - c[1]) / s[1]).powi(2);
                    w * (-0.5 * z).exp() / (2.0 * std::f64::consts::PI * s[0] * s[1])
                })
                .sum(),
            Proposal::Uniform([x0, x1, y0, y1]) => {
                if p[0] >= *x0 && p[0] < *x1 && p[1] >= *y0 && p[1] < *y1 {
                    1.0 / ((x1 - x0) * (y1 - y0))
                } else {
                    0.0
                }
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        match self {
            Proposal::Mixture(parts) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = &parts[parts.len() - 1];
                for part in parts {
                    acc += part.0;
                    if u < acc {
                        pick = part;
                        break;
                    }
                }
                let n = Normal::new(0.0, 1.0).expect("unit normal");
                [
                    pick.1[0] + pick.2[0] * n.sample(rng),
                    pick.1[1] + pick.2[1] * n.sample(rng),
                ]
            }
            Proposal::Uniform([x0, x1, y0, y1]) => {
                [rng.gen_range(*x0..*x1), rng.gen_range(*y0..*y1)]
            }
        }
    }
}

/// Reusable sampler: proposal plus envelope constant for one (model, t₀).
pub struct BornSampler<'a> {
    model: &'a AnyModel<f64>,
    t0: f64,
    proposal: Proposal,
    envelope: f64,
}

impl<'a> BornSampler<'a> {
    /// Qubits use the two-blob Gaussian mixture; everything else a uniform
    /// proposal on `bounds`.
    pub fn new(model: &'a AnyModel<f64>, t0: f64, bounds: [f64; 4]) -> Result<Self> {
        if model.dim() != 2 {
            return Err(Error::Unsupported(
                "Born sampling is implemented for planar models".into(),
            ));
        }
        let proposal = match model {
            AnyModel::Qubit(q) => {
                let th = q.theta(&t0);
                let cx = (2.0 / (q.mass(0) * q.frequency(0))).sqrt() * q.a0() * th[0].cos();
                let cy = (2.0 / (q.mass(1) * q.frequency(1))).sqrt() * q.a0() * th[1].cos();
                let s = [
                    (2.0 * q.mass(0) * q.frequency(0)).sqrt().recip(),
                    (2.0 * q.mass(1) * q.frequency(1)).sqrt().recip(),
                ];
                let (w1, w2) = (q.c1().powi(2), q.c2().powi(2));
                let w = w1 + w2;
                let parts: Vec<_> = [(w1 / w, [cx, -cy], s), (w2 / w, [-cx, cy], s)]
                    .into_iter()
                    .filter(|p| p.0 > 0.0)
                    .collect();
                Proposal::Mixture(parts)
            }
            _ => Proposal::Uniform(bounds),
        };
        // envelope on a scan of the box around the support
        let [x0, x1, y0, y1] = bounds;
        let n = ENVELOPE_GRID;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = [
                    x0 + (x1 - x0) * (i as f64 + 0.5) / n as f64,
                    y0 + (y1 - y0) * (j as f64 + 0.5) / n as f64,
                ];
                let g = proposal.pdf(p);
                let f = density(model, &p, &t0);
                if g > 0.0 && f > 0.0 {
                    m = m.max(f / g);
                }
            }
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::EnvelopeFailure { rate: 0.0 });
        }
        Ok(Self {
            model,
            t0,
            proposal,
            envelope: ENVELOPE_MARGIN * m,
        })
    }

    /// One accepted point.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<[f64; 2]> {
        let mut tried = 0u64;
        loop {
            let p = self.proposal.draw(rng);
            tried += 1;
            let g = self.proposal.pdf(p);
            if g > 0.0 {
                let f = density(self.model, &p, &self.t0);
                if rng.gen::<f64>() * self.envelope * g < f {
                    return Ok(p);
                }
            }
            if tried >= (ACCEPTANCE_PROBE as f64 / MIN_ACCEPTANCE) as u64 {
                return Err(Error::EnvelopeFailure {
                    rate: 1.0 / tried as f64,
                });
            }
        }
    }

    /// `n` points from one stream; fails when fewer than 1% of proposals
    /// are accepted.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<[f64; 2]>> {
        let mut out = Vec::with_capacity(n);
        let (mut tried, mut accepted) = (0u64, 0u64);
        while out.len() < n {
            let p = self.proposal.draw(rng);
            tried += 1;
            let g = self.proposal.pdf(p);
            if g > 0.0 {
                let f = density(self.model, &p, &self.t0);
                if rng.gen::<f64>() * self.envelope * g < f {
                    out.push(p);
                    accepted += 1;
                }
            }
            if tried >= ACCEPTANCE_PROBE && (accepted as f64) < MIN_ACCEPTANCE * tried as f64 {
                return Err(Error::EnvelopeFailure {
                    rate: accepted as f64 / tried as f64,
                });
            }
        }
        Ok(out)
    }
}

/// `n` Born-distributed points from the stream `seed`.
pub fn sample_born(
    model: &AnyModel<f64>,
    t0: f64,
    n: usize,
    seed: u64,
    bounds: [f64; 4],
) -> Result<Vec<[f64; 2]>> {
    let s = BornSampler::new(model, t0, bounds)?;
    s.sample(n, &mut super::stream_rng(seed, 0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    Born {
        #[serde(default)]
        t0: f64,
        /// proposal and envelope box
        #[serde(default = "default_box")]
        bounds: [f64; 4],
    },
    Uniform {
        bounds: [f64; 4],
    },
    Explicit {
        points: Vec<Vec<f64>>,
    },
}

fn default_box() -> [f64; 4] {
    [-8.0, 8.0, -8.0, 8.0]
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler::Born {
            t0: 0.0,
            bounds: default_box(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::{ModelSpec, QubitSpec};

    #[test]
    fn unentangled_qubit_fills_one_blob() {
        let m = ModelSpec::Qubit(QubitSpec::with_c2(0.0))
            .build::<f64>()
            .unwrap();
        let pts = sample_born(&m, 0.0, 2000, 3, default_box()).unwrap();
        assert!(pts.iter().all(|p| p[0] > 0.0));
    }

    #[test]
    fn oversized_box_fails() {
        let m = ModelSpec::SystemA(crate::wavefunctions::SystemASpec::default())
            .build::<f64>()
            .unwrap();
        let r = sample_born(&m, 0.3, 100, 1, [-200.0, 200.0, -200.0, 200.0]);
        assert!(
            matches!(r, Err(Error::EnvelopeFailure { .. })),
            "{:?}",
            r.err()
        );
    }
}
