//! The flow seen from a moving nodal point, frozen at one instant.

use super::{NodeClass, PlanarField, XPointRecord};
use crate::dynamics::bohm_velocity;
use crate::error::{Error, Result};
use crate::wavefunctions::WavefunctionModel;
use serde::{Deserialize, Serialize};

/// Ring radius used to classify a nodal point. Round-off in the rate grows
/// like ε⁻³ (about 3e-4 at ε = 1e-4) while the truncation error is O(ε²).
pub const RING_RADIUS: f64 = 1e-3;
pub const RING_DIRECTIONS: usize = 16;
/// |growth rate| below this counts as degenerate.
pub const DEGENERATE_RATE: f64 = 1e-6;

/// F(u) = v(N + u, t) − v_N at frozen t.
pub struct FrozenFrame<'a, M: ?Sized> {
    pub model: &'a M,
    pub t: f64,
    pub node: [f64; 2],
    pub node_velocity: [f64; 2],
}

impl<'a, M: WavefunctionModel<f64> + ?Sized> FrozenFrame<'a, M> {
    pub fn new(model: &'a M, t: f64, node: [f64; 2], node_velocity: [f64; 2]) -> Self {
        Self {
            model,
            t,
            node,
            node_velocity,
        }
    }

    pub fn velocity(&self, u: [f64; 2]) -> Result<[f64; 2]> {
        let q = [self.node[0] + u[0], self.node[1] + u[1]];
        let v = bohm_velocity(self.model, &q, &self.t)?;
        Ok([v[0] - self.node_velocity[0], v[1] - self.node_velocity[1]])
    }
}

impl<M: WavefunctionModel<f64> + ?Sized> PlanarField for FrozenFrame<'_, M> {
    fn eval(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        self.velocity(p).ok()
    }
}

/// Real 2×2 matrix [[a, b], [c, d]] eigen-data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigen2 {
    /// (re, im) pairs, larger real part first
    pub values: [(f64, f64); 2],
    /// unit eigenvectors when the eigenvalues are real
    pub vectors: Option<[[f64; 2]; 2]>,
}

pub fn eigen2(m: [[f64; 2]; 2]) -> Eigen2 {
    let [[a, b], [c, d]] = m;
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr / 4.0 - det;
    if disc < 0.0 {
        let im = (-disc).sqrt();
        return Eigen2 {
            values: [(tr / 2.0, im), (tr / 2.0, -im)],
            vectors: None,
        };
    }
    let s = disc.sqrt();
    let l1 = tr / 2.0 + s;
    let l2 = tr / 2.0 - s;
    let vec_for = |l: f64| {
        // (A − λI)v = 0; take the better-conditioned row
        let v1 = [b, l - a];
        let v2 = [l - d, c];
        let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) {
            v1
        } else {
            v2
        };
        let n = v[0].hypot(v[1]);
        if n == 0.0 {
            // already diagonal
            if (l - a).abs() <= (l - d).abs() {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else {
            [v[0] / n, v[1] / n]
        }
    };
    Eigen2 {
        values: [(l1, 0.0), (l2, 0.0)],
        vectors: Some([vec_for(l1), vec_for(l2)]),
    }
}

/// Central-difference Jacobian of a planar field.
pub fn field_jacobian<F: PlanarField + ?Sized>(
    f: &F,
    p: [f64; 2],
    h: f64,
) -> Option<[[f64; 2]; 2]> {
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let mut pp = p;
        let mut pm = p;
        pp[k] += h;
        pm[k] -= h;
        let a = f.eval(pp)?;
        let b = f.eval(pm)?;
        j[0][k] = (a[0] - b[0]) / (2.0 * h);
        j[1][k] = (a[1] - b[1]) / (2.0 * h);
    }
    Some(j)
}

/// Saddle of a planar field, in its own coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Saddle {
    pub offset: [f64; 2],
    pub residual: f64,
    /// λ₊ > 0 > λ₋
    pub eigenvalues: [f64; 2],
    /// unstable, stable
    pub eigenvectors: [[f64; 2]; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleSearch {
    pub radii: Vec<f64>,
    pub directions: usize,
    pub jacobian_step: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// area searched around the origin
    pub max_radius: f64,
    /// choose the saddle nearest this point instead of the origin
    pub prefer: Option<[f64; 2]>,
}

impl Default for SaddleSearch {
    fn default() -> Self {
        Self {
            radii: vec![0.1, 0.3, 1.0],
            directions: 16,
            jacobian_step: 1e-6,
            max_iter: 60,
            tol: 1e-10,
            max_radius: 5.0,
            prefer: None,
        }
    }
}

fn fnorm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton from one seed.
fn newton_zero<F: PlanarField + ?Sized>(
    f: &F,
    seed: [f64; 2],
    s: &SaddleSearch,
) -> Option<[f64; 2]> {
    let mut p = seed;
    let mut fp = f.eval(p)?;
    for _ in 0..s.max_iter {
        let r = fnorm(fp);
        if r < s.tol * 1e-3 {
            break;
        }
        let [[a, b], [c, d]] = field_jacobian(f, p, s.jacobian_step)?;
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = -(d * fp[0] - b * fp[1]) / det;
        let dy = -(-c * fp[0] + a * fp[1]) / det;
        let mut lam = 1.0;
        loop {
            let trial = [p[0] + lam * dx, p[1] + lam * dy];
            if let Some(ft) = f.eval(trial) {
                if fnorm(ft) < r || lam < 1e-3 {
                    p = trial;
                    fp = ft;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-4 {
                return None;
            }
        }
        if lam * dx.hypot(dy) < 1e-15 * (1.0 + fnorm(p)) {
            break;
        }
    }
    (fnorm(fp) < s.tol).then_some(p)
}

/// Saddle stationary point nearest the origin (or `prefer`), seeded on rings.
pub fn find_saddle<F: PlanarField + ?Sized>(f: &F, s: &SaddleSearch) -> Option<Saddle> {
    let mut best: Option<Saddle> = None;
    let centre = s.prefer.unwrap_or([0.0, 0.0]);
    let gap = |p: [f64; 2]| (p[0] - centre[0]).hypot(p[1] - centre[1]);
    let mut seeds: Vec<[f64; 2]> = s.prefer.into_iter().collect();
    for &r in &s.radii {
        for k in 0..s.directions {
            let a = 2.0 * std::f64::consts::PI * k as f64 / s.directions as f64;
            seeds.push([r * a.cos(), r * a.sin()]);
        }
    }
    for seed in seeds {
        let Some(p) = newton_zero(f, seed, s) else {
            continue;
        };
        if fnorm(p) > s.max_radius {
            continue;
        }
        let Some(j) = field_jacobian(f, p, s.jacobian_step) else {
            continue;
        };
        let e = eigen2(j);
        let (l1, l2) = (e.values[0], e.values[1]);
        if l1.1 != 0.0 || !(l1.0 > 0.0 && l2.0 < 0.0) {
            continue;
        }
        let Some(vectors) = e.vectors else { continue };
        let cand = Saddle {
            offset: p,
            residual: f.eval(p).map_or(f64::INFINITY, fnorm),
            eigenvalues: [l1.0, l2.0],
            eigenvectors: vectors,
        };
        if best.as_ref().is_none_or(|b| gap(p) < gap(b.offset)) {
            best = Some(cand);
        }
    }
    best
}

/// X-point of the nodal point in `frame`.
pub fn find_x_point<M: WavefunctionModel<f64> + ?Sized>(
    frame: &FrozenFrame<'_, M>,
    s: &SaddleSearch,
) -> Result<XPointRecord> {
    let sd = find_saddle(frame, s).ok_or(Error::NoSaddle { t: frame.t })?;
    Ok(XPointRecord {
        t: frame.t,
        offset: sd.offset,
        position: [frame.node[0] + sd.offset[0], frame.node[1] + sd.offset[1]],
        eigenvalues: sd.eigenvalues,
        eigenvectors: sd.eigenvectors,
        residual: sd.residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeClassification {
    pub class: NodeClass,
    /// growth rate ± i·rotation rate
    pub eigenvalues: [(f64, f64); 2],
    /// averaged radial drift per revolution
    pub drift: f64,
}

/// Attractor/repellor test on a ring of radius ε around the origin.
///
/// Near a node the field is F ≈ g(θ)/r ê_θ + O(1) + O(r). Splitting ring
/// samples at θ and θ + π by parity isolates the three orders; the
/// revolution-averaged d ln r / dt then follows from the slow drift of r
/// over one fast turn.
pub fn classify_nodal_point<F: PlanarField + ?Sized>(
    f: &F,
    eps: f64,
    directions: usize,
) -> Result<NodeClassification> {
    let half = (directions / 2).max(1);
    let (mut drift, mut turn) = (0.0, 0.0);
    let dtheta = std::f64::consts::PI / half as f64;
    for j in 0..half {
        let th = dtheta * j as f64;
        let e = [th.cos(), th.sin()];
        let n = [-e[1], e[0]];
        let fp = f.eval([eps * e[0], eps * e[1]]).ok_or(Error::NearNode)?;
        let fm = f.eval([-eps * e[0], -eps * e[1]]).ok_or(Error::NearNode)?;
        let dot = |v: [f64; 2], w: [f64; 2]| v[0] * w[0] + v[1] * w[1];
        let (fr_p, fr_m) = (dot(fp, e), -dot(fm, e));
        let (ft_p, ft_m) = (dot(fp, n), -dot(fm, n));
        let c2 = (fr_p + fr_m) / (2.0 * eps);
        let c1 = (fr_p - fr_m) / 2.0;
        let g = eps * (ft_p + ft_m) / 2.0;
        let h = (ft_p - ft_m) / 2.0;
        if g == 0.0 {
            return Err(Error::NearNode);
        }
        // both θ and θ + π contribute the same even-order terms
        drift += 2.0 * dtheta * (c2 / g - c1 * h / (g * g));
        turn += 2.0 * dtheta / g;
    }
    let rate = drift / turn;
    let rot = 2.0 * std::f64::consts::PI / (eps * eps * turn.abs());
    Ok(NodeClassification {
        class: super::NodeClass::from_rate(rate),
        eigenvalues: [(rate, rot), (rate, -rot)],
        drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_saddle_fixture() {
        let f = |p: [f64; 2]| Some([p[0], -p[1]]);
        let s = find_saddle(&f, &SaddleSearch::default()).unwrap();
        assert!(fnorm(s.offset) < 1e-12);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-9 && (s.eigenvalues[1] + 1.0).abs() < 1e-9);
        assert!(s.eigenvectors[0][0].abs() > 1.0 - 1e-12);
    }

    #[test]
    fn displaced_saddle() {
        let f = |p: [f64; 2]| Some([p[0] - 0.5 + 0.1 * p[1], -p[1]]);
        let s = find_saddle(&f, &SaddleSearch::default()).unwrap();
        assert!(s.residual < 1e-10);
        assert!((s.offset[0] - 0.5).abs() < 1e-9);
    }

    fn spiral(a: f64, w: f64) -> impl Fn([f64; 2]) -> Option<[f64; 2]> {
        move |p: [f64; 2]| {
            let r2 = p[0] * p[0] + p[1] * p[1];
            (r2 > 0.0).then(|| {
                [
                    -w * p[1] / r2 + a * p[0] + 0.3,
                    w * p[0] / r2 + a * p[1] - 0.2,
                ]
            })
        }
    }

    #[test]
    fn spiral_fixtures() {
        for w in [1.0, -2.0] {
            let c = classify_nodal_point(&spiral(-0.1, w), RING_RADIUS, 16).unwrap();
            assert_eq!(c.class, NodeClass::Attractor, "w = {w}");
            assert!((c.eigenvalues[0].0 + 0.1).abs() < 1e-6, "{c:?}");
            let c = classify_nodal_point(&spiral(0.25, w), RING_RADIUS, 16).unwrap();
            assert_eq!(c.class, NodeClass::Repellor);
        }
        let c = classify_nodal_point(&spiral(0.0, 1.0), RING_RADIUS, 16).unwrap();
        assert_eq!(c.class, NodeClass::Degenerate, "{c:?}");
    }

    #[test]
    fn eigen_of_rotation_is_complex() {
        let e = eigen2([[0.0, -1.0], [1.0, 0.0]]);
        assert_eq!(e.values[0], (0.0, 1.0));
        assert!(e.vectors.is_none());
    }
}
