//! Continuation of a nodal line in 3-D at frozen t.

use super::frame::{find_saddle, SaddleSearch};
use crate::dynamics::bohm_velocity;
use crate::error::{Error, Result};
use crate::scalar::Complex;
use crate::wavefunctions::WavefunctionModel;
use serde::{Deserialize, Serialize};

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn unit(a: V3) -> V3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn axpy(x: V3, s: f64, d: V3) -> V3 {
    [x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]]
}

fn dist(a: V3, b: V3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    dot(d, d).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LineConfig {
    pub arc_length: f64,
    pub step: f64,
    pub min_step: f64,
    /// |Ψ| accepted on the line
    pub residual: f64,
    pub max_newton: usize,
    /// continuation stops (not an error) beyond this radius
    pub bound: f64,
    pub closure_tol: f64,
    /// search an X-point in every F-plane
    pub x_line: bool,
}

impl Default for LineConfig {
    fn default() -> Self {
        Self {
            arc_length: 10.0,
            step: 0.01,
            min_step: 1e-6,
            residual: 1e-9,
            max_newton: 20,
            bound: 10.0,
            closure_tol: 1e-6,
            x_line: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FPlaneXPoint {
    pub offset: [f64; 2],
    pub position: V3,
    pub eigenvalues: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinePoint {
    pub s: f64,
    pub position: V3,
    pub tangent: V3,
    /// orthonormal basis of the F-plane
    pub basis: [V3; 2],
    pub residual: f64,
    pub x_point: Option<FPlaneXPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineEnd {
    ArcLength,
    ClosedLoop,
    LeftBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalLine {
    pub t: f64,
    pub points: Vec<LinePoint>,
    pub end: LineEnd,
}

fn psi_parts<M: WavefunctionModel<f64> + ?Sized>(m: &M, q: V3, t: f64) -> (Complex<f64>, V3, V3) {
    let g = m.grad_psi(&q, &t);
    (
        m.psi(&q, &t),
        [g[0].re, g[1].re, g[2].re],
        [g[0].im, g[1].im, g[2].im],
    )
}

/// Relative depth |φ| / Σ|terms| accepted as on the line.
const DEPTH: f64 = 1e-10;

/// Minimum-norm Newton on ln φ: Re L·δ = −1, Im L·δ = 0 with L = ∇φ/φ.
/// Scale-free, so the Gaussian tail cannot fake a root.
fn correct<M: WavefunctionModel<f64> + ?Sized>(
    m: &M,
    mut q: V3,
    t: f64,
    cfg: &LineConfig,
) -> Option<V3> {
    let on_line = |q: V3| {
        let ld = m.log_derivs(&q, &t, false);
        ld.indicator < DEPTH * DEPTH && m.psi(&q, &t).abs() < cfg.residual
    };
    for _ in 0..cfg.max_newton {
        let ld = m.log_derivs(&q, &t, false);
        if ld.indicator == 0.0 {
            return Some(q);
        }
        let a = [ld.first[0].re, ld.first[1].re, ld.first[2].re];
        let b = [ld.first[0].im, ld.first[1].im, ld.first[2].im];
        let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
        let det = aa * bb - ab * ab;
        if !(det > 0.0) || !det.is_finite() {
            return None;
        }
        // δ = Jᵀ(JJᵀ)⁻¹(−1, 0)
        let l1 = -bb / det;
        let l2 = ab / det;
        let d = [
            l1 * a[0] + l2 * b[0],
            l1 * a[1] + l2 * b[1],
            l1 * a[2] + l2 * b[2],
        ];
        q = axpy(q, 1.0, d);
        if !q.iter().all(|v| v.is_finite()) {
            return None;
        }
        if dot(d, d).sqrt() < 1e-14 * (1.0 + dot(q, q).sqrt()) {
            break;
        }
    }
    on_line(q).then_some(q)
}

fn tangent_at<M: WavefunctionModel<f64> + ?Sized>(m: &M, q: V3, t: f64) -> Option<V3> {
    let (_, a, b) = psi_parts(m, q, t);
    let c = cross(a, b);
    let n = dot(c, c).sqrt();
    (n > 0.0 && n.is_finite()).then(|| unit(c))
}

/// Orthonormal pair spanning the plane orthogonal to `t`.
pub fn f_plane_basis(t: V3) -> [V3; 2] {
    let k = (0..3)
        .min_by(|&i, &j| t[i].abs().total_cmp(&t[j].abs()))
        .unwrap();
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let e1 = unit(axpy(e, -dot(e, t), t));
    [e1, cross(t, e1)]
}

/// Velocity of the line normal to itself: J·w = −∂Ψ/∂t with w ⟂ tangent.
fn line_velocity<M: WavefunctionModel<f64> + ?Sized>(m: &M, q: V3, t: f64) -> V3 {
    let h = 1e-6;
    let dp = m.psi(&q, &(t + h)) - m.psi(&q, &(t - h));
    let (gr, gi) = (dp.re / (2.0 * h), dp.im / (2.0 * h));
    let (_, a, b) = psi_parts(m, q, t);
    let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
    let det = aa * bb - ab * ab;
    let l1 = (bb * gr - ab * gi) / det;
    let l2 = (-ab * gr + aa * gi) / det;
    [
        -(l1 * a[0] + l2 * b[0]),
        -(l1 * a[1] + l2 * b[1]),
        -(l1 * a[2] + l2 * b[2]),
    ]
}

fn x_point_in_plane<M: WavefunctionModel<f64> + ?Sized>(
    m: &M,
    q: V3,
    basis: [V3; 2],
    t: f64,
) -> Option<FPlaneXPoint> {
    let w = line_velocity(m, q, t);
    let field = |u: [f64; 2]| -> Option<[f64; 2]> {
        let p = axpy(axpy(q, u[0], basis[0]), u[1], basis[1]);
        let v = bohm_velocity(m, &p, &t).ok()?;
        let rel = [v[0] - w[0], v[1] - w[1], v[2] - w[2]];
        Some([dot(rel, basis[0]), dot(rel, basis[1])])
    };
    let s = find_saddle(&field, &SaddleSearch::default())?;
    Some(FPlaneXPoint {
        offset: s.offset,
        position: axpy(axpy(q, s.offset[0], basis[0]), s.offset[1], basis[1]),
        eigenvalues: s.eigenvalues,
    })
}

/// Closest approach of the cubic Hermite segment (p0, p1) to `target`.
fn hermite_distance(p0: V3, t0: V3, p1: V3, t1: V3, h: f64, target: V3) -> f64 {
    let at = |s: f64| {
        let (s2, s3) = (s * s, s * s * s);
        let (h00, h10, h01, h11) = (
            2.0 * s3 - 3.0 * s2 + 1.0,
            s3 - 2.0 * s2 + s,
            -2.0 * s3 + 3.0 * s2,
            s3 - s2,
        );
        let mut r = [0.0; 3];
        for i in 0..3 {
            r[i] = h00 * p0[i] + h10 * h * t0[i] + h01 * p1[i] + h11 * h * t1[i];
        }
        r
    };
    // golden-section search on [0, 1]
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if dist(at(c), target) < dist(at(d), target) {
            b = d;
        } else {
            a = c;
        }
    }
    dist(at(0.5 * (a + b)), target)
}

/// Predictor–corrector continuation from `seed` at frozen `t`.
pub fn trace_nodal_line_3d<M: WavefunctionModel<f64> + ?Sized>(
    model: &M,
    t: f64,
    seed: V3,
    cfg: &LineConfig,
) -> Result<NodalLine> {
    if model.dim() != 3 {
        return Err(Error::Unsupported(
            "nodal-line continuation needs a 3-D model".into(),
        ));
    }
    let q0 = correct(model, seed, t, cfg).ok_or(Error::LineLost { points: 0 })?;
    let mk = |s: f64, q: V3, tan: V3| {
        let basis = f_plane_basis(tan);
        LinePoint {
            s,
            position: q,
            tangent: tan,
            basis,
            residual: model.psi(&q, &t).abs(),
            x_point: if cfg.x_line {
                x_point_in_plane(model, q, basis, t)
            } else {
                None
            },
        }
    };
    let t0 = tangent_at(model, q0, t).ok_or(Error::LineLost { points: 0 })?;
    let mut points = vec![mk(0.0, q0, t0)];
    let (mut q, mut tan, mut s) = (q0, t0, 0.0);
    let mut h = cfg.step;
    let mut end = LineEnd::ArcLength;
    while s < cfg.arc_length - 1e-12 {
        let hs = h.min(cfg.arc_length - s);
        let next = correct(model, axpy(q, hs, tan), t, cfg).and_then(|qn| {
            let mut tn = tangent_at(model, qn, t)?;
            if dot(tn, tan) < 0.0 {
                tn = [-tn[0], -tn[1], -tn[2]];
            }
            // reject jumps onto another branch
            (dot(tn, tan) > 0.9 && dist(qn, q) < 2.0 * hs).then_some((qn, tn))
        });
        let Some((qn, tn)) = next else {
            h *= 0.5;
            if h < cfg.min_step {
                return Err(Error::LineLost {
                    points: points.len(),
                });
            }
            continue;
        };
        let chord = dist(qn, q);
        if s > 4.0 * cfg.step
            && dist(q0, q) < 2.0 * chord + cfg.closure_tol
            && hermite_distance(q, tan, qn, tn, chord, q0) < cfg.closure_tol
        {
            end = LineEnd::ClosedLoop;
            break;
        }
        s += chord;
        q = qn;
        tan = tn;
        points.push(mk(s, q, tan));
        if dot(q, q).sqrt() > cfg.bound {
            end = LineEnd::LeftBounds;
            break;
        }
        h = (h * 1.5).min(cfg.step);
    }
    Ok(NodalLine { t, points, end })
}

/// Polyline CSV; the X-line, when present, is a second branch.
pub fn write_line_csv<W: std::io::Write>(line: &NodalLine, mut w: W) -> std::io::Result<()> {
    writeln!(w, "branch,s,x,y,z,residual")?;
    for p in &line.points {
        let [x, y, z] = p.position;
        writeln!(
            w,
            "nodal,{:.16e},{x:.16e},{y:.16e},{z:.16e},{:.3e}",
            p.s, p.residual
        )?;
    }
    for p in &line.points {
        if let Some(xp) = &p.x_point {
            let [x, y, z] = xp.position;
            writeln!(w, "x_line,{:.16e},{x:.16e},{y:.16e},{z:.16e},", p.s)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::{OscillatorSpec, SuperpositionSpec, Term};

    #[test]
    fn basis_is_orthonormal() {
        for t in [
            [1.0, 0.0, 0.0],
            unit([0.3, -2.0, 0.7]),
            unit([1.0, 1.0, 1.0]),
        ] {
            let [a, b] = f_plane_basis(t);
            assert!(dot(a, t).abs() < 1e-15 && dot(b, t).abs() < 1e-15 && dot(a, b).abs() < 1e-15);
            assert!((dot(a, a) - 1.0).abs() < 1e-15 && (dot(b, b) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn vortex_ring_closes() {
        // Ψ₂₀₀ + Ψ₀₂₀ − 2Ψ₀₀₀·c + iΨ₀₀₁ style ring: (x² + y² − r²) + i z
        let spec = SuperpositionSpec {
            oscillator: OscillatorSpec::unit_mass(&[1.0.into(), 1.0.into(), 1.0.into()]),
            terms: vec![
                Term::real(1.0, &[2, 0, 0]),
                Term::real(1.0, &[0, 2, 0]),
                Term::real(1.0, &[0, 0, 0]),
                Term {
                    re: 0.0.into(),
                    im: 1.0.into(),
                    mode: vec![0, 0, 1],
                },
            ],
            normalized: false,
        };
        let m = spec.build::<f64>().unwrap();
        let line = trace_nodal_line_3d(&m, 0.0, [1.2, 0.0, 0.0], &LineConfig::default()).unwrap();
        assert_eq!(line.end, LineEnd::ClosedLoop);
        assert!(line.points.iter().all(|p| p.residual < 1e-9));
        let r0 = line.points[0].position[0];
        assert!(line
            .points
            .iter()
            .all(|p| (p.position[0].hypot(p.position[1]) - r0).abs() < 1e-9));
        assert!(line.points.iter().all(|p| p.position[2].abs() < 1e-9));
    }
}
