//! Stroboscopic sections and simple point-set geometry.

use crate::dynamics::{drive, NoHook, OdeSystem, StepControl};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// State at t₀ + kT for k = 1..=count; the integrator lands on each time.
pub fn stroboscopic_section<S: OdeSystem<f64>>(
    sys: &S,
    y0: &[f64],
    t0: f64,
    period: f64,
    count: usize,
    ctl: StepControl,
) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::Config(
            "a section needs at least one crossing".into(),
        ));
    }
    let times: Vec<f64> = (1..=count).map(|k| t0 + period * k as f64).collect();
    let mut out = Vec::with_capacity(count);
    drive(
        sys,
        ctl,
        t0,
        y0.to_vec(),
        &times,
        &mut NoHook,
        |_, _, y, _| {
            out.push(y.to_vec());
            Ok(())
        },
    )?;
    Ok(out)
}

/// Slope of ln N(ε) against ln(1/ε) over box sizes span/2^k, k in `levels`.
pub fn box_counting_dimension(
    points: &[[f64; 2]],
    levels: std::ops::RangeInclusive<u32>,
) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in points {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0);
    if span <= 0.0 {
        return None;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in levels {
        let n = 1u64 << k;
        let eps = span / n as f64;
        let mut boxes: Vec<u64> = points
            .iter()
            .map(|p| {
                let i = (((p[0] - x0) / eps) as u64).min(n - 1);
                let j = (((p[1] - y0) / eps) as u64).min(n - 1);
                i * n + j
            })
            .collect();
        boxes.sort_unstable();
        boxes.dedup();
        xs.push((1.0 / eps).ln());
        ys.push((boxes.len() as f64).ln());
    }
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Least-squares conic Ax² + Bxy + Cy² + Dx + Ey = 1 through the points.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicFit {
    pub coefficients: [f64; 5],
    /// largest first-order geometric distance of a point from the conic
    pub max_distance: f64,
    pub is_ellipse: bool,
}

pub fn fit_conic(points: &[[f64; 2]]) -> Option<ConicFit> {
    if points.len() < 5 {
        return None;
    }
    // centre and scale first for conditioning
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let s = points
        .iter()
        .map(|p| (p[0] - cx).hypot(p[1] - cy))
        .fold(0.0, f64::max);
    if s == 0.0 {
        return None;
    }
    let local: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [(p[0] - cx) / s, (p[1] - cy) / s])
        .collect();
    let a = DMatrix::from_fn(local.len(), 5, |i, j| {
        let [x, y] = local[i];
        [x * x, x * y, y * y, x, y][j]
    });
    let b = DVector::from_element(local.len(), 1.0);
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let c = [sol[0], sol[1], sol[2], sol[3], sol[4]];
    let max_distance = local
        .iter()
        .map(|&[x, y]| {
            let q = c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x + c[4] * y - 1.0;
            let gx = 2.0 * c[0] * x + c[1] * y + c[3];
            let gy = c[1] * x + 2.0 * c[2] * y + c[4];
            s * q.abs() / gx.hypot(gy)
        })
        .fold(0.0, f64::max);
    Some(ConicFit {
        coefficients: c,
        max_distance,
        is_ellipse: c[1] * c[1] - 4.0 * c[0] * c[2] < 0.0,
    })
}
