//! Finite-time LCN series and the order/chaos rule.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderClass {
    Ordered,
    Chaotic,
    Undetermined,
}

impl std::fmt::Display for OrderClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OrderClass::Ordered => "ordered",
            OrderClass::Chaotic => "chaotic",
            OrderClass::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LcnThresholds {
    /// slope at or below this is ordered
    pub ordered_slope: f64,
    /// slope above this, with a large enough mean, is chaotic
    pub chaotic_slope: f64,
    pub chi_min: f64,
    /// trailing |χ| below this is round-off of an exactly vanishing exponent
    pub zero_chi: f64,
}

impl Default for LcnThresholds {
    fn default() -> Self {
        Self {
            ordered_slope: -0.8,
            chaotic_slope: -0.2,
            chi_min: 0.005,
            zero_chi: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: OrderClass,
    pub slope: f64,
    pub trailing_mean: f64,
    pub decades: f64,
}

/// (t, χ) pairs with strictly increasing t.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LcnSeries {
    pub points: Vec<(f64, f64)>,
    pub classification: Option<Classification>,
}

impl LcnSeries {
    pub fn from_fn(times: impl IntoIterator<Item = f64>, chi: impl Fn(f64) -> f64) -> Self {
        Self {
            points: times.into_iter().map(|t| (t, chi(t))).collect(),
            classification: None,
        }
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        self.points.last().copied()
    }

    /// `t,chi`
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,chi")?;
        for (t, c) in &self.points {
            writeln!(w, "{t:.16e},{c:.16e}")?;
        }
        Ok(())
    }

    /// Least-squares slope of ln|χ| against ln t for t in [lo, hi].
    pub fn loglog_slope(&self, lo: f64, hi: f64) -> Option<f64> {
        let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(t, c) in &self.points {
            if t < lo || t > hi || t <= 0.0 {
                continue;
            }
            let x = t.ln();
            let y = c.abs().max(1e-300).ln();
            n += 1.0;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let den = n * sxx - sx * sx;
        if n < 2.0 || den <= 0.0 {
            return None;
        }
        Some((n * sxy - sx * sy) / den)
    }

    /// Mean of χ over t in [lo, hi].
    pub fn mean(&self, lo: f64, hi: f64) -> Option<f64> {
        let v: Vec<f64> = self
            .points
            .iter()
            .filter(|(t, _)| *t >= lo && *t <= hi)
            .map(|p| p.1)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn classify(&mut self, th: &LcnThresholds) -> Result<OrderClass> {
        let c = classify_trajectory(self, th)?;
        let class = c.class;
        self.classification = Some(c);
        Ok(class)
    }
}

/// Order/chaos rule on the trailing decade of the series.
pub fn classify_trajectory(series: &LcnSeries, th: &LcnThresholds) -> Result<Classification> {
    let first = series.points.iter().find(|p| p.0 > 0.0).map(|p| p.0);
    let last = series.points.last().map(|p| p.0);
    let (first, last) = match (first, last) {
        (Some(a), Some(b)) if b > a => (a, b),
        _ => return Err(Error::InsufficientSpan { decades: 0.0 }),
    };
    let decades = (last / first).log10();
    if decades < 2.0 {
        return Err(Error::InsufficientSpan { decades });
    }
    let lo = last / 10.0;
    let slope = series
        .loglog_slope(lo, last)
        .ok_or(Error::InsufficientSpan { decades })?;
    let trailing_mean = series.mean(lo, last).unwrap_or(0.0);
    let peak = series
        .points
        .iter()
        .filter(|p| p.0 >= lo)
        .fold(0.0f64, |m, p| m.max(p.1.abs()));
    let class = if slope <= th.ordered_slope || peak < th.zero_chi {
        OrderClass::Ordered
    } else if slope > th.chaotic_slope && trailing_mean > th.chi_min {
        OrderClass::Chaotic
    } else {
        OrderClass::Undetermined
    };
    Ok(Classification {
        class,
        slope,
        trailing_mean,
        decades,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> impl Iterator<Item = f64> {
        (1..=200_000).map(|k| k as f64 * 0.05)
    }

    #[test]
    fn power_law_is_ordered() {
        let s = LcnSeries::from_fn(grid(), |t| 3.0 / t);
        let c = classify_trajectory(&s, &LcnThresholds::default()).unwrap();
        assert_eq!(c.class, OrderClass::Ordered);
        assert!((c.slope + 1.0).abs() < 1e-9);
    }

    #[test]
    fn saturation_is_chaotic() {
        let s = LcnSeries::from_fn(grid(), |t| 0.13 + 0.01 * t.sin());
        let c = classify_trajectory(&s, &LcnThresholds::default()).unwrap();
        assert_eq!(c.class, OrderClass::Chaotic);
        assert!((c.trailing_mean - 0.13).abs() < 1e-3);
    }

    #[test]
    fn short_series_is_rejected() {
        let s = LcnSeries::from_fn((1..=50).map(|k| k as f64), |t| 1.0 / t);
        assert!(matches!(
            classify_trajectory(&s, &LcnThresholds::default()),
            Err(Error::InsufficientSpan { .. })
        ));
    }

    #[test]
    fn tiny_saturation_is_undetermined() {
        let s = LcnSeries::from_fn(grid(), |_| 0.001);
        let c = classify_trajectory(&s, &LcnThresholds::default()).unwrap();
        assert_eq!(c.class, OrderClass::Undetermined);
    }
}
