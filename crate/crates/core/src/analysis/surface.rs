//! Integrals of motion of the 3-D superpositions.

use crate::dynamics::TrajectoryPath;
use crate::error::{Error, Result};
use crate::param::Param;
use serde::{Deserialize, Serialize};

fn sqrt3() -> Param {
    Param::Expr("sqrt(3)".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegralSurfaceSpec {
    /// x² + y² + z²/2 − ln z/(2ω₃)
    Pear {
        #[serde(default = "sqrt3")]
        omega3: Param,
    },
    /// −x² + y² + z²/2 − ln z/(2ω₃)
    Open {
        #[serde(default = "sqrt3")]
        omega3: Param,
    },
    /// x² + z² and y
    CirclePair,
}

impl IntegralSurfaceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Pear { omega3 } | Self::Open { omega3 } => {
                let w = omega3.value()?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::Config(format!("omega3 = {w} must be positive")));
                }
                Ok(())
            }
            Self::CirclePair => Ok(()),
        }
    }

    /// Conserved quantities at q.
    pub fn invariants(&self, q: &[f64], t: f64) -> Result<Vec<f64>> {
        if q.len() != 3 {
            return Err(Error::Config("integral surfaces are 3-D".into()));
        }
        let [x, y, z] = [q[0], q[1], q[2]];
        let log_term = |w: &Param| -> Result<f64> {
            if !(z > 0.0) {
                return Err(Error::NonPositiveZ { t, z });
            }
            Ok(z.ln() / (2.0 * w.value()?))
        };
        Ok(match self {
            Self::Pear { omega3 } => vec![x * x + y * y + 0.5 * z * z - log_term(omega3)?],
            Self::Open { omega3 } => vec![-x * x + y * y + 0.5 * z * z - log_term(omega3)?],
            Self::CirclePair => vec![x * x + z * z, y],
        })
    }
}

/// Peak |C(t) − C(0)| / |C(0)| over the path and all invariants (absolute
/// when C(0) = 0).
pub fn surface_residual(path: &TrajectoryPath<f64>, spec: &IntegralSurfaceSpec) -> Result<f64> {
    spec.validate()?;
    let Some(first) = path.samples.first() else {
        return Ok(0.0);
    };
    let c0 = spec.invariants(&first.q, first.t)?;
    let mut worst: f64 = 0.0;
    for s in &path.samples {
        let c = spec.invariants(&s.q, s.t)?;
        for (a, b) in c.iter().zip(&c0) {
            let scale = if *b == 0.0 { 1.0 } else { b.abs() };
            worst = worst.max((a - b).abs() / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TrajectorySample;

    #[test]
    fn constant_path_has_no_drift() {
        let path = TrajectoryPath {
            samples: (0..5)
                .map(|i| TrajectorySample {
                    t: i as f64,
                    q: vec![0.3, -0.2, 0.8],
                    xi: None,
                    chi: None,
                })
                .collect(),
        };
        for s in [
            IntegralSurfaceSpec::Pear { omega3: sqrt3() },
            IntegralSurfaceSpec::CirclePair,
        ] {
            assert_eq!(surface_residual(&path, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn log_kinds_reject_lower_half_space() {
        let s = IntegralSurfaceSpec::Open { omega3: sqrt3() };
        assert!(matches!(
            s.invariants(&[0.0, 0.0, -1.0], 2.0),
            Err(Error::NonPositiveZ { .. })
        ));
    }
}
