//! Asymptotic curves of an X-point in the frozen frame.

use super::{PlanarField, XPointRecord};
use crate::dynamics::{Dp5, NoHook, OdeSystem, Singular, StepControl};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    UnstablePlus,
    UnstableMinus,
    StablePlus,
    StableMinus,
}

impl BranchKind {
    pub const ALL: [BranchKind; 4] = [
        BranchKind::UnstablePlus,
        BranchKind::UnstableMinus,
        BranchKind::StablePlus,
        BranchKind::StableMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BranchKind::UnstablePlus => "unstable+",
            BranchKind::UnstableMinus => "unstable-",
            BranchKind::StablePlus => "stable+",
            BranchKind::StableMinus => "stable-",
        }
    }

    fn unstable(self) -> bool {
        matches!(self, BranchKind::UnstablePlus | BranchKind::UnstableMinus)
    }

    fn sign(self) -> f64 {
        match self {
            BranchKind::UnstablePlus | BranchKind::StablePlus => 1.0,
            _ => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ArcLength,
    /// the field refused a point next to the node
    Node,
    Escaped,
    /// reached another stationary point
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBranch {
    pub kind: BranchKind,
    /// frame coordinates, node at the origin
    pub points: Vec<[f64; 2]>,
    pub lab: Vec<[f64; 2]>,
    pub arc_length: f64,
    pub termination: Termination,
    /// signed revolutions about the node
    pub winding: f64,
    pub min_node_distance: f64,
    pub final_node_distance: f64,
}

impl AsymptoticBranch {
    /// Ends inside the disc of radius `radius` about the node after at least
    /// one full turn.
    pub fn spirals_into(&self, radius: f64) -> bool {
        self.final_node_distance < radius && self.winding.abs() >= 1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsymptoticConfig {
    pub arc_length: f64,
    /// output spacing in arc length, reduced near the node
    pub step: f64,
    /// offset from the X-point along the eigenvector
    pub delta: f64,
    pub escape_radius: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self {
            arc_length: 60.0,
            step: 0.01,
            delta: 1e-6,
            escape_radius: 20.0,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

/// du/ds = ±F/|F|.
struct UnitFlow<'a, F: ?Sized> {
    field: &'a F,
    sign: f64,
}

impl<F: PlanarField + ?Sized> OdeSystem<f64> for UnitFlow<'_, F> {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _s: &f64, y: &[f64], dy: &mut [f64]) -> Result<(), Singular> {
        let f = self.field.eval([y[0], y[1]]).ok_or(Singular)?;
        let n = f[0].hypot(f[1]);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Singular);
        }
        dy[0] = self.sign * f[0] / n;
        dy[1] = self.sign * f[1] / n;
        Ok(())
    }
}

/// Speed below this fraction of the X-point eigenvalue scale counts as
/// having reached another stationary point.
const STALL_FACTOR: f64 = 1e-8;

/// The four branches: unstable ones forward in time, stable ones backward.
pub fn trace_asymptotic_curves<F: PlanarField + ?Sized>(
    field: &F,
    x: &XPointRecord,
    node_lab: [f64; 2],
    cfg: &AsymptoticConfig,
) -> Vec<AsymptoticBranch> {
    let scale = x.eigenvalues[0].abs().max(x.eigenvalues[1].abs());
    BranchKind::ALL
        .iter()
        .map(|&kind| {
            let e = if kind.unstable() {
                x.eigenvectors[0]
            } else {
                x.eigenvectors[1]
            };
            let s = kind.sign() * cfg.delta;
            let start = [x.offset[0] + s * e[0], x.offset[1] + s * e[1]];
            let sys = UnitFlow {
                field,
                sign: if kind.unstable() { 1.0 } else { -1.0 },
            };
            let ctl = StepControl {
                rtol: cfg.rtol,
                atol: cfg.atol,
                max_step: cfg.step,
                min_step: 1e-14,
                max_steps: 50_000_000,
            };
            let mut ode = Dp5::new(ctl, 0.0, start.to_vec());
            let mut points = vec![start];
            let mut angle = start[1].atan2(start[0]);
            let mut winding = 0.0;
            let mut min_d = start[0].hypot(start[1]);
            let mut termination = Termination::ArcLength;
            let mut d = min_d;
            while ode.t < cfg.arc_length {
                // finer output close to the node keeps the winding count unaliased
                let target = (ode.t + cfg.step.min(0.5 * d)).min(cfg.arc_length);
                if ode.advance_to(&sys, &target, &mut NoHook).is_err() {
                    termination = Termination::Node;
                    break;
                }
                let p = [ode.y[0], ode.y[1]];
                let a = p[1].atan2(p[0]);
                let mut da = a - angle;
                if da > std::f64::consts::PI {
                    da -= 2.0 * std::f64::consts::PI;
                } else if da < -std::f64::consts::PI {
                    da += 2.0 * std::f64::consts::PI;
                }
                winding += da;
                angle = a;
                d = p[0].hypot(p[1]);
                min_d = min_d.min(d);
                points.push(p);
                if d > cfg.escape_radius {
                    termination = Termination::Escaped;
                    break;
                }
                if let Some(f) = field.eval(p) {
                    if f[0].hypot(f[1]) < STALL_FACTOR * scale * d.max(1.0) {
                        termination = Termination::Stalled;
                        break;
                    }
                }
            }
            let last = *points.last().unwrap();
            AsymptoticBranch {
                kind,
                lab: points
                    .iter()
                    .map(|p| [p[0] + node_lab[0], p[1] + node_lab[1]])
                    .collect(),
                points,
                arc_length: ode.t,
                termination,
                winding: winding / (2.0 * std::f64::consts::PI),
                min_node_distance: min_d,
                final_node_distance: last[0].hypot(last[1]),
            }
        })
        .collect()
}

/// Polyline CSV with a `branch` column.
pub fn write_branches_csv<W: std::io::Write>(
    branches: &[AsymptoticBranch],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "branch,s_index,u,v,x,y")?;
    for b in branches {
        for (i, (p, l)) in b.points.iter().zip(&b.lab).enumerate() {
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                b.kind.name(),
                i,
                p[0],
                p[1],
                l[0],
                l[1]
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::npxpc::{find_saddle, SaddleSearch};

    fn record_for(f: &impl PlanarField) -> XPointRecord {
        let s = find_saddle(f, &SaddleSearch::default()).unwrap();
        XPointRecord {
            t: 0.0,
            offset: s.offset,
            position: s.offset,
            eigenvalues: s.eigenvalues,
            eigenvectors: s.eigenvectors,
            residual: s.residual,
        }
    }

    #[test]
    fn linear_saddle_branches_are_half_axes() {
        let f = |p: [f64; 2]| Some([p[0], -p[1]]);
        let x = record_for(&f);
        let cfg = AsymptoticConfig {
            arc_length: 2.0,
            ..Default::default()
        };
        let br = trace_asymptotic_curves(&f, &x, [0.0, 0.0], &cfg);
        for b in &br {
            for p in &b.points {
                let off = if b.kind.unstable() { p[1] } else { p[0] };
                assert!(off.abs() < 1e-8, "{:?} {p:?}", b.kind);
            }
        }
        // stable branches run backward along the contracting axis, out to arc length 2
        assert!(br.iter().all(|b| b.termination == Termination::ArcLength));
    }
}
