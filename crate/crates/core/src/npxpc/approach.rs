//! Close approaches of a trajectory to the moving nodal points.

use super::frame::{find_x_point, FrozenFrame, SaddleSearch};
use super::nodes::{analytic_nodal_velocity, nodal_velocity, node_positions, NodeSearch};
use crate::dynamics::TrajectoryPath;
use crate::wavefunctions::AnyModel;
use serde::{Deserialize, Serialize};

pub const DEFAULT_APPROACH_DISTANCE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachEvent {
    pub t_start: f64,
    pub t_end: f64,
    /// branch of the closest node
    pub k: i64,
    pub d_node_min: f64,
    pub d_x_min: Option<f64>,
    pub chi_before: Option<f64>,
    pub chi_after: Option<f64>,
}

impl ApproachEvent {
    pub fn chi_jump(&self) -> Option<f64> {
        Some(self.chi_after?.abs() - self.chi_before?.abs())
    }
}

fn nearest_node(
    model: &AnyModel<f64>,
    q: &[f64],
    t: f64,
    search: &NodeSearch,
) -> Option<(i64, Vec<f64>, f64)> {
    let (finite, _) = node_positions(model, t, search).ok()?;
    finite
        .into_iter()
        .map(|(k, p)| {
            let d = (p[0] - q[0]).hypot(p[1] - q[1]);
            (k, p, d)
        })
        .min_by(|a, b| a.2.total_cmp(&b.2))
}

fn x_distance(model: &AnyModel<f64>, q: &[f64], t: f64, k: i64, node: &[f64]) -> Option<f64> {
    let v = analytic_nodal_velocity(model, t)
        .map_or_else(|| nodal_velocity(model, t, k, node).ok(), Some)?;
    let frame = FrozenFrame::new(model, t, [node[0], node[1]], [v[0], v[1]]);
    let x = find_x_point(&frame, &SaddleSearch::default()).ok()?;
    Some((x.position[0] - q[0]).hypot(x.position[1] - q[1]))
}

/// Maximal runs of samples with node distance below `threshold`.
pub fn approach_events(
    path: &TrajectoryPath<f64>,
    model: &AnyModel<f64>,
    threshold: f64,
) -> Vec<ApproachEvent> {
    let search = NodeSearch {
        positions_only: true,
        ..NodeSearch::default()
    };
    let mut out = Vec::new();
    let mut open: Option<(usize, ApproachEvent)> = None;
    let ss = &path.samples;
    for (i, s) in ss.iter().enumerate() {
        let near = nearest_node(model, &s.q, s.t, &search).filter(|n| n.2 < threshold);
        match (near, open.as_mut()) {
            (Some((k, node, d)), ev) => {
                let dx = x_distance(model, &s.q, s.t, k, &node);
                match ev {
                    Some((_, e)) => {
                        e.t_end = s.t;
                        if d < e.d_node_min {
                            e.d_node_min = d;
                            e.k = k;
                        }
                        if let Some(dx) = dx {
                            e.d_x_min = Some(e.d_x_min.map_or(dx, |m| m.min(dx)));
                        }
                    }
                    None => {
                        let before = i.checked_sub(1).and_then(|j| ss[j].chi);
                        open = Some((
                            i,
                            ApproachEvent {
                                t_start: s.t,
                                t_end: s.t,
                                k,
                                d_node_min: d,
                                d_x_min: dx,
                                chi_before: before,
                                chi_after: None,
                            },
                        ));
                    }
                }
            }
            (None, Some(_)) => {
                let (_, mut e) = open.take().unwrap();
                e.chi_after = s.chi;
                out.push(e);
            }
            (None, None) => {}
        }
    }
    if let Some((_, e)) = open {
        out.push(e);
    }
    out
}

/// Mean change of |χ| across events closer than `d`.
pub fn mean_chi_jump(events: &[ApproachEvent], d: f64) -> Option<f64> {
    let j: Vec<f64> = events
        .iter()
        .filter(|e| e.d_node_min < d)
        .filter_map(|e| e.chi_jump())
        .collect();
    (!j.is_empty()).then(|| j.iter().sum::<f64>() / j.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TrajectorySample;
    use crate::wavefunctions::{ModelSpec, SystemASpec};

    #[test]
    fn far_path_has_no_events() {
        let m = ModelSpec::SystemA(SystemASpec::default())
            .build::<f64>()
            .unwrap();
        let path = TrajectoryPath {
            samples: (1..40)
                .map(|i| TrajectorySample {
                    t: 0.05 * i as f64,
                    q: vec![40.0, 40.0],
                    xi: None,
                    chi: None,
                })
                .collect(),
        };
        assert!(approach_events(&path, &m, 0.5).is_empty());
    }
}
