//! Attractor/repellor transitions of a nodal point along t.

use super::frame::{classify_nodal_point, FrozenFrame, RING_DIRECTIONS, RING_RADIUS};
use super::nodes::{
    analytic_nodal_velocity, newton_node_2d, nodal_velocity, node_positions, NodeSearch,
};
use super::NodeClass;
use crate::wavefunctions::AnyModel;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfEvent {
    pub t: f64,
    pub from: NodeClass,
    pub to: NodeClass,
    /// rates at the refined bracket ends
    pub rate_before: f64,
    pub rate_after: f64,
}

/// Sign changes of the rate on a grid, refined by bisection to `tol` in t.
///
/// `sample(t)` returns (rate, |node position|). Grid points where it is
/// undefined break the scan. A bracket whose rate grows under refinement, or
/// whose node runs off far beyond the bracket ends, is a pole (node passing
/// through infinity) and is dropped.
pub fn hopf_scan<F: Fn(f64) -> Option<(f64, f64)>>(
    sample: F,
    t0: f64,
    t1: f64,
    step: f64,
    tol: f64,
) -> Vec<HopfEvent> {
    let n = ((t1 - t0) / step).ceil().max(1.0) as usize;
    let grid: Vec<(f64, Option<(f64, f64)>)> = (0..=n)
        .map(|i| {
            let t = (t0 + step * i as f64).min(t1);
            (t, sample(t))
        })
        .collect();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let ((mut a, ra), (mut b, rb)) = (w[0], w[1]);
        let (Some((mut ra, da)), Some((mut rb, db))) = (ra, rb) else {
            continue;
        };
        if ra.signum() == rb.signum() || ra == 0.0 || rb == 0.0 {
            continue;
        }
        let bound = ra.abs().min(rb.abs());
        let reach = 10.0 * da.max(db).max(1.0);
        let mut lost = false;
        while b - a > tol {
            let m = 0.5 * (a + b);
            let Some((rm, dm)) = sample(m) else {
                lost = true;
                break;
            };
            if dm > reach {
                lost = true;
                break;
            }
            if rm.signum() == ra.signum() {
                a = m;
                ra = rm;
            } else {
                b = m;
                rb = rm;
            }
        }
        if lost || ra.abs().min(rb.abs()) > bound {
            continue;
        }
        out.push(HopfEvent {
            t: 0.5 * (a + b),
            from: side(ra),
            to: side(rb),
            rate_before: ra,
            rate_after: rb,
        });
    }
    out
}

fn side(rate: f64) -> NodeClass {
    if rate < 0.0 {
        NodeClass::Attractor
    } else {
        NodeClass::Repellor
    }
}

/// Beyond this distance from the origin the envelope underflows and the ring
/// rate is noise.
pub const MAX_NODE_DISTANCE: f64 = 10.0;

/// Averaged radial rate of node `k` at t and the node's distance from the
/// origin. Generic models follow the root nearest `hint`.
pub fn nodal_rate(
    model: &AnyModel<f64>,
    k: i64,
    t: f64,
    hint: Option<[f64; 2]>,
) -> Option<(f64, f64)> {
    let pos: Vec<f64> = match (model, hint) {
        (AnyModel::Superposition(m), Some(h)) => newton_node_2d(m, h, t, 1e-14, 50)?.to_vec(),
        _ => {
            let (finite, _) = node_positions(model, t, &NodeSearch::default()).ok()?;
            finite.into_iter().find(|(kk, _)| *kk == k)?.1
        }
    };
    if pos[0].hypot(pos[1]) > MAX_NODE_DISTANCE {
        return None;
    }
    let v = analytic_nodal_velocity(model, t)
        .map_or_else(|| nodal_velocity(model, t, k, &pos).ok(), Some)?;
    let frame = FrozenFrame::new(model, t, [pos[0], pos[1]], [v[0], v[1]]);
    let c = classify_nodal_point(&frame, RING_RADIUS, RING_DIRECTIONS).ok()?;
    Some((c.eigenvalues[0].0, pos[0].hypot(pos[1])))
}

/// Scan of one nodal point of `model`.
pub fn hopf_scan_model(
    model: &AnyModel<f64>,
    k: i64,
    hint: Option<[f64; 2]>,
    t0: f64,
    t1: f64,
    step: f64,
) -> Vec<HopfEvent> {
    hopf_scan(|t| nodal_rate(model, k, t, hint), t0, t1, step, 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_attractor_has_no_transition() {
        assert!(hopf_scan(|_| Some((-0.3, 1.0)), 0.0, 3.0, 0.05, 1e-6).is_empty());
    }

    #[test]
    fn root_is_refined_and_pole_dropped() {
        // zero at 1.1, pole at 2.0
        let r = |t: f64| Some((100.0 * (t - 1.1) / (t - 2.0), 1.0));
        let ev = hopf_scan(r, 0.0, 3.0, 0.07, 1e-6);
        assert_eq!(ev.len(), 1, "{ev:?}");
        assert!((ev[0].t - 1.1).abs() < 1e-6);
        assert_eq!(
            (ev[0].from, ev[0].to),
            (NodeClass::Repellor, NodeClass::Attractor)
        );
        assert!(r(ev[0].t - 1e-6).unwrap().0 * r(ev[0].t + 1e-6).unwrap().0 < 0.0);
    }
}
