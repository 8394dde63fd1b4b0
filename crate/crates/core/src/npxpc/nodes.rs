//! Nodal points: closed forms where available, Newton on ln φ otherwise.

use super::frame::{classify_nodal_point, FrozenFrame};
use super::{NodalRecord, NodalSet, NodeClass};
use crate::error::{Error, Result};
use crate::wavefunctions::{AnyModel, WavefunctionModel};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NodeSearch {
    /// qubit branches |k| ≤ k_max
    pub k_max: i64,
    /// generic search box (xmin, xmax, ymin, ymax)
    pub bounds: [f64; 4],
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub dedupe: f64,
    /// skip velocity and classification
    pub positions_only: bool,
}

impl Default for NodeSearch {
    fn default() -> Self {
        Self {
            k_max: 9,
            bounds: [-5.0, 5.0, -5.0, 5.0],
            grid: 41,
            tol: 1e-12,
            max_iter: 50,
            dedupe: 1e-8,
            positions_only: false,
        }
    }
}

/// Finite-difference step for nodal velocities.
pub const NODE_VELOCITY_STEP: f64 = 1e-5;

/// Newton on ln φ = 0 in the plane. Returns the root and the iteration count.
pub fn newton_node_2d<M: WavefunctionModel<f64> + ?Sized>(
    model: &M,
    seed: [f64; 2],
    t: f64,
    tol: f64,
    max_iter: usize,
) -> Option<[f64; 2]> {
    let mut p = seed;
    for _ in 0..max_iter {
        let ld = model.log_derivs(&p, &t, false);
        if ld.indicator == 0.0 {
            return Some(p);
        }
        let (l1, l2) = (&ld.first[0], &ld.first[1]);
        // Re/Im of ∇φ/φ · δ = −1
        let det = l1.re * l2.im - l2.re * l1.im;
        if !det.is_finite() || det == 0.0 {
            return None;
        }
        let dx = -l2.im / det;
        let dy = l1.im / det;
        p = [p[0] + dx, p[1] + dy];
        if !(p[0].is_finite() && p[1].is_finite()) {
            return None;
        }
        if (dx * dx + dy * dy).sqrt() < tol * (1.0 + p[0].abs().max(p[1].abs())) {
            return Some(p);
        }
    }
    None
}

/// Finite nodes as (id, position), and the branches at infinity.
pub type NodePositions = (Vec<(i64, Vec<f64>)>, Vec<i64>);

/// Closed-form or Newton positions, without velocity or class.
pub fn node_positions(model: &AnyModel<f64>, t: f64, search: &NodeSearch) -> Result<NodePositions> {
    match model {
        AnyModel::SystemA(m) => Ok(match m.node(&t) {
            Some(p) => (vec![(0, p.to_vec())], vec![]),
            None => (vec![], vec![0]),
        }),
        AnyModel::Qubit(m) => {
            let mut finite = Vec::new();
            let mut inf = Vec::new();
            for k in m.branches(search.k_max) {
                match m.node(k, &t) {
                    Some(p) => finite.push((k, p.to_vec())),
                    None => inf.push(k),
                }
            }
            Ok((finite, inf))
        }
        AnyModel::Superposition(m) => {
            if m.dim() != 2 {
                return Err(Error::Unsupported(
                    "nodal points are isolated only in 2-D; use nodal-line continuation in 3-D"
                        .into(),
                ));
            }
            let [x0, x1, y0, y1] = search.bounds;
            let n = search.grid.max(2);
            let mut roots: Vec<[f64; 2]> = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let seed = [
                        x0 + (x1 - x0) * i as f64 / (n - 1) as f64,
                        y0 + (y1 - y0) * j as f64 / (n - 1) as f64,
                    ];
                    let Some(r) = newton_node_2d(m, seed, t, search.tol, search.max_iter) else {
                        continue;
                    };
                    if r[0] < x0 || r[0] > x1 || r[1] < y0 || r[1] > y1 {
                        continue;
                    }
                    if m.psi(&r, &t).abs() > 1e-10 {
                        continue;
                    }
                    if roots.iter().all(|q| {
                        ((q[0] - r[0]).powi(2) + (q[1] - r[1]).powi(2)).sqrt() > search.dedupe
                    }) {
                        roots.push(r);
                    }
                }
            }
            roots.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            Ok((
                roots
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| (i as i64, r.to_vec()))
                    .collect(),
                vec![],
            ))
        }
    }
}

/// Position of the node with id `k` at time `t`, following it from `near`
/// for generic models.
fn node_at(model: &AnyModel<f64>, k: i64, near: &[f64], t: f64) -> Option<Vec<f64>> {
    match model {
        AnyModel::SystemA(m) => m.node(&t).map(|p| p.to_vec()),
        AnyModel::Qubit(m) => m.node(k, &t).map(|p| p.to_vec()),
        AnyModel::Superposition(m) => {
            newton_node_2d(m, [near[0], near[1]], t, 1e-14, 50).map(|p| p.to_vec())
        }
    }
}

/// dN/dt by a central difference of the nodal path with step 1e-5.
pub fn nodal_velocity(model: &AnyModel<f64>, t: f64, k: i64, position: &[f64]) -> Result<Vec<f64>> {
    let h = NODE_VELOCITY_STEP;
    let p = node_at(model, k, position, t + h).ok_or(Error::NodeAtInfinity { t: t + h })?;
    let m = node_at(model, k, position, t - h).ok_or(Error::NodeAtInfinity { t: t - h })?;
    Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect())
}

/// Analytic nodal velocity where the model has one.
pub fn analytic_nodal_velocity(model: &AnyModel<f64>, t: f64) -> Option<Vec<f64>> {
    match model {
        AnyModel::SystemA(m) => m.node_velocity(&t).map(|v| v.to_vec()),
        _ => None,
    }
}

/// Nodes at `t` with velocity, frozen-frame eigenvalues and class.
pub fn nodal_points(model: &AnyModel<f64>, t: f64, search: &NodeSearch) -> Result<NodalSet> {
    let (finite, at_infinity) = node_positions(model, t, search)?;
    if finite.is_empty() && !at_infinity.is_empty() && matches!(model, AnyModel::SystemA(_)) {
        return Err(Error::NodeAtInfinity { t });
    }
    let mut records = Vec::with_capacity(finite.len());
    for (k, position) in finite {
        let mut rec = NodalRecord {
            t,
            k,
            position,
            velocity: None,
            eigenvalues: None,
            class: None,
        };
        if !search.positions_only {
            fill_dynamics(model, &mut rec);
        }
        records.push(rec);
    }
    Ok(NodalSet {
        t,
        nodes: records,
        at_infinity,
    })
}

/// Adds velocity, eigenvalues and class; leaves them empty when the stencil
/// reaches a time where the node is at infinity.
pub fn fill_dynamics(model: &AnyModel<f64>, rec: &mut NodalRecord) {
    let v = analytic_nodal_velocity(model, rec.t)
        .map(Ok)
        .unwrap_or_else(|| nodal_velocity(model, rec.t, rec.k, &rec.position));
    let Ok(v) = v else { return };
    let frame = FrozenFrame::new(
        model,
        rec.t,
        [rec.position[0], rec.position[1]],
        [v[0], v[1]],
    );
    if let Ok(c) = classify_nodal_point(
        &frame,
        super::frame::RING_RADIUS,
        super::frame::RING_DIRECTIONS,
    ) {
        rec.eigenvalues = Some(c.eigenvalues);
        rec.class = Some(c.class);
    }
    rec.velocity = Some(v);
}

/// Re-labels generic roots so ids follow nearest neighbours between slices.
pub fn match_ids(previous: &[NodalRecord], current: &mut [NodalRecord], next_id: &mut i64) {
    let mut taken = vec![false; previous.len()];
    for rec in current.iter_mut() {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in previous.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let d = rec
                .position
                .iter()
                .zip(&p.position)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, _)) => {
                taken[i] = true;
                rec.k = previous[i].k;
            }
            None => {
                rec.k = *next_id;
                *next_id += 1;
            }
        }
    }
}

impl NodeClass {
    pub fn from_rate(rate: f64) -> Self {
        if rate.abs() < super::frame::DEGENERATE_RATE {
            NodeClass::Degenerate
        } else if rate < 0.0 {
            NodeClass::Attractor
        } else {
            NodeClass::Repellor
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::{ModelSpec, QubitSpec, SuperpositionSpec, SystemASpec};

    #[test]
    fn system_a_node_residual() {
        let m = ModelSpec::SystemA(SystemASpec::default())
            .build::<f64>()
            .unwrap();
        let set = nodal_points(&m, 1.27, &NodeSearch::default()).unwrap();
        assert_eq!(set.nodes.len(), 1);
        let n = &set.nodes[0];
        assert!(m.psi(&n.position, &1.27).abs() < 1e-10);
        assert!(n.class.is_some());
    }

    #[test]
    fn qubit_nodes_at_infinity_at_start() {
        let m = ModelSpec::Qubit(QubitSpec::default())
            .build::<f64>()
            .unwrap();
        let set = nodal_points(&m, 0.0, &NodeSearch::default()).unwrap();
        assert!(set.nodes.is_empty());
        assert_eq!(set.at_infinity.len(), 10);
        assert!(set.at_infinity.iter().all(|k| k.rem_euclid(2) == 1));
    }

    #[test]
    fn generic_search_recovers_closed_form() {
        let spec = SystemASpec::default();
        let generic = ModelSpec::Superposition(spec.as_superposition())
            .build::<f64>()
            .unwrap();
        let closed = spec.build::<f64>().unwrap().node(&1.27).unwrap();
        let set = nodal_points(
            &generic,
            1.27,
            &NodeSearch {
                positions_only: true,
                ..NodeSearch::default()
            },
        )
        .unwrap();
        assert_eq!(set.nodes.len(), 1, "{:?}", set.nodes);
        let p = &set.nodes[0].position;
        assert!((p[0] - closed[0]).abs() < 1e-9 && (p[1] - closed[1]).abs() < 1e-9);
    }

    #[test]
    fn analytic_and_difference_velocities_agree() {
        let m = ModelSpec::SystemA(SystemASpec::default())
            .build::<f64>()
            .unwrap();
        let t = 2.25;
        let AnyModel::SystemA(a) = &m else {
            unreachable!()
        };
        let pos = a.node(&t).unwrap();
        let fd = nodal_velocity(&m, t, 0, &pos).unwrap();
        let an = analytic_nodal_velocity(&m, t).unwrap();
        for i in 0..2 {
            assert!((fd[i] - an[i]).abs() < 1e-6 * an[i].abs());
        }
    }

    #[test]
    fn static_node_has_zero_velocity() {
        // Ψ₁₀ + iΨ₀₁ of an isotropic oscillator: a vortex pinned at the origin
        let spec = SuperpositionSpec {
            oscillator: crate::wavefunctions::OscillatorSpec::unit_mass(&[1.0.into(), 1.0.into()]),
            terms: vec![
                crate::wavefunctions::Term::real(1.0, &[1, 0]),
                crate::wavefunctions::Term {
                    re: 0.0.into(),
                    im: 1.0.into(),
                    mode: vec![0, 1],
                },
            ],
            normalized: false,
        };
        let m = ModelSpec::Superposition(spec).build::<f64>().unwrap();
        let v = nodal_velocity(&m, 0.7, 0, &[0.01, -0.01]).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-9), "{v:?}");
    }
}
