use bohmsim::dynamics::{default_xi0, integrate_with_deviation, IntegratorConfig};
use bohmsim::npxpc::frame::{RING_DIRECTIONS, RING_RADIUS};
use bohmsim::npxpc::{
    approach_events, classify_nodal_point, find_x_point, hopf_scan_model, nodal_points, nodal_rate,
    trace_asymptotic_curves, trace_nodal_line_3d, AsymptoticBranch, AsymptoticConfig, BranchKind,
    FrozenFrame, LineConfig, NodeSearch, PlanarField, SaddleSearch,
};
use bohmsim::wavefunctions::{
    AnyModel, ModelSpec, QubitSpec, SuperpositionSpec, SystemASpec, WavefunctionModel,
};
use proptest::prelude::*;

fn system_a() -> AnyModel<f64> {
    ModelSpec::SystemA(SystemASpec::default()).build().unwrap()
}

fn frame_at(m: &AnyModel<f64>, t: f64) -> FrozenFrame<'_, AnyModel<f64>> {
    let set = nodal_points(m, t, &NodeSearch::default()).unwrap();
    let n = &set.nodes[0];
    let v = n.velocity.clone().unwrap();
    FrozenFrame::new(m, t, [n.position[0], n.position[1]], [v[0], v[1]])
}

/// Point at arc length `s` along a polyline.
fn at_arc(b: &AsymptoticBranch, s: f64) -> [f64; 2] {
    let mut acc = 0.0;
    for w in b.points.windows(2) {
        let d = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        if acc + d >= s {
            let f = (s - acc) / d;
            return [
                w[0][0] + f * (w[1][0] - w[0][0]),
                w[0][1] + f * (w[1][1] - w[0][1]),
            ];
        }
        acc += d;
    }
    *b.points.last().unwrap()
}

#[test]
fn x_point_is_stationary_and_stable_under_step_halving() {
    let m = system_a();
    let f = frame_at(&m, 1.27);
    let a = find_x_point(&f, &SaddleSearch::default()).unwrap();
    let b = find_x_point(
        &f,
        &SaddleSearch {
            jacobian_step: 5e-7,
            ..SaddleSearch::default()
        },
    )
    .unwrap();
    let v = f.eval(a.offset).unwrap();
    assert!(v[0].hypot(v[1]) < 1e-10);
    assert!(a.eigenvalues[0] > 0.0 && a.eigenvalues[1] < 0.0);
    assert!((a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]) < 1e-7);
}

#[test]
fn nodal_rate_is_stable_under_ring_halving() {
    let m = system_a();
    for t in [0.75, 1.0, 2.25, 3.0] {
        let f = frame_at(&m, t);
        let a = classify_nodal_point(&f, RING_RADIUS, RING_DIRECTIONS)
            .unwrap()
            .eigenvalues[0]
            .0;
        let b = classify_nodal_point(&f, RING_RADIUS / 2.0, RING_DIRECTIONS)
            .unwrap()
            .eigenvalues[0]
            .0;
        assert!((a - b).abs() < 0.1 * a.abs(), "t = {t}: {a} vs {b}");
    }
}

#[test]
fn branches_leave_along_eigenvectors_and_converge_in_delta() {
    let m = system_a();
    let f = frame_at(&m, 1.27);
    let x = find_x_point(&f, &SaddleSearch::default()).unwrap();
    let short = AsymptoticConfig {
        arc_length: 1.0,
        ..AsymptoticConfig::default()
    };
    let half = AsymptoticConfig {
        delta: short.delta / 2.0,
        ..short.clone()
    };
    let a = trace_asymptotic_curves(&f, &x, f.node, &short);
    let b = trace_asymptotic_curves(&f, &x, f.node, &half);
    assert_eq!(a.len(), 4);
    for (p, q) in a.iter().zip(&b) {
        let (u, w) = (at_arc(p, 0.5), at_arc(q, 0.5));
        assert!((u[0] - w[0]).hypot(u[1] - w[1]) < 1e-4, "{:?}", p.kind);

        let e = match p.kind {
            BranchKind::UnstablePlus | BranchKind::UnstableMinus => x.eigenvectors[0],
            _ => x.eigenvectors[1],
        };
        let d = f.eval(p.points[0]).unwrap();
        let sin = (d[0] * e[1] - d[1] * e[0]) / d[0].hypot(d[1]);
        assert!(sin.abs() < 1e-3, "{:?}: angle {}", p.kind, sin.asin());
    }
}

#[test]
fn one_branch_spirals_into_the_node() {
    let m = system_a();
    let f = frame_at(&m, 1.27);
    let x = find_x_point(&f, &SaddleSearch::default()).unwrap();
    let region = 0.5 * x.offset[0].hypot(x.offset[1]);
    let spirals: Vec<_> = trace_asymptotic_curves(&f, &x, f.node, &AsymptoticConfig::default())
        .into_iter()
        .filter(|b| b.spirals_into(region))
        .collect();
    assert_eq!(spirals.len(), 1);
    assert!(spirals[0].final_node_distance < 0.1);
}

#[test]
fn hopf_bracket_straddles_zero() {
    let m = system_a();
    let events = hopf_scan_model(&m, 0, None, 0.5, 3.0, 0.01);
    assert!(!events.is_empty());
    for e in &events {
        let before = nodal_rate(&m, 0, e.t - 1e-6, None).unwrap().0;
        let after = nodal_rate(&m, 0, e.t + 1e-6, None).unwrap().0;
        assert!(before * after <= 0.0, "{e:?}: {before} {after}");
    }
}

#[test]
fn chaotic_orbit_passes_close_to_the_node() {
    let m = system_a();
    let cfg = IntegratorConfig::default();
    let (path, _) =
        integrate_with_deviation(&m, &[1.41, 2.134], &default_xi0(2), &0.0, &500.0, &cfg).unwrap();
    let events = approach_events(&path, &m, 0.5);
    assert!(events.iter().any(|e| e.d_node_min < 0.1));

    let (path, _) =
        integrate_with_deviation(&m, &[0.75, 0.25], &default_xi0(2), &0.0, &500.0, &cfg).unwrap();
    assert!(approach_events(&path, &m, 0.1).len() <= 2);
}

#[test]
fn pear_nodal_line_is_the_static_straight_line() {
    let m = SuperpositionSpec::pear().build::<f64>().unwrap();
    let z0 = 1.0 / (2.0 * 3f64.sqrt()).sqrt();
    for t in [0.5, 1.0, 2.3] {
        let line = trace_nodal_line_3d(&m, t, [0.3, -0.2, 0.4], &LineConfig::default()).unwrap();
        assert!(line.points.len() > 100);
        for p in &line.points {
            let [x, y, z] = p.position;
            assert!(
                (z - z0).abs() < 1e-9 && (x + y).abs() < 1e-9,
                "{:?}",
                p.position
            );
            assert!(m.psi(&p.position, &t).abs() < 1e-9);
            for b in p.basis {
                let d = b[0] * p.tangent[0] + b[1] * p.tangent[1] + b[2] * p.tangent[2];
                assert!(d.abs() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn nodal_residuals_vanish(t in 0.05..20.0f64, c2 in 0.1..0.9f64, flip in any::<bool>()) {
        let c2 = if flip { -c2 } else { c2 };
        let models: [AnyModel<f64>; 2] = [system_a(), ModelSpec::Qubit(QubitSpec::with_c2(c2)).build().unwrap()];
        let search = NodeSearch { positions_only: true, ..NodeSearch::default() };
        for m in &models {
            let Ok(set) = nodal_points(m, t, &search) else { continue };
            for n in &set.nodes {
                prop_assert!(m.psi(&n.position, &t).abs() < 1e-10);
                if let AnyModel::Qubit(_) = m {
                    prop_assert_eq!(n.k.rem_euclid(2), if flip { 0 } else { 1 });
                }
            }
        }
    }
}
