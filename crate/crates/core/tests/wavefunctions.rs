use bohmsim::wavefunctions::{
    coherent_state_1d, density, fd_gradient, gradient, AnyModel, ModelSpec, QubitSpec, SystemASpec,
    WavefunctionModel,
};
use bohmsim::Param;
use proptest::prelude::*;

fn qubit(c2: f64) -> AnyModel<f64> {
    ModelSpec::Qubit(QubitSpec::with_c2(c2)).build().unwrap()
}

#[test]
fn qubit_is_the_entangled_coherent_pair() {
    let spec = QubitSpec::with_c2(0.2);
    let m: AnyModel<f64> = ModelSpec::Qubit(spec).build().unwrap();
    let (c1, c2) = (0.96f64.sqrt(), 0.2);
    let wy = 3f64.sqrt();
    for (x, y, t) in [(0.4, -1.1, 0.3), (2.0, 0.5, 4.2), (-1.3, 1.7, 9.9)] {
        let r = |q: f64, w: f64| coherent_state_1d(&2.5, &0.0, &w, &1.0, &q, &t);
        let l = |q: f64, w: f64| coherent_state_1d(&-2.5, &0.0, &w, &1.0, &q, &t);
        let direct = (r(x, 1.0) * l(y, wy)).scale(&c1) + (l(x, 1.0) * r(y, wy)).scale(&c2);
        let psi = m.psi(&[x, y], &t);
        assert!(
            (psi.abs() - direct.abs()).abs() < 1e-12 * direct.abs().max(1e-300),
            "{x} {y} {t}"
        );
    }
}

proptest! {
    #[test]
    fn qubit_density_obeys_reverse_triangle(x in -5.0..5.0f64, y in -5.0..5.0f64, t in 0.0..30.0f64, c2 in 0.05..0.95f64) {
        let m = qubit(c2);
        let c1 = (1.0 - c2 * c2).sqrt();
        let wy = 3f64.sqrt();
        let r = |q: f64, w: f64| coherent_state_1d(&2.5, &0.0, &w, &1.0, &q, &t).abs();
        let l = |q: f64, w: f64| coherent_state_1d(&-2.5, &0.0, &w, &1.0, &q, &t).abs();
        let a = c1 * r(x, 1.0) * l(y, wy);
        let b = c2 * l(x, 1.0) * r(y, wy);
        let rho = density(&m, &[x, y], &t);
        let scale = (a + b).powi(2);
        prop_assert!(rho >= (a - b).powi(2) - 1e-12 * scale);
        prop_assert!(rho <= scale * (1.0 + 1e-12));
    }

    #[test]
    fn analytic_gradient_matches_difference(x in -3.0..3.0f64, y in -3.0..3.0f64, t in 0.0..10.0f64) {
        let m: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build().unwrap();
        let q = [x, y];
        let Ok(g) = gradient(&m, &q, &t) else { return Ok(()) };
        let fd = fd_gradient(&m, &q, &t);
        for (a, b) in g.iter().zip(&fd) {
            let s = 1.0 + m.psi(&q, &t).abs();
            prop_assert!((a.clone() - b.clone()).abs() < 1e-6 * s);
        }
    }

    #[test]
    fn system_a_is_real_at_zero_phase(x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let m: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build().unwrap();
        let p = m.psi(&[x, y], &0.0);
        prop_assert!(p.im.abs() < 1e-14 * (1.0 + p.re.abs()));
    }
}

#[test]
fn system_a_matches_its_oscillator_superposition() {
    let spec = SystemASpec::default();
    let a: AnyModel<f64> = ModelSpec::SystemA(spec.clone()).build().unwrap();
    let s = spec.as_superposition().build::<f64>().unwrap();
    for (x, y, t) in [(0.2, 0.3, 0.1), (-1.4, 2.2, 5.5), (3.0, -0.9, 12.0)] {
        let (p, q) = (a.psi(&[x, y], &t), s.psi(&[x, y], &t));
        assert!((p - q).abs() < 1e-12, "{x} {y} {t}");
    }
}

#[test]
fn config_rejects_unnormalised_qubit() {
    let spec = QubitSpec {
        c1: Param::Number(0.9),
        ..QubitSpec::default()
    };
    assert!(ModelSpec::Qubit(spec).validate().is_err());
}
