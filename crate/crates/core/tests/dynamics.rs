use bohmsim::dynamics::{
    classify_trajectory, commensurate_period, default_xi0, fd_jacobian, integrate_trajectory,
    lcn_series, velocity_and_jacobian, IntegratorConfig, LcnSeries, LcnThresholds, OrderClass,
};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, QubitSpec, SystemASpec};
use bohmsim::{set_extended_digits, Ext, Param, Real};
use proptest::prelude::*;

fn system_a() -> AnyModel<f64> {
    ModelSpec::SystemA(SystemASpec::default()).build().unwrap()
}

#[test]
fn fifty_digit_run_agrees_with_hardware_on_ordered_orbit() {
    let spec = ModelSpec::SystemA(SystemASpec::default());
    let a = integrate_trajectory(
        &system_a(),
        &[0.75, 0.25],
        &0.0,
        &100.0,
        &IntegratorConfig::default(),
    )
    .unwrap();
    set_extended_digits(50);
    let m: AnyModel<Ext> = spec.build().unwrap();
    let cfg = IntegratorConfig {
        rtol: 1e-20,
        atol: 1e-22,
        min_step: 1e-25,
        precision: Some(50),
        ..IntegratorConfig::default()
    };
    let q0 = [Ext::from_f64(0.75), Ext::from_f64(0.25)];
    let b = integrate_trajectory(&m, &q0, &Ext::zero(), &Ext::from_f64(100.0), &cfg).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.samples.iter().zip(&b.samples) {
        for k in 0..2 {
            assert!((x.q[k] - y.q[k].to_f64()).abs() < 1e-8, "t = {}", x.t);
        }
    }
}

#[test]
fn tighter_tolerance_converges() {
    let m = system_a();
    let base = IntegratorConfig::default();
    let end = |rtol: f64| {
        let cfg = IntegratorConfig {
            rtol,
            atol: rtol * 1e-2,
            ..base.clone()
        };
        integrate_trajectory(&m, &[0.75, 0.25], &0.0, &50.0, &cfg)
            .unwrap()
            .last()
            .unwrap()
            .q
            .clone()
    };
    let (a, b) = (end(1e-9), end(1e-12));
    assert!((a[0] - b[0]).hypot(a[1] - b[1]) < 1e-6);
}

#[test]
fn chaotic_lcn_saturates_under_doubling() {
    let m = system_a();
    let cfg = IntegratorConfig::default();
    let xi = default_xi0(2);
    let s = lcn_series(&m, &[-1.0, -1.0], &xi, &0.0, &4e3, &cfg).unwrap();
    let (a, b) = (s.mean(1e3, 2e3).unwrap(), s.mean(2e3, 4e3).unwrap());
    assert!(a > 0.005 && (a - b).abs() / a < 0.3, "{a} {b}");
}

#[test]
fn commensurate_period_of_three_halves() {
    let t: f64 = commensurate_period(&Param::Number(1.0), &Param::Expr("3/2".into())).unwrap();
    assert!((t - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!(
        commensurate_period::<f64>(&Param::Number(1.0), &Param::Expr("sqrt(2)/2".into())).is_err()
    );
}

#[test]
fn lcn_classification_is_insensitive_to_deviation_direction() {
    let m = system_a();
    let cfg = IntegratorConfig::default();
    for xi in [vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, -0.8]] {
        let s = lcn_series(&m, &[0.75, 0.25], &xi, &0.0, &2e3, &cfg).unwrap();
        let c = classify_trajectory(&s, &LcnThresholds::default()).unwrap();
        assert_eq!(c.class, OrderClass::Ordered, "{xi:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn analytic_jacobian_matches_difference(x in -3.0..3.0f64, y in -3.0..3.0f64, t in 0.0..10.0f64, c2 in 0.1..0.9f64) {
        for m in [system_a(), ModelSpec::Qubit(QubitSpec::with_c2(c2)).build().unwrap()] {
            let q = [x, y];
            let (Ok((_, j)), Ok(fd)) = (velocity_and_jacobian(&m, &q, &t), fd_jacobian(&m, &q, &t)) else {
                continue;
            };
            let scale = 1.0 + j.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if scale > 1e3 {
                continue;
            }
            for (a, b) in j.iter().zip(&fd) {
                prop_assert!((a - b).abs() < 1e-5 * scale, "{a} {b}");
            }
        }
    }

    #[test]
    fn power_laws_classify_by_exponent(p in 0.85..1.5f64, c in 0.01..10.0f64) {
        let s = LcnSeries::from_fn((1..=20_000).map(|k| k as f64 * 0.5), |t| c * t.powf(-p));
        let k = classify_trajectory(&s, &LcnThresholds::default()).unwrap();
        prop_assert_eq!(k.class, OrderClass::Ordered);
        prop_assert!((k.slope + p).abs() < 1e-6);
    }

    #[test]
    fn saturating_series_are_chaotic(level in 0.01..1.0f64, wobble in 0.0..0.3f64) {
        let s = LcnSeries::from_fn((1..=20_000).map(|k| k as f64 * 0.5), |t| level * (1.0 + wobble * (t / 7.0).sin()) + 1.0 / t);
        let k = classify_trajectory(&s, &LcnThresholds::default()).unwrap();
        prop_assert_eq!(k.class, OrderClass::Chaotic);
    }
}
