use bohmsim::classical::{
    classical_integrator, classical_lcn, classical_section, ClassicalFlow, DrivenOscillator,
    DrivenOscillatorSpec,
};
use bohmsim::dynamics::{
    classify_trajectory, drive, sample_times, LcnThresholds, NoHook, OdeSystem, OrderClass,
    Singular,
};
use proptest::prelude::*;

fn oscillator(eps: f64) -> DrivenOscillator {
    DrivenOscillatorSpec::with_epsilon(eps).build().unwrap()
}

/// The same flow run backwards from `t_end`.
struct Reversed {
    inner: ClassicalFlow,
    t_end: f64,
}

impl OdeSystem<f64> for Reversed {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, s: &f64, y: &[f64], dy: &mut [f64]) -> Result<(), Singular> {
        self.inner.rhs(&(self.t_end - s), y, dy)?;
        dy.iter_mut().for_each(|d| *d = -*d);
        Ok(())
    }
}

fn run<S: OdeSystem<f64>>(
    sys: &S,
    y0: [f64; 2],
    t_end: f64,
    mut obs: impl FnMut(f64, &[f64]),
) -> Vec<f64> {
    let cfg = classical_integrator();
    let times = sample_times(&0.0, &t_end, &0.5);
    drive(
        sys,
        cfg.step_control(),
        0.0,
        y0.to_vec(),
        &times,
        &mut NoHook,
        |_, t, y, _| {
            obs(*t, y);
            Ok(())
        },
    )
    .unwrap()
}

#[test]
fn free_oscillator_conserves_energy() {
    let o = oscillator(0.0);
    let e0 = o.energy(1.0, 1.0, 0.0);
    let mut worst = 0.0f64;
    run(&ClassicalFlow(o), [1.0, 1.0], 100.0, |t, y| {
        worst = worst.max((o.energy(y[0], y[1], t) - e0).abs());
    });
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn driven_flow_is_reversible() {
    let o = oscillator(3.0);
    let end = run(&ClassicalFlow(o), [1.0, 1.0], 50.0, |_, _| {});
    let back = run(
        &Reversed {
            inner: ClassicalFlow(o),
            t_end: 50.0,
        },
        [end[0], end[1]],
        50.0,
        |_, _| {},
    );
    assert!((back[0] - 1.0).hypot(back[1] - 1.0) < 1e-6, "{back:?}");
}

#[test]
fn driven_lcn_saturates_under_doubling() {
    let spec = DrivenOscillatorSpec::default();
    let cfg = classical_integrator();
    let a = classical_lcn(&spec, [1.0, 1.0], 1e4, &cfg).unwrap();
    let b = classical_lcn(&spec, [1.0, 1.0], 2e4, &cfg).unwrap();
    let (x, y) = (a.last().unwrap().1, b.last().unwrap().1);
    assert_eq!(
        classify_trajectory(&a, &LcnThresholds::default())
            .unwrap()
            .class,
        OrderClass::Chaotic
    );
    assert!((x - y).abs() / x < 0.3, "{x} {y}");
}

#[test]
fn free_section_is_a_rotation() {
    let spec = DrivenOscillatorSpec::with_epsilon(0.0);
    let sec = classical_section(&spec, [1.0, 1.0], 200, &classical_integrator()).unwrap();
    for p in &sec {
        assert!((p.x * p.x + p.xdot * p.xdot - 2.0).abs() < 1e-9);
    }
    let period = oscillator(0.0).period();
    assert!((sec[4].t - 5.0 * period).abs() < 1e-12);
}

#[test]
fn spec_rejects_nonpositive_width() {
    let spec = DrivenOscillatorSpec {
        sigma: 0.0.into(),
        ..DrivenOscillatorSpec::default()
    };
    assert!(spec.build().is_err());
}

proptest! {
    #[test]
    fn force_is_minus_potential_slope(x in -4.0..4.0f64, t in 0.0..50.0f64, eps in 0.0..5.0f64) {
        let o = oscillator(eps);
        let h = 1e-5;
        let v = |x: f64| x * x / 2.0 + o.perturbation(x, t);
        let fd = -(v(x + h) - v(x - h)) / (2.0 * h);
        prop_assert!((o.force(x, t) - fd).abs() < 1e-7 * (1.0 + fd.abs()));
        let gd = (o.force(x + h, t) - o.force(x - h, t)) / (2.0 * h);
        prop_assert!((o.force_gradient(x, t) - gd).abs() < 1e-7 * (1.0 + gd.abs()));
    }
}
