//! The same ordered trajectory at hardware precision and at 50 digits.

use bohmsim::dynamics::{integrate_trajectory, IntegratorConfig};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, SystemASpec};
use bohmsim::{set_extended_digits, Ext, Real};

fn main() -> bohmsim::Result<()> {
    let spec = ModelSpec::SystemA(SystemASpec::default());
    let t_end = 100.0;
    let hw: AnyModel<f64> = spec.build()?;
    let a = integrate_trajectory(
        &hw,
        &[0.75, 0.25],
        &0.0,
        &t_end,
        &IntegratorConfig::default(),
    )?;

    set_extended_digits(50);
    let ext: AnyModel<Ext> = spec.build()?;
    let cfg = IntegratorConfig {
        rtol: 1e-20,
        atol: 1e-22,
        min_step: 1e-25,
        precision: Some(50),
        ..IntegratorConfig::default()
    };
    let q0 = [Ext::from_f64(0.75), Ext::from_f64(0.25)];
    let b = integrate_trajectory(&ext, &q0, &Ext::zero(), &Ext::from_f64(t_end), &cfg)?;

    let (pa, pb) = (a.last().unwrap(), b.last().unwrap());
    println!(
        "f64     q({t_end}) = ({}, {})",
        pa.q[0].to_sig_string(),
        pa.q[1].to_sig_string()
    );
    println!(
        "50-digit q({t_end}) = ({}, {})",
        pb.q[0].to_sig_string(),
        pb.q[1].to_sig_string()
    );
    let gap = (pa.q[0] - pb.q[0].to_f64()).hypot(pa.q[1] - pb.q[1].to_f64());
    println!("difference {gap:.2e}");
    Ok(())
}
