//! With ω₂/ω₁ rational every system-A trajectory is periodic with the
//! common period; an irrational ratio gives no return.

use bohmsim::dynamics::{commensurate_period, detect_period, IntegratorConfig};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, SystemASpec};
use bohmsim::Param;

fn main() -> bohmsim::Result<()> {
    let cfg = IntegratorConfig::default();
    let w2 = Param::Expr("3/2".into());
    let period: f64 = commensurate_period(&Param::Number(1.0), &w2)?;
    let m: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::with_omega2(w2)).build()?;
    for ic in [[0.75, 0.25], [-1.0, -1.0], [0.2, 1.3]] {
        let d = detect_period(&m, &ic, &0.0, &period, &cfg)?;
        println!("omega2 = 3/2, T = {period:.6}, IC {ic:?}: return distance {d:.2e}");
    }
    let m: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build()?;
    let d = detect_period(&m, &[0.75, 0.25], &0.0, &period, &cfg)?;
    println!("omega2 = 1/sqrt(2), same T: return distance {d:.2e}");
    Ok(())
}
