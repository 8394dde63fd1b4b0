//! Attractor/repellor switches of the system-A nodal point.

use bohmsim::npxpc::{hopf_scan_model, nodal_rate};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, SystemASpec};

fn main() -> bohmsim::Result<()> {
    let m: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build()?;
    for i in 0..=10 {
        let t = 0.5 + 0.25 * i as f64;
        match nodal_rate(&m, 0, t, None) {
            Some((rate, r)) => println!("t={t:4.2}  rate {rate:+.3e}  |node| {r:.3}"),
            None => println!("t={t:4.2}  node out of reach"),
        }
    }
    for e in hopf_scan_model(&m, 0, None, 0.5, 3.0, 0.01) {
        println!("t = {:.5}: {} -> {}", e.t, e.from, e.to);
    }
    Ok(())
}
