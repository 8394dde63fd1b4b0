//! Nodal points of system A over one interval and the qubit's nodal lattice
//! at one instant, with their frozen-frame character.

use bohmsim::npxpc::{nodal_points, NodeSearch};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, QubitSpec, SystemASpec};

fn main() -> bohmsim::Result<()> {
    let a: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build()?;
    let search = NodeSearch::default();
    println!("system A");
    for i in 1..=12 {
        let t = 0.25 * i as f64;
        match nodal_points(&a, t, &search) {
            Ok(set) => {
                for n in &set.nodes {
                    let class = n.class.map_or("?".to_string(), |c| c.to_string());
                    let rate = n.eigenvalues.map_or(f64::NAN, |e| e[0].0);
                    println!(
                        "  t={t:4.2}  node ({:+8.4}, {:+8.4})  {class:<10} rate {rate:+.3e}",
                        n.position[0], n.position[1]
                    );
                }
            }
            Err(e) => println!("  t={t:4.2}  {e}"),
        }
    }
    let q: AnyModel<f64> = ModelSpec::Qubit(QubitSpec::default()).build()?;
    let set = nodal_points(&q, 0.5, &search)?;
    println!("qubit at t = 0.5: {} nodes", set.nodes.len());
    for n in &set.nodes {
        println!(
            "  k={:+2}  ({:+8.4}, {:+8.4})",
            n.k, n.position[0], n.position[1]
        );
    }
    Ok(())
}
