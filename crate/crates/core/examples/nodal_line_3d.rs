//! Nodal lines of 3-D superpositions: the pear model's straight static line
//! and the curved line of the open-surface model with its X-line.

use bohmsim::npxpc::{trace_nodal_line_3d, LineConfig};
use bohmsim::wavefunctions::SuperpositionSpec;

fn main() -> bohmsim::Result<()> {
    let cfg = LineConfig {
        x_line: true,
        arc_length: 4.0,
        ..LineConfig::default()
    };
    for (name, spec, seed) in [
        ("pear", SuperpositionSpec::pear(), [0.3, -0.2, 0.4]),
        ("open", SuperpositionSpec::open_surface(), [0.3, -0.2, 0.4]),
    ] {
        let m = spec.build::<f64>()?;
        match trace_nodal_line_3d(&m, 1.0, seed, &cfg) {
            Ok(line) => {
                let with_x = line.points.iter().filter(|p| p.x_point.is_some()).count();
                println!(
                    "{name}: {} points, end {:?}, X-point found in {with_x} planes",
                    line.points.len(),
                    line.end
                );
                for p in line.points.iter().step_by(100) {
                    let [x, y, z] = p.position;
                    println!(
                        "  s={:5.2}  ({x:+.4}, {y:+.4}, {z:+.4})  |Psi| {:.1e}",
                        p.s, p.residual
                    );
                }
            }
            Err(e) => println!("{name}: {e}"),
        }
    }
    Ok(())
}
