//! Nodal point / X-point complex of system A at t = 1.27: the saddle in the
//! frame moving with the node and its four asymptotic curves.

use bohmsim::npxpc::{
    find_x_point, nodal_points, trace_asymptotic_curves, AsymptoticConfig, FrozenFrame, NodeSearch,
    SaddleSearch,
};
use bohmsim::wavefunctions::{AnyModel, ModelSpec, SystemASpec};

fn main() -> bohmsim::Result<()> {
    let m: AnyModel<f64> = ModelSpec::SystemA(SystemASpec::default()).build()?;
    let t = 1.27;
    let set = nodal_points(&m, t, &NodeSearch::default())?;
    let node = &set.nodes[0];
    let v = node.velocity.clone().expect("finite node");
    let lab = [node.position[0], node.position[1]];
    let frame = FrozenFrame::new(&m, t, lab, [v[0], v[1]]);
    let x = find_x_point(&frame, &SaddleSearch::default())?;
    println!("node    ({:+.5}, {:+.5}) {:?}", lab[0], lab[1], node.class);
    println!(
        "X-point ({:+.5}, {:+.5}), offset ({:+.5}, {:+.5}), eigenvalues {:+.3} {:+.3}",
        x.position[0], x.position[1], x.offset[0], x.offset[1], x.eigenvalues[0], x.eigenvalues[1]
    );
    let region = 0.5 * x.offset[0].hypot(x.offset[1]);
    for b in trace_asymptotic_curves(&frame, &x, lab, &AsymptoticConfig::default()) {
        println!(
            "  {:<10} {:?}: {:6.1} revolutions, ends {:.4} from node{}",
            b.kind.name(),
            b.termination,
            b.winding,
            b.final_node_distance,
            if b.spirals_into(region) {
                "  <- spirals in"
            } else {
                ""
            }
        );
    }
    Ok(())
}
