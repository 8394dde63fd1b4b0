//! Closed-form guidance laws against the generic ħ Im(∇Ψ/Ψ)/m, plus the
//! quantum potential at the same points.

use bohmsim::dynamics::generic_velocity;
use bohmsim::wavefunctions::{
    quantum_potential, AnyModel, ModelSpec, QubitSpec, SystemASpec, WavefunctionModel,
};

fn main() -> bohmsim::Result<()> {
    let models: [(&str, AnyModel<f64>); 2] = [
        (
            "system A",
            ModelSpec::SystemA(SystemASpec::default()).build()?,
        ),
        ("qubit", ModelSpec::Qubit(QubitSpec::default()).build()?),
    ];
    let points = [([0.3, -0.4], 0.7), ([1.5, 2.0], 3.1), ([-2.2, 0.9], 11.4)];
    for (name, m) in &models {
        println!("{name}");
        for (q, t) in points {
            let closed = m.closed_form_velocity(&q, &t).expect("closed form");
            let generic = generic_velocity(m, &q, &t)?;
            let gap = (closed[0] - generic[0]).hypot(closed[1] - generic[1]);
            let qp = quantum_potential(m, &q, &t)?;
            println!(
                "  q={q:?} t={t}: v = ({:+.6}, {:+.6})  |closed - generic| = {gap:.1e}  Q = {qp:+.4}",
                closed[0], closed[1]
            );
        }
    }
    Ok(())
}
