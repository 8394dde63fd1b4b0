//! Nodal points, X-points and their neighbourhood.

pub mod approach;
pub mod asymptotic;
pub mod frame;
pub mod hopf;
pub mod line3d;
pub mod nodes;

pub use frame::{
    classify_nodal_point, eigen2, field_jacobian, find_saddle, find_x_point, Eigen2, FrozenFrame,
    NodeClassification, Saddle, SaddleSearch, DEGENERATE_RATE, RING_DIRECTIONS, RING_RADIUS,
};
pub use hopf::{hopf_scan, hopf_scan_model, nodal_rate, HopfEvent};
pub use line3d::{
    f_plane_basis, trace_nodal_line_3d, write_line_csv, FPlaneXPoint, LineConfig, LineEnd,
    LinePoint, NodalLine,
};
pub use nodes::{
    analytic_nodal_velocity, fill_dynamics, match_ids, newton_node_2d, nodal_points,
    nodal_velocity, node_positions, NodeSearch, NODE_VELOCITY_STEP,
};

pub use approach::{approach_events, mean_chi_jump, ApproachEvent, DEFAULT_APPROACH_DISTANCE};
pub use asymptotic::{
    trace_asymptotic_curves, write_branches_csv, AsymptoticBranch, AsymptoticConfig, BranchKind,
    Termination,
};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeClass {
    Attractor,
    Repellor,
    Degenerate,
}

impl std::fmt::Display for NodeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NodeClass::Attractor => "attractor",
            NodeClass::Repellor => "repellor",
            NodeClass::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalRecord {
    pub t: f64,
    /// branch index (qubit) or tracked id
    pub k: i64,
    pub position: Vec<f64>,
    pub velocity: Option<Vec<f64>>,
    pub eigenvalues: Option<[(f64, f64); 2]>,
    pub class: Option<NodeClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalSet {
    pub t: f64,
    pub nodes: Vec<NodalRecord>,
    /// branches whose node is at infinity at this instant
    pub at_infinity: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XPointRecord {
    pub t: f64,
    /// relative to the nodal point
    pub offset: [f64; 2],
    /// lab coordinates
    pub position: [f64; 2],
    /// λ₊ > 0 > λ₋
    pub eigenvalues: [f64; 2],
    /// unstable, stable
    pub eigenvectors: [[f64; 2]; 2],
    pub residual: f64,
}

/// A vector field on the plane, undefined where it returns None.
pub trait PlanarField {
    fn eval(&self, p: [f64; 2]) -> Option<[f64; 2]>;
}

impl<F: Fn([f64; 2]) -> Option<[f64; 2]>> PlanarField for F {
    fn eval(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        self(p)
    }
}

/// Node track CSV: `t,k,x,y[,z],class,lambda_re1,lambda_im1,lambda_re2,lambda_im2`.
pub fn write_nodal_csv<W: std::io::Write>(
    records: &[NodalRecord],
    mut w: W,
) -> std::io::Result<()> {
    let d = records.first().map_or(2, |r| r.position.len());
    write!(w, "t,k,x,y")?;
    if d == 3 {
        write!(w, ",z")?;
    }
    writeln!(w, ",class,lambda_re1,lambda_im1,lambda_re2,lambda_im2")?;
    for r in records {
        write!(w, "{:.16e},{}", r.t, r.k)?;
        for p in &r.position {
            write!(w, ",{p:.16e}")?;
        }
        let class = r.class.map_or(String::new(), |c| c.to_string());
        match r.eigenvalues {
            Some([(a, b), (c, e)]) => writeln!(w, ",{class},{a:.16e},{b:.16e},{c:.16e},{e:.16e}")?,
            None => writeln!(w, ",{class},,,,")?,
        }
    }
    Ok(())
}

/// X-point track CSV; the eigenvalues are real.
pub fn write_x_point_csv<W: std::io::Write>(
    records: &[(i64, XPointRecord)],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(
        w,
        "t,k,x,y,class,lambda_re1,lambda_im1,lambda_re2,lambda_im2,u,v"
    )?;
    for (k, x) in records {
        writeln!(
            w,
            "{:.16e},{k},{:.16e},{:.16e},saddle,{:.16e},0,{:.16e},0,{:.16e},{:.16e}",
            x.t,
            x.position[0],
            x.position[1],
            x.eigenvalues[0],
            x.eigenvalues[1],
            x.offset[0],
            x.offset[1]
        )?;
    }
    Ok(())
}

/// X-point of node `k` at each time, following the previous offset.
pub fn track_x_points(
    model: &crate::wavefunctions::AnyModel<f64>,
    k: i64,
    times: &[f64],
) -> Vec<XPointRecord> {
    let search = NodeSearch::default();
    let mut out: Vec<XPointRecord> = Vec::new();
    let mut prev_nodes: Vec<NodalRecord> = Vec::new();
    let mut next_id = 0;
    for &t in times {
        let Ok(mut set) = nodal_points(model, t, &search) else {
            continue;
        };
        if matches!(model, crate::wavefunctions::AnyModel::Superposition(_)) {
            if prev_nodes.is_empty() {
                next_id = set.nodes.len() as i64;
            } else {
                match_ids(&prev_nodes, &mut set.nodes, &mut next_id);
            }
            prev_nodes = set.nodes.clone();
        }
        let Some(n) = set.nodes.iter().find(|n| n.k == k) else {
            continue;
        };
        let Some(v) = &n.velocity else { continue };
        let frame = FrozenFrame::new(model, t, [n.position[0], n.position[1]], [v[0], v[1]]);
        let ss = SaddleSearch {
            prefer: out.last().map(|x| x.offset),
            ..SaddleSearch::default()
        };
        if let Ok(x) = find_x_point(&frame, &ss) {
            out.push(x);
        }
    }
    out
}
