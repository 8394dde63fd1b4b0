use super::{
    BornArgs, ClassicalArgs, Command, EnsembleArgs, HopfArgs, LcnArgs, LineArgs, NodalArgs,
    Outputs, PoincareArgs, Run, RunConfig, SurfaceArgs, TrajArgs, XPointArgs,
};
use crate::analysis::{
    box_counting_dimension, ergodicity_test, fit_conic, run_ensemble, sample_born,
    stroboscopic_section, surface_residual, GridSpec, IntegralSurfaceSpec,
};
use crate::classical::{classical_integrator, classical_lcn, classical_section, write_section_csv};
use crate::dynamics::{
    classify_trajectory, commensurate_period, default_xi0, integrate_trajectory,
    integrate_with_deviation, lcn_series, sample_times, BohmFlow, Classification, IntegratorConfig,
};
use crate::error::{Error, Result};
use crate::npxpc::{
    find_x_point, hopf_scan_model, match_ids, nodal_points, node_positions,
    trace_asymptotic_curves, trace_nodal_line_3d, track_x_points, write_branches_csv,
    write_line_csv, write_nodal_csv, write_x_point_csv, FrozenFrame, NodalRecord, SaddleSearch,
};
use crate::param::Param;
use crate::scalar::{from_f64_vec, Real};
use crate::wavefunctions::{AnyModel, ModelSpec, SuperpositionSpec, WavefunctionModel};
use serde_json::json;
use std::f64::consts::PI;
use std::io::Write;

/// Folds subcommand flags into the config so the manifest records them.
pub(super) fn merge(cmd: &Command, cfg: &mut RunConfig, seed: u64, full_scale: bool) -> Result<()> {
    cfg.ensemble.seed = seed;
    match cmd {
        Command::Traj(TrajArgs { dt: Some(dt), .. })
        | Command::Lcn(LcnArgs { dt: Some(dt), .. }) => {
            cfg.integrator.sample_dt = *dt;
        }
        Command::Ensemble(a) => {
            let e = &mut cfg.ensemble;
            if let Some(n) = a.n {
                e.n = n;
            }
            if let Some(t) = a.t_end {
                e.t_max = t;
            }
            if let Some(dt) = a.dt {
                e.dt = dt;
            }
            if let Some(g) = a.grid {
                e.grid.nx = g;
                e.grid.ny = g;
            }
            if full_scale {
                e.grid = GridSpec {
                    bounds: e.grid.bounds,
                    ..GridSpec::default()
                };
                cfg.ergodicity.t_long = 2.5e5;
            }
            e.final_only |= a.final_only;
            e.lcn &= !a.no_lcn;
            if let Some(ic) = &a.ic {
                cfg.ergodicity.ic = ic.planar()?;
            }
            cfg.ergodicity.ensemble = e.clone();
        }
        _ => {}
    }
    cfg.validate()
}

pub(super) fn dispatch(run: &Run, out: &mut Outputs) -> Result<()> {
    if run.precision.is_some() && !matches!(run.command, Command::Traj(_) | Command::Lcn(_)) {
        return Err(Error::Unsupported(format!(
            "--precision applies to traj and lcn, not {}",
            run.command.name()
        )));
    }
    match &run.command {
        Command::Traj(a) => with_precision(run.precision, |p| match p {
            Precision::Hardware => traj::<f64>(run, a, out),
            #[cfg(feature = "extended")]
            Precision::Extended => traj::<crate::scalar::Ext>(run, a, out),
        }),
        Command::Lcn(a) => with_precision(run.precision, |p| match p {
            Precision::Hardware => lcn::<f64>(run, a, out),
            #[cfg(feature = "extended")]
            Precision::Extended => lcn::<crate::scalar::Ext>(run, a, out),
        }),
        Command::Nodal(a) => nodal(run, a, out),
        Command::Xpoint(a) => xpoint(run, a, out),
        Command::Hopf(a) => hopf(run, a, out),
        Command::Ensemble(a) => ensemble(run, a, out),
        Command::BornSample(a) => born(run, a, out),
        Command::Poincare(a) => poincare(run, a, out),
        Command::Surface(a) => surface(run, a, out),
        Command::Classical(a) => classical(run, a, out),
        Command::NodalLine3d(a) => nodal_line(run, a, out),
    }
}

enum Precision {
    Hardware,
    #[cfg(feature = "extended")]
    Extended,
}

fn with_precision<F: FnOnce(Precision) -> Result<()>>(digits: Option<u32>, f: F) -> Result<()> {
    match digits {
        None => f(Precision::Hardware),
        Some(d) if d < 16 => Err(Error::Config(format!(
            "--precision {d} is below hardware precision; omit the flag instead"
        ))),
        #[cfg(feature = "extended")]
        Some(d) => {
            crate::scalar::set_extended_digits(d);
            f(Precision::Extended)
        }
        #[cfg(not(feature = "extended"))]
        Some(_) => Err(Error::Unsupported(
            "built without the \"extended\" feature".into(),
        )),
    }
}

fn model_f64(run: &Run) -> Result<AnyModel<f64>> {
    let spec = run.config.model()?;
    spec.validate()?;
    spec.build()
}

fn check_dim(spec: &ModelSpec, q: &[f64]) -> Result<()> {
    if q.len() != spec.dim() {
        return Err(Error::Config(format!(
            "initial condition has {} coordinates but the model is {}-dimensional",
            q.len(),
            spec.dim()
        )));
    }
    Ok(())
}

fn traj<R: Real>(run: &Run, a: &TrajArgs, out: &mut Outputs) -> Result<()> {
    let spec = run.config.model()?;
    check_dim(spec, &a.ic.0)?;
    let model: AnyModel<R> = spec.build()?;
    let q0: Vec<R> = from_f64_vec(&a.ic.0);
    let (t0, t1) = (R::from_f64(a.t0), R::from_f64(a.t_end));
    let cfg = &run.config.integrator;
    let path = if a.lcn {
        integrate_with_deviation(&model, &q0, &default_xi0(q0.len()), &t0, &t1, cfg)?.0
    } else {
        integrate_trajectory(&model, &q0, &t0, &t1, cfg)?
    };
    out.write("traj.csv", |w| path.write_csv(w))
}

fn lcn<R: Real>(run: &Run, a: &LcnArgs, out: &mut Outputs) -> Result<()> {
    let spec = run.config.model()?;
    check_dim(spec, &a.ic.0)?;
    let model: AnyModel<R> = spec.build()?;
    let q0: Vec<R> = from_f64_vec(&a.ic.0);
    let series = lcn_series(
        &model,
        &q0,
        &default_xi0(q0.len()),
        &R::zero(),
        &R::from_f64(a.t_end),
        &run.config.integrator,
    )?;
    let class = classify_trajectory(&series, &run.config.lcn);
    out.write("lcn.csv", |w| series.write_csv(w))?;
    out.write_json(
        "lcn.json",
        &classification_report(&a.ic.0, a.t_end, series.last(), &class),
    )
}

fn classification_report(
    ic: &[f64],
    t_end: f64,
    last: Option<(f64, f64)>,
    class: &Result<Classification>,
) -> serde_json::Value {
    json!({
        "ic": ic,
        "t_end": t_end,
        "chi_final": last.map(|p| p.1),
        "classification": class.as_ref().ok(),
        "classification_error": class.as_ref().err().map(|e| e.to_string()),
    })
}

fn nodal(run: &Run, a: &NodalArgs, out: &mut Outputs) -> Result<()> {
    let model = model_f64(run)?;
    let generic = matches!(model, AnyModel::Superposition(_));
    let mut records: Vec<NodalRecord> = Vec::new();
    let mut prev: Vec<NodalRecord> = Vec::new();
    let mut next_id = 0;
    let mut at_infinity = Vec::new();
    let times = std::iter::once(a.t0).chain(sample_times(&a.t0, &a.t_end, &a.dt));
    for t in times {
        let mut set = match nodal_points(&model, t, &run.config.nodes) {
            Ok(s) => s,
            Err(Error::NodeAtInfinity { t }) => {
                at_infinity.push(t);
                continue;
            }
            Err(e) => return Err(e),
        };
        if generic {
            if prev.is_empty() {
                next_id = set.nodes.len() as i64;
            } else {
                match_ids(&prev, &mut set.nodes, &mut next_id);
            }
            prev = set.nodes.clone();
        }
        records.extend(set.nodes);
    }
    out.write("nodal.csv", |w| write_nodal_csv(&records, w))?;
    out.write_json(
        "nodal.json",
        &json!({ "records": records.len(), "times_at_infinity": at_infinity }),
    )
}

fn first_node(
    model: &AnyModel<f64>,
    t: f64,
    wanted: Option<i64>,
    run: &Run,
) -> Result<NodalRecord> {
    let set = nodal_points(model, t, &run.config.nodes)?;
    let found = match wanted {
        Some(k) => set.nodes.into_iter().find(|n| n.k == k),
        None => set.nodes.into_iter().next(),
    };
    found.ok_or_else(|| match wanted {
        Some(k) => Error::Config(format!("no nodal point with id {k} at t = {t}")),
        None => Error::NodeAtInfinity { t },
    })
}

fn xpoint(run: &Run, a: &XPointArgs, out: &mut Outputs) -> Result<()> {
    let model = model_f64(run)?;
    let node = first_node(&model, a.t, a.node, run)?;
    if let Some(t_end) = a.t_end {
        let mut times = vec![a.t];
        times.extend(sample_times(&a.t, &t_end, &a.dt));
        let track: Vec<_> = track_x_points(&model, node.k, &times)
            .into_iter()
            .map(|x| (node.k, x))
            .collect();
        return out.write("xpoint.csv", |w| write_x_point_csv(&track, w));
    }
    let v = node
        .velocity
        .clone()
        .ok_or(Error::NodeAtInfinity { t: a.t })?;
    let lab = [node.position[0], node.position[1]];
    let frame = FrozenFrame::new(&model, a.t, lab, [v[0], v[1]]);
    let x = find_x_point(&frame, &SaddleSearch::default())?;
    let branches = trace_asymptotic_curves(&frame, &x, lab, &run.config.asymptotic);
    let region = 0.5 * x.offset[0].hypot(x.offset[1]);
    let summary: Vec<_> = branches
        .iter()
        .map(|b| {
            json!({
                "branch": b.kind.name(),
                "termination": b.termination,
                "arc_length": b.arc_length,
                "winding": b.winding,
                "min_node_distance": b.min_node_distance,
                "final_node_distance": b.final_node_distance,
                "spirals_into_node": b.spirals_into(region),
            })
        })
        .collect();
    out.write("xpoint.csv", |w| {
        write_x_point_csv(&[(node.k, x.clone())], w)
    })?;
    out.write("branches.csv", |w| write_branches_csv(&branches, w))?;
    out.write_json(
        "xpoint.json",
        &json!({ "node": node, "x_point": x, "node_region_radius": region, "branches": summary }),
    )
}

fn hopf(run: &Run, a: &HopfArgs, out: &mut Outputs) -> Result<()> {
    let model = model_f64(run)?;
    let (finite, _) = node_positions(&model, a.t0, &run.config.nodes)?;
    let (k, pos) = match a.node {
        Some(k) => finite.into_iter().find(|n| n.0 == k),
        None => finite.into_iter().next(),
    }
    .ok_or_else(|| Error::Config(format!("no matching nodal point at t = {}", a.t0)))?;
    let hint = matches!(model, AnyModel::Superposition(_)).then(|| [pos[0], pos[1]]);
    let events = hopf_scan_model(&model, k, hint, a.t0, a.t_end, a.step);
    out.write("hopf.csv", |w| {
        writeln!(w, "t,from,to,rate_before,rate_after")?;
        for e in &events {
            writeln!(
                w,
                "{:.16e},{},{},{:.16e},{:.16e}",
                e.t, e.from, e.to, e.rate_before, e.rate_after
            )?;
        }
        Ok(())
    })?;
    out.write_json("hopf.json", &json!({ "node": k, "events": events }))
}

fn ensemble(run: &Run, a: &EnsembleArgs, out: &mut Outputs) -> Result<()> {
    let model = model_f64(run)?;
    let cfg = &run.config;
    if a.ergodicity {
        let report = ergodicity_test(&model, &cfg.ergodicity, &cfg.integrator, run.workers)?;
        if let Some(h) = &report.ensemble {
            out.write("histogram.csv", |w| h.write_csv(w))?;
        }
        if let Some(h) = &report.single {
            out.write("single.csv", |w| h.write_csv(w))?;
        }
        return out.write_json("ergodicity.json", &report);
    }
    let res = run_ensemble(&model, &cfg.ensemble, &cfg.integrator, run.workers)?;
    out.write("histogram.csv", |w| res.histogram.write_csv(w))?;
    out.write_json(
        "ensemble.json",
        &json!({
            "classes": res.class_counts(),
            "failed": res.failed,
            "trajectories": res.summaries,
        }),
    )
}

fn born(run: &Run, a: &BornArgs, out: &mut Outputs) -> Result<()> {
    let model = model_f64(run)?;
    let pts = sample_born(&model, a.t0, a.n, run.seed, run.config.ensemble.grid.bounds)?;
    out.write("samples.csv", |w| {
        writeln!(w, "x,y")?;
        for [x, y] in &pts {
            writeln!(w, "{x:.16e},{y:.16e}")?;
        }
        Ok(())
    })
}

fn default_period(spec: &ModelSpec) -> f64 {
    let one = Param::Number(1.0);
    let (w1, w2) = match spec {
        ModelSpec::SystemA(s) => (&one, &s.omega2),
        ModelSpec::Qubit(s) => (&s.omega_x, &s.omega_y),
        ModelSpec::Superposition(s) => {
            let f = &s.oscillator.frequencies;
            (&f[0], f.get(1).unwrap_or(&f[0]))
        }
    };
    commensurate_period::<f64>(w1, w2).unwrap_or_else(|_| 2.0 * PI / w1.value().unwrap_or(1.0))
}

fn poincare(run: &Run, a: &PoincareArgs, out: &mut Outputs) -> Result<()> {
    let spec = run.config.model()?;
    check_dim(spec, &a.ic.0)?;
    let model = model_f64(run)?;
    let period = a.period.unwrap_or_else(|| default_period(spec));
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Config(format!(
            "strobe period {period} must be positive"
        )));
    }
    let flow = BohmFlow { model: &model };
    let pts = stroboscopic_section(
        &flow,
        &a.ic.0,
        0.0,
        period,
        a.count,
        run.config.integrator.step_control(),
    )?;
    let names = ["x", "y", "z"];
    out.write("section.csv", |w| {
        writeln!(w, "k,t,{}", names[..pts[0].len()].join(","))?;
        for (i, p) in pts.iter().enumerate() {
            write!(w, "{},{:.16e}", i + 1, period * (i + 1) as f64)?;
            for x in p {
                write!(w, ",{x:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;
    let planar: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    out.write_json(
        "poincare.json",
        &json!({
            "period": period,
            "count": a.count,
            "box_dimension": (model.dim() == 2).then(|| box_counting_dimension(&planar, 2..=6)).flatten(),
        }),
    )
}

fn infer_surface(spec: &ModelSpec) -> Option<IntegralSurfaceSpec> {
    let ModelSpec::Superposition(s) = spec else {
        return None;
    };
    let omega3 = s.oscillator.frequencies.get(2)?.clone();
    let same_terms = |r: SuperpositionSpec| r.terms == s.terms;
    if same_terms(SuperpositionSpec::pear()) {
        Some(IntegralSurfaceSpec::Pear { omega3 })
    } else if same_terms(SuperpositionSpec::open_surface()) {
        Some(IntegralSurfaceSpec::Open { omega3 })
    } else if same_terms(SuperpositionSpec::complete_integrable()) {
        Some(IntegralSurfaceSpec::CirclePair)
    } else {
        None
    }
}

fn surface(run: &Run, a: &SurfaceArgs, out: &mut Outputs) -> Result<()> {
    let spec = run.config.model()?;
    check_dim(spec, &a.ic.0)?;
    let kind = match &run.config.surface {
        Some(s) => s.clone(),
        None => infer_surface(spec).ok_or_else(|| {
            Error::Config(
                "set \"surface\" in the config; no conserved quantity is known for this model"
                    .into(),
            )
        })?,
    };
    let model = model_f64(run)?;
    let path = integrate_trajectory(&model, &a.ic.0, &0.0, &a.t_end, &run.config.integrator)?;
    let residual = surface_residual(&path, &kind)?;
    let first = kind.invariants(&a.ic.0, 0.0)?;
    let last = path
        .last()
        .map(|s| kind.invariants(&s.q, s.t))
        .transpose()?;
    out.write("traj.csv", |w| path.write_csv(w))?;
    out.write_json(
        "surface.json",
        &json!({ "surface": kind, "relative_drift": residual, "initial": first, "final": last }),
    )
}

fn classical(run: &Run, a: &ClassicalArgs, out: &mut Outputs) -> Result<()> {
    let ic = a.ic.planar()?;
    let cfg: IntegratorConfig = run
        .config
        .classical_integrator
        .clone()
        .unwrap_or_else(classical_integrator);
    let spec = &run.config.classical;
    let series = classical_lcn(spec, ic, a.t_end, &cfg)?;
    let class = classify_trajectory(&series, &run.config.lcn);
    let section = classical_section(spec, ic, a.sections, &cfg)?;
    let pts: Vec<[f64; 2]> = section.iter().map(|p| [p.x, p.xdot]).collect();
    out.write("classical_lcn.csv", |w| series.write_csv(w))?;
    out.write("classical_section.csv", |w| write_section_csv(&section, w))?;
    let mut report = classification_report(&ic, a.t_end, series.last(), &class);
    report["section_box_dimension"] = json!(box_counting_dimension(&pts, 2..=6));
    report["section_conic"] = json!(fit_conic(&pts).map(|c| json!({
        "coefficients": c.coefficients,
        "max_distance": c.max_distance,
        "is_ellipse": c.is_ellipse,
    })));
    out.write_json("classical.json", &report)
}

fn nodal_line(run: &Run, a: &LineArgs, out: &mut Outputs) -> Result<()> {
    let model = model_f64(run)?;
    let mut cfg = run.config.line.clone();
    cfg.x_line |= a.x_line;
    let line = trace_nodal_line_3d(&model, a.t, a.start.spatial()?, &cfg)?;
    out.write("line.csv", |w| write_line_csv(&line, w))?;
    out.write_json(
        "line.json",
        &json!({ "t": line.t, "points": line.points.len(), "end": line.end }),
    )
}
