//! Command-line front end: JSON config, subcommands and run manifests.
//!
//! Every run writes `manifest.json` next to its outputs. Re-running with
//! `--replay manifest.json` repeats the run from the recorded command,
//! config and seed and checks the new files against the recorded hashes.

mod commands;

use crate::analysis::{EnsembleSpec, ErgodicityConfig, IntegralSurfaceSpec};
use crate::classical::DrivenOscillatorSpec;
use crate::dynamics::{IntegratorConfig, LcnThresholds};
use crate::error::{Error, Result};
use crate::npxpc::{AsymptoticConfig, LineConfig, NodeSearch};
use crate::wavefunctions::ModelSpec;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

pub const MANIFEST_FILE: &str = "manifest.json";

/// One model plus the settings of every experiment kind.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelSpec>,
    pub integrator: IntegratorConfig,
    pub lcn: LcnThresholds,
    pub nodes: NodeSearch,
    pub asymptotic: AsymptoticConfig,
    pub line: LineConfig,
    pub ensemble: EnsembleSpec,
    pub ergodicity: ErgodicityConfig,
    pub surface: Option<IntegralSurfaceSpec>,
    pub classical: DrivenOscillatorSpec,
    /// tolerances for `classical`; tighter than `integrator` by default
    pub classical_integrator: Option<IntegratorConfig>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(m) = &self.model {
            m.validate()?;
        }
        self.integrator.validate()?;
        if let Some(c) = &self.classical_integrator {
            c.validate()?;
        }
        if let Some(s) = &self.surface {
            s.validate()?;
        }
        self.classical.validate()
    }

    pub fn model(&self) -> Result<&ModelSpec> {
        self.model.as_ref().ok_or_else(|| {
            Error::Config("this subcommand needs a \"model\" entry in the --config file".into())
        })
    }
}

/// Comma-separated coordinates, e.g. `-1,-1` or `1,0.7,1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl FromStr for Point {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let v: std::result::Result<Vec<f64>, _> =
            s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        match v {
            Ok(v) if (1..=3).contains(&v.len()) && v.iter().all(|x| x.is_finite()) => Ok(Point(v)),
            _ => Err(format!(
                "expected 1 to 3 comma-separated numbers, got {s:?}"
            )),
        }
    }
}

impl Point {
    pub fn planar(&self) -> Result<[f64; 2]> {
        match self.0[..] {
            [x, y] => Ok([x, y]),
            _ => Err(Error::Config(format!(
                "expected a 2-D point, got {} coordinates",
                self.0.len()
            ))),
        }
    }
    pub fn spatial(&self) -> Result<[f64; 3]> {
        match self.0[..] {
            [x, y, z] => Ok([x, y, z]),
            _ => Err(Error::Config(format!(
                "expected a 3-D point, got {} coordinates",
                self.0.len()
            ))),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "bohmsim",
    version,
    about = "Bohmian trajectories, nodal-point geometry and chaos diagnostics"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// master random seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// worker threads (outputs do not depend on it)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// decimal digits for extended-precision runs
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// output directory
    #[arg(long, global = true, env = "BOHMSIM_OUT")]
    pub out: Option<PathBuf>,
    /// long single-trajectory horizon and fine grid for ergodicity runs
    #[arg(long, global = true)]
    pub full_scale: bool,
    /// repeat the run recorded in a manifest
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// single trajectory, optionally with χ(t)
    Traj(TrajArgs),
    /// finite-time Lyapunov number and order/chaos class
    Lcn(LcnArgs),
    /// nodal-point tracks with frozen-frame eigenvalues
    Nodal(NodalArgs),
    /// X-point and asymptotic curves in the frame of a nodal point
    Xpoint(XPointArgs),
    /// attractor/repellor transitions of a nodal point
    Hopf(HopfArgs),
    /// Born or uniform ensemble histogram, optionally an ergodicity test
    Ensemble(EnsembleArgs),
    /// draws from |Ψ(t0)|²
    BornSample(BornArgs),
    /// stroboscopic section of the Bohmian flow
    Poincare(PoincareArgs),
    /// drift of conserved quantities along a 3-D trajectory
    Surface(SurfaceArgs),
    /// driven classical oscillator: χ(t) and stroboscopic section
    Classical(ClassicalArgs),
    /// continuation of a nodal line of a 3-D model
    #[command(name = "nodal-line-3d")]
    #[serde(rename = "nodal-line-3d")]
    NodalLine3d(LineArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Traj(_) => "traj",
            Command::Lcn(_) => "lcn",
            Command::Nodal(_) => "nodal",
            Command::Xpoint(_) => "xpoint",
            Command::Hopf(_) => "hopf",
            Command::Ensemble(_) => "ensemble",
            Command::BornSample(_) => "born-sample",
            Command::Poincare(_) => "poincare",
            Command::Surface(_) => "surface",
            Command::Classical(_) => "classical",
            Command::NodalLine3d(_) => "nodal-line-3d",
        }
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Point,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    /// sample interval (overrides integrator.sample_dt)
    #[arg(long)]
    pub dt: Option<f64>,
    /// co-integrate the deviation vector and write a chi column
    #[arg(long)]
    pub lcn: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcnArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Point,
    #[arg(long, default_value_t = 1e4)]
    pub t_end: f64,
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XPointArgs {
    #[arg(long, default_value_t = 1.27, allow_hyphen_values = true)]
    pub t: f64,
    /// node id; the first node at `t` when omitted
    #[arg(long, allow_hyphen_values = true)]
    pub node: Option<i64>,
    /// track the X-point from `t` to this time instead of one slice
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub node: Option<i64>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 3.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// cells per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// histogram only the final positions
    #[arg(long)]
    pub final_only: bool,
    /// skip the per-trajectory LCN classification
    #[arg(long)]
    pub no_lcn: bool,
    /// compare a long single trajectory with the ensemble
    #[arg(long)]
    pub ergodicity: bool,
    /// IC of the long trajectory (ergodicity.ic)
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Option<Point>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BornArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Point,
    /// strobe interval; the common period for rational frequency ratios,
    /// 2π/ω₁ otherwise
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Point,
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalArgs {
    #[arg(long, default_value = "1,1", allow_hyphen_values = true)]
    pub ic: Point,
    #[arg(long, default_value_t = 1e4)]
    pub t_end: f64,
    /// number of stroboscopic points
    #[arg(long, default_value_t = 1000)]
    pub sections: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineArgs {
    /// Ψ is real at t = 0 for real coefficients, so pick t ≠ 0 there
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t: f64,
    /// starting guess near the line
    #[arg(long, default_value = "0.3,-0.2,0.4", allow_hyphen_values = true)]
    pub start: Point,
    /// also locate the X-point in every normal plane
    #[arg(long)]
    pub x_line: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub seed: u64,
    pub precision: Option<u32>,
    pub full_scale: bool,
    pub workers: usize,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("manifest {}: {e}", path.display())))
    }
}

/// Everything a subcommand needs once flags and config are merged.
pub struct Run {
    pub command: Command,
    pub config: RunConfig,
    pub seed: u64,
    pub precision: Option<u32>,
    pub full_scale: bool,
    pub workers: usize,
}

/// Files written by one run, in creation order.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        f(&mut w)?;
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(name, |w| writeln!(w, "{text}"))
    }

    fn records(&self) -> Result<Vec<OutputRecord>> {
        self.files
            .iter()
            .map(|name| {
                let data = std::fs::read(self.dir.join(name))?;
                Ok(OutputRecord {
                    path: name.clone(),
                    bytes: data.len() as u64,
                    sha256: hex::encode(Sha256::digest(&data)),
                })
            })
            .collect()
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs one resolved command and writes its manifest.
pub fn execute(run: &Run, out_dir: &Path) -> Result<RunManifest> {
    run.config.validate()?;
    if run.workers == 0 {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    let started = unix_now();
    let mut out = Outputs::new(out_dir)?;
    commands::dispatch(run, &mut out)?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: run.command.clone(),
        config: run.config.clone(),
        seed: run.seed,
        precision: run.precision,
        full_scale: run.full_scale,
        workers: run.workers,
        started_unix: started,
        finished_unix: unix_now(),
        outputs: out.records()?,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(out_dir.join(MANIFEST_FILE), text + "\n")?;
    Ok(manifest)
}

fn resolve(global: &GlobalArgs, command: Command) -> Result<Run> {
    let mut config = match &global.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let seed = global.seed.unwrap_or(1);
    let precision = global.precision.or(config.integrator.precision);
    config.integrator.precision = precision;
    commands::merge(&command, &mut config, seed, global.full_scale)?;
    Ok(Run {
        command,
        config,
        seed,
        precision,
        full_scale: global.full_scale,
        workers: global.workers.unwrap_or_else(default_workers),
    })
}

fn replay(global: &GlobalArgs, path: &Path) -> Result<bool> {
    let m = RunManifest::read(path)?;
    let run = Run {
        command: m.command.clone(),
        config: m.config.clone(),
        seed: m.seed,
        precision: m.precision,
        full_scale: m.full_scale,
        workers: global.workers.unwrap_or_else(default_workers),
    };
    let dir = match &global.out {
        Some(d) => d.clone(),
        None => path
            .parent()
            .map_or_else(|| PathBuf::from("."), Path::to_path_buf),
    };
    let fresh = execute(&run, &dir)?;
    let mut same = fresh.outputs.len() == m.outputs.len();
    for (a, b) in m.outputs.iter().zip(&fresh.outputs) {
        if a.path != b.path || a.sha256 != b.sha256 {
            eprintln!(
                "replay mismatch: {} differs from the recorded output",
                b.path
            );
            same = false;
        }
    }
    Ok(same)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        1
    } else {
        2
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let g = &cli.global;
    let result = match (&g.replay, cli.command) {
        (Some(path), None) => replay(g, path).map(|same| {
            if same {
                eprintln!("replay reproduced every recorded output");
                0
            } else {
                2
            }
        }),
        (Some(_), Some(_)) => Err(Error::Config("--replay takes no subcommand".into())),
        (None, Some(cmd)) => resolve(g, cmd).and_then(|run| {
            let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let m = execute(&run, &dir)?;
            for o in &m.outputs {
                eprintln!("wrote {}", dir.join(&o.path).display());
            }
            Ok(0)
        }),
        (None, None) => {
            use clap::CommandFactory;
            let _ = Cli::command().write_help(&mut std::io::stderr());
            return 1;
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
