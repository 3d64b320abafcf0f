//! Job files, reports and file formats behind the `bcvhelix` binary.
//!
//! A job is one JSON document; command-line flags only pick the command, the
//! job file, the output directory and `key=value` overrides of single fields.
//! Every command returns a JSON report and a verdict. Output files are
//! written atomically and depend on nothing but the job.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bcv::BcvSpace;
use crate::bour::{BourSeed, ChartFormula, NaturalChart};
use crate::cmc::{cmc_residual, cmc_u, minimal_u, CmcFamily};
use crate::error::GeomError;
use crate::expr::Expr;
use crate::numerics::{Interval, Tolerances};
use crate::oracle::{
    first_form_numeric, mean_curvature_extrinsic, natural_form_deviation, param_grid, sample_mesh, FirstForm, MeshGrid,
    MeshOptions, MeshParam, SurfaceChart,
};
use crate::profile::{MetricProfile, ProfileJet};

/// Fraction of the chart domain left out on each side by the curvature
/// checks; stencils are unreliable where the chart radicand vanishes.
const CHECK_MARGIN: f64 = 0.02;

/// Interior points used for the profile residual checks.
const RESIDUAL_POINTS: usize = 50;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Classify,
    Chart,
    Cmc,
    Minimal,
    Deform,
    Verify,
    Export,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    CmcCase,
    MinimalCase,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Obj,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub family: Family,
    pub m: f64,
    pub a: f64,
    #[serde(rename = "H", default)]
    pub h: f64,
    #[serde(default)]
    pub c: f64,
    pub u_range: [f64; 2],
    /// `U(u)` for explicit seeds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<ChartFormula>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub nu: usize,
    pub nt: usize,
    pub t_range: [f64; 2],
    /// Sample the mesh in `(u, θ)` instead of the natural `(u, t)`.
    pub raw: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nu: 41, nt: 41, t_range: [-1.0, 1.0], raw: false }
    }
}

/// Pass thresholds of `verify` and `deform`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSpec {
    pub cmc_residual: f64,
    pub mean_curvature: f64,
    pub first_form: f64,
}

impl Default for CheckSpec {
    fn default() -> Self {
        Self { cmc_residual: 1e-8, mean_curvature: 1e-4, first_form: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub stem: String,
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, stem: "surface".into(), formats: vec![Format::Csv, Format::Obj, Format::Json] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: CheckSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// `bcvhelix <command> --config <path> [--out <dir>] [--override key=value ...]`
#[derive(Debug, Parser)]
#[command(name = "bcvhelix", version, about = "Helicoidal surfaces in BCV spaces")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Mode,
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace one field of the job, e.g. `seed.a=0.25` or `grid.nu=21`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Sets `key` (dotted path) in `doc`. The value is read as JSON when it
/// parses, as a string otherwise.
pub fn apply_override(doc: &mut Value, spec: &str) -> CliResult<()> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| config_err(format!("override '{spec}' is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(config_err(format!("override '{spec}': empty key segment")));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| config_err(format!("override '{spec}': '{}' is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split always yields a segment")
}

/// Parses a job document and applies overrides. Parse errors carry line and
/// column; validation errors name the field.
pub fn parse_config(text: &str, overrides: &[String]) -> CliResult<JobConfig> {
    let cfg: JobConfig = if overrides.is_empty() {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?
    } else {
        let mut doc: Value = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        serde_json::from_value(doc).map_err(|e| config_err(format!("after overrides: {e}")))?
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, overrides: &[String]) -> CliResult<JobConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, overrides).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn interval(field: &str, r: [f64; 2]) -> CliResult<Interval> {
    if !(r[0] < r[1]) {
        return Err(config_err(format!("{field}: need lo < hi, got [{}, {}]", r[0], r[1])));
    }
    Interval::new(r[0], r[1]).map_err(|e| config_err(format!("{field}: {e}")))
}

impl JobConfig {
    pub fn validate(&self) -> CliResult<()> {
        BcvSpace::new(self.space.kappa, self.space.tau).map_err(|e| config_err(format!("space: {e}")))?;
        if let Some(s) = &self.seed {
            if !(s.m.is_finite() && s.m != 0.0) {
                return Err(config_err(format!("seed.m: must be finite and nonzero, got {}", s.m)));
            }
            if !(s.a.is_finite() && s.h.is_finite() && s.c.is_finite()) {
                return Err(config_err("seed: a, H and c must be finite"));
            }
            interval("seed.u_range", s.u_range)?;
            match (s.family, &s.expr) {
                (Family::Explicit, None) => return Err(config_err("seed.expr: required for explicit seeds")),
                (Family::Explicit, Some(e)) => {
                    Expr::parse(e).map_err(|err| config_err(format!("seed.expr: {err}")))?;
                }
                (_, Some(_)) => return Err(config_err("seed.expr: only allowed for explicit seeds")),
                _ => {}
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.parameter != "a" {
                return Err(config_err(format!("sweep.parameter: only \"a\" can be swept, got \"{}\"", sw.parameter)));
            }
            if sw.values.is_empty() || sw.values.iter().any(|v| !v.is_finite()) {
                return Err(config_err("sweep.values: need at least one finite value"));
            }
        }
        if self.grid.nu < 2 || self.grid.nt < 2 {
            return Err(config_err(format!("grid: nu and nt must be ≥ 2, got {} and {}", self.grid.nu, self.grid.nt)));
        }
        interval("grid.t_range", self.grid.t_range)?;
        if self.output.stem.is_empty() || self.output.stem.contains(['/', '\\']) {
            return Err(config_err(format!("output.stem: '{}' is not a plain file name", self.output.stem)));
        }
        Ok(())
    }

    pub fn space(&self) -> BcvSpace {
        BcvSpace { kappa: self.space.kappa, tau: self.space.tau }
    }

    fn seed_spec(&self) -> CliResult<&SeedSpec> {
        self.seed.as_ref().ok_or_else(|| config_err("seed: required by this command"))
    }

    fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}

/// Seed built from a job, with the family it came from.
pub struct Built {
    pub seed: BourSeed,
    pub family: Option<CmcFamily>,
    /// Target mean curvature.
    pub h: f64,
}

pub fn build_seed(cfg: &JobConfig, a: f64) -> CliResult<Built> {
    let s = cfg.seed_spec()?;
    let space = cfg.space();
    let tol = &cfg.tolerances;
    let window = interval("seed.u_range", s.u_range)?;
    Ok(match s.family {
        Family::CmcCase => {
            let fam = cmc_u(&space, s.m, a, s.h, s.c, window, tol)?;
            Built { seed: fam.seed(None)?, h: s.h, family: Some(fam) }
        }
        Family::MinimalCase => {
            let fam = minimal_u(&space, s.m, a, s.c, window, tol)?;
            Built { seed: fam.seed(None)?, h: 0.0, family: Some(fam) }
        }
        Family::Explicit => {
            let src = s.expr.as_deref().unwrap_or_default();
            let e = Expr::parse(src).map_err(|err| config_err(format!("seed.expr: {err}")))?;
            let profile = MetricProfile::analytic(src, move |u| {
                let j = e.jet(u);
                if [j.value, j.d1, j.d2].iter().all(|v| v.is_finite()) {
                    Ok(ProfileJet { value: j.value, d1: j.d1, d2: j.d2 })
                } else {
                    Err(GeomError::InvalidInput(format!("U({u}) = {} is not smooth there", j.value)))
                }
            });
            Built { seed: BourSeed::new(profile, s.m, a, window)?, family: None, h: s.h }
        }
    })
}

pub fn build_chart(cfg: &JobConfig, built: &Built) -> CliResult<NaturalChart> {
    let formula = cfg.seed_spec()?.formula.unwrap_or(ChartFormula::Helicoidal);
    Ok(NaturalChart::with_formula(&cfg.space(), &built.seed, formula, &cfg.tolerances)?)
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
    pub files: Vec<PathBuf>,
}

/// Writes `bytes` through a temporary file in the same directory, so that a
/// failed write never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Float format of every CSV and OBJ number: 17 significant digits, which
/// round-trips `f64` exactly.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn mesh_csv(mesh: &MeshGrid) -> String {
    let mut s = String::from("u,t,x,y,z,H_ext,K,cmc_residual\n");
    for v in &mesh.vertices {
        let row = [v.u, v.t, v.x, v.y, v.z, v.h_ext, v.k, v.cmc_residual].map(num).join(",");
        s.push_str(&row);
        s.push('\n');
    }
    s
}

pub fn mesh_obj(mesh: &MeshGrid) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", num(v.x), num(v.y), num(v.z));
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(s, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    s
}

/// Columns `u, xi1, xi2, theta0, U` at `n` points of the chart domain.
pub fn profile_csv(chart: &NaturalChart, n: usize) -> CliResult<String> {
    let mut s = String::from("u,xi1,xi2,theta0,U\n");
    for u in chart.domain().linspace(n) {
        let row = [u, chart.xi1(u)?, chart.xi2(u)?, chart.theta0(u)?, chart.u_value(u)?].map(num).join(",");
        s.push_str(&row);
        s.push('\n');
    }
    Ok(s)
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports are plain JSON values");
    s.push('\n');
    s
}

/// Finite numbers as JSON numbers, everything else as `null`.
fn jnum(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: String, text: &str) -> CliResult<()> {
        let path = self.dir.join(&name);
        write_atomic(&path, text.as_bytes())?;
        self.files.push(PathBuf::from(name));
        Ok(())
    }
}

fn space_report(space: &BcvSpace) -> Value {
    json!({ "kappa": space.kappa, "tau": space.tau, "class": space.classify().to_string() })
}

fn chart_report(chart: &NaturalChart, built: &Built) -> Value {
    let d = chart.domain();
    let mut r = json!({
        "profile": chart.seed().profile.label(),
        "m": chart.seed().m,
        "a": chart.a(),
        "formula": chart.formula(),
        "domain": [d.lo, d.hi],
        "u0": chart.u0(),
    });
    if let Some(f) = &built.family {
        r["family"] = json!({
            "formula": f.formula,
            "H": f.h,
            "c": f.c,
            "constants": f.constants,
            "domain": [f.domain.lo, f.domain.hi],
        });
    }
    r
}

fn surface(cfg: &JobConfig, chart: NaturalChart) -> CliResult<SurfaceChart> {
    Ok(SurfaceChart::natural(chart, None, interval("grid.t_range", cfg.grid.t_range)?)?)
}

fn mesh_for(cfg: &JobConfig, built: &Built, chart: &SurfaceChart) -> CliResult<MeshGrid> {
    let space = cfg.space();
    let tol = cfg.tolerances;
    let residual = |u: f64| cmc_residual(&space, &built.seed, built.h, u, &tol);
    let opts = MeshOptions {
        diagnostics: true,
        param: if cfg.grid.raw { MeshParam::Raw } else { MeshParam::Chart },
        residual: Some(&residual),
    };
    Ok(sample_mesh(chart, cfg.grid.nu, cfg.grid.nt, &opts, &cfg.tolerances)?)
}

fn mesh_report(mesh: &MeshGrid) -> Value {
    json!({
        "nu": mesh.nu,
        "nt": mesh.nt,
        "vertices": mesh.vertices.len(),
        "triangles": mesh.triangles().len(),
        "dropped_rows": mesh.dropped_rows,
        "missing_diagnostics": mesh.missing_diagnostics,
        "max_abs_H_ext": jnum(mesh.max_abs_h()),
    })
}

fn check_grid(cfg: &JobConfig, domain: Interval) -> CliResult<Vec<(f64, f64)>> {
    let inner = domain.inset(CHECK_MARGIN * domain.len())?;
    Ok(param_grid(inner, interval("grid.t_range", cfg.grid.t_range)?, cfg.grid.nu, cfg.grid.nt))
}

fn write_mesh(cfg: &JobConfig, w: &mut Writer<'_>, stem: &str, mesh: &MeshGrid) -> CliResult<()> {
    if cfg.wants(Format::Csv) {
        w.put(format!("{stem}.csv"), &mesh_csv(mesh))?;
    }
    if cfg.wants(Format::Obj) {
        w.put(format!("{stem}.obj"), &mesh_obj(mesh))?;
    }
    Ok(())
}

fn finish(cfg: &JobConfig, mut w: Writer<'_>, mut report: Value, pass: bool) -> CliResult<Outcome> {
    report["pass"] = json!(pass);
    if cfg.wants(Format::Json) {
        let name = format!("{}_report.json", cfg.output.stem);
        let mut listed = w.files.clone();
        listed.push(PathBuf::from(&name));
        report["files"] = json!(listed);
        w.put(name, &json_text(&report))?;
    } else {
        report["files"] = json!(w.files);
    }
    Ok(Outcome { report, pass, files: w.files })
}

fn cmd_classify(cfg: &JobConfig, w: Writer<'_>) -> CliResult<Outcome> {
    let report = json!({ "command": "classify", "space": space_report(&cfg.space()) });
    finish(cfg, w, report, true)
}

fn cmd_chart(cfg: &JobConfig, mode: Mode, mut w: Writer<'_>) -> CliResult<Outcome> {
    let family = cfg.seed_spec()?.family;
    match (mode, family) {
        (Mode::Cmc, Family::CmcCase) | (Mode::Minimal, Family::MinimalCase) | (Mode::Chart, _) => {}
        _ => return Err(config_err(format!("seed.family: {family:?} does not fit this command"))),
    }
    let built = build_seed(cfg, cfg.seed_spec()?.a)?;
    let chart = build_chart(cfg, &built)?;
    if cfg.wants(Format::Csv) {
        w.put(format!("{}_profile.csv", cfg.output.stem), &profile_csv(&chart, cfg.grid.nu)?)?;
    }
    let command = match mode {
        Mode::Cmc => "cmc",
        Mode::Minimal => "minimal",
        _ => "chart",
    };
    let report = json!({
        "command": command,
        "space": space_report(&cfg.space()),
        "chart": chart_report(&chart, &built),
    });
    finish(cfg, w, report, true)
}

fn cmd_export(cfg: &JobConfig, mut w: Writer<'_>) -> CliResult<Outcome> {
    let built = build_seed(cfg, cfg.seed_spec()?.a)?;
    let chart = build_chart(cfg, &built)?;
    let report_chart = chart_report(&chart, &built);
    let sc = surface(cfg, chart)?;
    let mesh = mesh_for(cfg, &built, &sc)?;
    write_mesh(cfg, &mut w, &cfg.output.stem.clone(), &mesh)?;
    let report = json!({
        "command": "export",
        "space": space_report(&cfg.space()),
        "chart": report_chart,
        "mesh": mesh_report(&mesh),
    });
    finish(cfg, w, report, true)
}

/// Largest `|cmc_residual|` at interior points of the chart domain.
fn max_residual(cfg: &JobConfig, built: &Built, domain: Interval) -> f64 {
    let space = cfg.space();
    let pts = domain.linspace(RESIDUAL_POINTS + 2);
    pts[1..pts.len() - 1]
        .iter()
        .map(|&u| cmc_residual(&space, &built.seed, built.h, u, &cfg.tolerances).map_or(f64::INFINITY, f64::abs))
        .fold(0.0, f64::max)
}

/// Largest `|H_ext − H|` on `grid`, with the orientation of the normal fixed
/// once from the first point.
fn max_mean_curvature_deviation(sc: &SurfaceChart, h: f64, grid: &[(f64, f64)], tol: &Tolerances) -> f64 {
    use rayon::prelude::*;
    let hs: Vec<f64> = grid
        .par_iter()
        .map(|&(u, t)| mean_curvature_extrinsic(sc, u, t, tol).unwrap_or(f64::NAN))
        .collect();
    let sign = match hs.first() {
        Some(&h0) if h != 0.0 && h0 * h < 0.0 => -1.0,
        _ => 1.0,
    };
    hs.iter()
        .map(|&x| if x.is_finite() { (sign * x - h).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

fn cmd_verify(cfg: &JobConfig, w: Writer<'_>) -> CliResult<Outcome> {
    let built = build_seed(cfg, cfg.seed_spec()?.a)?;
    let chart = build_chart(cfg, &built)?;
    let domain = chart.domain();
    let report_chart = chart_report(&chart, &built);
    let residual = max_residual(cfg, &built, domain);
    let grid = check_grid(cfg, domain)?;
    let sc = surface(cfg, chart)?;
    let h_dev = max_mean_curvature_deviation(&sc, built.h, &grid, &cfg.tolerances);
    let ff_dev = natural_form_deviation(&sc, &built.seed.profile, &grid, &cfg.tolerances).unwrap_or(f64::INFINITY);
    let c = cfg.checks;
    let ok = [residual <= c.cmc_residual, h_dev <= c.mean_curvature, ff_dev <= c.first_form];
    let report = json!({
        "command": "verify",
        "space": space_report(&cfg.space()),
        "chart": report_chart,
        "H": built.h,
        "max_cmc_residual": jnum(residual),
        "max_mean_curvature_deviation": jnum(h_dev),
        "max_first_form_deviation": jnum(ff_dev),
        "thresholds": c,
        "checks": { "cmc_residual": ok[0], "mean_curvature": ok[1], "first_form": ok[2] },
    });
    finish(cfg, w, report, ok.iter().all(|&b| b))
}

/// Parameter value as it appears in file names.
fn tag(v: f64) -> String {
    format!("{v}")
}

fn cmd_deform(cfg: &JobConfig, mut w: Writer<'_>) -> CliResult<Outcome> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| config_err("sweep: required by deform"))?;
    let mut frames = Vec::new();
    let mut charts: Vec<(f64, SurfaceChart)> = Vec::new();
    for &a in &sweep.values {
        let made = build_seed(cfg, a).and_then(|b| {
            let chart = build_chart(cfg, &b)?;
            let sc = surface(cfg, chart)?;
            let mesh = mesh_for(cfg, &b, &sc)?;
            Ok((sc, mesh))
        });
        match made {
            Ok((sc, mesh)) => {
                let stem = format!("{}_a={}", cfg.output.stem, tag(a));
                write_mesh(cfg, &mut w, &stem, &mesh)?;
                let d = sc.u_range;
                frames.push(json!({ "a": a, "domain": [d.lo, d.hi], "mesh": mesh_report(&mesh) }));
                charts.push((a, sc));
            }
            Err(e) => frames.push(json!({ "a": a, "error": e.to_string() })),
        }
    }
    let common = charts.iter().try_fold(None::<Interval>, |acc, (_, sc)| match acc {
        None => Some(Some(sc.u_range)),
        Some(i) => i.intersect(&sc.u_range).map(Some),
    });
    let mut matrix = vec![vec![Value::Null; charts.len()]; charts.len()];
    let mut worst = 0.0f64;
    let mut isometry_error = None;
    if let Some(Some(dom)) = common {
        let grid = check_grid(cfg, dom)?;
        let forms: Vec<Option<Vec<FirstForm>>> = charts
            .iter()
            .map(|(_, sc)| grid.iter().map(|&(u, t)| first_form_numeric(sc, u, t, &cfg.tolerances)).collect::<Result<_, _>>().ok())
            .collect();
        for i in 0..charts.len() {
            for j in 0..charts.len() {
                if let (Some(x), Some(y)) = (&forms[i], &forms[j]) {
                    let d = x
                        .iter()
                        .zip(y)
                        .map(|(p, q)| (p.e - q.e).abs().max((p.f - q.f).abs()).max((p.g - q.g).abs()))
                        .fold(0.0, f64::max);
                    worst = worst.max(d);
                    matrix[i][j] = jnum(d);
                } else {
                    worst = f64::INFINITY;
                }
            }
        }
    } else if charts.len() > 1 {
        isometry_error = Some("chart domains do not overlap");
        worst = f64::INFINITY;
    }
    let pass = charts.len() == sweep.values.len() && worst <= cfg.checks.first_form;
    let report = json!({
        "command": "deform",
        "space": space_report(&cfg.space()),
        "parameter": sweep.parameter,
        "values": charts.iter().map(|(a, _)| *a).collect::<Vec<_>>(),
        "frames": frames,
        "isometry_deviation": matrix,
        "max_isometry_deviation": jnum(worst),
        "isometry_error": isometry_error,
    });
    finish(cfg, w, report, pass)
}

/// Runs one command; `out` is the directory for every written file.
pub fn run(mode: Mode, cfg: &JobConfig, out: &Path) -> CliResult<Outcome> {
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(config_err(format!("mode: job is for {m:?}, command is {mode:?}")));
        }
    }
    let w = Writer { dir: out, files: Vec::new() };
    match mode {
        Mode::Classify => cmd_classify(cfg, w),
        Mode::Chart | Mode::Cmc | Mode::Minimal => cmd_chart(cfg, mode, w),
        Mode::Export => cmd_export(cfg, w),
        Mode::Verify => cmd_verify(cfg, w),
        Mode::Deform => cmd_deform(cfg, w),
    }
}

/// Output directory: `--out`, else `output.dir`, else the working directory.
pub fn output_dir(args_out: Option<&Path>, cfg: &JobConfig) -> PathBuf {
    args_out.map(Path::to_path_buf).or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NIL_MINIMAL: &str = r#"{
        "space": {"kappa": 0, "tau": 0.5},
        "seed": {"family": "minimal-case", "m": 1, "a": 0.5, "c": 1, "u_range": [-2, 2]},
        "grid": {"nu": 5, "nt": 3}
    }"#;

    #[test]
    fn parses_and_validates() {
        let cfg = parse_config(NIL_MINIMAL, &[]).unwrap();
        assert_eq!(cfg.seed.as_ref().unwrap().family, Family::MinimalCase);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.output.formats.len(), 3);
        let e = parse_config(&NIL_MINIMAL.replace("\"m\": 1", "\"m\": 0"), &[]).unwrap_err();
        assert!(e.to_string().contains("seed.m"), "{e}");
        let e = parse_config(&NIL_MINIMAL.replace("\"nt\": 3", "\"nt\": 3, \"bogus\": 1"), &[]).unwrap_err();
        assert!(e.to_string().contains("bogus") && e.to_string().contains("line"), "{e}");
        let e = parse_config(&NIL_MINIMAL.replace("[-2, 2]", "[2, -2]"), &[]).unwrap_err();
        assert!(e.to_string().contains("u_range"), "{e}");
    }

    #[test]
    fn overrides() {
        let o = vec!["seed.a=0.25".to_string(), "grid.raw=true".into(), "output.stem=nil".into()];
        let cfg = parse_config(NIL_MINIMAL, &o).unwrap();
        assert_eq!(cfg.seed.as_ref().unwrap().a, 0.25);
        assert!(cfg.grid.raw);
        assert_eq!(cfg.output.stem, "nil");
        assert!(parse_config(NIL_MINIMAL, &["seed".into()]).is_err());
        assert!(parse_config(NIL_MINIMAL, &["seed.m.x=1".into()]).is_err());
    }

    #[test]
    fn explicit_needs_expression() {
        let t = NIL_MINIMAL.replace("minimal-case", "explicit");
        assert!(parse_config(&t, &[]).unwrap_err().to_string().contains("seed.expr"));
        let t = t.replace("\"c\": 1", "\"expr\": \"(u^2 + 2\"");
        assert!(parse_config(&t, &[]).unwrap_err().to_string().contains("seed.expr"));
    }

    #[test]
    fn csv_numbers_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, -0.0] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn override_creates_missing_objects() {
        let mut v = json!({"space": {"kappa": 0, "tau": 0}});
        apply_override(&mut v, "sweep.parameter=a").unwrap();
        assert_eq!(v["sweep"]["parameter"], "a");
    }
}
