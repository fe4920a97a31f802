use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use shapeshift::aggregation::{
    delta_grid, integrate_approach, mobility_sample, stopping_distance, tread_cost, ApproachParams, MobilityCurve,
    MobilitySample,
};
use shapeshift::bem::solver::{refine_until, Problem, SolverSettings};
use shapeshift::friction::tread_h_internal;
use shapeshift::geometry::{expanding_robot_mesh, probe_mesh, tread_sphere_mesh, MeshOptions, TreadSphereSpec};
use shapeshift::profile::{
    assemble_cost, compare_schedules, optimal_profile, CurveSample, DissipationCurve, PROFILE_POINTS,
};
use shapeshift::sweep::{expanding_sample, extension_grid, probe_sample, probe_curve};
use shapeshift::tables::{approach_row, shape_change_row, ApproachRow, ShapeChangeRow};
use shapeshift::validation::{run_all, Check, ConvergenceStudy};

use crate::cache::Cache;
use crate::config::{Format, Geometry, RunConfig};
use crate::error::CliError;
use crate::output::{write_csv, write_json, Table, Unit};

/// Deepest level tried by `--refine`, i.e. up to 16× the configured panel density.
const MAX_REFINE_LEVELS: usize = 5;

pub struct Context {
    pub cache: Cache,
    pub refine_target: Option<f64>,
}

fn settings(cfg: &RunConfig) -> SolverSettings {
    SolverSettings::new(cfg.fluid.dynamic_viscosity)
}

fn at_level(base: &MeshOptions, level: usize) -> MeshOptions {
    MeshOptions {
        refine: base.refine * 2f64.powi(level as i32),
        ..*base
    }
}

type Points<S> = Vec<(f64, shapeshift::Result<S>)>;

type Builder<'a> = Box<dyn Fn(&MeshOptions) -> shapeshift::Result<Problem> + 'a>;

/// Mesh options after the refinement study, if a target was requested.
/// Each probe configuration is refined until its power settles; the finest
/// level needed by any of them is used for the whole sweep.
fn mesh_options(cfg: &RunConfig, ctx: &Context) -> Result<MeshOptions, CliError> {
    let base = cfg.solver.mesh;
    let Some(target) = ctx.refine_target.or(cfg.solver.refine_target) else {
        return Ok(base);
    };
    let f_ends = [cfg.solver.f_min, cfg.shape_change.extent];
    let probes: Vec<Builder> = match &cfg.geometry {
        Geometry::Expanding(spec) => f_ends
            .iter()
            .map(|&f| Box::new(move |o: &MeshOptions| expanding_robot_mesh(spec, f, o)) as Builder)
            .collect(),
        Geometry::Probe { spec, .. } => f_ends
            .iter()
            .map(|&f| Box::new(move |o: &MeshOptions| probe_mesh(spec, f, o)) as Builder)
            .collect(),
        Geometry::Tread { template, .. } => {
            let near = TreadSphereSpec {
                delta: cfg.solver.delta_min,
                ..*template
            };
            vec![Box::new(move |o: &MeshOptions| tread_sphere_mesh(&near, o)) as Builder]
        }
        Geometry::CurveFile { .. } => return Ok(base),
    };
    let s = settings(cfg);
    let mut level = 0;
    for build in &probes {
        let r = refine_until(|l| build(&at_level(&base, l)), &s, target, MAX_REFINE_LEVELS)?;
        level = level.max(r.level);
    }
    let opts = at_level(&base, level);
    eprintln!("refinement: target {target:e} reached at refine = {}", opts.refine);
    Ok(opts)
}

fn extension_points(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    Ok(extension_grid(cfg.solver.f_min, cfg.shape_change.extent, cfg.solver.grid_points)?)
}

fn shape_points(cfg: &RunConfig, opts: &MeshOptions) -> Result<Points<CurveSample>, CliError> {
    let grid = extension_points(cfg)?;
    let s = settings(cfg);
    Ok(grid
        .par_iter()
        .map(|&f| {
            let r = match &cfg.geometry {
                Geometry::Expanding(spec) => expanding_sample(spec, f, opts, &s),
                Geometry::Probe { spec, .. } => probe_sample(spec, f, opts, &s),
                _ => unreachable!("shape geometries only"),
            };
            (f, r)
        })
        .collect())
}

/// Curve with its `d0` and `dv0/dḟ`.
fn shape_curve(cfg: &RunConfig, ctx: &Context) -> Result<(DissipationCurve, f64, f64), CliError> {
    match &cfg.geometry {
        Geometry::CurveFile { path, size, conversion } => {
            let f = std::fs::File::open(path)
                .map_err(|e| CliError::Config(format!("curve-file {}: {e}", path.display())))?;
            let curve = DissipationCurve::read_csv("curve-file", f)
                .map_err(|e| CliError::Config(format!("curve-file {}: {e}", path.display())))?;
            Ok((curve, *size, *conversion))
        }
        Geometry::Expanding(spec) => {
            let opts = mesh_options(cfg, ctx)?;
            let samples = collect(shape_points(cfg, &opts)?)?;
            Ok((DissipationCurve::new("expanding", samples)?, spec.length, spec.conversion()))
        }
        Geometry::Probe { spec, .. } => {
            let opts = mesh_options(cfg, ctx)?;
            let samples = collect(shape_points(cfg, &opts)?)?;
            Ok((DissipationCurve::new("probe", samples)?, spec.length, spec.conversion()))
        }
        Geometry::Tread { .. } => unreachable!("tread handled separately"),
    }
}

fn collect<S>(points: Points<S>) -> Result<Vec<S>, CliError> {
    points.into_iter().map(|(_, r)| r.map_err(CliError::from)).collect()
}

fn mobility_points(
    template: &TreadSphereSpec,
    grid: &[f64],
    opts: &MeshOptions,
    s: &SolverSettings,
) -> Points<MobilitySample> {
    grid.par_iter()
        .map(|&delta| (delta, mobility_sample(&TreadSphereSpec { delta, ..*template }, opts, s)))
        .collect()
}

/// Cached mobility curve, or the per-point results of a fresh sweep.
/// Complete sweeps are stored.
fn mobility(cfg: &RunConfig, ctx: &Context) -> Result<Result<MobilityCurve, Points<MobilitySample>>, CliError> {
    let Geometry::Tread { template, .. } = &cfg.geometry else {
        unreachable!("tread geometry only")
    };
    let opts = mesh_options(cfg, ctx)?;
    let s = settings(cfg);
    let grid = delta_grid(cfg.solver.delta_min, cfg.solver.delta_max, cfg.solver.grid_points)?;
    let key = shapeshift::aggregation::cache_key(template, &grid, &opts, &s);
    if let Some(curve) = ctx.cache.load(template.case, &key)? {
        return Ok(Ok(curve));
    }
    let points = mobility_points(template, &grid, &opts, &s);
    if points.iter().any(|(_, r)| r.is_err()) {
        return Ok(Err(points));
    }
    let curve = MobilityCurve::new(template.case, collect(points)?)?;
    ctx.cache.store(&key, &curve)?;
    Ok(Ok(curve))
}

fn mobility_curve(cfg: &RunConfig, ctx: &Context) -> Result<MobilityCurve, CliError> {
    match mobility(cfg, ctx)? {
        Ok(c) => Ok(c),
        Err(points) => Err(collect(points).expect_err("a failed point")),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn render(table: &Table, json: &impl Serialize, format: Format) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Table => table.render(&mut buf)?,
        Format::Json => write_json(json, &mut buf)?,
        Format::Csv => table.write_csv(&mut buf)?,
    }
    Ok(buf)
}

#[derive(Debug, Serialize)]
struct SensitivityRow {
    body_radius: f64,
    energy: f64,
    savings: f64,
    rate_ratio: f64,
    peak_reduction: f64,
}

#[derive(Debug, Serialize)]
struct ShapeReport {
    geometry: &'static str,
    extent: f64,
    fluid_share: f64,
    row: ShapeChangeRow,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    body_radius_sensitivity: Vec<SensitivityRow>,
}

#[derive(Debug, Serialize)]
struct ApproachReport {
    geometry: &'static str,
    fluid_share: f64,
    row: ApproachRow,
}

fn shape_table(r: &ShapeReport) -> Table {
    let row = &r.row;
    let mut t = Table::new(format!("{} robot, {} scenario, F = {}", r.geometry, row.scenario, r.extent));
    t.row("T", row.duration, Unit::Millisecond)
        .row("tip speed", row.tip_speed, Unit::MicronPerSecond)
        .row("Re", row.reynolds, Unit::None)
        .row("Wom", row.womersley, Unit::None)
        .row("fluid power factor", row.fluid_power_factor, Unit::Picowatt)
        .row("internal power factor", row.internal_power_factor, Unit::Picowatt)
        .row("E", row.energy, Unit::Joule)
        .row("fluid share", r.fluid_share, Unit::Percent)
        .row("glucose molecules", row.glucose_molecules, Unit::None)
        .row("E optimal", row.optimal_energy, Unit::Joule)
        .row("savings", row.savings, Unit::Percent)
        .row("rate ratio", row.rate_ratio, Unit::None)
        .row("peak power reduction", row.peak_reduction, Unit::Percent);
    for s in &r.body_radius_sensitivity {
        let um = s.body_radius * 1e6;
        t.row(format!("E (R_body = {um} µm)"), s.energy, Unit::Joule)
            .row(format!("savings (R_body = {um} µm)"), s.savings, Unit::Percent)
            .row(format!("peak power reduction (R_body = {um} µm)"), s.peak_reduction, Unit::Percent);
    }
    t
}

fn approach_table(r: &ApproachReport) -> Table {
    let row = &r.row;
    let mut t = Table::new(format!("tread sphere, {} scenario, {}", row.scenario, row.case.as_str()));
    t.row("Re", row.reynolds, Unit::None)
        .row("Wom", row.womersley, Unit::None)
        .row("fluid power factor", row.fluid_power_factor, Unit::Picowatt)
        .row("internal power factor", row.internal_power_factor, Unit::Picowatt)
        .row("D", row.diffusion, Unit::MicronSquaredPerSecond)
        .row("delta1", row.delta1, Unit::None)
        .row("T", row.duration, Unit::Millisecond)
        .row("E", row.energy, Unit::Joule)
        .row("fluid share", r.fluid_share, Unit::Percent)
        .row("glucose molecules", row.glucose_molecules, Unit::None)
        .row("Brownian displacement in T", row.brownian_displacement, Unit::Micron)
        .row("savings", row.savings, Unit::Percent);
    t
}

pub fn scenario_table(cfg: &RunConfig, ctx: &Context, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let bytes = match &cfg.geometry {
        Geometry::Tread { approach, .. } => {
            let curve = mobility_curve(cfg, ctx)?;
            let row = approach_row(&curve, approach)?;
            let report = ApproachReport {
                geometry: "tread-sphere",
                fluid_share: row.fluid_share(),
                row,
            };
            render(&approach_table(&report), &report, format)?
        }
        geometry => {
            let (curve, size, conversion) = shape_curve(cfg, ctx)?;
            let row = shape_change_row(&curve, &cfg.shape_change, size, conversion)?;
            let mut sensitivity = Vec::new();
            if let Geometry::Probe { spec, sensitivity_radii } = geometry {
                let opts = mesh_options(cfg, ctx)?;
                let grid = extension_points(cfg)?;
                for &r in sensitivity_radii {
                    let varied = shapeshift::geometry::ProbeSpec { body_radius: r, ..*spec };
                    varied.validate().map_err(|e| CliError::Config(format!("`probe.sensitivity_radii`: {e}")))?;
                    let c = probe_curve(&varied, &grid, &opts, &settings(cfg))?;
                    let v = shape_change_row(&c, &cfg.shape_change, size, conversion)?;
                    sensitivity.push(SensitivityRow {
                        body_radius: r,
                        energy: v.energy,
                        savings: v.savings,
                        rate_ratio: v.rate_ratio,
                        peak_reduction: v.peak_reduction,
                    });
                }
            }
            let report = ShapeReport {
                geometry: geometry.label(),
                extent: cfg.shape_change.extent,
                fluid_share: row.fluid_share(),
                row,
                body_radius_sensitivity: sensitivity,
            };
            render(&shape_table(&report), &report, format)?
        }
    };
    emit(out, &bytes)
}

#[derive(Debug, Serialize)]
struct CurvePoint {
    param: f64,
    h_fluid: Option<f64>,
    h_internal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_loc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct CurveReport {
    geometry: &'static str,
    param: &'static str,
    partial: bool,
    points: Vec<CurvePoint>,
}

/// Writes every successful point; failed points are listed on stderr and
/// make the command exit with the solver code.
pub fn curve(cfg: &RunConfig, ctx: &Context, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let (param, points) = match &cfg.geometry {
        Geometry::Tread { approach, .. } => {
            let h_int = tread_h_internal(approach.band_area_fraction, approach.friction_model)?;
            let point = |delta: f64, r: shapeshift::Result<MobilitySample>| match r {
                Ok(s) => CurvePoint {
                    param: delta,
                    h_fluid: Some(s.h_fluid),
                    h_internal: Some(h_int),
                    h_loc: Some(s.h_loc),
                    error: None,
                },
                Err(e) => CurvePoint {
                    param: delta,
                    h_fluid: None,
                    h_internal: None,
                    h_loc: None,
                    error: Some(e.to_string()),
                },
            };
            let pts: Vec<CurvePoint> = match mobility(cfg, ctx)? {
                Ok(c) => c.samples().iter().map(|s| point(s.delta, Ok(*s))).collect(),
                Err(raw) => raw.into_iter().map(|(d, r)| point(d, r)).collect(),
            };
            ("delta", pts)
        }
        Geometry::CurveFile { .. } => {
            let (c, _, _) = shape_curve(cfg, ctx)?;
            let pts = c
                .samples
                .iter()
                .map(|s| CurvePoint {
                    param: s.param,
                    h_fluid: Some(s.h_fluid),
                    h_internal: Some(s.h_internal),
                    h_loc: None,
                    error: None,
                })
                .collect();
            ("f", pts)
        }
        _ => {
            let opts = mesh_options(cfg, ctx)?;
            let pts = shape_points(cfg, &opts)?
                .into_iter()
                .map(|(f, r)| match r {
                    Ok(s) => CurvePoint {
                        param: f,
                        h_fluid: Some(s.h_fluid),
                        h_internal: Some(s.h_internal),
                        h_loc: None,
                        error: None,
                    },
                    Err(e) => CurvePoint {
                        param: f,
                        h_fluid: None,
                        h_internal: None,
                        h_loc: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            ("f", pts)
        }
    };
    let failed: Vec<&CurvePoint> = points.iter().filter(|p| p.error.is_some()).collect();
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            let report = CurveReport {
                geometry: cfg.geometry.label(),
                param,
                partial: !failed.is_empty(),
                points,
            };
            write_json(&report, &mut buf)?;
            emit(out, &buf)?;
            return partial_result(&report.points);
        }
        Format::Csv | Format::Table => {
            let tread = param == "delta";
            let header: &[&str] = if tread {
                &["delta", "h_fluid", "h_internal", "h_loc"]
            } else {
                &["f", "h_fluid", "h_internal"]
            };
            let rows: Vec<Vec<f64>> = points
                .iter()
                .filter(|p| p.error.is_none())
                .map(|p| {
                    let mut row = vec![p.param, p.h_fluid.unwrap_or(f64::NAN), p.h_internal.unwrap_or(f64::NAN)];
                    if tread {
                        row.push(p.h_loc.unwrap_or(f64::NAN));
                    }
                    row
                })
                .collect();
            write_csv(&mut buf, header, &rows)?;
        }
    }
    emit(out, &buf)?;
    partial_result(&points)
}

fn partial_result(points: &[CurvePoint]) -> Result<(), CliError> {
    let failed: Vec<&CurvePoint> = points.iter().filter(|p| p.error.is_some()).collect();
    if failed.is_empty() {
        return Ok(());
    }
    for p in &failed {
        eprintln!("grid point {}: {}", p.param, p.error.as_deref().unwrap_or(""));
    }
    Err(CliError::Partial(format!(
        "partial output: {} of {} grid points failed",
        failed.len(),
        points.len()
    )))
}

#[derive(Debug, Serialize)]
struct OptimizeReport {
    geometry: &'static str,
    scenario: String,
    /// Extension `F`, or radii travelled for the tread sphere.
    extent: f64,
    duration: f64,
    uniform_energy: f64,
    optimal_energy: f64,
    savings: f64,
    uniform_peak_power: f64,
    optimal_power: f64,
    peak_power_ratio: f64,
    rate_ratio: f64,
    profile: String,
}

fn optimize_table(r: &OptimizeReport) -> Table {
    let mut t = Table::new(format!("optimal schedule, {} {}", r.geometry, r.scenario));
    t.row("extent", r.extent, Unit::None)
        .row("T", r.duration, Unit::Millisecond)
        .row("E uniform", r.uniform_energy, Unit::Joule)
        .row("E optimal", r.optimal_energy, Unit::Joule)
        .row("savings", r.savings, Unit::Percent)
        .row("uniform peak power", r.uniform_peak_power, Unit::Picowatt)
        .row("optimal power", r.optimal_power, Unit::Picowatt)
        .row("peak power ratio", r.peak_power_ratio, Unit::None)
        .row("rate ratio", r.rate_ratio, Unit::None);
    t
}

/// Report on stdout; profile `t,f,fdot,power` at `profile_path`. For the
/// tread sphere `f` is the distance travelled in radii.
pub fn optimize(cfg: &RunConfig, ctx: &Context, format: Format, profile_path: &Path) -> Result<(), CliError> {
    let (report, profile) = match &cfg.geometry {
        Geometry::Tread { approach, .. } => {
            let curve = mobility_curve(cfg, ctx)?;
            let params = ApproachParams {
                radius: approach.radius,
                v_tread: approach.v_tread,
                fluid: approach.fluid.clone(),
                k_friction: approach.k_friction,
                h_internal: tread_h_internal(approach.band_area_fraction, approach.friction_model)?,
            };
            let delta1 = stopping_distance(curve.case, approach.radius, approach.gap)?;
            let run = integrate_approach(&curve, approach.delta0, delta1, &params)?;
            let extent = approach.delta0 - delta1;
            let k = tread_cost(&curve, approach.delta0, &params);
            let sched = shapeshift::aggregation::optimal_tread_schedule(
                &curve,
                approach.delta0,
                delta1,
                run.duration,
                &params,
            )?;
            let uniform_peak = run
                .trace
                .iter()
                .map(|p| p.fluid_power + p.internal_power)
                .fold(0.0, f64::max);
            let optimal_power = sched.optimal_energy / run.duration;
            let profile = optimal_profile(&k, extent, run.duration, PROFILE_POINTS)?;
            let report = OptimizeReport {
                geometry: "tread-sphere",
                scenario: approach.fluid.name.clone(),
                extent,
                duration: run.duration,
                uniform_energy: sched.uniform_energy,
                optimal_energy: sched.optimal_energy,
                savings: sched.savings,
                uniform_peak_power: uniform_peak,
                optimal_power,
                peak_power_ratio: optimal_power / uniform_peak,
                rate_ratio: (k(extent) / k(0.0)).sqrt(),
                profile: profile_path.display().to_string(),
            };
            (report, profile)
        }
        geometry => {
            let (curve, size, conversion) = shape_curve(cfg, ctx)?;
            let case = &cfg.shape_change;
            let k = assemble_cost(&curve, case.fluid.dynamic_viscosity, size, case.k_friction, conversion)?;
            let cmp = compare_schedules(&k, case.extent, case.duration)?;
            let profile = optimal_profile(&k, case.extent, case.duration, PROFILE_POINTS)?;
            let report = OptimizeReport {
                geometry: geometry.label(),
                scenario: case.fluid.name.clone(),
                extent: case.extent,
                duration: case.duration,
                uniform_energy: cmp.uniform_energy,
                optimal_energy: cmp.optimal_energy,
                savings: cmp.savings,
                uniform_peak_power: cmp.uniform_peak_power,
                optimal_power: cmp.optimal_power,
                peak_power_ratio: cmp.optimal_power / cmp.uniform_peak_power,
                rate_ratio: cmp.rate_ratio,
                profile: profile_path.display().to_string(),
            };
            (report, profile)
        }
    };
    let mut csv = Vec::new();
    profile.write_csv(&mut csv)?;
    std::fs::write(profile_path, csv)?;
    emit(None, &render(&optimize_table(&report), &report, format)?)
}

#[derive(Debug, Serialize)]
struct ValidationReport<'a> {
    passed: bool,
    checks: &'a [Check],
}

pub fn validate(settings: &SolverSettings, study: ConvergenceStudy, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let checks = run_all(settings, study)?;
    let passed = checks.iter().all(|c| c.passed);
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json(&ValidationReport { passed, checks: &checks }, &mut buf)?,
        Format::Csv => {
            writeln!(buf, "name,observed,expected,tolerance,passed")?;
            for c in &checks {
                writeln!(
                    buf,
                    "{},{},{},{},{}",
                    c.name.replace(',', ";"),
                    crate::output::full(c.observed),
                    crate::output::full(c.expected),
                    crate::output::full(c.tolerance),
                    c.passed
                )?;
            }
        }
        Format::Table => {
            for c in &checks {
                writeln!(
                    buf,
                    "{}  {}: observed {:.6e}, expected {:.6e}, tolerance {:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.observed,
                    c.expected,
                    c.tolerance
                )?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            writeln!(buf, "{} checks, {} failed", checks.len(), failed)?;
        }
    }
    emit(out, &buf)?;
    if passed {
        Ok(())
    } else {
        let names: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Validation(names.join("; ")))
    }
}
