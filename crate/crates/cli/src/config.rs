//! Run configuration read from TOML.
//!
//! Every physical value is SI. Exactly one geometry block
//! (`[expanding]`, `[probe]`, `[tread-sphere]` or `[curve-file]`) must be
//! present; unknown keys are rejected with their line and column.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer};
use serde::Deserialize;

use shapeshift::friction::{tread_h_internal, TreadFrictionModel};
use shapeshift::geometry::{ApproachCase, ExpandingRobotSpec, MeshOptions, ProbeSpec, TreadSphereSpec};
use shapeshift::scenarios::FluidScenario;
use shapeshift::sweep::F_MIN;
use shapeshift::tables::{ApproachCaseConfig, ShapeChangeCase};

use crate::error::CliError;

/// Text shown by `--help`.
pub const CONFIG_HELP: &str = "\
CONFIG FILE (TOML, SI units)

  scenario = \"low\"            low (water-like, 1 ms shape change, 1 mm/s tread)
                              high (viscous, 1 s shape change, 10 µm/s tread)
                              custom (requires [fluid])
  k_friction = 1000.0         sliding friction constant, kg/(m² s)

  [fluid]                     only with scenario = \"custom\"
  name = \"plasma\"
  density = 1000.0            kg/m³
  viscosity = 1e-3            dynamic viscosity, Pa s

One geometry block:

  [expanding]                 cylinder with telescoping cones on both ends
  length = 1e-6               segment length L, m
  segments = 5                n
  inner_radius = 0.75e-6      innermost segment radius r, m
  extent = 0.5                final extension F, in (0, 1]
  duration = 1e-3             time for the change, s (defaults by scenario)

  [probe]                     telescoping probe on a spherical body
  length, segments, inner_radius, extent, duration as above
  thickness = 20e-9           segment wall thickness s, m
  body_radius = 1e-6          body sphere radius, m
  sensitivity_radii = [0.5e-6, 1e-6, 2e-6]   body radii re-run by scenario-table, m

  [tread-sphere]              treadmill sphere approaching a wall or its mirror image
  case = \"wall\"               wall | two-spheres
  radius = 1e-6               sphere radius a, m
  band_area_fraction = 0.5    share of the surface covered by the tread, in (0, 1)
  ramp_width = 50e-9          arclength of the slip ramp at each band edge, m
  v_tread = 1e-3              tread speed, m/s (defaults by scenario)
  delta0 = 5.0                starting centre distance over radius
  gap = 50e-9                 surface gap at which the approach stops, m
  friction_model = \"calibrated\"   calibrated | band-only
  h_internal = 19.6           internal coefficient for the calibrated model

  [curve-file]                precomputed param,h_fluid,h_internal CSV
  path = \"curve.csv\"          relative to the config file
  size = 1e-6                 characteristic size d0, m
  conversion = 5e-6           tip speed per unit extension rate, m
  extent, duration as above

  [solver]
  refine = 1.0                panel refinement factor (2 halves every panel)
  refine_target = 2e-3        optional relative power change that ends refinement
  wall_radius = 30.0          wall disc radius in sphere radii
  grid_points = 13            sweep points (default 13 in f, 16 in delta)
  f_min = 0.02                smallest extension solved
  delta_min = 1.02            mobility curve range in delta
  delta_max = 8.0

  [output]
  path = \"out.json\"           default for --out
  format = \"table\"            csv | json | table
";

#[derive(Debug, Clone, Copy, PartialEq)]
struct Positive(f64);

impl<'de> de::Deserialize<'de> for Positive {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if v > 0.0 && v.is_finite() {
            Ok(Positive(v))
        } else {
            Err(de::Error::custom(format!("must be a positive finite number, got {v}")))
        }
    }
}

/// Open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Fraction(f64);

impl<'de> de::Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if v > 0.0 && v < 1.0 {
            Ok(Fraction(v))
        } else {
            Err(de::Error::custom(format!("must lie strictly between 0 and 1, got {v}")))
        }
    }
}

/// Half-open interval (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
struct Extent(f64);

impl<'de> de::Deserialize<'de> for Extent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if v > 0.0 && v <= 1.0 {
            Ok(Extent(v))
        } else {
            Err(de::Error::custom(format!("must lie in (0, 1], got {v}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ScenarioName {
    Low,
    High,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<ScenarioName>,
    k_friction: Option<Positive>,
    fluid: Option<RawFluid>,
    expanding: Option<RawExpanding>,
    probe: Option<RawProbe>,
    #[serde(rename = "tread-sphere")]
    tread_sphere: Option<RawTread>,
    #[serde(rename = "curve-file")]
    curve_file: Option<RawCurveFile>,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFluid {
    name: Option<String>,
    density: Positive,
    viscosity: Positive,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpanding {
    length: Positive,
    segments: usize,
    inner_radius: Positive,
    extent: Option<Extent>,
    duration: Option<Positive>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbe {
    length: Positive,
    segments: usize,
    inner_radius: Positive,
    thickness: Positive,
    body_radius: Positive,
    extent: Option<Extent>,
    duration: Option<Positive>,
    sensitivity_radii: Option<Vec<Positive>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTread {
    case: Option<ApproachCase>,
    radius: Positive,
    band_area_fraction: Fraction,
    ramp_width: Positive,
    v_tread: Option<Positive>,
    delta0: Positive,
    gap: Positive,
    friction_model: Option<String>,
    h_internal: Option<Positive>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurveFile {
    path: PathBuf,
    size: Positive,
    conversion: Positive,
    extent: Option<Extent>,
    duration: Option<Positive>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    refine: Option<Positive>,
    refine_target: Option<Positive>,
    wall_radius: Option<Positive>,
    grid_points: Option<usize>,
    f_min: Option<Extent>,
    delta_min: Option<Positive>,
    delta_max: Option<Positive>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

/// Shape change sized by `size` with tip speed `conversion · ḟ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Expanding(ExpandingRobotSpec),
    Probe {
        spec: ProbeSpec,
        sensitivity_radii: Vec<f64>,
    },
    Tread {
        template: TreadSphereSpec,
        approach: ApproachCaseConfig,
    },
    CurveFile {
        path: PathBuf,
        size: f64,
        conversion: f64,
    },
}

impl Geometry {
    pub fn label(&self) -> &'static str {
        match self {
            Geometry::Expanding(_) => "expanding",
            Geometry::Probe { .. } => "probe",
            Geometry::Tread { .. } => "tread-sphere",
            Geometry::CurveFile { .. } => "curve-file",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mesh: MeshOptions,
    pub refine_target: Option<f64>,
    pub grid_points: usize,
    pub f_min: f64,
    pub delta_min: f64,
    pub delta_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fluid: FluidScenario,
    pub k_friction: f64,
    pub geometry: Geometry,
    /// Extension target and duration; unused by the tread sphere.
    pub shape_change: ShapeChangeCase,
    pub solver: SolverConfig,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// `base` resolves relative paths inside the file.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        resolve(raw, base)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Table => "table",
        })
    }
}

fn bad(key: &str, reason: impl fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {reason}"))
}

fn resolve(raw: RawConfig, base: &Path) -> Result<RunConfig, CliError> {
    let blocks = [
        raw.expanding.is_some(),
        raw.probe.is_some(),
        raw.tread_sphere.is_some(),
        raw.curve_file.is_some(),
    ];
    match blocks.iter().filter(|&&b| b).count() {
        1 => {}
        0 => {
            return Err(CliError::Config(
                "no geometry block; add one of [expanding], [probe], [tread-sphere], [curve-file]".into(),
            ))
        }
        _ => return Err(CliError::Config("exactly one geometry block is allowed per run".into())),
    }

    let scenario = raw.scenario.unwrap_or(ScenarioName::Low);
    let fluid = match (scenario, raw.fluid) {
        (ScenarioName::Custom, Some(f)) => {
            FluidScenario::new(f.name.unwrap_or_else(|| "custom".into()), f.density.0, f.viscosity.0)
                .map_err(|e| bad("fluid", e))?
        }
        (ScenarioName::Custom, None) => return Err(bad("scenario", "\"custom\" requires a [fluid] block")),
        (_, Some(_)) => return Err(bad("fluid", "only allowed with scenario = \"custom\"")),
        (ScenarioName::Low, None) => FluidScenario::low(),
        (ScenarioName::High, None) => FluidScenario::high(),
    };
    let preset = match scenario {
        ScenarioName::Low => Some((ShapeChangeCase::low(), ApproachCaseConfig::low())),
        ScenarioName::High => Some((ShapeChangeCase::high(), ApproachCaseConfig::high())),
        ScenarioName::Custom => None,
    };
    let k_friction = raw.k_friction.map_or(1e3, |k| k.0);

    let duration_for = |key: &str, d: Option<Positive>| -> Result<f64, CliError> {
        match (d, &preset) {
            (Some(d), _) => Ok(d.0),
            (None, Some((c, _))) => Ok(c.duration),
            (None, None) => Err(bad(key, "required when scenario = \"custom\"")),
        }
    };

    let mut extent = 0.5;
    let mut duration = f64::NAN;
    let geometry = if let Some(e) = raw.expanding {
        extent = e.extent.map_or(0.5, |x| x.0);
        duration = duration_for("expanding.duration", e.duration)?;
        let spec = ExpandingRobotSpec::new(e.length.0, e.segments, e.inner_radius.0, extent / duration)
            .map_err(|err| bad("expanding", err))?;
        Geometry::Expanding(spec)
    } else if let Some(p) = raw.probe {
        extent = p.extent.map_or(0.5, |x| x.0);
        duration = duration_for("probe.duration", p.duration)?;
        let spec = ProbeSpec {
            length: p.length.0,
            segments: p.segments,
            inner_radius: p.inner_radius.0,
            thickness: p.thickness.0,
            body_radius: p.body_radius.0,
            fdot: extent / duration,
        };
        spec.validate().map_err(|err| bad("probe", err))?;
        let sensitivity_radii = match p.sensitivity_radii {
            Some(v) => v.into_iter().map(|r| r.0).collect(),
            None => vec![0.5 * spec.body_radius, spec.body_radius, 2.0 * spec.body_radius],
        };
        Geometry::Probe { spec, sensitivity_radii }
    } else if let Some(t) = raw.tread_sphere {
        let v_tread = match (t.v_tread, &preset) {
            (Some(v), _) => v.0,
            (None, Some((_, a))) => a.v_tread,
            (None, None) => return Err(bad("tread-sphere.v_tread", "required when scenario = \"custom\"")),
        };
        let friction_model = match (t.friction_model.as_deref().unwrap_or("calibrated"), t.h_internal) {
            ("calibrated", Some(h)) => TreadFrictionModel::Calibrated(h.0),
            ("band-only", Some(_)) => {
                return Err(bad("tread-sphere.h_internal", "only used by the calibrated friction model"))
            }
            (name, None) => name.parse().map_err(|e| bad("tread-sphere.friction_model", e))?,
            (name, Some(_)) => return Err(bad("tread-sphere.friction_model", format!("unknown model `{name}`"))),
        };
        tread_h_internal(t.band_area_fraction.0, friction_model).map_err(|e| bad("tread-sphere", e))?;
        let template = TreadSphereSpec {
            radius: t.radius.0,
            band_area_fraction: t.band_area_fraction.0,
            ramp_width: t.ramp_width.0,
            v_tread,
            case: t.case.unwrap_or(ApproachCase::Wall),
            delta: t.delta0.0,
        };
        template.validate().map_err(|e| bad("tread-sphere", e))?;
        let approach = ApproachCaseConfig {
            fluid: fluid.clone(),
            radius: t.radius.0,
            v_tread,
            delta0: t.delta0.0,
            gap: t.gap.0,
            k_friction,
            friction_model,
            band_area_fraction: t.band_area_fraction.0,
        };
        Geometry::Tread { template, approach }
    } else if let Some(c) = raw.curve_file {
        extent = c.extent.map_or(0.5, |x| x.0);
        duration = duration_for("curve-file.duration", c.duration)?;
        Geometry::CurveFile {
            path: base.join(c.path),
            size: c.size.0,
            conversion: c.conversion.0,
        }
    } else {
        unreachable!("one block checked above")
    };

    let tread = matches!(geometry, Geometry::Tread { .. });
    let s = raw.solver;
    let solver = SolverConfig {
        mesh: MeshOptions {
            refine: s.refine.map_or(1.0, |r| r.0),
            wall_radius: s.wall_radius.map_or(30.0, |r| r.0),
        },
        refine_target: s.refine_target.map(|t| t.0),
        grid_points: s.grid_points.unwrap_or(if tread { 16 } else { 13 }),
        f_min: s.f_min.map_or(F_MIN, |f| f.0),
        delta_min: s.delta_min.map_or(1.02, |d| d.0),
        delta_max: s.delta_max.map_or(8.0, |d| d.0),
    };
    if solver.grid_points < 2 {
        return Err(bad("solver.grid_points", "need at least 2"));
    }
    if !tread && solver.f_min >= extent {
        return Err(bad("solver.f_min", format!("must be below the extent {extent}")));
    }
    if !(solver.delta_min > 1.0 && solver.delta_max > solver.delta_min) {
        return Err(bad("solver.delta_min", "need 1 < delta_min < delta_max"));
    }
    if let Geometry::Tread { template, approach } = &geometry {
        if approach.delta0 > solver.delta_max {
            return Err(bad("tread-sphere.delta0", format!("exceeds solver.delta_max = {}", solver.delta_max)));
        }
        let stop = shapeshift::aggregation::stopping_distance(template.case, approach.radius, approach.gap)
            .map_err(|e| bad("tread-sphere.gap", e))?;
        if stop < solver.delta_min || stop >= approach.delta0 {
            return Err(bad(
                "tread-sphere.gap",
                format!("stopping distance {stop} must lie in [solver.delta_min, delta0)"),
            ));
        }
    }

    let shape_change = ShapeChangeCase {
        fluid: fluid.clone(),
        extent,
        duration,
        k_friction,
    };
    Ok(RunConfig {
        fluid,
        k_friction,
        geometry,
        shape_change,
        solver,
        output_path: raw.output.path.map(|p| base.join(p)),
        format: raw.output.format,
    })
}
