//! Oracle checks of the boundary-element solver against analytic results.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bem::kernel::{Point, Velocity};
use crate::bem::mesh::{mesh_bodies, BodyKind, Part, Primitive, RingMesh, SizeField, SurfaceVelocityBC};
use crate::bem::solver::{assemble_and_solve, cross_power, refine_until, solve_force_free, SolverSettings};
use crate::error::{Error, Result};
use crate::geometry::{tread_sphere_mesh, ApproachCase, MeshOptions, TreadSphereSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    /// Allowed relative deviation.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn relative(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        let passed = ((observed - expected) / expected).abs() <= tolerance;
        Check {
            name: name.into(),
            observed,
            expected,
            tolerance,
            passed,
        }
    }
}

/// Unit sphere meshed with `panels` equal arcs.
pub fn unit_sphere(panels: usize) -> Result<RingMesh> {
    let arc = Primitive::Arc {
        center: 0.0,
        radius: 1.0,
        from: 0.0,
        to: PI,
    };
    Ok(mesh_bodies(&[(BodyKind::Closed, vec![Part::new(arc).min_panels(panels)])], &SizeField::uniform(10.0))?.mesh)
}

/// Drag on a towed unit sphere relative to `6πηaU`.
pub fn sphere_drag(panels: usize, settings: &SolverSettings) -> Result<(f64, f64)> {
    let m = unit_sphere(panels)?;
    let bc = SurfaceVelocityBC::rigid(&m, &[0], Velocity { z: 1.0, s: 0.0 });
    let sol = assemble_and_solve(&m, &bc, settings)?;
    let stokes = 6.0 * PI * settings.viscosity;
    Ok((-sol.net_axial_force[0] / stokes, sol.dissipated_power / stokes))
}

/// Force-free speed and power of a squirmer with slip `B1 sinθ`, `B1 = 1`.
pub fn squirmer(panels: usize, settings: &SolverSettings) -> Result<(f64, f64)> {
    let m = unit_sphere(panels)?;
    let bc = SurfaceVelocityBC::from_fn(&m, |_, _, p| {
        let th = p.s.atan2(p.z);
        let (c, s) = (th.cos(), th.sin());
        Velocity { z: -s * s, s: s * c }
    });
    let (u, sol) = solve_force_free(&m, &bc, &[0], settings)?;
    Ok((u[0], sol.dissipated_power))
}

/// Exact resistance factor of a sphere translating normal to a plane wall,
/// `δ` = center distance over radius.
pub fn wall_correction(delta: f64) -> f64 {
    let alpha = delta.acosh();
    let mut sum = 0.0;
    for n in 1..400 {
        let nf = n as f64;
        let k = 2.0 * nf + 1.0;
        let num = 2.0 * (k * alpha).sinh() + k * (2.0 * alpha).sinh();
        let den = 4.0 * ((nf + 0.5) * alpha).sinh().powi(2) - (k * alpha.sinh()).powi(2);
        let term = nf * (nf + 1.0) / ((2.0 * nf - 1.0) * (2.0 * nf + 3.0)) * (num / den - 1.0);
        if !term.is_finite() {
            break;
        }
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    4.0 / 3.0 * alpha.sinh() * sum
}

fn still_sphere(delta: f64, refine: f64) -> Result<RingMesh> {
    let spec = TreadSphereSpec {
        radius: 1.0,
        band_area_fraction: 0.5,
        ramp_width: 0.05,
        v_tread: 0.0,
        case: ApproachCase::Wall,
        delta,
    };
    let opts = MeshOptions {
        refine,
        ..MeshOptions::default()
    };
    Ok(tread_sphere_mesh(&spec, &opts)?.mesh)
}

/// BEM drag factor of a sphere towed toward a wall.
pub fn wall_drag(delta: f64, settings: &SolverSettings) -> Result<f64> {
    let m = still_sphere(delta, 1.0)?;
    let bc = SurfaceVelocityBC::rigid(&m, &[0], Velocity { z: 1.0, s: 0.0 });
    let sol = assemble_and_solve(&m, &bc, settings)?;
    Ok(-sol.net_axial_force[0] / (6.0 * PI * settings.viscosity))
}

/// Relative asymmetry `|∫u1·t2 - ∫u2·t1| / max` for a towed and a
/// radially expanding sphere near a wall.
pub fn reciprocity_defect(settings: &SolverSettings) -> Result<f64> {
    let m = still_sphere(1.5, 1.0)?;
    let tow = SurfaceVelocityBC::rigid(&m, &[0], Velocity { z: 1.0, s: 0.0 });
    let center = Point::new(-1.5, 0.0);
    let swell = SurfaceVelocityBC::from_fn(&m, |e, _, p| {
        if m.elements()[e].body == 0 {
            let (dz, ds) = (p.z - center.z, p.s - center.s);
            let r = (dz * dz + ds * ds).sqrt();
            Velocity { z: dz / r, s: ds / r }
        } else {
            Velocity { z: 0.0, s: 0.0 }
        }
    });
    let s1 = assemble_and_solve(&m, &tow, settings)?;
    let s2 = assemble_and_solve(&m, &swell, settings)?;
    let a = cross_power(&m, &tow, &s2);
    let b = cross_power(&m, &swell, &s1);
    Ok((a - b).abs() / a.abs().max(b.abs()))
}

/// Reciprocity defect allowed at the default discretization.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-3;

/// Refines a wall-towing mesh from `start` until successive powers agree to
/// `target`; returns the element count or `NonConvergence`.
pub fn wall_convergence(start: f64, target: f64, max_levels: usize, settings: &SolverSettings) -> Result<usize> {
    let family = |level: usize| {
        let m = still_sphere(1.2, start * 2f64.powi(level as i32))?;
        let bc = SurfaceVelocityBC::rigid(&m, &[0], Velocity { z: 1.0, s: 0.0 });
        Ok(crate::bem::solver::Problem {
            mesh: m,
            bc,
            free_bodies: Vec::new(),
        })
    };
    Ok(refine_until(family, settings, target, max_levels)?.elements)
}

/// Start and depth of the refinement study in [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceStudy {
    /// Mesh refine factor of the first level.
    pub start: f64,
    pub target: f64,
    pub max_levels: usize,
}

impl Default for ConvergenceStudy {
    fn default() -> Self {
        ConvergenceStudy {
            start: 0.5,
            target: 2e-3,
            max_levels: 5,
        }
    }
}

/// Every oracle.
pub fn run_all(settings: &SolverSettings, study: ConvergenceStudy) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (drag, power) = sphere_drag(128, settings)?;
    out.push(Check::relative("towed sphere drag / 6πηaU", drag, 1.0, 0.01));
    out.push(Check::relative("towed sphere power / 6πηaU²", power, 1.0, 0.01));
    let (u, p) = squirmer(128, settings)?;
    out.push(Check::relative("squirmer speed", u, 2.0 / 3.0, 0.02));
    out.push(Check::relative("squirmer power", p, 16.0 * PI * settings.viscosity / 3.0, 0.02));
    for delta in [1.1, 1.5, 2.0, 3.0, 5.0] {
        out.push(Check::relative(
            format!("wall drag factor at δ = {delta}"),
            wall_drag(delta, settings)?,
            wall_correction(delta),
            0.03,
        ));
    }
    let defect = reciprocity_defect(settings)?;
    out.push(Check {
        name: "reciprocity defect".into(),
        observed: defect,
        expected: 0.0,
        tolerance: RECIPROCITY_TOLERANCE,
        passed: defect <= RECIPROCITY_TOLERANCE,
    });
    let converged = match wall_convergence(study.start, study.target, study.max_levels, settings) {
        Ok(n) => n as f64,
        Err(Error::NonConvergence { .. }) => f64::NAN,
        Err(e) => return Err(e),
    };
    out.push(Check {
        name: format!("wall towing power converges to {:e} under refinement (elements)", study.target),
        observed: converged,
        expected: converged,
        tolerance: study.target,
        passed: converged.is_finite(),
    });
    Ok(out)
}
