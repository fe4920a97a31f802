//! Dissipation curves `h_fluid(f)`, `h_internal(f)` for the expanding robot
//! and the telescoping probe, one BEM solve per extension sample.

use rayon::prelude::*;

use crate::bem::solver::{Problem, SolverSettings};
use crate::error::{Error, Result};
use crate::friction::{expanding_h_internal, probe_h_internal};
use crate::geometry::{expanding_robot_mesh, h_fluid_from_solution, probe_mesh, ExpandingRobotSpec, MeshOptions, ProbeSpec};
use crate::profile::{CurveSample, DissipationCurve};
use crate::real::Real;

/// Smallest extension that is meshed; below it curves are extrapolated.
pub const F_MIN: f64 = 0.02;

/// `n` evenly spaced extensions from `f_min` to `f_max`.
pub fn extension_grid<T: Real>(f_min: T, f_max: T, n: usize) -> Result<Vec<T>> {
    if !(f_min > T::zero() && f_max > f_min && f_max <= T::one()) || n < 2 {
        return Err(Error::param("extension_grid", "need 0 < f_min < f_max ≤ 1 and n ≥ 2"));
    }
    let step = (f_max - f_min) / T::lit((n - 1) as f64);
    Ok((0..n).map(|i| f_min + step * T::lit(i as f64)).collect())
}

fn sample<T: Real>(
    problem: Problem<T>,
    f: T,
    size: T,
    speed: T,
    h_internal: T,
    settings: &SolverSettings<T>,
) -> Result<CurveSample<T>> {
    if !(speed > T::zero()) {
        return Err(Error::param("fdot", "curve sweeps need a positive extension rate"));
    }
    let sol = problem.solve(settings)?;
    Ok(CurveSample {
        param: f,
        h_fluid: h_fluid_from_solution(sol.dissipated_power, settings.viscosity, size, speed)?,
        h_internal,
    })
}

/// One solve of the expanding robot at extension `f`; `d0 = L`, `v0 = n L ḟ`.
pub fn expanding_sample<T: Real>(
    spec: &ExpandingRobotSpec<T>,
    f: T,
    opts: &MeshOptions<T>,
    settings: &SolverSettings<T>,
) -> Result<CurveSample<T>> {
    let h = expanding_h_internal(spec.segments, spec.r_over_l(), f);
    sample(expanding_robot_mesh(spec, f, opts)?, f, spec.length, spec.tip_speed(), h, settings)
}

/// One solve of the probe at extension `f`; `d0 = L`, `v0 = (n-1) L ḟ`.
pub fn probe_sample<T: Real>(
    spec: &ProbeSpec<T>,
    f: T,
    opts: &MeshOptions<T>,
    settings: &SolverSettings<T>,
) -> Result<CurveSample<T>> {
    let h = probe_h_internal(spec.segments, spec.r_over_l(), spec.s_over_l(), f)?;
    sample(probe_mesh(spec, f, opts)?, f, spec.length, spec.tip_speed(), h, settings)
}

pub fn expanding_curve<T: Real>(
    spec: &ExpandingRobotSpec<T>,
    grid: &[T],
    opts: &MeshOptions<T>,
    settings: &SolverSettings<T>,
) -> Result<DissipationCurve<T>> {
    let samples = grid
        .par_iter()
        .map(|&f| expanding_sample(spec, f, opts, settings))
        .collect::<Result<Vec<_>>>()?;
    DissipationCurve::new("expanding", samples)
}

pub fn probe_curve<T: Real>(
    spec: &ProbeSpec<T>,
    grid: &[T],
    opts: &MeshOptions<T>,
    settings: &SolverSettings<T>,
) -> Result<DissipationCurve<T>> {
    let samples = grid
        .par_iter()
        .map(|&f| probe_sample(spec, f, opts, settings))
        .collect::<Result<Vec<_>>>()?;
    DissipationCurve::new("probe", samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_spacing() {
        let g = extension_grid(0.02, 0.5, 9).unwrap();
        assert_eq!(g.len(), 9);
        assert!((g[0] - 0.02f64).abs() < 1e-15 && (g[8] - 0.5f64).abs() < 1e-15);
        assert!((g[1] - g[0] - 0.06f64).abs() < 1e-14);
        assert!(extension_grid(0.0, 0.5, 9).is_err());
        assert!(extension_grid(0.3, 0.2, 9).is_err());
        assert!(extension_grid(0.1, 0.2f64, 1).is_err());
    }

    #[test]
    fn internal_column_is_closed_form() {
        let spec = ExpandingRobotSpec::new(1.0, 5, 0.75, 1.0).unwrap();
        let c = expanding_curve(&spec, &[0.1, 0.3], &MeshOptions::default(), &SolverSettings::new(1.0)).unwrap();
        for s in &c.samples {
            assert_eq!(s.h_internal, expanding_h_internal(5, 0.75, s.param));
            assert!(s.h_fluid > 10.0 && s.h_fluid < 40.0);
        }
        let still = ExpandingRobotSpec { fdot: 0.0, ..spec };
        assert!(expanding_curve(&still, &[0.1], &MeshOptions::default(), &SolverSettings::new(1.0)).is_err());
    }
}
