//! Treadmill spheres approaching a wall or each other: mobility curves,
//! approach time and energy, and the minimum-energy tread schedule.
//!
//! With `δ = L/a` the sphere moves as `dδ/dt = -h_loc(δ) v / a`, so
//! `T = (a/v) ∫ dδ / h_loc`. Curves are interpolated in `ln(δ - 1)`.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bem::solver::SolverSettings;
use crate::error::{Error, Result};
use crate::geometry::{tread_sphere_mesh, ApproachCase, MeshOptions, TreadSphereSpec};
use crate::numerics::interp::MonotoneCubic;
use crate::numerics::ode::{integrate_until, OdeOptions};
use crate::numerics::quadrature::integrate;
use crate::profile::{full, optimal_energy, QUADRATURE_TOLERANCE};
use crate::real::Real;
use crate::scenarios::FluidScenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilitySample<T = f64> {
    pub delta: T,
    pub h_loc: T,
    pub h_fluid: T,
}

/// Per-sphere locomotion and dissipation coefficients versus δ.
#[derive(Debug, Clone)]
pub struct MobilityCurve<T = f64> {
    pub case: ApproachCase,
    samples: Vec<MobilitySample<T>>,
    loc: MonotoneCubic<T>,
    fluid: MonotoneCubic<T>,
}

impl<T: Real> MobilityCurve<T> {
    pub fn new(case: ApproachCase, mut samples: Vec<MobilitySample<T>>) -> Result<Self> {
        samples.sort_by(|a, b| a.delta.partial_cmp(&b.delta).unwrap_or(std::cmp::Ordering::Equal));
        if samples.len() < 2 {
            return Err(Error::InvalidCurve("mobility curve needs at least two samples".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].delta > w[0].delta) {
                return Err(Error::InvalidCurve("repeated delta".into()));
            }
        }
        for s in &samples {
            if !(s.delta > T::one()) {
                return Err(Error::InvalidCurve(format!("delta {} not above contact", s.delta)));
            }
            if !(s.h_loc > T::zero() && s.h_loc < T::one()) {
                return Err(Error::NonPositiveMobility {
                    delta: s.delta.as_f64(),
                    value: s.h_loc.as_f64(),
                });
            }
            if !(s.h_fluid > T::zero()) {
                return Err(Error::InvalidCurve(format!("h_fluid {} not positive", s.h_fluid)));
            }
        }
        let xs: Vec<T> = samples.iter().map(|s| (s.delta - T::one()).ln()).collect();
        let loc = MonotoneCubic::new(xs.clone(), samples.iter().map(|s| s.h_loc).collect())?;
        let fluid = MonotoneCubic::new(xs, samples.iter().map(|s| s.h_fluid).collect())?;
        Ok(MobilityCurve {
            case,
            samples,
            loc,
            fluid,
        })
    }

    pub fn samples(&self) -> &[MobilitySample<T>] {
        &self.samples
    }

    pub fn delta_min(&self) -> T {
        self.samples[0].delta
    }

    pub fn delta_max(&self) -> T {
        self.samples[self.samples.len() - 1].delta
    }

    fn check(&self, delta: T) -> Result<T> {
        let tol = T::lit(1e-12) * delta;
        if delta < self.delta_min() - tol || delta > self.delta_max() + tol {
            return Err(Error::OutsideSupport {
                delta: delta.as_f64(),
                min: self.delta_min().as_f64(),
                max: self.delta_max().as_f64(),
            });
        }
        Ok((delta - T::one()).ln())
    }

    pub fn h_loc(&self, delta: T) -> Result<T> {
        Ok(self.loc.eval(self.check(delta)?))
    }

    pub fn h_fluid(&self, delta: T) -> Result<T> {
        Ok(self.fluid.eval(self.check(delta)?))
    }

    /// Interpolants without the support check; callers guarantee range.
    fn raw(&self, delta: T) -> (T, T) {
        let x = (delta - T::one()).ln();
        (self.loc.eval(x), self.fluid.eval(x))
    }

    /// Columns `delta,h_loc,h_fluid`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["delta", "h_loc", "h_fluid"])?;
        for s in &self.samples {
            w.write_record([full(s.delta), full(s.h_loc), full(s.h_fluid)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(case: ApproachCase, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["delta", "h_loc", "h_fluid"] {
            return Err(Error::InvalidCurve(format!("unexpected header {headers:?}")));
        }
        let mut samples = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<T> {
                rec.get(i)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .map(T::lit)
                    .ok_or_else(|| Error::InvalidCurve(format!("bad number in row {:?}", rec)))
            };
            samples.push(MobilitySample {
                delta: num(0)?,
                h_loc: num(1)?,
                h_fluid: num(2)?,
            });
        }
        Self::new(case, samples)
    }
}

/// `n` values of δ with `δ - 1` geometric between the ends.
pub fn delta_grid<T: Real>(min: T, max: T, n: usize) -> Result<Vec<T>> {
    if !(min > T::one() && max > min) || n < 2 {
        return Err(Error::param("delta_grid", "need 1 < min < max and n ≥ 2"));
    }
    let (lo, hi) = ((min - T::one()).ln(), (max - T::one()).ln());
    Ok((0..n)
        .map(|k| T::one() + (lo + (hi - lo) * T::lit(k as f64) / T::lit((n - 1) as f64)).exp())
        .collect())
}

/// Force-free solve at each δ; reports per-sphere `h_loc = U/v` and
/// `h_fluid = P/(η a v²)`.
pub fn mobility_curve<T: Real>(
    template: &TreadSphereSpec<T>,
    grid: &[T],
    opts: &MeshOptions<T>,
    settings: &SolverSettings<T>,
) -> Result<MobilityCurve<T>> {
    let samples = grid
        .par_iter()
        .map(|&delta| mobility_sample(&TreadSphereSpec { delta, ..*template }, opts, settings))
        .collect::<Result<Vec<_>>>()?;
    MobilityCurve::new(template.case, samples)
}

pub fn mobility_sample<T: Real>(
    spec: &TreadSphereSpec<T>,
    opts: &MeshOptions<T>,
    settings: &SolverSettings<T>,
) -> Result<MobilitySample<T>> {
    let problem = tread_sphere_mesh(spec, opts)?;
    let sol = problem.solve(settings)?;
    let spheres = T::lit(problem.free_bodies.len() as f64);
    let v = spec.v_tread;
    if !(v > T::zero()) {
        return Err(Error::param("v_tread", "mobility needs a moving tread"));
    }
    let u = sol.speed_of(0).unwrap_or_else(T::zero);
    Ok(MobilitySample {
        delta: spec.delta,
        h_loc: u / v,
        h_fluid: sol.dissipated_power / spheres / (settings.viscosity * spec.radius * v * v),
    })
}

/// `δ1 = 1 + gap/a` at a wall, `1 + gap/(2a)` between two spheres.
pub fn stopping_distance<T: Real>(case: ApproachCase, radius: T, gap: T) -> Result<T> {
    if !(gap > T::zero()) || !(radius > T::zero()) {
        return Err(Error::param("gap", "gap and radius must be positive"));
    }
    Ok(match case {
        ApproachCase::Wall => T::one() + gap / radius,
        ApproachCase::TwoSpheres => T::one() + gap / (T::lit(2.0) * radius),
    })
}

/// Physical inputs of an approach.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproachParams<T = f64> {
    pub radius: T,
    pub v_tread: T,
    pub fluid: FluidScenario<T>,
    pub k_friction: T,
    pub h_internal: T,
}

impl<T: Real> ApproachParams<T> {
    fn validate(&self) -> Result<()> {
        if !(self.radius > T::zero()) || !(self.v_tread > T::zero()) {
            return Err(Error::param("v_tread", "radius and tread speed must be positive"));
        }
        if !(self.k_friction >= T::zero() && self.h_internal >= T::zero()) {
            return Err(Error::param("k_friction", "internal dissipation must be nonnegative"));
        }
        Ok(())
    }

    /// `η a h_fluid + k a² h_int`: power over v_tread².
    fn power_coefficient(&self, h_fluid: T) -> (T, T) {
        let a = self.radius;
        (
            self.fluid.dynamic_viscosity * a * h_fluid,
            self.k_friction * a * a * self.h_internal,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint<T = f64> {
    pub t: T,
    pub delta: T,
    pub speed: T,
    pub fluid_power: T,
    pub internal_power: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachResult<T = f64> {
    /// s
    pub duration: T,
    /// J per sphere
    pub energy: T,
    pub fluid_energy: T,
    pub internal_energy: T,
    pub trace: Vec<TracePoint<T>>,
}

impl<T: Real> ApproachResult<T> {
    pub fn fluid_share(&self) -> T {
        self.fluid_energy / self.energy
    }
}

fn check_range<T: Real>(curve: &MobilityCurve<T>, delta0: T, delta1: T) -> Result<()> {
    if !(delta0 >= delta1) {
        return Err(Error::param("delta0", "must not be below delta1"));
    }
    curve.check(delta1)?;
    curve.check(delta0)?;
    Ok(())
}

/// `(a/v) ∫_{δ1}^{δ0} dδ / h_loc`.
pub fn approach_time<T: Real>(curve: &MobilityCurve<T>, delta0: T, delta1: T, radius: T, v_tread: T) -> Result<T> {
    check_range(curve, delta0, delta1)?;
    if delta0 == delta1 {
        return Ok(T::zero());
    }
    let inv = integrate(|d| T::one() / curve.raw(d).0, delta1, delta0, T::lit(QUADRATURE_TOLERANCE));
    Ok(radius / v_tread * inv)
}

/// Integrates the approach from `δ0` down to `δ1` at constant tread speed.
pub fn integrate_approach<T: Real>(
    curve: &MobilityCurve<T>,
    delta0: T,
    delta1: T,
    params: &ApproachParams<T>,
) -> Result<ApproachResult<T>> {
    params.validate()?;
    check_range(curve, delta0, delta1)?;
    let a = params.radius;
    let v = params.v_tread;
    let point = |t: T, delta: T| {
        let (hl, hf) = curve.raw(delta);
        let (cf, ci) = params.power_coefficient(hf);
        TracePoint {
            t,
            delta,
            speed: hl * v,
            fluid_power: cf * v * v,
            internal_power: ci * v * v,
        }
    };
    if delta0 == delta1 {
        return Ok(ApproachResult {
            duration: T::zero(),
            energy: T::zero(),
            fluid_energy: T::zero(),
            internal_energy: T::zero(),
            trace: vec![point(T::zero(), delta0)],
        });
    }
    let h_min = curve.samples.iter().fold(T::one(), |m, s| m.min(s.h_loc));
    let bound = T::lit(2.0) * a / v * (delta0 - delta1) / h_min;
    let rhs = |_t: T, y: &[T], dy: &mut [T]| {
        let (hl, hf) = curve.raw(y[0].max(delta1));
        let (cf, ci) = params.power_coefficient(hf);
        dy[0] = -hl * v / a;
        dy[1] = cf * v * v;
        dy[2] = ci * v * v;
    };
    let opts = OdeOptions {
        initial_step: bound * T::lit(1e-6),
        ..OdeOptions::default()
    };
    let traj = integrate_until(rhs, T::zero(), &[delta0, T::zero(), T::zero()], bound, |y| y[0] - delta1, opts)?;
    if !traj.event_hit {
        return Err(Error::Integration("approach did not reach the stopping distance".into()));
    }
    let last = traj.states.last().expect("nonempty trajectory");
    let duration = *traj.times.last().expect("nonempty trajectory");
    let trace = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| point(t, y[0].max(delta1)))
        .collect();
    Ok(ApproachResult {
        duration,
        energy: last[1] + last[2],
        fluid_energy: last[1],
        internal_energy: last[2],
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreadSchedule<T = f64> {
    /// Constant tread speed covering the approach in the given time.
    pub uniform_speed: T,
    pub uniform_energy: T,
    pub optimal_energy: T,
    pub savings: T,
}

/// Cost of the approach as a shape change in `x = δ0 - δ` (radii
/// travelled): `k(x) = a² (η a h_fluid + k a² h_int) / h_loc²`.
pub fn tread_cost<'a, T: Real>(
    curve: &'a MobilityCurve<T>,
    delta0: T,
    params: &'a ApproachParams<T>,
) -> impl Fn(T) -> T + 'a {
    move |x: T| {
        let (hl, hf) = curve.raw(delta0 - x);
        let (cf, ci) = params.power_coefficient(hf);
        params.radius * params.radius * (cf + ci) / (hl * hl)
    }
}

/// Constant-power tread schedule versus constant tread speed, both taking
/// `duration` to go from `δ0` to `δ1`.
pub fn optimal_tread_schedule<T: Real>(
    curve: &MobilityCurve<T>,
    delta0: T,
    delta1: T,
    duration: T,
    params: &ApproachParams<T>,
) -> Result<TreadSchedule<T>> {
    params.validate()?;
    check_range(curve, delta0, delta1)?;
    if !(duration > T::zero()) {
        return Err(Error::param("duration", "must be positive"));
    }
    let a = params.radius;
    let tol = T::lit(QUADRATURE_TOLERANCE);
    let c = |d: T| {
        let (hl, hf) = curve.raw(d);
        let (cf, ci) = params.power_coefficient(hf);
        (hl, cf + ci)
    };
    let inv = integrate(|d| T::one() / c(d).0, delta1, delta0, tol);
    let v = a * inv / duration;
    let uniform = v * a * integrate(|d| { let (hl, cc) = c(d); cc / hl }, delta1, delta0, tol);
    let optimal = optimal_energy(&tread_cost(curve, delta0, params), delta0 - delta1, duration)?;
    Ok(TreadSchedule {
        uniform_speed: v,
        uniform_energy: uniform,
        optimal_energy: optimal,
        savings: T::one() - optimal / uniform,
    })
}

/// Hex SHA-256 of everything a mobility curve depends on.
pub fn cache_key<T: Real>(
    template: &TreadSphereSpec<T>,
    grid: &[T],
    opts: &MeshOptions<T>,
    settings: &SolverSettings<T>,
) -> String {
    let mut text = format!(
        "mobility-v1;case={};a={:e};fraction={:e};ramp={:e};v={:e};refine={:e};wall={:e};eta={:e};ratio={:e};depth={};levels={};perturb={:e};grid=",
        template.case.as_str(),
        template.radius.as_f64(),
        template.band_area_fraction.as_f64(),
        template.ramp_width.as_f64(),
        template.v_tread.as_f64(),
        opts.refine.as_f64(),
        opts.wall_radius.as_f64(),
        settings.viscosity.as_f64(),
        settings.near_ratio.as_f64(),
        settings.max_depth,
        settings.self_levels,
        settings.kernel_perturbation.as_f64(),
    );
    for d in grid {
        text.push_str(&format!("{:e},", d.as_f64()));
    }
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
