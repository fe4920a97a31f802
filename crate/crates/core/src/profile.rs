//! Configuration-dependent cost `k(f)` and the energy of uniform versus
//! minimum-energy (constant-power) shape-change schedules.
//!
//! With power `P = k(f) ḟ²`, the Euler–Lagrange optimum on `f(0)=0`,
//! `f(T)=F` has `ḟ ∝ 1/√k(f)`, i.e. constant power, and energy
//! `(∫₀^F √k df)² / T`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::interp::MonotoneCubic;
use crate::numerics::quadrature::integrate;
use crate::real::Real;

/// Relative tolerance for every energy quadrature in this module.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Minimum number of samples a curve needs before it is optimized over.
pub const MIN_OPTIMIZER_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample<T = f64> {
    /// Configuration parameter (extension fraction f, or δ).
    pub param: T,
    pub h_fluid: T,
    pub h_internal: T,
}

/// Sampled dissipation coefficients versus configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationCurve<T = f64> {
    pub label: String,
    pub samples: Vec<CurveSample<T>>,
}

impl<T: Real> DissipationCurve<T> {
    pub fn new(label: impl Into<String>, samples: Vec<CurveSample<T>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidCurve("empty curve".into()));
        }
        if samples.windows(2).any(|w| !(w[1].param > w[0].param)) {
            return Err(Error::InvalidCurve("parameter not strictly increasing".into()));
        }
        if samples
            .iter()
            .any(|s| !(s.h_fluid >= T::zero()) || !(s.h_internal >= T::zero()))
        {
            return Err(Error::InvalidCurve("negative dissipation coefficient".into()));
        }
        Ok(DissipationCurve {
            label: label.into(),
            samples,
        })
    }

    pub fn params(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.param).collect()
    }

    /// Writes `param,h_fluid,h_internal` with full double precision.
    pub fn write_csv<W: Write>(&self, param_name: &str, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record([param_name, "h_fluid", "h_internal"])?;
        for s in &self.samples {
            w.write_record([full(s.param), full(s.h_fluid), full(s.h_internal)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the layout written by [`write_csv`](Self::write_csv); the
    /// first column may have any name.
    pub fn read_csv<R: Read>(label: impl Into<String>, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 3 || &headers[1] != "h_fluid" || &headers[2] != "h_internal" {
            return Err(Error::InvalidCurve(format!("unexpected header {headers:?}")));
        }
        let mut samples = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<T> {
                rec.get(i)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .map(T::lit)
                    .ok_or_else(|| Error::InvalidCurve(format!("bad number in row {rec:?}")))
            };
            samples.push(CurveSample {
                param: num(0)?,
                h_fluid: num(1)?,
                h_internal: num(2)?,
            });
        }
        Self::new(label, samples)
    }
}

/// 17 significant digits.
pub(crate) fn full<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

/// Anything that yields the cost `k(f)` (J·s per unit f²).
pub trait Cost<T> {
    fn cost(&self, f: T) -> T;
}

impl<T, F: Fn(T) -> T> Cost<T> for F {
    fn cost(&self, f: T) -> T {
        self(f)
    }
}

/// `k(f) = c² (η d0 h_fluid(f) + k_friction d0² h_internal(f))` built from
/// monotone cubic interpolants of a sampled curve.
#[derive(Debug, Clone)]
pub struct AssembledCost<T = f64> {
    fluid: MonotoneCubic<T>,
    internal: MonotoneCubic<T>,
    fluid_scale: T,
    internal_scale: T,
}

impl<T: Real> AssembledCost<T> {
    pub fn fluid_part(&self, f: T) -> T {
        self.fluid_scale * self.fluid.eval(f).max(T::zero())
    }

    pub fn internal_part(&self, f: T) -> T {
        self.internal_scale * self.internal.eval(f).max(T::zero())
    }

    pub fn h_fluid(&self, f: T) -> T {
        self.fluid.eval(f)
    }

    pub fn h_internal(&self, f: T) -> T {
        self.internal.eval(f)
    }
}

impl<T: Real> Cost<T> for AssembledCost<T> {
    fn cost(&self, f: T) -> T {
        self.fluid_part(f) + self.internal_part(f)
    }
}

/// `conversion` is `dv0/dḟ`: `nL` for the expanding robot, `(n-1)L`
/// for the probe. Values below the first sample are extrapolated linearly.
pub fn assemble_cost<T: Real>(
    curve: &DissipationCurve<T>,
    viscosity: T,
    size: T,
    k_friction: T,
    conversion: T,
) -> Result<AssembledCost<T>> {
    if curve.samples.len() < MIN_OPTIMIZER_SAMPLES {
        return Err(Error::InvalidCurve(format!(
            "{} samples, optimizer needs at least {MIN_OPTIMIZER_SAMPLES}",
            curve.samples.len()
        )));
    }
    let xs = curve.params();
    let fluid = MonotoneCubic::new(xs.clone(), curve.samples.iter().map(|s| s.h_fluid).collect())?;
    let internal = MonotoneCubic::new(xs, curve.samples.iter().map(|s| s.h_internal).collect())?;
    let c2 = conversion * conversion;
    Ok(AssembledCost {
        fluid,
        internal,
        fluid_scale: c2 * viscosity * size,
        internal_scale: c2 * k_friction * size * size,
    })
}

/// Energy of `f(t) = (F/T) t`: `(F/T) ∫₀^F k df`.
pub fn uniform_energy<T: Real, C: Cost<T> + ?Sized>(k: &C, extent: T, duration: T) -> T {
    extent / duration * integrate(|f| k.cost(f), T::zero(), extent, T::lit(QUADRATURE_TOLERANCE))
}

/// `(∫₀^F √k df)² / T`.
pub fn optimal_energy<T: Real, C: Cost<T> + ?Sized>(k: &C, extent: T, duration: T) -> Result<T> {
    let s = sqrt_cost_integral(k, T::zero(), extent)?;
    Ok(s * s / duration)
}

fn sqrt_cost_integral<T: Real, C: Cost<T> + ?Sized>(k: &C, a: T, b: T) -> Result<T> {
    let mut bad: Option<(T, T)> = None;
    let v = integrate(
        |f| {
            let kv = k.cost(f);
            if !(kv > T::zero()) {
                bad.get_or_insert((f, kv));
                T::zero()
            } else {
                kv.sqrt()
            }
        },
        a,
        b,
        T::lit(QUADRATURE_TOLERANCE),
    );
    match bad {
        Some((at, value)) => Err(Error::NonPositiveCost {
            at: at.as_f64(),
            value: value.as_f64(),
        }),
        None => Ok(v),
    }
}

/// A sampled schedule `f(t)` with its power trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile<T = f64> {
    pub times: Vec<T>,
    pub extent: Vec<T>,
    pub rate: Vec<T>,
    pub power: Vec<T>,
    /// J
    pub energy: T,
    /// W
    pub peak_power: T,
}

impl<T: Real> SpeedProfile<T> {
    /// Trapezoid-rule integral of the power trace.
    pub fn trace_energy(&self) -> T {
        self.times
            .windows(2)
            .zip(self.power.windows(2))
            .fold(T::zero(), |acc, (t, p)| acc + (t[1] - t[0]) * (p[0] + p[1]) * T::lit(0.5))
    }

    /// Writes `t,f,fdot,power` with full double precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["t", "f", "fdot", "power"])?;
        for i in 0..self.times.len() {
            w.write_record([
                full(self.times[i]),
                full(self.extent[i]),
                full(self.rate[i]),
                full(self.power[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Default number of trace points.
pub const PROFILE_POINTS: usize = 4001;

/// Uniform schedule sampled at `points` equally spaced times.
pub fn uniform_profile<T: Real, C: Cost<T> + ?Sized>(k: &C, extent: T, duration: T, points: usize) -> SpeedProfile<T> {
    let points = points.max(2);
    let rate = extent / duration;
    let last = T::lit((points - 1) as f64);
    let mut prof = SpeedProfile {
        times: Vec::with_capacity(points),
        extent: Vec::with_capacity(points),
        rate: vec![rate; points],
        power: Vec::with_capacity(points),
        energy: uniform_energy(k, extent, duration),
        peak_power: T::zero(),
    };
    for i in 0..points {
        let u = T::lit(i as f64) / last;
        let f = extent * u;
        let p = k.cost(f) * rate * rate;
        prof.times.push(duration * u);
        prof.extent.push(f);
        prof.power.push(p);
        prof.peak_power = prof.peak_power.max(p);
    }
    prof
}

/// Constant-power schedule; times come from `dt = √k df / C`.
pub fn optimal_profile<T: Real, C: Cost<T> + ?Sized>(
    k: &C,
    extent: T,
    duration: T,
    points: usize,
) -> Result<SpeedProfile<T>> {
    let points = points.max(2);
    let total = sqrt_cost_integral(k, T::zero(), extent)?;
    let c = total / duration;
    let power = c * c;
    let last = T::lit((points - 1) as f64);
    let mut times = Vec::with_capacity(points);
    let mut fs = Vec::with_capacity(points);
    let mut rates = Vec::with_capacity(points);
    let mut acc = T::zero();
    let mut prev = T::zero();
    for i in 0..points {
        let f = extent * T::lit(i as f64) / last;
        if i > 0 {
            acc += sqrt_cost_integral(k, prev, f)?;
        }
        prev = f;
        times.push(if i + 1 == points { duration } else { acc / c });
        fs.push(f);
        rates.push(c / k.cost(f).sqrt());
    }
    Ok(SpeedProfile {
        times,
        extent: fs,
        rate: rates,
        power: vec![power; points],
        energy: total * total / duration,
        peak_power: power,
    })
}

/// `1 - E_opt / E_unif`, both from the same cost function.
pub fn savings<T: Real, C: Cost<T> + ?Sized>(k: &C, extent: T, duration: T) -> Result<T> {
    let unif = uniform_energy(k, extent, duration);
    let opt = optimal_energy(k, extent, duration)?;
    Ok(T::one() - opt / unif)
}

/// Side-by-side numbers for the uniform and optimal schedules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleComparison<T = f64> {
    pub uniform_energy: T,
    pub optimal_energy: T,
    pub savings: T,
    pub uniform_peak_power: T,
    /// Constant power of the optimal schedule.
    pub optimal_power: T,
    /// ḟ(0)/ḟ(F) on the optimal schedule, `√(k(F)/k(0))`.
    pub rate_ratio: T,
}

impl<T: Real> ScheduleComparison<T> {
    /// Fraction by which the optimal power sits below the uniform peak.
    pub fn peak_reduction(&self) -> T {
        T::one() - self.optimal_power / self.uniform_peak_power
    }
}

pub fn compare_schedules<T: Real, C: Cost<T> + ?Sized>(k: &C, extent: T, duration: T) -> Result<ScheduleComparison<T>> {
    let uniform = uniform_profile(k, extent, duration, PROFILE_POINTS);
    let e_opt = optimal_energy(k, extent, duration)?;
    let k0 = k.cost(T::zero());
    let kf = k.cost(extent);
    if !(k0 > T::zero() && kf > T::zero()) {
        return Err(Error::NonPositiveCost {
            at: 0.0,
            value: k0.min(kf).as_f64(),
        });
    }
    Ok(ScheduleComparison {
        uniform_energy: uniform.energy,
        optimal_energy: e_opt,
        savings: T::one() - e_opt / uniform.energy,
        uniform_peak_power: uniform.peak_power,
        optimal_power: e_opt / duration,
        rate_ratio: (kf / k0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn flat_curve(h: f64) -> DissipationCurve {
        let samples = (0..10)
            .map(|i| CurveSample {
                param: 0.05 * i as f64 + 0.02,
                h_fluid: h,
                h_internal: 0.0,
            })
            .collect();
        DissipationCurve::new("flat", samples).unwrap()
    }

    #[test]
    fn unit_normalization() {
        let k = assemble_cost(&flat_curve(1.0), 1.0, 1.0, 1000.0, 1.0).unwrap();
        for f in [0.0, 0.1, 0.3, 0.5] {
            assert_relative_eq!(k.cost(f), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn rejects_short_or_unsorted_curves() {
        let s = |p| CurveSample { param: p, h_fluid: 1.0, h_internal: 0.0 };
        let short = DissipationCurve::new("s", vec![s(0.0), s(0.1)]).unwrap();
        assert!(assemble_cost(&short, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DissipationCurve::new("u", vec![s(0.1), s(0.0)]).is_err());
        assert!(DissipationCurve::<f64>::new("e", vec![]).is_err());
    }

    #[test]
    fn friction_scaling_touches_only_internal_term() {
        let samples: Vec<_> = (0..9)
            .map(|i| {
                let f = 0.02 + 0.06 * i as f64;
                CurveSample { param: f, h_fluid: 20.0 + f, h_internal: 1.6 * (1.0 - f) }
            })
            .collect();
        let curve = DissipationCurve::new("c", samples).unwrap();
        let a = assemble_cost(&curve, 1e-3, 1e-6, 1e3, 5e-6).unwrap();
        let b = assemble_cost(&curve, 1e-3, 1e-6, 1e4, 5e-6).unwrap();
        for f in [0.05, 0.25, 0.45] {
            assert_relative_eq!(a.fluid_part(f), b.fluid_part(f), max_relative = 1e-14);
            assert_relative_eq!(10.0 * a.internal_part(f), b.internal_part(f), max_relative = 1e-14);
        }
    }

    #[test]
    fn constant_cost_is_already_optimal() {
        let k = |_f: f64| 3.5;
        assert_relative_eq!(uniform_energy(&k, 0.5, 2.0), 3.5 * 0.25 / 2.0, max_relative = 1e-14);
        let s = savings(&k, 0.5, 2.0).unwrap();
        assert!(s.abs() < 1e-10);
        let opt = optimal_profile(&k, 0.5, 2.0, 101).unwrap();
        let uni = uniform_profile(&k, 0.5, 2.0, 101);
        for (a, b) in opt.times.iter().zip(&uni.times) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn optimal_profile_invariants() {
        let k = |f: f64| 1.0 + 3.0 * f * f + f.sin();
        let (extent, duration) = (0.8, 1e-3);
        let p = optimal_profile(&k, extent, duration, 801).unwrap();
        assert_eq!(p.times[0], 0.0);
        assert_eq!(p.extent[0], 0.0);
        assert_eq!(*p.times.last().unwrap(), duration);
        assert_eq!(*p.extent.last().unwrap(), extent);
        assert!(p.times.windows(2).all(|w| w[1] > w[0]));
        let pmax = p.power.iter().cloned().fold(f64::MIN, f64::max);
        let pmin = p.power.iter().cloned().fold(f64::MAX, f64::min);
        assert!(pmax / pmin - 1.0 < 1e-3);
        // P = k ḟ² holds pointwise
        for i in 0..p.times.len() {
            assert_relative_eq!(k(p.extent[i]) * p.rate[i] * p.rate[i], p.power[i], max_relative = 1e-4);
        }
        assert_relative_eq!(p.trace_energy(), p.energy, max_relative = 1e-6);
        let u = uniform_profile(&k, extent, duration, PROFILE_POINTS);
        assert_relative_eq!(u.trace_energy(), u.energy, max_relative = 1e-6);
        assert!(p.energy < u.energy);
    }

    #[test]
    fn nonpositive_cost_is_reported() {
        let k = |f: f64| 1.0 - 4.0 * f;
        assert!(matches!(optimal_profile(&k, 0.5, 1.0, 11), Err(Error::NonPositiveCost { .. })));
    }

    #[test]
    fn linear_cost_closed_form() {
        // k = 1 + 3f on [0,1]: E_unif T = 2.5, E_opt T = (14/9)²
        let k = |f: f64| 1.0 + 3.0 * f;
        let c = compare_schedules(&k, 1.0, 1.0).unwrap();
        assert_relative_eq!(c.uniform_energy, 2.5, max_relative = 1e-9);
        assert_relative_eq!(c.optimal_energy, (14.0f64 / 9.0).powi(2), max_relative = 1e-9);
        assert_relative_eq!(c.rate_ratio, 2.0, max_relative = 1e-12);
        assert_relative_eq!(c.uniform_peak_power, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn profile_csv_layout() {
        let k = |_f: f64| 1.0;
        let p = optimal_profile(&k, 1.0, 1.0, 3).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,f,fdot,power"));
        assert_eq!(lines.next(), Some("0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0"));
        assert!(!text.contains('\r'));
    }

    proptest! {
        #[test]
        fn optimal_never_exceeds_uniform(c0 in 0.1f64..10.0, c1 in -0.09f64..5.0, c2 in 0.0f64..5.0,
                                         extent in 0.1f64..1.0) {
            let k = move |f: f64| c0 + c1 * c0 * f + c2 * f * f;
            let s = savings(&k, extent, 1.0).unwrap();
            prop_assert!(s >= -1e-12);
            if c1.abs() > 1e-3 || c2 > 1e-3 {
                prop_assert!(s > 0.0);
            }
        }

        #[test]
        fn time_reversal_leaves_energies(c0 in 0.5f64..5.0, c1 in 0.0f64..5.0, c2 in 0.0f64..3.0) {
            let extent = 0.7;
            let k = move |f: f64| c0 + c1 * f + c2 * (5.0 * f).sin().powi(2);
            let rev = move |f: f64| k(extent - f);
            prop_assert!((uniform_energy(&k, extent, 1.0) - uniform_energy(&rev, extent, 1.0)).abs()
                <= 1e-8 * uniform_energy(&k, extent, 1.0));
            let a = optimal_energy(&k, extent, 1.0).unwrap();
            let b = optimal_energy(&rev, extent, 1.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-8 * a);
        }
    }
}
