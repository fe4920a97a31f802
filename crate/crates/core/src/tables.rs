//! Published scenario presets and the dimensional rows built from computed
//! curves: dimensionless groups, power factors, energies, glucose counts.

use serde::{Deserialize, Serialize};

use crate::aggregation::{integrate_approach, optimal_tread_schedule, stopping_distance, ApproachParams, MobilityCurve};
use crate::error::Result;
use crate::friction::{tread_h_internal, FrictionConstant, TreadFrictionModel};
use crate::geometry::{ApproachCase, ExpandingRobotSpec, ProbeSpec, TreadSphereSpec};
use crate::profile::{assemble_cost, compare_schedules, DissipationCurve};
use crate::real::Real;
use crate::scenarios::{
    brownian_displacement, fluid_power_factor, glucose_equivalent, internal_power_factor, reynolds,
    stokes_einstein_diffusion, womersley, CharacteristicScales, FluidScenario, BODY_TEMPERATURE,
};

/// Fluid, extension target `F`, duration and friction for one shape change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeChangeCase<T = f64> {
    pub fluid: FluidScenario<T>,
    pub extent: T,
    pub duration: T,
    pub k_friction: T,
}

impl<T: Real> ShapeChangeCase<T> {
    /// Water-like fluid, full extension `F = 0.5` in 1 ms.
    pub fn low() -> Self {
        ShapeChangeCase {
            fluid: FluidScenario::low(),
            extent: T::lit(0.5),
            duration: T::lit(1e-3),
            k_friction: FrictionConstant::stiff_surfaces().value(),
        }
    }

    /// Viscous fluid, `F = 0.5` in 1 s.
    pub fn high() -> Self {
        ShapeChangeCase {
            fluid: FluidScenario::high(),
            duration: T::one(),
            ..Self::low()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "low" => Some(Self::low()),
            "high" => Some(Self::high()),
            _ => None,
        }
    }

    /// Uniform extension rate `F/T`.
    pub fn fdot(&self) -> T {
        self.extent / self.duration
    }
}

/// `L = 1 µm`, `n = 5`, `r = 0.75 µm`.
pub fn expanding_preset<T: Real>(fdot: T) -> ExpandingRobotSpec<T> {
    ExpandingRobotSpec::new(T::lit(1e-6), 5, T::lit(0.75e-6), fdot).expect("valid preset")
}

/// `L = 1 µm`, `n = 5`, `r = 50 nm`, `s = 20 nm`, on a 1 µm body.
pub fn probe_preset<T: Real>(fdot: T) -> ProbeSpec<T> {
    ProbeSpec {
        length: T::lit(1e-6),
        segments: 5,
        inner_radius: T::lit(50e-9),
        thickness: T::lit(20e-9),
        body_radius: T::lit(1e-6),
        fdot,
    }
}

/// `a = 1 µm`, half the surface as tread, 50 nm ramps.
pub fn tread_preset<T: Real>(case: ApproachCase, v_tread: T) -> TreadSphereSpec<T> {
    TreadSphereSpec {
        radius: T::lit(1e-6),
        band_area_fraction: T::lit(0.5),
        ramp_width: T::lit(50e-9),
        v_tread,
        case,
        delta: T::lit(5.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeChangeRow<T = f64> {
    pub scenario: String,
    pub duration: T,
    pub tip_speed: T,
    pub reynolds: T,
    pub womersley: T,
    pub fluid_power_factor: T,
    pub internal_power_factor: T,
    pub energy: T,
    pub fluid_energy: T,
    pub internal_energy: T,
    pub glucose_molecules: T,
    pub optimal_energy: T,
    pub savings: T,
    pub rate_ratio: T,
    pub peak_reduction: T,
}

impl<T: Real> ShapeChangeRow<T> {
    pub fn fluid_share(&self) -> T {
        self.fluid_energy / self.energy
    }
}

/// Uniform and optimal schedules for a curve with `d0 = size` and
/// `v0 = conversion · F / T`.
pub fn shape_change_row<T: Real>(
    curve: &DissipationCurve<T>,
    case: &ShapeChangeCase<T>,
    size: T,
    conversion: T,
) -> Result<ShapeChangeRow<T>> {
    let speed = conversion * case.fdot();
    let scales = CharacteristicScales::new(size, speed, case.duration)?;
    let fluid = &case.fluid;
    let cost = assemble_cost(curve, fluid.dynamic_viscosity, size, case.k_friction, conversion)?;
    let (f, t) = (case.extent, case.duration);
    let fluid_only = |x: T| cost.fluid_part(x);
    let internal_only = |x: T| cost.internal_part(x);
    let fluid_energy = crate::profile::uniform_energy(&fluid_only, f, t);
    let internal_energy = crate::profile::uniform_energy(&internal_only, f, t);
    let cmp = compare_schedules(&cost, f, t)?;
    Ok(ShapeChangeRow {
        scenario: fluid.name.clone(),
        duration: t,
        tip_speed: speed,
        reynolds: reynolds(&scales, fluid),
        womersley: womersley(&scales, fluid),
        fluid_power_factor: fluid_power_factor(&scales, fluid),
        internal_power_factor: internal_power_factor(&scales, case.k_friction),
        energy: cmp.uniform_energy,
        fluid_energy,
        internal_energy,
        glucose_molecules: glucose_equivalent(cmp.uniform_energy).glucose_molecules,
        optimal_energy: cmp.optimal_energy,
        savings: cmp.savings,
        rate_ratio: cmp.rate_ratio,
        peak_reduction: cmp.peak_reduction(),
    })
}

/// Fluid, tread speed and approach range for one aggregation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachCaseConfig<T = f64> {
    pub fluid: FluidScenario<T>,
    pub radius: T,
    pub v_tread: T,
    pub delta0: T,
    pub gap: T,
    pub k_friction: T,
    pub friction_model: TreadFrictionModel<T>,
    pub band_area_fraction: T,
}

impl<T: Real> ApproachCaseConfig<T> {
    /// 1 µm spheres, 1 mm/s tread, from δ = 5 to a 50 nm gap.
    pub fn low() -> Self {
        ApproachCaseConfig {
            fluid: FluidScenario::low(),
            radius: T::lit(1e-6),
            v_tread: T::lit(1e-3),
            delta0: T::lit(5.0),
            gap: T::lit(50e-9),
            k_friction: FrictionConstant::stiff_surfaces().value(),
            friction_model: TreadFrictionModel::calibrated(),
            band_area_fraction: T::lit(0.5),
        }
    }

    /// Viscous fluid with a 10 µm/s tread.
    pub fn high() -> Self {
        ApproachCaseConfig {
            fluid: FluidScenario::high(),
            v_tread: T::lit(1e-5),
            ..Self::low()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "low" => Some(Self::low()),
            "high" => Some(Self::high()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachRow<T = f64> {
    pub scenario: String,
    pub case: ApproachCase,
    pub reynolds: T,
    pub womersley: T,
    pub fluid_power_factor: T,
    pub internal_power_factor: T,
    pub diffusion: T,
    pub delta1: T,
    pub duration: T,
    pub energy: T,
    pub fluid_energy: T,
    pub internal_energy: T,
    pub glucose_molecules: T,
    pub brownian_displacement: T,
    pub savings: T,
}

impl<T: Real> ApproachRow<T> {
    pub fn fluid_share(&self) -> T {
        self.fluid_energy / self.energy
    }
}

/// The Womersley number uses the time `a/v_tread` to move one radius.
pub fn approach_row<T: Real>(curve: &MobilityCurve<T>, cfg: &ApproachCaseConfig<T>) -> Result<ApproachRow<T>> {
    let a = cfg.radius;
    let scales = CharacteristicScales::new(a, cfg.v_tread, a / cfg.v_tread)?;
    let fluid = &cfg.fluid;
    let params = ApproachParams {
        radius: a,
        v_tread: cfg.v_tread,
        fluid: fluid.clone(),
        k_friction: cfg.k_friction,
        h_internal: tread_h_internal(cfg.band_area_fraction, cfg.friction_model)?,
    };
    let delta1 = stopping_distance(curve.case, a, cfg.gap)?;
    let run = integrate_approach(curve, cfg.delta0, delta1, &params)?;
    let schedule = optimal_tread_schedule(curve, cfg.delta0, delta1, run.duration, &params)?;
    let diffusion = stokes_einstein_diffusion(fluid, a, T::lit(BODY_TEMPERATURE));
    Ok(ApproachRow {
        scenario: fluid.name.clone(),
        case: curve.case,
        reynolds: reynolds(&scales, fluid),
        womersley: womersley(&scales, fluid),
        fluid_power_factor: fluid_power_factor(&scales, fluid),
        internal_power_factor: internal_power_factor(&scales, cfg.k_friction),
        diffusion,
        delta1,
        duration: run.duration,
        energy: run.energy,
        fluid_energy: run.fluid_energy,
        internal_energy: run.internal_energy,
        glucose_molecules: glucose_equivalent(run.energy).glucose_molecules,
        brownian_displacement: brownian_displacement(diffusion, run.duration),
        savings: schedule.savings,
    })
}
