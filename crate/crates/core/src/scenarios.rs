//! Fluid parameters, characteristic scales, dimensionless groups and
//! energy bookkeeping.
//!
//! Everything is SI. Display units (pW, µm, ms) belong to the CLI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Combustion energy of one glucose molecule, J (about 2870 kJ/mol).
pub const GLUCOSE_ENERGY: f64 = 4.77e-18;
/// Fraction of the glucose energy converted to useful work.
pub const GLUCOSE_EFFICIENCY: f64 = 0.5;
/// Body temperature, K.
pub const BODY_TEMPERATURE: f64 = 310.0;

/// Ambient Newtonian fluid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidScenario<T = f64> {
    pub name: String,
    /// kg/m³
    pub density: T,
    /// Pa·s
    pub dynamic_viscosity: T,
    /// m²/s, always `dynamic_viscosity / density`
    pub kinematic_viscosity: T,
}

impl<T: Real> FluidScenario<T> {
    pub fn new(name: impl Into<String>, density: T, dynamic_viscosity: T) -> Result<Self> {
        if !(density > T::zero() && density.is_finite()) {
            return Err(Error::param("density", format!("must be positive, got {density}")));
        }
        if !(dynamic_viscosity > T::zero() && dynamic_viscosity.is_finite()) {
            return Err(Error::param(
                "viscosity",
                format!("must be positive, got {dynamic_viscosity}"),
            ));
        }
        Ok(FluidScenario {
            name: name.into(),
            density,
            dynamic_viscosity,
            kinematic_viscosity: dynamic_viscosity / density,
        })
    }

    /// Water-like fluid (blood plasma, interstitial fluid).
    pub fn low() -> Self {
        Self::new("low", T::lit(1000.0), T::lit(1e-3)).expect("valid preset")
    }

    /// Fluid 10⁴ times more viscous than water (mucus, cytoplasm).
    pub fn high() -> Self {
        Self::new("high", T::lit(1000.0), T::lit(10.0)).expect("valid preset")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "low" => Some(Self::low()),
            "high" => Some(Self::high()),
            _ => None,
        }
    }

    /// Checks the stored kinematic viscosity against `η/ρ`.
    pub fn is_consistent(&self) -> bool {
        let nu = self.dynamic_viscosity / self.density;
        (self.kinematic_viscosity - nu).abs() <= T::lit(4.0) * T::eps() * nu
    }
}

/// Size, speed and duration that nondimensionalize one shape change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicScales<T = f64> {
    /// d0, m
    pub size: T,
    /// v0, m/s
    pub speed: T,
    /// T, s
    pub duration: T,
}

impl<T: Real> CharacteristicScales<T> {
    /// Size and duration must be positive and finite; the speed may be
    /// zero (a motionless reference state).
    pub fn new(size: T, speed: T, duration: T) -> Result<Self> {
        if !(size > T::zero() && size.is_finite()) {
            return Err(Error::param("d0", format!("must be positive, got {size}")));
        }
        if !(speed >= T::zero() && speed.is_finite()) {
            return Err(Error::param("v0", format!("must be nonnegative, got {speed}")));
        }
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::param("T", format!("must be positive and finite, got {duration}")));
        }
        Ok(CharacteristicScales {
            size,
            speed,
            duration,
        })
    }
}

/// Energy with its glucose-oxidation equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyQuote<T = f64> {
    pub joules: T,
    /// Real-valued count, unrounded.
    pub glucose_molecules: T,
}

/// Re = v0 d0 / ν
pub fn reynolds<T: Real>(scales: &CharacteristicScales<T>, fluid: &FluidScenario<T>) -> T {
    scales.speed * scales.size / fluid.kinematic_viscosity
}

/// Wom = d0 / √(ν T)
pub fn womersley<T: Real>(scales: &CharacteristicScales<T>, fluid: &FluidScenario<T>) -> T {
    scales.size / (fluid.kinematic_viscosity * scales.duration).sqrt()
}

/// η d0 v0², the factor multiplying h_fluid.
pub fn fluid_power_factor<T: Real>(scales: &CharacteristicScales<T>, fluid: &FluidScenario<T>) -> T {
    fluid.dynamic_viscosity * scales.size * scales.speed * scales.speed
}

/// k_friction d0² v0², the factor multiplying h_internal.
pub fn internal_power_factor<T: Real>(scales: &CharacteristicScales<T>, k_friction: T) -> T {
    k_friction * scales.size * scales.size * scales.speed * scales.speed
}

pub fn glucose_equivalent<T: Real>(joules: T) -> EnergyQuote<T> {
    glucose_equivalent_with(joules, T::lit(GLUCOSE_ENERGY), T::lit(GLUCOSE_EFFICIENCY))
}

/// Glucose count for an explicit per-molecule energy and conversion efficiency.
pub fn glucose_equivalent_with<T: Real>(joules: T, glucose_energy: T, efficiency: T) -> EnergyQuote<T> {
    debug_assert!(joules >= T::zero());
    EnergyQuote {
        joules,
        glucose_molecules: joules / (efficiency * glucose_energy),
    }
}

/// Stokes–Einstein diffusion coefficient k_B T_body / (6π η a), m²/s.
pub fn stokes_einstein_diffusion<T: Real>(fluid: &FluidScenario<T>, radius: T, temperature: T) -> T {
    debug_assert!(radius > T::zero() && temperature > T::zero());
    T::lit(BOLTZMANN) * temperature / (T::lit(6.0) * T::PI() * fluid.dynamic_viscosity * radius)
}

/// Typical Brownian displacement √(6 D T), m.
pub fn brownian_displacement<T: Real>(diffusion: T, duration: T) -> T {
    debug_assert!(diffusion >= T::zero() && duration >= T::zero());
    (T::lit(6.0) * diffusion * duration).sqrt()
}
