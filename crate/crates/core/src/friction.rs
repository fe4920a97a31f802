//! Closed-form sliding-friction coefficients for telescoping segments and
//! the treadmill sphere.
//!
//! Power lost between two smooth surfaces sliding at relative speed `v`
//! over contact area `S` is `k_friction S v²`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Sliding friction constant, kg/(m²·s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionConstant<T = f64>(T);

impl<T: Real> FrictionConstant<T> {
    /// Conservative estimate for stiff, atomically flat surfaces.
    pub fn stiff_surfaces() -> Self {
        FrictionConstant(T::lit(1000.0))
    }

    pub fn new(k: T) -> Result<Self> {
        if k > T::zero() && k.is_finite() {
            Ok(FrictionConstant(k))
        } else {
            Err(Error::param("k_friction", format!("must be positive, got {k}")))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

impl<T: Real> Default for FrictionConstant<T> {
    fn default() -> Self {
        Self::stiff_surfaces()
    }
}

/// Overlap area between segments `i` and `i-1`: 2π (r + (n-i) s) L (1-f).
pub fn sliding_area<T: Real>(i: usize, n: usize, r: T, s: T, length: T, f: T) -> Result<T> {
    if i < 2 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if !(f >= T::zero() && f <= T::one()) {
        return Err(Error::param("f", format!("must lie in [0, 1], got {f}")));
    }
    let radius = r + T::lit((n - i) as f64) * s;
    Ok(T::TAU() * radius * length * (T::one() - f))
}

/// Expanding robot, d0 = L, v0 = n L ḟ, segments sliding on both sides:
/// 2π(1-f)(n-1)/n³ ((n-2) + (n+2) r/L).
pub fn expanding_h_internal<T: Real>(n: usize, r_over_l: T, f: T) -> T {
    debug_assert!(n >= 1);
    debug_assert!(r_over_l >= T::zero() && r_over_l < T::one());
    debug_assert!(f >= T::zero() && f <= T::one());
    let nf = T::lit(n as f64);
    let two = T::lit(2.0);
    T::TAU() * (T::one() - f) * (nf - T::one()) / (nf * nf * nf)
        * ((nf - two) + (nf + two) * r_over_l)
}

/// Telescoping probe, d0 = L, v0 = (n-1) L ḟ, one side:
/// π(1-f)/(n-1) ((n-2) s/L + 2 r/L).
pub fn probe_h_internal<T: Real>(n: usize, r_over_l: T, s_over_l: T, f: T) -> Result<T> {
    if n < 2 {
        return Err(Error::param("n", format!("probe needs at least 2 segments, got {n}")));
    }
    let nf = T::lit(n as f64);
    let two = T::lit(2.0);
    Ok(T::PI() * (T::one() - f) / (nf - T::one()) * ((nf - two) * s_over_l + two * r_over_l))
}

/// How the treadmill's internal dissipation is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreadFrictionModel<T = f64> {
    /// Moving band area only, sliding at the tread speed.
    BandOnly,
    /// Fixed coefficient that reproduces the tabulated treadmill energies.
    Calibrated(T),
}

/// Coefficient reproducing the tabulated aggregation energy split.
pub const CALIBRATED_TREAD_H_INTERNAL: f64 = 19.6;

impl<T: Real> TreadFrictionModel<T> {
    pub fn calibrated() -> Self {
        TreadFrictionModel::Calibrated(T::lit(CALIBRATED_TREAD_H_INTERNAL))
    }
}

impl<T: Real> FromStr for TreadFrictionModel<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "band-only" => Ok(TreadFrictionModel::BandOnly),
            "calibrated" => Ok(Self::calibrated()),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

/// Treadmill sphere with d0 = a, v0 = v_tread. The band-only value is
/// S/a² for a band covering `band_area_fraction` of 4πa².
pub fn tread_h_internal<T: Real>(band_area_fraction: T, model: TreadFrictionModel<T>) -> Result<T> {
    if !(band_area_fraction > T::zero() && band_area_fraction < T::one()) {
        return Err(Error::param(
            "band_area_fraction",
            format!("must lie in (0, 1), got {band_area_fraction}"),
        ));
    }
    Ok(match model {
        TreadFrictionModel::BandOnly => T::TAU() * T::lit(4.0) * band_area_fraction / T::lit(2.0),
        TreadFrictionModel::Calibrated(h) => h,
    })
}
