//! Azimuthally integrated Stokes kernels for ring sources.
//!
//! Points live in the meridian half-plane `(z, s)`, `s ≥ 0`. For an
//! evaluation point `x0 = (z0, s0)` and a source ring `(z, s)` write
//! `d = z0 - z`, `a = d² + s0² + s²`, `b = 2 s0 s` and
//! `I_mn = ∫₀^{2π} cosⁿφ / (a - b cosφ)^{m/2} dφ`.

use crate::error::{Error, Result};
use crate::numerics::elliptic::complete_elliptic;
use crate::numerics::quadrature::GaussRule;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T = f64> {
    pub z: T,
    pub s: T,
}

impl<T: Real> Point<T> {
    pub fn new(z: T, s: T) -> Self {
        Point { z, s }
    }

    pub fn distance(self, other: Self) -> T {
        let dz = self.z - other.z;
        let ds = self.s - other.s;
        (dz * dz + ds * ds).sqrt()
    }

    pub fn lerp(self, other: Self, t: T) -> Self {
        Point {
            z: self.z + (other.z - self.z) * t,
            s: self.s + (other.s - self.s) * t,
        }
    }
}

/// Below this `b/a` the ring integrals use their power series.
const SERIES_THRESHOLD: f64 = 0.3;

/// The ring integrals `I10, I11, I30, I31` and `I31 - I30`, the latter
/// formed without cancellation near the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingIntegrals<T> {
    pub i10: T,
    pub i11: T,
    pub i30: T,
    pub i31: T,
    pub d31: T,
}

/// Fails when the evaluation point lies on the ring (`a = b`).
pub fn ring_integrals<T: Real>(eval: Point<T>, source: Point<T>) -> Result<RingIntegrals<T>> {
    let d = eval.z - source.z;
    let d2 = d * d;
    let amb = d2 + (eval.s - source.s) * (eval.s - source.s);
    let apb = d2 + (eval.s + source.s) * (eval.s + source.s);
    let a = d2 + eval.s * eval.s + source.s * source.s;
    let b = T::lit(2.0) * eval.s * source.s;
    if !(amb > T::zero()) || !(amb > apb * T::eps() * T::eps()) {
        return Err(Error::SingularConfiguration {
            z: eval.z.as_f64(),
            s: eval.s.as_f64(),
        });
    }
    let beta = b / a;
    if beta < T::lit(SERIES_THRESHOLD) {
        return Ok(series(a, beta));
    }
    let m = T::lit(2.0) * b / apb;
    let m1 = amb / apb;
    let (k, e) = complete_elliptic(m, m1);
    let four = T::lit(4.0);
    let sq = apb.sqrt();
    let im10 = four * sq * e;
    let i10 = four * k / sq;
    let i30 = four * e / (amb * sq);
    let i11 = (a * i10 - im10) / b;
    let d31 = (amb * i30 - i10) / b;
    Ok(RingIntegrals {
        i10,
        i11,
        i30,
        i31: i30 + d31,
        d31,
    })
}

fn series<T: Real>(a: T, beta: T) -> RingIntegrals<T> {
    // I_mn = 2π a^{-m/2} Σ_k (m/2)_k / k! β^k C(n+k), C(j) = mean of cos^j
    let tol = T::eps() * T::lit(0.25);
    let sum = |p: T, n: usize| -> T {
        // only terms with n + k even survive; C(e+2) = C(e) (e+1)/(e+2)
        let mut k = n % 2;
        let mut e = n + k;
        let mut ce = T::one();
        for j in (0..e).step_by(2) {
            ce = ce * T::lit((j + 1) as f64) / T::lit((j + 2) as f64);
        }
        let mut ck = T::one();
        for j in 0..k {
            ck = ck * (p + T::lit(j as f64)) / T::lit((j + 1) as f64);
        }
        let mut bk = if k == 1 { beta } else { T::one() };
        let mut total = T::zero();
        while k < 400 {
            let term = ck * bk * ce;
            total += term;
            if k > 4 && term.abs() <= tol * total.abs() {
                break;
            }
            for j in k..k + 2 {
                ck = ck * (p + T::lit(j as f64)) / T::lit((j + 1) as f64);
            }
            bk = bk * beta * beta;
            ce = ce * T::lit((e + 1) as f64) / T::lit((e + 2) as f64);
            e += 2;
            k += 2;
        }
        total
    };
    let half = T::lit(0.5);
    let three_half = T::lit(1.5);
    let tau = T::TAU();
    let r1 = tau / a.sqrt();
    let r3 = r1 / a;
    let i30 = r3 * sum(three_half, 0);
    let i31 = r3 * sum(three_half, 1);
    RingIntegrals {
        i10: r1 * sum(half, 0),
        i11: r1 * sum(half, 1),
        i30,
        i31,
        d31: i31 - i30,
    }
}

/// `u_α(x0) = 1/(8πη) ∫ M_αβ(x0, y) f_β(y) s(y) dl(y)`: the Stokeslet
/// integrated over the azimuth of the source ring, meridian components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RingKernel<T = f64> {
    pub zz: T,
    pub zs: T,
    pub sz: T,
    pub ss: T,
}

impl<T: Real> RingKernel<T> {
    pub fn scale(self, k: T) -> Self {
        RingKernel {
            zz: self.zz * k,
            zs: self.zs * k,
            sz: self.sz * k,
            ss: self.ss * k,
        }
    }

    pub fn add(self, o: Self) -> Self {
        RingKernel {
            zz: self.zz + o.zz,
            zs: self.zs + o.zs,
            sz: self.sz + o.sz,
            ss: self.ss + o.ss,
        }
    }
}

pub fn ring_kernel<T: Real>(eval: Point<T>, source: Point<T>) -> Result<RingKernel<T>> {
    if !(source.s > T::zero()) {
        return Err(Error::param("source_ring", format!("radius must be positive, got {}", source.s)));
    }
    let i = ring_integrals(eval, source)?;
    let d = eval.z - source.z;
    let (s0, s) = (eval.s, source.s);
    // M_ss = I11 + (s0²+s²) I31 - s0 s (I30 + I32) reduces, after an
    // integration by parts of the sin² term, to I11 - d² I31.
    Ok(RingKernel {
        zz: i.i10 + d * d * i.i30,
        zs: d * (s0 * i.d31 + (s0 - s) * i.i30),
        sz: d * ((s0 - s) * i.i30 - s * i.d31),
        ss: i.i11 - d * d * i.i31,
    })
}

/// Velocity data carried into the double-layer integrand.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity<T = f64> {
    pub z: T,
    pub s: T,
}

/// `∫₀^{2π} (u(x) - c)_i T_ijk(x - x0) n_k(x) dφ` for `j` in the meridian
/// plane of `x0`, with `T_ijk(ξ) = -6 ξ_i ξ_j ξ_k / |ξ|⁵`. `u` and `n` are
/// the meridian components at the source ring point `x`; `c` is a constant
/// vector lying in the plane of `x0`.
pub fn double_layer_ring<T: Real>(
    rule: &GaussRule<T>,
    eval: Point<T>,
    source: Point<T>,
    normal: Velocity<T>,
    u: Velocity<T>,
    c: Velocity<T>,
) -> [T; 2] {
    let dz = source.z - eval.z;
    let (s0, s) = (eval.s, source.s);
    let rho = eval.distance(source);
    let wz = u.z - c.z;
    let mut out = [T::zero(); 2];
    let pi = T::PI();
    let integrate = |lo: T, hi: T, out: &mut [T; 2]| {
        for (phi, w) in rule.mapped(lo, hi) {
            let cs = phi.cos();
            let xs = s * cs - s0;
            let r2 = dz * dz + s * s + s0 * s0 - T::lit(2.0) * s * s0 * cs;
            if !(r2 > T::zero()) {
                continue;
            }
            let r5 = r2 * r2 * r2.sqrt();
            let wxi = wz * dz + u.s * (s - s0 * cs) - c.s * xs;
            let nxi = normal.z * dz + normal.s * (s - s0 * cs);
            let f = T::lit(-6.0) * wxi * nxi / r5 * w;
            out[0] += f * dz;
            out[1] += f * xs;
        }
    };
    // graded breakpoints in φ toward the near-singular direction φ = 0
    let mut lo = T::zero();
    let cap = pi / T::lit(3.0);
    let mut width = if s > T::zero() { (rho / s).max(T::lit(1e-12)).min(cap) } else { cap };
    let mut pieces = 0;
    while lo < pi {
        let hi = (lo + width).min(pi);
        integrate(lo, hi, &mut out);
        lo = hi;
        if pieces > 0 {
            width = (width + width).min(cap);
        }
        pieces += 1;
    }
    [out[0] + out[0], out[1] + out[1]]
}

/// Velocity of a unit-flux point source on the axis at `z = source_z`.
pub fn source_velocity<T: Real>(source_z: T, x: Point<T>) -> Velocity<T> {
    let xz = x.z - source_z;
    let r2 = xz * xz + x.s * x.s;
    let r3 = r2 * r2.sqrt();
    let k = T::one() / (T::lit(4.0) * T::PI() * r3);
    Velocity { z: xz * k, s: x.s * k }
}

/// Force per area that a surface with normal `n` exerts on the fluid in
/// the source flow of [`source_velocity`]: `-(η/2π)(n/r³ - 3ξ(ξ·n)/r⁵)`.
pub fn source_traction<T: Real>(source_z: T, x: Point<T>, n: Velocity<T>, viscosity: T) -> Velocity<T> {
    let xz = x.z - source_z;
    let r2 = xz * xz + x.s * x.s;
    let r = r2.sqrt();
    let r3 = r2 * r;
    let r5 = r3 * r2;
    let xn = xz * n.z + x.s * n.s;
    let k = -viscosity / T::TAU();
    let three = T::lit(3.0);
    Velocity {
        z: k * (n.z / r3 - three * xz * xn / r5),
        s: k * (n.s / r3 - three * x.s * xn / r5),
    }
}
