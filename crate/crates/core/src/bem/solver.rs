//! Collocation solver with constant traction per ring panel.
//!
//! With `f` the force per area a surface exerts on the fluid and `n` the
//! normal into the fluid, each collocation point `x0` satisfies
//!
//! ```text
//! 1/(8πη) Σ_e ∫_e M f s dl = u(x0) - 1/(8π) Σ_b ∫_b (u - c_b)·T·n dS
//! ```
//!
//! where `c_b` is any constant (`u(x0)` on the body holding `x0`). The
//! double layer keeps the solution an exterior one even when `u` is not a
//! rigid motion. Closed bodies carry a uniform-pressure null vector; it is
//! fixed by bordering the system with the reciprocal identity against a
//! point source placed inside the body.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::bem::kernel::{double_layer_ring, ring_kernel, source_traction, source_velocity, Point, Velocity};
use crate::bem::mesh::{BodyKind, RingMesh, SurfaceVelocityBC};
use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussRule;
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings<T = f64> {
    /// Dynamic viscosity, Pa·s.
    pub viscosity: T,
    /// Panels are split until length ≤ ratio × distance to the target.
    pub near_ratio: T,
    pub max_depth: usize,
    /// Geometric grading levels on each half of a self panel.
    pub self_levels: usize,
    /// Relative asymmetric error injected into the kernel; test hook.
    #[doc(hidden)]
    pub kernel_perturbation: T,
}

impl<T: Real> SolverSettings<T> {
    pub fn new(viscosity: T) -> Self {
        SolverSettings {
            viscosity,
            near_ratio: T::one(),
            max_depth: 18,
            self_levels: 24,
            kernel_perturbation: T::zero(),
        }
    }
}

impl<T: Real> Default for SolverSettings<T> {
    fn default() -> Self {
        Self::new(T::one())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TractionSolution<T = f64> {
    /// Force per area each panel exerts on the fluid, Pa.
    pub traction: Vec<Velocity<T>>,
    /// Axial force the fluid exerts on each body, N.
    pub net_axial_force: Vec<T>,
    /// W
    pub dissipated_power: T,
    /// `(body, U)` for every force-free body, m/s.
    pub rigid_speeds: Vec<(usize, T)>,
}

impl<T: Real> TractionSolution<T> {
    pub fn speed_of(&self, body: usize) -> Option<T> {
        self.rigid_speeds.iter().find(|(b, _)| *b == body).map(|&(_, u)| u)
    }
}

/// `Σ_e f_e · ∫_e u dS` with `u` the prescribed data plus any rigid speed
/// recorded in the solution.
pub fn dissipated_power<T: Real>(mesh: &RingMesh<T>, bc: &SurfaceVelocityBC<T>, sol: &TractionSolution<T>) -> T {
    let mut p = T::zero();
    for (e, el) in mesh.elements().iter().enumerate() {
        let mut u = bc.integral(mesh, e);
        if let Some(speed) = sol.speed_of(el.body) {
            u.z += speed * mesh.area(e);
        }
        let f = sol.traction[e];
        p += f.z * u.z + f.s * u.s;
    }
    p
}

/// `∫ u1·t2 dS` for reciprocity checks.
pub fn cross_power<T: Real>(mesh: &RingMesh<T>, bc: &SurfaceVelocityBC<T>, sol: &TractionSolution<T>) -> T {
    dissipated_power(mesh, bc, sol)
}

pub fn assemble_and_solve<T: Real>(
    mesh: &RingMesh<T>,
    bc: &SurfaceVelocityBC<T>,
    settings: &SolverSettings<T>,
) -> Result<TractionSolution<T>> {
    Assembly::new(mesh, bc, &[], settings)?.solve()
}

/// Adds an unknown axial speed and a zero-force condition per free body.
pub fn solve_force_free<T: Real>(
    mesh: &RingMesh<T>,
    slip: &SurfaceVelocityBC<T>,
    free_bodies: &[usize],
    settings: &SolverSettings<T>,
) -> Result<(Vec<T>, TractionSolution<T>)> {
    let sol = Assembly::new(mesh, slip, free_bodies, settings)?.solve()?;
    let speeds = free_bodies.iter().map(|&b| sol.speed_of(b).unwrap_or_else(T::zero)).collect();
    Ok((speeds, sol))
}

/// A mesh, its boundary data and the bodies left free to translate.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T = f64> {
    pub mesh: RingMesh<T>,
    pub bc: SurfaceVelocityBC<T>,
    pub free_bodies: Vec<usize>,
}

impl<T: Real> Problem<T> {
    pub fn solve(&self, settings: &SolverSettings<T>) -> Result<TractionSolution<T>> {
        Assembly::new(&self.mesh, &self.bc, &self.free_bodies, settings)?.solve()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement<T = f64> {
    pub level: usize,
    pub elements: usize,
    pub problem: Problem<T>,
    pub solution: TractionSolution<T>,
    /// Dissipated power at each level tried.
    pub powers: Vec<T>,
}

/// Solves levels `0, 1, ...` of a refinement family until two successive
/// powers differ by less than `target` (relative). An infinite target
/// accepts the coarsest level.
pub fn refine_until<T: Real, F>(
    mut family: F,
    settings: &SolverSettings<T>,
    target: T,
    max_levels: usize,
) -> Result<Refinement<T>>
where
    F: FnMut(usize) -> Result<Problem<T>>,
{
    let mut powers = Vec::new();
    for level in 0..max_levels.max(1) {
        let problem = family(level)?;
        let solution = problem.solve(settings)?;
        let p = solution.dissipated_power;
        powers.push(p);
        let done = if !target.is_finite() {
            true
        } else if level > 0 {
            let prev = powers[level - 1];
            (p - prev).abs() < target * p.abs().max(prev.abs())
        } else {
            false
        };
        if done {
            return Ok(Refinement {
                level,
                elements: problem.mesh.len(),
                problem,
                solution,
                powers,
            });
        }
    }
    Err(Error::NonConvergence {
        target: target.as_f64(),
        sequence: powers.iter().map(|p| p.as_f64()).collect(),
    })
}

struct Assembly<'a, T: Real> {
    mesh: &'a RingMesh<T>,
    bc: &'a SurfaceVelocityBC<T>,
    free: Vec<usize>,
    closed: Vec<usize>,
    /// Closed bodies with nonzero data, which carry a double layer.
    moving: Vec<usize>,
    settings: &'a SolverSettings<T>,
    g4: GaussRule<T>,
    g8: GaussRule<T>,
}

impl<'a, T: Real> Assembly<'a, T> {
    fn new(
        mesh: &'a RingMesh<T>,
        bc: &'a SurfaceVelocityBC<T>,
        free: &[usize],
        settings: &'a SolverSettings<T>,
    ) -> Result<Self> {
        if bc.len() != mesh.len() {
            return Err(Error::DimensionMismatch {
                expected: mesh.len(),
                got: bc.len(),
            });
        }
        if !(settings.viscosity > T::zero()) {
            return Err(Error::param("viscosity", "must be positive"));
        }
        let bodies = mesh.bodies();
        let mut closed = Vec::new();
        let mut moving = Vec::new();
        for (b, body) in bodies.iter().enumerate() {
            match body.kind {
                BodyKind::Closed => {
                    closed.push(b);
                    if !bc.is_zero_on(mesh, b) {
                        moving.push(b);
                    }
                }
                BodyKind::Open => {
                    if !bc.is_zero_on(mesh, b) {
                        return Err(Error::param("bc", format!("open sheet {b} must be at rest")));
                    }
                }
            }
        }
        for &b in free {
            if b >= bodies.len() {
                return Err(Error::IndexOutOfRange { index: b, n: bodies.len() });
            }
            if bodies[b].kind != BodyKind::Closed {
                return Err(Error::param("free_bodies", format!("body {b} is not closed")));
            }
            if !(mesh.body_area(b) > T::zero()) {
                return Err(Error::SingularConstraint(b));
            }
        }
        Ok(Assembly {
            mesh,
            bc,
            free: free.to_vec(),
            closed,
            moving,
            settings,
            g4: GaussRule::new(4),
            g8: GaussRule::new(8),
        })
    }

    fn unknowns(&self) -> usize {
        2 * self.mesh.len() + self.closed.len() + self.free.len()
    }

    /// Integrates `f(param, y) · s(y)` along a panel over `[ta, tb]`,
    /// splitting until pieces are short relative to their distance to `x0`.
    #[allow(clippy::too_many_arguments)]
    fn panel_quad<const N: usize>(
        &self,
        x0: Point<T>,
        p0: Point<T>,
        p1: Point<T>,
        ta: T,
        tb: T,
        depth: usize,
        f: &mut impl FnMut(T, Point<T>) -> Result<[T; N]>,
        out: &mut [T; N],
    ) -> Result<()> {
        let a = p0.lerp(p1, ta);
        let b = p0.lerp(p1, tb);
        let len = a.distance(b);
        let dist = segment_distance(x0, a, b);
        if depth >= self.settings.max_depth || len <= self.settings.near_ratio * dist {
            let rule = if len <= T::lit(0.25) * dist { &self.g4 } else { &self.g8 };
            for (t, w) in rule.mapped(ta, tb) {
                let y = p0.lerp(p1, t);
                let v = f(t, y)?;
                let wt = w * (tb - ta).signum() * p0.distance(p1) * y.s;
                for k in 0..N {
                    out[k] += v[k] * wt;
                }
            }
            return Ok(());
        }
        let mid = (ta + tb) * T::lit(0.5);
        self.panel_quad(x0, p0, p1, ta, mid, depth + 1, f, out)?;
        self.panel_quad(x0, p0, p1, mid, tb, depth + 1, f, out)
    }

    /// Same as [`panel_quad`] for the panel holding `x0` at its midpoint:
    /// geometric grading toward the midpoint. `log_weight` subtracts
    /// `-log_weight · ln|y - x0|` from components `0` and `3` and adds its
    /// exact integral back.
    fn self_quad<const N: usize>(
        &self,
        p0: Point<T>,
        p1: Point<T>,
        log_weight: Option<T>,
        f: &mut impl FnMut(T, Point<T>) -> Result<[T; N]>,
        out: &mut [T; N],
    ) -> Result<()> {
        let h = p0.distance(p1);
        let half = T::lit(0.5);
        let levels = self.settings.self_levels;
        for side in [T::one(), -T::one()] {
            let mut hi = half;
            for k in 0..=levels {
                let lo = if k == levels { T::zero() } else { hi * half };
                for (r, w) in self.g8.mapped(lo, hi) {
                    let t = half + side * r;
                    let y = p0.lerp(p1, t);
                    let v = f(t, y)?;
                    let wt = w * h * y.s;
                    for c in 0..N {
                        out[c] += v[c] * wt;
                    }
                    if let Some(lw) = log_weight {
                        let lg = lw * (r * h).ln() * w * h;
                        out[0] += lg;
                        out[N - 1] += lg;
                    }
                }
                hi = lo;
            }
        }
        if let Some(lw) = log_weight {
            let l = h * half;
            let exact = -lw * T::lit(2.0) * l * (l.ln() - T::one());
            out[0] += exact;
            out[N - 1] += exact;
        }
        Ok(())
    }

    /// `∫_e M(x_i, y) s dl` as `[zz, zs, sz, ss]`.
    fn single_layer(&self, i: usize, e: usize) -> Result<[T; 4]> {
        let x0 = self.mesh.elements()[i].midpoint;
        let (p0, p1) = self.mesh.endpoints(e);
        let eps = self.settings.kernel_perturbation;
        let mut k = |_t: T, y: Point<T>| -> Result<[T; 4]> {
            let m = ring_kernel(x0, y)?;
            Ok([m.zz, m.zs * (T::one() + eps), m.sz, m.ss])
        };
        let mut out = [T::zero(); 4];
        if i == e {
            // M s ≈ -2 ln ρ on the diagonal; y.s factor applied inside, so
            // the subtracted term is 2 ln ρ per unit length
            self.self_quad_log(p0, p1, &mut k, &mut out)?;
        } else {
            self.panel_quad(x0, p0, p1, T::zero(), T::one(), 0, &mut k, &mut out)?;
        }
        Ok(out)
    }

    fn self_quad_log(
        &self,
        p0: Point<T>,
        p1: Point<T>,
        k: &mut impl FnMut(T, Point<T>) -> Result<[T; 4]>,
        out: &mut [T; 4],
    ) -> Result<()> {
        self.self_quad(p0, p1, Some(T::lit(2.0)), k, out)
    }

    /// `Σ_b ∫_b (u - c_b)·T·n dS` at collocation point `i`.
    fn double_layer(&self, i: usize) -> [T; 2] {
        let mesh = self.mesh;
        let el_i = &mesh.elements()[i];
        let x0 = el_i.midpoint;
        let mut total = [T::zero(); 2];
        for &b in &self.moving {
            let range = mesh.bodies()[b].elements.clone();
            let c = if el_i.body == b {
                self.bc.at(i, T::lit(0.5))
            } else {
                let near = range
                    .clone()
                    .min_by(|&p, &q| {
                        let dp = mesh.elements()[p].midpoint.distance(x0);
                        let dq = mesh.elements()[q].midpoint.distance(x0);
                        dp.partial_cmp(&dq).unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .expect("non-empty body");
                self.bc.at(near, T::lit(0.5))
            };
            for e in range {
                let el = &mesh.elements()[e];
                let (p0, p1) = mesh.endpoints(e);
                let mut f = |t: T, y: Point<T>| -> Result<[T; 2]> {
                    Ok(double_layer_ring(&self.g8, x0, y, el.normal, self.bc.at(e, t), c))
                };
                let mut out = [T::zero(); 2];
                let r = if e == i {
                    self.self_quad(p0, p1, None, &mut f, &mut out)
                } else {
                    self.panel_quad(x0, p0, p1, T::zero(), T::one(), 0, &mut f, &mut out)
                };
                debug_assert!(r.is_ok());
                total[0] += out[0];
                total[1] += out[1];
            }
        }
        total
    }

    fn collocation_rows(&self, i: usize) -> Result<(Vec<T>, Vec<T>, [T; 2])> {
        let n = self.unknowns();
        let ne = self.mesh.len();
        let mut rz = vec![T::zero(); n];
        let mut rs = vec![T::zero(); n];
        let c = T::one() / (T::lit(8.0) * T::PI() * self.settings.viscosity);
        for e in 0..ne {
            let [zz, zs, sz, ss] = self.single_layer(i, e)?;
            rz[2 * e] = zz * c;
            rz[2 * e + 1] = zs * c;
            rs[2 * e] = sz * c;
            rs[2 * e + 1] = ss * c;
        }
        let el = &self.mesh.elements()[i];
        if let Some(k) = self.closed.iter().position(|&b| b == el.body) {
            rz[2 * ne + k] = el.normal.z;
            rs[2 * ne + k] = el.normal.s;
        }
        if let Some(k) = self.free.iter().position(|&b| b == el.body) {
            rz[2 * ne + self.closed.len() + k] = -T::one();
        }
        let u = self.bc.at(i, T::lit(0.5));
        let dl = self.double_layer(i);
        let k8 = T::one() / (T::lit(8.0) * T::PI());
        Ok((rz, rs, [u.z - k8 * dl[0], u.s - k8 * dl[1]]))
    }

    /// Reciprocal identity with a unit point source inside closed body `b`.
    fn pinning_row(&self, b: usize) -> Result<(Vec<T>, T)> {
        let mesh = self.mesh;
        let n = self.unknowns();
        let ne = mesh.len();
        let zs = mesh.bodies()[b].interior.expect("closed body has an interior point");
        let src = Point::new(zs, T::zero());
        let eta = self.settings.viscosity;
        let mut row = vec![T::zero(); n];
        let mut rhs = T::zero();
        let tau = T::TAU();
        for e in 0..ne {
            let el = &mesh.elements()[e];
            let (p0, p1) = mesh.endpoints(e);
            let mut f = |t: T, y: Point<T>| -> Result<[T; 4]> {
                let v = source_velocity(zs, y);
                let ft = source_traction(zs, y, el.normal, eta);
                let u = self.bc.at(e, t);
                Ok([v.z, v.s, u.z * ft.z + u.s * ft.s, ft.z])
            };
            let mut out = [T::zero(); 4];
            self.panel_quad(src, p0, p1, T::zero(), T::one(), 0, &mut f, &mut out)?;
            row[2 * e] = out[0] * tau;
            row[2 * e + 1] = out[1] * tau;
            rhs += out[2] * tau;
            if let Some(k) = self.free.iter().position(|&fb| fb == el.body) {
                row[2 * ne + self.closed.len() + k] -= out[3] * tau;
            }
        }
        Ok((row, rhs))
    }

    fn solve(&self) -> Result<TractionSolution<T>> {
        let mesh = self.mesh;
        let ne = mesh.len();
        let n = self.unknowns();
        let rows: Vec<_> = (0..ne)
            .into_par_iter()
            .map(|i| self.collocation_rows(i))
            .collect::<Result<Vec<_>>>()?;
        let mut a = DMatrix::<T>::zeros(n, n);
        let mut rhs = DVector::<T>::zeros(n);
        for (i, (rz, rs, r)) in rows.into_iter().enumerate() {
            for j in 0..n {
                a[(2 * i, j)] = rz[j];
                a[(2 * i + 1, j)] = rs[j];
            }
            rhs[2 * i] = r[0];
            rhs[2 * i + 1] = r[1];
        }
        for (k, &b) in self.closed.iter().enumerate() {
            let (row, r) = self.pinning_row(b)?;
            for j in 0..n {
                a[(2 * ne + k, j)] = row[j];
            }
            rhs[2 * ne + k] = r;
        }
        for (k, &b) in self.free.iter().enumerate() {
            let r = 2 * ne + self.closed.len() + k;
            for e in mesh.bodies()[b].elements.clone() {
                a[(r, 2 * e)] = mesh.area(e);
            }
        }
        let x = self.linear_solve(a, rhs)?;
        let traction: Vec<Velocity<T>> = (0..ne).map(|e| Velocity { z: x[2 * e], s: x[2 * e + 1] }).collect();
        let rigid_speeds: Vec<(usize, T)> = self
            .free
            .iter()
            .enumerate()
            .map(|(k, &b)| (b, x[2 * ne + self.closed.len() + k]))
            .collect();
        let net_axial_force = (0..mesh.bodies().len())
            .map(|b| {
                mesh.bodies()[b]
                    .elements
                    .clone()
                    .fold(T::zero(), |acc, e| acc - traction[e].z * mesh.area(e))
            })
            .collect();
        let mut sol = TractionSolution {
            traction,
            net_axial_force,
            dissipated_power: T::zero(),
            rigid_speeds,
        };
        sol.dissipated_power = dissipated_power(mesh, self.bc, &sol);
        Ok(sol)
    }

    fn linear_solve(&self, mut a: DMatrix<T>, mut rhs: DVector<T>) -> Result<DVector<T>> {
        let n = a.nrows();
        for i in 0..n {
            let m = a.row(i).iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if !(m > T::zero()) {
                return Err(self.singular());
            }
            let inv = T::one() / m;
            for j in 0..n {
                a[(i, j)] *= inv;
            }
            rhs[i] *= inv;
        }
        let mut cscale = vec![T::one(); n];
        for j in 0..n {
            let m = a.column(j).iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if !(m > T::zero()) {
                return Err(self.singular());
            }
            cscale[j] = T::one() / m;
            for i in 0..n {
                a[(i, j)] *= cscale[j];
            }
        }
        let lu = a.lu();
        let u = lu.u();
        let (dmin, dmax) = (0..n).fold((T::max_value().unwrap_or(T::one()), T::zero()), |(lo, hi), i| {
            let d = u[(i, i)].abs();
            (lo.min(d), hi.max(d))
        });
        if !(dmin > dmax * T::eps() * T::lit(16.0)) {
            return Err(self.singular());
        }
        let mut y = lu.solve(&rhs).ok_or_else(|| self.singular())?;
        for j in 0..n {
            y[j] *= cscale[j];
            if !y[j].is_finite() {
                return Err(self.singular());
            }
        }
        Ok(y)
    }

    fn singular(&self) -> Error {
        let (lo, hi) = self.mesh.panel_range();
        Error::SingularSystem {
            unknowns: self.unknowns(),
            elements: self.mesh.len(),
            min_panel: lo.as_f64(),
            max_panel: hi.as_f64(),
        }
    }
}

fn segment_distance<T: Real>(x: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let (dz, ds) = (b.z - a.z, b.s - a.s);
    let l2 = dz * dz + ds * ds;
    let t = if l2 > T::zero() {
        (((x.z - a.z) * dz + (x.s - a.s) * ds) / l2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    x.distance(a.lerp(b, t))
}
