//! Meshes and surface velocities for the expanding robot, the telescoping
//! probe and the treadmill sphere.

use serde::{Deserialize, Serialize};

use crate::bem::kernel::{Point, Velocity};
use crate::bem::mesh::{mesh_bodies, BodyKind, Part, Primitive, SizeField, TaggedMesh};
use crate::bem::solver::Problem;
use crate::error::{Error, Result};
use crate::real::Real;

/// Panel-size controls shared by the builders; `refine = 2` halves every
/// panel length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshOptions<T = f64> {
    pub refine: T,
    /// Wall disc radius in sphere radii.
    pub wall_radius: T,
}

impl<T: Real> Default for MeshOptions<T> {
    fn default() -> Self {
        MeshOptions {
            refine: T::one(),
            wall_radius: T::lit(30.0),
        }
    }
}

fn check_fraction<T: Real>(f: T) -> Result<()> {
    if f >= T::zero() && f <= T::one() {
        Ok(())
    } else {
        Err(Error::param("f", format!("must lie in [0, 1], got {f}")))
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {v}")))
    }
}

/// Cylinder of radius and half-length `L` with telescoping cones on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpandingRobotSpec<T = f64> {
    pub length: T,
    pub segments: usize,
    pub inner_radius: T,
    pub thickness: T,
    pub fdot: T,
}

impl<T: Real> ExpandingRobotSpec<T> {
    /// Derives the shell thickness from `r = L - n s`.
    pub fn new(length: T, segments: usize, inner_radius: T, fdot: T) -> Result<Self> {
        if segments < 1 {
            return Err(Error::param("segments", "need at least one"));
        }
        let thickness = (length - inner_radius) / T::lit(segments as f64);
        let spec = ExpandingRobotSpec {
            length,
            segments,
            inner_radius,
            thickness,
            fdot,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        positive("length", self.length)?;
        positive("inner_radius", self.inner_radius)?;
        positive("thickness", self.thickness)?;
        if !(self.fdot >= T::zero()) {
            return Err(Error::param("fdot", "must be nonnegative"));
        }
        if self.segments < 1 {
            return Err(Error::param("segments", "need at least one"));
        }
        let r = self.length - T::lit(self.segments as f64) * self.thickness;
        if !((r - self.inner_radius).abs() <= T::lit(1e-9) * self.length) {
            return Err(Error::param("inner_radius", format!("must equal L - n s = {r}")));
        }
        Ok(())
    }

    /// `n L ḟ`
    pub fn tip_speed(&self) -> T {
        T::lit(self.segments as f64) * self.length * self.fdot
    }

    /// `dv0/dḟ = n L`
    pub fn conversion(&self) -> T {
        T::lit(self.segments as f64) * self.length
    }

    pub fn r_over_l(&self) -> T {
        self.inner_radius / self.length
    }
}

/// Axial speed ramps linearly along the cone meridian from the base (0) to
/// the tip; the tip disc moves rigidly. Mirror image on the lower side.
pub fn expanding_robot_mesh<T: Real>(spec: &ExpandingRobotSpec<T>, f: T, opts: &MeshOptions<T>) -> Result<Problem<T>> {
    spec.validate()?;
    check_fraction(f)?;
    let l = spec.length;
    let r = spec.inner_radius;
    let cone = T::lit(spec.segments as f64) * f * l;
    let tip = l + cone;
    let v0 = spec.tip_speed();
    let p = Point::new;
    let parts = vec![
        Part::new(Primitive::Line { from: p(tip, T::zero()), to: p(tip, r) }),
        Part::new(Primitive::Line { from: p(tip, r), to: p(l, l) }),
        Part::new(Primitive::Line { from: p(l, l), to: p(-l, l) }),
        Part::new(Primitive::Line { from: p(-l, l), to: p(-tip, r) }),
        Part::new(Primitive::Line { from: p(-tip, r), to: p(-tip, T::zero()) }),
    ];
    let lens: Vec<T> = parts.iter().map(|q| q.primitive.length()).collect();
    let refine = opts.refine;
    let h_max = l / T::lit(10.0);
    let h_corner = l / T::lit(80.0);
    let g = T::lit(0.15);
    let size = SizeField::uniform(h_max)
        .with_focus(p(tip, r), h_corner, g)
        .with_focus(p(l, l), h_corner, g)
        .with_focus(p(-l, l), h_corner, g)
        .with_focus(p(-tip, r), h_corner, g)
        .refined(refine);
    let parts = parts.into_iter().map(|q| q.min_panels(4)).collect();
    let tagged = mesh_bodies(&[(BodyKind::Closed, parts)], &size)?;
    let bc = tagged.bc(|_, part, sigma, _| {
        let u = match part {
            0 => v0,
            1 => v0 * (T::one() - sigma / lens[1]),
            2 => T::zero(),
            3 => -v0 * sigma / lens[3],
            _ => -v0,
        };
        Velocity { z: u, s: T::zero() }
    });
    Ok(Problem {
        mesh: tagged.mesh,
        bc,
        free_bodies: Vec::new(),
    })
}

/// Telescoping cone on a stationary spherical body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec<T = f64> {
    pub length: T,
    pub segments: usize,
    pub inner_radius: T,
    pub thickness: T,
    pub body_radius: T,
    pub fdot: T,
}

impl<T: Real> ProbeSpec<T> {
    pub fn validate(&self) -> Result<()> {
        positive("length", self.length)?;
        positive("inner_radius", self.inner_radius)?;
        positive("thickness", self.thickness)?;
        positive("body_radius", self.body_radius)?;
        if self.segments < 2 {
            return Err(Error::param("segments", "probe needs at least two"));
        }
        if !(self.fdot >= T::zero()) {
            return Err(Error::param("fdot", "must be nonnegative"));
        }
        if !(self.base_radius() < self.body_radius) {
            return Err(Error::param(
                "body_radius",
                format!("probe base {} must be smaller than the body", self.base_radius()),
            ));
        }
        Ok(())
    }

    /// `r + (n-1) s`
    pub fn base_radius(&self) -> T {
        self.inner_radius + T::lit((self.segments - 1) as f64) * self.thickness
    }

    /// `(n-1) L ḟ`
    pub fn tip_speed(&self) -> T {
        self.conversion() * self.fdot
    }

    pub fn conversion(&self) -> T {
        T::lit((self.segments - 1) as f64) * self.length
    }

    pub fn r_over_l(&self) -> T {
        self.inner_radius / self.length
    }

    pub fn s_over_l(&self) -> T {
        self.thickness / self.length
    }
}

pub fn probe_mesh<T: Real>(spec: &ProbeSpec<T>, f: T, opts: &MeshOptions<T>) -> Result<Problem<T>> {
    spec.validate()?;
    check_fraction(f)?;
    let big_r = spec.body_radius;
    let b = spec.base_radius();
    let r = spec.inner_radius;
    let zb = (big_r * big_r - b * b).sqrt();
    let tip = zb + T::lit((spec.segments - 1) as f64) * f * spec.length;
    let v0 = spec.tip_speed();
    let p = Point::new;
    let theta_b = b.atan2(zb);
    let parts = vec![
        Part::new(Primitive::Line { from: p(tip, T::zero()), to: p(tip, r) }).min_panels(6),
        Part::new(Primitive::Line { from: p(tip, r), to: p(zb, b) }).min_panels(6),
        Part::new(Primitive::Arc { center: T::zero(), radius: big_r, from: theta_b, to: T::PI() }).min_panels(8),
    ];
    let cone_len = parts[1].primitive.length();
    let h_tip = r / T::lit(10.0);
    let size = SizeField::uniform(big_r / T::lit(12.0))
        .with_focus(p(tip, r), h_tip, T::lit(0.15))
        .with_focus(p(zb, b), h_tip, T::lit(0.15))
        .refined(opts.refine);
    let tagged = mesh_bodies(&[(BodyKind::Closed, parts)], &size)?;
    let bc = tagged.bc(|_, part, sigma, _| {
        let u = match part {
            0 => v0,
            1 => v0 * (T::one() - sigma / cone_len),
            _ => T::zero(),
        };
        Velocity { z: u, s: T::zero() }
    });
    Ok(Problem {
        mesh: tagged.mesh,
        bc,
        free_bodies: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproachCase {
    Wall,
    TwoSpheres,
}

impl ApproachCase {
    pub fn as_str(self) -> &'static str {
        match self {
            ApproachCase::Wall => "wall",
            ApproachCase::TwoSpheres => "two-spheres",
        }
    }
}

impl std::str::FromStr for ApproachCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wall" => Ok(ApproachCase::Wall),
            "two-spheres" => Ok(ApproachCase::TwoSpheres),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

/// Sphere propelled by tangential slip in an equatorial band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreadSphereSpec<T = f64> {
    pub radius: T,
    pub band_area_fraction: T,
    /// Arclength of each linear ramp, centred on the band edge.
    pub ramp_width: T,
    pub v_tread: T,
    pub case: ApproachCase,
    /// Centre-to-wall (or centre-to-midplane) distance over the radius.
    pub delta: T,
}

/// Smallest surface gap meshed, in sphere radii.
pub const MIN_GAP: f64 = 5e-3;

impl<T: Real> TreadSphereSpec<T> {
    pub fn validate(&self) -> Result<()> {
        positive("radius", self.radius)?;
        if !(self.band_area_fraction > T::zero() && self.band_area_fraction < T::one()) {
            return Err(Error::param(
                "band_area_fraction",
                format!("must lie in (0, 1), got {}", self.band_area_fraction),
            ));
        }
        if !(self.v_tread >= T::zero()) {
            return Err(Error::param("v_tread", "must be nonnegative"));
        }
        let (t1, t2) = self.band_angles();
        if !(self.ramp_width >= T::zero() && self.ramp_width < self.radius * (t2 - t1)) {
            return Err(Error::param("ramp_width", "must be shorter than the band"));
        }
        if !(self.ramp_width * T::lit(0.5) < self.radius * t1) {
            return Err(Error::param("ramp_width", "ramp would reach the pole"));
        }
        let gap = self.gap();
        let min = self.radius * T::lit(MIN_GAP);
        if !(gap >= min) {
            return Err(Error::GapTooSmall {
                gap: gap.as_f64(),
                min: min.as_f64(),
            });
        }
        Ok(())
    }

    /// Band polar angles: the band `|cos θ| ≤ fraction` holds that fraction
    /// of the surface.
    pub fn band_angles(&self) -> (T, T) {
        let t1 = self.band_area_fraction.acos();
        (T::PI() - t1, t1).min_max()
    }

    /// Surface-to-surface gap.
    pub fn gap(&self) -> T {
        let g = (self.delta - T::one()) * self.radius;
        match self.case {
            ApproachCase::Wall => g,
            ApproachCase::TwoSpheres => g + g,
        }
    }

    /// Slip profile `g(θ)` in `[0, 1]`.
    pub fn slip_profile(&self, theta: T) -> T {
        let (t1, t2) = self.band_angles();
        let w = self.ramp_width / self.radius;
        let half = T::lit(0.5);
        if w <= T::zero() {
            return if theta >= t1 && theta <= t2 { T::one() } else { T::zero() };
        }
        let up = ((theta - (t1 - w * half)) / w).max(T::zero()).min(T::one());
        let down = (((t2 + w * half) - theta) / w).max(T::zero()).min(T::one());
        up.min(down)
    }
}

trait MinMax {
    fn min_max(self) -> Self;
}

impl<T: Real> MinMax for (T, T) {
    fn min_max(self) -> Self {
        (self.0.min(self.1), self.0.max(self.1))
    }
}

/// Sphere arc split at the ramp ends so that no panel straddles a kink in
/// the slip profile.
fn band_arc<T: Real>(spec: &TreadSphereSpec<T>, center: T, cap: T) -> Vec<Part<T>> {
    let (t1, t2) = spec.band_angles();
    let w = spec.ramp_width / spec.radius * T::lit(0.5);
    let mut cuts = vec![T::zero()];
    if w > T::zero() {
        cuts.extend([t1 - w, t1 + w, t2 - w, t2 + w]);
    } else {
        cuts.extend([t1, t2]);
    }
    cuts.push(T::PI());
    cuts.windows(2)
        .map(|c| {
            Part::new(Primitive::Arc {
                center,
                radius: spec.radius,
                from: c[0],
                to: c[1],
            })
            .cap(cap)
        })
        .collect()
}

fn tread_slip<T: Real>(spec: &TreadSphereSpec<T>, center: T, sign: T, x: Point<T>) -> Velocity<T> {
    let theta = x.s.atan2(x.z - center);
    let mag = sign * spec.v_tread * spec.slip_profile(theta);
    // e_θ = (-sin θ, cos θ) in (z, s)
    Velocity {
        z: -mag * theta.sin(),
        s: mag * theta.cos(),
    }
}

/// Sphere 0 sits at `z = -δa` and swims toward `+z`; the wall is the
/// plane `z = 0`, the partner sphere the mirror image about it.
pub fn tread_sphere_mesh<T: Real>(spec: &TreadSphereSpec<T>, opts: &MeshOptions<T>) -> Result<Problem<T>> {
    spec.validate()?;
    positive("wall_radius", opts.wall_radius)?;
    let a = spec.radius;
    let gap = spec.gap();
    let one = T::one();
    let center = -spec.delta * a;
    let p = Point::new;
    let (t1, t2) = spec.band_angles();
    let lub = (T::lit(2.0) * gap * a).sqrt();
    let h_gap = (lub / T::lit(8.0)).min(gap);
    let h_ramp = (spec.ramp_width / T::lit(4.0)).max(a * T::lit(2e-3)).min(a / T::lit(40.0));
    let h_sphere = a / T::lit(20.0);
    let g = T::lit(0.1);
    let mut size = SizeField::uniform(T::lit(3.0) * a)
        .with_focus(p(center + a, T::zero()), h_gap, g)
        .with_focus(p(center + a * t1.cos(), a * t1.sin()), h_ramp, T::lit(0.2))
        .with_focus(p(center + a * t2.cos(), a * t2.sin()), h_ramp, T::lit(0.2));
    let arc = |c: T| band_arc(spec, c, h_sphere);
    let bodies = match spec.case {
        ApproachCase::Wall => {
            size = size.with_focus(p(T::zero(), T::zero()), h_gap, g);
            let wall = Part::new(Primitive::Line {
                from: p(T::zero(), T::zero()),
                to: p(T::zero(), opts.wall_radius * a),
            });
            vec![(BodyKind::Closed, arc(center)), (BodyKind::Open, vec![wall])]
        }
        ApproachCase::TwoSpheres => {
            size = size
                .with_focus(p(-center - a, T::zero()), h_gap, g)
                .with_focus(p(-center - a * t1.cos(), a * t1.sin()), h_ramp, T::lit(0.2))
                .with_focus(p(-center - a * t2.cos(), a * t2.sin()), h_ramp, T::lit(0.2));
            vec![(BodyKind::Closed, arc(center)), (BodyKind::Closed, arc(-center))]
        }
    };
    let tagged: TaggedMesh<T> = mesh_bodies(&bodies, &size.refined(opts.refine))?;
    let bc = tagged.bc(|body, _, _, x| match (spec.case, body) {
        (_, 0) => tread_slip(spec, center, one, x),
        // the partner mirrors the slip so the pair approaches
        (ApproachCase::TwoSpheres, 1) => tread_slip(spec, -center, -one, x),
        _ => Velocity::default(),
    });
    let free_bodies = match spec.case {
        ApproachCase::Wall => vec![0],
        ApproachCase::TwoSpheres => vec![0, 1],
    };
    Ok(Problem {
        mesh: tagged.mesh,
        bc,
        free_bodies,
    })
}

/// Isolated treadmill sphere (no wall, no partner).
pub fn isolated_tread_sphere<T: Real>(spec: &TreadSphereSpec<T>, opts: &MeshOptions<T>) -> Result<Problem<T>> {
    let a = spec.radius;
    let (t1, t2) = spec.band_angles();
    let p = Point::new;
    let h_ramp = (spec.ramp_width / T::lit(4.0)).max(a * T::lit(2e-3)).min(a / T::lit(40.0));
    let size = SizeField::uniform(a / T::lit(20.0))
        .with_focus(p(a * t1.cos(), a * t1.sin()), h_ramp, T::lit(0.2))
        .with_focus(p(a * t2.cos(), a * t2.sin()), h_ramp, T::lit(0.2))
        .refined(opts.refine);
    let tagged = mesh_bodies(&[(BodyKind::Closed, band_arc(spec, T::zero(), a))], &size)?;
    let bc = tagged.bc(|_, _, _, x| tread_slip(spec, T::zero(), T::one(), x));
    Ok(Problem {
        mesh: tagged.mesh,
        bc,
        free_bodies: vec![0],
    })
}

/// `P / (η d0 v0²)`
pub fn h_fluid_from_solution<T: Real>(power: T, viscosity: T, size: T, speed: T) -> Result<T> {
    let den = viscosity * size * speed * speed;
    if !(den > T::zero()) || !den.is_finite() {
        return Err(Error::param("speed", "zero denominator in h_fluid"));
    }
    if !(power >= T::zero()) {
        return Err(Error::param("power", format!("must be nonnegative, got {power}")));
    }
    Ok(power / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::solver::SolverSettings;
    use approx::assert_relative_eq;

    fn expanding() -> ExpandingRobotSpec {
        ExpandingRobotSpec::new(1e-6, 5, 0.75e-6, 500.0).unwrap()
    }

    fn probe() -> ProbeSpec {
        ProbeSpec {
            length: 1e-6,
            segments: 5,
            inner_radius: 50e-9,
            thickness: 20e-9,
            body_radius: 1e-6,
            fdot: 500.0,
        }
    }

    fn tread(case: ApproachCase, delta: f64) -> TreadSphereSpec {
        TreadSphereSpec {
            radius: 1.0,
            band_area_fraction: 0.5,
            ramp_width: 0.05,
            v_tread: 1.0,
            case,
            delta,
        }
    }

    #[test]
    fn tip_speeds() {
        assert_relative_eq!(expanding().tip_speed(), 2.5e-3, max_relative = 1e-12);
        assert_relative_eq!(probe().tip_speed(), 2e-3, max_relative = 1e-12);
        assert!(ExpandingRobotSpec::new(1.0, 5, 1.2, 1.0).is_err());
        assert!(ProbeSpec { body_radius: 0.1e-6, ..probe() }.validate().is_err());
    }

    #[test]
    fn meridian_grows_with_extension() {
        let o = MeshOptions::default();
        let mut prev = (0.0, 0.0);
        for f in [0.0, 0.1, 0.25, 0.5, 0.9] {
            let e = expanding_robot_mesh(&expanding(), f, &o).unwrap().mesh.arclength(0);
            let p = probe_mesh(&probe(), f, &o).unwrap().mesh.arclength(0);
            assert!(e > prev.0 && p > prev.1, "f={f}");
            prev = (e, p);
        }
        assert!(expanding_robot_mesh(&expanding(), 1.5, &o).is_err());
    }

    #[test]
    fn expanding_velocities() {
        let spec = expanding();
        let pb = expanding_robot_mesh(&spec, 0.3, &MeshOptions::default()).unwrap();
        let v = spec.tip_speed();
        let mut zmax: f64 = 0.0;
        for (e, el) in pb.mesh.elements().iter().enumerate() {
            let u = pb.bc.at(e, 0.5);
            assert_eq!(u.s, 0.0);
            assert!(u.z.abs() <= v * (1.0 + 1e-12));
            // cylinder at rest, ends move outward
            if el.midpoint.z.abs() < spec.length {
                assert_eq!(u.z, 0.0);
            } else {
                assert!(u.z * el.midpoint.z >= 0.0);
            }
            zmax = zmax.max(el.midpoint.z);
        }
        assert!(zmax > spec.length * (1.0 + 5.0 * 0.3) * 0.99);
        // zero-length cones: flat end discs move at the tip speed
        let flat = expanding_robot_mesh(&spec, 0.0, &MeshOptions::default()).unwrap();
        let top = flat.bc.at(0, 0.5);
        assert_relative_eq!(top.z, v, max_relative = 1e-12);
    }

    #[test]
    fn probe_tip_radius() {
        let spec = probe();
        let pb = probe_mesh(&spec, 0.5, &MeshOptions::default()).unwrap();
        let nodes = pb.mesh.nodes();
        // the first panel is the tip disc, from the axis out to r
        let rim = pb.mesh.endpoints(0).1;
        assert_eq!(nodes[0].s, 0.0);
        let tip_panels: f64 = (0..pb.mesh.len())
            .take_while(|&e| pb.mesh.endpoints(e).1.s <= spec.inner_radius * (1.0 + 1e-9))
            .map(|e| pb.mesh.endpoints(e).1.s)
            .fold(0.0, f64::max);
        assert!(rim.s <= spec.inner_radius * (1.0 + 1e-9));
        assert_relative_eq!(tip_panels, spec.inner_radius, max_relative = 1e-9);
        assert_relative_eq!(pb.bc.at(0, 0.5).z, spec.tip_speed(), max_relative = 1e-12);
    }

    #[test]
    fn band_angles_hold_area_fraction() {
        let (t1, t2) = tread(ApproachCase::Wall, 2.0).band_angles();
        assert_relative_eq!(t1.to_degrees(), 60.0, max_relative = 1e-12);
        assert_relative_eq!(t2.to_degrees(), 120.0, max_relative = 1e-12);
        for frac in [0.1, 0.3, 0.7] {
            let (a, b) = TreadSphereSpec { band_area_fraction: frac, ..tread(ApproachCase::Wall, 2.0) }.band_angles();
            // band area / sphere area = (cos a - cos b)/2
            assert_relative_eq!((a.cos() - b.cos()) / 2.0, frac, max_relative = 1e-12);
        }
        let s = tread(ApproachCase::Wall, 2.0);
        assert_eq!(s.slip_profile(0.3), 0.0);
        assert_eq!(s.slip_profile(std::f64::consts::FRAC_PI_2), 1.0);
        assert_relative_eq!(s.slip_profile(t1), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn still_tread_has_zero_data_and_zero_power() {
        let spec = TreadSphereSpec { v_tread: 0.0, ..tread(ApproachCase::Wall, 1.5) };
        let pb = tread_sphere_mesh(&spec, &MeshOptions::default()).unwrap();
        assert!((0..pb.mesh.bodies().len()).all(|b| pb.bc.is_zero_on(&pb.mesh, b)));
        let sol = pb.solve(&SolverSettings::new(1.0)).unwrap();
        assert_eq!(sol.dissipated_power, 0.0);
        assert_eq!(sol.speed_of(0), Some(0.0));
    }

    #[test]
    fn gap_limits() {
        assert!(matches!(
            tread_sphere_mesh(&tread(ApproachCase::Wall, 1.001), &MeshOptions::default()),
            Err(Error::GapTooSmall { .. })
        ));
        assert_relative_eq!(tread(ApproachCase::TwoSpheres, 1.1).gap(), 0.2, max_relative = 1e-12);
    }

    #[test]
    fn two_spheres_are_mirror_images() {
        let pb = tread_sphere_mesh(&tread(ApproachCase::TwoSpheres, 1.3), &MeshOptions::default()).unwrap();
        assert_eq!(pb.free_bodies, vec![0, 1]);
        let sol = pb.solve(&SolverSettings::new(1.0)).unwrap();
        let (u0, u1) = (sol.speed_of(0).unwrap(), sol.speed_of(1).unwrap());
        assert!(u0 > 0.0);
        assert_relative_eq!(u1, -u0, max_relative = 1e-6);
        let b = pb.mesh.bodies();
        assert_eq!(b[0].elements.len(), b[1].elements.len());
    }

    #[test]
    fn wall_truncation_is_converged() {
        let s = SolverSettings::new(1.0);
        let spec = tread(ApproachCase::Wall, 2.0);
        let p = |radius: f64| {
            let o = MeshOptions { wall_radius: radius, ..MeshOptions::default() };
            tread_sphere_mesh(&spec, &o).unwrap().solve(&s).unwrap()
        };
        let (a, b) = (p(30.0), p(60.0));
        assert_relative_eq!(a.dissipated_power, b.dissipated_power, max_relative = 1e-2);
        assert_relative_eq!(a.speed_of(0).unwrap(), b.speed_of(0).unwrap(), max_relative = 1e-2);
    }

    #[test]
    fn h_fluid_identity() {
        assert_eq!(h_fluid_from_solution(2.0 * 3.0 * 25.0, 2.0, 3.0, 5.0).unwrap(), 1.0);
        assert!(h_fluid_from_solution(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(h_fluid_from_solution(-1.0, 1.0, 1.0, 1.0).is_err());
    }
}
