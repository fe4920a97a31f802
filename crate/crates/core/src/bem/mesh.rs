//! Meridian meshes of ring panels and the velocity data attached to them.

use crate::bem::kernel::{Point, Velocity};
use crate::error::{Error, Result};
use crate::real::Real;

/// Closed bodies start and end on the axis; open sheets do not enclose fluid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyKind {
    Closed,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element<T = f64> {
    pub nodes: [usize; 2],
    pub body: usize,
    pub length: T,
    /// Unit normal pointing out of the body into the fluid.
    pub normal: Velocity<T>,
    pub midpoint: Point<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Body<T = f64> {
    pub kind: BodyKind,
    /// Contiguous element range.
    pub elements: std::ops::Range<usize>,
    /// Axis point inside a closed body.
    pub interior: Option<T>,
}

/// Union of meridian curves discretized into straight ring panels.
#[derive(Debug, Clone, PartialEq)]
pub struct RingMesh<T = f64> {
    nodes: Vec<Point<T>>,
    elements: Vec<Element<T>>,
    bodies: Vec<Body<T>>,
}

impl<T: Real> RingMesh<T> {
    /// `curves[b]` is the node chain of body `b`, traversed so that the
    /// fluid lies on the right of increasing arclength in the `(z, s)`
    /// plane (top axis point to bottom for a closed body).
    pub fn from_curves(curves: Vec<(BodyKind, Vec<Point<T>>)>) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut elements = Vec::new();
        let mut bodies = Vec::new();
        for (b, (kind, pts)) in curves.into_iter().enumerate() {
            if pts.len() < 2 {
                return Err(Error::InvalidMesh(format!("body {b} has fewer than two nodes")));
            }
            let first = elements.len();
            let base = nodes.len();
            for p in &pts {
                if !(p.s >= T::zero()) || !p.z.is_finite() || !p.s.is_finite() {
                    return Err(Error::InvalidMesh(format!("node ({}, {}) off the half-plane", p.z, p.s)));
                }
            }
            for k in 0..pts.len() - 1 {
                let (p0, p1) = (pts[k], pts[k + 1]);
                let length = p0.distance(p1);
                let scale = p0.z.abs().max(p0.s).max(p1.z.abs()).max(p1.s).max(T::lit(f64::MIN_POSITIVE));
                if !(length > scale * T::eps() * T::lit(64.0)) {
                    return Err(Error::DegeneratePanel {
                        element: elements.len(),
                        length: length.as_f64(),
                    });
                }
                let tz = (p1.z - p0.z) / length;
                let ts = (p1.s - p0.s) / length;
                elements.push(Element {
                    nodes: [base + k, base + k + 1],
                    body: b,
                    length,
                    normal: Velocity { z: ts, s: -tz },
                    midpoint: p0.lerp(p1, T::lit(0.5)),
                });
            }
            nodes.extend_from_slice(&pts);
            let range = first..elements.len();
            let interior = match kind {
                BodyKind::Closed => {
                    let (top, bottom) = (pts[0], pts[pts.len() - 1]);
                    let size = range
                        .clone()
                        .map(|e| elements[e].length)
                        .fold(T::zero(), |a, l| a + l);
                    let tol = size * T::lit(1e-9);
                    if top.s > tol || bottom.s > tol {
                        return Err(Error::InvalidMesh(format!("closed body {b} does not end on the axis")));
                    }
                    let volume = enclosed_volume(&elements[range.clone()]);
                    if !(volume > T::zero()) {
                        return Err(Error::InvalidMesh(format!(
                            "closed body {b} is traversed with inward normals"
                        )));
                    }
                    Some((top.z + bottom.z) * T::lit(0.5))
                }
                BodyKind::Open => None,
            };
            bodies.push(Body {
                kind,
                elements: range,
                interior,
            });
        }
        Ok(RingMesh { nodes, elements, bodies })
    }

    pub fn nodes(&self) -> &[Point<T>] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Element<T>] {
        &self.elements
    }

    pub fn bodies(&self) -> &[Body<T>] {
        &self.bodies
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn endpoints(&self, e: usize) -> (Point<T>, Point<T>) {
        let [a, b] = self.elements[e].nodes;
        (self.nodes[a], self.nodes[b])
    }

    /// Lateral area of the ring panel.
    pub fn area(&self, e: usize) -> T {
        let el = &self.elements[e];
        T::TAU() * el.midpoint.s * el.length
    }

    pub fn body_area(&self, b: usize) -> T {
        self.bodies[b].elements.clone().map(|e| self.area(e)).fold(T::zero(), |a, x| a + x)
    }

    pub fn arclength(&self, b: usize) -> T {
        self.bodies[b]
            .elements
            .clone()
            .map(|e| self.elements[e].length)
            .fold(T::zero(), |a, x| a + x)
    }

    /// Volume enclosed by a closed body.
    pub fn volume(&self, b: usize) -> T {
        enclosed_volume(&self.elements[self.bodies[b].elements.clone()])
    }

    pub fn panel_range(&self) -> (T, T) {
        self.elements.iter().fold((T::max_value().unwrap_or(T::one()), T::zero()), |(lo, hi), e| {
            (lo.min(e.length), hi.max(e.length))
        })
    }
}

/// `(1/3) ∮ x·n dS`, exact for straight ring panels.
fn enclosed_volume<T: Real>(elements: &[Element<T>]) -> T {
    elements.iter().fold(T::zero(), |acc, e| {
        // x·n is constant along a straight meridian segment
        let xn = e.midpoint.z * e.normal.z + e.midpoint.s * e.normal.s;
        acc + xn * T::TAU() * e.midpoint.s * e.length / T::lit(3.0)
    })
}

/// Prescribed surface velocity, linear along each panel between the two
/// end values.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceVelocityBC<T = f64> {
    ends: Vec<[Velocity<T>; 2]>,
}

impl<T: Real> SurfaceVelocityBC<T> {
    pub fn new(ends: Vec<[Velocity<T>; 2]>) -> Self {
        SurfaceVelocityBC { ends }
    }

    pub fn zero(elements: usize) -> Self {
        SurfaceVelocityBC {
            ends: vec![[Velocity::default(); 2]; elements],
        }
    }

    /// Same velocity on every panel of the listed bodies, zero elsewhere.
    pub fn rigid(mesh: &RingMesh<T>, bodies: &[usize], u: Velocity<T>) -> Self {
        let mut bc = Self::zero(mesh.len());
        for &b in bodies {
            for e in mesh.bodies()[b].elements.clone() {
                bc.ends[e] = [u, u];
            }
        }
        bc
    }

    /// Samples `f(element, end, point)` at each panel's end points.
    pub fn from_fn(mesh: &RingMesh<T>, mut f: impl FnMut(usize, usize, Point<T>) -> Velocity<T>) -> Self {
        let ends = (0..mesh.len())
            .map(|e| {
                let (a, b) = mesh.endpoints(e);
                [f(e, 0, a), f(e, 1, b)]
            })
            .collect();
        SurfaceVelocityBC { ends }
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn ends(&self, e: usize) -> [Velocity<T>; 2] {
        self.ends[e]
    }

    /// Velocity at fraction `t` along the panel.
    pub fn at(&self, e: usize, t: T) -> Velocity<T> {
        let [a, b] = self.ends[e];
        Velocity {
            z: a.z + (b.z - a.z) * t,
            s: a.s + (b.s - a.s) * t,
        }
    }

    pub fn scaled(&self, k: T) -> Self {
        SurfaceVelocityBC {
            ends: self
                .ends
                .iter()
                .map(|[a, b]| [Velocity { z: a.z * k, s: a.s * k }, Velocity { z: b.z * k, s: b.s * k }])
                .collect(),
        }
    }

    /// `∫ u dS` over a panel, exact for linear `u` and `s`.
    pub fn integral(&self, mesh: &RingMesh<T>, e: usize) -> Velocity<T> {
        let (p0, p1) = mesh.endpoints(e);
        let len = mesh.elements()[e].length;
        let g = T::lit(0.5) / T::lit(3.0).sqrt();
        let half = T::lit(0.5);
        let mut acc = Velocity::default();
        for t in [half - g, half + g] {
            let u = self.at(e, t);
            let s = p0.s + (p1.s - p0.s) * t;
            let w = T::TAU() * s * len * half;
            acc.z += u.z * w;
            acc.s += u.s * w;
        }
        acc
    }

    /// Area-weighted mean velocity of a panel.
    pub fn mean(&self, mesh: &RingMesh<T>, e: usize) -> Velocity<T> {
        let i = self.integral(mesh, e);
        let a = mesh.area(e);
        Velocity { z: i.z / a, s: i.s / a }
    }

    pub fn is_zero_on(&self, mesh: &RingMesh<T>, b: usize) -> bool {
        mesh.bodies()[b]
            .elements
            .clone()
            .all(|e| self.ends[e].iter().all(|v| v.z == T::zero() && v.s == T::zero()))
    }
}

/// Meridian curve piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive<T = f64> {
    Line { from: Point<T>, to: Point<T> },
    /// Circle centred on the axis at `z = center`; polar angle θ is
    /// measured from +z, so θ = 0 is the top pole.
    Arc { center: T, radius: T, from: T, to: T },
}

impl<T: Real> Primitive<T> {
    pub fn length(&self) -> T {
        match *self {
            Primitive::Line { from, to } => from.distance(to),
            Primitive::Arc { radius, from, to, .. } => radius * (to - from).abs(),
        }
    }

    /// Point at arclength `sigma` from the start.
    pub fn point(&self, sigma: T) -> Point<T> {
        match *self {
            Primitive::Line { from, to } => {
                let len = from.distance(to);
                from.lerp(to, sigma / len)
            }
            Primitive::Arc { center, radius, from, to } => {
                let th = from + (to - from).signum() * sigma / radius;
                Point::new(center + radius * th.cos(), (radius * th.sin()).max(T::zero()))
            }
        }
    }

    pub fn start(&self) -> Point<T> {
        self.point(T::zero())
    }

    pub fn end(&self) -> Point<T> {
        match *self {
            Primitive::Line { to, .. } => to,
            Primitive::Arc { .. } => self.point(self.length()),
        }
    }
}

/// Local panel size `h(x) = min(h_max, min_i(h_i + g_i |x - p_i|))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeField<T = f64> {
    pub h_max: T,
    pub foci: Vec<Focus<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Focus<T = f64> {
    pub point: Point<T>,
    pub h: T,
    pub growth: T,
}

impl<T: Real> SizeField<T> {
    pub fn uniform(h: T) -> Self {
        SizeField {
            h_max: h,
            foci: Vec::new(),
        }
    }

    pub fn with_focus(mut self, point: Point<T>, h: T, growth: T) -> Self {
        self.foci.push(Focus { point, h, growth });
        self
    }

    pub fn at(&self, x: Point<T>) -> T {
        self.foci
            .iter()
            .fold(self.h_max, |h, f| h.min(f.h + f.growth * f.point.distance(x)))
    }

    /// Divides every length in the field by `factor`.
    pub fn refined(&self, factor: T) -> Self {
        SizeField {
            h_max: self.h_max / factor,
            foci: self
                .foci
                .iter()
                .map(|f| Focus {
                    point: f.point,
                    h: f.h / factor,
                    growth: f.growth,
                })
                .collect(),
        }
    }
}

/// A curve piece with an optional panel-size cap of its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Part<T = f64> {
    pub primitive: Primitive<T>,
    pub h_cap: Option<T>,
    pub min_panels: usize,
}

impl<T: Real> Part<T> {
    pub fn new(primitive: Primitive<T>) -> Self {
        Part {
            primitive,
            h_cap: None,
            min_panels: 1,
        }
    }

    pub fn cap(mut self, h: T) -> Self {
        self.h_cap = Some(h);
        self
    }

    pub fn min_panels(mut self, n: usize) -> Self {
        self.min_panels = n.max(1);
        self
    }
}

/// Where a mesh node came from: part index and arclength along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeTag<T = f64> {
    pub part: usize,
    pub sigma: T,
}

/// Mesh plus, per element, the origin of each end node.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedMesh<T = f64> {
    pub mesh: RingMesh<T>,
    pub tags: Vec<[NodeTag<T>; 2]>,
}

impl<T: Real> TaggedMesh<T> {
    /// Boundary data from `f(body, part, sigma, point)`.
    pub fn bc(&self, mut f: impl FnMut(usize, usize, T, Point<T>) -> Velocity<T>) -> SurfaceVelocityBC<T> {
        let mesh = &self.mesh;
        SurfaceVelocityBC::from_fn(mesh, |e, end, p| {
            let tag = self.tags[e][end];
            f(mesh.elements()[e].body, tag.part, tag.sigma, p)
        })
    }
}

/// Splits each part so that `∫ dσ / h` is equidistributed.
pub fn mesh_bodies<T: Real>(bodies: &[(BodyKind, Vec<Part<T>>)], size: &SizeField<T>) -> Result<TaggedMesh<T>> {
    let mut curves = Vec::with_capacity(bodies.len());
    let mut tags = Vec::new();
    for (kind, parts) in bodies {
        let mut pts: Vec<Point<T>> = Vec::new();
        let mut node_tags: Vec<(NodeTag<T>, NodeTag<T>)> = Vec::new();
        for (pi, part) in parts.iter().enumerate() {
            let sig = place_nodes(part, size)?;
            let prim = &part.primitive;
            for (k, &s) in sig.iter().enumerate() {
                let tag = NodeTag { part: pi, sigma: s };
                if k == 0 && !pts.is_empty() {
                    // part join: keep the earlier point, remember both tags
                    let last = node_tags.len() - 1;
                    node_tags[last].1 = tag;
                    continue;
                }
                pts.push(if k + 1 == sig.len() { prim.end() } else { prim.point(s) });
                node_tags.push((tag, tag));
            }
        }
        for k in 0..pts.len() - 1 {
            tags.push([node_tags[k].1, node_tags[k + 1].0]);
        }
        curves.push((*kind, pts));
    }
    Ok(TaggedMesh {
        mesh: RingMesh::from_curves(curves)?,
        tags,
    })
}

fn place_nodes<T: Real>(part: &Part<T>, size: &SizeField<T>) -> Result<Vec<T>> {
    let prim = &part.primitive;
    let len = prim.length();
    if !(len > T::zero()) {
        return Err(Error::InvalidMesh("zero-length curve piece".into()));
    }
    let h = |sigma: T| {
        let v = size.at(prim.point(sigma));
        match part.h_cap {
            Some(c) => v.min(c),
            None => v,
        }
    };
    // cumulative ∫ dσ/h by marching with steps of h/8
    let mut sig = vec![T::zero()];
    let mut cum = vec![T::zero()];
    let eighth = T::lit(0.125);
    let mut s = T::zero();
    let mut hs = h(s);
    while s < len {
        let step = (hs * eighth).min(len - s);
        let s1 = s + step;
        let h1 = h(s1);
        let c = *cum.last().unwrap() + step * T::lit(0.5) * (T::one() / hs + T::one() / h1);
        sig.push(s1);
        cum.push(c);
        s = s1;
        hs = h1;
        if sig.len() > 50_000_000 {
            return Err(Error::InvalidMesh("size field too fine".into()));
        }
    }
    let total = *cum.last().unwrap();
    let n = (total.ceil().to_usize().unwrap_or(1)).max(part.min_panels);
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::zero());
    let mut j = 0;
    for k in 1..n {
        let target = total * T::lit(k as f64) / T::lit(n as f64);
        while cum[j + 1] < target {
            j += 1;
        }
        let w = (target - cum[j]) / (cum[j + 1] - cum[j]);
        out.push(sig[j] + (sig[j + 1] - sig[j]) * w);
    }
    out.push(len);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sphere(n: usize) -> TaggedMesh {
        let arc = Primitive::Arc { center: 0.0, radius: 1.0, from: 0.0, to: std::f64::consts::PI };
        mesh_bodies(&[(BodyKind::Closed, vec![Part::new(arc).min_panels(n)])], &SizeField::uniform(10.0)).unwrap()
    }

    #[test]
    fn sphere_mesh_geometry() {
        let m = sphere(64).mesh;
        assert_eq!(m.len(), 64);
        assert_relative_eq!(m.body_area(0), 4.0 * std::f64::consts::PI, max_relative = 2e-3);
        assert_relative_eq!(m.volume(0), 4.0 / 3.0 * std::f64::consts::PI, max_relative = 3e-3);
        for e in m.elements() {
            // outward: normal parallel to position
            let p = e.midpoint;
            assert!(p.z * e.normal.z + p.s * e.normal.s > 0.99 * (p.z * p.z + p.s * p.s).sqrt());
        }
        assert_eq!(m.bodies()[0].interior, Some(0.0));
    }

    #[test]
    fn reversed_orientation_is_rejected() {
        let pts: Vec<Point> = (0..=8)
            .map(|k| {
                let t = std::f64::consts::PI * (8 - k) as f64 / 8.0;
                Point::new(t.cos(), t.sin().max(0.0))
            })
            .collect();
        assert!(matches!(RingMesh::from_curves(vec![(BodyKind::Closed, pts)]), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn validation_errors() {
        let bad = vec![Point::new(0.0, 0.0), Point::new(0.0, -1.0)];
        assert!(RingMesh::from_curves(vec![(BodyKind::Open, bad)]).is_err());
        let dup = vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(0.0, 1.0)];
        assert!(matches!(RingMesh::from_curves(vec![(BodyKind::Open, dup)]), Err(Error::DegeneratePanel { .. })));
        let open = vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert!(RingMesh::from_curves(vec![(BodyKind::Closed, open)]).is_err());
    }

    #[test]
    fn size_field_grades_toward_focus() {
        let line = Primitive::Line { from: Point::new(0.0, 0.0), to: Point::new(0.0, 10.0) };
        let size = SizeField::uniform(1.0).with_focus(Point::new(0.0, 0.0), 0.01, 0.2);
        let m = mesh_bodies(&[(BodyKind::Open, vec![Part::new(line)])], &size).unwrap().mesh;
        let l: Vec<f64> = m.elements().iter().map(|e| e.length).collect();
        assert!(l[0] < 0.02 && l[0] > 0.005);
        assert!(*l.last().unwrap() > 0.8);
        assert!(l.windows(2).all(|w| w[1] >= w[0] * 0.999));
        assert_relative_eq!(m.arclength(0), 10.0, max_relative = 1e-12);
    }

    #[test]
    fn tagged_bc_uses_part_coordinates() {
        let a = Primitive::Line { from: Point::new(1.0, 0.0), to: Point::new(1.0, 1.0) };
        let b = Primitive::Line { from: Point::new(1.0, 1.0), to: Point::new(-1.0, 1.0) };
        let c = Primitive::Line { from: Point::new(-1.0, 1.0), to: Point::new(-1.0, 0.0) };
        let t = mesh_bodies(
            &[(BodyKind::Closed, vec![Part::new(a), Part::new(b), Part::new(c)])],
            &SizeField::uniform(0.25),
        )
        .unwrap();
        // discontinuous across part joins: value = part index
        let bc = t.bc(|_, part, _, _| Velocity { z: part as f64, s: 0.0 });
        for e in 0..t.mesh.len() {
            let [u0, u1] = bc.ends(e);
            assert_eq!(u0.z, u1.z);
        }
        assert_relative_eq!(t.mesh.volume(0), std::f64::consts::PI * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn bc_integral_is_exact_for_linear_data() {
        let m = sphere(16).mesh;
        let bc = SurfaceVelocityBC::from_fn(&m, |_, _, p| Velocity { z: p.s, s: 2.0 * p.z });
        for e in 0..m.len() {
            let (p0, p1) = m.endpoints(e);
            let len = m.elements()[e].length;
            // ∫ s·s 2π dl and ∫ 2z·s 2π dl along a straight panel
            let want_z = std::f64::consts::TAU * len * (p0.s * p0.s + p0.s * p1.s + p1.s * p1.s) / 3.0;
            let want_s = std::f64::consts::TAU * len * (2.0 * p0.z * p0.s + p0.z * p1.s + p1.z * p0.s + 2.0 * p1.z * p1.s) / 3.0;
            let got = bc.integral(&m, e);
            assert!((got.z - want_z).abs() < 1e-13 && (got.s - want_s).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn panels_respect_size_field(h in 0.02f64..0.5, h0 in 0.001f64..0.05, g in 0.05f64..0.5) {
            let arc = Primitive::Arc { center: 0.0, radius: 1.0, from: 0.0, to: std::f64::consts::PI };
            let size = SizeField::uniform(h).with_focus(Point::new(-1.0, 0.0), h0, g);
            let m = mesh_bodies(&[(BodyKind::Closed, vec![Part::new(arc)])], &size).unwrap().mesh;
            for e in m.elements() {
                prop_assert!(e.length <= 1.05 * size.at(e.midpoint) + 1e-12);
            }
        }
    }
}
