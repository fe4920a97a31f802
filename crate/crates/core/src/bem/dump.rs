//! Per-panel CSV export of a solved mesh.

use std::io::Write;

use crate::bem::mesh::{RingMesh, SurfaceVelocityBC};
use crate::bem::solver::TractionSolution;
use crate::error::{Error, Result};
use crate::profile::full;
use crate::real::Real;

/// Columns `body_id,z0,s0,z1,s1,u_z,u_s,t_z,t_s`; `u` is the midpoint
/// velocity including any rigid speed, `t` the force per area on the fluid.
pub fn write_panels_csv<T: Real, W: Write>(
    mesh: &RingMesh<T>,
    bc: &SurfaceVelocityBC<T>,
    sol: &TractionSolution<T>,
    out: W,
) -> Result<()> {
    if bc.len() != mesh.len() || sol.traction.len() != mesh.len() {
        return Err(Error::DimensionMismatch {
            expected: mesh.len(),
            got: bc.len().min(sol.traction.len()),
        });
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["body_id", "z0", "s0", "z1", "s1", "u_z", "u_s", "t_z", "t_s"])?;
    for (e, el) in mesh.elements().iter().enumerate() {
        let (p0, p1) = mesh.endpoints(e);
        let mut u = bc.at(e, T::lit(0.5));
        if let Some(speed) = sol.speed_of(el.body) {
            u.z += speed;
        }
        let t = sol.traction[e];
        w.write_record([
            el.body.to_string(),
            full(p0.z),
            full(p0.s),
            full(p1.z),
            full(p1.s),
            full(u.z),
            full(u.s),
            full(t.z),
            full(t.s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::kernel::Velocity;
    use crate::bem::mesh::{mesh_bodies, BodyKind, Part, Primitive, SizeField};
    use crate::bem::solver::{assemble_and_solve, SolverSettings};

    #[test]
    fn one_row_per_panel() {
        let arc = Primitive::Arc { center: 0.0, radius: 1.0, from: 0.0, to: std::f64::consts::PI };
        let m = mesh_bodies(&[(BodyKind::Closed, vec![Part::new(arc).min_panels(16)])], &SizeField::uniform(1.0))
            .unwrap()
            .mesh;
        let bc = SurfaceVelocityBC::rigid(&m, &[0], Velocity { z: 1.0, s: 0.0 });
        let sol = assemble_and_solve(&m, &bc, &SolverSettings::new(1.0)).unwrap();
        let mut buf = Vec::new();
        write_panels_csv(&m, &bc, &sol, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "body_id,z0,s0,z1,s1,u_z,u_s,t_z,t_s");
        assert_eq!(lines.len(), m.len() + 1);
        assert!(!text.contains('\r'));
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 9);
        assert_eq!(first[0], "0");
        assert_eq!(first[5].parse::<f64>().unwrap(), 1.0);
        assert!(write_panels_csv(&m, &SurfaceVelocityBC::zero(3), &sol, Vec::new()).is_err());
    }
}
