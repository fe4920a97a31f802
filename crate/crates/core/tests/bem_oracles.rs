use std::f64::consts::PI;

use shapeshift::bem::kernel::Velocity;
use shapeshift::bem::mesh::SurfaceVelocityBC;
use shapeshift::bem::solver::{assemble_and_solve, SolverSettings};
use shapeshift::geometry::{
    expanding_robot_mesh, h_fluid_from_solution, tread_sphere_mesh, ApproachCase, ExpandingRobotSpec, MeshOptions,
    TreadSphereSpec,
};
use shapeshift::validation::{sphere_drag, squirmer, wall_drag};

mod common;
use common::brenner;

#[test]
fn brenner_oracle_reference_values() {
    // published table values
    assert!((brenner(1.1276) - 9.2518).abs() < 2e-3);
    assert!((brenner(1.5431) - 3.0361).abs() < 2e-3);
    assert!((brenner(3.7622) - 1.4129).abs() < 2e-3);
}

#[test]
fn sphere_drag_converges() {
    let s = SolverSettings::new(1.0);
    let errs: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| (sphere_drag(n, &s).unwrap().0 - 1.0).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 1e-2);
    let (drag, power) = sphere_drag(128, &s).unwrap();
    assert!((power - drag).abs() < 1e-10);
}

#[test]
fn squirmer_against_series() {
    // slip B1 sinθ: U = 2B1/3, P = 16πηa²B1²/3
    let (u, p) = squirmer(128, &SolverSettings::new(1.0)).unwrap();
    assert!((u / (2.0 / 3.0) - 1.0).abs() < 0.02);
    assert!((p / (16.0 * PI / 3.0) - 1.0).abs() < 0.02);
}

#[test]
fn wall_drag_matches_series() {
    let s = SolverSettings::new(1.0);
    for delta in [1.1, 1.5, 2.0, 3.0, 5.0] {
        let want = brenner(delta);
        let got = wall_drag(delta, &s).unwrap();
        assert!((got / want - 1.0).abs() < 0.03, "δ={delta}: {got} vs {want}");
    }
}

#[test]
fn h_fluid_is_scale_invariant() {
    let o = MeshOptions::default();
    let base = ExpandingRobotSpec::new(1e-6, 5, 0.75e-6, 500.0).unwrap();
    let big = ExpandingRobotSpec::new(2e-6, 5, 1.5e-6, 2500.0).unwrap();
    let h = |spec: &ExpandingRobotSpec, eta: f64| {
        let pb = expanding_robot_mesh(spec, 0.3, &o).unwrap();
        let sol = assemble_and_solve(&pb.mesh, &pb.bc, &SolverSettings::new(eta)).unwrap();
        h_fluid_from_solution(sol.dissipated_power, eta, spec.length, spec.tip_speed()).unwrap()
    };
    let (a, b) = (h(&base, 1e-3), h(&big, 10.0));
    assert!((a / b - 1.0).abs() < 5e-3, "{a} vs {b}");

    let tread = |radius: f64, v: f64| {
        let spec = TreadSphereSpec {
            radius,
            band_area_fraction: 0.5,
            ramp_width: 0.05 * radius,
            v_tread: v,
            case: ApproachCase::Wall,
            delta: 1.5,
        };
        let s = SolverSettings::new(1e-3);
        let sol = tread_sphere_mesh(&spec, &o).unwrap().solve(&s).unwrap();
        (
            h_fluid_from_solution(sol.dissipated_power, 1e-3, radius, v).unwrap(),
            sol.speed_of(0).unwrap() / v,
        )
    };
    let (p, q) = (tread(1e-6, 1e-3), tread(2e-6, 1e-2));
    assert!((p.0 / q.0 - 1.0).abs() < 5e-3 && (p.1 / q.1 - 1.0).abs() < 5e-3);
}

#[test]
fn rigid_sphere_near_wall_power_equals_drag_work() {
    let spec = TreadSphereSpec {
        radius: 1.0,
        band_area_fraction: 0.5,
        ramp_width: 0.05,
        v_tread: 0.0,
        case: ApproachCase::Wall,
        delta: 2.0,
    };
    let pb = tread_sphere_mesh(&spec, &MeshOptions::default()).unwrap();
    let bc = SurfaceVelocityBC::rigid(&pb.mesh, &[0], Velocity { z: 1.0, s: 0.0 });
    let sol = assemble_and_solve(&pb.mesh, &bc, &SolverSettings::<f64>::new(1.0)).unwrap();
    assert!((sol.dissipated_power + sol.net_axial_force[0]).abs() < 1e-9 * sol.dissipated_power);
}
