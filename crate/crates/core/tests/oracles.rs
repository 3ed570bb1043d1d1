//! Cross-module checks against closed forms computed independently here.

use std::f64::consts::PI;

use moebius_core::classical::{evolve, FrameState, FreeMotion, PhaseState, SpinningBody};
use moebius_core::geometry::{self, MoebiusShape, ParamPoint, Vec3};
use moebius_core::quantum::{
    coulomb_radial_solve, ring_eigensolve, CoulombProblem, RingHamiltonian, Vectors,
};
use moebius_core::Error;
use proptest::prelude::*;

fn surface(r: f64, u: f64, v: f64) -> Vec3 {
    let s = r + v * (u / 2.0).sin();
    Vec3::new(s * u.sin(), s * u.cos(), v * (u / 2.0).cos())
}

#[test]
fn embedding_matches_hand_written_surface() {
    let shape = MoebiusShape::new(2.0, 0.5).unwrap();
    for i in 0..40 {
        for j in 0..5 {
            let u = 0.3 * i as f64;
            let v = -0.5 + 0.25 * j as f64;
            let p = geometry::embed(&shape, ParamPoint::new(u, v))
                .unwrap()
                .to_vec3();
            assert!((p - surface(2.0, u, v)).norm() < 1e-14);
        }
    }
}

#[test]
fn mesh_rows_carry_the_embedding() {
    let shape = MoebiusShape::with_radius(1.5).unwrap();
    let mesh = geometry::emit_mesh(&shape, 16, 4).unwrap();
    let csv = mesh.to_csv();
    for (line, vtx) in csv.lines().skip(1).zip(&mesh.vertices) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[0], vtx.u);
        assert_eq!(cols[1], vtx.v);
        let p = surface(1.5, cols[0], cols[1]);
        assert!((Vec3::new(cols[2], cols[3], cols[4]) - p).norm() < 1e-14);
        assert!((Vec3::new(cols[5], cols[6], cols[7]).norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn point_outside_strip_is_rejected() {
    let shape = MoebiusShape::with_radius(1.0).unwrap();
    assert!(matches!(
        geometry::embed(&shape, ParamPoint::new(0.0, 0.5)),
        Err(Error::OutsideStrip { .. })
    ));
}

#[test]
fn ring_matches_discrete_dispersion() {
    // exact eigenvalues of the periodic second difference
    let n = 256;
    let h = 4.0 * PI / n as f64;
    let t = 1.0 / (2.0 * h * h);
    let mut exact: Vec<f64> = (0..n)
        .map(|m| 2.0 * t * (1.0 - (2.0 * PI * m as f64 / n as f64).cos()))
        .collect();
    exact.sort_by(f64::total_cmp);
    let ham = RingHamiltonian::free(1.0, 1.0, n).unwrap();
    let s = ring_eigensolve(&ham, 9, Vectors::Skip).unwrap();
    for (a, b) in s.eigenvalues.iter().zip(&exact) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn cosine_potential_lowers_ground_level() {
    let ham = RingHamiltonian::free(1.0, 1.0, 256)
        .unwrap()
        .with_potential(|th| -0.1 * th.cos())
        .unwrap();
    let s = ring_eigensolve(&ham, 3, Vectors::Keep).unwrap();
    // second-order perturbation theory: E0 ≈ −Σ |V_n|² / E_n with V_{±2} = −0.05
    let pert = -2.0 * 0.05f64.powi(2) / 0.5;
    assert!(
        (s.eigenvalues[0] - pert).abs() < 2e-4,
        "{}",
        s.eigenvalues[0]
    );
    assert_eq!(s.eigenvectors.as_ref().unwrap().len(), 3);
}

#[test]
fn hydrogen_levels_scale_with_coupling() {
    let mut p = CoulombProblem::atomic(0);
    p.charge_e2 = 2.0;
    p.r_max = 100.0;
    let sol = coulomb_radial_solve(&p).unwrap();
    for (i, e) in sol.energies.iter().enumerate() {
        let n = (i + 1) as f64;
        let exact = -4.0 / (2.0 * n * n);
        assert!((e - exact).abs() / exact.abs() < 1e-3);
    }
}

#[test]
fn pendulum_trajectory_stays_on_shell() {
    let body = SpinningBody::new(1.0, 2.0, 0.3, 1.0).unwrap();
    let v = |th: f64| 1.0 - th.cos();
    let init = PhaseState::on_meridian(
        &body,
        0.0,
        0.5,
        FrameState::surface_adapted(0.0),
        |x: &Vec3| 1.0 - x.y,
    );
    let traj = evolve(&init, &body, &v, 1e-3, 5000).unwrap();
    assert!(traj.max_residual(|r| r.circle) < 1e-9);
    assert!(traj.max_residual(|r| r.spin_align.amax()) < 1e-9);
    assert!(traj.max_energy_drift() < 1e-6);
    // small amplitude: it never reaches the top
    assert!(traj.points.iter().all(|p| p.theta.abs() < PI / 2.0));
}

proptest! {
    #[test]
    fn free_rotation_keeps_energy(p_theta in -5.0f64..5.0, theta0 in 0.0f64..6.0) {
        let body = SpinningBody::new(1.0, 1.0, 0.5, 1.0).unwrap();
        let init = PhaseState::on_meridian(
            &body, theta0, p_theta, FrameState::surface_adapted(theta0), |_: &Vec3| 0.0,
        );
        let traj = evolve(&init, &body, &FreeMotion, 1e-3, 200).unwrap();
        prop_assert!(traj.max_energy_drift() < 1e-12);
        let expected = theta0 + p_theta * body.spin_factor() * 0.2;
        // the start angle is read back from the position, so compare modulo 2π
        let gap = (traj.last().theta - expected).rem_euclid(2.0 * PI);
        prop_assert!(gap.min(2.0 * PI - gap) < 1e-9);
    }
}
