//! Leapfrog integration of the reduced meridian dynamics.
//!
//! Solving the circle and spin-alignment constraints leaves one degree of
//! freedom, the meridian angle θ, with
//!
//! ```text
//! H(θ, p_θ) = (1 + s²/ρ²) p_θ² / (2 m₀ r²) + V(θ)
//! ```
//!
//! The attached frame follows the surface: it co-rotates with the orbit about
//! the z axis and twists about its own tangent at half the meridian rate, so
//! only a 4π excursion brings it back.

use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit};
use serde_json::{Map, Value};

use super::{
    constraint_residuals, spin_from_momentum, ConstraintResiduals, FrameState, Mat3, PhaseState,
    SpinningBody,
};
use crate::error::{require_positive, Error, Result};
use crate::format::{json_number, json_numbers, to_json_text, CsvTable};
use crate::geometry::{centerline_tangent, Vec3};

const SHELL_TOLERANCE: f64 = 1e-9;
const DRIFT_LIMIT: f64 = 1e-6;
const REPROJECT_THRESHOLD: f64 = 1e-12;

/// A potential that depends on position only through the meridian angle.
pub trait MeridianPotential {
    fn energy(&self, theta: f64) -> f64;

    /// dV/dθ. The default is a central difference.
    fn slope(&self, theta: f64) -> f64 {
        let h = 1e-6;
        (self.energy(theta + h) - self.energy(theta - h)) / (2.0 * h)
    }
}

impl<F: Fn(f64) -> f64> MeridianPotential for F {
    fn energy(&self, theta: f64) -> f64 {
        self(theta)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FreeMotion;

impl MeridianPotential for FreeMotion {
    fn energy(&self, _theta: f64) -> f64 {
        0.0
    }

    fn slope(&self, _theta: f64) -> f64 {
        0.0
    }
}

fn meridian_angle(x: &Vec3) -> f64 {
    x.x.atan2(x.y)
}

/// Carries `frame` through a meridian advance of `dtheta`.
///
/// The motion is a rotation by `dtheta` about −z in space composed with a
/// rotation by `−dtheta/2` about the frame's own first axis (the tangent).
/// Space-fixed and body-fixed rotations commute, so the update is exact for
/// any increment.
pub fn transport_frame(frame: &FrameState, dtheta: f64) -> FrameState {
    let twist_axis = Unit::new_normalize(frame.row(0));
    let twist = Rotation3::from_axis_angle(&twist_axis, -0.5 * dtheta);
    let orbit = Rotation3::from_axis_angle(&-Vec3::z_axis(), dtheta);
    let rotation = orbit * twist;
    // rows are vectors: e' = e Rᵀ
    FrameState {
        e: frame.e * rotation.matrix().transpose(),
    }
}

fn reproject(e: &Mat3) -> Mat3 {
    let svd = e.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => *e,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub theta: f64,
    pub p_theta: f64,
    /// reduced energy (1 + s²/ρ²) p_θ²/(2 m₀ r²) + V(θ)
    pub energy: f64,
    pub state: PhaseState,
    pub residuals: ConstraintResiduals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

pub const TRAJECTORY_COLUMNS: [&str; 18] = [
    "tau",
    "theta",
    "p_theta",
    "e11",
    "e12",
    "e13",
    "e21",
    "e22",
    "e23",
    "e31",
    "e32",
    "e33",
    "h0",
    "circle",
    "spin_align_1",
    "spin_align_2",
    "spin_align_3",
    "frame_period",
];

impl Trajectory {
    pub fn first(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectory is never empty")
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.first().energy;
        self.points
            .iter()
            .map(|p| (p.energy - e0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest |residual| of a given kind across all steps.
    pub fn max_residual(&self, pick: impl Fn(&ConstraintResiduals) -> f64) -> f64 {
        self.points
            .iter()
            .map(|p| pick(&p.residuals).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(&TRAJECTORY_COLUMNS);
        for p in &self.points {
            let e = &p.state.frame.e;
            let r = &p.residuals;
            let mut row = vec![p.state.tau, p.theta, p.p_theta];
            for a in 0..3 {
                for i in 0..3 {
                    row.push(e[(a, i)]);
                }
            }
            row.extend([
                r.h0,
                r.circle,
                r.spin_align.x,
                r.spin_align.y,
                r.spin_align.z,
                r.frame_period,
            ]);
            table.push_row(&row);
        }
        table.into_string()
    }

    pub fn residual_log_json(&self) -> Result<String> {
        let mut out = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let r = &p.residuals;
            let mut obj = Map::new();
            obj.insert("tau".into(), json_number(p.state.tau)?);
            obj.insert("h0".into(), json_number(r.h0)?);
            obj.insert("circle".into(), json_number(r.circle)?);
            obj.insert("spin_align".into(), json_numbers(r.spin_align.as_slice())?);
            obj.insert("frame_period".into(), json_number(r.frame_period)?);
            out.push(Value::Object(obj));
        }
        to_json_text(&Value::Array(out))
    }
}

/// Integrates `steps` leapfrog steps of size `dtau` from `init`.
///
/// `init` must lie on the circle `x·x = r²` with its spin locked to the
/// momentum. `p0` is conserved (t is cyclic) and `t` advances with τ. Each
/// logged [`ConstraintResiduals::frame_period`] compares the frame with its
/// own transport through a full 4π.
pub fn evolve<P: MeridianPotential>(
    init: &PhaseState,
    body: &SpinningBody,
    potential: &P,
    dtau: f64,
    steps: usize,
) -> Result<Trajectory> {
    require_positive("dtau", dtau)?;
    let r = body.orbit_radius;

    let circle = init.x.norm_squared() - r * r;
    if circle.abs() > SHELL_TOLERANCE {
        return Err(Error::OffShell {
            constraint: "circle",
            residual: circle,
        });
    }
    let spin = (super::epsilon_contract(&init.sigma) - init.p * body.spin_s).amax();
    if spin > SHELL_TOLERANCE {
        return Err(Error::OffShell {
            constraint: "spin alignment",
            residual: spin,
        });
    }
    let frame_error = init.frame.orthonormality_residual();
    if frame_error > super::FRAME_TOLERANCE {
        return Err(Error::FrameNotOrthonormal {
            residual: frame_error,
        });
    }

    let inverse_inertia = body.spin_factor() / (body.mass_m0 * r * r);
    let hamiltonian = |theta: f64, p_theta: f64| {
        0.5 * inverse_inertia * p_theta * p_theta + potential.energy(theta)
    };
    let potential_3d = |x: &Vec3| potential.energy(meridian_angle(x));

    let mut theta = meridian_angle(&init.x);
    let mut p_theta = r * init.p.dot(&centerline_tangent(theta));
    let mut frame = init.frame;

    let kinetic0 = 0.5 * inverse_inertia * p_theta * p_theta;
    let energy0 = hamiltonian(theta, p_theta);
    let energy_scale = kinetic0.abs() + potential.energy(theta).abs() + f64::MIN_POSITIVE;

    let snapshot = |theta: f64, p_theta: f64, frame: FrameState, step: usize| {
        let (s, c) = theta.sin_cos();
        let x = Vec3::new(r * s, r * c, 0.0);
        let p = centerline_tangent(theta) * (p_theta / r);
        let elapsed = dtau * step as f64;
        let state = PhaseState {
            t: init.t + elapsed,
            p0: init.p0,
            x,
            p,
            sigma: spin_from_momentum(&p, body.spin_s),
            frame,
            tau: init.tau + elapsed,
        };
        let double_cover = transport_frame(&frame, 4.0 * PI);
        let residuals = constraint_residuals(&state, body, potential_3d, &double_cover);
        TrajectoryPoint {
            theta,
            p_theta,
            energy: hamiltonian(theta, p_theta),
            state,
            residuals,
        }
    };

    let mut points = Vec::with_capacity(steps + 1);
    points.push(snapshot(theta, p_theta, frame, 0));

    for step in 1..=steps {
        p_theta -= 0.5 * dtau * potential.slope(theta);
        let dtheta = dtau * inverse_inertia * p_theta;
        theta += dtheta;
        frame = transport_frame(&frame, dtheta);
        if frame.orthonormality_residual() > REPROJECT_THRESHOLD {
            frame.e = reproject(&frame.e);
        }
        p_theta -= 0.5 * dtau * potential.slope(theta);

        let point = snapshot(theta, p_theta, frame, step);
        let res = &point.residuals;
        if !res.is_finite() || !point.energy.is_finite() {
            return Err(Error::NonFinite {
                context: "trajectory step",
            });
        }
        let drift = res
            .circle
            .abs()
            .max(res.spin_align.amax())
            .max((point.energy - energy0).abs() / energy_scale);
        if drift > DRIFT_LIMIT {
            return Err(Error::StepTooLarge { step, drift });
        }
        points.push(point);
    }
    Ok(Trajectory { points })
}
