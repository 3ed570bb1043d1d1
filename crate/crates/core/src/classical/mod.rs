//! Constrained Hamiltonian mechanics of a spinning body on the meridian.
//!
//! Phase space carries the time-like pair `(t, p0)`, the position/momentum
//! pairs `(x^i, p_i)`, an antisymmetric spin tensor `Σ_ij` and an orthonormal
//! frame whose rows are the triad vectors `e^(a)`.

mod evolve;

pub use evolve::{
    evolve, transport_frame, FreeMotion, MeridianPotential, Trajectory, TrajectoryPoint,
    TRAJECTORY_COLUMNS,
};

use nalgebra::Matrix3;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::geometry::{centerline_normal, centerline_tangent, centerline_transverse, Vec3};

pub type Mat3 = Matrix3<f64>;

/// Tolerance on `e eᵀ = 1` accepted by [`FrameState::new`].
pub const FRAME_TOLERANCE: f64 = 1e-9;

/// Poisson-bracket finite-difference step used when callers have no better choice.
pub const DEFAULT_BRACKET_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinningBody {
    pub mass_m0: f64,
    /// size of the body, ρ
    pub size_rho: f64,
    /// spin-to-momentum ratio, s
    pub spin_s: f64,
    /// radius of the meridian circle, r
    pub orbit_radius: f64,
    pub hbar: f64,
}

impl SpinningBody {
    pub fn new(mass_m0: f64, size_rho: f64, spin_s: f64, orbit_radius: f64) -> Result<Self> {
        Self::with_hbar(mass_m0, size_rho, spin_s, orbit_radius, 1.0)
    }

    pub fn with_hbar(
        mass_m0: f64,
        size_rho: f64,
        spin_s: f64,
        orbit_radius: f64,
        hbar: f64,
    ) -> Result<Self> {
        require_positive("mass_m0", mass_m0)?;
        require_positive("size_rho", size_rho)?;
        require_non_negative("spin_s", spin_s)?;
        require_positive("orbit_radius", orbit_radius)?;
        require_positive("hbar", hbar)?;
        Ok(Self {
            mass_m0,
            size_rho,
            spin_s,
            orbit_radius,
            hbar,
        })
    }

    /// `1 + s²/ρ²`, the factor by which spin stiffens the kinetic term.
    pub fn spin_factor(&self) -> f64 {
        1.0 + (self.spin_s / self.size_rho).powi(2)
    }

    pub fn effective_mass(&self) -> f64 {
        self.mass_m0 / self.spin_factor()
    }
}

/// Orthonormal triad; row `a` holds the components `e_i^(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameState {
    pub e: Mat3,
}

impl FrameState {
    pub fn new(e: Mat3) -> Result<Self> {
        let frame = Self { e };
        let residual = frame.orthonormality_residual();
        if residual > FRAME_TOLERANCE {
            return Err(Error::FrameNotOrthonormal { residual });
        }
        Ok(frame)
    }

    pub fn identity() -> Self {
        Self {
            e: Mat3::identity(),
        }
    }

    /// Rows: meridian tangent, transverse direction ∂x/∂v, surface normal.
    pub fn surface_adapted(u: f64) -> Self {
        Self {
            e: Mat3::from_rows(&[
                centerline_tangent(u).transpose(),
                centerline_transverse(u).transpose(),
                centerline_normal(u).transpose(),
            ]),
        }
    }

    /// max |e eᵀ − 1|
    pub fn orthonormality_residual(&self) -> f64 {
        (self.e * self.e.transpose() - Mat3::identity()).amax()
    }

    pub fn row(&self, a: usize) -> Vec3 {
        self.e.row(a).transpose()
    }

    pub fn normal(&self) -> Vec3 {
        self.row(2)
    }

    /// max-norm distance between two frames.
    pub fn mismatch(&self, other: &FrameState) -> f64 {
        (self.e - other.e).amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    /// time-like coordinate q⁰
    pub t: f64,
    /// momentum conjugate to t
    pub p0: f64,
    pub x: Vec3,
    pub p: Vec3,
    /// antisymmetric spin tensor Σ_ij
    pub sigma: Mat3,
    pub frame: FrameState,
    pub tau: f64,
}

impl PhaseState {
    /// State at rest at the origin with identity frame.
    pub fn origin() -> Self {
        Self {
            t: 0.0,
            p0: 0.0,
            x: Vec3::zeros(),
            p: Vec3::zeros(),
            sigma: Mat3::zeros(),
            frame: FrameState::identity(),
            tau: 0.0,
        }
    }

    /// A state that satisfies the circle, spin-alignment and energy
    /// constraints: position at meridian angle `theta`, tangential momentum
    /// `p_theta / r`, spin locked to the momentum and `p0` solving the
    /// first-class constraint.
    pub fn on_meridian<V>(
        body: &SpinningBody,
        theta: f64,
        p_theta: f64,
        frame: FrameState,
        potential: V,
    ) -> Self
    where
        V: Fn(&Vec3) -> f64,
    {
        let r = body.orbit_radius;
        let (s, c) = theta.sin_cos();
        let x = Vec3::new(r * s, r * c, 0.0);
        let p = centerline_tangent(theta) * (p_theta / r);
        let sigma = spin_from_momentum(&p, body.spin_s);
        let mut state = Self {
            t: 0.0,
            p0: 0.0,
            x,
            p,
            sigma,
            frame,
            tau: 0.0,
        };
        state.p0 = -first_class_constraint(&state, body, potential);
        state
    }

    /// max |Σ + Σᵀ|
    pub fn antisymmetry_residual(&self) -> f64 {
        (self.sigma + self.sigma.transpose()).amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LagrangeMultipliers {
    pub lambda: f64,
    pub xi: f64,
    pub eta: Vec3,
    pub kappa: Mat3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResiduals {
    /// p0 + p·p/2m + Σ:Σ/(2mρ²) + V
    pub h0: f64,
    /// x·x − r²
    pub circle: f64,
    /// ε^{ijk} Σ_jk − s p^i
    pub spin_align: Vec3,
    /// max |e(τ) − e(τ + 4π)|
    pub frame_period: f64,
}

impl ConstraintResiduals {
    pub fn is_finite(&self) -> bool {
        self.h0.is_finite()
            && self.circle.is_finite()
            && self.spin_align.iter().all(|x| x.is_finite())
            && self.frame_period.is_finite()
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.h0
            .abs()
            .max(self.circle.abs())
            .max(self.spin_align.amax())
            .max(self.frame_period.abs())
    }
}

/// Canonical coordinate `k` of the pairs (t, p0), (x¹, p₁), (x², p₂), (x³, p₃).
fn shift_coordinate(state: &PhaseState, k: usize, delta: f64) -> PhaseState {
    let mut s = *state;
    match k {
        0 => s.t += delta,
        _ => s.x[k - 1] += delta,
    }
    s
}

fn shift_momentum(state: &PhaseState, k: usize, delta: f64) -> PhaseState {
    let mut s = *state;
    match k {
        0 => s.p0 += delta,
        _ => s.p[k - 1] += delta,
    }
    s
}

fn central<F>(f: &F, plus: &PhaseState, minus: &PhaseState, step: f64) -> Result<f64>
where
    F: Fn(&PhaseState) -> f64,
{
    let (a, b) = (f(plus), f(minus));
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            context: "Poisson bracket stencil",
        });
    }
    Ok((a - b) / (2.0 * step))
}

/// `{f, g} = Σ_k ∂f/∂q^k ∂g/∂p_k − ∂f/∂p_k ∂g/∂q^k` over the four canonical
/// pairs, with central differences of width `step`.
pub fn poisson_bracket<F, G>(f: F, g: G, at: &PhaseState, step: f64) -> Result<f64>
where
    F: Fn(&PhaseState) -> f64,
    G: Fn(&PhaseState) -> f64,
{
    require_positive("step", step)?;
    let mut acc = 0.0;
    for k in 0..4 {
        let qp = shift_coordinate(at, k, step);
        let qm = shift_coordinate(at, k, -step);
        let pp = shift_momentum(at, k, step);
        let pm = shift_momentum(at, k, -step);
        let df_dq = central(&f, &qp, &qm, step)?;
        let dg_dp = central(&g, &pp, &pm, step)?;
        let df_dp = central(&f, &pp, &pm, step)?;
        let dg_dq = central(&g, &qp, &qm, step)?;
        acc += df_dq * dg_dp - df_dp * dg_dq;
    }
    Ok(acc)
}

/// `q̇⁰ p₀ + q̇ⁱ pᵢ − 𝓛` for the reparametrized Lagrangian
/// `𝓛 = ½ m (q̇⁰)⁻¹ q̇² − q̇⁰ V(q)`. Identically zero: the canonical
/// Hamiltonian of a reparametrization-invariant action vanishes.
pub fn legendre_residual<V>(
    q0dot: f64,
    qdot: &Vec3,
    q: &Vec3,
    body: &SpinningBody,
    potential: V,
) -> Result<f64>
where
    V: Fn(&Vec3) -> f64,
{
    if q0dot == 0.0 {
        return Err(Error::ZeroLapse);
    }
    let m = body.mass_m0;
    let v = potential(q);
    let speed2 = qdot.norm_squared();
    let lagrangian = 0.5 * m * speed2 / q0dot - q0dot * v;
    let p = qdot * (m / q0dot);
    let p0 = -0.5 * m * speed2 / (q0dot * q0dot) - v;
    Ok(q0dot * p0 + qdot.dot(&p) - lagrangian)
}

/// `Σ^{ij} Σ_{ij}` (Euclidean indices).
pub fn spin_contraction(sigma: &Mat3) -> f64 {
    sigma.component_mul(sigma).sum()
}

/// `p₀ + p·p/(2m) + Σ:Σ/(2mρ²) + V(x)`.
pub fn first_class_constraint<V>(state: &PhaseState, body: &SpinningBody, potential: V) -> f64
where
    V: Fn(&Vec3) -> f64,
{
    let m = body.mass_m0;
    state.p0
        + state.p.norm_squared() / (2.0 * m)
        + spin_contraction(&state.sigma) / (2.0 * m * body.size_rho.powi(2))
        + potential(&state.x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularVelocity {
    /// antisymmetrized σ
    pub sigma: Mat3,
    /// max |σ_raw + σ_rawᵀ| / 2 before symmetrization
    pub asymmetry: f64,
}

/// `σ_ij = Σ_a e_i^(a) ė_j^(a)`, i.e. `eᵀ ė` with the triad in rows.
pub fn angular_velocity(frame: &FrameState, frame_dot: &Mat3) -> Result<AngularVelocity> {
    let residual = frame.orthonormality_residual();
    if residual > 1e-6 {
        return Err(Error::FrameNotOrthonormal { residual });
    }
    let raw = frame.e.transpose() * frame_dot;
    let sym = (raw + raw.transpose()) * 0.5;
    Ok(AngularVelocity {
        sigma: (raw - raw.transpose()) * 0.5,
        asymmetry: sym.amax(),
    })
}

/// `v_i = ε_{ijk} Σ_jk`.
pub fn epsilon_contract(sigma: &Mat3) -> Vec3 {
    Vec3::new(
        sigma[(1, 2)] - sigma[(2, 1)],
        sigma[(2, 0)] - sigma[(0, 2)],
        sigma[(0, 1)] - sigma[(1, 0)],
    )
}

/// The antisymmetric solution `Σ_jk = (s/2) ε_{jkl} p^l` of `ε^{ijk}Σ_jk = s pⁱ`.
pub fn spin_from_momentum(p: &Vec3, s: f64) -> Mat3 {
    let h = 0.5 * s;
    Mat3::new(
        0.0,
        h * p.z,
        -h * p.y,
        -h * p.z,
        0.0,
        h * p.x,
        h * p.y,
        -h * p.x,
        0.0,
    )
}

pub fn constraint_residuals<V>(
    state: &PhaseState,
    body: &SpinningBody,
    potential: V,
    frame_at_plus_4pi: &FrameState,
) -> ConstraintResiduals
where
    V: Fn(&Vec3) -> f64,
{
    ConstraintResiduals {
        h0: first_class_constraint(state, body, potential),
        circle: state.x.norm_squared() - body.orbit_radius.powi(2),
        spin_align: epsilon_contract(&state.sigma) - state.p * body.spin_s,
        frame_period: state.frame.mismatch(frame_at_plus_4pi),
    }
}
