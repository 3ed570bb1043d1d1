//! The acceptance checks as a batch: each criterion runs at its pinned
//! tolerance and reports pass/fail with the measured quantities.
//!
//! Detail lines only contain deterministic numbers, so two runs of the same
//! build print identical reports. Runtime budgets are checked but the elapsed
//! time itself is not printed.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::classical::{
    self, evolve, legendre_residual, poisson_bracket, FrameState, FreeMotion, PhaseState,
    SpinningBody,
};
use crate::error::Result;
use crate::geometry::{self, centerline_normal, embed, tangents, MoebiusShape, ParamPoint, Vec3};
use crate::quantum::{
    self, coulomb_closed_form, coulomb_levels_integer_n, coulomb_radial_solve,
    effective_angular_momentum, flux_spectrum_analytic, free_spectrum_analytic, ring_eigensolve,
    CoulombProblem, RingHamiltonian, Vectors,
};

pub const HOLONOMY_TOL: f64 = 1e-12;
pub const FD_TANGENT_TOL: f64 = 1e-8;
pub const NORMAL_TOL: f64 = 1e-12;
pub const BRACKET_TOL: f64 = 1e-8;
pub const LEGENDRE_TOL: f64 = 1e-12;
pub const RING_GRID: usize = 2048;
pub const RING_LEVELS: usize = 10;
pub const RING_REL_TOL: f64 = 1e-4;
pub const CONVERGENCE_RATIO: (f64, f64) = (3.0, 5.0);
pub const DEGENERACY_TOL: f64 = 1e-8;
pub const FLUX_VALUES: [f64; 4] = [0.0, 0.1, 0.25, 0.5];
pub const FLUX_PERIOD_TOL: f64 = 1e-6;
pub const PROTON_WINDOW: (f64, f64) = (5.49e-27, 5.71e-27);
pub const COULOMB_REL_TOL: f64 = 1e-3;
pub const CLASSICAL_ENERGY_TOL: f64 = 1e-10;
pub const CLASSICAL_CONSTRAINT_TOL: f64 = 1e-9;
pub const FRAME_HOLONOMY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub budget: Duration,
    pub within_budget: bool,
    pub details: Vec<String>,
}

impl CriterionReport {
    pub fn ok(&self) -> bool {
        self.passed && self.within_budget
    }
}

struct Check {
    passed: bool,
    details: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    /// Records a named condition with its measured value.
    fn expect(&mut self, label: &str, ok: bool, measured: String) {
        self.passed &= ok;
        let mark = if ok { "ok" } else { "FAIL" };
        self.details.push(format!("{mark:4} {label}: {measured}"));
    }

    fn note(&mut self, line: String) {
        self.details.push(line);
    }
}

fn timed(
    id: u32,
    name: &'static str,
    budget_secs: f64,
    body: impl FnOnce() -> Result<Check>,
) -> CriterionReport {
    let budget = Duration::from_secs_f64(budget_secs);
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (passed, details) = match outcome {
        Ok(c) => (c.passed, c.details),
        Err(e) => (false, vec![format!("FAIL error: {e}")]),
    };
    CriterionReport {
        id,
        name,
        passed,
        budget,
        within_budget: elapsed <= budget,
        details,
    }
}

/// Relative error with a floor so zero-energy levels are judged on the level scale.
fn rel_err(value: f64, exact: f64, floor: f64) -> f64 {
    (value - exact).abs() / exact.abs().max(floor)
}

pub fn criterion_1_normal_holonomy() -> CriterionReport {
    timed(1, "normal holonomy", 0.1, || {
        let mut c = Check::new();
        let shape = MoebiusShape::with_radius(1.0)?;
        let rep = geometry::holonomy_report(&shape, 1000)?;
        c.expect(
            "max |n(u+2pi) + n(u)| over 1000 samples",
            rep.flip_residual < HOLONOMY_TOL,
            format!("{:.3e} < {HOLONOMY_TOL:e}", rep.flip_residual),
        );
        c.expect(
            "max |n(u+4pi) - n(u)| over 1000 samples",
            rep.period_residual < HOLONOMY_TOL,
            format!("{:.3e} < {HOLONOMY_TOL:e}", rep.period_residual),
        );
        Ok(c)
    })
}

pub fn criterion_2_frame_consistency() -> CriterionReport {
    timed(2, "frame/embedding consistency", 1.0, || {
        let mut c = Check::new();
        let shape = MoebiusShape::with_radius(1.0)?;
        let w = shape.half_width();
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..100 {
            let u = 4.0 * PI * i as f64 / 100.0;
            for j in 0..10 {
                // cell centres keep the v stencil inside the strip
                let v = -w + (j as f64 + 0.5) * 2.0 * w / 10.0;
                let frame = tangents(&shape, ParamPoint::new(u, v))?;
                let at = |u, v| embed(&shape, ParamPoint::new(u, v)).map(|p| p.to_vec3());
                let du = (at(u + h, v)? - at(u - h, v)?) / (2.0 * h);
                let dv = (at(u, v + h)? - at(u, v - h)?) / (2.0 * h);
                worst = worst
                    .max((du - frame.e_u).norm() / frame.e_u.norm())
                    .max((dv - frame.e_v).norm() / frame.e_v.norm());
            }
        }
        c.expect(
            "tangents vs central differences on 100x10 grid (rel)",
            worst < FD_TANGENT_TOL,
            format!("{worst:.3e} < {FD_TANGENT_TOL:e}"),
        );

        let mut normal_err: f64 = 0.0;
        for i in 0..100 {
            let u = 4.0 * PI * i as f64 / 100.0;
            let f = tangents(&shape, ParamPoint::new(u, 0.0))?;
            normal_err = normal_err.max((f.normal - centerline_normal(u)).norm());
        }
        c.expect(
            "normalized e_u x e_v at v=0 vs closed-form normal",
            normal_err < NORMAL_TOL,
            format!("{normal_err:.3e} < {NORMAL_TOL:e}"),
        );
        Ok(c)
    })
}

fn random_phase_state(rng: &mut StdRng) -> PhaseState {
    let mut s = PhaseState::origin();
    s.t = rng.random_range(-3.0..3.0);
    s.p0 = rng.random_range(-3.0..3.0);
    for i in 0..3 {
        s.x[i] = rng.random_range(-3.0..3.0);
        s.p[i] = rng.random_range(-3.0..3.0);
    }
    s
}

pub fn criterion_3_canonical_brackets() -> CriterionReport {
    timed(3, "canonical brackets", 0.1, || {
        let mut c = Check::new();
        let mut rng = StdRng::seed_from_u64(0x5eed_0003);
        let step = classical::DEFAULT_BRACKET_STEP;
        let (mut qp, mut qq, mut pp): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for _ in 0..100 {
            let at = random_phase_state(&mut rng);
            for i in 0..3 {
                for j in 0..3 {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let b = poisson_bracket(|s| s.x[i], |s| s.p[j], &at, step)?;
                    qp = qp.max((b - delta).abs());
                    qq = qq.max(poisson_bracket(|s| s.x[i], |s| s.x[j], &at, step)?.abs());
                    pp = pp.max(poisson_bracket(|s| s.p[i], |s| s.p[j], &at, step)?.abs());
                }
            }
            let b = poisson_bracket(|s| s.t, |s| s.p0, &at, step)?;
            qp = qp.max((b - 1.0).abs());
        }
        for (label, err) in [("{q,p} = delta", qp), ("{q,q} = 0", qq), ("{p,p} = 0", pp)] {
            c.expect(
                label,
                err < BRACKET_TOL,
                format!("max err {err:.3e} < {BRACKET_TOL:e}"),
            );
        }
        Ok(c)
    })
}

pub fn criterion_4_legendre_identity() -> CriterionReport {
    timed(4, "legendre identity", 0.1, || {
        let mut c = Check::new();
        let mut rng = StdRng::seed_from_u64(0x5eed_0004);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let body = SpinningBody::new(rng.random_range(0.1..5.0), 1.0, 0.0, 1.0)?;
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let q0dot = sign * rng.random_range(0.1..3.0);
            let qdot = Vec3::from_fn(|_, _| rng.random_range(-2.0..2.0));
            let q = Vec3::from_fn(|_, _| rng.random_range(-2.0..2.0));
            let r = legendre_residual(q0dot, &qdot, &q, &body, |q| q.norm_squared())?;
            worst = worst.max(r.abs());
        }
        c.expect(
            "canonical Hamiltonian residual on 100 random inputs",
            worst < LEGENDRE_TOL,
            format!("{worst:.3e} < {LEGENDRE_TOL:e}"),
        );
        Ok(c)
    })
}

fn free_levels_error(grid_n: usize, levels: usize) -> Result<(f64, Vec<f64>)> {
    let h = RingHamiltonian::free(1.0, 1.0, grid_n)?;
    let s = ring_eigensolve(&h, levels, Vectors::Skip)?;
    let exact = free_spectrum_analytic(1.0, 1.0, levels).eigenvalues;
    let floor = h.level_scale();
    let err = s.eigenvalues[..RING_LEVELS]
        .iter()
        .zip(&exact)
        .map(|(x, e)| rel_err(*x, *e, floor))
        .fold(0.0, f64::max);
    Ok((err, s.eigenvalues))
}

pub fn criterion_5_free_spectrum() -> CriterionReport {
    timed(5, "free spectrum oracle", 30.0, || {
        let mut c = Check::new();
        let (fine, _) = free_levels_error(RING_GRID, RING_LEVELS)?;
        let (coarse, _) = free_levels_error(RING_GRID / 2, RING_LEVELS)?;
        c.expect(
            "grid 2048 vs hbar^2 n^2/(8m'), 10 lowest (rel)",
            fine < RING_REL_TOL,
            format!("{fine:.3e} < {RING_REL_TOL:e}"),
        );
        let ratio = coarse / fine;
        c.expect(
            "error ratio grid 1024 / grid 2048",
            ratio > CONVERGENCE_RATIO.0 && ratio < CONVERGENCE_RATIO.1,
            format!(
                "{ratio:.4} in ({}, {})",
                CONVERGENCE_RATIO.0, CONVERGENCE_RATIO.1
            ),
        );
        Ok(c)
    })
}

pub fn criterion_6_degeneracy() -> CriterionReport {
    timed(6, "free level degeneracy", 30.0, || {
        let mut c = Check::new();
        let h = RingHamiltonian::free(1.0, 1.0, RING_GRID)?;
        let s = ring_eigensolve(&h, RING_LEVELS + 1, Vectors::Skip)?;
        let e = &s.eigenvalues;
        let worst = (0..RING_LEVELS / 2)
            .map(|j| (e[2 * j + 1] - e[2 * j + 2]).abs() / e[2 * j + 1])
            .fold(0.0, f64::max);
        c.expect(
            "|E(+n) - E(-n)| / E for n = 1..5",
            worst < DEGENERACY_TOL,
            format!("{worst:.3e} < {DEGENERACY_TOL:e}"),
        );
        c.expect(
            "ground level is the constant mode",
            e[0].abs() < 1e-8 * h.level_scale(),
            format!("E0 = {:.3e}", e[0]),
        );
        Ok(c)
    })
}

fn flux_levels(flux: f64) -> Result<Vec<f64>> {
    let h = RingHamiltonian::free(1.0, 1.0, RING_GRID)?.with_flux(flux)?;
    Ok(ring_eigensolve(&h, RING_LEVELS, Vectors::Skip)?.eigenvalues)
}

pub fn criterion_7_flux_spectrum() -> CriterionReport {
    timed(7, "flux spectrum", 120.0, || {
        let mut c = Check::new();
        let floor = 1.0 / 8.0;
        for &a in &FLUX_VALUES {
            let numeric = flux_levels(a)?;
            let analytic = flux_spectrum_analytic(1.0, 1.0, a, RING_LEVELS + 2);
            let minimal = analytic.minimal_energies();
            let quarter = analytic.quarter_energies();
            let err = numeric
                .iter()
                .zip(&minimal)
                .map(|(x, e)| rel_err(*x, *e, floor))
                .fold(0.0, f64::max);
            c.expect(
                &format!("A = {a}: numeric vs (n/2 - A)^2/2, 10 levels (rel)"),
                err < RING_REL_TOL,
                format!("{err:.3e} < {RING_REL_TOL:e}"),
            );

            let shifted = flux_levels(a + 0.5)?;
            let period = numeric
                .iter()
                .zip(&shifted)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            c.expect(
                &format!("A = {a} -> A + 1/2: sorted spectrum unchanged"),
                period < FLUX_PERIOD_TOL,
                format!("{period:.3e} < {FLUX_PERIOD_TOL:e}"),
            );

            let mut table = format!("     A = {a}: level  numeric  (n/2-A)^2/2  (n/4-A)^2/2");
            for i in 0..4 {
                let _ = write!(
                    table,
                    "\n       {i}  {:.6e}  {:.6e}  {:.6e}",
                    numeric[i], minimal[i], quarter[i]
                );
            }
            c.note(table);
        }
        Ok(c)
    })
}

pub fn criterion_8_proton_estimate() -> CriterionReport {
    timed(8, "proton estimate", 0.1, || {
        let mut c = Check::new();
        let d = quantum::proton_energy_denominator();
        c.expect(
            "8 m0' for the proton (kg)",
            d >= PROTON_WINDOW.0 && d <= PROTON_WINDOW.1,
            format!("{d:.4e} in [{:e}, {:e}]", PROTON_WINDOW.0, PROTON_WINDOW.1),
        );
        Ok(c)
    })
}

pub fn criterion_9_coulomb() -> CriterionReport {
    timed(9, "coulomb radial spectrum", 10.0, || {
        let mut c = Check::new();
        for k in 0..=3i64 {
            let p = CoulombProblem::atomic(k);
            let sol = coulomb_radial_solve(&p)?;
            let exact: Vec<f64> = (0..p.n_levels)
                .map(|n_r| coulomb_closed_form(&p, n_r))
                .collect();
            let err = if sol.energies.len() == exact.len() {
                sol.energies
                    .iter()
                    .zip(&exact)
                    .map(|(x, e)| rel_err(*x, *e, 0.0))
                    .fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            let label = if k == 0 {
                "k = 0 vs -1/(2n^2), n = 1..3 (rel)".to_owned()
            } else {
                format!(
                    "k = {k} vs -1/(2(n_r + l_eff + 1)^2), l_eff = {:.6} (rel)",
                    effective_angular_momentum(k)
                )
            };
            c.expect(
                &label,
                err < COULOMB_REL_TOL,
                format!("{err:.3e} < {COULOMB_REL_TOL:e}"),
            );

            // the integer-n formula, restricted to the admissible n for this k
            let integer_n: Vec<f64> = coulomb_levels_integer_n(1.0, 1.0, 1.0, 40, k)
                .into_iter()
                .filter(|l| l.allowed)
                .map(|l| l.energy)
                .take(sol.energies.len())
                .collect();
            let mut line = format!("     k = {k}: signed deviation solver - integer-n formula:");
            let mut max_dev: f64 = 0.0;
            for (x, e) in sol.energies.iter().zip(&integer_n) {
                let _ = write!(line, " {:+.6e}", x - e);
                max_dev = max_dev.max((x - e).abs() / e.abs());
            }
            c.note(line);
            if k != 0 {
                c.expect(
                    &format!("k = {k}: deviation from integer-n formula is nonzero"),
                    max_dev > COULOMB_REL_TOL,
                    format!("max rel {max_dev:.3e}"),
                );
            }
        }
        Ok(c)
    })
}

pub fn criterion_10_restriction_rule() -> CriterionReport {
    timed(10, "restriction rule", 0.1, || {
        let mut c = Check::new();
        let mut mismatches = 0;
        for k in -10i64..=10 {
            let levels = coulomb_levels_integer_n(1.0, 1.0, 1.0, 20, k);
            for l in &levels {
                let n = l.n as i64;
                let brute = (n * n - n) as f64 >= (k * k) as f64 / 4.0;
                if brute != l.allowed {
                    mismatches += 1;
                }
            }
        }
        c.expect(
            "tag vs enumeration of n^2 - n >= k^2/4, n <= 20, |k| <= 10",
            mismatches == 0,
            format!("{mismatches} mismatches"),
        );
        Ok(c)
    })
}

fn free_sweep(sweep: f64) -> Result<classical::Trajectory> {
    let body = SpinningBody::new(1.0, 1.0, 0.5, 1.0)?;
    let steps = 10_000;
    let dtau = 1e-3;
    let rate = sweep / (steps as f64 * dtau);
    let p_theta = rate * body.mass_m0 * body.orbit_radius.powi(2) / body.spin_factor();
    let theta0 = 0.2;
    let init = PhaseState::on_meridian(
        &body,
        theta0,
        p_theta,
        FrameState::surface_adapted(theta0),
        |_: &Vec3| 0.0,
    );
    evolve(&init, &body, &FreeMotion, dtau, steps)
}

pub fn criterion_11_classical_conservation() -> CriterionReport {
    timed(11, "classical conservation", 1.0, || {
        let mut c = Check::new();
        let half = free_sweep(2.0 * PI)?;
        let full = free_sweep(4.0 * PI)?;
        for (label, t) in [("2pi sweep", &half), ("4pi sweep", &full)] {
            let drift = t.max_energy_drift();
            c.expect(
                &format!("{label}: energy drift over 1e4 steps"),
                drift < CLASSICAL_ENERGY_TOL,
                format!("{drift:.3e} < {CLASSICAL_ENERGY_TOL:e}"),
            );
            let circle = t.max_residual(|r| r.circle);
            let spin = t.max_residual(|r| r.spin_align.amax());
            c.expect(
                &format!("{label}: circle residual"),
                circle < CLASSICAL_CONSTRAINT_TOL,
                format!("{circle:.3e} < {CLASSICAL_CONSTRAINT_TOL:e}"),
            );
            c.expect(
                &format!("{label}: spin alignment residual"),
                spin < CLASSICAL_CONSTRAINT_TOL,
                format!("{spin:.3e} < {CLASSICAL_CONSTRAINT_TOL:e}"),
            );
        }
        let n0 = half.first().state.frame.normal();
        let n1 = half.last().state.frame.normal();
        let flip = (n0.dot(&n1) + 1.0).abs();
        c.expect(
            "normal after 2pi: n0 . n1 = -1",
            flip < FRAME_HOLONOMY_TOL,
            format!("|n0.n1 + 1| = {flip:.3e} < {FRAME_HOLONOMY_TOL:e}"),
        );
        let restore = full.last().state.frame.mismatch(&full.first().state.frame);
        c.expect(
            "frame after 4pi equals initial frame",
            restore < FRAME_HOLONOMY_TOL,
            format!("{restore:.3e} < {FRAME_HOLONOMY_TOL:e}"),
        );
        Ok(c)
    })
}

/// Renders a fixed set of artifacts; used to confirm byte-stable output.
pub fn reference_artifacts() -> Result<Vec<(&'static str, String)>> {
    let shape = MoebiusShape::with_radius(1.0)?;
    let mesh = geometry::emit_mesh(&shape, 24, 5)?;
    let traj = free_sweep(1.0)?;
    let ring = ring_eigensolve(
        &RingHamiltonian::free(1.0, 1.0, 64)?.with_flux(0.1)?,
        6,
        Vectors::Keep,
    )?;
    Ok(vec![
        ("mesh.csv", mesh.to_csv()),
        ("mesh.json", mesh.to_json()?),
        ("trajectory.csv", traj.to_csv()),
        ("residuals.json", traj.residual_log_json()?),
        (
            "ring.json",
            ring.to_json(serde_json::json!({"grid_n": 64, "flux": 0.1}))?,
        ),
        (
            "ring_vectors.csv",
            ring.eigenvector_csv().unwrap_or_default(),
        ),
    ])
}

pub fn criterion_12_determinism() -> CriterionReport {
    timed(12, "deterministic output", 5.0, || {
        let mut c = Check::new();
        let first = reference_artifacts()?;
        let second = reference_artifacts()?;
        for ((name, a), (_, b)) in first.iter().zip(&second) {
            c.expect(
                &format!("{name} byte-identical across runs"),
                a == b,
                format!("{} bytes", a.len()),
            );
        }
        Ok(c)
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1_normal_holonomy(),
        criterion_2_frame_consistency(),
        criterion_3_canonical_brackets(),
        criterion_4_legendre_identity(),
        criterion_5_free_spectrum(),
        criterion_6_degeneracy(),
        criterion_7_flux_spectrum(),
        criterion_8_proton_estimate(),
        criterion_9_coulomb(),
        criterion_10_restriction_rule(),
        criterion_11_classical_conservation(),
        criterion_12_determinism(),
    ]
}

/// One PASS/FAIL line per criterion followed by its indented details.
pub fn render_table(reports: &[CriterionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = if r.ok() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "[{status}] {:>2} {}", r.id, r.name);
        for d in &r.details {
            let _ = writeln!(out, "       {}", d.replace('\n', "\n       "));
        }
        let budget = if r.within_budget { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "       {budget} runtime budget {:?}", r.budget);
    }
    let passed = reports.iter().filter(|r| r.ok()).count();
    let _ = writeln!(out, "{passed}/{} criteria passed", reports.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria_pass() {
        for r in [
            criterion_1_normal_holonomy(),
            criterion_3_canonical_brackets(),
            criterion_4_legendre_identity(),
            criterion_8_proton_estimate(),
            criterion_10_restriction_rule(),
        ] {
            assert!(r.passed, "{}", render_table(std::slice::from_ref(&r)));
        }
    }

    #[test]
    fn table_marks_failures() {
        let r = CriterionReport {
            id: 99,
            name: "dummy",
            passed: false,
            budget: Duration::from_secs(1),
            within_budget: true,
            details: vec!["FAIL x: 1".into()],
        };
        let t = render_table(&[r]);
        assert!(t.starts_with("[FAIL] 99 dummy\n"));
        assert!(t.ends_with("0/1 criteria passed\n"));
    }
}
