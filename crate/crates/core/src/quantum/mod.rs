//! Spectra of the 4π-periodic ring Schrödinger equation.
//!
//! Natural units (ℏ = m₀′ = 1) are the default everywhere except for the
//! proton estimate, which works in SI.

mod coulomb;
mod ring;

pub use coulomb::{
    coulomb_closed_form, coulomb_levels_integer_n, coulomb_radial_solve, effective_angular_momentum,
    restriction_allows, CoulombLevel, CoulombProblem, CoulombSolution,
};
pub use ring::{ring_eigensolve, RingHamiltonian, Vectors};

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{require_non_negative, require_positive, Result};
use crate::format::{json_number, json_numbers, to_json_text, CsvTable};

/// Proton rms charge radius in metres, used as the size ρ.
pub const PROTON_CHARGE_RADIUS: f64 = 0.8418e-15;
/// Proton rest mass in kilograms.
pub const PROTON_MASS: f64 = 1.673e-27;
/// Order-of-magnitude spin length s = Σ/p for the proton, in metres.
pub const PROTON_SPIN_LENGTH: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMassInput {
    pub mass_m0: f64,
    pub spin_s: f64,
    pub size_rho: f64,
}

impl EffectiveMassInput {
    pub fn new(mass_m0: f64, spin_s: f64, size_rho: f64) -> Result<Self> {
        require_positive("mass_m0", mass_m0)?;
        require_non_negative("spin_s", spin_s)?;
        require_positive("size_rho", size_rho)?;
        Ok(Self {
            mass_m0,
            spin_s,
            size_rho,
        })
    }

    pub fn proton() -> Self {
        Self {
            mass_m0: PROTON_MASS,
            spin_s: PROTON_SPIN_LENGTH,
            size_rho: PROTON_CHARGE_RADIUS,
        }
    }
}

/// `m₀ / (1 + s²/ρ²)`.
pub fn effective_mass(inp: &EffectiveMassInput) -> f64 {
    inp.mass_m0 / (1.0 + (inp.spin_s / inp.size_rho).powi(2))
}

/// Ordered energies plus solver metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Grid-sampled wavefunctions, one per eigenvalue, normalized so that
    /// `Σ |ψ_j|² Δθ = 1`.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    /// 0 for closed-form spectra.
    pub grid_n: usize,
    /// max |E(grid_n) − E(grid_n/2)| over the returned levels; 0 for closed forms.
    pub convergence_estimate: f64,
    pub warnings: Vec<String>,
}

impl Spectrum {
    pub(crate) fn exact(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self {
            eigenvalues,
            eigenvectors: None,
            grid_n: 0,
            convergence_estimate: 0.0,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `{params, eigenvalues, convergence_estimate, grid_n}`.
    pub fn to_json_value(&self, params: Value) -> Result<Value> {
        let mut obj = Map::new();
        obj.insert("params".into(), params);
        obj.insert("eigenvalues".into(), json_numbers(&self.eigenvalues)?);
        obj.insert(
            "convergence_estimate".into(),
            json_number(self.convergence_estimate)?,
        );
        obj.insert("grid_n".into(), Value::from(self.grid_n));
        Ok(Value::Object(obj))
    }

    pub fn to_json(&self, params: Value) -> Result<String> {
        to_json_text(&self.to_json_value(params)?)
    }

    /// Columns `theta, re_psi_0, im_psi_0, re_psi_1, ...`; `None` without eigenvectors.
    pub fn eigenvector_csv(&self) -> Option<String> {
        let vectors = self.eigenvectors.as_ref()?;
        let n = vectors.first().map_or(0, Vec::len);
        let mut header = vec!["theta".to_owned()];
        for k in 0..vectors.len() {
            header.push(format!("re_psi_{k}"));
            header.push(format!("im_psi_{k}"));
        }
        let mut table = CsvTable::new(&header);
        let h = 4.0 * std::f64::consts::PI / n as f64;
        for j in 0..n {
            let mut row = vec![h * j as f64];
            for v in vectors {
                row.push(v[j].re);
                row.push(v[j].im);
            }
            table.push_row(&row);
        }
        Some(table.into_string())
    }
}

/// `E_n = ℏ² n² / (8 m₀′)` for `n = 0, ±1, …, ±max_n`, modes `e^{inθ/2}`.
pub fn free_spectrum_analytic(m_eff: f64, hbar: f64, max_n: usize) -> Spectrum {
    let scale = hbar * hbar / (8.0 * m_eff);
    let mut levels = vec![0.0];
    for n in 1..=max_n {
        let e = scale * (n * n) as f64;
        levels.push(e);
        levels.push(e);
    }
    Spectrum::exact(levels)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxLevel {
    pub n: i64,
    pub energy: f64,
}

/// Two readings of the flux-threaded ring spectrum, each sorted by energy.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSpectra {
    pub flux: f64,
    /// `(ℏ²/2m₀′)(n/4 − A)²`, the quarter-period reading.
    pub quarter_formula: Vec<FluxLevel>,
    /// `(ℏ²/2m₀′)(n/2 − A)²` from minimal coupling on `e^{inθ/2}`.
    pub minimal_coupling: Vec<FluxLevel>,
}

impl FluxSpectra {
    pub fn minimal_energies(&self) -> Vec<f64> {
        self.minimal_coupling.iter().map(|l| l.energy).collect()
    }

    pub fn quarter_energies(&self) -> Vec<f64> {
        self.quarter_formula.iter().map(|l| l.energy).collect()
    }
}

fn sorted_levels(max_n: usize, energy: impl Fn(i64) -> f64) -> Vec<FluxLevel> {
    let m = max_n as i64;
    let mut levels: Vec<FluxLevel> = (-m..=m)
        .map(|n| FluxLevel {
            n,
            energy: energy(n),
        })
        .collect();
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.n.cmp(&b.n)));
    levels
}

pub fn flux_spectrum_analytic(m_eff: f64, hbar: f64, flux: f64, max_n: usize) -> FluxSpectra {
    let scale = hbar * hbar / (2.0 * m_eff);
    FluxSpectra {
        flux,
        quarter_formula: sorted_levels(max_n, |n| scale * (n as f64 / 4.0 - flux).powi(2)),
        minimal_coupling: sorted_levels(max_n, |n| scale * (n as f64 / 2.0 - flux).powi(2)),
    }
}

pub fn proton_effective_mass() -> f64 {
    effective_mass(&EffectiveMassInput::proton())
}

/// `8 m₀′` for the proton, the denominator of its ground-level estimate.
pub fn proton_energy_denominator() -> f64 {
    8.0 * proton_effective_mass()
}

/// `p_θ² / (8 m₀′)` with the proton constants (SI).
pub fn proton_ground_estimate(p_theta: f64) -> f64 {
    p_theta * p_theta / proton_energy_denominator()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn effective_mass_examples() {
        let m = effective_mass(&EffectiveMassInput::proton());
        assert!((m - 6.9385e-28).abs() < 1e-31, "{m:e}");
        let m = effective_mass(&EffectiveMassInput::new(3.5, 0.0, 0.2).unwrap());
        assert_eq!(m, 3.5);
        let m = effective_mass(&EffectiveMassInput::new(2.0, 1.0, 1.0).unwrap());
        assert_eq!(m, 1.0);
        assert!(EffectiveMassInput::new(1.0, -1.0, 1.0).is_err());
        assert!(EffectiveMassInput::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn proton_numbers() {
        let d = proton_energy_denominator();
        assert!((d - 5.55e-27).abs() / 5.55e-27 < 1e-3, "{d:e}");
        assert!((d - 5.6e-27).abs() / 5.6e-27 < 0.02);
        assert_eq!(proton_ground_estimate(0.0), 0.0);
        let e = proton_ground_estimate(1.0);
        assert!((e * 5.6e-27 - 1.0).abs() < 0.02);
    }

    #[test]
    fn free_levels() {
        let s = free_spectrum_analytic(1.0, 1.0, 2);
        assert_eq!(s.eigenvalues, vec![0.0, 0.125, 0.125, 0.5, 0.5]);
        assert_eq!(s.eigenvalues[3], 4.0 * s.eigenvalues[1]);
        assert_eq!(free_spectrum_analytic(1.0, 1.0, 0).eigenvalues, vec![0.0]);
    }

    #[test]
    fn flux_levels() {
        let zero = flux_spectrum_analytic(1.0, 1.0, 0.0, 4);
        assert_eq!(
            zero.minimal_energies(),
            free_spectrum_analytic(1.0, 1.0, 4).eigenvalues
        );

        let quarter = flux_spectrum_analytic(1.0, 1.0, 0.25, 4);
        let n1 = quarter.minimal_coupling.iter().find(|l| l.n == 1).unwrap();
        assert_eq!(n1.energy, 1.0 / 32.0);

        let p1 = zero.quarter_formula.iter().find(|l| l.n == 1).unwrap();
        let m1 = zero.minimal_coupling.iter().find(|l| l.n == 1).unwrap();
        assert_eq!(p1.energy, 1.0 / 32.0);
        assert_eq!(m1.energy, 1.0 / 8.0);
    }

    #[test]
    fn spectrum_json_shape() {
        let s = free_spectrum_analytic(1.0, 1.0, 1);
        let v: Value =
            serde_json::from_str(&s.to_json(serde_json::json!({"max_n": 1})).unwrap()).unwrap();
        assert_eq!(v["grid_n"], 0);
        assert_eq!(v["eigenvalues"][1].as_f64(), Some(0.125));
        assert!(s.eigenvector_csv().is_none());
    }

    proptest! {
        #[test]
        fn mass_monotonicity(m in 0.1f64..10.0, s in 0.01f64..3.0, rho in 0.1f64..3.0, ds in 0.01f64..1.0) {
            let base = effective_mass(&EffectiveMassInput::new(m, s, rho).unwrap());
            let more_spin = effective_mass(&EffectiveMassInput::new(m, s + ds, rho).unwrap());
            let bigger = effective_mass(&EffectiveMassInput::new(m, s, rho + ds).unwrap());
            prop_assert!(more_spin < base);
            prop_assert!(bigger > base);
            prop_assert!(base <= m);
        }
    }
}
