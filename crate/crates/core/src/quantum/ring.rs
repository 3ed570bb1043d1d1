//! Finite-difference ring Hamiltonian on a 4π-periodic grid.
//!
//! ```text
//! Ĥ = (1 / 2m₀′r²) (−iℏ d/dθ − ℏA)² + V(θ),   θ ∈ [0, 4π)
//! ```
//!
//! discretized with the three-point stencil and a Peierls phase on each bond:
//! `H[j][j+1] = −t e^{−iAΔθ}`, `H[j][j] = 2t + V_j`, `t = ℏ²/(2m₀′r²Δθ²)`.
//! The last grid point couples back to the first, which is what enforces
//! ψ(θ) = ψ(θ + 4π).

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64;

use super::Spectrum;
use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RingHamiltonian {
    pub m_eff: f64,
    pub hbar: f64,
    /// gauge parameter A, in units of inverse radians
    pub flux_a: f64,
    /// V(θ_j) at θ_j = j Δθ
    pub potential: Vec<f64>,
    pub grid_n: usize,
    /// Scales the kinetic term to ℏ²/(2 m₀′ r²). 1 reproduces the bare θ equation.
    pub orbit_radius: f64,
}

/// Whether [`ring_eigensolve`] returns eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vectors {
    Skip,
    Keep,
}

impl RingHamiltonian {
    pub fn free(m_eff: f64, hbar: f64, grid_n: usize) -> Result<Self> {
        require_positive("m_eff", m_eff)?;
        require_positive("hbar", hbar)?;
        if grid_n < 16 || !grid_n.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "grid_n",
                value: grid_n as f64,
                reason: "must be even and at least 16",
            });
        }
        Ok(Self {
            m_eff,
            hbar,
            flux_a: 0.0,
            potential: vec![0.0; grid_n],
            grid_n,
            orbit_radius: 1.0,
        })
    }

    pub fn with_flux(mut self, flux_a: f64) -> Result<Self> {
        if !flux_a.is_finite() {
            return Err(Error::NonFinite { context: "flux" });
        }
        self.flux_a = flux_a;
        Ok(self)
    }

    pub fn with_orbit_radius(mut self, r: f64) -> Result<Self> {
        require_positive("orbit_radius", r)?;
        self.orbit_radius = r;
        Ok(self)
    }

    pub fn with_potential(self, v: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..self.grid_n).map(|j| v(self.theta(j))).collect();
        self.with_potential_samples(samples)
    }

    pub fn with_potential_samples(mut self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.grid_n {
            return Err(Error::InvalidParameter {
                name: "potential",
                value: samples.len() as f64,
                reason: "sample count must equal grid_n",
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "potential samples",
            });
        }
        self.potential = samples;
        Ok(self)
    }

    pub fn spacing(&self) -> f64 {
        4.0 * PI / self.grid_n as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.spacing() * j as f64
    }

    /// Hopping strength t = ℏ²/(2 m₀′ r² Δθ²).
    pub fn hopping_strength(&self) -> f64 {
        let h = self.spacing();
        self.hbar * self.hbar / (2.0 * self.m_eff * self.orbit_radius.powi(2) * h * h)
    }

    /// Matrix element H[j][j+1].
    pub fn bond(&self) -> Complex64 {
        -self.hopping_strength() * Complex64::from_polar(1.0, -self.flux_a * self.spacing())
    }

    /// Left and right stencil neighbours with wrap-around.
    pub fn neighbors(&self, j: usize) -> (usize, usize) {
        let n = self.grid_n;
        ((j + n - 1) % n, (j + 1) % n)
    }

    /// Level spacing scale ℏ²/(8 m₀′ r²).
    pub fn level_scale(&self) -> f64 {
        self.hbar * self.hbar / (8.0 * self.m_eff * self.orbit_radius.powi(2))
    }

    /// Matrix-free `H ψ`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(psi.len(), self.grid_n);
        let t = self.hopping_strength();
        let b = self.bond();
        (0..self.grid_n)
            .map(|j| {
                let (l, r) = self.neighbors(j);
                (2.0 * t + self.potential[j]) * psi[j] + b * psi[r] + b.conj() * psi[l]
            })
            .collect()
    }

    fn is_real(&self) -> bool {
        self.flux_a == 0.0
    }

    fn dense_real(&self) -> Mat<f64> {
        let t = self.hopping_strength();
        let n = self.grid_n;
        let mut m = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            let (l, r) = self.neighbors(j);
            m[(j, j)] = 2.0 * t + self.potential[j];
            m[(j, r)] = -t;
            m[(j, l)] = -t;
        }
        m
    }

    fn dense_complex(&self) -> Mat<Complex64> {
        let t = self.hopping_strength();
        let b = self.bond();
        let n = self.grid_n;
        let mut m = Mat::<Complex64>::zeros(n, n);
        for j in 0..n {
            let (l, r) = self.neighbors(j);
            m[(j, j)] = Complex64::new(2.0 * t + self.potential[j], 0.0);
            m[(j, r)] = b;
            m[(j, l)] = b.conj();
        }
        m
    }

    /// Same operator on every other grid point.
    fn coarsened(&self) -> Self {
        Self {
            potential: self.potential.iter().step_by(2).copied().collect(),
            grid_n: self.grid_n / 2,
            ..self.clone()
        }
    }

    fn eigenvalues(&self) -> Result<Vec<f64>> {
        let err = |e| Error::Eigensolver(format!("{e:?}"));
        if self.is_real() {
            self.dense_real()
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(err)
        } else {
            self.dense_complex()
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(err)
        }
    }

    fn eigenpairs(&self, count: usize) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
        let err = |e| Error::Eigensolver(format!("{e:?}"));
        let scale = 1.0 / self.spacing().sqrt();
        let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if self.is_real() {
            let evd = self
                .dense_real()
                .self_adjoint_eigen(Side::Lower)
                .map_err(err)?;
            let s = evd.S().column_vector();
            let u = evd.U();
            let values: Vec<f64> = (0..count).map(|k| s[k]).collect();
            let vectors = (0..count)
                .map(|k| {
                    (0..self.grid_n)
                        .map(|j| Complex64::new(u[(j, k)] * scale, 0.0))
                        .collect()
                })
                .collect();
            (values, vectors)
        } else {
            let evd = self
                .dense_complex()
                .self_adjoint_eigen(Side::Lower)
                .map_err(err)?;
            let s = evd.S().column_vector();
            let u = evd.U();
            let values: Vec<f64> = (0..count).map(|k| s[k].re).collect();
            let vectors = (0..count)
                .map(|k| (0..self.grid_n).map(|j| u[(j, k)] * scale).collect())
                .collect();
            (values, vectors)
        };
        let vectors = vectors.into_iter().map(fix_phase).collect();
        Ok((values, vectors))
    }
}

/// Rotates the global phase so the largest component is real and positive.
fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let pivot = v
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (j, z)| {
            if z.norm() > best.1 + 1e-12 {
                (j, z.norm())
            } else {
                best
            }
        })
        .0;
    let phase = v[pivot].conj() / v[pivot].norm();
    if phase.is_finite() {
        v.iter_mut().for_each(|z| *z *= phase);
    }
    v
}

/// The `n_levels` lowest eigenvalues of the discretized ring Hamiltonian.
///
/// `convergence_estimate` compares against the same operator on `grid_n/2`
/// points; a warning is attached when it exceeds 1e-3 of the spectral width.
pub fn ring_eigensolve(h: &RingHamiltonian, n_levels: usize, vectors: Vectors) -> Result<Spectrum> {
    let max = h.grid_n / 2;
    if n_levels == 0 || n_levels > max {
        return Err(Error::TooManyLevels {
            requested: n_levels,
            max,
        });
    }
    let (eigenvalues, eigenvectors) = match vectors {
        Vectors::Skip => {
            let mut all = h.eigenvalues()?;
            all.truncate(n_levels);
            (all, None)
        }
        Vectors::Keep => {
            let (values, vecs) = h.eigenpairs(n_levels)?;
            (values, Some(vecs))
        }
    };

    let coarse = h.coarsened().eigenvalues()?;
    let convergence_estimate = eigenvalues
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let width = (eigenvalues[n_levels - 1] - eigenvalues[0]).max(h.level_scale());
    let mut warnings = Vec::new();
    if convergence_estimate > 1e-3 * width {
        warnings.push(format!(
            "convergence estimate {convergence_estimate:e} exceeds 1e-3 of the spectral width {width:e}; refine the grid"
        ));
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        grid_n: h.grid_n,
        convergence_estimate,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: the discrete operator is diagonal in the lattice
    /// plane waves e^{i q θ_j}, q = m/2, with eigenvalue 2t(1 − cos((q − A)Δθ)) + c.
    fn plane_wave_levels(h: &RingHamiltonian, constant: f64) -> Vec<f64> {
        let t = h.hopping_strength();
        let dt = h.spacing();
        let mut levels: Vec<f64> = (0..h.grid_n)
            .map(|m| {
                let q = m as f64 / 2.0;
                2.0 * t * (1.0 - ((q - h.flux_a) * dt).cos()) + constant
            })
            .collect();
        levels.sort_by(f64::total_cmp);
        levels
    }

    #[test]
    fn grid_invariants() {
        assert!(RingHamiltonian::free(1.0, 1.0, 14).is_err());
        assert!(RingHamiltonian::free(1.0, 1.0, 17).is_err());
        assert!(RingHamiltonian::free(0.0, 1.0, 16).is_err());
        let h = RingHamiltonian::free(1.0, 1.0, 16).unwrap();
        assert!(h.clone().with_potential(|_| f64::NAN).is_err());
        assert!(h.clone().with_potential_samples(vec![0.0; 3]).is_err());
        assert!(matches!(
            ring_eigensolve(&h, 9, Vectors::Skip),
            Err(Error::TooManyLevels {
                requested: 9,
                max: 8
            })
        ));
        assert!(ring_eigensolve(&h, 0, Vectors::Skip).is_err());
    }

    #[test]
    fn stencil_wraps_around() {
        let h = RingHamiltonian::free(1.0, 1.0, 32).unwrap();
        assert_eq!(h.neighbors(31), (30, 0));
        assert_eq!(h.neighbors(0), (31, 1));
        // a delta on the first point leaks into the last row
        let mut psi = vec![Complex64::new(0.0, 0.0); 32];
        psi[0] = Complex64::new(1.0, 0.0);
        let out = h.apply(&psi);
        assert_eq!(out[31], h.bond());
        assert_eq!(out[1], h.bond().conj());
    }

    #[test]
    fn matches_plane_wave_oracle() {
        for &a in &[0.0, 0.13, 0.5] {
            let h = RingHamiltonian::free(1.3, 0.9, 64)
                .unwrap()
                .with_flux(a)
                .unwrap();
            let s = ring_eigensolve(&h, 32, Vectors::Skip).unwrap();
            let oracle = plane_wave_levels(&h, 0.0);
            for (x, y) in s.eigenvalues.iter().zip(&oracle) {
                assert!((x - y).abs() < 1e-9 * h.hopping_strength(), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn constant_potential_shifts_levels() {
        let c = 0.731;
        let base = RingHamiltonian::free(1.0, 1.0, 128).unwrap();
        let shifted = base.clone().with_potential(|_| c).unwrap();
        let a = ring_eigensolve(&base, 12, Vectors::Skip).unwrap();
        let b = ring_eigensolve(&shifted, 12, Vectors::Skip).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((y - x - c).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvectors_are_normalized_and_variational() {
        let h = RingHamiltonian::free(1.0, 1.0, 128)
            .unwrap()
            .with_flux(0.2)
            .unwrap()
            .with_potential(|th| 0.4 * (0.5 * th).cos() + 0.1 * th.sin())
            .unwrap();
        let s = ring_eigensolve(&h, 6, Vectors::Keep).unwrap();
        let dt = h.spacing();
        for (e, psi) in s.eigenvalues.iter().zip(s.eigenvectors.as_ref().unwrap()) {
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dt;
            assert!((norm - 1.0).abs() < 1e-10);
            let hpsi = h.apply(psi);
            let rq: Complex64 = psi
                .iter()
                .zip(&hpsi)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                * dt;
            assert!((rq.re - e).abs() < 1e-10 * (1.0 + e.abs()));
            assert!(rq.im.abs() < 1e-10);
        }
        let csv = s.eigenvector_csv().unwrap();
        assert_eq!(csv.lines().count(), 129);
        assert!(csv.starts_with("theta,re_psi_0,im_psi_0,"));
    }

    #[test]
    fn coarse_grid_warning() {
        let h = RingHamiltonian::free(1.0, 1.0, 16).unwrap();
        let s = ring_eigensolve(&h, 8, Vectors::Skip).unwrap();
        assert!(s.convergence_estimate > 0.0);
        assert!(!s.warnings.is_empty());
    }
}
