//! Radial Coulomb problem with the half-integer centrifugal term.
//!
//! With `u = r R(r)` the radial equation becomes
//!
//! ```text
//! −(ℏ²/2m₀′) u″ + [ℏ²k²/(8m₀′r²) − e²/r] u = E u,   u(0) = u(r_max) = 0
//! ```
//!
//! The centrifugal coefficient k²/4 plays the role of l(l+1), so the exact
//! bound levels are `−m₀′e⁴ / (2ℏ²ν²)` with `ν = n_r + l_eff + 1` and
//! `l_eff = (−1 + √(1 + k²))/2`, which is an integer only for k = 0.
//!
//! Nodes are placed at `r_i = r_max (i/(N+1))²` so they crowd toward the
//! origin where `u ~ r^{l_eff+1}` is least smooth. A finite-volume second
//! difference with diagonal mass weights keeps the matrix symmetric
//! tridiagonal after the `W^{1/2}` similarity transform.

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombProblem {
    pub k: i64,
    pub m_eff: f64,
    pub hbar: f64,
    pub charge_e2: f64,
    pub r_max: f64,
    /// interior grid points
    pub grid_n: usize,
    pub n_levels: usize,
}

impl CoulombProblem {
    /// ℏ = m₀′ = e² = 1, r_max = 200, 4000 points, three levels.
    pub fn atomic(k: i64) -> Self {
        Self {
            k,
            m_eff: 1.0,
            hbar: 1.0,
            charge_e2: 1.0,
            r_max: 200.0,
            grid_n: 4000,
            n_levels: 3,
        }
    }

    fn validate(&self) -> Result<()> {
        require_positive("m_eff", self.m_eff)?;
        require_positive("hbar", self.hbar)?;
        require_positive("charge_e2", self.charge_e2)?;
        require_positive("r_max", self.r_max)?;
        if self.grid_n < 200 {
            return Err(Error::InvalidParameter {
                name: "grid_n",
                value: self.grid_n as f64,
                reason: "radial grid needs at least 200 points",
            });
        }
        if self.n_levels == 0 || self.n_levels > self.grid_n {
            return Err(Error::TooManyLevels {
                requested: self.n_levels,
                max: self.grid_n,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoulombSolution {
    /// bound (negative) energies among the lowest `n_levels`, ascending
    pub energies: Vec<f64>,
    /// interior nodes
    pub radii: Vec<f64>,
    /// lowest-level u(r) on `radii`, max-normalized
    pub ground_state: Vec<f64>,
    /// |u(last interior node)| / max |u|
    pub tail_amplitude: f64,
    pub warnings: Vec<String>,
}

pub fn effective_angular_momentum(k: i64) -> f64 {
    let k = k as f64;
    0.5 * (-1.0 + (1.0 + k * k).sqrt())
}

/// Exact level with `n_r` radial nodes.
pub fn coulomb_closed_form(p: &CoulombProblem, n_r: usize) -> f64 {
    let nu = n_r as f64 + effective_angular_momentum(p.k) + 1.0;
    -p.m_eff * p.charge_e2.powi(2) / (2.0 * p.hbar.powi(2) * nu * nu)
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1].powi(2) };
            d = self.diag[i] - x - b2 / d;
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs() + f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue by bisection.
    fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves (T − σ) y = rhs by the Thomas algorithm.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut denom = self.diag[0] - sigma;
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        y[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - sigma - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            y[i] = (rhs[i] - self.off[i - 1] * y[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }

    /// Eigenvector of the lowest eigenvalue by shifted inverse iteration.
    fn lowest_vector(&self, lowest: f64, gap_hint: f64) -> Vec<f64> {
        let sigma = lowest - 1e-6 * gap_hint.abs().max(f64::MIN_POSITIVE);
        let mut v = vec![1.0; self.diag.len()];
        for _ in 0..6 {
            v = self.solve_shifted(sigma, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

pub fn coulomb_radial_solve(p: &CoulombProblem) -> Result<CoulombSolution> {
    p.validate()?;
    let n = p.grid_n;
    let nodes: Vec<f64> = (0..n + 2)
        .map(|i| {
            let x = i as f64 / (n + 1) as f64;
            p.r_max * x * x
        })
        .collect();
    let radii = nodes[1..=n].to_vec();
    let gaps: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
    let weights: Vec<f64> = (1..=n)
        .map(|i| 0.5 * (nodes[i + 1] - nodes[i - 1]))
        .collect();

    let kinetic = p.hbar * p.hbar / (2.0 * p.m_eff);
    let centrifugal = kinetic * (p.k * p.k) as f64 / 4.0;
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let r = radii[i];
            kinetic * (1.0 / gaps[i] + 1.0 / gaps[i + 1]) / weights[i] + centrifugal / (r * r)
                - p.charge_e2 / r
        })
        .collect();
    let off: Vec<f64> = (0..n - 1)
        .map(|i| -kinetic / (gaps[i + 1] * (weights[i] * weights[i + 1]).sqrt()))
        .collect();
    let t = Tridiagonal { diag, off };

    let lowest: Vec<f64> = (0..p.n_levels).map(|i| t.eigenvalue(i)).collect();
    let energies: Vec<f64> = lowest.iter().copied().filter(|e| *e < 0.0).collect();

    let gap = if p.n_levels > 1 {
        lowest[1] - lowest[0]
    } else {
        lowest[0]
    };
    let v = t.lowest_vector(lowest[0], gap);
    let mut u: Vec<f64> = v.iter().zip(&weights).map(|(x, w)| x / w.sqrt()).collect();
    let peak = u
        .iter()
        .fold(0.0_f64, |m, x| if x.abs() > m.abs() { *x } else { m });
    u.iter_mut().for_each(|x| *x /= peak);
    let tail_amplitude = u[n - 1].abs();

    let mut warnings = Vec::new();
    if tail_amplitude > 1e-6 {
        warnings.push(format!(
            "ground state has relative amplitude {tail_amplitude:e} at r_max = {}; enlarge the box",
            p.r_max
        ));
    }
    if energies.is_empty() {
        warnings.push("no bound levels found".to_owned());
    }

    Ok(CoulombSolution {
        energies,
        radii,
        ground_state: u,
        tail_amplitude,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombLevel {
    pub n: u32,
    pub k: i64,
    pub energy: f64,
    /// n² − n ≥ k²/4
    pub allowed: bool,
}

/// `n² − n ≥ k²/4`, evaluated in integers as `4(n² − n) ≥ k²`.
pub fn restriction_allows(n: u32, k: i64) -> bool {
    let n = n as i128;
    let k = k as i128;
    4 * (n * n - n) >= k * k
}

/// `E_n = −½ m₀′ c² α² / n²` for `n = 1..=n_max`, tagged with the restriction rule.
pub fn coulomb_levels_integer_n(
    m_eff: f64,
    alpha: f64,
    c: f64,
    n_max: u32,
    k: i64,
) -> Vec<CoulombLevel> {
    (1..=n_max)
        .map(|n| CoulombLevel {
            n,
            k,
            energy: -0.5 * m_eff * c * c * alpha * alpha / (n as f64).powi(2),
            allowed: restriction_allows(n, k),
        })
        .collect()
}
