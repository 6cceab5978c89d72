//! Exact free-fermion solution of the alternating-bond chain
//!
//! ```text
//! H = Σ_{i odd} J_x σˣ_i σˣ_{i+1} + Σ_{i even} J_y σʸ_i σʸ_{i+1} + h Σ_i σᶻ_i
//! ```
//!
//! on a ring of `N` sites. After Jordan-Wigner fermionization the even-parity
//! sector has antiperiodic momenta `k = ±π(2j-1)/N`, and the four momenta
//! `{q-π, -q, q, π-q}` with `0 < q < π/2` form one independent mode.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Physical instance of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    n_sites: usize,
    j_x: f64,
    j_y: f64,
    h_field: f64,
}

impl ChainParams {
    pub fn new(n_sites: usize, j_x: f64, j_y: f64, h_field: f64) -> Result<Self> {
        check_sites(n_sites)?;
        for (name, v) in [("J_x", j_x), ("J_y", j_y), ("h", h_field)] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self { n_sites, j_x, j_y, h_field })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn j_x(&self) -> f64 {
        self.j_x
    }

    pub fn j_y(&self) -> f64 {
        self.j_y
    }

    pub fn h_field(&self) -> f64 {
        self.h_field
    }

    pub fn with_h_field(self, h_field: f64) -> Result<Self> {
        Self::new(self.n_sites, self.j_x, self.j_y, h_field)
    }

    pub fn with_couplings(self, j_x: f64, j_y: f64) -> Result<Self> {
        Self::new(self.n_sites, j_x, j_y, self.h_field)
    }

    pub fn with_n_sites(self, n_sites: usize) -> Result<Self> {
        Self::new(n_sites, self.j_x, self.j_y, self.h_field)
    }

    /// Momenta `q` labelling the `N/4` independent modes.
    pub fn mode_momenta(&self) -> Vec<f64> {
        mode_momenta(self.n_sites)
    }
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites < 4 || !n_sites.is_multiple_of(4) {
        return Err(Error::Parameter(format!("number of sites must be a positive multiple of 4, got {n_sites}")));
    }
    Ok(())
}

fn mode_momenta(n_sites: usize) -> Vec<f64> {
    let n = n_sites as f64;
    (1..=n_sites / 4).map(|j| PI * (2 * j - 1) as f64 / n).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    /// All `N` momenta, ascending.
    pub all_k: Vec<f64>,
    /// The `N/4` mode labels in `(0, π/2)`, ascending.
    pub mode_q: Vec<f64>,
}

pub fn momentum_grid(n_sites: usize) -> Result<MomentumGrid> {
    check_sites(n_sites)?;
    let n = n_sites as f64;
    let positive: Vec<f64> = (1..=n_sites / 2).map(|j| PI * (2 * j - 1) as f64 / n).collect();
    let mut all_k: Vec<f64> = positive.iter().rev().map(|k| -k).collect();
    all_k.extend_from_slice(&positive);
    let mode_q = mode_momenta(n_sites);
    debug_assert!(mode_q.iter().all(|&q| q > 0.0 && q < FRAC_PI_2));
    Ok(MomentumGrid { all_k, mode_q })
}

/// `(ε₁, ε₂)` with `2ε = J_x e^{-iq} + J_y e^{iq}` written as `ε₁ + iε₂`.
pub fn dispersion(p: &ChainParams, q: f64) -> (f64, f64) {
    let eps1 = 0.5 * (p.j_x + p.j_y) * q.cos();
    let eps2 = 0.5 * (p.j_y - p.j_x) * q.sin();
    (eps1, eps2)
}

/// Per-mode quasiparticle energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpectrum {
    pub q: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// `λ_{n₁n₂} = n₁|ε| + n₂√(|ε|²+h²)` ordered `(--, +-, -+, ++)`.
    pub lambdas: [f64; 4],
}

impl ModeSpectrum {
    pub fn eps_abs(&self) -> f64 {
        self.eps1.hypot(self.eps2)
    }
}

pub fn mode_eigenvalues(p: &ChainParams, q: f64) -> ModeSpectrum {
    let (eps1, eps2) = dispersion(p, q);
    let lambdas = lambdas_from(eps1.hypot(eps2), p.h_field);
    ModeSpectrum { q, eps1, eps2, lambdas }
}

pub(crate) fn lambdas_from(eps_abs: f64, h: f64) -> [f64; 4] {
    let root = eps_abs.hypot(h);
    [-eps_abs - root, eps_abs - root, -eps_abs + root, eps_abs + root]
}

/// `E_g = -4 Σ_q √(|ε_q|² + h²)`, filling the two negative levels of every mode.
pub fn ground_energy(p: &ChainParams) -> f64 {
    let h2 = p.h_field * p.h_field;
    -4.0 * p
        .mode_momenta()
        .into_iter()
        .map(|q| {
            let (e1, e2) = dispersion(p, q);
            (e1 * e1 + e2 * e2 + h2).sqrt()
        })
        .sum::<f64>()
}

/// Ground-state degeneracy `2^{N/2 - 1}` of the physical (even) sector at
/// `h = 0`, valid whenever both couplings are nonzero.
pub fn ground_degeneracy(n_sites: usize) -> Result<u128> {
    check_sites(n_sites)?;
    let exp = n_sites / 2 - 1;
    if exp >= 128 {
        return Err(Error::Parameter(format!("degeneracy 2^{exp} overflows u128")));
    }
    Ok(1u128 << exp)
}
