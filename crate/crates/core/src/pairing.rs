//! Real-space form of the ground state `|g⟩ ∝ e^{Ẑ}|0⟩`.
//!
//! In momentum space the exponent pairs the members of each mode quartet,
//!
//! ```text
//! Ẑ = Σ_q a₁(q) (c†_{q-π} c†_{-q} − c†_q c†_{π-q})
//!       + i a₂(q) (c†_q c†_{-q} − c†_{q-π} c†_{π-q}),
//! a_n(q) = ε_{nq} / (h + √(|ε_q|² + h²)),
//! ```
//!
//! and with `c†_k = N^{-1/2} Σ_l e^{ikl} c†_l` this becomes
//! `Ẑ = Σ_{l,m} γ_{lm} c†_l c†_m` with a real antisymmetric `γ`:
//!
//! ```text
//! γ_{lm} = (1/N) Σ_q [ a₁ cos(qx) ((-1)^l − (-1)^m) + a₂ sin(qx) ((-1)^{l+m} − 1) ],  x = l − m.
//! ```
//!
//! Only opposite-parity sites are paired. Sites are 1-based in formulas and
//! documentation; storage is 0-based.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Scalar};
use crate::model::{dispersion, ChainParams};

/// `(a₁, a₂)` for the mode at `q`.
pub fn pair_amplitudes(p: &ChainParams, q: f64) -> Result<(f64, f64)> {
    let (eps1, eps2) = dispersion(p, q);
    let h = p.h_field();
    let eps_sq = eps1 * eps1 + eps2 * eps2;
    let root = eps_sq.sqrt().hypot(h);
    if h > 0.0 {
        let denom = h + root;
        Ok((eps1 / denom, eps2 / denom))
    } else {
        // h + √(ε²+h²) = ε² / (√(ε²+h²) − h), which avoids cancellation for h < 0
        if eps_sq == 0.0 {
            return Err(Error::SingularMode { q });
        }
        let factor = (root - h) / eps_sq;
        Ok((eps1 * factor, eps2 * factor))
    }
}

/// `β_n(x) = (1/N) Σ_q a_n(q) e^{iqx}` for `n ∈ {1, 2}`.
pub fn beta_coefficients(p: &ChainParams, n: u8, x: i64) -> Result<Complex64> {
    if n != 1 && n != 2 {
        return Err(Error::Parameter(format!("beta index must be 1 or 2, got {n}")));
    }
    let inv_n = 1.0 / p.n_sites() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for q in p.mode_momenta() {
        let (a1, a2) = pair_amplitudes(p, q)?;
        let a = if n == 1 { a1 } else { a2 };
        acc += Complex64::from_polar(a * inv_n, q * x as f64);
    }
    Ok(acc)
}

/// One momentum-space pair term `coefficient · c†_{k1} c†_{k2}` of `Ẑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerm {
    pub k1: f64,
    pub k2: f64,
    pub coefficient: Complex64,
}

/// The four pair terms of every mode, in the order `(q-π,-q)`, `(q,π-q)`,
/// `(q,-q)`, `(q-π,π-q)`.
pub fn pair_terms(p: &ChainParams) -> Result<Vec<PairTerm>> {
    use std::f64::consts::PI;
    let mut terms = Vec::with_capacity(p.n_sites());
    for q in p.mode_momenta() {
        let (a1, a2) = pair_amplitudes(p, q)?;
        let i_a2 = Complex64::new(0.0, a2);
        terms.push(PairTerm { k1: q - PI, k2: -q, coefficient: a1.into() });
        terms.push(PairTerm { k1: q, k2: PI - q, coefficient: (-a1).into() });
        terms.push(PairTerm { k1: q, k2: -q, coefficient: i_a2 });
        terms.push(PairTerm { k1: q - PI, k2: PI - q, coefficient: -i_a2 });
    }
    Ok(terms)
}

/// Coefficients of `Ẑ = Σ_{l,m} γ_{lm} c†_l c†_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingMatrix<T = f64> {
    n_sites: usize,
    gamma: DenseMatrix<T>,
}

impl<T: Scalar> PairingMatrix<T> {
    pub fn new(gamma: DenseMatrix<T>) -> Result<Self> {
        if !gamma.is_square() {
            return Err(Error::Dimension(format!(
                "pairing matrix must be square, got {}x{}",
                gamma.rows(),
                gamma.cols()
            )));
        }
        Ok(Self { n_sites: gamma.rows(), gamma })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.gamma
    }

    /// `γ_{lm}` with 1-based site labels.
    pub fn get(&self, l: usize, m: usize) -> T {
        self.gamma[(l - 1, m - 1)]
    }

    /// `(γ − γᵀ)/2`, the part that survives in `c†_l c†_m` sums.
    pub fn antisymmetrized(&self) -> Self {
        let n = self.n_sites;
        let half = T::from_re(0.5);
        let gamma = DenseMatrix::from_fn(n, n, |i, j| half * (self.gamma[(i, j)] - self.gamma[(j, i)]));
        Self { n_sites: n, gamma }
    }
}

/// Fourier tables `C(x) = (1/N) Σ a₁ cos(qx)` and `S(x) = (1/N) Σ a₂ sin(qx)`
/// for `x = 0..N`.
fn fourier_tables(p: &ChainParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = p.n_sites();
    let inv_n = 1.0 / n as f64;
    let amps: Vec<(f64, f64, f64)> = p
        .mode_momenta()
        .into_iter()
        .map(|q| pair_amplitudes(p, q).map(|(a1, a2)| (q, a1 * inv_n, a2 * inv_n)))
        .collect::<Result<_>>()?;
    let mut cos_tab = vec![0.0; n];
    let mut sin_tab = vec![0.0; n];
    for x in 0..n {
        let (mut c, mut s) = (0.0, 0.0);
        for &(q, a1, a2) in &amps {
            let (sn, cs) = (q * x as f64).sin_cos();
            c += a1 * cs;
            s += a2 * sn;
        }
        cos_tab[x] = c;
        sin_tab[x] = s;
    }
    Ok((cos_tab, sin_tab))
}

fn parity_sign(site: usize) -> f64 {
    if site.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Pairing matrix obtained by transforming the momentum-space pair terms to
/// real space. Real and antisymmetric.
pub fn real_space_gamma(p: &ChainParams) -> Result<PairingMatrix<f64>> {
    let n = p.n_sites();
    let (cos_tab, sin_tab) = fourier_tables(p)?;
    let gamma = DenseMatrix::from_fn(n, n, |i, j| {
        let (l, m) = (i + 1, j + 1);
        let (sl, sm) = (parity_sign(l), parity_sign(m));
        let (c, s) = if l >= m { (cos_tab[l - m], sin_tab[l - m]) } else { (cos_tab[m - l], -sin_tab[m - l]) };
        c * (sl - sm) + s * (sl * sm - 1.0)
    });
    PairingMatrix::new(gamma)
}

/// Pairing matrix from the Fourier-coefficient closed form
/// `γ_{lm} = β₁(l−m)[(-1)^l − (-1)^m] + i β₂(l−m)[(-1)^{l+m} − 1]`.
///
/// Kept for comparison only: its `β₂` term carries the opposite sign to
/// [`real_space_gamma`], so the two differ whenever `J_x ≠ J_y`.
pub fn closed_form_gamma(p: &ChainParams) -> Result<PairingMatrix<Complex64>> {
    let n = p.n_sites() as i64;
    let beta = |k: u8| -> Result<Vec<Complex64>> { (-(n - 1)..n).map(|x| beta_coefficients(p, k, x)).collect() };
    let (b1, b2) = (beta(1)?, beta(2)?);
    let i = Complex64::new(0.0, 1.0);
    let gamma = DenseMatrix::from_fn(p.n_sites(), p.n_sites(), |r, c| {
        let (l, m) = (r + 1, c + 1);
        let idx = (l as i64 - m as i64 + n - 1) as usize;
        let (sl, sm) = (parity_sign(l), parity_sign(m));
        b1[idx] * (sl - sm) + i * b2[idx] * (sl * sm - 1.0)
    });
    PairingMatrix::new(gamma)
}

/// Largest entry-wise difference between the antisymmetric parts of the two
/// construction paths.
pub fn construction_discrepancy(p: &ChainParams) -> Result<f64> {
    let direct = real_space_gamma(p)?;
    let closed = closed_form_gamma(p)?.antisymmetrized();
    let n = p.n_sites();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let d = closed.matrix()[(i, j)] - Complex64::from(direct.matrix()[(i, j)]);
            worst = worst.max(d.norm());
        }
    }
    Ok(worst)
}

/// Cross-block coefficients `Γ_{lm}` of `Ẑ_AB = Σ Γ_{lm} A†_l B†_m`, where
/// `A_l = c_l` (l ≤ L) and `B_m = c_{m+L}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoupling<T = f64> {
    block_len: usize,
    coupling: DenseMatrix<T>,
}

impl<T: Scalar> BlockCoupling<T> {
    pub fn new(coupling: DenseMatrix<T>) -> Result<Self> {
        if !coupling.all_finite() {
            return Err(Error::Parameter("block coupling has non-finite entries".into()));
        }
        Ok(Self { block_len: coupling.rows(), coupling })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.coupling
    }
}

/// `Γ_{lm} = γ_{l,m+L} − γ_{m+L,l}` for the block of the first `block_len` sites.
pub fn block_coupling<T: Scalar>(g: &PairingMatrix<T>, block_len: usize) -> Result<BlockCoupling<T>> {
    let n = g.n_sites();
    if block_len == 0 || block_len >= n {
        return Err(Error::Parameter(format!("block length must lie in [1, {}], got {block_len}", n - 1)));
    }
    let gm = g.matrix();
    let coupling =
        DenseMatrix::from_fn(block_len, n - block_len, |l, m| gm[(l, m + block_len)] - gm[(m + block_len, l)]);
    BlockCoupling::new(coupling)
}
