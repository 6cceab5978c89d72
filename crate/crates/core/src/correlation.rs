//! Block entanglement from the pairing matrix via Majorana correlations.
//!
//! The state `e^{Ẑ}|0⟩` with `Ẑ = ½ Σ G_{lm} c†_l c†_m` is annihilated by
//! `c − G c†`. For real antisymmetric `G` this fixes the Majorana
//! cross-correlation `T_{lm} = −i⟨a_l b_m⟩` (`a = c + c†`, `b = i(c† − c)`) as
//! the Cayley transform
//!
//! ```text
//! T = (1 + G)(1 − G)⁻¹,
//! ```
//!
//! an orthogonal matrix. The reduced state of the first `L` sites is Gaussian;
//! the singular values `ν_n` of the `L×L` corner of `T` give its single-mode
//! occupations `(1 ± ν_n)/2`. Writing `1/(1+η_n) = (1+ν_n)/2` turns these into
//! operator Schmidt numbers of the Schmidt form `∏ (x_n + y_n A†_n B†_n)|0⟩`,
//! so the entropy formulas of [`crate::entropy`] apply unchanged.
//!
//! Unlike the singular values of the cross-block coupling alone, this accounts
//! for the in-block pairing `Ẑ_A`, `Ẑ_B`, which acts by non-unitary local
//! operators and does change the Schmidt coefficients.

use crate::entropy::SchmidtSpectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::pairing::PairingMatrix;

#[derive(Debug, Clone)]
pub struct MajoranaCorrelation {
    t: DenseMatrix<f64>,
}

impl MajoranaCorrelation {
    pub fn from_pairing(g: &PairingMatrix<f64>) -> Result<Self> {
        let n = g.n_sites();
        let gm = g.matrix();
        // G = γ − γᵀ so that Ẑ = ½ Σ G c†c†
        let full = DenseMatrix::from_fn(n, n, |i, j| gm[(i, j)] - gm[(j, i)]);
        let lhs = DenseMatrix::from_fn(n, n, |i, j| f64::from(i == j) - full[(i, j)]);
        let rhs = DenseMatrix::from_fn(n, n, |i, j| f64::from(i == j) + full[(i, j)]);
        // (1 − G) and (1 + G) commute, so (1 − G)⁻¹(1 + G) = T
        let t = linalg::solve(&lhs, &rhs)?;
        Ok(Self { t })
    }

    pub fn n_sites(&self) -> usize {
        self.t.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<f64> {
        &self.t
    }

    /// Largest entry of `|T Tᵀ − 1|`; zero for a pure state.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n_sites();
        let g = self.t.gram();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((g[(i, j)] - f64::from(i == j)).abs());
            }
        }
        worst
    }

    /// Singular values `ν_n` of the block corner, descending and clamped to `[0, 1]`.
    pub fn block_singular_values(&self, block_len: usize) -> Result<Vec<f64>> {
        let n = self.n_sites();
        if block_len == 0 || block_len >= n {
            return Err(Error::Parameter(format!("block length must lie in [1, {}], got {block_len}", n - 1)));
        }
        let corner = self.t.submatrix(0, 0, block_len, block_len);
        Ok(linalg::singular_values(&corner)?.into_iter().map(|v| v.min(1.0)).collect())
    }

    pub fn schmidt_spectrum(&self, block_len: usize) -> Result<SchmidtSpectrum> {
        let etas = self.block_singular_values(block_len)?.into_iter().map(|nu| (1.0 - nu) / (1.0 + nu)).collect();
        SchmidtSpectrum::new(etas, block_len)
    }
}
